#include <vrmc/bench.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using vrmc::Algorithm;

namespace {

auto split(const std::string& line, char sep) -> std::vector<std::string> {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string field;
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

auto lines(const std::string& text) -> std::vector<std::string> { return split(text, '\n'); }

struct CommandResult {
  std::string out;
  int status = -1;
};

// stdout and stderr combined
auto run_cli(const std::string& args) -> CommandResult {
  const std::string cmd = std::string(VRMC_CLI_PATH) + " " + args + " 2>&1";
  CommandResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return res;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  res.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return res;
}

auto small_sweep(Algorithm algo, const std::string& problem) -> vrmc::SweepConfig {
  vrmc::SweepConfig c;
  c.algorithm = algo;
  c.problem = problem;
  c.r = 2;
  c.N_grid = {50, 200};
  c.replications = 5;
  c.seed = 11;
  c.params.kappa = 0.5;
  c.threads = 3;
  return c;
}

auto sweep_csv(const vrmc::SweepConfig& c) -> std::string {
  std::ostringstream out;
  vrmc::write_sweep_csv(c, vrmc::run_sweep(c), out);
  return out.str();
}

}  // namespace

TEST(LogGrid, IncreasingAndInclusive) {
  const auto g = vrmc::log_grid(100, 31623, 11);
  ASSERT_EQ(g.size(), 11u);
  EXPECT_EQ(g.front(), 100);
  EXPECT_EQ(g.back(), 31623);
  EXPECT_EQ(g[2], 316);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
  const auto dense = vrmc::log_grid(1, 4, 20);
  EXPECT_EQ(dense, (std::vector<std::int64_t>{1, 2, 3, 4}));
  EXPECT_THROW((void)vrmc::log_grid(0.5, 10, 3), vrmc::Error);
}

TEST(NodeFamily, ParseAndBuild) {
  EXPECT_EQ(vrmc::parse_node_family("equispaced"), vrmc::NodeFamily::equispaced);
  EXPECT_EQ(vrmc::parse_node_family("gauss"), vrmc::NodeFamily::gauss);
  EXPECT_THROW((void)vrmc::parse_node_family("chebyshev"), vrmc::Error);
  const auto s = vrmc::build_scheme(vrmc::NodeFamily::custom, 0, {0.0, 0.5, 1.0});
  EXPECT_EQ(s.r(), 3);
  EXPECT_TRUE(s.endpoint_sharing());
}

TEST(Sweep, HeaderAndRoundTrip) {
  const auto c = small_sweep(Algorithm::importance, "logsing");
  const auto result = vrmc::run_sweep(c);
  std::ostringstream out;
  vrmc::write_sweep_csv(c, result, out);
  const auto ls = lines(out.str());
  ASSERT_EQ(ls.size(), 1 + result.rows.size());
  EXPECT_EQ(ls[0], "algo,problem,r,N,rep,seed,estimate,abs_error,eval_count");
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto f = split(ls[i + 1], ',');
    ASSERT_EQ(f.size(), 9u);
    const auto& row = result.rows[i];
    EXPECT_EQ(f[0], "importance");
    EXPECT_EQ(f[1], "logsing(0.0001)");
    EXPECT_EQ(std::stoi(f[2]), 2);
    EXPECT_EQ(std::stoll(f[3]), row.N);
    EXPECT_EQ(std::stoi(f[4]), row.rep);
    EXPECT_EQ(std::stoull(f[5]), row.seed);
    EXPECT_EQ(std::stod(f[6]), row.estimate);
    EXPECT_EQ(std::stod(f[7]), row.abs_error);
    EXPECT_EQ(std::stoll(f[8]), row.eval_count);
    EXPECT_EQ(row.seed, c.seed + static_cast<std::uint64_t>(row.rep));
  }
}

TEST(Sweep, ReproducibleAcrossThreadCounts) {
  for (auto algo : {Algorithm::crude, Algorithm::nonadaptive, Algorithm::strata,
                    Algorithm::importance}) {
    auto c = small_sweep(algo, "cos100");
    const auto first = sweep_csv(c);
    EXPECT_EQ(sweep_csv(c), first);
    c.threads = 1;
    EXPECT_EQ(sweep_csv(c), first);
    c.seed = 12;
    EXPECT_NE(sweep_csv(c), first);
  }
}

TEST(Sweep, CrudeOnConstantIsExact) {
  auto c = small_sweep(Algorithm::crude, "poly(0)");
  const auto result = vrmc::run_sweep(c);
  for (const auto& row : result.rows) EXPECT_EQ(row.abs_error, 0.0);
  for (const auto& s : result.summary) EXPECT_EQ(s.rms_error, 0.0);
}

TEST(Sweep, SummaryColumns) {
  auto c = small_sweep(Algorithm::nonadaptive, "exp");
  const auto result = vrmc::run_sweep(c);
  ASSERT_EQ(result.summary.size(), 2u);
  const auto s = vrmc::equispaced_scheme(2);
  const double c1 = vrmc::constant_thm1(s, vrmc::problems::exp());
  EXPECT_NEAR(result.summary[0].thm1, c1 * std::pow(50.0, -2.5), 1e-15);
  EXPECT_GE(result.summary[1].thm3, result.summary[1].thm2);
  std::ostringstream out;
  vrmc::write_sweep_summary(result, out);
  const auto ls = lines(out.str());
  EXPECT_EQ(ls[0], "N,reps,rms_error,mean_error,thm1,thm2,thm3");
  EXPECT_EQ(split(ls[1], ',').size(), 7u);

  auto cos = small_sweep(Algorithm::nonadaptive, "cos100");
  for (const auto& row : vrmc::run_sweep(cos).summary) EXPECT_TRUE(std::isnan(row.thm1));
}

TEST(Sweep, RejectsBadConfig) {
  auto c = small_sweep(Algorithm::crude, "exp");
  c.N_grid = {200, 50};
  EXPECT_THROW((void)vrmc::run_sweep(c), vrmc::Error);
  c.N_grid = {50};
  c.replications = 0;
  EXPECT_THROW((void)vrmc::run_sweep(c), vrmc::Error);
  c.replications = 1;
  c.problem = "nope";
  EXPECT_THROW((void)vrmc::run_sweep(c), vrmc::Error);
}

TEST(Sweep, StratifiedBeatsNonadaptiveFromOneThousand) {
  vrmc::SweepConfig c;
  c.problem = "logsing";
  c.r = 4;
  // kappa = 0.6 keeps N >= (2r+1) N^kappa from N = 1000 on
  c.N_grid = {1000, 3162, 10000};
  c.replications = 30;
  c.params.kappa = 0.6;
  c.algorithm = Algorithm::strata;
  const auto strata = vrmc::run_sweep(c);
  c.algorithm = Algorithm::nonadaptive;
  const auto plain = vrmc::run_sweep(c);
  for (std::size_t k = 0; k < c.N_grid.size(); ++k) {
    EXPECT_LT(strata.summary[k].rms_error, plain.summary[k].rms_error) << c.N_grid[k];
  }
}

TEST(FittedSlope, ExactPowerLaw) {
  std::vector<vrmc::SweepSummaryRow> rows;
  for (std::int64_t N : {100, 1000, 10000}) {
    vrmc::SweepSummaryRow s;
    s.N = N;
    s.rms_error = 3.0 * std::pow(static_cast<double>(N), -2.5);
    rows.push_back(s);
  }
  EXPECT_NEAR(vrmc::fitted_slope(rows), -2.5, 1e-12);
  EXPECT_THROW((void)vrmc::fitted_slope(rows, 5000), vrmc::Error);
}

TEST(AutoTrial, LooseEpsilonHasNoBreaches) {
  vrmc::AutoTrialConfig c;
  c.problem = "exp";
  c.auto_config.epsilon = 1.0;
  c.replications = 200;
  const auto s = vrmc::run_auto_trial(c);
  EXPECT_EQ(s.breaches, 0);
  for (const auto& run : s.runs) {
    EXPECT_EQ(run.m_phase1, 1);
    EXPECT_EQ(run.N_epsilon, s.N_epsilon);
  }
  std::ostringstream out;
  vrmc::write_auto_summary(s, out);
  const auto ls = lines(out.str());
  EXPECT_EQ(ls[0], "N_epsilon,runs,breaches,breach_fraction,e_max");
  EXPECT_EQ(split(ls[1], ',')[2], "0");
}

TEST(AutoTrial, ReproducibleCsv) {
  vrmc::AutoTrialConfig c;
  c.replications = 16;
  c.threads = 4;
  std::ostringstream a, b;
  vrmc::write_auto_trial(c, vrmc::run_auto_trial(c), a);
  c.threads = 1;
  vrmc::write_auto_trial(c, vrmc::run_auto_trial(c), b);
  EXPECT_EQ(a.str(), b.str());
  const auto ls = lines(a.str());
  ASSERT_EQ(ls.size(), 17u);
  EXPECT_EQ(ls[0], std::string(vrmc::kAutoCsvHeader) + ",abs_error");
}

TEST(PrintConstants, Rows) {
  std::ostringstream out;
  vrmc::print_constants(vrmc::equispaced_scheme(2), "equispaced",
                        {vrmc::problems::exp(), vrmc::problems::cos100()}, out);
  const auto ls = lines(out.str());
  ASSERT_GE(ls.size(), 6u);
  EXPECT_EQ(ls[0], "r\tnodes\talpha\tbeta\tgamma\tlambda\tc_r\tc_hat\tK*");
  const auto row = split(ls[1], '\t');
  ASSERT_EQ(row.size(), 9u);
  EXPECT_NEAR(std::stod(row[8]), 4.250, 0.005);
  EXPECT_EQ(ls[2], "");
  EXPECT_EQ(split(ls[4], '\t')[0], "exp");
  EXPECT_NEAR(std::stod(split(ls[4], '\t')[1]), 0.273273328901, 1e-11);
  EXPECT_EQ(split(ls[5], '\t')[1], "nan");

  std::ostringstream g;
  vrmc::print_constants(vrmc::gauss_scheme(2), "gauss", {}, g);
  EXPECT_EQ(split(lines(g.str())[1], '\t')[3], "0");

  std::ostringstream r4;
  vrmc::print_constants(vrmc::equispaced_scheme(4), "equispaced",
                        {vrmc::problems::logsing(1e-4)}, r4);
  EXPECT_NEAR(std::stod(split(lines(r4.str())[4], '\t')[4]), 5.7e12, 0.1 * 5.7e12);
}

TEST(Cli, ErrorLineAndExitCode) {
  const auto bad = run_cli("sweep --problem nope --N 100");
  EXPECT_EQ(bad.status, 2);
  EXPECT_NE(bad.out.find("error: invalid_argument: unknown problem 'nope'"), std::string::npos)
      << bad.out;
  const auto bad_count = run_cli("sweep --problem exp --N 1.5");
  EXPECT_EQ(bad_count.status, 2);
  EXPECT_EQ(bad_count.out.rfind("error: ", 0), 0u) << bad_count.out;
}

TEST(Cli, ScientificNotationAndReproducibility) {
  const std::string args = "sweep --algo nonadaptive --problem exp --n-grid 1e2:1e3:3 --reps 4 --seed 9";
  const auto a = run_cli(args);
  const auto b = run_cli(args + " --threads 1");
  ASSERT_EQ(a.status, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines(a.out)[0], vrmc::kSweepCsvHeader);
}

TEST(Cli, ConstantsTable) {
  const auto res = run_cli("constants --r 2 --nodes gauss --problem exp");
  ASSERT_EQ(res.status, 0) << res.out;
  const auto ls = lines(res.out);
  EXPECT_EQ(split(ls[1], '\t')[1], "gauss");
  EXPECT_EQ(split(ls[1], '\t')[3], "0");
  EXPECT_NEAR(std::stod(split(ls[1], '\t')[8]), 2.138, 0.005);
}
