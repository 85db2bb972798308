// Command-line front end: sweep, auto, constants, partition.
//
// Failures print one line "error: <kind>: <message>" on stderr and exit 2.

#include <vrmc/vrmc.hpp>

#include <CLI11.hpp>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using vrmc::Error;
using vrmc::ErrorKind;

auto parse_real(const std::string& text, const char* what) -> double {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    throw Error(ErrorKind::invalid_argument,
                std::string("bad value for ") + what + ": '" + text + "'");
  }
  return v;
}

// Integers accept scientific notation ("1e4") but must be whole.
auto parse_count(const std::string& text, const char* what) -> std::int64_t {
  const double v = parse_real(text, what);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw Error(ErrorKind::invalid_argument,
                std::string(what) + " must be an integer: '" + text + "'");
  }
  return static_cast<std::int64_t>(v);
}

auto parse_seed(const std::string& text) -> std::uint64_t {
  if (!text.empty() && text.find_first_not_of("0123456789") == std::string::npos) {
    errno = 0;
    const auto v = std::strtoull(text.c_str(), nullptr, 10);
    if (errno == ERANGE) throw Error(ErrorKind::invalid_argument, "seed out of range");
    return v;
  }
  const auto v = parse_count(text, "--seed");
  if (v < 0) throw Error(ErrorKind::invalid_argument, "seed must be >= 0");
  return static_cast<std::uint64_t>(v);
}

struct SchemeChoice {
  vrmc::NodeFamily family = vrmc::NodeFamily::equispaced;
  std::vector<double> custom;
};

// "equispaced", "gauss", or a comma-separated node list in [0, 1].
auto parse_nodes(const std::string& text) -> SchemeChoice {
  SchemeChoice out;
  if (text == "equispaced" || text == "gauss") {
    out.family = vrmc::parse_node_family(text);
    return out;
  }
  out.family = vrmc::NodeFamily::custom;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.custom.push_back(parse_real(item, "--nodes"));
  if (out.custom.empty()) throw Error(ErrorKind::invalid_argument, "empty node list");
  return out;
}

auto parse_grid(const std::string& text) -> std::vector<std::int64_t> {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) {
    throw Error(ErrorKind::invalid_argument, "--n-grid expects lo:hi:count");
  }
  return vrmc::log_grid(parse_real(parts[0], "--n-grid lo"),
                        parse_real(parts[1], "--n-grid hi"),
                        static_cast<int>(parse_count(parts[2], "--n-grid count")));
}

auto open_out(const std::string& path) -> std::ofstream {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
  return out;
}

auto check_written(std::ostream& out, const std::string& path) -> void {
  out.flush();
  if (!out) throw Error(ErrorKind::io, "write to '" + path + "' failed");
}

struct Common {
  std::string r = "2";
  std::string nodes = "equispaced";
  std::string problem = "logsing";
  std::string d = "1e-4";
  std::string delta_reg = "0";
  std::string seed = "1";
  std::string reps = "10";
  std::string out;
  unsigned threads = 0;
};

auto add_common(CLI::App* cmd, Common& c) -> void {
  cmd->add_option("--r", c.r, "number of interpolation nodes")->capture_default_str();
  cmd->add_option("--nodes", c.nodes, "equispaced | gauss | comma-separated list")
      ->capture_default_str();
  cmd->add_option("--problem", c.problem, "logsing | cos100 | exp | poly(k)")
      ->capture_default_str();
  cmd->add_option("--d", c.d, "logsing parameter")->capture_default_str();
  cmd->add_option("--delta-reg", c.delta_reg, "priority regularization")
      ->capture_default_str();
}

auto build(const Common& c) -> std::pair<vrmc::InterpolationScheme, SchemeChoice> {
  const SchemeChoice choice = parse_nodes(c.nodes);
  const int r = static_cast<int>(parse_count(c.r, "--r"));
  return {vrmc::build_scheme(choice.family, r, choice.custom), choice};
}

auto run(int argc, char** argv) -> int {
  CLI::App app{"Variance-reduced Monte Carlo integration"};
  app.require_subcommand(1);

  Common sw;
  std::string algo = "importance", N, grid, kappa = "0.8";
  auto* sweep = app.add_subcommand("sweep", "convergence sweep, CSV rows per (N, rep)");
  add_common(sweep, sw);
  sweep->add_option("--algo", algo, "crude | nonadaptive | strata | importance")
      ->capture_default_str();
  sweep->add_option("--N", N, "single budget");
  sweep->add_option("--n-grid", grid, "log-spaced budgets lo:hi:count");
  sweep->add_option("--reps", sw.reps, "replications per N")->capture_default_str();
  sweep->add_option("--seed", sw.seed, "base seed")->capture_default_str();
  sweep->add_option("--kappa", kappa, "strata exponent")->capture_default_str();
  sweep->add_option("--out", sw.out, "CSV path; summary goes to <out>.summary.csv");
  sweep->add_option("--threads", sw.threads, "worker threads, 0 = all cores");

  Common au;
  au.problem = "cos100";
  au.reps = "1";
  std::string eps = "1e-3", delta = "0.05", auto_kappa = "0.5";
  bool queue = false;
  auto* autocmd = app.add_subcommand("auto", "automatic (eps, delta) integration runs");
  add_common(autocmd, au);
  autocmd->add_option("--eps", eps, "target absolute error")->capture_default_str();
  autocmd->add_option("--delta", delta, "failure probability")->capture_default_str();
  autocmd->add_option("--kappa", auto_kappa, "phase-1 exponent")->capture_default_str();
  autocmd->add_option("--reps", au.reps, "independent runs")->capture_default_str();
  autocmd->add_option("--seed", au.seed, "base seed")->capture_default_str();
  autocmd->add_flag("--queue", queue, "priority-queue variant");
  autocmd->add_option("--out", au.out, "per-run CSV path; summary goes to stdout");
  autocmd->add_option("--threads", au.threads, "worker threads, 0 = all cores");

  Common co;
  std::vector<std::string> problem_list;
  auto* constants = app.add_subcommand("constants", "scheme and error-law constants");
  constants->add_option("--r", co.r, "number of interpolation nodes")->capture_default_str();
  constants->add_option("--nodes", co.nodes, "equispaced | gauss | comma-separated list")
      ->capture_default_str();
  constants->add_option("--problem", problem_list, "repeatable; default all built-ins");
  constants->add_option("--d", co.d, "logsing parameter")->capture_default_str();

  Common pa;
  std::string m, threshold;
  bool dump = false;
  auto* partition = app.add_subcommand("partition", "build a partition");
  add_common(partition, pa);
  partition->add_option("--m", m, "number of intervals (max-priority halving)");
  partition->add_option("--threshold", threshold, "priority threshold (recursive halving)");
  partition->add_flag("--dump", dump, "print left, right, d, priority per interval");
  partition->add_option("--out", pa.out, "output path, default stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: invalid_argument: " << e.what() << '\n';
    return 2;
  }

  if (*sweep) {
    vrmc::SweepConfig cfg;
    cfg.algorithm = vrmc::parse_algorithm(algo);
    cfg.problem = sw.problem;
    cfg.d = parse_real(sw.d, "--d");
    const auto [scheme, choice] = build(sw);
    cfg.r = scheme.r();
    cfg.nodes = choice.family;
    cfg.custom_nodes = choice.custom;
    if (!N.empty() && !grid.empty()) {
      throw Error(ErrorKind::invalid_argument, "give either --N or --n-grid");
    }
    if (!N.empty()) cfg.N_grid = {parse_count(N, "--N")};
    else if (!grid.empty()) cfg.N_grid = parse_grid(grid);
    else throw Error(ErrorKind::invalid_argument, "sweep needs --N or --n-grid");
    cfg.replications = static_cast<int>(parse_count(sw.reps, "--reps"));
    cfg.seed = parse_seed(sw.seed);
    cfg.params.kappa = parse_real(kappa, "--kappa");
    cfg.params.delta = parse_real(sw.delta_reg, "--delta-reg");
    cfg.threads = sw.threads;
    const auto result = vrmc::run_sweep(cfg);
    if (sw.out.empty()) {
      vrmc::write_sweep_csv(cfg, result, std::cout);
      std::cout << '\n';
      vrmc::write_sweep_summary(result, std::cout);
    } else {
      auto out = open_out(sw.out);
      vrmc::write_sweep_csv(cfg, result, out);
      check_written(out, sw.out);
      const std::string summary_path = sw.out + ".summary.csv";
      auto summary = open_out(summary_path);
      vrmc::write_sweep_summary(result, summary);
      check_written(summary, summary_path);
    }
    return 0;
  }

  if (*autocmd) {
    vrmc::AutoTrialConfig cfg;
    cfg.problem = au.problem;
    cfg.d = parse_real(au.d, "--d");
    const auto [scheme, choice] = build(au);
    cfg.r = scheme.r();
    cfg.nodes = choice.family;
    cfg.custom_nodes = choice.custom;
    cfg.auto_config.epsilon = parse_real(eps, "--eps");
    cfg.auto_config.delta = parse_real(delta, "--delta");
    cfg.auto_config.kappa = parse_real(auto_kappa, "--kappa");
    cfg.auto_config.regularization = parse_real(au.delta_reg, "--delta-reg");
    cfg.replications = static_cast<int>(parse_count(au.reps, "--reps"));
    cfg.seed = parse_seed(au.seed);
    cfg.queue_variant = queue;
    cfg.threads = au.threads;
    if (cfg.auto_config.epsilon >= 1.0) {
      std::cerr << "warning: epsilon >= 1 is outside the asymptotic regime\n";
    }
    const auto summary = vrmc::run_auto_trial(cfg);
    const auto& first = summary.runs.front();
    if (first.threshold_anomaly) {
      std::cerr << "warning: phase-2 threshold exceeds phase-1 threshold\n";
    }
    if (first.zero_divided_difference) {
      std::cerr << "warning: Delta = 0 and a vanishing divided difference ended a leaf\n";
    }
    if (au.out.empty()) {
      vrmc::write_auto_trial(cfg, summary, std::cout);
      std::cout << '\n';
    } else {
      auto out = open_out(au.out);
      vrmc::write_auto_trial(cfg, summary, out);
      check_written(out, au.out);
    }
    vrmc::write_auto_summary(summary, std::cout);
    return 0;
  }

  if (*constants) {
    const auto [scheme, choice] = build(co);
    const double d = parse_real(co.d, "--d");
    std::vector<vrmc::TestProblem> list;
    if (problem_list.empty()) {
      list = vrmc::problems::builtin();
      list[0] = vrmc::problems::logsing(d);
    } else {
      for (const auto& name : problem_list) list.push_back(vrmc::problems::by_name(name, d));
    }
    vrmc::print_constants(scheme, vrmc::to_string(choice.family), list, std::cout);
    return 0;
  }

  if (*partition) {
    const auto [scheme, choice] = build(pa);
    const auto problem = vrmc::problems::by_name(pa.problem, parse_real(pa.d, "--d"));
    const vrmc::PartitionOptions options{parse_real(pa.delta_reg, "--delta-reg"), 60};
    if (m.empty() == threshold.empty()) {
      throw Error(ErrorKind::invalid_argument, "partition needs exactly one of --m, --threshold");
    }
    const auto part =
        !m.empty()
            ? vrmc::partition_fixed(problem.f, scheme, problem.a, problem.b,
                                    parse_count(m, "--m"), options)
            : vrmc::partition_auto(problem.f, scheme, problem.a, problem.b,
                                   parse_real(threshold, "--threshold"), options);
    auto emit = [&](std::ostream& out) {
      if (dump) {
        vrmc::dump_partition(part, out);
      } else {
        char buf[200];
        std::snprintf(buf, sizeof buf, "intervals\t%zu\nl_tilde\t%.17g\nevaluations\t%lld\n",
                      part.size(), vrmc::l_tilde(part),
                      static_cast<long long>(part.evaluation_count()));
        out << buf;
      }
    };
    if (pa.out.empty()) {
      emit(std::cout);
    } else {
      auto out = open_out(pa.out);
      emit(out);
      check_written(out, pa.out);
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const vrmc::Error& e) {
    std::cerr << "error: " << vrmc::to_string(e.kind()) << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
  }
  return 2;
}
