/*!
  \file
  \brief Benchmark harness: convergence sweeps, automatic-integration trials
  and constant tables, all emitted as machine-readable text.
*/

#pragma once

#include <vrmc/auto_integrator.hpp>
#include <vrmc/error.hpp>
#include <vrmc/estimators.hpp>
#include <vrmc/oracle.hpp>
#include <vrmc/rng.hpp>
#include <vrmc/scheme.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace vrmc {

enum class NodeFamily { equispaced, gauss, custom };

inline auto parse_node_family(std::string_view name) -> NodeFamily {
  if (name == "equispaced") return NodeFamily::equispaced;
  if (name == "gauss") return NodeFamily::gauss;
  if (name == "custom") return NodeFamily::custom;
  throw Error(ErrorKind::invalid_argument, "unknown node family '" + std::string(name) + "'");
}

constexpr auto to_string(NodeFamily family) noexcept -> std::string_view {
  switch (family) {
    case NodeFamily::equispaced: return "equispaced";
    case NodeFamily::gauss: return "gauss";
    case NodeFamily::custom: return "custom";
  }
  return "unknown";
}

//! Scheme for a family; custom uses the given nodes and ignores r.
inline auto build_scheme(NodeFamily family, int r, const std::vector<double>& custom = {})
    -> InterpolationScheme {
  switch (family) {
    case NodeFamily::equispaced: return equispaced_scheme(r);
    case NodeFamily::gauss: return gauss_scheme(r);
    case NodeFamily::custom: return make_scheme(custom);
  }
  throw Error(ErrorKind::invalid_argument, "unknown node family");
}

/*!
  count log-spaced integers from lo to hi inclusive, rounded to nearest and
  deduplicated, so the grid is strictly increasing.
*/
inline auto log_grid(double lo, double hi, int count) -> std::vector<std::int64_t> {
  detail::require(lo >= 1.0 && hi >= lo, "N grid needs 1 <= lo <= hi");
  detail::require(count >= 1, "N grid needs count >= 1");
  std::vector<std::int64_t> out;
  for (int k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
    const auto N = static_cast<std::int64_t>(std::llround(lo * std::pow(hi / lo, t)));
    if (out.empty() || N > out.back()) out.push_back(N);
  }
  return out;
}

struct EstimatorParams {
  double kappa = 0.8;  //!< strata exponent
  double delta = 0.0;  //!< regularization
};

template <Integrand F>
auto run_estimator(Algorithm algo, F&& f, const InterpolationScheme& scheme, double a,
                   double b, std::int64_t N, const EstimatorParams& params,
                   RngStream& rng) -> EstimateReport {
  switch (algo) {
    case Algorithm::crude: return crude_mc(f, a, b, N, rng);
    case Algorithm::nonadaptive: return nonadaptive_vr(f, scheme, a, b, N, rng);
    case Algorithm::strata:
      return adaptive_stratified(f, scheme, a, b, N, StrataOptions{params.kappa, params.delta},
                                 rng);
    case Algorithm::importance: {
      ImportanceOptions opt;
      opt.delta = params.delta;
      return adaptive_importance(f, scheme, a, b, N, opt, rng);
    }
  }
  throw Error(ErrorKind::invalid_argument, "unknown algorithm");
}

namespace detail {

// Runs job(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any job is rethrown after all workers stop.
template <typename Job>
auto parallel_for(std::size_t count, unsigned threads, Job&& job) -> void {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

inline auto format_g17(double x) -> std::string {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline constexpr const char* kSweepCsvHeader =
    "algo,problem,r,N,rep,seed,estimate,abs_error,eval_count";
inline constexpr const char* kSweepSummaryHeader =
    "N,reps,rms_error,mean_error,thm1,thm2,thm3";

struct SweepConfig {
  Algorithm algorithm = Algorithm::importance;
  std::string problem = "logsing";
  double d = 1e-4;  //!< logsing parameter
  int r = 2;
  NodeFamily nodes = NodeFamily::equispaced;
  std::vector<double> custom_nodes;
  std::vector<std::int64_t> N_grid;
  int replications = 10;
  std::uint64_t seed = 1;
  EstimatorParams params;
  unsigned threads = 0;  //!< 0: hardware concurrency
};

struct SweepRow {
  std::int64_t N = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double abs_error = 0.0;
  std::int64_t eval_count = 0;
};

struct SweepSummaryRow {
  std::int64_t N = 0;
  int reps = 0;
  double rms_error = 0.0;
  double mean_error = 0.0;  //!< mean signed error
  double thm1 = 0.0, thm2 = 0.0, thm3 = 0.0;  //!< asymptotes at N; NaN if unknown
};

struct SweepResult {
  std::vector<SweepRow> rows;  //!< (N, rep) order
  std::vector<SweepSummaryRow> summary;
  double reference = 0.0;
};

/*!
  Runs every (N, rep) cell. Rep j uses seed base + j and the index of N in
  the grid as stream id, so every cell has its own stream and results do not
  depend on thread scheduling.
*/
inline auto run_sweep(const SweepConfig& config) -> SweepResult {
  detail::require(config.replications >= 1, "replications must be >= 1");
  detail::require(!config.N_grid.empty(), "N grid is empty");
  for (std::size_t i = 1; i < config.N_grid.size(); ++i) {
    detail::require(config.N_grid[i] > config.N_grid[i - 1], "N grid must be increasing");
  }
  const TestProblem problem = problems::by_name(config.problem, config.d);
  const InterpolationScheme scheme = build_scheme(config.nodes, config.r, config.custom_nodes);
  SweepResult result;
  result.reference = reference_integral(problem).value;

  const std::size_t reps = static_cast<std::size_t>(config.replications);
  result.rows.resize(config.N_grid.size() * reps);
  detail::parallel_for(result.rows.size(), config.threads, [&](std::size_t cell) {
    const std::size_t k = cell / reps;
    const int rep = static_cast<int>(cell % reps);
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(rep);
    RngStream rng(seed, k);
    const auto out = run_estimator(config.algorithm, problem.f, scheme, problem.a, problem.b,
                                   config.N_grid[k], config.params, rng);
    result.rows[cell] = SweepRow{config.N_grid[k], rep, seed, out.estimate,
                                 std::abs(out.estimate - result.reference),
                                 out.evaluation_count};
  });

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double c1 = nan, c2 = nan, c3 = nan;
  try {
    c1 = constant_thm1(scheme, problem);
    c2 = constant_thm2(scheme, problem);
    c3 = constant_thm3(scheme, problem);
  } catch (const Error&) {
    // No registered derivative: asymptotes stay NaN.
  }
  for (std::size_t k = 0; k < config.N_grid.size(); ++k) {
    SweepSummaryRow s;
    s.N = config.N_grid[k];
    s.reps = config.replications;
    NeumaierSum<double> sq, signed_sum;
    for (std::size_t j = 0; j < reps; ++j) {
      const auto& row = result.rows[k * reps + j];
      sq += row.abs_error * row.abs_error;
      signed_sum += row.estimate - result.reference;
    }
    s.rms_error = std::sqrt(sq.value() / static_cast<double>(reps));
    s.mean_error = signed_sum.value() / static_cast<double>(reps);
    const double rate = std::pow(static_cast<double>(s.N), -(scheme.r() + 0.5));
    s.thm1 = c1 * rate;
    s.thm2 = c2 * rate;
    s.thm3 = c3 * rate;
    result.summary.push_back(s);
  }
  return result;
}

inline auto write_sweep_csv(const SweepConfig& config, const SweepResult& result,
                            std::ostream& out) -> void {
  out << kSweepCsvHeader << '\n';
  const std::string algo(to_string(config.algorithm));
  const TestProblem problem = problems::by_name(config.problem, config.d);
  const int r = config.nodes == NodeFamily::custom
                    ? static_cast<int>(config.custom_nodes.size())
                    : config.r;
  char buf[320];
  for (const auto& row : result.rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%lld,%d,%llu,%.17g,%.17g,%lld\n", algo.c_str(),
                  problem.id.c_str(), r, static_cast<long long>(row.N), row.rep,
                  static_cast<unsigned long long>(row.seed), row.estimate, row.abs_error,
                  static_cast<long long>(row.eval_count));
    out << buf;
  }
}

inline auto write_sweep_summary(const SweepResult& result, std::ostream& out) -> void {
  out << kSweepSummaryHeader << '\n';
  char buf[320];
  for (const auto& s : result.summary) {
    std::snprintf(buf, sizeof buf, "%lld,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(s.N), s.reps, s.rms_error, s.mean_error, s.thm1,
                  s.thm2, s.thm3);
    out << buf;
  }
}

//! Least-squares slope of log10(rms) against log10(N) over rows with N >= n_min.
inline auto fitted_slope(const std::vector<SweepSummaryRow>& summary,
                         std::int64_t n_min = 0) -> double {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& s : summary) {
    if (s.N < n_min || !(s.rms_error > 0.0)) continue;
    const double x = std::log10(static_cast<double>(s.N));
    const double y = std::log10(s.rms_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  detail::require(n >= 2, "slope fit needs at least two points");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------

struct AutoTrialConfig {
  std::string problem = "cos100";
  double d = 1e-4;
  int r = 2;
  NodeFamily nodes = NodeFamily::equispaced;
  std::vector<double> custom_nodes;
  AutoConfig auto_config;
  int replications = 100;
  std::uint64_t seed = 1;
  bool queue_variant = false;
  unsigned threads = 0;
};

struct AutoTrialSummary {
  std::int64_t N_epsilon = 0;
  std::int64_t breaches = 0;
  double breach_fraction = 0.0;
  double e_max = 0.0;
  double reference = 0.0;
  std::vector<AutoReport> runs;  //!< rep order
};

/*!
  Independent runs of the automatic integrator; rep j uses seed base + j on
  stream 0. N_eps is deterministic, so every run reports the same value.
*/
inline auto run_auto_trial(const AutoTrialConfig& config) -> AutoTrialSummary {
  detail::require(config.replications >= 1, "replications must be >= 1");
  const TestProblem problem = problems::by_name(config.problem, config.d);
  const InterpolationScheme scheme = build_scheme(config.nodes, config.r, config.custom_nodes);
  AutoTrialSummary out;
  out.reference = reference_integral(problem).value;
  out.runs.resize(static_cast<std::size_t>(config.replications));
  detail::parallel_for(out.runs.size(), config.threads, [&](std::size_t j) {
    RngStream rng(config.seed + j, 0);
    out.runs[j] = config.queue_variant
                      ? auto_integrate_queue(problem.f, scheme, problem.a, problem.b,
                                             config.auto_config, rng)
                      : auto_integrate(problem.f, scheme, problem.a, problem.b,
                                       config.auto_config, rng);
  });
  out.N_epsilon = out.runs.front().N_epsilon;
  for (const auto& run : out.runs) {
    const double err = std::abs(run.estimate - out.reference);
    out.e_max = std::max(out.e_max, err);
    if (err > config.auto_config.epsilon) ++out.breaches;
  }
  out.breach_fraction = static_cast<double>(out.breaches) / config.replications;
  return out;
}

inline auto write_auto_trial(const AutoTrialConfig& config, const AutoTrialSummary& summary,
                             std::ostream& out) -> void {
  out << kAutoCsvHeader << ",abs_error\n";
  const int r = static_cast<int>(
      build_scheme(config.nodes, config.r, config.custom_nodes).r());
  for (const auto& run : summary.runs) {
    out << to_csv_row(run, r, config.auto_config) << ','
        << detail::format_g17(std::abs(run.estimate - summary.reference)) << '\n';
  }
}

inline auto write_auto_summary(const AutoTrialSummary& summary, std::ostream& out) -> void {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "N_epsilon,runs,breaches,breach_fraction,e_max\n%lld,%zu,%lld,%.17g,%.17g\n",
                static_cast<long long>(summary.N_epsilon), summary.runs.size(),
                static_cast<long long>(summary.breaches), summary.breach_fraction,
                summary.e_max);
  out << buf;
}

// ---------------------------------------------------------------------------

/*!
  Tab-separated constants, 12 significant digits: one scheme block, then one
  row per problem. Constants a problem cannot supply print as nan.
*/
inline auto print_constants(const InterpolationScheme& scheme, std::string_view family,
                            const std::vector<TestProblem>& list, std::ostream& out)
    -> void {
  char buf[512];
  out << "r\tnodes\talpha\tbeta\tgamma\tlambda\tc_r\tc_hat\tK*\n";
  std::snprintf(buf, sizeof buf, "%d\t%.*s\t%.12g\t%.12g\t%.12g\t%.12g\t%.12g\t%.12g\t%.12g\n",
                scheme.r(), static_cast<int>(family.size()), family.data(), scheme.alpha(),
                scheme.beta(), scheme.gamma(), scheme.lambda(), scheme.c_r(), scheme.c_hat(),
                estimate_kstar(scheme));
  out << buf << '\n';
  out << "problem\tthm1\tthm2\tthm3\tratio\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : list) {
    double c1 = nan, c2 = nan, c3 = nan;
    try {
      c1 = constant_thm1(scheme, p);
      c2 = constant_thm2(scheme, p);
      c3 = constant_thm3(scheme, p);
    } catch (const Error&) {
    }
    std::snprintf(buf, sizeof buf, "%s\t%.12g\t%.12g\t%.12g\t%.12g\n", p.id.c_str(), c1, c2,
                  c3, c2 > 0.0 ? c1 / c2 : nan);
    out << buf;
  }
}

}  // namespace vrmc
