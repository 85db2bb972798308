/*!
  \file
  \brief Automatic (epsilon, delta) integration.

  Two phases. Phase 1 bisects [a, b] recursively until every priority is at
  most eps' = eps^kappa and estimates L_r(f) from the resulting partition.
  That fixes the budget

    N_eps = floor((c_hat L sqrt(ln(2/delta)) / eps)^{1/(r+1/2)}),

  with c_hat = 2^{r+5/2} lambda c_r, which is split into (m_eps, n_eps).
  Phase 2 resumes the recursion on every leaf with eps'' = l_tilde m_eps^{-(r+1)}
  and the estimate is the importance-sampling estimator on the final
  partition with n_eps residual samples.

  The constant c_hat absorbs the Hoeffding bound: each residual sample lies
  in a range of width at most B_m ~ 2^{r+2} lambda / r! L_r(f) m^{-r}, so
  P(|error| > eps) <= 2 exp(-2 n eps^2 / B_m^2), which the budget split turns
  into the formula above.
*/

#pragma once

#include <vrmc/budget.hpp>
#include <vrmc/error.hpp>
#include <vrmc/estimators.hpp>
#include <vrmc/integrand.hpp>
#include <vrmc/partition.hpp>
#include <vrmc/rng.hpp>
#include <vrmc/scheme.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>

namespace vrmc {

struct AutoConfig {
  double epsilon = 1e-3;
  double delta = 0.05;
  double kappa = 0.5;
  double regularization = 0.0;  //!< priority regularization Delta
  int depth_limit = 60;
};

struct AutoReport {
  double estimate = 0.0;
  std::int64_t N_epsilon = 0;   //!< formula value
  std::int64_t N_budget = 0;    //!< N_epsilon raised to one cell plus one sample
  std::int64_t m_phase1 = 0;
  std::int64_t m_epsilon = 0;
  std::int64_t n_epsilon = 0;
  std::int64_t m_final = 0;
  double l_tilde_value = 0.0;
  double epsilon_prime = 0.0;
  double epsilon_double_prime = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::int64_t evaluation_count = 0;
  std::int64_t groups = 1;
  //! Every phase-1 priority vanished: f looks like a polynomial of degree < r.
  bool exact_mode = false;
  //! eps'' > eps' after a nontrivial phase 1.
  bool threshold_anomaly = false;
  //! Delta = 0 and some leaf stopped on a vanishing divided difference.
  bool zero_divided_difference = false;
  bool ungrouped_fallback = false;
  //! epsilon >= 1, outside the asymptotic regime.
  bool loose_epsilon = false;
};

struct SampleCount {
  std::int64_t value = 0;
  bool exact_mode = false;
};

namespace detail {

inline auto check_auto_config(const AutoConfig& c) -> void {
  require(std::isfinite(c.epsilon) && c.epsilon > 0.0, "epsilon must be > 0");
  require(c.delta > 0.0 && c.delta < 1.0, "delta must be in (0, 1)");
  require(c.kappa > 0.0 && c.kappa < 1.0, "kappa must be in (0, 1)");
  require(std::isfinite(c.regularization) && c.regularization >= 0.0,
          "regularization must be >= 0");
  require(c.depth_limit >= 0, "depth limit must be >= 0");
}

inline auto has_zero_leaf(const Partition& p) -> bool {
  if (p.delta() != 0.0) return false;
  return std::any_of(p.records().begin(), p.records().end(),
                     [](const auto& rec) { return rec.divided_diff == 0.0; });
}

}  // namespace detail

/*!
  Sample count for an estimate L of L_r(f).

  L = 0 returns the minimum feasible budget with exact_mode set. The value is
  otherwise the floored formula, which may be below minimum_budget.
*/
inline auto required_samples(double L, double epsilon, double delta,
                             const InterpolationScheme& scheme) -> SampleCount {
  detail::require(std::isfinite(L) && L >= 0.0, "L estimate must be finite and >= 0");
  detail::require(epsilon > 0.0, "epsilon must be > 0");
  detail::require(delta > 0.0 && delta < 1.0, "delta must be in (0, 1)");
  if (L == 0.0) return {minimum_budget(scheme), true};
  const double base = scheme.c_hat() * L * std::sqrt(std::log(2.0 / delta)) / epsilon;
  const double value = std::floor(std::pow(base, 1.0 / (scheme.r() + 0.5)));
  detail::require(value < 9.0e18, "required sample count overflows");
  return {static_cast<std::int64_t>(value), false};
}

namespace detail {

// Shared tail: budget from phase 1, phase-2 partition supplied by refine.
template <typename F, typename Refine>
auto finish_auto(F& counted, const InterpolationScheme& scheme, const Partition& phase1,
                 const AutoConfig& config, RngStream& rng, Refine&& refine)
    -> AutoReport {
  AutoReport rep;
  rep.seed = rng.seed();
  rep.stream = rng.stream_id();
  rep.loose_epsilon = config.epsilon >= 1.0;
  rep.m_phase1 = static_cast<std::int64_t>(phase1.size());
  rep.l_tilde_value = l_tilde(phase1);

  // Priorities estimate |f^(r)| / r!; L_r(f) itself carries the factor r!.
  const SampleCount count = required_samples(scheme.r_factorial() * rep.l_tilde_value,
                                             config.epsilon, config.delta, scheme);
  rep.N_epsilon = count.value;
  rep.exact_mode = count.exact_mode;
  rep.N_budget = count.exact_mode ? count.value
                                  : std::max(count.value, minimum_sampling_budget(scheme));
  const BudgetSplit split = split_budget(scheme, rep.N_budget);
  rep.m_epsilon = split.m;
  rep.n_epsilon = split.n;

  Partition final_partition = phase1;
  if (rep.exact_mode) {
    rep.n_epsilon = 0;
  } else {
    rep.epsilon_double_prime =
        rep.l_tilde_value * std::pow(static_cast<double>(split.m), -(scheme.r() + 1));
    final_partition = refine(phase1, rep);
  }
  rep.m_final = static_cast<std::int64_t>(final_partition.size());
  rep.zero_divided_difference = has_zero_leaf(final_partition);

  const auto res = importance_on_partition(counted, scheme, final_partition, rep.n_epsilon,
                                           GroupRule(default_group_count), rng);
  rep.estimate = res.estimate;
  rep.groups = res.groups;
  rep.ungrouped_fallback = res.ungrouped_fallback;
  rep.evaluation_count = counted.count();
  return rep;
}

}  // namespace detail

/*!
  Recursive two-phase automatic integrator. Deterministic up to the final
  sampling step: N_eps depends only on (f, scheme, config).
*/
template <Integrand F>
auto auto_integrate(F&& f, const InterpolationScheme& scheme, double a, double b,
                    const AutoConfig& config, RngStream& rng) -> AutoReport {
  detail::require(a < b, "integration interval needs a < b");
  detail::check_auto_config(config);
  auto counted = counting(f);
  const PartitionOptions options{config.regularization, config.depth_limit};
  const double eps1 = std::pow(config.epsilon, config.kappa);
  const Partition phase1 = partition_auto(counted, scheme, a, b, eps1, options);
  auto refine = [&](const Partition& coarse, AutoReport& rep) {
    rep.threshold_anomaly = coarse.size() > 1 && rep.epsilon_double_prime > eps1;
    return refine_auto(counted, coarse, rep.epsilon_double_prime);
  };
  AutoReport rep = detail::finish_auto(counted, scheme, phase1, config, rng, refine);
  rep.epsilon_prime = eps1;
  return rep;
}

/*!
  Priority-queue variant: phase 1 halves to
  m = floor((sqrt(ln(2/delta)) / eps)^{1/(r+1)}) intervals, phase 2 resumes
  to max(m, m_eps). Reports the phase-1 maximal priority as eps'.
*/
template <Integrand F>
auto auto_integrate_queue(F&& f, const InterpolationScheme& scheme, double a, double b,
                          const AutoConfig& config, RngStream& rng) -> AutoReport {
  detail::require(a < b, "integration interval needs a < b");
  detail::check_auto_config(config);
  auto counted = counting(f);
  const PartitionOptions options{config.regularization, config.depth_limit};
  const auto m1 = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(std::pow(
             std::sqrt(std::log(2.0 / config.delta)) / config.epsilon,
             1.0 / (scheme.r() + 1)))));
  PriorityPartitioner builder(counted, scheme, a, b, options);
  builder.split_until(static_cast<std::size_t>(m1));
  const Partition phase1 = builder.partition(counted.count());
  auto refine = [&](const Partition&, AutoReport& rep) {
    builder.split_until(static_cast<std::size_t>(std::max(m1, rep.m_epsilon)));
    return builder.partition(counted.count());
  };
  AutoReport rep = detail::finish_auto(counted, scheme, phase1, config, rng, refine);
  rep.epsilon_prime = phase1.max_priority();
  return rep;
}

inline constexpr const char* kAutoCsvHeader =
    "r,epsilon,delta,seed,estimate,N_epsilon,m_phase1,m_epsilon,n_epsilon,m_final,"
    "l_tilde,epsilon_prime,epsilon_double_prime,eval_count,exact_mode,"
    "threshold_anomaly,zero_divided_difference";

inline auto to_csv_row(const AutoReport& rep, int r, const AutoConfig& config)
    -> std::string {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%d,%.17g,%.17g,%llu,%.17g,%lld,%lld,%lld,%lld,%lld,%.17g,%.17g,%.17g,"
                "%lld,%d,%d,%d",
                r, config.epsilon, config.delta,
                static_cast<unsigned long long>(rep.seed), rep.estimate,
                static_cast<long long>(rep.N_epsilon),
                static_cast<long long>(rep.m_phase1),
                static_cast<long long>(rep.m_epsilon),
                static_cast<long long>(rep.n_epsilon),
                static_cast<long long>(rep.m_final), rep.l_tilde_value,
                rep.epsilon_prime, rep.epsilon_double_prime,
                static_cast<long long>(rep.evaluation_count), rep.exact_mode ? 1 : 0,
                rep.threshold_anomaly ? 1 : 0, rep.zero_divided_difference ? 1 : 0);
  return buf;
}

}  // namespace vrmc
