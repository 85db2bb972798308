/*!
  \file
  \brief Monte Carlo estimators of the integral of f over [a, b].

  - crude_mc: plain Monte Carlo with N uniform samples.
  - nonadaptive_vr: piecewise interpolant on m equal cells plus Monte Carlo
    on the residual f - L, with (m, n) from split_budget.
  - adaptive_stratified: k = N^kappa equal strata, each receiving a budget
    proportional to a divided-difference estimate of its error constant and
    running nonadaptive_vr independently.
  - adaptive_importance: interpolant on a max-priority nested partition,
    residual sampled with density 1 / (m h_i) on interval I_i, optionally
    stratified over groups of consecutive intervals.

  All deterministic parts and Monte Carlo sums use compensated summation.
*/

#pragma once

#include <vrmc/budget.hpp>
#include <vrmc/compensated_sum.hpp>
#include <vrmc/error.hpp>
#include <vrmc/integrand.hpp>
#include <vrmc/interp.hpp>
#include <vrmc/partition.hpp>
#include <vrmc/rng.hpp>
#include <vrmc/scheme.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace vrmc {

enum class Algorithm { crude, nonadaptive, strata, importance };

constexpr auto to_string(Algorithm algo) noexcept -> std::string_view {
  switch (algo) {
    case Algorithm::crude: return "crude";
    case Algorithm::nonadaptive: return "nonadaptive";
    case Algorithm::strata: return "strata";
    case Algorithm::importance: return "importance";
  }
  return "unknown";
}

inline auto parse_algorithm(std::string_view name) -> Algorithm {
  for (auto algo : {Algorithm::crude, Algorithm::nonadaptive, Algorithm::strata,
                    Algorithm::importance}) {
    if (to_string(algo) == name) return algo;
  }
  throw Error(ErrorKind::invalid_argument,
              "unknown algorithm '" + std::string(name) + "'");
}

struct EstimateReport {
  Algorithm algorithm = Algorithm::crude;
  double estimate = 0.0;
  std::int64_t N_requested = 0;
  //! Interpolation nodes plus random samples; excludes partition probes.
  std::int64_t N_consumed = 0;
  std::int64_t m = 0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  //! Every integrand call, partition probes included.
  std::int64_t evaluation_count = 0;
  //! Some cell or partition got no random samples: the estimate is biased.
  bool deterministic_only = false;
  //! adaptive_stratified found every stratum constant zero.
  bool uniform_fallback = false;
  //! adaptive_importance had more groups than samples and sampled ungrouped.
  bool ungrouped_fallback = false;
  std::int64_t groups = 1;
};

/*!
  Chooses the number of sample groups k for m intervals and n samples.
  Must return a divisor of m.
*/
using GroupRule = std::function<std::int64_t(std::int64_t m, std::int64_t n)>;

//! Largest divisor of m not exceeding ceil(sqrt(m)).
inline auto default_group_count(std::int64_t m, std::int64_t /*n*/) -> std::int64_t {
  auto cap = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(m))));
  while (cap * cap < m) ++cap;
  for (std::int64_t k = std::min(cap, m); k > 1; --k) {
    if (m % k == 0) return k;
  }
  return 1;
}

inline auto ungrouped(std::int64_t, std::int64_t) -> std::int64_t { return 1; }

namespace detail {

// Interpolation node values for contiguous intervals; with endpoint sharing a
// cell's last node is the next cell's first.
struct NodeTable {
  std::vector<double> left, right, values;  // values: r per interval
  int r = 0;

  auto node_values(std::size_t i) const -> std::span<const double> {
    return {values.data() + i * r, static_cast<std::size_t>(r)};
  }
};

template <typename F>
auto tabulate_nodes(F& f, const InterpolationScheme& scheme,
                    std::vector<double> left, std::vector<double> right)
    -> NodeTable {
  NodeTable t;
  t.r = scheme.r();
  t.left = std::move(left);
  t.right = std::move(right);
  t.values.resize(t.left.size() * t.r);
  const bool share = scheme.endpoint_sharing();
  for (std::size_t i = 0; i < t.left.size(); ++i) {
    const auto x = mapped_nodes(scheme, t.left[i], t.right[i]);
    for (int s = 0; s < t.r; ++s) {
      if (share && s == 0 && i > 0 && t.left[i] == t.right[i - 1]) {
        t.values[i * t.r] = t.values[(i - 1) * t.r + t.r - 1];
      } else {
        t.values[i * t.r + s] = f(x[s]);
      }
    }
  }
  return t;
}

inline auto deterministic_part(const InterpolationScheme& scheme,
                               const NodeTable& t) -> double {
  NeumaierSum<double> acc;
  for (std::size_t i = 0; i < t.left.size(); ++i) {
    acc += interpolant_integral(scheme, t.left[i], t.right[i], t.node_values(i));
  }
  return acc.value();
}

inline auto uniform_cells(double a, double b, std::int64_t m)
    -> std::pair<std::vector<double>, std::vector<double>> {
  std::vector<double> left(m), right(m);
  const double h = (b - a) / static_cast<double>(m);
  for (std::int64_t i = 0; i < m; ++i) left[i] = a + static_cast<double>(i) * h;
  for (std::int64_t i = 0; i + 1 < m; ++i) right[i] = left[i + 1];
  right[m - 1] = b;
  return {std::move(left), std::move(right)};
}

struct CellResult {
  double estimate = 0.0;
  std::int64_t m = 0, n = 0, consumed = 0;
};

template <typename F>
auto nonadaptive_cell(F& f, const InterpolationScheme& scheme, double a, double b,
                      std::int64_t N, RngStream& rng) -> CellResult {
  const BudgetSplit split = split_budget(scheme, N);
  auto [left, right] = uniform_cells(a, b, split.m);
  const NodeTable table = tabulate_nodes(f, scheme, std::move(left), std::move(right));
  CellResult out;
  out.m = split.m;
  out.n = split.n;
  out.consumed = split.consumed(scheme.r());
  out.estimate = deterministic_part(scheme, table);
  if (split.n == 0) return out;

  const double h = (b - a) / static_cast<double>(split.m);
  NeumaierSum<double> mc;
  for (std::int64_t j = 0; j < split.n; ++j) {
    const double t = rng.uniform(a, b);
    auto cell = static_cast<std::int64_t>((t - a) / h);
    cell = std::clamp<std::int64_t>(cell, 0, split.m - 1);
    const double x = std::clamp(t, table.left[cell], table.right[cell]);
    mc += f(x) - interpolate(scheme, table.left[cell], table.right[cell],
                             table.node_values(cell), x);
  }
  out.estimate += (b - a) * mc.value() / static_cast<double>(split.n);
  return out;
}

struct ImportanceResult {
  double estimate = 0.0;
  std::int64_t groups = 1;
  bool ungrouped_fallback = false;
};

// Density 1 / (m h_i) realized per group of s consecutive intervals: draw
// u in [0, s), interval floor(u), position frac(u) within it.
template <typename F>
auto importance_on_partition(F& f, const InterpolationScheme& scheme,
                             const Partition& partition, std::int64_t n,
                             const GroupRule& group_rule, RngStream& rng)
    -> ImportanceResult {
  const auto m = static_cast<std::int64_t>(partition.size());
  std::vector<double> left(m), right(m);
  for (std::int64_t i = 0; i < m; ++i) {
    left[i] = partition.records()[i].left;
    right[i] = partition.records()[i].right;
  }
  const NodeTable table = tabulate_nodes(f, scheme, std::move(left), std::move(right));

  ImportanceResult out;
  out.estimate = deterministic_part(scheme, table);
  if (n == 0) return out;

  std::int64_t k = group_rule ? group_rule(m, n) : 1;
  require(k >= 1 && m % k == 0, "group rule must return a divisor of m");
  if (k > n) {
    k = 1;
    out.ungrouped_fallback = true;
  }
  out.groups = k;
  const std::int64_t s = m / k;
  NeumaierSum<double> total;
  for (std::int64_t g = 0; g < k; ++g) {
    const std::int64_t n_g = n / k + (g < n % k ? 1 : 0);
    NeumaierSum<double> group_sum;
    for (std::int64_t j = 0; j < n_g; ++j) {
      const double u = rng.uniform() * static_cast<double>(s);
      double whole = 0.0;
      double frac = std::modf(u, &whole);
      auto idx = static_cast<std::int64_t>(whole);
      if (idx >= s) {
        idx = s - 1;
        frac = 1.0;
      }
      const std::int64_t i = g * s + idx;
      const double l = table.left[i];
      const double h = table.right[i] - l;
      const double x = std::min(l + frac * h, table.right[i]);
      const double residual =
          f(x) - interpolate(scheme, l, table.right[i], table.node_values(i), x);
      group_sum += static_cast<double>(s) * h * residual;
    }
    total += group_sum.value() / static_cast<double>(n_g);
  }
  out.estimate += total.value();
  return out;
}

}  // namespace detail

template <Integrand F>
auto crude_mc(F&& f, double a, double b, std::int64_t N, RngStream& rng)
    -> EstimateReport {
  detail::require(a < b, "integration interval needs a < b");
  detail::require(N >= 1, "crude Monte Carlo needs N >= 1");
  auto counted = counting(f);
  NeumaierSum<double> acc;
  for (std::int64_t i = 0; i < N; ++i) acc += counted(rng.uniform(a, b));
  EstimateReport rep;
  rep.algorithm = Algorithm::crude;
  rep.estimate = (b - a) * acc.value() / static_cast<double>(N);
  rep.N_requested = N;
  rep.N_consumed = N;
  rep.n = N;
  rep.seed = rng.seed();
  rep.stream = rng.stream_id();
  rep.evaluation_count = counted.count();
  return rep;
}

template <Integrand F>
auto nonadaptive_vr(F&& f, const InterpolationScheme& scheme, double a, double b,
                    std::int64_t N, RngStream& rng) -> EstimateReport {
  detail::require(a < b, "integration interval needs a < b");
  auto counted = counting(f);
  const auto cell = detail::nonadaptive_cell(counted, scheme, a, b, N, rng);
  EstimateReport rep;
  rep.algorithm = Algorithm::nonadaptive;
  rep.estimate = cell.estimate;
  rep.N_requested = N;
  rep.N_consumed = cell.consumed;
  rep.m = cell.m;
  rep.n = cell.n;
  rep.seed = rng.seed();
  rep.stream = rng.stream_id();
  rep.evaluation_count = counted.count();
  rep.deterministic_only = cell.n == 0;
  return rep;
}

struct StrataOptions {
  double kappa = 0.8;  //!< k = max(1, floor(N^kappa)) strata
  double delta = 0.0;  //!< regularization of the stratum constants
};

/*!
  Stratified adaptive estimator.

  Stratum i of width H gets C_i = H sqrt(alpha^2 - beta^2) |d_i| r! when
  |d_i| r! >= delta and H alpha delta r! otherwise, the budget
  N_i = floor(N_i* (1 - k r / N) + r) with N_i* proportional to
  C_i^{1/(r+1)}, and an independent nonadaptive_vr run. Budget lost to
  flooring is reported through N_consumed, not redistributed.
*/
template <Integrand F>
auto adaptive_stratified(F&& f, const InterpolationScheme& scheme, double a, double b,
                         std::int64_t N, StrataOptions options, RngStream& rng)
    -> EstimateReport {
  detail::require(a < b, "integration interval needs a < b");
  detail::require(options.kappa > 0.0 && options.kappa < 1.0, "kappa must be in (0,1)");
  detail::require(options.delta >= 0.0, "delta must be >= 0");
  const int r = scheme.r();
  const auto k = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(N), options.kappa))));
  detail::require(N >= (2 * r + 1) * k, "adaptive_stratified needs N >= (2r+1) k");

  auto counted = counting(f);
  auto [left, right] = detail::uniform_cells(a, b, k);
  const double H = (b - a) / static_cast<double>(k);
  const double rf = scheme.r_factorial();
  std::vector<std::vector<double>> probes(k);
  double value_scale = 0.0;
  for (std::int64_t i = 0; i < k; ++i) {
    const auto pts = probe_points(r, left[i], right[i]);
    probes[i].resize(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
      probes[i][j] = counted(pts[j]);
      value_scale = std::max(value_scale, std::abs(probes[i][j]));
    }
  }
  std::vector<double> weight(k);
  NeumaierSum<double> weight_sum;
  for (std::int64_t i = 0; i < k; ++i) {
    const auto pts = probe_points(r, left[i], right[i]);
    const double d =
        snap_divided_difference(divided_difference(pts, probes[i]), pts, value_scale);
    const double c = std::abs(d) * rf >= options.delta
                         ? H * scheme.adaptive_factor() * std::abs(d) * rf
                         : H * scheme.alpha() * options.delta * rf;
    weight[i] = std::pow(c, 1.0 / (r + 1));
    weight_sum += weight[i];
  }

  EstimateReport rep;
  rep.algorithm = Algorithm::strata;
  rep.N_requested = N;
  rep.seed = rng.seed();
  rep.stream = rng.stream_id();
  rep.groups = k;
  const double total_weight = weight_sum.value();
  rep.uniform_fallback = !(total_weight > 0.0);
  const double shrink = 1.0 - static_cast<double>(k) * r / static_cast<double>(N);

  NeumaierSum<double> estimate;
  for (std::int64_t i = 0; i < k; ++i) {
    std::int64_t Ni = N / k;
    if (!rep.uniform_fallback) {
      const double share = weight[i] / total_weight * static_cast<double>(N);
      Ni = static_cast<std::int64_t>(std::floor(share * shrink + r));
    }
    const auto cell = detail::nonadaptive_cell(counted, scheme, left[i], right[i], Ni, rng);
    estimate += cell.estimate;
    rep.m += cell.m;
    rep.n += cell.n;
    rep.N_consumed += cell.consumed;
    if (cell.n == 0) rep.deterministic_only = true;
  }
  rep.estimate = estimate.value();
  rep.evaluation_count = counted.count();
  return rep;
}

struct ImportanceOptions {
  double delta = 0.0;
  GroupRule group_rule = default_group_count;
  int depth_limit = 60;
};

/*!
  Importance-sampling adaptive estimator on a nested partition.

  (m, n) come from split_budget; the partition is partition_fixed with m
  intervals. Each sample contributes s h_i (f - L)(x) where s is the number of
  intervals in its group, averaged per group.
*/
template <Integrand F>
auto adaptive_importance(F&& f, const InterpolationScheme& scheme, double a, double b,
                         std::int64_t N, const ImportanceOptions& options,
                         RngStream& rng) -> EstimateReport {
  detail::require(a < b, "integration interval needs a < b");
  const BudgetSplit split = split_budget(scheme, N);
  auto counted = counting(f);
  PriorityPartitioner builder(counted, scheme, a, b,
                              PartitionOptions{options.delta, options.depth_limit});
  builder.split_until(static_cast<std::size_t>(split.m));
  const Partition partition = builder.partition(counted.count());
  const auto res =
      detail::importance_on_partition(counted, scheme, partition, split.n,
                                      options.group_rule, rng);
  EstimateReport rep;
  rep.algorithm = Algorithm::importance;
  rep.estimate = res.estimate;
  rep.N_requested = N;
  rep.N_consumed = split.consumed(scheme.r());
  rep.m = split.m;
  rep.n = split.n;
  rep.seed = rng.seed();
  rep.stream = rng.stream_id();
  rep.evaluation_count = counted.count();
  rep.deterministic_only = split.n == 0;
  rep.ungrouped_fallback = res.ungrouped_fallback;
  rep.groups = res.groups;
  return rep;
}

}  // namespace vrmc
