/*!
  \file
  \brief Nested dyadic partitions driven by divided-difference priorities.

  Every interval I of width h carries the priority

    p(I) = h^{r+1} max(|d|, delta / r!),

  where d is the r-th divided difference of f over the r + 1 equispaced
  points of I (both endpoints included). Two builders are provided:
  PriorityPartitioner halves a maximal-priority interval until a target count
  is reached, and partition_auto halves recursively until every leaf priority
  is at most a threshold. Both only ever bisect, so all breakpoints are dyadic
  points of [a, b] and partitions are nested.
*/

#pragma once

#include <vrmc/compensated_sum.hpp>
#include <vrmc/error.hpp>
#include <vrmc/integrand.hpp>
#include <vrmc/interp.hpp>
#include <vrmc/scheme.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace vrmc {

struct IntervalRecord {
  double left = 0.0;
  double right = 0.0;
  double divided_diff = 0.0;
  double priority = 0.0;
  int depth = 0;
  std::uint64_t sequence = 0;
  //! Largest |f| seen on this interval and its ancestors; sets the rounding level.
  double value_scale = 0.0;
  //! f at probe_points(r, left, right).
  std::vector<double> probe_values;

  auto width() const noexcept -> double { return right - left; }
};

struct PartitionOptions {
  double delta = 0.0;    //!< priority regularization, >= 0
  int depth_limit = 60;  //!< maximum number of halvings of [a, b]
};

class Partition {
 public:
  Partition() = default;
  Partition(int r, PartitionOptions options, std::vector<IntervalRecord> records,
            std::int64_t evaluation_count)
      : r_(r),
        options_(options),
        records_(std::move(records)),
        evaluation_count_(evaluation_count) {}

  auto r() const noexcept -> int { return r_; }
  auto delta() const noexcept -> double { return options_.delta; }
  auto options() const noexcept -> const PartitionOptions& { return options_; }
  auto records() const noexcept -> const std::vector<IntervalRecord>& {
    return records_;
  }
  auto size() const noexcept -> std::size_t { return records_.size(); }
  auto a() const -> double { return records_.front().left; }
  auto b() const -> double { return records_.back().right; }

  //! Integrand calls spent on probes while building this partition.
  auto evaluation_count() const noexcept -> std::int64_t {
    return evaluation_count_;
  }

  auto max_priority() const -> double {
    double out = 0.0;
    for (const auto& rec : records_) out = std::max(out, rec.priority);
    return out;
  }

  auto breakpoints() const -> std::vector<double> {
    std::vector<double> pts;
    pts.reserve(records_.size() + 1);
    for (const auto& rec : records_) pts.push_back(rec.left);
    if (!records_.empty()) pts.push_back(records_.back().right);
    return pts;
  }

 private:
  int r_ = 0;
  PartitionOptions options_{};
  std::vector<IntervalRecord> records_;
  std::int64_t evaluation_count_ = 0;
};

namespace detail {

inline auto check_partition_options(const PartitionOptions& options) -> void {
  require(std::isfinite(options.delta) && options.delta >= 0.0,
          "regularization delta must be finite and >= 0");
  require(options.depth_limit >= 0, "depth limit must be >= 0");
}

inline auto finish_record(IntervalRecord& rec, int r, double delta) -> void {
  const auto pts = probe_points(r, rec.left, rec.right);
  for (std::size_t j = 1; j < pts.size(); ++j) {
    if (!(pts[j] > pts[j - 1])) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "interval [%.17g, %.17g] is too narrow for distinct probe points",
                    rec.left, rec.right);
      throw Error(ErrorKind::recursion_limit, buf);
    }
  }
  for (double v : rec.probe_values) rec.value_scale = std::max(rec.value_scale, std::abs(v));
  rec.divided_diff = snap_divided_difference(divided_difference(pts, rec.probe_values), pts,
                                             rec.value_scale);
  const double floor_value = delta / factorial(r);
  rec.priority = std::pow(rec.width(), r + 1) *
                 std::max(std::abs(rec.divided_diff), floor_value);
}

template <typename F>
auto make_root_record(F& f, int r, double delta, double l, double u)
    -> IntervalRecord {
  IntervalRecord rec;
  rec.left = l;
  rec.right = u;
  const auto pts = probe_points(r, l, u);
  rec.probe_values.resize(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) rec.probe_values[j] = f(pts[j]);
  finish_record(rec, r, delta);
  return rec;
}

// Halves parent. Child probe grids have step h / (2r); every other point of
// the combined grid is a parent probe, whose cached value is reused.
template <typename F>
auto split_record(F& f, int r, double delta, const IntervalRecord& parent)
    -> std::pair<IntervalRecord, IntervalRecord> {
  const double mid = 0.5 * (parent.left + parent.right);
  std::pair<IntervalRecord, IntervalRecord> out;
  auto& [lo, hi] = out;
  lo.left = parent.left;
  lo.right = mid;
  hi.left = mid;
  hi.right = parent.right;
  // combined grid: global index g = j on lo, r + j on hi; g = r is the midpoint
  std::vector<double> grid(2 * r + 1);
  const auto lo_pts = probe_points(r, lo.left, lo.right);
  const auto hi_pts = probe_points(r, hi.left, hi.right);
  for (int g = 0; g <= 2 * r; ++g) {
    grid[g] = g % 2 == 0 ? parent.probe_values[g / 2]
                         : f(g <= r ? lo_pts[g] : hi_pts[g - r]);
  }
  lo.probe_values.assign(grid.begin(), grid.begin() + r + 1);
  hi.probe_values.assign(grid.begin() + r, grid.end());
  for (IntervalRecord* child : {&lo, &hi}) {
    child->depth = parent.depth + 1;
    child->value_scale = parent.value_scale;
    finish_record(*child, r, delta);
  }
  return out;
}

inline auto depth_error(const IntervalRecord& rec, int limit) -> Error {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "interval [%.17g, %.17g] needs more than %d halvings "
                "(priority %.6g)",
                rec.left, rec.right, limit, rec.priority);
  return Error(ErrorKind::recursion_limit, buf);
}

template <typename F>
auto auto_recurse(F& f, int r, const PartitionOptions& options, double threshold,
                  IntervalRecord rec, std::vector<IntervalRecord>& out) -> void {
  if (rec.priority <= threshold) {
    out.push_back(std::move(rec));
    return;
  }
  if (rec.depth >= options.depth_limit) throw depth_error(rec, options.depth_limit);
  auto [lo, hi] = split_record(f, r, options.delta, rec);
  auto_recurse(f, r, options, threshold, std::move(lo), out);
  auto_recurse(f, r, options, threshold, std::move(hi), out);
}

}  // namespace detail

/*!
  Max-priority bisection with a binary heap.

  Ties between equal priorities go to the interval inserted first; sequence
  numbers, not addresses, decide, so the output is deterministic.
*/
template <Integrand F>
class PriorityPartitioner {
 public:
  PriorityPartitioner(F& f, const InterpolationScheme& scheme, double a, double b,
                      PartitionOptions options = {})
      : f_(f), r_(scheme.r()), options_(options) {
    detail::require(a < b, "partition needs a < b");
    detail::check_partition_options(options);
    push(detail::make_root_record(f_, r_, options_.delta, a, b));
  }

  //! Resumes bisection from an existing partition of the same scheme.
  PriorityPartitioner(F& f, const Partition& start)
      : f_(f), r_(start.r()), options_(start.options()) {
    for (const auto& rec : start.records()) {
      IntervalRecord copy = rec;
      push(std::move(copy));
    }
  }

  auto size() const noexcept -> std::size_t { return heap_.size(); }
  auto max_priority() const -> double { return heap_.front().priority; }

  auto split_max() -> void {
    std::pop_heap(heap_.begin(), heap_.end(), Compare{});
    IntervalRecord top = std::move(heap_.back());
    heap_.pop_back();
    if (top.depth >= options_.depth_limit) {
      throw detail::depth_error(top, options_.depth_limit);
    }
    auto [lo, hi] = detail::split_record(f_, r_, options_.delta, top);
    push(std::move(lo));
    push(std::move(hi));
  }

  auto split_until(std::size_t m) -> void {
    while (size() < m) split_max();
  }

  auto partition(std::int64_t evaluation_count = 0) const -> Partition {
    std::vector<IntervalRecord> records = heap_;
    std::sort(records.begin(), records.end(),
              [](const auto& x, const auto& y) { return x.left < y.left; });
    return Partition(r_, options_, std::move(records), evaluation_count);
  }

 private:
  struct Compare {
    auto operator()(const IntervalRecord& x, const IntervalRecord& y) const
        -> bool {
      if (x.priority != y.priority) return x.priority < y.priority;
      return x.sequence > y.sequence;
    }
  };

  auto push(IntervalRecord rec) -> void {
    rec.sequence = next_sequence_++;
    heap_.push_back(std::move(rec));
    std::push_heap(heap_.begin(), heap_.end(), Compare{});
  }

  F& f_;
  int r_;
  PartitionOptions options_;
  std::vector<IntervalRecord> heap_;
  std::uint64_t next_sequence_ = 0;
};

//! Partition of [a, b] into exactly m intervals by m - 1 max-priority halvings.
template <Integrand F>
auto partition_fixed(F&& f, const InterpolationScheme& scheme, double a, double b,
                     std::int64_t m, PartitionOptions options = {}) -> Partition {
  detail::require(m >= 1, "partition needs m >= 1");
  auto counted = counting(f);
  PriorityPartitioner builder(counted, scheme, a, b, options);
  builder.split_until(static_cast<std::size_t>(m));
  return builder.partition(counted.count());
}

/*!
  Recursive bisection of [a, b] until every leaf priority is <= threshold.

  Throws ErrorKind::recursion_limit if an interval would need more than
  options.depth_limit halvings.
*/
template <Integrand F>
auto partition_auto(F&& f, const InterpolationScheme& scheme, double a, double b,
                    double threshold, PartitionOptions options = {}) -> Partition {
  detail::require(a < b, "partition needs a < b");
  detail::require(threshold > 0.0, "partition threshold must be > 0");
  detail::check_partition_options(options);
  auto counted = counting(f);
  std::vector<IntervalRecord> out;
  detail::auto_recurse(counted, scheme.r(), options, threshold,
                       detail::make_root_record(counted, scheme.r(), options.delta, a, b),
                       out);
  return Partition(scheme.r(), options, std::move(out), counted.count());
}

//! Resumes the recursion on every leaf of coarse with a new threshold.
template <Integrand F>
auto refine_auto(F&& f, const Partition& coarse, double threshold) -> Partition {
  detail::require(threshold > 0.0, "partition threshold must be > 0");
  auto counted = counting(f);
  std::vector<IntervalRecord> out;
  for (const auto& rec : coarse.records()) {
    detail::auto_recurse(counted, coarse.r(), coarse.options(), threshold, rec, out);
  }
  return Partition(coarse.r(), coarse.options(), std::move(out),
                   coarse.evaluation_count() + counted.count());
}

//! (sum_i p_i^{1/(r+1)})^{r+1} over the partition's priorities.
inline auto l_tilde(const Partition& partition) -> double {
  detail::require(partition.size() > 0, "l_tilde needs a nonempty partition");
  const double q = 1.0 / (partition.r() + 1);
  NeumaierSum<double> acc;
  for (const auto& rec : partition.records()) acc += std::pow(rec.priority, q);
  return std::pow(acc.value(), partition.r() + 1);
}

//! One line per interval: left, right, d, priority; tab-separated, %.17g.
inline auto dump_partition(const Partition& partition, std::ostream& out) -> void {
  char buf[128];
  for (const auto& rec : partition.records()) {
    std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%.17g\t%.17g\n", rec.left,
                  rec.right, rec.divided_diff, rec.priority);
    out << buf;
  }
}

}  // namespace vrmc
