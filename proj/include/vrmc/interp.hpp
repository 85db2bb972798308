/*!
  \file
  \brief Local Lagrange interpolation, residuals and divided differences.

  Interpolation on [l, u] uses the scheme nodes mapped affinely,
  x_s = l + z_s (u - l). The interpolant is evaluated in barycentric form with
  the scheme's reference weights, so no per-interval coefficients are built.
*/

#pragma once

#include <vrmc/compensated_sum.hpp>
#include <vrmc/error.hpp>
#include <vrmc/integrand.hpp>
#include <vrmc/scheme.hpp>

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace vrmc {

//! Newton divided difference f[x_0, ..., x_k] from tabulated values.
inline auto divided_difference(std::span<const double> points,
                               std::span<const double> values) -> double {
  detail::require(!points.empty() && points.size() == values.size(),
                  "divided difference needs matching, nonempty points and values");
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      detail::require(points[i] != points[j],
                      "divided difference points must be distinct");
    }
  }
  std::vector<double> table(values.begin(), values.end());
  const std::size_t n = points.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = n - 1; i >= level; --i) {
      table[i] = (table[i] - table[i - 1]) / (points[i] - points[i - level]);
    }
  }
  return table.back();
}

/*!
  Rounding level of f[x_0, ..., x_k] when the tabulated values carry absolute
  errors of order eps * value_scale: 4 (k+1) eps value_scale sum_j 1 / prod_{i!=j} |x_j - x_i|.
*/
inline auto divided_difference_noise(std::span<const double> points, double value_scale)
    -> double {
  double weight_sum = 0.0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    double w = 1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i != j) w *= std::abs(points[j] - points[i]);
    }
    weight_sum += 1.0 / w;
  }
  return 4.0 * static_cast<double>(points.size()) * std::numeric_limits<double>::epsilon() *
         value_scale * weight_sum;
}

//! d, or exactly 0 when |d| is within the rounding level.
inline auto snap_divided_difference(double d, std::span<const double> points,
                                    double value_scale) -> double {
  return std::abs(d) <= divided_difference_noise(points, value_scale) ? 0.0 : d;
}

template <Integrand F>
auto divided_difference(F&& f, std::span<const double> points) -> double {
  std::vector<double> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) values[i] = f(points[i]);
  return divided_difference(points, values);
}

//! The r + 1 equispaced probe points l + j (u - l) / r, j = 0..r.
inline auto probe_points(int r, double l, double u) -> std::vector<double> {
  std::vector<double> pts(r + 1);
  const double h = u - l;
  for (int j = 0; j <= r; ++j) pts[j] = l + j * h / r;
  pts[0] = l;
  pts[r] = u;
  return pts;
}

inline auto mapped_nodes(const InterpolationScheme& scheme, double l, double u)
    -> std::vector<double> {
  const auto z = scheme.nodes();
  std::vector<double> x(z.size());
  for (std::size_t s = 0; s < z.size(); ++s) {
    x[s] = z[s] == 1.0 ? u : l + z[s] * (u - l);
  }
  return x;
}

/*!
  Value at x of the Lagrange interpolant on [l, u] through node_values.

  A point that coincides with a mapped node returns that node's value.
*/
inline auto interpolate(const InterpolationScheme& scheme, double l, double u,
                        std::span<const double> node_values, double x) -> double {
  const auto z = scheme.nodes();
  const auto w = scheme.basis_weights();
  const double t = (x - l) / (u - l);
  double num = 0.0, den = 0.0;
  for (std::size_t s = 0; s < z.size(); ++s) {
    const double diff = t - z[s];
    if (diff == 0.0) return node_values[s];
    const double c = w[s] / diff;
    num += c * node_values[s];
    den += c;
  }
  return num / den;
}

/*!
  f(x) - L(x) for the interpolant L of f on [l, u].

  Evaluates f at the r mapped nodes and at x.
*/
template <Integrand F>
auto residual_eval(const InterpolationScheme& scheme, double l, double u, F&& f,
                   double x) -> double {
  detail::require(l < u, "residual interval must be nondegenerate");
  detail::require(x >= l && x <= u, "residual point outside interval");
  const auto nodes = mapped_nodes(scheme, l, u);
  std::vector<double> values(nodes.size());
  for (std::size_t s = 0; s < nodes.size(); ++s) values[s] = f(nodes[s]);
  return f(x) - interpolate(scheme, l, u, values, x);
}

//! Exact integral over [l, u] of the interpolant: h * sum_s w_s f_s.
inline auto interpolant_integral(const InterpolationScheme& scheme, double l,
                                 double u, std::span<const double> node_values)
    -> double {
  detail::require(static_cast<int>(node_values.size()) == scheme.r(),
                  "interpolant integral needs r node values");
  const auto w = scheme.quad_weights();
  NeumaierSum<double> acc;
  for (std::size_t s = 0; s < w.size(); ++s) acc += w[s] * node_values[s];
  return (u - l) * acc.value();
}

}  // namespace vrmc
