/*!
  \file
  \brief Split of an evaluation budget N into m interpolation cells and n
  random samples.

  The split minimizes n^{-1/2} m^{-r} subject to the cost constraint:
  (r - 1) m + 1 + n <= N when cells share endpoints (z_1 = 0, z_r = 1),
  otherwise r m + n <= N.
*/

#pragma once

#include <vrmc/error.hpp>
#include <vrmc/scheme.hpp>

#include <algorithm>
#include <cstdint>

namespace vrmc {

struct BudgetSplit {
  std::int64_t m = 1;
  std::int64_t n = 0;
  std::int64_t N = 0;
  bool endpoint_sharing = false;

  //! Evaluations the split actually uses.
  auto consumed(int r) const noexcept -> std::int64_t {
    return endpoint_sharing ? (r - 1) * m + 1 + n : r * m + n;
  }
  auto leftover(int r) const noexcept -> std::int64_t { return N - consumed(r); }
};

//! Smallest N that pays for one interpolation cell.
inline auto minimum_budget(const InterpolationScheme& scheme) -> std::int64_t {
  return scheme.r();
}

//! Smallest N whose split leaves at least one random sample.
inline auto minimum_sampling_budget(const InterpolationScheme& scheme) -> std::int64_t {
  return scheme.endpoint_sharing() ? 2 * scheme.r() + 2 : 2 * scheme.r() + 1;
}

inline auto split_budget(const InterpolationScheme& scheme, std::int64_t N)
    -> BudgetSplit {
  const std::int64_t r = scheme.r();
  detail::require(N >= minimum_budget(scheme),
                  "budget N too small for one interpolation cell");
  BudgetSplit out;
  out.N = N;
  out.endpoint_sharing = scheme.endpoint_sharing();
  if (out.endpoint_sharing) {
    // m* = 2r(N-1) / ((r-1)(2r+1)),  n* = (N-1) / (2r+1)
    out.m = (2 * r * (N - 1)) / ((r - 1) * (2 * r + 1));
    out.n = (N - 1) / (2 * r + 1);
  } else {
    // m* = 2N / (2r+1),  n* = N / (2r+1)
    out.m = (2 * N) / (2 * r + 1);
    out.n = N / (2 * r + 1);
  }
  out.m = std::max<std::int64_t>(out.m, 1);
  return out;
}

}  // namespace vrmc
