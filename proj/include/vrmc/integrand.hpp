/*!
  \file
  \brief Counting, finiteness-checking wrapper around user integrands.
*/

#pragma once

#include <vrmc/error.hpp>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <sstream>

namespace vrmc {

template <typename F>
concept Integrand = requires(F f, double x) {
  { f(x) } -> std::convertible_to<double>;
};

//! Forwards calls to f, counts them, and rejects non-finite values.
template <Integrand F>
class CountingIntegrand {
 public:
  explicit CountingIntegrand(F& f) : f_(&f) {}

  auto operator()(double x) -> double {
    ++count_;
    const double value = static_cast<double>((*f_)(x));
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "integrand returned " << value << " at x = " << x;
      throw Error(ErrorKind::non_finite_value, msg.str());
    }
    return value;
  }

  auto count() const noexcept -> std::int64_t { return count_; }

 private:
  F* f_;
  std::int64_t count_ = 0;
};

//! Wraps f without class template argument deduction, which would copy an
//! existing CountingIntegrand instead of nesting it.
template <Integrand F>
auto counting(F& f) -> CountingIntegrand<F> {
  return CountingIntegrand<F>(f);
}

}  // namespace vrmc
