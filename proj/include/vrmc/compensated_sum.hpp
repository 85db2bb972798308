/*!
  \file
  \brief Neumaier compensated summation.
*/

#pragma once

#include <cmath>

namespace vrmc {

/*!
  Running sum with Neumaier's improvement of Kahan summation.

  The compensation term tracks low-order bits lost by each addition, including
  the case where the incoming term is larger in magnitude than the running sum.
*/
template <typename Value>
class NeumaierSum {
 public:
  constexpr NeumaierSum() = default;
  constexpr explicit NeumaierSum(Value initial) : sum_(initial) {}

  constexpr auto operator+=(Value value) -> NeumaierSum& {
    const Value t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  constexpr auto value() const -> Value { return sum_ + compensation_; }

 private:
  Value sum_{0};
  Value compensation_{0};
};

}  // namespace vrmc
