/*!
  \file
  \brief Counter-based random streams (Philox4x64-10).

  Output sequence version 1: block i of stream (seed, id) is
  philox4x64_10(counter = {i + 1, 0, 0, 0}, key = {seed, id}), consumed in
  word order. The first block uses counter 1 so the sequence coincides with
  numpy.random.Philox(key=[seed, id], counter=0).random_raw().
*/

#pragma once

#include <array>
#include <cstdint>

namespace vrmc {

inline constexpr int kRngSequenceVersion = 1;

namespace detail {

using Philox4x64Block = std::array<std::uint64_t, 4>;
using Philox4x64Key = std::array<std::uint64_t, 2>;

// Full 64 x 64 -> 128 bit product as {hi, lo}.
constexpr auto mul_wide(std::uint64_t a, std::uint64_t b) noexcept
    -> std::array<std::uint64_t, 2> {
  const std::uint64_t a_lo = a & 0xFFFFFFFFULL, a_hi = a >> 32;
  const std::uint64_t b_lo = b & 0xFFFFFFFFULL, b_hi = b >> 32;
  const std::uint64_t ll = a_lo * b_lo, lh = a_lo * b_hi;
  const std::uint64_t hl = a_hi * b_lo, hh = a_hi * b_hi;
  const std::uint64_t mid = (ll >> 32) + (lh & 0xFFFFFFFFULL) + (hl & 0xFFFFFFFFULL);
  return {hh + (lh >> 32) + (hl >> 32) + (mid >> 32), (mid << 32) | (ll & 0xFFFFFFFFULL)};
}

constexpr auto philox4x64_10(Philox4x64Block ctr, Philox4x64Key key) noexcept
    -> Philox4x64Block {
  constexpr std::uint64_t m0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t m1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t w0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t w1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += w0;
      key[1] += w1;
    }
    const auto [hi0, lo0] = mul_wide(m0, ctr[0]);
    const auto [hi1, lo1] = mul_wide(m1, ctr[2]);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

}  // namespace detail

/*!
  Reproducible random stream identified by (seed, stream id).

  Distinct ids give independent Philox keys, so replications never share a
  sequence. Identical (seed, id) pairs reproduce bit-identical output on every
  platform.
*/
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
      : seed_(seed), stream_(stream_id) {}

  auto seed() const noexcept -> std::uint64_t { return seed_; }
  auto stream_id() const noexcept -> std::uint64_t { return stream_; }

  auto next_u64() noexcept -> std::uint64_t {
    if (position_ == 4) {
      ++block_index_;
      buffer_ = detail::philox4x64_10({block_index_, 0, 0, 0}, {seed_, stream_});
      position_ = 0;
    }
    return buffer_[position_++];
  }

  //! Uniform double in [0, 1) with 53 random bits.
  auto uniform() noexcept -> double {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  //! Uniform double in [lo, hi).
  auto uniform(double lo, double hi) noexcept -> double {
    return lo + (hi - lo) * uniform();
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  detail::Philox4x64Block buffer_{};
  int position_ = 4;
};

}  // namespace vrmc
