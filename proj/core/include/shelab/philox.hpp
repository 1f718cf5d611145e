//! \file philox.hpp
//! Philox4x32-10 counter-based generator (Salmon et al., SC'11) and Gaussian draws.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace shelab {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{M0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{M1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

inline PhiloxKey philox_key(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

//! Two independent standard normals from one Philox block (Box-Muller on 53-bit uniforms).
inline std::array<double, 2> philox_normal_pair(const PhiloxCounter& ctr, const PhiloxKey& key) {
  const PhiloxCounter r = philox4x32(ctr, key);
  const std::uint64_t a = (std::uint64_t{r[0]} << 32) | r[1];
  const std::uint64_t b = (std::uint64_t{r[2]} << 32) | r[3];
  constexpr double k53 = 1.0 / 9007199254740992.0;
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * k53;  // (0, 1]
  const double u2 = static_cast<double>(b >> 11) * k53;          // [0, 1)
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * M_PI * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

} // namespace shelab
