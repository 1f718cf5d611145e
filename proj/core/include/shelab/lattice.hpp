//! \file lattice.hpp
//! Periodic lattice on the torus [-L/2, L/2)^d and the field state carried by the solver.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace shelab {

//! Default cap on n^d; about 128 MiB per real field.
inline constexpr std::size_t kDefaultPointBudget = std::size_t{1} << 24;

//! Row-major lattice with spacing h = L/n. Index j in a coordinate maps to x = (j - n/2) h,
//! so the origin sits at index n/2. Frequencies follow the FFT ordering: index k maps to
//! xi = 2 pi k'/L with k' = k for k <= n/2 and k' = k - n otherwise.
struct LatticeGrid {
  int d = 1;
  int n = 256;
  double L = 32.0;

  double h() const { return L / n; }
  std::size_t size() const;
  double coord(int j) const { return (j - n / 2) * h(); }
  double freq(int k) const;
  //! Cell volume h^d.
  double cell_volume() const;
  //! Throws ParameterError ("grid.d", "grid.n", "grid.L") on invalid values.
  void validate(std::size_t point_budget = kDefaultPointBudget) const;

  //! Multi-index (up to d = 3, unused entries 0) of a flat index.
  std::array<int, 3> unflatten(std::size_t idx) const;
  std::size_t flatten(const std::array<int, 3>& j) const;
  //! Squared distance of lattice point idx from the origin.
  double radius2(std::size_t idx) const;
  bool operator==(const LatticeGrid&) const = default;
};

//! Identifies the noise stream a field was built from: (seed, replica) fixes the
//! stream and next_step is the first unused time-step counter.
struct RngLineage {
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::uint64_t next_step = 0;
  bool operator==(const RngLineage&) const = default;
};

struct FieldState {
  LatticeGrid grid;
  std::vector<double> values;
  double time = 0.0;
  RngLineage lineage;

  //! Sum of values times h^d.
  double mass() const;
  bool all_finite() const;
};

//! Binary field dump: 32-byte little-endian header (magic "SHEF" + version u32, d u32,
//! n u32, L f64, time f64) followed by n^d row-major f64 values.
void write_field(const std::string& path, const FieldState& f);
FieldState read_field(const std::string& path);

} // namespace shelab
