#include "shelab/lattice.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "shelab/errors.hpp"

namespace shelab {

std::size_t LatticeGrid::size() const {
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

double LatticeGrid::freq(int k) const {
  const int kk = k <= n / 2 ? k : k - n;
  return 2.0 * M_PI * kk / L;
}

double LatticeGrid::cell_volume() const { return std::pow(h(), d); }

void LatticeGrid::validate(std::size_t point_budget) const {
  if (d < 1 || d > 3) throw ParameterError("grid.d", "must be 1, 2 or 3");
  if (n < 2 || (n & (n - 1)) != 0) throw ParameterError("grid.n", "must be a power of two >= 2");
  if (!(L > 0.0) || !std::isfinite(L)) throw ParameterError("grid.L", "must be finite and > 0");
  if (size() > point_budget) {
    throw ParameterError("grid.n", "n^d = " + std::to_string(size()) + " exceeds the point budget " +
                                       std::to_string(point_budget));
  }
}

std::array<int, 3> LatticeGrid::unflatten(std::size_t idx) const {
  std::array<int, 3> j{0, 0, 0};
  for (int a = d - 1; a >= 0; --a) {
    j[a] = static_cast<int>(idx % n);
    idx /= n;
  }
  return j;
}

std::size_t LatticeGrid::flatten(const std::array<int, 3>& j) const {
  std::size_t idx = 0;
  for (int a = 0; a < d; ++a) idx = idx * n + static_cast<std::size_t>(j[a]);
  return idx;
}

double LatticeGrid::radius2(std::size_t idx) const {
  const auto j = unflatten(idx);
  double r2 = 0.0;
  for (int a = 0; a < d; ++a) {
    const double x = coord(j[a]);
    r2 += x * x;
  }
  return r2;
}

double FieldState::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_volume();
}

bool FieldState::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

namespace {
static_assert(std::endian::native == std::endian::little, "binary field format assumes little-endian");
constexpr char kMagic[4] = {'S', 'H', 'E', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
} // namespace

void write_field(const std::string& path, const FieldState& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.d));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.n));
  put<double>(os, f.grid.L);
  put<double>(os, f.time);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write failed for " + path);
}

FieldState read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error(path + ": not a field file");
  if (get<std::uint32_t>(is) != kVersion) throw std::runtime_error(path + ": unsupported version");
  FieldState f;
  f.grid.d = static_cast<int>(get<std::uint32_t>(is));
  f.grid.n = static_cast<int>(get<std::uint32_t>(is));
  f.grid.L = get<double>(is);
  f.time = get<double>(is);
  f.grid.validate(std::size_t{1} << 30);
  f.values.resize(f.grid.size());
  is.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!is) throw std::runtime_error(path + ": truncated field data");
  return f;
}

} // namespace shelab
