#pragma once
/// Counter-based random numbers: every draw is a pure function of
/// (seed, stream, index), so results never depend on call order or threads.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace trbie {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t bits(std::uint64_t index) const { return splitmix64(key_ + splitmix64(index)); }

  /// Uniform in (0, 1), never exactly 0.
  double uniform(std::uint64_t index) const { return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53; }

  /// Complex standard normal (E|z|^2 = 1) by Box-Muller.
  std::complex<double> complex_normal(std::uint64_t index) const {
    const double u1 = uniform(2 * index), u2 = uniform(2 * index + 1);
    const double r = std::sqrt(-std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

 private:
  std::uint64_t key_;
};

/// rows x cols matrix of complex standard normals, column-major index order.
inline Eigen::MatrixXcd random_complex_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                              std::uint64_t stream) {
  const CounterRng rng(seed, stream);
  Eigen::MatrixXcd M(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) M(r, c) = rng.complex_normal(static_cast<std::uint64_t>(c * rows + r));
  return M;
}

}  // namespace trbie
