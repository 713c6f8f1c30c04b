#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace goalfem {

/// Uniform doubles in [0,1) built from raw mt19937_64 output. Bypassing
/// std::uniform_real_distribution keeps the stream identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 gen_;
};

/// Initial network parameters: i.i.d. uniform on [-0.5, 0.5].
inline Eigen::VectorXd random_initial_theta(int count, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd theta(count);
  for (int i = 0; i < count; ++i) theta[i] = rng.uniform(-0.5, 0.5);
  return theta;
}

}  // namespace goalfem
