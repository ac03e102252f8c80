#pragma once

// Shared fixtures and deterministic generators for the test suites. The
// reference instance is the bundled four-subsystem benchmark
// (data/four_unstable_2d.json) rebuilt programmatically so unit tests do not
// depend on file I/O.

#include <cstdint>
#include <random>
#include <vector>

#include "switchcert/switchcert.hpp"

namespace testutil {

inline switchcert::Instance reference_instance() {
  using switchcert::Matrix;
  switchcert::Instance inst;
  inst.family.dimension = 2;
  inst.family.matrices = {
      Matrix(2, 2, {0.796323, -0.9122466, -0.7126696, 0.1040671}),
      Matrix(2, 2, {0.9660338, -0.972049, -0.6582197, -0.94077}),
      Matrix(2, 2, {-0.5085495, -0.6519882, -0.7370684, -0.5013346}),
      Matrix(2, 2, {-0.990773, 0.8742857, 0.780567, 0.9401844}),
  };
  inst.dwell = {2, 3};
  inst.graph.vertex_count = 4;
  inst.graph.edges = {{1, 2}, {2, 1}, {2, 3}, {3, 2}, {3, 4}, {4, 1}};
  return inst;
}

// Frozen values for the reference instance, computed with an independent
// numerical stack and pinned here for regression checks.
namespace ref {
inline constexpr double norm_a1 = 1.3442371648;
inline constexpr double srad_a1 = 1.3276544378;
inline constexpr double bound_m = 1.4117823463;
inline constexpr double rho = 0.4200882315;
inline constexpr double eig_hi = 0.3527251791;
inline constexpr double eig_lo = 0.0464333388;
inline constexpr double eps_ji1_i = 0.0252072299;  // [A1^2, A2^2]
inline constexpr double eps_ji2_i = 0.0537179740;  // [A1^2, A4^2]
inline constexpr double eps_ji1_j = 0.0415474937;  // [A3^2, A2^2]
inline constexpr double eps_ji2_j = 0.0769059118;  // [A3^2, A4^2]
inline constexpr double lhs_at_1e4 = 0.8507121438;
inline constexpr double lambda_max = 0.0341329880;
}  // namespace ref

// Commuting family conjugated from diagonals by one rotation; every member
// unstable, A1^p A2^q Schur for p = q = 1.
inline switchcert::Instance commuting_instance(double theta = 0.7) {
  using switchcert::Matrix;
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  auto conj = [&](double d0, double d1) {
    Eigen::Matrix2d d = Eigen::Vector2d(d0, d1).asDiagonal();
    return Matrix(Eigen::MatrixXd(r * d * r.transpose()));
  };
  switchcert::Instance inst;
  inst.family.dimension = 2;
  inst.family.matrices = {conj(1.2, 0.4), conj(0.5, 1.3), conj(1.05, 1.25)};
  inst.dwell = {1, 2};
  inst.graph.vertex_count = 3;
  inst.graph.edges = {{1, 3}, {3, 1}, {2, 3}, {3, 2}};
  return inst;
}

// Deterministic uniform doubles, identical across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  long integer(long lo, long hi) {  // inclusive bounds
    return lo + static_cast<long>(gen_() % static_cast<uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 gen_;
};

inline switchcert::Matrix random_matrix(Rng& rng, int d, double lo = -1.0,
                                        double hi = 1.0) {
  std::vector<double> entries;
  entries.reserve(static_cast<size_t>(d) * d);
  for (int k = 0; k < d * d; ++k) entries.push_back(rng.uniform(lo, hi));
  return switchcert::Matrix(d, d, entries);
}

// Random matrix scaled (if needed) so its spectral radius exceeds one.
inline switchcert::Matrix random_unstable(Rng& rng, int d) {
  for (;;) {
    switchcert::Matrix a = random_matrix(rng, d);
    double r = switchcert::spectral_radius(a);
    if (r < 1e-6) continue;
    if (r >= 1.0 + switchcert::kSchurTol) return a;
    return switchcert::Matrix(Eigen::MatrixXd(a.eigen() * (1.02 / r)));
  }
}

// Reference multiplication the long way round, for oracle checks.
inline switchcert::Matrix naive_product(
    const std::vector<switchcert::Matrix>& left_to_right) {
  switchcert::Matrix acc = left_to_right.front();
  for (size_t k = 1; k < left_to_right.size(); ++k) {
    acc = acc * left_to_right[k];
  }
  return acc;
}

inline double max_abs_diff(const switchcert::Matrix& a,
                           const switchcert::Matrix& b) {
  double worst = 0.0;
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) {
      worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
    }
  }
  return worst;
}

}  // namespace testutil
