#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "switchcert/matrix.hpp"
#include "switchcert/signal.hpp"
#include "switchcert/system.hpp"

namespace switchcert {

inline constexpr uint64_t kDefaultSeed = 12345;

/// Norms this small end a prefix-norm run early; the decay question is
/// settled well before the floating-point floor.
inline constexpr double kUnderflowGuard = 1e-300;

struct Trajectory {
  std::vector<Eigen::VectorXd> states;  // x(0..T)
  std::vector<double> norms;            // ||x(t)||, t = 0..T
};

/// Iterates x(t+1) = A_{sigma(t)} x(t) over the signal's full horizon.
inline Trajectory simulate(const SubsystemFamily& family,
                           const SwitchingSignal& signal,
                           const Eigen::VectorXd& x0) {
  if (x0.size() != family.dimension) {
    throw std::invalid_argument("simulate: initial state has dimension " +
                                std::to_string(x0.size()) + ", family needs " +
                                std::to_string(family.dimension));
  }
  Trajectory traj;
  traj.states.reserve(static_cast<size_t>(signal.horizon) + 1);
  traj.states.push_back(x0);
  traj.norms.push_back(x0.norm());
  Eigen::VectorXd x = x0;
  for (const auto& b : signal.blocks) {
    const Eigen::MatrixXd& a = family.matrix(b.subsystem).eigen();
    for (int s = 0; s < b.dwell; ++s) {
      x = a * x;
      traj.states.push_back(x);
      traj.norms.push_back(x.norm());
    }
  }
  return traj;
}

/// Spectral norms of the realized products A_{sigma(t-1)}...A_{sigma(0)} for
/// t = 1..T. Stops early if the norm falls below the underflow guard.
inline std::vector<std::pair<long, double>> prefix_norms(
    const SubsystemFamily& family, const SwitchingSignal& signal, long T) {
  if (T < 1 || T > signal.horizon) {
    throw std::invalid_argument("prefix_norms: T must lie in [1, horizon]");
  }
  std::vector<std::pair<long, double>> out;
  out.reserve(static_cast<size_t>(T));
  Matrix w = Matrix::identity(family.dimension);
  long t = 0;
  for (const auto& b : signal.blocks) {
    for (int s = 0; s < b.dwell; ++s) {
      if (t >= T) return out;
      w = family.matrix(b.subsystem) * w;
      ++t;
      double norm = spectral_norm(w);
      out.emplace_back(t, norm);
      if (norm < kUnderflowGuard) return out;
    }
  }
  return out;
}

struct DecayEstimate {
  double c_hat = 0.0;       // smallest envelope constant over the horizon
  double lambda_hat = 0.0;  // least-squares decay rate of the prefix norms
  bool satisfied = false;
};

namespace detail {

// Deterministic uniform in [-1, 1), identical across standard libraries.
inline double uniform_pm1(std::mt19937_64& rng) {
  return -1.0 + 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

}  // namespace detail

/// Initial states drawn uniformly from [-1, 1]^d with a fixed seed; the
/// experiment protocol behind the verification trials.
inline std::vector<Eigen::VectorXd> make_initial_states(int dimension,
                                                        int trials,
                                                        uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<size_t>(trials));
  for (int k = 0; k < trials; ++k) {
    Eigen::VectorXd x(dimension);
    for (int r = 0; r < dimension; ++r) x(r) = detail::uniform_pm1(rng);
    out.push_back(x);
  }
  return out;
}

/// Fits the smallest c with ||W(t)|| <= c e^{-lambda t} over t <= T and
/// checks the envelope is genuinely respected: the weighted norms
/// ||W(t)|| e^{lambda t} must peak in the first half of the horizon (a rate
/// the products do not sustain pushes the peak to the tail), and every trial
/// trajectory must sit under c e^{-lambda t} ||x0||.
inline DecayEstimate verify_ges(const SubsystemFamily& family,
                                const SwitchingSignal& signal, double lambda,
                                long T, int trials,
                                uint64_t seed = kDefaultSeed) {
  if (lambda <= 0.0) {
    throw std::invalid_argument("verify_ges: lambda must be positive");
  }
  if (signal.generator.kind == SignalKind::nonperiodic) {
    long d1 = sequence_duration(signal.generator.seq1);
    long d2 = sequence_duration(signal.generator.seq2);
    if (T < 2 * d1 + 3 * d2) {
      throw std::invalid_argument(
          "verify_ges: horizon must cover the first two super-blocks (" +
          std::to_string(2 * d1 + 3 * d2) + " steps)");
    }
  } else if (signal.generator.kind == SignalKind::periodic) {
    long d1 = sequence_duration(signal.generator.seq1);
    if (T < 2 * d1) {
      throw std::invalid_argument(
          "verify_ges: horizon must cover two periods (" +
          std::to_string(2 * d1) + " steps)");
    }
  }

  auto norms = prefix_norms(family, signal, T);
  const long covered = norms.empty() ? 0 : norms.back().first;
  DecayEstimate est;

  // Envelope constant and the location of the weighted peak.
  double peak = 0.0;
  long peak_t = 0;
  for (const auto& [t, norm] : norms) {
    double g = norm * std::exp(lambda * static_cast<double>(t));
    if (g > peak) {
      peak = g;
      peak_t = t;
    }
  }
  est.c_hat = peak;
  bool envelope_ok = peak_t <= covered / 2;
  if (covered < T) envelope_ok = true;  // underflow stop: decay is settled

  // Least-squares rate of log||W(t)|| against t.
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long count = 0;
    for (const auto& [t, norm] : norms) {
      if (norm <= 0.0) continue;
      double x = static_cast<double>(t), y = std::log(norm);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
    if (count >= 2) {
      double denom = count * sxx - sx * sx;
      est.lambda_hat = denom != 0.0 ? -(count * sxy - sx * sy) / denom : 0.0;
    }
  }

  // Trial trajectories must sit under the same envelope; that is implied by
  // ||x(t)|| <= ||W(t)|| ||x0||, so failures indicate a real inconsistency.
  bool trials_ok = true;
  auto starts = make_initial_states(family.dimension, trials, seed);
  for (const auto& x0 : starts) {
    Eigen::VectorXd x = x0;
    double base = x0.norm();
    long t = 0;
    for (const auto& b : signal.blocks) {
      if (t >= covered || !trials_ok) break;
      const Eigen::MatrixXd& a = family.matrix(b.subsystem).eigen();
      for (int s = 0; s < b.dwell && t < covered; ++s) {
        x = a * x;
        ++t;
        double cap = est.c_hat * std::exp(-lambda * static_cast<double>(t)) * base;
        if (x.norm() > cap * (1.0 + 1e-9) + 1e-12) {
          trials_ok = false;
          break;
        }
      }
    }
    if (!trials_ok) break;
  }

  est.satisfied = envelope_ok && trials_ok;
  return est;
}

}  // namespace switchcert
