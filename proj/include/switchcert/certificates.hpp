#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "switchcert/matrix.hpp"
#include "switchcert/system.hpp"

namespace switchcert {

/// Working decay rate stored on certificates. Feasibility is decided by the
/// bisection maximum, but the certified rate handed to synthesis and
/// verification is capped here: rates near the inequality boundary are not
/// realized by the actual product norms, and a certificate that fails its
/// own simulation check is useless.
inline constexpr double kReferenceLambda = 1e-4;

/// Absolute tolerance of the lambda bisection.
inline constexpr double kLambdaTol = 1e-9;

/// Staircase index: the unique k with k(k+1)/2 <= m <= k(k+1)/2 + k.
/// Counts how many leading sequences of the non-periodic schedule are
/// first-kind sequences when m sequences have been emitted.
inline long mbar_of(long m) {
  if (m < 1) throw std::invalid_argument("mbar_of: m must be at least 1");
  long k = static_cast<long>((std::sqrt(8.0 * static_cast<double>(m) + 1.0) - 1.0) / 2.0);
  while (k > 1 && k * (k + 1) / 2 > m) --k;
  while ((k + 1) * (k + 2) / 2 <= m) ++k;
  return k;
}

/// A Schur-stable two-subsystem combination A_i^p A_j^q together with its
/// decay data: the smallest power m whose norm drops below one, that norm
/// rho, and the staircase index mbar.
struct StableCombination {
  int i = 0;
  int j = 0;
  int p = 0;
  int q = 0;
  Matrix combo;  // A_i^p A_j^q
  int m = 0;
  double rho = 0.0;
  int mbar = 0;
};

struct SearchOptions {
  int m_max = 64;
  int max_interior = -1;  // -1: use N - 2
  bool allow_stable = false;
  bool retry_larger_m = true;
};

struct ScanResult {
  std::vector<StableCombination> combinations;
  std::vector<std::string> warnings;
};

/// Scans every (i, j, p, q) with p, q in the dwell window for Schur-stable
/// A_i^p A_j^q. i = j is admitted only in allow_stable mode and only for
/// Schur members. Results are ordered by ascending rho, then m, then index.
inline ScanResult find_stable_combinations(const Instance& inst,
                                           const SearchOptions& opts = {}) {
  ScanResult out;
  const int n = inst.family.count();
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j) {
        if (!opts.allow_stable) continue;
        if (!is_schur(inst.family.matrix(i))) continue;
      }
      const Matrix& ai = inst.family.matrix(i);
      const Matrix& aj = inst.family.matrix(j);
      for (int p = inst.dwell.min_dwell; p <= inst.dwell.max_dwell; ++p) {
        for (int q = inst.dwell.min_dwell; q <= inst.dwell.max_dwell; ++q) {
          Matrix combo = matrix_power(ai, p) * matrix_power(aj, q);
          if (!is_schur(combo)) continue;
          Matrix pw = Matrix::identity(inst.family.dimension);
          bool found = false;
          for (int m = 1; m <= opts.m_max; ++m) {
            pw = pw * combo;
            double norm = spectral_norm(pw);
            if (norm < 1.0) {
              out.combinations.push_back({i, j, p, q, combo, m, norm,
                                          static_cast<int>(mbar_of(m))});
              found = true;
              break;
            }
          }
          if (!found) {
            out.warnings.push_back(
                "combination i=" + std::to_string(i) + " j=" + std::to_string(j) +
                " p=" + std::to_string(p) + " q=" + std::to_string(q) +
                " is Schur stable but no power up to m_max=" +
                std::to_string(opts.m_max) + " has norm below one");
          }
        }
      }
    }
  }
  std::sort(out.combinations.begin(), out.combinations.end(),
            [](const StableCombination& a, const StableCombination& b) {
              if (a.rho != b.rho) return a.rho < b.rho;
              if (a.m != b.m) return a.m < b.m;
              return std::tie(a.i, a.j, a.p, a.q) < std::tie(b.i, b.j, b.p, b.q);
            });
  return out;
}

/// || A_ell^a P - P A_ell^a || where P is the interior product of the path
/// at exponent b. The moved power must not collide with an interior vertex.
inline double commutator_norm(const SubsystemFamily& family, const Path& path,
                              int ell, int a, int b) {
  if (a <= 0 || b <= 0) {
    throw std::invalid_argument("commutator_norm: exponents must be positive");
  }
  if (path.contains_interior(ell)) {
    throw std::invalid_argument(
        "commutator_norm: subsystem " + std::to_string(ell) +
        " appears in the path interior");
  }
  Matrix prod = interior_product(family, path, b);
  Matrix pw = matrix_power(family.matrix(ell), a);
  return spectral_norm(pw * prod - prod * pw);
}

/// A (j->i, i->j) path pair; to_i runs j->i and to_j runs i->j.
struct PathPair {
  Path to_i;
  Path to_j;

  bool operator==(const PathPair& rhs) const {
    return to_i == rhs.to_i && to_j == rhs.to_j;
  }
  bool operator<(const PathPair& rhs) const {
    if (to_i != rhs.to_i) return to_i < rhs.to_i;
    return to_j < rhs.to_j;
  }
  int total_length() const { return to_i.length() + to_j.length(); }
};

struct PathQuad {
  PathPair first;
  PathPair second;
};

/// Commutator norms for one path pair: the path crossed with the moved
/// power of i (exponent p) and of j (exponent q).
struct PairBounds {
  double ji_i = 0.0;  // j->i path, moving A_i^p
  double ji_j = 0.0;  // j->i path, moving A_j^q
  double ij_i = 0.0;  // i->j path, moving A_i^p
  double ij_j = 0.0;  // i->j path, moving A_j^q
};

struct CommutatorBounds {
  PairBounds first;
  PairBounds second;
};

inline PairBounds pair_bounds(const SubsystemFamily& family,
                              const PathPair& pair,
                              const StableCombination& c, int delta) {
  PairBounds b;
  b.ji_i = commutator_norm(family, pair.to_i, c.i, c.p, delta);
  b.ji_j = commutator_norm(family, pair.to_i, c.j, c.q, delta);
  b.ij_i = commutator_norm(family, pair.to_j, c.i, c.p, delta);
  b.ij_j = commutator_norm(family, pair.to_j, c.j, c.q, delta);
  return b;
}

// ---------------------------------------------------------------------------
// Product-length exponents. Each value is the number of subsystem matrices
// multiplying one commutator term when a window of the schedule is unwound
// around the stable combination; they exponentiate M in the certificate
// inequality, and the two window values exponentiate e^lambda.
// ---------------------------------------------------------------------------

/// Two distinct path pairs (the general, non-periodic schedule).
struct TheoremExponents {
  long ji1_i = 0, ji2_i = 0, ji1_j = 0, ji2_j = 0;
  long ij1_i = 0, ij2_i = 0, ij1_j = 0, ij2_j = 0;
  long window1 = 0, window2 = 0;
};

/// One path pair used for both roles (periodic schedule).
struct PeriodicExponents {
  long ji_i = 0, ji_j = 0, ij_i = 0, ij_j = 0;
  long window = 0;
};

/// Two j->i paths with the direct i->j edge.
struct ForwardExponents {
  long ji1_i = 0, ji2_i = 0, ji1_j = 0, ji2_j = 0;
  long window1 = 0, window2 = 0;
};

/// One j->i path with the direct i->j edge.
struct ForwardSingleExponents {
  long ji_i = 0, ji_j = 0;
  long window = 0;
};

/// Two i->j paths with the direct j->i edge.
struct ReverseExponents {
  long ij1_i = 0, ij2_i = 0, ij1_j = 0, ij2_j = 0;
  long window1 = 0, window2 = 0;
};

/// One i->j path with the direct j->i edge.
struct ReverseSingleExponents {
  long ij_i = 0, ij_j = 0;
  long window = 0;
};

inline TheoremExponents theorem_exponents(const PathQuad& quad,
                                          const StableCombination& c,
                                          int delta) {
  const long l1ji = quad.first.to_i.length(), l1ij = quad.first.to_j.length();
  const long l2ji = quad.second.to_i.length(), l2ij = quad.second.to_j.length();
  const long d = delta, p = c.p, q = c.q, m = c.m, mb = c.mbar;
  TheoremExponents x;
  x.ji1_i = l1ji * d * (mb - 1) + l1ij * d * mb + (l2ji + l2ij) * d * (m - mb) + p * (m - 1) + q * m;
  x.ji2_i = (l1ji + l1ij) * d * mb + l2ji * d * (m - mb - 1) + l2ij * d * (m - mb) + p * (m - 1) + q * m;
  x.ji1_j = l1ji * d * (mb - 1) + l1ij * d * mb + (l2ji + l2ij) * d * (m - mb) + p * m + q * (m - 1);
  x.ji2_j = (l1ji + l1ij) * d * mb + l2ji * d * (m - mb - 1) + l2ij * d * (m - mb) + p * m + q * (m - 1);
  x.ij1_i = l1ji * d * mb + l1ij * d * (mb - 1) + (l2ji + l2ij) * d * (m - mb) + p * (m - 1) + q * m;
  x.ij2_i = (l1ji + l1ij) * d * mb + l2ji * d * (m - mb) + l2ij * d * (m - mb - 1) + p * (m - 1) + q * m;
  x.ij1_j = l1ji * d * mb + l1ij * d * (mb - 1) + (l2ji + l2ij) * d * (m - mb) + p * m + q * (m - 1);
  x.ij2_j = (l1ji + l1ij) * d * mb + l2ji * d * (m - mb) + l2ij * d * (m - mb - 1) + p * m + q * (m - 1);
  x.window1 = ((l1ji + l1ij) * d + p + q) * mb;
  x.window2 = ((l2ji + l2ij) * d + p + q) * (m - mb);
  return x;
}

inline PeriodicExponents periodic_exponents(const PathPair& pair,
                                            const StableCombination& c,
                                            int delta) {
  const long lji = pair.to_i.length(), lij = pair.to_j.length();
  const long d = delta, p = c.p, q = c.q, m = c.m;
  PeriodicExponents z;
  z.ji_i = lji * d * (m - 1) + lij * d * m + p * (m - 1) + q * m;
  z.ji_j = lji * d * (m - 1) + lij * d * m + p * m + q * (m - 1);
  z.ij_i = lji * d * m + lij * d * (m - 1) + p * (m - 1) + q * m;
  z.ij_j = lji * d * m + lij * d * (m - 1) + p * m + q * (m - 1);
  z.window = ((lji + lij) * d + p + q) * m;
  return z;
}

inline ForwardExponents forward_exponents(const Path& ji1, const Path& ji2,
                                          const StableCombination& c,
                                          int delta) {
  const long l1 = ji1.length(), l2 = ji2.length();
  const long d = delta, p = c.p, q = c.q, m = c.m, mb = c.mbar;
  ForwardExponents k;
  k.ji1_i = l1 * d * (mb - 1) + l2 * d * (m - mb) + p * (m - 1) + q * m;
  k.ji2_i = l1 * d * mb + l2 * d * (m - mb - 1) + p * (m - 1) + q * m;
  k.ji1_j = l1 * d * (mb - 1) + l2 * d * (m - mb) + p * m + q * (m - 1);
  k.ji2_j = l1 * d * mb + l2 * d * (m - mb - 1) + p * m + q * (m - 1);
  k.window1 = (l1 * d + p + q) * mb;
  k.window2 = (l2 * d + p + q) * (m - mb);
  return k;
}

inline ForwardSingleExponents forward_single_exponents(
    const Path& ji, const StableCombination& c, int delta) {
  const long l = ji.length();
  const long d = delta, p = c.p, q = c.q, m = c.m;
  ForwardSingleExponents k;
  k.ji_i = l * d * (m - 1) + p * (m - 1) + q * m;
  k.ji_j = l * d * (m - 1) + p * m + q * (m - 1);
  k.window = (l * d + p + q) * m;
  return k;
}

inline ReverseExponents reverse_exponents(const Path& ij1, const Path& ij2,
                                          const StableCombination& c,
                                          int delta) {
  const long l1 = ij1.length(), l2 = ij2.length();
  const long d = delta, p = c.p, q = c.q, m = c.m, mb = c.mbar;
  ReverseExponents x;
  x.ij1_i = l1 * d * (mb - 1) + l2 * d * (m - mb) + p * (m - 1) + q * m;
  x.ij2_i = l1 * d * mb + l2 * d * (m - mb - 1) + p * (m - 1) + q * m;
  x.ij1_j = l1 * d * (mb - 1) + l2 * d * (m - mb) + p * m + q * (m - 1);
  x.ij2_j = l1 * d * mb + l2 * d * (m - mb - 1) + p * m + q * (m - 1);
  x.window1 = (l1 * d + p + q) * mb;
  x.window2 = (l2 * d + p + q) * (m - mb);
  return x;
}

inline ReverseSingleExponents reverse_single_exponents(
    const Path& ij, const StableCombination& c, int delta) {
  const long l = ij.length();
  const long d = delta, p = c.p, q = c.q, m = c.m;
  ReverseSingleExponents x;
  x.ij_i = l * d * (m - 1) + p * (m - 1) + q * m;
  x.ij_j = l * d * (m - 1) + p * m + q * (m - 1);
  x.window = (l * d + p + q) * m;
  return x;
}

// ---------------------------------------------------------------------------
// Condition left-hand sides. All share the shape
//   rho e^{lambda m} + (sum of coeff * M^exponent * eps) * e^{lambda window}
// and require the decay margin rho e^{lambda m} < 1.
// ---------------------------------------------------------------------------

namespace detail {

inline void require_decay_margin(const StableCombination& c, double lambda) {
  if (lambda < 0.0) {
    throw std::invalid_argument("condition_lhs: lambda must be nonnegative");
  }
  if (!(c.rho * std::exp(lambda * c.m) < 1.0)) {
    throw std::invalid_argument(
        "condition_lhs: decay margin violated, rho e^{lambda m} >= 1");
  }
}

inline double coeff_first_i(long mb) { return 0.5 * static_cast<double>(mb) * (mb - 1); }
inline double coeff_first_j(long mb) { return 0.5 * static_cast<double>(mb) * (mb + 1); }
inline double coeff_second_i(long m, long mb) {
  return 0.5 * (static_cast<double>(m) * (m - 1) - static_cast<double>(mb) * (mb - 1));
}
inline double coeff_second_j(long m, long mb) {
  return 0.5 * (static_cast<double>(m) * (m + 1) - static_cast<double>(mb) * (mb + 1));
}

inline double mpow(double M, long e) { return std::pow(M, static_cast<double>(e)); }

// One commutator term. Zero coefficients and zero bounds contribute nothing
// even when the M power overflows, so vacuous terms cannot poison the sum.
inline double term(double coeff, double M, long e, double eps) {
  if (coeff == 0.0 || eps == 0.0) return 0.0;
  return coeff * mpow(M, e) * eps;
}

}  // namespace detail

inline double condition_lhs(const StableCombination& c,
                            const TheoremExponents& x,
                            const CommutatorBounds& b, double M,
                            double lambda) {
  detail::require_decay_margin(c, lambda);
  const double c1i = detail::coeff_first_i(c.mbar);
  const double c1j = detail::coeff_first_j(c.mbar);
  const double c2i = detail::coeff_second_i(c.m, c.mbar);
  const double c2j = detail::coeff_second_j(c.m, c.mbar);
  double sum = detail::term(c1i, M, x.ji1_i, b.first.ji_i) +
               detail::term(c1j, M, x.ji1_j, b.first.ji_j) +
               detail::term(c1j, M, x.ij1_i, b.first.ij_i) +
               detail::term(c1j, M, x.ij1_j, b.first.ij_j) +
               detail::term(c2i, M, x.ji2_i, b.second.ji_i) +
               detail::term(c2j, M, x.ji2_j, b.second.ji_j) +
               detail::term(c2j, M, x.ij2_i, b.second.ij_i) +
               detail::term(c2j, M, x.ij2_j, b.second.ij_j);
  return c.rho * std::exp(lambda * c.m) +
         sum * std::exp(lambda * static_cast<double>(x.window1 + x.window2));
}

inline double condition_lhs(const StableCombination& c,
                            const PeriodicExponents& z, const PairBounds& b,
                            double M, double lambda) {
  detail::require_decay_margin(c, lambda);
  const double ci = 0.5 * static_cast<double>(c.m) * (c.m - 1);
  const double cj = 0.5 * static_cast<double>(c.m) * (c.m + 1);
  double sum = detail::term(ci, M, z.ji_i, b.ji_i) +
               detail::term(cj, M, z.ji_j, b.ji_j) +
               detail::term(cj, M, z.ij_i, b.ij_i) +
               detail::term(cj, M, z.ij_j, b.ij_j);
  return c.rho * std::exp(lambda * c.m) +
         sum * std::exp(lambda * static_cast<double>(z.window));
}

inline double condition_lhs(const StableCombination& c,
                            const ForwardExponents& k,
                            const CommutatorBounds& b, double M,
                            double lambda) {
  detail::require_decay_margin(c, lambda);
  double sum = detail::term(detail::coeff_first_i(c.mbar), M, k.ji1_i, b.first.ji_i) +
               detail::term(detail::coeff_second_i(c.m, c.mbar), M, k.ji2_i, b.second.ji_i) +
               detail::term(detail::coeff_first_j(c.mbar), M, k.ji1_j, b.first.ji_j) +
               detail::term(detail::coeff_second_j(c.m, c.mbar), M, k.ji2_j, b.second.ji_j);
  return c.rho * std::exp(lambda * c.m) +
         sum * std::exp(lambda * static_cast<double>(k.window1 + k.window2));
}

inline double condition_lhs(const StableCombination& c,
                            const ForwardSingleExponents& k,
                            const PairBounds& b, double M, double lambda) {
  detail::require_decay_margin(c, lambda);
  double sum =
      detail::term(0.5 * static_cast<double>(c.m) * (c.m - 1), M, k.ji_i, b.ji_i) +
      detail::term(0.5 * static_cast<double>(c.m) * (c.m + 1), M, k.ji_j, b.ji_j);
  return c.rho * std::exp(lambda * c.m) +
         sum * std::exp(lambda * static_cast<double>(k.window));
}

inline double condition_lhs(const StableCombination& c,
                            const ReverseExponents& x,
                            const CommutatorBounds& b, double M,
                            double lambda) {
  detail::require_decay_margin(c, lambda);
  double sum = detail::term(detail::coeff_first_j(c.mbar), M, x.ij1_i, b.first.ij_i) +
               detail::term(detail::coeff_second_j(c.m, c.mbar), M, x.ij2_i, b.second.ij_i) +
               detail::term(detail::coeff_first_j(c.mbar), M, x.ij1_j, b.first.ij_j) +
               detail::term(detail::coeff_second_j(c.m, c.mbar), M, x.ij2_j, b.second.ij_j);
  return c.rho * std::exp(lambda * c.m) +
         sum * std::exp(lambda * static_cast<double>(x.window1 + x.window2));
}

inline double condition_lhs(const StableCombination& c,
                            const ReverseSingleExponents& x,
                            const PairBounds& b, double M, double lambda) {
  detail::require_decay_margin(c, lambda);
  const double cj = 0.5 * static_cast<double>(c.m) * (c.m + 1);
  double sum = detail::term(cj, M, x.ij_i, b.ij_i) +
               detail::term(cj, M, x.ij_j, b.ij_j);
  return c.rho * std::exp(lambda * c.m) +
         sum * std::exp(lambda * static_cast<double>(x.window));
}

// ---------------------------------------------------------------------------
// Lambda maximization and the certificate search.
// ---------------------------------------------------------------------------

struct LambdaSearch {
  bool feasible = false;
  double lambda_max = 0.0;
  double limit_lhs = 0.0;  // LHS as lambda -> 0+
};

/// Largest lambda with LHS(lambda) <= 1 and rho e^{lambda m} < 1, by
/// bisection on the increasing map lambda -> LHS(lambda). Infeasible when
/// even the lambda -> 0 limit exceeds one (or the margin leaves no room).
template <class LhsFn>
LambdaSearch maximize_lambda(const LhsFn& lhs, double rho, int m) {
  LambdaSearch out;
  out.limit_lhs = lhs(0.0);
  if (out.limit_lhs > 1.0) return out;
  double lo = 0.0;
  double hi = std::log(1.0 / rho) / static_cast<double>(m);
  while (hi - lo > kLambdaTol) {
    double mid = 0.5 * (lo + hi);
    bool ok = rho * std::exp(mid * m) < 1.0 && lhs(mid) <= 1.0;
    (ok ? lo : hi) = mid;
  }
  if (lo <= kLambdaTol) return out;  // no certifiable positive rate
  out.feasible = true;
  out.lambda_max = lo;
  return out;
}

enum class ResultKind {
  theorem1,
  corollary1,
  corollary2a,
  corollary2b,
  corollary3a,
  corollary3b,
  corollary4,
};

inline std::string to_string(ResultKind k) {
  switch (k) {
    case ResultKind::theorem1: return "theorem1";
    case ResultKind::corollary1: return "corollary1";
    case ResultKind::corollary2a: return "corollary2a";
    case ResultKind::corollary2b: return "corollary2b";
    case ResultKind::corollary3a: return "corollary3a";
    case ResultKind::corollary3b: return "corollary3b";
    case ResultKind::corollary4: return "corollary4";
  }
  return "unknown";
}

using ExponentSet =
    std::variant<TheoremExponents, PeriodicExponents, ForwardExponents,
                 ForwardSingleExponents, ReverseExponents,
                 ReverseSingleExponents>;

struct Certificate {
  ResultKind kind = ResultKind::corollary1;
  StableCombination combo;
  PathQuad paths;
  CommutatorBounds bounds;
  ExponentSet exponents;
  double lambda = 0.0;      // working certified rate
  double lambda_max = 0.0;  // bisection maximum
  double lhs = 0.0;         // condition LHS at the working rate
  double bound_M = 0.0;
  int interior_dwell = 0;   // dwell applied on path-interior subsystems
};

/// Condition LHS of a certificate re-evaluated at an arbitrary rate.
inline double certificate_lhs(const Certificate& cert, double lambda) {
  return std::visit(
      [&](const auto& exps) -> double {
        using T = std::decay_t<decltype(exps)>;
        if constexpr (std::is_same_v<T, PeriodicExponents> ||
                      std::is_same_v<T, ForwardSingleExponents> ||
                      std::is_same_v<T, ReverseSingleExponents>) {
          return condition_lhs(cert.combo, exps, cert.bounds.first,
                               cert.bound_M, lambda);
        } else {
          return condition_lhs(cert.combo, exps, cert.bounds, cert.bound_M,
                               lambda);
        }
      },
      cert.exponents);
}

struct CandidateOutcome {
  StableCombination combo;
  ResultKind kind = ResultKind::corollary1;
  PathQuad paths;
  bool feasible = false;
  double limit_lhs = 0.0;
  double lambda_max = 0.0;
};

struct SearchResult {
  std::optional<Certificate> certificate;
  std::vector<CandidateOutcome> candidates;
  std::vector<std::string> warnings;
};

namespace detail {

struct PathNorms {
  // commutator norms per path, for the moved power of i and of j
  std::vector<double> with_i;
  std::vector<double> with_j;
};

inline PathNorms path_norms(const SubsystemFamily& family,
                            const std::vector<Path>& paths,
                            const StableCombination& c, int delta) {
  PathNorms n;
  n.with_i.reserve(paths.size());
  n.with_j.reserve(paths.size());
  for (const auto& p : paths) {
    n.with_i.push_back(commutator_norm(family, p, c.i, c.p, delta));
    n.with_j.push_back(commutator_norm(family, p, c.j, c.q, delta));
  }
  return n;
}

struct CandidateEval {
  CommutatorBounds bounds;
  ExponentSet exponents;
  std::function<double(double)> lhs;
};

inline CandidateEval build_eval(ResultKind kind, const StableCombination& c,
                                const PathQuad& quad,
                                const CommutatorBounds& bounds, double M,
                                int delta) {
  CandidateEval ev;
  ev.bounds = bounds;
  switch (kind) {
    case ResultKind::theorem1: {
      auto x = theorem_exponents(quad, c, delta);
      ev.exponents = x;
      ev.lhs = [c, x, bounds, M](double l) { return condition_lhs(c, x, bounds, M, l); };
      break;
    }
    case ResultKind::corollary1:
    case ResultKind::corollary4: {
      auto z = periodic_exponents(quad.first, c, delta);
      ev.exponents = z;
      PairBounds pb = bounds.first;
      ev.lhs = [c, z, pb, M](double l) { return condition_lhs(c, z, pb, M, l); };
      break;
    }
    case ResultKind::corollary2a: {
      auto k = forward_exponents(quad.first.to_i, quad.second.to_i, c, delta);
      ev.exponents = k;
      ev.lhs = [c, k, bounds, M](double l) { return condition_lhs(c, k, bounds, M, l); };
      break;
    }
    case ResultKind::corollary2b: {
      auto k = forward_single_exponents(quad.first.to_i, c, delta);
      ev.exponents = k;
      PairBounds pb = bounds.first;
      ev.lhs = [c, k, pb, M](double l) { return condition_lhs(c, k, pb, M, l); };
      break;
    }
    case ResultKind::corollary3a: {
      auto x = reverse_exponents(quad.first.to_j, quad.second.to_j, c, delta);
      ev.exponents = x;
      ev.lhs = [c, x, bounds, M](double l) { return condition_lhs(c, x, bounds, M, l); };
      break;
    }
    case ResultKind::corollary3b: {
      auto x = reverse_single_exponents(quad.first.to_j, c, delta);
      ev.exponents = x;
      PairBounds pb = bounds.first;
      ev.lhs = [c, x, pb, M](double l) { return condition_lhs(c, x, pb, M, l); };
      break;
    }
  }
  return ev;
}

}  // namespace detail

/// Walks the ordered stable combinations and, per combination, the result
/// variants its edge situation admits; returns the first candidate whose
/// lambda maximization is feasible. The outcome log keeps every tried
/// candidate with its limiting LHS so infeasible runs yield a full table.
inline SearchResult search_certificate(const Instance& inst,
                                       const SearchOptions& opts = {}) {
  SearchResult result;
  ScanResult scan = find_stable_combinations(inst, opts);
  result.warnings = scan.warnings;
  const double M = family_bound_M(inst.family);
  const int n = inst.family.count();
  const int max_interior =
      opts.max_interior < 0 ? std::max(n - 2, 0) : opts.max_interior;
  const int delta = inst.dwell.min_dwell;

  auto try_candidate = [&](ResultKind kind, const StableCombination& c,
                           const PathQuad& quad,
                           const CommutatorBounds& bounds) -> bool {
    auto ev = detail::build_eval(kind, c, quad, bounds, M, delta);
    LambdaSearch ls = maximize_lambda(ev.lhs, c.rho, c.m);
    result.candidates.push_back(
        {c, kind, quad, ls.feasible, ls.limit_lhs, ls.lambda_max});
    if (!ls.feasible) return false;
    Certificate cert;
    cert.kind = kind;
    cert.combo = c;
    cert.paths = quad;
    cert.bounds = ev.bounds;
    cert.exponents = ev.exponents;
    cert.lambda_max = ls.lambda_max;
    cert.lambda = std::min(kReferenceLambda, ls.lambda_max);
    cert.lhs = ev.lhs(cert.lambda);
    cert.bound_M = M;
    cert.interior_dwell = delta;
    result.certificate = cert;
    return true;
  };

  auto run_combination = [&](const StableCombination& c) -> bool {
    const int i = c.i, j = c.j;
    const bool edge_ij = inst.graph.has_edge(i, j);
    const bool edge_ji = inst.graph.has_edge(j, i);

    if (edge_ij && edge_ji) {
      PathPair direct{Path({j, i}), Path({i, j})};
      return try_candidate(ResultKind::corollary4, c, {direct, direct},
                           CommutatorBounds{});
    }

    if (edge_ij) {  // only i -> j switching is direct
      auto ji_paths = enumerate_paths(inst.graph, j, i, max_interior);
      Path direct_ij({i, j});
      auto norms = detail::path_norms(inst.family, ji_paths, c, delta);
      auto bounds_of = [&](size_t a) {
        PairBounds b;
        b.ji_i = norms.with_i[a];
        b.ji_j = norms.with_j[a];
        return b;
      };
      for (size_t a = 0; a < ji_paths.size(); ++a) {
        PathPair pair{ji_paths[a], direct_ij};
        if (try_candidate(ResultKind::corollary2b, c, {pair, pair},
                          {bounds_of(a), bounds_of(a)})) {
          return true;
        }
      }
      for (size_t a = 0; a < ji_paths.size(); ++a) {
        for (size_t b = 0; b < ji_paths.size(); ++b) {
          if (a == b) continue;
          PathQuad quad{{ji_paths[a], direct_ij}, {ji_paths[b], direct_ij}};
          if (try_candidate(ResultKind::corollary2a, c, quad,
                            {bounds_of(a), bounds_of(b)})) {
            return true;
          }
        }
      }
      return false;
    }

    if (edge_ji) {  // only j -> i switching is direct
      auto ij_paths = enumerate_paths(inst.graph, i, j, max_interior);
      Path direct_ji({j, i});
      auto norms = detail::path_norms(inst.family, ij_paths, c, delta);
      auto bounds_of = [&](size_t a) {
        PairBounds b;
        b.ij_i = norms.with_i[a];
        b.ij_j = norms.with_j[a];
        return b;
      };
      for (size_t a = 0; a < ij_paths.size(); ++a) {
        PathPair pair{direct_ji, ij_paths[a]};
        if (try_candidate(ResultKind::corollary3b, c, {pair, pair},
                          {bounds_of(a), bounds_of(a)})) {
          return true;
        }
      }
      for (size_t a = 0; a < ij_paths.size(); ++a) {
        for (size_t b = 0; b < ij_paths.size(); ++b) {
          if (a == b) continue;
          PathQuad quad{{direct_ji, ij_paths[a]}, {direct_ji, ij_paths[b]}};
          if (try_candidate(ResultKind::corollary3a, c, quad,
                            {bounds_of(a), bounds_of(b)})) {
            return true;
          }
        }
      }
      return false;
    }

    // No direct edge either way: both directions go through paths.
    std::vector<Path> ji_paths, ij_paths;
    if (i == j) {
      ji_paths = enumerate_closed_paths(inst.graph, i, max_interior);
      ij_paths = ji_paths;
    } else {
      ji_paths = enumerate_paths(inst.graph, j, i, max_interior);
      ij_paths = enumerate_paths(inst.graph, i, j, max_interior);
    }
    auto ji_norms = detail::path_norms(inst.family, ji_paths, c, delta);
    auto ij_norms = detail::path_norms(inst.family, ij_paths, c, delta);

    struct IndexedPair {
      size_t ji, ij;
      PathPair pair;
    };
    std::vector<IndexedPair> pairs;
    for (size_t a = 0; a < ji_paths.size(); ++a) {
      for (size_t b = 0; b < ij_paths.size(); ++b) {
        pairs.push_back({a, b, PathPair{ji_paths[a], ij_paths[b]}});
      }
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const IndexedPair& x, const IndexedPair& y) {
                int lx = x.pair.total_length(), ly = y.pair.total_length();
                if (lx != ly) return lx < ly;
                return x.pair < y.pair;
              });
    auto bounds_of = [&](const IndexedPair& ip) {
      PairBounds b;
      b.ji_i = ji_norms.with_i[ip.ji];
      b.ji_j = ji_norms.with_j[ip.ji];
      b.ij_i = ij_norms.with_i[ip.ij];
      b.ij_j = ij_norms.with_j[ip.ij];
      return b;
    };

    // Two distinct pairs first (richer schedules), then single pairs.
    struct QuadIdx {
      size_t a, b;
      int total;
    };
    std::vector<QuadIdx> quads;
    for (size_t a = 0; a < pairs.size(); ++a) {
      for (size_t b = 0; b < pairs.size(); ++b) {
        if (a == b) continue;
        quads.push_back({a, b,
                         pairs[a].pair.total_length() +
                             pairs[b].pair.total_length()});
      }
    }
    std::sort(quads.begin(), quads.end(), [&](const QuadIdx& x, const QuadIdx& y) {
      if (x.total != y.total) return x.total < y.total;
      if (!(pairs[x.a].pair == pairs[y.a].pair)) return pairs[x.a].pair < pairs[y.a].pair;
      return pairs[x.b].pair < pairs[y.b].pair;
    });
    for (const auto& qd : quads) {
      PathQuad quad{pairs[qd.a].pair, pairs[qd.b].pair};
      if (try_candidate(ResultKind::theorem1, c, quad,
                        {bounds_of(pairs[qd.a]), bounds_of(pairs[qd.b])})) {
        return true;
      }
    }
    for (const auto& ip : pairs) {
      if (try_candidate(ResultKind::corollary1, c, {ip.pair, ip.pair},
                        {bounds_of(ip), bounds_of(ip)})) {
        return true;
      }
    }
    return false;
  };

  for (const auto& c : scan.combinations) {
    if (run_combination(c)) return result;
  }

  if (opts.retry_larger_m) {
    // Second pass: the same Schur products at every deeper power whose norm
    // is below one, ordered by that norm. Larger m can buy a smaller rho.
    std::vector<StableCombination> extended;
    for (const auto& base : scan.combinations) {
      Matrix pw = matrix_power(base.combo, base.m);
      for (int m = base.m + 1; m <= opts.m_max; ++m) {
        pw = pw * base.combo;
        double norm = spectral_norm(pw);
        if (norm < 1.0) {
          extended.push_back({base.i, base.j, base.p, base.q, base.combo, m,
                              norm, static_cast<int>(mbar_of(m))});
        }
      }
    }
    std::sort(extended.begin(), extended.end(),
              [](const StableCombination& a, const StableCombination& b) {
                if (a.rho != b.rho) return a.rho < b.rho;
                if (a.m != b.m) return a.m < b.m;
                return std::tie(a.i, a.j, a.p, a.q) <
                       std::tie(b.i, b.j, b.p, b.q);
              });
    for (const auto& c : extended) {
      if (run_combination(c)) return result;
    }
  }

  return result;
}

}  // namespace switchcert
