#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "switchcert/matrix.hpp"

namespace switchcert {

/// The subsystem matrices A_1..A_N, all d-by-d. Subsystems are addressed by
/// their 1-based index throughout the library, matching how problem files
/// and reports name them.
struct SubsystemFamily {
  int dimension = 0;
  std::vector<Matrix> matrices;

  int count() const { return static_cast<int>(matrices.size()); }

  const Matrix& matrix(int ell) const {
    if (ell < 1 || ell > count()) {
      throw std::invalid_argument("SubsystemFamily: index " +
                                  std::to_string(ell) + " out of range");
    }
    return matrices[static_cast<size_t>(ell - 1)];
  }
};

/// Admissible dwell-time window [min_dwell, max_dwell], in steps.
struct DwellBounds {
  int min_dwell = 0;  // delta
  int max_dwell = 0;  // Delta
};

/// Directed graph of admissible switches on vertices 1..vertex_count.
struct SwitchGraph {
  int vertex_count = 0;
  std::set<std::pair<int, int>> edges;

  bool has_edge(int from, int to) const {
    return edges.count({from, to}) > 0;
  }
};

/// A source-to-destination walk whose interior vertices avoid both endpoints
/// and are pairwise distinct. Stored as the vertex sequence w_0..w_n.
class Path {
 public:
  Path() = default;
  explicit Path(std::vector<int> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) {
      throw std::invalid_argument("Path: needs at least source and destination");
    }
  }

  const std::vector<int>& vertices() const { return vertices_; }
  int source() const { return vertices_.front(); }
  int destination() const { return vertices_.back(); }

  /// Number of interior vertices; the path length entering every
  /// certificate quantity.
  int length() const { return static_cast<int>(vertices_.size()) - 2; }

  std::vector<int> interior() const {
    return std::vector<int>(vertices_.begin() + 1, vertices_.end() - 1);
  }

  bool contains_interior(int vertex) const {
    for (size_t k = 1; k + 1 < vertices_.size(); ++k) {
      if (vertices_[k] == vertex) return true;
    }
    return false;
  }

  bool operator==(const Path& rhs) const { return vertices_ == rhs.vertices_; }
  bool operator!=(const Path& rhs) const { return !(*this == rhs); }
  bool operator<(const Path& rhs) const { return vertices_ < rhs.vertices_; }

 private:
  std::vector<int> vertices_;
};

inline std::string to_string(const Path& p) {
  std::string out;
  for (size_t k = 0; k < p.vertices().size(); ++k) {
    if (k) out += "->";
    out += std::to_string(p.vertices()[k]);
  }
  return out;
}

/// One problem instance: family + dwell window + switch graph.
struct Instance {
  SubsystemFamily family;
  DwellBounds dwell;
  SwitchGraph graph;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks every structural invariant of an instance. With allow_stable set,
/// Schur-stable members are tolerated (the stable-subsystem configuration);
/// otherwise every subsystem must be unstable.
inline ValidationReport validate_instance(const Instance& inst,
                                          bool allow_stable = false) {
  ValidationReport rep;
  const auto& fam = inst.family;
  const int n = fam.count();
  if (fam.dimension <= 0) {
    rep.violations.push_back("dimension must be positive");
  }
  if (n < 2) {
    rep.violations.push_back("family needs at least two subsystems");
  }
  for (int ell = 1; ell <= n; ++ell) {
    const Matrix& a = fam.matrices[static_cast<size_t>(ell - 1)];
    if (a.rows() != fam.dimension || a.cols() != fam.dimension) {
      rep.violations.push_back("subsystem " + std::to_string(ell) +
                               " is not " + std::to_string(fam.dimension) +
                               "x" + std::to_string(fam.dimension));
      continue;
    }
    if (!a.is_finite()) {
      rep.violations.push_back("subsystem " + std::to_string(ell) +
                               " has non-finite entries");
      continue;
    }
    if (!allow_stable && is_schur(a)) {
      rep.violations.push_back("subsystem " + std::to_string(ell) +
                               " is Schur stable but the instance requires "
                               "all subsystems unstable");
    }
  }
  if (inst.dwell.min_dwell <= 0) {
    rep.violations.push_back("minimum dwell must be positive");
  }
  if (inst.dwell.min_dwell >= inst.dwell.max_dwell) {
    rep.violations.push_back("minimum dwell must be strictly below maximum dwell");
  }
  if (inst.graph.vertex_count != n) {
    rep.violations.push_back("graph vertex count does not match family size");
  }
  for (const auto& [from, to] : inst.graph.edges) {
    if (from == to) {
      rep.violations.push_back("self-loop on vertex " + std::to_string(from));
    }
    if (from < 1 || from > n || to < 1 || to > n) {
      rep.violations.push_back("edge (" + std::to_string(from) + "," +
                               std::to_string(to) + ") references an unknown vertex");
    }
  }
  return rep;
}

/// max_l ||A_l||, the norm bound entering every certificate inequality.
inline double family_bound_M(const SubsystemFamily& family) {
  if (family.matrices.empty()) {
    throw std::invalid_argument("family_bound_M: empty family");
  }
  double m = 0.0;
  for (const auto& a : family.matrices) m = std::max(m, spectral_norm(a));
  return m;
}

namespace detail {

// DFS over interior choices; results are sorted afterwards so callers see
// lexicographic order by vertex sequence regardless of edge-set iteration.
inline void collect_paths(const SwitchGraph& g, int u, int v, int max_interior,
                          std::vector<int>& prefix, std::vector<Path>& out) {
  const int last = prefix.back();
  if (g.has_edge(last, v)) {
    std::vector<int> full = prefix;
    full.push_back(v);
    out.emplace_back(std::move(full));
  }
  if (static_cast<int>(prefix.size()) - 1 >= max_interior) return;
  for (int k = 1; k <= g.vertex_count; ++k) {
    if (k == u || k == v) continue;
    if (std::find(prefix.begin() + 1, prefix.end(), k) != prefix.end()) continue;
    if (!g.has_edge(last, k)) continue;
    prefix.push_back(k);
    collect_paths(g, u, v, max_interior, prefix, out);
    prefix.pop_back();
  }
}

inline std::vector<Path> paths_between(const SwitchGraph& g, int u, int v,
                                       int max_interior) {
  std::vector<Path> out;
  std::vector<int> prefix{u};
  collect_paths(g, u, v, max_interior, prefix, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// All u->v paths with at most max_interior interior vertices, interiors
/// avoiding {u, v} and pairwise distinct, in lexicographic order. The
/// length-0 path appears iff (u, v) is an edge.
inline std::vector<Path> enumerate_paths(const SwitchGraph& g, int u, int v,
                                         int max_interior) {
  if (u < 1 || u > g.vertex_count || v < 1 || v > g.vertex_count) {
    throw std::invalid_argument("enumerate_paths: vertex out of range");
  }
  if (u == v) {
    throw std::invalid_argument(
        "enumerate_paths: source equals destination; use "
        "enumerate_closed_paths for return walks");
  }
  if (max_interior < 0) {
    throw std::invalid_argument("enumerate_paths: max_interior must be >= 0");
  }
  return detail::paths_between(g, u, v, max_interior);
}

/// Return walks u->u whose interiors avoid u and are pairwise distinct.
/// Needed when a single stable subsystem plays both roles of a combination;
/// without self-loops every such walk has at least one interior vertex.
inline std::vector<Path> enumerate_closed_paths(const SwitchGraph& g, int u,
                                                int max_interior) {
  if (u < 1 || u > g.vertex_count) {
    throw std::invalid_argument("enumerate_closed_paths: vertex out of range");
  }
  if (max_interior < 0) {
    throw std::invalid_argument("enumerate_closed_paths: max_interior must be >= 0");
  }
  return detail::paths_between(g, u, u, max_interior);
}

/// Ordered product of interior-vertex powers along a path: the factor for
/// the interior vertex nearest the destination sits leftmost, the one
/// nearest the source rightmost. A path with no interior yields the identity.
inline Matrix interior_product(const SubsystemFamily& family, const Path& path,
                               int b) {
  if (b <= 0) throw std::invalid_argument("interior_product: exponent must be positive");
  Matrix acc = Matrix::identity(family.dimension);
  for (int w : path.interior()) {
    acc = matrix_power(family.matrix(w), b) * acc;
  }
  return acc;
}

}  // namespace switchcert
