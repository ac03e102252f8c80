#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "switchcert/certificates.hpp"
#include "switchcert/signal.hpp"
#include "switchcert/simulate.hpp"
#include "switchcert/system.hpp"

namespace switchcert {

struct ProblemOptions {
  int m_max = 64;
  int max_interior = -1;  // -1: N - 2
  bool allow_stable = false;
  uint64_t seed = kDefaultSeed;
  long horizon = 500;
  int trials = 100;

  bool operator==(const ProblemOptions& rhs) const {
    return m_max == rhs.m_max && max_interior == rhs.max_interior &&
           allow_stable == rhs.allow_stable && seed == rhs.seed &&
           horizon == rhs.horizon && trials == rhs.trials;
  }
};

struct ProblemFile {
  std::vector<std::string> names;  // one per subsystem
  Instance instance;
  ProblemOptions options;

  bool operator==(const ProblemFile& rhs) const {
    if (names != rhs.names || !(options == rhs.options)) return false;
    if (instance.family.dimension != rhs.instance.family.dimension) return false;
    if (instance.family.count() != rhs.instance.family.count()) return false;
    for (int k = 0; k < instance.family.count(); ++k) {
      if (instance.family.matrices[k].row_major() !=
          rhs.instance.family.matrices[k].row_major()) {
        return false;
      }
    }
    return instance.dwell.min_dwell == rhs.instance.dwell.min_dwell &&
           instance.dwell.max_dwell == rhs.instance.dwell.max_dwell &&
           instance.graph.vertex_count == rhs.instance.graph.vertex_count &&
           instance.graph.edges == rhs.instance.graph.edges;
  }
};

inline SearchOptions to_search_options(const ProblemOptions& o) {
  SearchOptions s;
  s.m_max = o.m_max;
  s.max_interior = o.max_interior;
  s.allow_stable = o.allow_stable;
  return s;
}

namespace detail {

inline int line_of_offset(const std::string& text, size_t offset) {
  int line = 1;
  for (size_t k = 0; k < offset && k < text.size(); ++k) {
    if (text[k] == '\n') ++line;
  }
  return line;
}

inline const nlohmann::ordered_json& require_field(
    const nlohmann::ordered_json& j, const std::string& key,
    const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw std::invalid_argument("problem file: missing field '" + where + key +
                                "'");
  }
  return *it;
}

template <class T>
T field_as(const nlohmann::ordered_json& j, const std::string& key,
           const std::string& where) {
  try {
    return require_field(j, key, where).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("problem file: field '" + where + key +
                                "': " + e.what());
  }
}

}  // namespace detail

/// Parses and validates a problem document. Parse errors carry the line,
/// semantic errors the offending field; an instance that fails
/// validate_instance is rejected with the violation list.
inline ProblemFile parse_problem(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(
        "problem file: parse error at line " +
        std::to_string(detail::line_of_offset(text, e.byte)) + ": " + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("problem file: top level must be an object");
  }

  ProblemFile pf;
  int d = detail::field_as<int>(j, "dimension", "");
  pf.instance.family.dimension = d;

  const auto& mats = detail::require_field(j, "matrices", "");
  if (!mats.is_array() || mats.empty()) {
    throw std::invalid_argument("problem file: 'matrices' must be a non-empty array");
  }
  int index = 0;
  for (const auto& entry : mats) {
    ++index;
    std::string where = "matrices[" + std::to_string(index) + "].";
    std::string name = entry.contains("name")
                           ? detail::field_as<std::string>(entry, "name", where)
                           : "A" + std::to_string(index);
    auto values = detail::field_as<std::vector<double>>(entry, "entries", where);
    if (static_cast<int>(values.size()) != d * d) {
      throw std::invalid_argument("problem file: field '" + where + "entries': expected " +
                                  std::to_string(d * d) + " row-major entries, got " +
                                  std::to_string(values.size()));
    }
    try {
      pf.instance.family.matrices.emplace_back(d, d, values);
    } catch (const std::exception& e) {
      throw std::invalid_argument("problem file: field '" + where + "entries': " + e.what());
    }
    pf.names.push_back(name);
  }

  const auto& edges = detail::require_field(j, "edges", "");
  if (!edges.is_array()) {
    throw std::invalid_argument("problem file: 'edges' must be an array of pairs");
  }
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2) {
      throw std::invalid_argument("problem file: every edge must be a [from, to] pair");
    }
    pf.instance.graph.edges.insert({e[0].get<int>(), e[1].get<int>()});
  }
  pf.instance.graph.vertex_count = pf.instance.family.count();

  pf.instance.dwell.min_dwell = detail::field_as<int>(j, "delta", "");
  pf.instance.dwell.max_dwell = detail::field_as<int>(j, "Delta", "");

  if (j.contains("options")) {
    const auto& o = j.at("options");
    if (o.contains("m_max")) pf.options.m_max = detail::field_as<int>(o, "m_max", "options.");
    if (o.contains("max_interior")) {
      pf.options.max_interior = detail::field_as<int>(o, "max_interior", "options.");
    }
    if (o.contains("allow_stable")) {
      pf.options.allow_stable = detail::field_as<bool>(o, "allow_stable", "options.");
    }
    if (o.contains("seed")) pf.options.seed = detail::field_as<uint64_t>(o, "seed", "options.");
    if (o.contains("horizon")) pf.options.horizon = detail::field_as<long>(o, "horizon", "options.");
    if (o.contains("trials")) pf.options.trials = detail::field_as<int>(o, "trials", "options.");
  }

  ValidationReport rep = validate_instance(pf.instance, pf.options.allow_stable);
  if (!rep.ok()) {
    std::string msg = "problem file: invalid instance:";
    for (const auto& v : rep.violations) msg += "\n  - " + v;
    throw std::invalid_argument(msg);
  }
  return pf;
}

/// Canonical serialization; parse_problem(emit_problem(p)) == p field for field.
inline std::string emit_problem(const ProblemFile& pf) {
  nlohmann::ordered_json j;
  j["dimension"] = pf.instance.family.dimension;
  j["matrices"] = nlohmann::ordered_json::array();
  for (int k = 0; k < pf.instance.family.count(); ++k) {
    nlohmann::ordered_json m;
    m["name"] = pf.names[static_cast<size_t>(k)];
    m["entries"] = pf.instance.family.matrices[static_cast<size_t>(k)].row_major();
    j["matrices"].push_back(m);
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& [from, to] : pf.instance.graph.edges) {
    j["edges"].push_back({from, to});
  }
  j["delta"] = pf.instance.dwell.min_dwell;
  j["Delta"] = pf.instance.dwell.max_dwell;
  j["options"] = {{"m_max", pf.options.m_max},
                  {"max_interior", pf.options.max_interior},
                  {"allow_stable", pf.options.allow_stable},
                  {"seed", pf.options.seed},
                  {"horizon", pf.options.horizon},
                  {"trials", pf.options.trials}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Report rendering. Scalars carry 7 significant digits and the layout is
// deterministic, so reports are byte-stable for a fixed problem and seed.
// ---------------------------------------------------------------------------

inline std::string fmt7(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.7g", v);
  return buf;
}

inline std::string describe_eigenvalues(const Matrix& m) {
  std::string out;
  for (const auto& e : eigenvalues(m)) {
    if (!out.empty()) out += ", ";
    if (e.imag() == 0.0) {
      out += fmt7(e.real());
    } else {
      out += fmt7(e.real()) + (e.imag() >= 0 ? "+" : "-") +
             fmt7(std::abs(e.imag())) + "i";
    }
  }
  return out;
}

inline std::string describe_instance(const ProblemFile& pf) {
  std::ostringstream os;
  const auto& inst = pf.instance;
  os << "== instance ==\n";
  os << "dimension: " << inst.family.dimension << "\n";
  os << "subsystems: " << inst.family.count() << "\n";
  os << "dwell window: [" << inst.dwell.min_dwell << ", "
     << inst.dwell.max_dwell << "]\n";
  os << "edges:";
  for (const auto& [from, to] : inst.graph.edges) {
    os << " (" << from << "," << to << ")";
  }
  os << "\n";
  for (int k = 1; k <= inst.family.count(); ++k) {
    const Matrix& a = inst.family.matrix(k);
    os << pf.names[static_cast<size_t>(k - 1)] << ": norm=" << fmt7(spectral_norm(a))
       << " spectral_radius=" << fmt7(spectral_radius(a))
       << " schur=" << (is_schur(a) ? "yes" : "no") << "\n";
  }
  os << "M (max norm): " << fmt7(family_bound_M(inst.family)) << "\n";
  return os.str();
}

inline std::string describe_pair(const PathPair& pair) {
  return "[" + to_string(pair.to_i) + " | " + to_string(pair.to_j) + "]";
}

namespace detail {

struct ExponentPrinter {
  std::string operator()(const TheoremExponents& x) const {
    std::ostringstream os;
    os << "ji1_i=" << x.ji1_i << " ji2_i=" << x.ji2_i << " ji1_j=" << x.ji1_j
       << " ji2_j=" << x.ji2_j << " ij1_i=" << x.ij1_i << " ij2_i=" << x.ij2_i
       << " ij1_j=" << x.ij1_j << " ij2_j=" << x.ij2_j
       << " window1=" << x.window1 << " window2=" << x.window2;
    return os.str();
  }
  std::string operator()(const PeriodicExponents& z) const {
    std::ostringstream os;
    os << "ji_i=" << z.ji_i << " ji_j=" << z.ji_j << " ij_i=" << z.ij_i
       << " ij_j=" << z.ij_j << " window=" << z.window;
    return os.str();
  }
  std::string operator()(const ForwardExponents& k) const {
    std::ostringstream os;
    os << "ji1_i=" << k.ji1_i << " ji2_i=" << k.ji2_i << " ji1_j=" << k.ji1_j
       << " ji2_j=" << k.ji2_j << " window1=" << k.window1
       << " window2=" << k.window2;
    return os.str();
  }
  std::string operator()(const ForwardSingleExponents& k) const {
    std::ostringstream os;
    os << "ji_i=" << k.ji_i << " ji_j=" << k.ji_j << " window=" << k.window;
    return os.str();
  }
  std::string operator()(const ReverseExponents& x) const {
    std::ostringstream os;
    os << "ij1_i=" << x.ij1_i << " ij2_i=" << x.ij2_i << " ij1_j=" << x.ij1_j
       << " ij2_j=" << x.ij2_j << " window1=" << x.window1
       << " window2=" << x.window2;
    return os.str();
  }
  std::string operator()(const ReverseSingleExponents& x) const {
    std::ostringstream os;
    os << "ij_i=" << x.ij_i << " ij_j=" << x.ij_j << " window=" << x.window;
    return os.str();
  }
};

}  // namespace detail

inline std::string describe_certificate(const Certificate& cert) {
  std::ostringstream os;
  os << "== certificate ==\n";
  os << "result: " << to_string(cert.kind) << "\n";
  os << "combination: i=" << cert.combo.i << " j=" << cert.combo.j
     << " p=" << cert.combo.p << " q=" << cert.combo.q << "\n";
  os << "combination eigenvalues: " << describe_eigenvalues(cert.combo.combo)
     << "\n";
  os << "m: " << cert.combo.m << "  rho: " << fmt7(cert.combo.rho)
     << "  mbar: " << cert.combo.mbar << "\n";
  os << "M: " << fmt7(cert.bound_M) << "\n";
  os << "paths:\n";
  os << "  pair 1: " << describe_pair(cert.paths.first) << "\n";
  os << "  pair 2: " << describe_pair(cert.paths.second) << "\n";
  os << "commutator bounds:\n";
  os << "  pair 1: ji_i=" << fmt7(cert.bounds.first.ji_i)
     << " ji_j=" << fmt7(cert.bounds.first.ji_j)
     << " ij_i=" << fmt7(cert.bounds.first.ij_i)
     << " ij_j=" << fmt7(cert.bounds.first.ij_j) << "\n";
  os << "  pair 2: ji_i=" << fmt7(cert.bounds.second.ji_i)
     << " ji_j=" << fmt7(cert.bounds.second.ji_j)
     << " ij_i=" << fmt7(cert.bounds.second.ij_i)
     << " ij_j=" << fmt7(cert.bounds.second.ij_j) << "\n";
  os << "exponents: " << std::visit(detail::ExponentPrinter{}, cert.exponents)
     << "\n";
  os << "lambda_max: " << fmt7(cert.lambda_max) << "\n";
  os << "lambda (working): " << fmt7(cert.lambda) << "\n";
  os << "lhs at working lambda: " << fmt7(cert.lhs) << "\n";
  return os.str();
}

inline std::string describe_candidates(const SearchResult& res) {
  std::ostringstream os;
  if (res.certificate) {
    os << "candidates tried: " << res.candidates.size() << "\n";
  } else {
    os << "== candidates (no certificate found within caps) ==\n";
    if (res.candidates.empty()) {
      os << "no stable combination admits a candidate\n";
    }
    for (const auto& c : res.candidates) {
      os << "i=" << c.combo.i << " j=" << c.combo.j << " p=" << c.combo.p
         << " q=" << c.combo.q << " m=" << c.combo.m
         << " rho=" << fmt7(c.combo.rho) << " " << to_string(c.kind) << " "
         << describe_pair(c.paths.first) << describe_pair(c.paths.second)
         << " limit_lhs=" << fmt7(c.limit_lhs) << "\n";
    }
  }
  for (const auto& w : res.warnings) os << "warning: " << w << "\n";
  return os.str();
}

inline std::string describe_sequence(const std::vector<Block>& seq) {
  std::string out;
  for (const auto& b : seq) {
    if (!out.empty()) out += " ";
    out += std::to_string(b.subsystem) + ":" + std::to_string(b.dwell);
  }
  return out;
}

inline std::string describe_signal(const SwitchingSignal& sig,
                                   const AdmissibilityReport& adm) {
  std::ostringstream os;
  os << "== signal ==\n";
  os << "kind: " << to_string(sig.generator.kind) << "\n";
  if (!sig.generator.seq1.empty()) {
    os << "seq1: " << describe_sequence(sig.generator.seq1) << "\n";
  }
  if (!sig.generator.seq2.empty()) {
    os << "seq2: " << describe_sequence(sig.generator.seq2) << "\n";
  }
  os << "blocks emitted: " << sig.blocks.size() << "\n";
  os << "horizon: " << sig.horizon << "\n";
  os << "admissible: " << (adm.admissible ? "yes" : "no") << "\n";
  for (const auto& v : adm.violations) {
    os << "  violation at tau=" << v.switch_time << ": " << v.reason << "\n";
  }
  return os.str();
}

inline std::string describe_verification(const DecayEstimate& est,
                                         double lambda, long T, int trials) {
  std::ostringstream os;
  os << "== verification ==\n";
  os << "lambda: " << fmt7(lambda) << "\n";
  os << "horizon: " << T << "\n";
  os << "trials: " << trials << "\n";
  os << "c_hat: " << fmt7(est.c_hat) << "\n";
  os << "lambda_hat: " << fmt7(est.lambda_hat) << "\n";
  os << "satisfied: " << (est.satisfied ? "yes" : "no") << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// CSV emitters and the block-list reader.
// ---------------------------------------------------------------------------

inline std::string fmt_csv(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline void write_signal_csv(std::ostream& os, const SwitchingSignal& sig) {
  os << "t,active_index\n";
  long t = 0;
  for (const auto& b : sig.blocks) {
    for (int s = 0; s < b.dwell; ++s) {
      os << t << "," << b.subsystem << "\n";
      ++t;
    }
  }
}

inline void write_blocks_csv(std::ostream& os, const SwitchingSignal& sig) {
  os << "index,dwell\n";
  for (const auto& b : sig.blocks) {
    os << b.subsystem << "," << b.dwell << "\n";
  }
}

inline SwitchingSignal read_blocks_csv(std::istream& is) {
  SwitchingSignal sig;
  sig.generator.kind = SignalKind::external;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "index,dwell") continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("blocks csv: line " + std::to_string(lineno) +
                                  ": expected 'index,dwell'");
    }
    try {
      int idx = std::stoi(line.substr(0, comma));
      int dwell = std::stoi(line.substr(comma + 1));
      if (dwell <= 0) throw std::invalid_argument("dwell must be positive");
      sig.blocks.push_back({idx, dwell});
      sig.horizon += dwell;
    } catch (const std::exception& e) {
      throw std::invalid_argument("blocks csv: line " + std::to_string(lineno) +
                                  ": " + e.what());
    }
  }
  if (sig.blocks.empty()) {
    throw std::invalid_argument("blocks csv: no blocks");
  }
  return sig;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,norm_x\n";
  for (size_t t = 0; t < traj.norms.size(); ++t) {
    os << t << "," << fmt_csv(traj.norms[t]) << "\n";
  }
}

inline void write_prefix_norms_csv(
    std::ostream& os, const std::vector<std::pair<long, double>>& norms) {
  os << "t,prefix_norm\n";
  for (const auto& [t, norm] : norms) {
    os << t << "," << fmt_csv(norm) << "\n";
  }
}

}  // namespace switchcert
