#pragma once

#include <string>
#include <vector>

#include "switchcert/certificates.hpp"
#include "switchcert/system.hpp"

namespace switchcert {

/// One constant stretch of the switching signal.
struct Block {
  int subsystem = 0;
  int dwell = 0;

  bool operator==(const Block& rhs) const {
    return subsystem == rhs.subsystem && dwell == rhs.dwell;
  }
};

enum class SignalKind { nonperiodic, periodic, external };

inline std::string to_string(SignalKind k) {
  switch (k) {
    case SignalKind::nonperiodic: return "nonperiodic";
    case SignalKind::periodic: return "periodic";
    case SignalKind::external: return "external";
  }
  return "unknown";
}

/// Generator descriptor: the emitted stream is seq1 followed by s copies of
/// seq2 for s = 1, 2, 3, ... (nonperiodic), or seq1 repeated (periodic).
/// Externally loaded signals carry no generator structure.
struct SignalGenerator {
  SignalKind kind = SignalKind::external;
  std::vector<Block> seq1;
  std::vector<Block> seq2;
};

inline long sequence_duration(const std::vector<Block>& seq) {
  long d = 0;
  for (const auto& b : seq) d += b.dwell;
  return d;
}

struct SwitchingSignal {
  std::vector<Block> blocks;
  long horizon = 0;  // steps covered: blocks span [0, horizon)
  SignalGenerator generator;
};

namespace detail {

// One activation sequence for a path pair: j at dwell q, the j->i interior
// at the interior dwell, i at dwell p, the i->j interior likewise. The next
// sequence starts back at j, closing the walk.
inline std::vector<Block> sequence_blocks(const PathPair& pair,
                                          const StableCombination& c,
                                          int interior_dwell) {
  std::vector<Block> seq;
  seq.push_back({c.j, c.q});
  for (int w : pair.to_i.interior()) seq.push_back({w, interior_dwell});
  seq.push_back({c.i, c.p});
  for (int w : pair.to_j.interior()) seq.push_back({w, interior_dwell});
  return seq;
}

// Appends whole blocks while they fit below the horizon; returns false once
// a block no longer fits. Emission stops there, never mid-dwell.
inline bool emit_sequence(const std::vector<Block>& seq, long horizon,
                          std::vector<Block>& out, long& total) {
  for (const auto& b : seq) {
    if (total + b.dwell > horizon) return false;
    out.push_back(b);
    total += b.dwell;
  }
  return true;
}

}  // namespace detail

/// Non-periodic schedule from a two-pair certificate: seq1, then s copies of
/// seq2, s = 1, 2, 3, ... until the horizon. Requires room for at least the
/// first seq1+seq2 super-block.
inline SwitchingSignal synthesize_nonperiodic(const Certificate& cert,
                                              long horizon) {
  if (cert.kind != ResultKind::theorem1 &&
      cert.kind != ResultKind::corollary2a &&
      cert.kind != ResultKind::corollary3a) {
    throw std::invalid_argument(
        "synthesize_nonperiodic: certificate kind " + to_string(cert.kind) +
        " produces a periodic schedule");
  }
  SwitchingSignal sig;
  sig.generator.kind = SignalKind::nonperiodic;
  sig.generator.seq1 =
      detail::sequence_blocks(cert.paths.first, cert.combo, cert.interior_dwell);
  sig.generator.seq2 =
      detail::sequence_blocks(cert.paths.second, cert.combo, cert.interior_dwell);
  const long super_block = sequence_duration(sig.generator.seq1) +
                           sequence_duration(sig.generator.seq2);
  if (horizon < super_block) {
    throw std::invalid_argument(
        "synthesize_nonperiodic: horizon " + std::to_string(horizon) +
        " cannot hold one super-block of " + std::to_string(super_block) +
        " steps");
  }
  long total = 0;
  for (long s = 1;; ++s) {
    if (!detail::emit_sequence(sig.generator.seq1, horizon, sig.blocks, total)) break;
    bool fits = true;
    for (long r = 0; r < s && fits; ++r) {
      fits = detail::emit_sequence(sig.generator.seq2, horizon, sig.blocks, total);
    }
    if (!fits) break;
  }
  sig.horizon = total;
  return sig;
}

/// Periodic schedule from a single-pair certificate: the one activation
/// sequence repeated until the horizon.
inline SwitchingSignal synthesize_periodic(const Certificate& cert,
                                           long horizon) {
  if (cert.kind != ResultKind::corollary1 &&
      cert.kind != ResultKind::corollary2b &&
      cert.kind != ResultKind::corollary3b &&
      cert.kind != ResultKind::corollary4) {
    throw std::invalid_argument(
        "synthesize_periodic: certificate kind " + to_string(cert.kind) +
        " produces a non-periodic schedule");
  }
  SwitchingSignal sig;
  sig.generator.kind = SignalKind::periodic;
  sig.generator.seq1 =
      detail::sequence_blocks(cert.paths.first, cert.combo, cert.interior_dwell);
  const long period = sequence_duration(sig.generator.seq1);
  if (horizon < period) {
    throw std::invalid_argument(
        "synthesize_periodic: horizon " + std::to_string(horizon) +
        " cannot hold one period of " + std::to_string(period) + " steps");
  }
  long total = 0;
  while (detail::emit_sequence(sig.generator.seq1, horizon, sig.blocks, total)) {
  }
  sig.horizon = total;
  return sig;
}

/// Dispatches to the generator matching the certificate kind.
inline SwitchingSignal synthesize_signal(const Certificate& cert, long horizon) {
  switch (cert.kind) {
    case ResultKind::theorem1:
    case ResultKind::corollary2a:
    case ResultKind::corollary3a:
      return synthesize_nonperiodic(cert, horizon);
    default:
      return synthesize_periodic(cert, horizon);
  }
}

/// Subsystem active at step t.
inline int signal_at(const SwitchingSignal& sig, long t) {
  if (t < 0 || t >= sig.horizon) {
    throw std::invalid_argument("signal_at: step " + std::to_string(t) +
                                " outside [0, " + std::to_string(sig.horizon) +
                                ")");
  }
  long pos = 0;
  for (const auto& b : sig.blocks) {
    pos += b.dwell;
    if (t < pos) return b.subsystem;
  }
  throw std::logic_error("signal_at: blocks do not cover the horizon");
}

struct AdmissibilityViolation {
  long switch_time = 0;  // tau_h of the offending block
  std::string reason;
};

struct AdmissibilityReport {
  bool admissible = false;
  std::vector<AdmissibilityViolation> violations;
};

/// Every switch must be a graph edge and every dwell must sit inside the
/// dwell window. Violations carry the switching instant they occur at.
inline AdmissibilityReport check_admissible(const SwitchingSignal& sig,
                                            const SwitchGraph& graph,
                                            const DwellBounds& dwell) {
  AdmissibilityReport rep;
  long tau = 0;
  for (size_t h = 0; h < sig.blocks.size(); ++h) {
    const Block& b = sig.blocks[h];
    if (b.dwell < dwell.min_dwell || b.dwell > dwell.max_dwell) {
      rep.violations.push_back(
          {tau, "dwell " + std::to_string(b.dwell) + " on subsystem " +
                    std::to_string(b.subsystem) + " outside [" +
                    std::to_string(dwell.min_dwell) + "," +
                    std::to_string(dwell.max_dwell) + "]"});
    }
    if (h + 1 < sig.blocks.size()) {
      int from = b.subsystem, to = sig.blocks[h + 1].subsystem;
      if (!graph.has_edge(from, to)) {
        rep.violations.push_back(
            {tau + b.dwell, "switch (" + std::to_string(from) + "," +
                                std::to_string(to) + ") is not an admissible edge"});
      }
    }
    tau += b.dwell;
  }
  rep.admissible = rep.violations.empty();
  return rep;
}

}  // namespace switchcert
