#include <catch2/catch_amalgamated.hpp>

#include "switchcert/signal.hpp"
#include "test_helpers.hpp"

using namespace switchcert;
using Catch::Approx;

namespace {

Certificate handmade_certificate(ResultKind kind, int i, int j, int p, int q,
                                 int interior_dwell, PathPair first,
                                 PathPair second) {
  Certificate cert;
  cert.kind = kind;
  cert.combo.i = i;
  cert.combo.j = j;
  cert.combo.p = p;
  cert.combo.q = q;
  cert.combo.combo = Matrix::identity(2);
  cert.combo.m = 1;
  cert.combo.rho = 0.5;
  cert.combo.mbar = 1;
  cert.paths = {std::move(first), std::move(second)};
  cert.lambda = 1e-4;
  cert.lambda_max = 1e-3;
  cert.interior_dwell = interior_dwell;
  return cert;
}

Certificate reference_certificate() {
  auto inst = testutil::reference_instance();
  auto res = search_certificate(inst);
  REQUIRE(res.certificate.has_value());
  return *res.certificate;
}

std::vector<int> block_indices(const SwitchingSignal& sig) {
  std::vector<int> out;
  for (const auto& b : sig.blocks) out.push_back(b.subsystem);
  return out;
}

// The reference block pattern for the reference instance: 3,2,1,2 then
// s copies of 3,4,1,2 for s = 1, 2, 3, ..., every dwell 2 steps.
std::vector<Block> reference_pattern(size_t count) {
  const std::vector<int> seq1{3, 2, 1, 2};
  const std::vector<int> seq2{3, 4, 1, 2};
  std::vector<Block> out;
  for (int s = 1; out.size() < count; ++s) {
    for (int v : seq1) out.push_back({v, 2});
    for (int r = 0; r < s; ++r) {
      for (int v : seq2) out.push_back({v, 2});
    }
  }
  out.resize(count);
  return out;
}

}  // namespace

TEST_CASE("non-periodic synthesis reproduces the reference schedule") {
  Certificate cert = reference_certificate();
  SwitchingSignal sig = synthesize_nonperiodic(cert, 500);
  CHECK(sig.horizon == 500);
  CHECK(sig.blocks.size() == 250);
  CHECK(sig.generator.kind == SignalKind::nonperiodic);
  CHECK(block_indices(sig)[0] == 3);

  auto expected = reference_pattern(60);
  REQUIRE(sig.blocks.size() >= 60);
  for (size_t k = 0; k < 60; ++k) {
    CHECK(sig.blocks[k] == expected[k]);
  }
}

TEST_CASE("non-periodic synthesis follows the growing-repeat schedule") {
  // j = 7, i = 8, detours through 3 / 4,5 outbound and 1,2 / 6 back
  PathPair first{Path({7, 3, 8}), Path({8, 1, 2, 7})};
  PathPair second{Path({7, 4, 5, 8}), Path({8, 6, 7})};
  Certificate cert = handmade_certificate(ResultKind::theorem1, 8, 7, 2, 2, 2,
                                          first, second);
  SwitchingSignal sig = synthesize_nonperiodic(cert, 2 * 25);
  std::vector<int> expected{7, 3, 8, 1, 2, 7, 4, 5, 8, 6,
                            7, 3, 8, 1, 2, 7, 4, 5, 8, 6, 7, 4, 5, 8, 6};
  CHECK(block_indices(sig) == expected);
  for (const auto& b : sig.blocks) CHECK(b.dwell == 2);
}

TEST_CASE("non-periodic synthesis with direct returns") {
  // forward-restricted certificates reuse the growing-repeat schedule with
  // no interior on the way back
  PathPair first{Path({2, 3, 1}), Path({1, 2})};
  PathPair second{Path({2, 4, 1}), Path({1, 2})};
  Certificate cert = handmade_certificate(ResultKind::corollary2a, 1, 2, 2, 2, 1,
                                          first, second);
  SwitchingSignal sig = synthesize_nonperiodic(cert, 25);
  std::vector<int> expected{2, 3, 1, 2, 4, 1, 2, 3, 1, 2, 4, 1, 2, 4, 1};
  CHECK(block_indices(sig) == expected);
  CHECK(sig.blocks[0].dwell == 2);   // dwell q on j
  CHECK(sig.blocks[1].dwell == 1);   // interior dwell
  CHECK(sig.blocks[2].dwell == 2);   // dwell p on i
}

TEST_CASE("periodic synthesis repeats one activation sequence") {
  PathPair pair{Path({3, 2, 1, 4}), Path({4, 1, 3})};
  Certificate cert =
      handmade_certificate(ResultKind::corollary1, 4, 3, 1, 1, 1, pair, pair);
  SwitchingSignal sig = synthesize_periodic(cert, 15);
  std::vector<int> expected{3, 2, 1, 4, 1, 3, 2, 1, 4, 1, 3, 2, 1, 4, 1};
  CHECK(block_indices(sig) == expected);
  CHECK(sig.generator.kind == SignalKind::periodic);
}

TEST_CASE("degenerate pairs make both generators agree") {
  PathPair pair{Path({3, 2, 1}), Path({1, 2, 3})};
  Certificate nonper = handmade_certificate(ResultKind::theorem1, 1, 3, 2, 2, 2,
                                            pair, pair);
  Certificate per =
      handmade_certificate(ResultKind::corollary1, 1, 3, 2, 2, 2, pair, pair);
  SwitchingSignal a = synthesize_nonperiodic(nonper, 64);
  SwitchingSignal b = synthesize_periodic(per, 64);
  CHECK(a.blocks.size() == b.blocks.size());
  for (size_t k = 0; k < a.blocks.size(); ++k) CHECK(a.blocks[k] == b.blocks[k]);
}

TEST_CASE("unrestricted-switching certificates alternate the two subsystems") {
  PathPair direct{Path({3, 1}), Path({1, 3})};
  Certificate cert =
      handmade_certificate(ResultKind::corollary4, 1, 3, 2, 3, 2, direct, direct);
  SwitchingSignal sig = synthesize_periodic(cert, 5);  // p + q exactly
  REQUIRE(sig.blocks.size() == 2);
  CHECK(sig.blocks[0] == Block{3, 3});
  CHECK(sig.blocks[1] == Block{1, 2});
}

TEST_CASE("synthesis refuses horizons below one construction unit") {
  Certificate cert = reference_certificate();
  CHECK_THROWS_AS(synthesize_nonperiodic(cert, 15), std::invalid_argument);

  PathPair pair{Path({3, 2, 1}), Path({1, 2, 3})};
  Certificate per =
      handmade_certificate(ResultKind::corollary1, 1, 3, 2, 2, 2, pair, pair);
  CHECK_THROWS_AS(synthesize_periodic(per, 7), std::invalid_argument);
  CHECK_THROWS_AS(synthesize_nonperiodic(per, 64), std::invalid_argument);
  CHECK_THROWS_AS(synthesize_periodic(cert, 64), std::invalid_argument);
}

TEST_CASE("signal lookup by step") {
  Certificate cert = reference_certificate();
  SwitchingSignal sig = synthesize_nonperiodic(cert, 500);
  CHECK(signal_at(sig, 0) == 3);
  CHECK(signal_at(sig, 1) == 3);
  CHECK(signal_at(sig, 2) == 2);
  CHECK(signal_at(sig, 499) >= 1);
  CHECK_THROWS_AS(signal_at(sig, 500), std::invalid_argument);
  CHECK_THROWS_AS(signal_at(sig, -1), std::invalid_argument);
}

TEST_CASE("admissibility of synthesized signals") {
  auto inst = testutil::reference_instance();
  Certificate cert = reference_certificate();
  SwitchingSignal sig = synthesize_nonperiodic(cert, 500);
  auto rep = check_admissible(sig, inst.graph, inst.dwell);
  CHECK(rep.admissible);
  CHECK(rep.violations.empty());
}

TEST_CASE("admissibility flags short dwells and missing edges") {
  auto inst = testutil::reference_instance();
  Certificate cert = reference_certificate();
  SwitchingSignal sig = synthesize_nonperiodic(cert, 64);

  SwitchingSignal short_dwell = sig;
  short_dwell.blocks[3].dwell = 1;
  auto rep = check_admissible(short_dwell, inst.graph, inst.dwell);
  CHECK_FALSE(rep.admissible);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].switch_time == 6);
  CHECK(rep.violations[0].reason.find("dwell") != std::string::npos);

  SwitchingSignal bad_switch = sig;
  bad_switch.blocks.insert(bad_switch.blocks.begin() + 1, Block{3, 2});
  // now blocks run 3,3,2,...: the 3 -> 3 self switch has no edge
  auto rep2 = check_admissible(bad_switch, inst.graph, inst.dwell);
  CHECK_FALSE(rep2.admissible);
  bool found = false;
  for (const auto& v : rep2.violations) {
    if (v.reason.find("(3,3)") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_CASE("super-block bookkeeping of the non-periodic schedule") {
  Certificate cert = reference_certificate();
  // exactly k super-blocks: durations 16, 24, 32, ...
  for (int k = 1; k <= 5; ++k) {
    long horizon = 0;
    for (int s = 1; s <= k; ++s) horizon += 8 * (1 + s);
    SwitchingSignal sig = synthesize_nonperiodic(cert, horizon);
    CHECK(sig.horizon == horizon);

    // sequences are 4 blocks; the second block tells seq1 (2) from seq2 (4)
    long seq1_count = 0, seq2_count = 0;
    REQUIRE(sig.blocks.size() % 4 == 0);
    for (size_t r = 0; r < sig.blocks.size(); r += 4) {
      (sig.blocks[r + 1].subsystem == 2 ? seq1_count : seq2_count) += 1;
    }
    CHECK(seq1_count == k);
    CHECK(seq2_count == k * (k + 1) / 2);
  }
}

TEST_CASE("leading sequences accrue the combination powers staircase-style") {
  Certificate cert = reference_certificate();
  SwitchingSignal sig = synthesize_nonperiodic(cert, 8 * (6 + 6 * 7 / 2));

  for (int m = 1; m <= 14; ++m) {
    long mbar = mbar_of(m);
    // split the stream into 4-block sequences, take the first m
    long seq1_count = 0, dwell_i = 0, dwell_j = 0, duration = 0;
    for (int r = 0; r < m; ++r) {
      size_t base = static_cast<size_t>(r) * 4;
      REQUIRE(sig.blocks.size() >= base + 4);
      if (sig.blocks[base + 1].subsystem == 2) ++seq1_count;
      for (size_t s = base; s < base + 4; ++s) {
        const Block& b = sig.blocks[s];
        duration += b.dwell;
        if (b.subsystem == cert.combo.i && b.dwell == cert.combo.p) ++dwell_i;
        if (b.subsystem == cert.combo.j && b.dwell == cert.combo.q) ++dwell_j;
      }
    }
    CHECK(seq1_count == mbar);

    StableCombination scaled = cert.combo;
    scaled.m = m;
    scaled.mbar = static_cast<int>(mbar);
    auto x = theorem_exponents(cert.paths, scaled, cert.interior_dwell);
    CHECK(duration == x.window1 + x.window2);
    CHECK(dwell_i == m);
    CHECK(dwell_j == m);
  }
}
