#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oltd/channel.hpp"
#include "oltd/fec.hpp"
#include "oltd/modem.hpp"
#include "oltd/trellis.hpp"

namespace oltd {
namespace {

using std::numbers::pi;

const std::vector<Sample> kBpsk{{-1.0, 0.0}, {1.0, 0.0}};

TEST(IsiTrellis, ThreeTapBpskMatchesFigureTwo) {
  const std::vector<Sample> h{0.407, 0.815, 0.407};
  const Trellis tr = build_isi_trellis(h, kBpsk);
  EXPECT_EQ(tr.num_states(), 4);
  EXPECT_EQ(tr.branch_count(), 8);
  // state 0 is the history (-1, -1)
  EXPECT_NEAR(tr.branch(tr.branch_index(0, 0)).ref_output.real(), -1.629, 1e-12);
  EXPECT_NEAR(tr.branch(tr.branch_index(0, 1)).ref_output.real(), -0.815, 1e-12);
}

TEST(IsiTrellis, SingleTapIsMemoryless) {
  const std::vector<Sample> h{1.0};
  const Trellis tr = build_isi_trellis(h, kBpsk);
  EXPECT_EQ(tr.num_states(), 1);
  EXPECT_EQ(tr.branch_count(), 2);
  EXPECT_EQ(tr.branch(0).ref_output, Sample(-1.0));
  EXPECT_EQ(tr.branch(1).ref_output, Sample(1.0));
}

TEST(IsiTrellis, ZeroSecondTapOutputsCurrentSymbol) {
  const auto qpsk = constellation(LinearScheme::QpskGray);
  const std::vector<Sample> h{1.0, 0.0};
  const Trellis tr = build_isi_trellis(h, qpsk);
  EXPECT_EQ(tr.num_states(), 4);
  EXPECT_EQ(tr.branch_count(), 16);
  for (const auto& t : tr.transitions()) EXPECT_EQ(t.ref_output, qpsk[static_cast<std::size_t>(t.input)]);
}

TEST(IsiTrellis, RejectsEmptyInputs) {
  const std::vector<Sample> none;
  const std::vector<Sample> h{1.0};
  EXPECT_THROW(build_isi_trellis(none, kBpsk), std::invalid_argument);
  EXPECT_THROW(build_isi_trellis(h, none), std::invalid_argument);
}

TEST(IsiTrellis, WalkReproducesConvolution) {
  std::mt19937_64 rng(7);
  const auto qpsk = constellation(LinearScheme::QpskGray);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int len = 1; len <= 4; ++len) {
    std::vector<Sample> h(static_cast<std::size_t>(len));
    for (auto& v : h) v = {g(rng), g(rng)};
    const Trellis tr = build_isi_trellis(h, qpsk);
    std::uniform_int_distribution<int> pick(0, 3);
    std::vector<int> labels(200);
    for (auto& l : labels) l = pick(rng);
    SampleSeq x;
    for (int l : labels) x.push_back(qpsk[static_cast<std::size_t>(l)]);
    const std::vector<Sample> history(static_cast<std::size_t>(len - 1), qpsk[0]);
    const SampleSeq v = convolve(x, h, history);
    const auto branches = tr.walk(labels, 0);
    for (std::size_t k = 0; k < x.size(); ++k) EXPECT_EQ(tr.branch(branches[k]).ref_output, v[k]);
  }
}

TEST(Trellis, BinaryTrellisesHaveFanInTwo) {
  const std::vector<Sample> h{0.5, 0.3, 0.2};
  for (const Trellis& tr : {build_isi_trellis(h, kBpsk), build_gfsk_trellis(), ble_code_trellis()}) {
    std::vector<int> in(static_cast<std::size_t>(tr.num_states()), 0);
    std::vector<int> out(static_cast<std::size_t>(tr.num_states()), 0);
    for (const auto& t : tr.transitions()) {
      ++out[static_cast<std::size_t>(t.from)];
      ++in[static_cast<std::size_t>(t.to)];
    }
    for (int s = 0; s < tr.num_states(); ++s) {
      EXPECT_EQ(out[static_cast<std::size_t>(s)], 2);
      EXPECT_EQ(in[static_cast<std::size_t>(s)], 2);
    }
  }
}

TEST(GfskTrellis, PhaseRecursion) {
  const Trellis tr = build_gfsk_trellis();
  EXPECT_EQ(tr.num_states(), 4);
  EXPECT_EQ(tr.branch_count(), 8);
  const auto& up = tr.branch(tr.branch_index(0, 1));  // theta = 0, I = +1
  EXPECT_NEAR(std::abs(up.ref_output - std::polar(1.0, pi / 4)), 0.0, 1e-12);
  EXPECT_EQ(up.to, 1);
  for (const auto& t : tr.transitions()) EXPECT_NEAR(std::abs(t.ref_output), 1.0, 1e-12);
}

TEST(GfskTrellis, WalkTracksCumulativePhase) {
  const Trellis tr = build_gfsk_trellis();
  for (int len = 1; len <= 20; ++len) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(len));
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<int> in(static_cast<std::size_t>(len));
      for (auto& b : in) b = static_cast<int>(rng() & 1U);
      const auto br = tr.walk(in, 0);
      int sum = 0;
      for (std::size_t k = 0; k < in.size(); ++k) {
        sum += in[k] ? 1 : -1;
        const int expect = ((sum % 4) + 4) % 4;
        EXPECT_EQ(tr.branch(br[k]).to, expect);
      }
    }
  }
}

TEST(CcTrellis, BlePolynomials) {
  const Trellis tr = build_cc_trellis(std::vector<int>{1, 1, 1, 1}, std::vector<int>{1, 0, 1, 1});
  EXPECT_EQ(tr.num_states(), 8);
  EXPECT_EQ(tr.branch_count(), 16);
  const auto& zero = tr.branch(tr.branch_index(0, 0));
  EXPECT_EQ(zero.code_bits, 0U);
  EXPECT_EQ(zero.to, 0);
  const auto& one = tr.branch(tr.branch_index(0, 1));
  EXPECT_EQ(tr.code_bit(tr.branch_index(0, 1), 0), 1);
  EXPECT_EQ(tr.code_bit(tr.branch_index(0, 1), 1), 1);
  EXPECT_NE(one.to, 0);
}

TEST(CcTrellis, MismatchedMemoryThrows) {
  EXPECT_THROW(build_cc_trellis(std::vector<int>{1, 1, 1}, std::vector<int>{1, 0, 1, 1}), std::invalid_argument);
}

TEST(GfskIsiTrellis, ShapeAndDegenerateTap) {
  const std::vector<Sample> h{1.0, 0.0};
  const Trellis prod = build_gfsk_isi_trellis(h);
  EXPECT_EQ(prod.num_states(), 16);
  EXPECT_EQ(prod.branch_count(), 32);
  const Trellis plain = build_gfsk_trellis();
  for (const auto& t : prod.transitions()) {
    const int phase = t.from % 4;
    EXPECT_NEAR(std::abs(t.ref_output - plain.branch(plain.branch_index(phase, t.input)).ref_output), 0.0, 1e-12);
  }
}

TEST(GfskIsiTrellis, OutputsBoundedAndMatchFilteredModulator) {
  const std::vector<Sample> h{{0.8, 0.1}, {0.3, -0.4}};
  const Trellis tr = build_gfsk_isi_trellis(h);
  const double bound = std::abs(h[0]) + std::abs(h[1]);
  for (const auto& t : tr.transitions()) EXPECT_LE(std::abs(t.ref_output), bound + 1e-12);

  std::mt19937_64 rng(3);
  Bits bits(64);
  for (auto& b : bits) b = static_cast<Bit>(rng() & 1U);
  const SampleSeq x = gfsk_modulate(bits);
  const std::vector<Sample> history{std::polar(1.0, pi / 4)};
  const SampleSeq v = convolve(x, h, history);
  std::vector<int> labels(bits.begin(), bits.end());
  const auto br = tr.walk(labels, 0);
  for (std::size_t k = 0; k < v.size(); ++k) EXPECT_NEAR(std::abs(tr.branch(br[k]).ref_output - v[k]), 0.0, 1e-12);
}

TEST(GfskIsiTrellis, LongerChannelsAreUnsupported) {
  const std::vector<Sample> h{1.0, 0.5, 0.25};
  EXPECT_THROW(build_gfsk_isi_trellis(h), Unsupported);
}

TEST(Trellis, ValidatesTransitionTable) {
  std::vector<Transition> missing{{0, 0, 0, {}, 0}};
  EXPECT_THROW(Trellis(1, 2, 1, missing), std::invalid_argument);
  std::vector<Transition> bad_target{{0, 3, 0, {}, 0}, {0, 0, 1, {}, 0}};
  EXPECT_THROW(Trellis(1, 2, 1, bad_target), std::invalid_argument);
  std::vector<Transition> dup{{0, 0, 0, {}, 0}, {0, 0, 0, {}, 0}};
  EXPECT_THROW(Trellis(1, 2, 1, dup), std::invalid_argument);
}

TEST(Trellis, ScaledMultipliesOutputs) {
  const Trellis tr = build_gfsk_trellis();
  const Sample g{0.0, 2.0};
  const Trellis s = tr.scaled(g);
  for (int b = 0; b < tr.branch_count(); ++b) {
    EXPECT_EQ(s.branch(b).ref_output, g * tr.branch(b).ref_output);
    EXPECT_EQ(s.branch(b).to, tr.branch(b).to);
  }
}

}  // namespace
}  // namespace oltd
