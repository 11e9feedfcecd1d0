#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "oltd/channel.hpp"
#include "oltd/rng.hpp"

namespace oltd {
namespace {

TEST(ExpProfile, UniformWhenGammaZero) {
  const auto h = exp_profile(0.0, 2);
  EXPECT_NEAR(h[0], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(h[1], 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(ExpProfile, GammaOne) {
  // closed form sqrt(1 / (1 + e^-1)), sqrt(e^-1 / (1 + e^-1))
  const auto h = exp_profile(1.0, 2);
  EXPECT_NEAR(h[0], std::sqrt(1.0 / (1.0 + std::exp(-1.0))), 1e-12);
  EXPECT_NEAR(h[1], std::sqrt(std::exp(-1.0) / (1.0 + std::exp(-1.0))), 1e-12);
  EXPECT_NEAR(h[0], 0.8550, 1e-3);
  EXPECT_NEAR(h[1], 0.5186, 1e-3);
}

TEST(ExpProfile, UnitEnergy) {
  for (double g : {0.0, 0.1, 0.5, 1.0, 3.0}) {
    for (std::size_t l = 1; l <= 6; ++l) {
      double e = 0.0;
      for (double v : exp_profile(g, l)) e += v * v;
      EXPECT_NEAR(e, 1.0, 1e-12);
    }
  }
}

TEST(ExpProfile, Errors) {
  EXPECT_THROW(exp_profile(1.0, 0), std::invalid_argument);
  EXPECT_THROW(exp_profile(-0.5, 2), std::invalid_argument);
}

TEST(Convolve, HistoryAndTaps) {
  const SampleSeq x{1.0, 2.0, 3.0};
  const std::vector<Sample> h{1.0, 0.5};
  const std::vector<Sample> hist{4.0};
  const auto v = convolve(x, h, hist);
  EXPECT_EQ(v[0], Sample(3.0));
  EXPECT_EQ(v[1], Sample(2.5));
  EXPECT_EQ(v[2], Sample(4.0));
  const auto v0 = convolve(x, h);
  EXPECT_EQ(v0[0], Sample(1.0));
}

TEST(Snr, Definitions) {
  EXPECT_NEAR(std::pow(snr_to_sigma(0.0), 2), 0.5, 1e-15);
  EXPECT_NEAR(2.0 * std::pow(snr_to_sigma(10.0), 2), 0.1, 1e-15);
  EXPECT_EQ(snr_to_sigma(std::numeric_limits<double>::infinity()), 0.0);
  EXPECT_LT(snr_to_sigma(200.0), 1e-9);
}

TEST(Noise, NoiselessGaussianIsExact) {
  Rng rng(1);
  ChannelRealization ch;
  ch.taps = {0.6, 0.8};
  ch.noise_param = 0.0;
  const SampleSeq x{1.0, -1.0, Sample(0, 1)};
  EXPECT_EQ(apply_channel(x, ch, rng), convolve(x, ch.taps));
}

TEST(Noise, GaussianVariance) {
  Rng rng(2);
  ChannelRealization ch;
  ch.noise_param = 0.3;
  const SampleSeq v(1000000, Sample{});
  const auto y = add_noise(v, ch, rng);
  double re = 0.0;
  double im = 0.0;
  for (const auto& s : y) {
    re += s.real() * s.real();
    im += s.imag() * s.imag();
  }
  const double n = static_cast<double>(y.size());
  EXPECT_NEAR(re / n / 0.09, 1.0, 0.02);
  EXPECT_NEAR(im / n / 0.09, 1.0, 0.02);
}

TEST(Noise, PoissonMean) {
  Rng rng(3);
  ChannelRealization ch;
  ch.noise_kind = NoiseKind::Poisson;
  const SampleSeq v(1000000, Sample{2.5, 0.0});
  const auto y = add_noise(v, ch, rng);
  double sum = 0.0;
  for (const auto& s : y) {
    EXPECT_EQ(s.imag(), 0.0);
    EXPECT_EQ(s.real(), std::floor(s.real()));
    sum += s.real();
  }
  EXPECT_NEAR(sum / static_cast<double>(y.size()) / 3.5, 1.0, 0.01);
}

TEST(Noise, PoissonRejectsBadIntensity) {
  Rng rng(4);
  ChannelRealization ch;
  ch.noise_kind = NoiseKind::Poisson;
  EXPECT_THROW(add_noise(SampleSeq{Sample{-1.0, 0.0}}, ch, rng), std::invalid_argument);
  EXPECT_THROW(add_noise(SampleSeq{Sample{1.0, 0.5}}, ch, rng), std::invalid_argument);
}

TEST(Noise, CauchyMedianIsZero) {
  Rng rng(5);
  ChannelRealization ch;
  ch.noise_kind = NoiseKind::Cauchy;
  ch.noise_param = 0.7;
  const SampleSeq v(200001, Sample{});
  const auto y = add_noise(v, ch, rng);
  std::vector<double> re;
  std::vector<double> im;
  for (const auto& s : y) {
    re.push_back(s.real());
    im.push_back(s.imag());
  }
  // 1% quantile tolerance: the median lies between the 49% and 51% quantiles
  // of the true distribution, lambda * tan(pi * (q - 0.5)).
  const double tol = 0.7 * std::tan(std::numbers::pi * 0.01);
  for (auto* c : {&re, &im}) {
    auto mid = c->begin() + static_cast<std::ptrdiff_t>(c->size() / 2);
    std::nth_element(c->begin(), mid, c->end());
    EXPECT_LT(std::abs(*mid), tol);
  }
}

TEST(Noise, Pam4InterfererAtZeroDbHasUnitPower) {
  Rng rng(6);
  ChannelRealization ch;
  ch.noise_kind = NoiseKind::GaussianPam4;
  ch.noise_param = 0.0;
  ch.sir_db = 0.0;
  const SampleSeq v(400000, Sample{});
  const auto y = add_noise(v, ch, rng);
  double p = 0.0;
  for (const auto& s : y) {
    p += std::norm(s);
    const double lvl = s.real() * std::sqrt(5.0);
    EXPECT_NEAR(lvl, std::round(lvl), 1e-9);
  }
  EXPECT_NEAR(p / static_cast<double>(y.size()), 1.0, 0.01);
  double levels = 0.0;
  for (int i = 0; i < 4; ++i) levels += pam4_level(i) * pam4_level(i);
  EXPECT_NEAR(levels / 4.0, 1.0, 1e-12);
}

TEST(Seeds, ChildSeedsDifferAndRepeat) {
  EXPECT_EQ(child_seed(1, "qpsk-awgn", 3), child_seed(1, "qpsk-awgn", 3));
  EXPECT_NE(child_seed(1, "qpsk-awgn", 3), child_seed(1, "qpsk-awgn", 4));
  EXPECT_NE(child_seed(1, "qpsk-awgn", 3), child_seed(1, "ble-awgn", 3));
  EXPECT_NE(child_seed(1, "qpsk-awgn", 3), child_seed(2, "qpsk-awgn", 3));
  EXPECT_NE(substream(9, 11), substream(9, 12));
}

}  // namespace
}  // namespace oltd
