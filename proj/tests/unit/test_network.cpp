#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "oltd/channel.hpp"
#include "oltd/modem.hpp"
#include "oltd/network.hpp"
#include "oltd/rng.hpp"
#include "oracles.hpp"

namespace oltd {
namespace {

using testing::TestRng;

TEST(Featurize, ComplexAndReal) {
  EXPECT_EQ(featurize(Sample{1.0, 2.0}), (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(featurize(3.0), (std::vector<double>{3.0}));
  EXPECT_EQ(featurize(Sample{3.0, 0.0}, 1), (std::vector<double>{3.0}));
}

TEST(Forward, ZeroWeightsGiveUniform) {
  const Mlp m(2, 5, 8);
  const auto p = forward(m, std::vector<double>{0.3, -1.2});
  for (double v : p) EXPECT_DOUBLE_EQ(v, 1.0 / 8.0);
  EXPECT_THROW(forward(m, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Forward, SumsToOne) {
  TestRng rng(1);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    const Mlp m = Mlp::glorot(2, 7, 5, rng());
    const auto p = forward(m, std::vector<double>{g(rng), g(rng)});
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(Loss, UniformOutputIsLogC) {
  const Mlp m(2, 4, 8);
  RowMatrix x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  const std::vector<int> y{0, 3, 7};
  EXPECT_NEAR(loss_and_grad(m, x, y).loss, std::log(8.0), 1e-12);
  EXPECT_NEAR(mean_loss(m, x, y), 2.0794, 1e-4);
}

TEST(Loss, ConfidentCorrectPredictionNearZero) {
  Mlp m(1, 1, 2);
  m.w1()(0, 0) = 0.0;
  m.b2()(1) = 40.0;
  RowMatrix x(1, 1);
  x << 0.0;
  EXPECT_LT(mean_loss(m, x, std::vector<int>{1}), 1e-15);
  EXPECT_THROW(mean_loss(m, x, std::vector<int>{2}), std::invalid_argument);
}

TEST(Gradient, MatchesFiniteDifferences) {
  TestRng rng(77);
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_int_distribution<int> hid(1, 12);
  std::uniform_int_distribution<int> cls(2, 9);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = dim(rng);
    const int h = hid(rng);
    const int c = cls(rng);
    Mlp m = Mlp::glorot(d, h, c, rng());
    for (auto& p : m.params()) p += 0.1 * g(rng);
    const int n = 1 + static_cast<int>(rng() % 10);
    RowMatrix x(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) x(i, j) = 2.0 * g(rng);
    }
    std::vector<int> y(static_cast<std::size_t>(n));
    for (auto& v : y) v = static_cast<int>(rng() % static_cast<std::uint64_t>(c));
    const auto an = loss_and_grad(m, x, y);
    EXPECT_NEAR(an.loss, mean_loss(m, x, y), 1e-12);
    const auto fd = testing::finite_difference_grad(m, x, y, 1e-5);
    // per layer: ||g - fd|| / max(||g||, ||fd||)
    const std::size_t bounds[] = {0, static_cast<std::size_t>(d * h), static_cast<std::size_t>(d * h + h),
                                  static_cast<std::size_t>(d * h + h + h * c), m.param_count()};
    for (int layer = 0; layer < 4; ++layer) {
      double diff = 0.0;
      double na = 0.0;
      double nf = 0.0;
      for (std::size_t i = bounds[layer]; i < bounds[layer + 1]; ++i) {
        diff += std::pow(an.grad[i] - fd[i], 2);
        na += an.grad[i] * an.grad[i];
        nf += fd[i] * fd[i];
      }
      const double scale = std::max(std::sqrt(std::max(na, nf)), 1e-10);
      EXPECT_LT(std::sqrt(diff) / scale, 1e-4) << "rep " << rep << " layer " << layer;
    }
  }
}

TEST(Adamax, ZeroGradientLeavesParameters) {
  std::vector<double> p{1.0, -2.0, 3.0};
  const auto before = p;
  AdamaxState st(3);
  adamax_step(st, p, std::vector<double>(3, 0.0), TrainConfig{});
  EXPECT_EQ(p, before);
  EXPECT_EQ(st.t, 1);
}

TEST(Adamax, FirstStepMovesByLr) {
  std::vector<double> p{0.5};
  AdamaxState st(1);
  TrainConfig cfg;
  cfg.lr = 0.01;
  adamax_step(st, p, std::vector<double>{1.0}, cfg);
  EXPECT_NEAR(p[0], 0.49, 1e-15);
}

TEST(Adamax, MatchesReferenceRecurrence) {
  TrainConfig cfg;
  std::vector<double> p{0.2, -0.4};
  AdamaxState st(2);
  double m[2] = {0, 0};
  double u[2] = {0, 0};
  double ref[2] = {0.2, -0.4};
  const double grads[3][2] = {{0.5, -1.0}, {0.1, 0.0}, {-2.0, 0.3}};
  for (int t = 1; t <= 3; ++t) {
    adamax_step(st, p, std::vector<double>{grads[t - 1][0], grads[t - 1][1]}, cfg);
    for (int i = 0; i < 2; ++i) {
      m[i] = cfg.beta1 * m[i] + (1 - cfg.beta1) * grads[t - 1][i];
      u[i] = std::max(cfg.beta2 * u[i], std::abs(grads[t - 1][i]));
      ref[i] -= cfg.lr / (1 - std::pow(cfg.beta1, t)) * m[i] / std::max(u[i], cfg.eps);
      EXPECT_NEAR(p[static_cast<std::size_t>(i)], ref[i], 1e-15);
    }
  }
}

TEST(Mlp, GlorotRangeAndSeeding) {
  const Mlp a = Mlp::glorot(2, 100, 16, 9);
  const Mlp b = Mlp::glorot(2, 100, 16, 9);
  EXPECT_TRUE(std::equal(a.params().begin(), a.params().end(), b.params().begin()));
  const double l1 = std::sqrt(6.0 / 102.0);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 100; ++j) EXPECT_LE(std::abs(a.w1()(i, j)), l1);
  }
  EXPECT_EQ(a.b1().norm(), 0.0);
  EXPECT_EQ(a.param_count(), 2U * 100 + 100 + 100 * 16 + 16);
}

TEST(Mlp, JsonRoundTrip) {
  const Mlp a = Mlp::glorot(2, 6, 4, 5);
  const Mlp b = Mlp::from_json(a.to_json());
  EXPECT_EQ(b.hidden(), 6);
  EXPECT_TRUE(std::equal(a.params().begin(), a.params().end(), b.params().begin()));
  EXPECT_THROW(Mlp::from_json("{\"input_dim\": 2}"), std::invalid_argument);
}

struct Pilot {
  Trellis trellis;
  SampleSeq y;
  std::vector<int> branches;
};

Pilot noiseless_separated_pilot(std::size_t n, std::uint64_t seed) {
  // 8 outputs on a circle of radius 2: neighbours are >= 1.5 apart
  std::vector<Transition> ts;
  for (int s = 0; s < 4; ++s) {
    for (int u = 0; u < 2; ++u) {
      const int t = s * 2 + u;
      ts.push_back({s, (s * 2 + u) % 4, u, std::polar(2.0, t * std::numbers::pi / 4), 0});
    }
  }
  Pilot p{Trellis(4, 2, 1, ts), {}, {}};
  Rng rng(seed);
  std::vector<int> in(n);
  for (auto& b : in) b = static_cast<int>(rng() & 1U);
  p.branches = p.trellis.walk(in, 0);
  for (int b : p.branches) p.y.push_back(p.trellis.branch(b).ref_output);
  return p;
}

TEST(Train, LossDecreasesAndNoiselessAccuracy) {
  const Pilot pilot = noiseless_separated_pilot(500, 1);
  TrainConfig cfg;
  cfg.seed = 3;
  const auto r = train_oltd(pilot.y, pilot.branches, pilot.trellis, cfg);
  EXPECT_LT(r.final_loss, r.initial_loss);

  const Pilot payload = noiseless_separated_pilot(2000, 2);
  const auto lik = predict_likelihoods(r.mlp, payload.y);
  EXPECT_TRUE(lik.rows_normalized(1e-9));
  int correct = 0;
  for (std::size_t k = 0; k < lik.rows(); ++k) {
    const auto row = lik.row(k);
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    correct += best == payload.branches[k];
  }
  EXPECT_GE(correct, static_cast<int>(0.99 * 2000));
}

TEST(Train, DeterministicInSeed) {
  const Pilot pilot = noiseless_separated_pilot(64, 4);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 10;
  const auto a = train_oltd(pilot.y, pilot.branches, pilot.trellis, cfg);
  const auto b = train_oltd(pilot.y, pilot.branches, pilot.trellis, cfg);
  EXPECT_TRUE(std::equal(a.mlp.params().begin(), a.mlp.params().end(), b.mlp.params().begin()));
}

TEST(Train, ShortPilotThrows) {
  const Pilot pilot = noiseless_separated_pilot(10, 4);
  EXPECT_THROW(train_oltd(pilot.y, pilot.branches, pilot.trellis, TrainConfig{}), std::invalid_argument);
}

TEST(Predict, StatelessPerSample) {
  const Mlp m = Mlp::glorot(2, 8, 8, 1);
  const SampleSeq y{{0.1, 0.2}, {-1.0, 0.5}, {2.0, -2.0}};
  const SampleSeq rev{y[2], y[1], y[0]};
  const auto a = predict_likelihoods(m, y);
  const auto b = predict_likelihoods(m, rev);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t t = 0; t < 8; ++t) EXPECT_EQ(a(k, t), b(2 - k, t));
  }
  const auto single = forward(m, featurize(y[1]));
  for (std::size_t t = 0; t < 8; ++t) EXPECT_NEAR(a(1, t), single[t], 1e-14);
}

TEST(Predict, LlrSignsAgreeWithModelAtTenDb) {
  const auto pts = constellation(LinearScheme::QpskGray);
  std::int64_t agree = 0;
  std::int64_t total = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng(static_cast<std::uint64_t>(500 + trial));
    const auto h = exp_profile(std::uniform_real_distribution<double>(0.1, 1.0)(rng), 2);
    const std::vector<Sample> taps{h[0], h[1]};
    const Trellis tr = build_isi_trellis(taps, pts);
    Bits b(2 * (500 + 1000));
    for (auto& v : b) v = static_cast<Bit>(rng() & 1U);
    ChannelRealization ch;
    ch.taps = taps;
    ch.noise_param = snr_to_sigma(10.0);
    const std::vector<Sample> hist{pts[0]};
    const auto y = apply_channel(map_linear(b, LinearScheme::QpskGray), ch, rng, hist);
    const auto branches = tr.walk(bits_to_labels(b, 2), 0);
    const SampleSeq pilot(y.begin(), y.begin() + 500);
    const SampleSeq payload(y.begin() + 500, y.end());
    TrainConfig cfg;
    cfg.seed = rng();
    const auto net = train_oltd(pilot, std::span<const int>(branches).first(500), tr, cfg);
    const auto lo = bcjr_detect(predict_likelihoods(net.mlp, payload), PriorTable::uniform(1000, tr), tr);
    const auto lm = bcjr_detect(gaussian_likelihoods(payload, tr, ch.noise_param), PriorTable::uniform(1000, tr), tr);
    for (std::size_t i = 0; i < lo.size(); ++i) agree += (lo[i] >= 0) == (lm[i] >= 0);
    total += static_cast<std::int64_t>(lo.size());
  }
  EXPECT_GE(static_cast<double>(agree) / static_cast<double>(total), 0.99);
}

}  // namespace
}  // namespace oltd
