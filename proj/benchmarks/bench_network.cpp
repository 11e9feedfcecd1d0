#include <benchmark/benchmark.h>

#include "oltd/channel.hpp"
#include "oltd/modem.hpp"
#include "oltd/network.hpp"
#include "oltd/rng.hpp"
#include "oltd/trellis.hpp"

namespace {

using namespace oltd;

struct Pilot {
  Trellis trellis;
  SampleSeq y;
  std::vector<int> branches;
};

Pilot qpsk_pilot(std::size_t n) {
  const auto pts = constellation(LinearScheme::QpskGray);
  std::vector<Sample> h;
  for (double v : exp_profile(0.5, 2)) h.emplace_back(v, 0.0);
  Trellis tr = build_isi_trellis(h, pts);
  Rng rng(5);
  std::vector<int> labels(n);
  for (auto& l : labels) l = static_cast<int>(rng() % 4);
  SampleSeq x;
  for (int l : labels) x.push_back(pts[static_cast<std::size_t>(l)]);
  ChannelRealization ch;
  ch.taps = h;
  ch.noise_param = snr_to_sigma(10.0);
  const std::vector<Sample> hist{pts[0]};
  auto y = apply_channel(x, ch, rng, hist);
  auto branches = tr.walk(labels, 0);
  return {std::move(tr), std::move(y), std::move(branches)};
}

// Full training run with the default schedule.
void BM_TrainOltd(benchmark::State& state) {
  const auto p = qpsk_pilot(static_cast<std::size_t>(state.range(0)));
  TrainConfig cfg;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_oltd(p.y, p.branches, p.trellis, cfg));
}
BENCHMARK(BM_TrainOltd)->Arg(256)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_LossAndGrad(benchmark::State& state) {
  const auto p = qpsk_pilot(16);
  const Mlp m = Mlp::glorot(2, 100, p.trellis.branch_count(), 1);
  const RowMatrix x = feature_matrix(p.y, 2);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_grad(m, x, p.branches));
}
BENCHMARK(BM_LossAndGrad);

void BM_PredictLikelihoods(benchmark::State& state) {
  const auto p = qpsk_pilot(1000);
  const Mlp m = Mlp::glorot(2, 100, p.trellis.branch_count(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(predict_likelihoods(m, p.y));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_PredictLikelihoods);

}  // namespace
