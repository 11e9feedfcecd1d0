#include <benchmark/benchmark.h>

#include <random>

#include "oltd/channel.hpp"
#include "oltd/detector.hpp"
#include "oltd/fec.hpp"
#include "oltd/modem.hpp"
#include "oltd/rng.hpp"
#include "oltd/trellis.hpp"
#include "oltd/turbo.hpp"

namespace {

using namespace oltd;

struct QpskLink {
  Trellis trellis;
  LikelihoodMatrix lik;
};

// QPSK over an exponential profile with `taps` taps at 8 dB.
QpskLink qpsk_link(std::size_t taps, std::size_t symbols) {
  const auto pts = constellation(LinearScheme::QpskGray);
  std::vector<Sample> h;
  for (double v : exp_profile(0.5, taps)) h.emplace_back(v, 0.0);
  Trellis tr = build_isi_trellis(h, pts);
  Rng rng(7);
  Bits b(2 * symbols);
  for (auto& v : b) v = static_cast<Bit>(rng() & 1U);
  ChannelRealization ch;
  ch.taps = h;
  ch.noise_param = snr_to_sigma(8.0);
  const std::vector<Sample> hist(taps - 1, pts[0]);
  const auto y = apply_channel(map_linear(b, LinearScheme::QpskGray), ch, rng, hist);
  auto lik = gaussian_likelihoods(y, tr, ch.noise_param);
  return {std::move(tr), std::move(lik)};
}

void BM_Bcjr(benchmark::State& state) {
  const auto link = qpsk_link(static_cast<std::size_t>(state.range(0)), 500);
  const auto pri = PriorTable::uniform(link.lik.rows(), link.trellis);
  for (auto _ : state) benchmark::DoNotOptimize(bcjr_detect(link.lik, pri, link.trellis));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(link.lik.rows()));
}
BENCHMARK(BM_Bcjr)->Arg(2)->Arg(3)->Arg(4);

void BM_Viterbi(benchmark::State& state) {
  const auto link = qpsk_link(static_cast<std::size_t>(state.range(0)), 500);
  for (auto _ : state) benchmark::DoNotOptimize(viterbi_detect(link.lik, link.trellis, 0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(link.lik.rows()));
}
BENCHMARK(BM_Viterbi)->Arg(2)->Arg(3)->Arg(4);

void BM_TurboGfsk(benchmark::State& state) {
  const Trellis eq = build_gfsk_trellis();
  const Trellis code = ble_code_trellis();
  Rng rng(3);
  Bits u(1000);
  for (auto& v : u) v = static_cast<Bit>(rng() & 1U);
  const auto il = make_interleaver(2 * u.size(), 9);
  const Bits a = conv_encode(u);
  const auto x = gfsk_modulate(il.interleave<Bit>(a));
  ChannelRealization ch;
  ch.taps = {Sample{1.0, 0.0}};
  ch.noise_param = snr_to_sigma(0.0);
  const auto y = apply_channel(x, ch, rng, {});
  const auto lik = gaussian_likelihoods(y, eq, ch.noise_param);
  const int iters = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(turbo_equalize(lik, eq, code, il, iters));
}
BENCHMARK(BM_TurboGfsk)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
