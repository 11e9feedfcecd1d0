#include "oltd/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oltd {

std::vector<double> exp_profile(double gamma, std::size_t length) {
  if (length == 0) throw std::invalid_argument("exp_profile: length must be >= 1");
  if (!(gamma >= 0.0)) throw std::invalid_argument("exp_profile: gamma must be >= 0");
  std::vector<double> w(length);
  double total = 0.0;
  for (std::size_t l = 0; l < length; ++l) {
    w[l] = std::exp(-gamma * static_cast<double>(l));
    total += w[l];
  }
  for (auto& v : w) v = std::sqrt(v / total);
  return w;
}

SampleSeq convolve(std::span<const Sample> x, std::span<const Sample> taps,
                   std::span<const Sample> history) {
  SampleSeq v(x.size());
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    Sample acc{};
    for (std::size_t l = 0; l < taps.size(); ++l) {
      const std::ptrdiff_t idx = k - static_cast<std::ptrdiff_t>(l);
      Sample xs{};
      if (idx >= 0) {
        xs = x[static_cast<std::size_t>(idx)];
      } else if (static_cast<std::size_t>(-idx - 1) < history.size()) {
        xs = history[static_cast<std::size_t>(-idx - 1)];
      }
      acc += taps[l] * xs;
    }
    v[static_cast<std::size_t>(k)] = acc;
  }
  return v;
}

double pam4_level(int index) noexcept {
  static const double scale = 1.0 / std::sqrt(5.0);
  return (2.0 * index - 3.0) * scale;
}

SampleSeq add_noise(std::span<const Sample> v, const ChannelRealization& ch, Rng& rng) {
  SampleSeq y(v.begin(), v.end());
  switch (ch.noise_kind) {
    case NoiseKind::Gaussian: {
      std::normal_distribution<double> n01;
      for (auto& s : y) {
        const double re = n01(rng);
        const double im = n01(rng);
        s += ch.noise_param * Sample{re, im};
      }
      break;
    }
    case NoiseKind::Cauchy: {
      std::uniform_real_distribution<double> u01;
      auto draw = [&] { return ch.noise_param * std::tan(std::numbers::pi * (u01(rng) - 0.5)); };
      for (auto& s : y) {
        const double re = draw();
        const double im = draw();
        s += Sample{re, im};
      }
      break;
    }
    case NoiseKind::GaussianPam4: {
      std::normal_distribution<double> n01;
      std::uniform_int_distribution<int> level(0, 3);
      const double amp = std::pow(10.0, -ch.sir_db / 20.0);
      for (auto& s : y) {
        const double re = n01(rng);
        const double im = n01(rng);
        const double p = amp * pam4_level(level(rng));
        s += ch.noise_param * Sample{re, im} + Sample{p, 0.0};
      }
      break;
    }
    case NoiseKind::Poisson: {
      for (auto& s : y) {
        if (s.imag() != 0.0 || s.real() < 0.0 || !std::isfinite(s.real())) {
          throw std::invalid_argument("Poisson channel needs real, nonnegative intensities");
        }
        std::poisson_distribution<long> pois(s.real() + 1.0);
        s = Sample{static_cast<double>(pois(rng)), 0.0};
      }
      break;
    }
  }
  return y;
}

SampleSeq apply_channel(std::span<const Sample> x, const ChannelRealization& ch, Rng& rng,
                        std::span<const Sample> history) {
  const auto v = convolve(x, ch.taps, history);
  return add_noise(v, ch, rng);
}

double snr_to_sigma(double snr_db, double symbol_energy) {
  if (!(symbol_energy > 0.0)) throw std::invalid_argument("snr_to_sigma: symbol energy must be > 0");
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return std::sqrt(symbol_energy / (2.0 * std::pow(10.0, snr_db / 10.0)));
}

}  // namespace oltd
