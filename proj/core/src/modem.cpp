#include "oltd/modem.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oltd {

namespace {

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace

double q_pulse(double t, double bt) {
  if (t <= 0.0) return 0.0;
  // frequency pulse g(tau) shifted to be centered at tau = T (T = 1)
  const double a = 2.0 * std::numbers::pi * bt / std::sqrt(std::numbers::ln2);
  auto g = [a](double tau) {
    const double c = tau - 1.0;
    return (gaussian_q(a * (c - 0.5)) - gaussian_q(a * (c + 0.5))) / 2.0;
  };
  // the Gaussian tail below tau = 0 is part of q(t); only the value for
  // t <= 0 is pinned to zero
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      g, -std::numeric_limits<double>::infinity(), t, 15, 1e-12, &err);
}

SampleSeq gfsk_modulate(std::span<const Bit> bits) {
  using std::numbers::pi;
  if (bits.empty()) throw std::invalid_argument("gfsk_modulate: empty bit sequence");
  SampleSeq out;
  out.reserve(bits.size());
  int phase = 0;  // theta_n = phase * pi/2
  for (Bit b : bits) {
    const int dir = 2 * static_cast<int>(b) - 1;
    out.push_back(std::polar(1.0, pi / 2.0 * phase + pi / 4.0 * dir));
    phase = (phase + dir + 4) % 4;
  }
  return out;
}

std::vector<Sample> constellation(LinearScheme scheme) {
  const double r = 1.0 / std::numbers::sqrt2;
  switch (scheme) {
    case LinearScheme::Bpsk:
      return {Sample{-1.0, 0.0}, Sample{1.0, 0.0}};
    case LinearScheme::QpskGray:
      return {Sample{r, r}, Sample{-r, r}, Sample{r, -r}, Sample{-r, -r}};
    case LinearScheme::Ook:
      return {Sample{0.0, 0.0}, Sample{1.0, 0.0}};
  }
  return {};
}

int bits_per_symbol(LinearScheme scheme) noexcept {
  return scheme == LinearScheme::QpskGray ? 2 : 1;
}

SampleSeq map_linear(std::span<const Bit> bits, LinearScheme scheme) {
  const int k = bits_per_symbol(scheme);
  if (bits.size() % static_cast<std::size_t>(k) != 0) {
    throw std::invalid_argument("map_linear: bit count is not a multiple of the symbol size");
  }
  const auto points = constellation(scheme);
  SampleSeq out;
  out.reserve(bits.size() / static_cast<std::size_t>(k));
  for (int label : bits_to_labels(bits, k)) out.push_back(points[static_cast<std::size_t>(label)]);
  return out;
}

std::vector<int> bits_to_labels(std::span<const Bit> bits, int bits_per_label) {
  if (bits_per_label < 1 || bits.size() % static_cast<std::size_t>(bits_per_label) != 0) {
    throw std::invalid_argument("bits_to_labels: length not divisible by label size");
  }
  std::vector<int> labels;
  labels.reserve(bits.size() / static_cast<std::size_t>(bits_per_label));
  for (std::size_t i = 0; i < bits.size(); i += static_cast<std::size_t>(bits_per_label)) {
    int v = 0;
    for (int j = 0; j < bits_per_label; ++j) v = (v << 1) | (bits[i + static_cast<std::size_t>(j)] & 1);
    labels.push_back(v);
  }
  return labels;
}

Bits labels_to_bits(std::span<const int> labels, int bits_per_label) {
  Bits bits;
  bits.reserve(labels.size() * static_cast<std::size_t>(bits_per_label));
  for (int v : labels) {
    for (int j = bits_per_label - 1; j >= 0; --j) bits.push_back(static_cast<Bit>((v >> j) & 1));
  }
  return bits;
}

}  // namespace oltd
