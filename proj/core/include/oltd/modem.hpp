#pragma once

#include <span>
#include <vector>

#include "oltd/types.hpp"

namespace oltd {

enum class LinearScheme { Bpsk, QpskGray, Ook };

/// GFSK phase pulse q(t) for t in symbol periods, computed by adaptive
/// quadrature of the Gaussian frequency pulse. The frequency pulse is
/// centered at t = T, so q(t) = 0 for t <= 0, q(T) = 1/4 and q(t) -> 1/2.
double q_pulse(double t, double bt = 0.5);

/// Symbol-rate GFSK samples for modulation index 0.5:
/// x_n = exp(j(theta_n + pi/4 I_n)), theta_1 = 0, theta_{n+1} = theta_n + pi/2 I_n,
/// I_n = 2 b_n - 1. Throws std::invalid_argument on an empty input.
SampleSeq gfsk_modulate(std::span<const Bit> bits);

/// Constellation in label order. QPSK labels are 2*b1 + b0 where b1 is the
/// earlier bit of the pair: 00 -> (1+j)/sqrt2, 01 -> (-1+j)/sqrt2,
/// 11 -> (-1-j)/sqrt2, 10 -> (1-j)/sqrt2.
std::vector<Sample> constellation(LinearScheme scheme);

int bits_per_symbol(LinearScheme scheme) noexcept;

/// Memoryless mapping of bits onto `constellation(scheme)`.
/// Throws std::invalid_argument when the bit count is not a multiple of the
/// bits per symbol.
SampleSeq map_linear(std::span<const Bit> bits, LinearScheme scheme);

/// Groups bits MSB-first into symbol labels of `bits_per_label` bits.
std::vector<int> bits_to_labels(std::span<const Bit> bits, int bits_per_label);
Bits labels_to_bits(std::span<const int> labels, int bits_per_label);

}  // namespace oltd
