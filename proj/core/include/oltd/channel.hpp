#pragma once

#include <span>
#include <vector>

#include "oltd/rng.hpp"
#include "oltd/types.hpp"

namespace oltd {

enum class NoiseKind { Gaussian, Cauchy, GaussianPam4, Poisson };

/// Taps plus the additive disturbance applied after them.
///  - Gaussian: circular complex noise with per-component std-dev `noise_param`.
///  - Cauchy: independent real/imaginary Cauchy components of scale `noise_param`.
///  - GaussianPam4: Gaussian as above plus a flat, real 4-PAM interferer whose
///    power relative to unit signal power is set by `sir_db`.
///  - Poisson: y ~ Poisson(v + 1); `noise_param` is unused.
struct ChannelRealization {
  std::vector<Sample> taps{Sample{1.0, 0.0}};
  NoiseKind noise_kind = NoiseKind::Gaussian;
  double noise_param = 0.0;
  double sir_db = 0.0;
};

/// h_l = sqrt(exp(-gamma l) / sum_i exp(-gamma i)), l = 0..L-1.
/// Throws std::invalid_argument when L == 0 or gamma < 0.
std::vector<double> exp_profile(double gamma, std::size_t length);

/// Noiseless channel output v_k = sum_l h_l x_{k-l}. `history` lists the
/// symbols preceding x, most recent first; missing entries are zero.
SampleSeq convolve(std::span<const Sample> x, std::span<const Sample> taps,
                   std::span<const Sample> history = {});

/// Adds the realization's disturbance to a noiseless sequence.
/// Poisson rejects non-real or negative v with std::invalid_argument.
SampleSeq add_noise(std::span<const Sample> v, const ChannelRealization& ch, Rng& rng);

/// convolve() followed by add_noise().
SampleSeq apply_channel(std::span<const Sample> x, const ChannelRealization& ch, Rng& rng,
                        std::span<const Sample> history = {});

/// Per-real-dimension noise std-dev for complex noise at Es/N0 = snr_db:
/// sigma^2 = Es / (2 * 10^(snr_db/10)). +inf dB gives 0.
double snr_to_sigma(double snr_db, double symbol_energy = 1.0);

/// Unit-power 4-PAM levels {-3, -1, 1, 3} / sqrt(5).
double pam4_level(int index) noexcept;

}  // namespace oltd
