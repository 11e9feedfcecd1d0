#pragma once

#include <span>
#include <utility>

#include "oltd/detector.hpp"
#include "oltd/fec.hpp"
#include "oltd/trellis.hpp"
#include "oltd/types.hpp"

namespace oltd {

struct BitProbs {
  double p0 = 0.5;
  double p1 = 0.5;
};

/// p1 = e^L / (1 + e^L), p0 = 1 / (1 + e^L), evaluated without overflow.
BitProbs llr_to_prob(double llr) noexcept;
double prob_to_llr(BitProbs p) noexcept;

/// Transition probabilities of a trellis driven by independent input bits
/// with the given LLRs (N * bits_per_input values, clamped to +-kLlrClamp).
PriorTable priors_from_llrs(std::span<const double> llrs, const Trellis& trellis);

/// One soft equalization step: BCJR with priors built from `intrinsic`,
/// returning the extrinsic part L(b|y) - L(b).
LlrSequence equalizer_pass(const LikelihoodMatrix& lik, std::span<const double> intrinsic,
                           const Trellis& eq_trellis, const BcjrOptions& options = {});

struct DecoderOutput {
  LlrSequence intrinsic;  ///< L(a|y~) - L_ext(a|y), fed back to the equalizer
  LlrSequence info;       ///< L(u_k | y~)
};

/// Soft decoding over the code trellis from the zero state, with equiprobable
/// info bits and branch metric p(u) p(a1|y) p(a2|y) built from the
/// deinterleaved extrinsic LLRs. Throws std::invalid_argument if the length
/// is not a multiple of the code's output bits.
DecoderOutput decoder_pass(std::span<const double> extrinsic_a, const Trellis& code_trellis);

struct TurboResult {
  Bits bits;         ///< u_k = 1 iff L(u_k | y~) >= 0
  LlrSequence info;  ///< final info-bit LLRs
};

/// Runs the equalizer/decoder exchange `n_iters + 1` times through the
/// equalizer. The likelihood matrix is computed once by the caller and
/// reused in every iteration.
TurboResult turbo_equalize(const LikelihoodMatrix& lik, const Trellis& eq_trellis, const Trellis& code_trellis,
                           const Interleaver& interleaver, int n_iters, const BcjrOptions& eq_options = {});

}  // namespace oltd
