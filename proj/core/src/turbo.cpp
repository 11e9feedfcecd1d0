#include "oltd/turbo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oltd {

namespace {

double clamp_llr(double l) { return std::clamp(l, -kLlrClamp, kLlrClamp); }

// log p(bit = 1), log p(bit = 0) for an LLR, stable for large |L|.
double log_p1(double l) { return l >= 0 ? -std::log1p(std::exp(-l)) : l - std::log1p(std::exp(l)); }
double log_p0(double l) { return log_p1(-l); }

}  // namespace

BitProbs llr_to_prob(double llr) noexcept {
  if (llr >= 0.0) {
    const double e = std::exp(-llr);
    return {e / (1.0 + e), 1.0 / (1.0 + e)};
  }
  const double e = std::exp(llr);
  return {1.0 / (1.0 + e), e / (1.0 + e)};
}

double prob_to_llr(BitProbs p) noexcept { return std::log(p.p1) - std::log(p.p0); }

PriorTable priors_from_llrs(std::span<const double> llrs, const Trellis& trellis) {
  const int bits = trellis.bits_per_input();
  if (bits < 1 || llrs.size() % static_cast<std::size_t>(bits) != 0) {
    throw std::invalid_argument("priors_from_llrs: LLR count does not match the trellis input width");
  }
  const std::size_t steps = llrs.size() / static_cast<std::size_t>(bits);
  const auto cols = static_cast<std::size_t>(trellis.branch_count());
  std::vector<double> values(steps * cols);
  std::vector<BitProbs> probs(static_cast<std::size_t>(bits));
  for (std::size_t k = 0; k < steps; ++k) {
    for (int j = 0; j < bits; ++j) {
      probs[static_cast<std::size_t>(j)] = llr_to_prob(clamp_llr(llrs[k * static_cast<std::size_t>(bits) + static_cast<std::size_t>(j)]));
    }
    for (std::size_t t = 0; t < cols; ++t) {
      double p = 1.0;
      for (int j = 0; j < bits; ++j) {
        const auto& bp = probs[static_cast<std::size_t>(j)];
        p *= trellis.input_bit(static_cast<int>(t), j) ? bp.p1 : bp.p0;
      }
      values[k * cols + t] = p;
    }
  }
  return PriorTable(steps, trellis, std::move(values));
}

LlrSequence equalizer_pass(const LikelihoodMatrix& lik, std::span<const double> intrinsic,
                           const Trellis& eq_trellis, const BcjrOptions& options) {
  const auto expected = lik.rows() * static_cast<std::size_t>(eq_trellis.bits_per_input());
  if (intrinsic.size() != expected) throw std::invalid_argument("equalizer_pass: intrinsic length mismatch");
  const PriorTable priors = priors_from_llrs(intrinsic, eq_trellis);
  LlrSequence post = bcjr_detect(lik, priors, eq_trellis, options);
  for (std::size_t n = 0; n < post.size(); ++n) post[n] = clamp_llr(post[n] - clamp_llr(intrinsic[n]));
  return post;
}

DecoderOutput decoder_pass(std::span<const double> extrinsic_a, const Trellis& code_trellis) {
  const int n_out = code_trellis.code_bits_per_branch();
  if (n_out < 1 || extrinsic_a.size() % static_cast<std::size_t>(n_out) != 0) {
    throw std::invalid_argument("decoder_pass: length is not a multiple of the code output width");
  }
  const std::size_t steps = extrinsic_a.size() / static_cast<std::size_t>(n_out);
  const auto cols = static_cast<std::size_t>(code_trellis.branch_count());

  std::vector<double> logs(steps * cols);
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t t = 0; t < cols; ++t) {
      double acc = 0.0;
      for (int j = 0; j < n_out; ++j) {
        const double l = clamp_llr(extrinsic_a[k * static_cast<std::size_t>(n_out) + static_cast<std::size_t>(j)]);
        acc += code_trellis.code_bit(static_cast<int>(t), j) ? log_p1(l) : log_p0(l);
      }
      logs[k * cols + t] = acc;
    }
  }
  const auto metric = LikelihoodMatrix::from_log(steps, cols, logs);
  const auto post = bcjr_branch_posteriors(metric, PriorTable::uniform(steps, code_trellis), code_trellis,
                                           BcjrOptions{0});

  DecoderOutput out;
  out.info = input_bit_llrs(post, code_trellis);
  out.intrinsic = code_bit_llrs(post, code_trellis);
  for (std::size_t n = 0; n < out.intrinsic.size(); ++n) {
    out.intrinsic[n] = clamp_llr(out.intrinsic[n] - clamp_llr(extrinsic_a[n]));
  }
  return out;
}

TurboResult turbo_equalize(const LikelihoodMatrix& lik, const Trellis& eq_trellis, const Trellis& code_trellis,
                           const Interleaver& interleaver, int n_iters, const BcjrOptions& eq_options) {
  if (n_iters < 0) throw std::invalid_argument("turbo_equalize: n_iters must be >= 0");
  const std::size_t n = lik.rows() * static_cast<std::size_t>(eq_trellis.bits_per_input());
  if (interleaver.size() != n) throw std::invalid_argument("turbo_equalize: interleaver size mismatch");

  LlrSequence intrinsic_b(n, 0.0);
  DecoderOutput dec;
  for (int it = 0; it <= n_iters; ++it) {
    const LlrSequence ext_b = equalizer_pass(lik, intrinsic_b, eq_trellis, eq_options);
    const LlrSequence ext_a = interleaver.deinterleave<double>(ext_b);
    dec = decoder_pass(ext_a, code_trellis);
    intrinsic_b = interleaver.interleave<double>(dec.intrinsic);
  }
  return {hard_decisions(dec.info), std::move(dec.info)};
}

}  // namespace oltd
