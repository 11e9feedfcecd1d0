#pragma once

#include <optional>
#include <span>
#include <vector>

#include "oltd/trellis.hpp"
#include "oltd/types.hpp"

namespace oltd {

/// Per-sample, per-branch likelihoods p(y_k | branch). Providers emit rows
/// that sum to one; the detectors accept any nonnegative rows since both
/// are invariant to a positive per-row scale.
class LikelihoodMatrix {
 public:
  LikelihoodMatrix() = default;
  /// Throws std::invalid_argument on a size mismatch or a negative or
  /// non-finite entry.
  LikelihoodMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  /// Builds a row-normalized matrix from log-likelihoods (any per-row offset).
  static LikelihoodMatrix from_log(std::size_t rows, std::size_t cols, std::span<const double> log_values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t k, std::size_t t) const noexcept { return values_[k * cols_ + t]; }
  std::span<const double> row(std::size_t k) const noexcept {
    return {values_.data() + k * cols_, cols_};
  }
  std::span<const double> values() const noexcept { return values_; }

  void scale_row(std::size_t k, double factor);
  /// True when every row sums to one within `tol`.
  bool rows_normalized(double tol = 1e-9) const noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Per-step transition probabilities p(s_{k+1} | s_k), one column per branch.
/// Outgoing probabilities of every state sum to one on every row.
class PriorTable {
 public:
  PriorTable() = default;
  /// Throws std::invalid_argument if shapes disagree with `trellis` or a
  /// state's outgoing probabilities do not sum to one (tolerance 1e-9).
  PriorTable(std::size_t rows, const Trellis& trellis, std::vector<double> values);

  static PriorTable uniform(std::size_t rows, const Trellis& trellis);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t k, std::size_t t) const noexcept { return values_[k * cols_ + t]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

inline constexpr double kLikelihoodFloor = 1e-30;
inline constexpr double kLlrClamp = 50.0;

/// Gaussian branch likelihoods exp(-|y - v_t|^2 / (2 sigma^2)) / (sqrt(2 pi) sigma),
/// row-normalized. Throws std::invalid_argument when sigma <= 0.
LikelihoodMatrix gaussian_likelihoods(std::span<const Sample> y, const Trellis& trellis, double sigma);

/// Poisson branch likelihoods (v_t + 1)^y e^{-(v_t + 1)} / y!, row-normalized.
/// `y` holds counts in the real part. Throws std::invalid_argument on
/// negative or non-integer counts, or negative branch outputs.
LikelihoodMatrix poisson_likelihoods(std::span<const Sample> y, const Trellis& trellis);

/// Shortest path over an N x branch_count cost table. `start_state` pins the
/// first state; nullopt lets the path start anywhere. Ties go to the smaller
/// branch index, and the final state is the smallest-index minimizer.
/// Returns the input label of every step.
std::vector<int> viterbi_min_cost(std::span<const double> cost, const Trellis& trellis,
                                  std::optional<int> start_state);

/// ML sequence detection: minimizes sum_k -log lik(k, branch_k) over paths
/// from `start_state`. Returns input labels.
std::vector<int> viterbi_detect(const LikelihoodMatrix& lik, const Trellis& trellis, int start_state = 0);

struct BcjrOptions {
  /// Known first state; when unset alpha_0 is uniform over all states.
  std::optional<int> initial_state;
};

/// Per-step branch posteriors p(s_k, s_{k+1} | y) in the log domain,
/// normalized so each row log-sums to zero.
struct BranchPosteriors {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> log_post;

  double operator()(std::size_t k, std::size_t t) const noexcept { return log_post[k * cols + t]; }
};

/// Forward-backward recursion with gamma_k = p(s_{k+1}|s_k) * lik(k, branch),
/// exact log-sum-exp and per-step normalization. beta_N is uniform.
/// Throws NumericalDegeneracy on non-finite likelihoods or when no path
/// survives.
BranchPosteriors bcjr_branch_posteriors(const LikelihoodMatrix& lik, const PriorTable& priors,
                                        const Trellis& trellis, const BcjrOptions& options = {});

/// LLR of every input-label bit (N * bits_per_input values, MSB first within
/// a label), clamped to +-kLlrClamp.
LlrSequence input_bit_llrs(const BranchPosteriors& post, const Trellis& trellis);

/// LLR of every coded output bit (N * code_bits_per_branch values), clamped.
LlrSequence code_bit_llrs(const BranchPosteriors& post, const Trellis& trellis);

/// MAP detection: input-bit LLRs L(u_k | y).
LlrSequence bcjr_detect(const LikelihoodMatrix& lik, const PriorTable& priors, const Trellis& trellis,
                        const BcjrOptions& options = {});

/// Hard decisions: 1 iff LLR >= 0.
Bits hard_decisions(std::span<const double> llrs);

}  // namespace oltd
