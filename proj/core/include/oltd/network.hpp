#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "oltd/detector.hpp"
#include "oltd/trellis.hpp"
#include "oltd/types.hpp"

namespace oltd {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One-hidden-layer network: softmax(W2^T sigmoid(W1^T x + b1) + b2).
///
/// All parameters live in one flat buffer laid out layer-major, row-major:
/// W1 (d x H), b1 (H), W2 (H x C), b2 (C). The same layout is used for
/// gradients, optimizer moments and the JSON weight dump.
class Mlp {
 public:
  Mlp() = default;
  /// Zero-initialized network. Throws std::invalid_argument on a zero size.
  Mlp(int input_dim, int hidden, int outputs);

  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static Mlp glorot(int input_dim, int hidden, int outputs, std::uint64_t seed);
  static Mlp from_params(int input_dim, int hidden, int outputs, std::vector<double> params);

  int input_dim() const noexcept { return d_; }
  int hidden() const noexcept { return h_; }
  int outputs() const noexcept { return c_; }
  std::size_t param_count() const noexcept { return params_.size(); }

  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }

  Eigen::Map<RowMatrix> w1() { return {params_.data(), d_, h_}; }
  Eigen::Map<const RowMatrix> w1() const { return {params_.data(), d_, h_}; }
  Eigen::Map<Eigen::RowVectorXd> b1() { return {params_.data() + off_b1(), h_}; }
  Eigen::Map<const Eigen::RowVectorXd> b1() const { return {params_.data() + off_b1(), h_}; }
  Eigen::Map<RowMatrix> w2() { return {params_.data() + off_w2(), h_, c_}; }
  Eigen::Map<const RowMatrix> w2() const { return {params_.data() + off_w2(), h_, c_}; }
  Eigen::Map<Eigen::RowVectorXd> b2() { return {params_.data() + off_b2(), c_}; }
  Eigen::Map<const Eigen::RowVectorXd> b2() const { return {params_.data() + off_b2(), c_}; }

  std::string to_json() const;
  /// Throws std::invalid_argument on malformed input.
  static Mlp from_json(const std::string& text);

 private:
  std::size_t off_b1() const noexcept { return static_cast<std::size_t>(d_ * h_); }
  std::size_t off_w2() const noexcept { return off_b1() + static_cast<std::size_t>(h_); }
  std::size_t off_b2() const noexcept { return off_w2() + static_cast<std::size_t>(h_ * c_); }

  int d_ = 0;
  int h_ = 0;
  int c_ = 0;
  // Aligned storage keeps Eigen's product kernels on the same code path for
  // every allocation, which keeps training bit-reproducible.
  std::vector<double, Eigen::aligned_allocator<double>> params_;
};

struct TrainConfig {
  int epochs = 200;
  int batch = 16;
  int hidden = 100;
  int input_dim = 2;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
};

/// Adamax moments in the flat parameter layout.
struct AdamaxState {
  std::vector<double> m;
  std::vector<double> u;
  std::int64_t t = 0;

  explicit AdamaxState(std::size_t n = 0) : m(n, 0.0), u(n, 0.0) {}
};

/// Complex samples map to (Re, Im); real-valued samples (Poisson counts)
/// map to (Re) when `input_dim` is 1.
std::vector<double> featurize(Sample y, int input_dim = 2);
std::vector<double> featurize(double y);
/// Feature rows for a whole sequence.
RowMatrix feature_matrix(std::span<const Sample> y, int input_dim);

/// Class probabilities for one feature vector. Throws std::invalid_argument
/// on a dimension mismatch.
std::vector<double> forward(const Mlp& mlp, std::span<const double> x);
/// Row-wise class probabilities for a batch of feature rows.
RowMatrix forward_batch(const Mlp& mlp, const RowMatrix& x);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;  ///< flat layout of Mlp::params()
};

/// Mean cross-entropy of one-hot `labels` and its gradient by backprop.
/// Throws std::invalid_argument for out-of-range labels or shape mismatch.
LossGrad loss_and_grad(const Mlp& mlp, const RowMatrix& x, std::span<const int> labels);
double mean_loss(const Mlp& mlp, const RowMatrix& x, std::span<const int> labels);

/// t <- t+1; m <- b1 m + (1-b1) g; u <- max(b2 u, |g|);
/// theta <- theta - lr / (1 - b1^t) * m / max(u, eps).
void adamax_step(AdamaxState& state, std::span<double> params, std::span<const double> grads,
                 const TrainConfig& config);

struct TrainResult {
  Mlp mlp;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

/// Trains a fresh network on (pilot sample, true branch) pairs for a fixed
/// number of epochs, shuffling mini-batches with `config.seed`.
/// Throws std::invalid_argument if the pilot is shorter than one batch, and
/// NumericalDegeneracy if the loss stops being finite.
TrainResult train_oltd(std::span<const Sample> pilot_y, std::span<const int> pilot_branches,
                       const Trellis& trellis, const TrainConfig& config);

/// Row k = forward(mlp, featurize(y_k)).
LikelihoodMatrix predict_likelihoods(const Mlp& mlp, std::span<const Sample> payload_y);

}  // namespace oltd
