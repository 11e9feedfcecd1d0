#include "oltd/network.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <stdexcept>

#include "oltd/rng.hpp"

namespace oltd {

namespace {

void log_softmax_rows(RowMatrix& z) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    row.array() -= row.maxCoeff();
    row.array() -= std::log(row.array().exp().sum());
  }
}

RowMatrix log_probs(const Mlp& mlp, const RowMatrix& a1) {
  RowMatrix z = a1 * mlp.w2();
  z.rowwise() += mlp.b2();
  log_softmax_rows(z);
  return z;
}

RowMatrix hidden_activations(const Mlp& mlp, const RowMatrix& x) {
  RowMatrix z = x * mlp.w1();
  z.rowwise() += mlp.b1();
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

void check_input(const Mlp& mlp, Eigen::Index cols) {
  if (cols != mlp.input_dim()) throw std::invalid_argument("network input dimension mismatch");
}

void check_labels(const Mlp& mlp, std::span<const int> labels, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(labels.size()) != rows) {
    throw std::invalid_argument("label count does not match the batch");
  }
  for (int l : labels) {
    if (l < 0 || l >= mlp.outputs()) throw std::invalid_argument("label out of range");
  }
}

}  // namespace

Mlp::Mlp(int input_dim, int hidden, int outputs) : d_(input_dim), h_(hidden), c_(outputs) {
  if (d_ < 1 || h_ < 1 || c_ < 1) throw std::invalid_argument("network sizes must be positive");
  params_.assign(static_cast<std::size_t>(d_ * h_ + h_ + h_ * c_ + c_), 0.0);
}

Mlp Mlp::glorot(int input_dim, int hidden, int outputs, std::uint64_t seed) {
  Mlp net(input_dim, hidden, outputs);
  Rng rng(seed);
  std::uniform_real_distribution<double> u1(-1.0, 1.0);
  const double lim1 = std::sqrt(6.0 / (input_dim + hidden));
  const double lim2 = std::sqrt(6.0 / (hidden + outputs));
  auto w1 = net.w1();
  for (Eigen::Index i = 0; i < w1.size(); ++i) w1.data()[i] = lim1 * u1(rng);
  auto w2 = net.w2();
  for (Eigen::Index i = 0; i < w2.size(); ++i) w2.data()[i] = lim2 * u1(rng);
  return net;
}

Mlp Mlp::from_params(int input_dim, int hidden, int outputs, std::vector<double> params) {
  Mlp net(input_dim, hidden, outputs);
  if (params.size() != net.param_count()) throw std::invalid_argument("parameter count mismatch");
  net.params_.assign(params.begin(), params.end());
  return net;
}

std::string Mlp::to_json() const {
  nlohmann::json j;
  j["input_dim"] = d_;
  j["hidden"] = h_;
  j["outputs"] = c_;
  j["layout"] = "w1,b1,w2,b2 row-major";
  j["params"] = params_;
  return j.dump();
}

Mlp Mlp::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    return from_params(j.at("input_dim").get<int>(), j.at("hidden").get<int>(), j.at("outputs").get<int>(),
                       j.at("params").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed network JSON: ") + e.what());
  }
}

std::vector<double> featurize(Sample y, int input_dim) {
  if (input_dim == 1) return {y.real()};
  return {y.real(), y.imag()};
}

std::vector<double> featurize(double y) { return {y}; }

RowMatrix feature_matrix(std::span<const Sample> y, int input_dim) {
  if (input_dim != 1 && input_dim != 2) throw std::invalid_argument("feature dimension must be 1 or 2");
  RowMatrix x(static_cast<Eigen::Index>(y.size()), input_dim);
  for (std::size_t k = 0; k < y.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    x(r, 0) = y[k].real();
    if (input_dim == 2) x(r, 1) = y[k].imag();
  }
  return x;
}

RowMatrix forward_batch(const Mlp& mlp, const RowMatrix& x) {
  check_input(mlp, x.cols());
  return log_probs(mlp, hidden_activations(mlp, x)).array().exp().matrix();
}

std::vector<double> forward(const Mlp& mlp, std::span<const double> x) {
  RowMatrix row(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) row(0, static_cast<Eigen::Index>(i)) = x[i];
  const RowMatrix p = forward_batch(mlp, row);
  return {p.data(), p.data() + p.size()};
}

double mean_loss(const Mlp& mlp, const RowMatrix& x, std::span<const int> labels) {
  check_input(mlp, x.cols());
  check_labels(mlp, labels, x.rows());
  const RowMatrix lp = log_probs(mlp, hidden_activations(mlp, x));
  double loss = 0.0;
  for (Eigen::Index r = 0; r < lp.rows(); ++r) loss -= lp(r, labels[static_cast<std::size_t>(r)]);
  return loss / static_cast<double>(lp.rows());
}

LossGrad loss_and_grad(const Mlp& mlp, const RowMatrix& x, std::span<const int> labels) {
  check_input(mlp, x.cols());
  check_labels(mlp, labels, x.rows());
  const auto n = static_cast<double>(x.rows());

  const RowMatrix a1 = hidden_activations(mlp, x);
  const RowMatrix lp = log_probs(mlp, a1);

  LossGrad out;
  out.grad.assign(mlp.param_count(), 0.0);
  RowMatrix dz2 = lp.array().exp().matrix();
  for (Eigen::Index r = 0; r < lp.rows(); ++r) {
    const int l = labels[static_cast<std::size_t>(r)];
    out.loss -= lp(r, l);
    dz2(r, l) -= 1.0;
  }
  out.loss /= n;
  dz2 /= n;

  Mlp g = Mlp::from_params(mlp.input_dim(), mlp.hidden(), mlp.outputs(), std::move(out.grad));
  g.w2().noalias() = a1.transpose() * dz2;
  g.b2() = dz2.colwise().sum();
  const RowMatrix dz1 = ((dz2 * mlp.w2().transpose()).array() * a1.array() * (1.0 - a1.array())).matrix();
  g.w1().noalias() = x.transpose() * dz1;
  g.b1() = dz1.colwise().sum();
  out.grad.assign(g.params().begin(), g.params().end());
  return out;
}

void adamax_step(AdamaxState& state, std::span<double> params, std::span<const double> grads,
                 const TrainConfig& config) {
  if (params.size() != grads.size() || state.m.size() != params.size() || state.u.size() != params.size()) {
    throw std::invalid_argument("adamax: shape mismatch");
  }
  ++state.t;
  const double step = config.lr / (1.0 - std::pow(config.beta1, static_cast<double>(state.t)));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.u[i] = std::max(config.beta2 * state.u[i], std::abs(g));
    params[i] -= step * state.m[i] / std::max(state.u[i], config.eps);
  }
}

TrainResult train_oltd(std::span<const Sample> pilot_y, std::span<const int> pilot_branches,
                       const Trellis& trellis, const TrainConfig& config) {
  if (config.batch < 1 || !(config.lr > 0.0)) throw std::invalid_argument("invalid training configuration");
  if (pilot_y.size() != pilot_branches.size()) throw std::invalid_argument("pilot samples and labels differ in length");
  if (pilot_y.size() < static_cast<std::size_t>(config.batch)) {
    throw std::invalid_argument("pilot is shorter than one mini-batch");
  }

  const RowMatrix x = feature_matrix(pilot_y, config.input_dim);
  TrainResult result{Mlp::glorot(config.input_dim, config.hidden, trellis.branch_count(),
                                 substream(config.seed, 1)),
                     0.0, 0.0};
  Mlp& net = result.mlp;
  result.initial_loss = mean_loss(net, x, pilot_branches);

  AdamaxState state(net.param_count());
  Rng shuffle_rng(substream(config.seed, 2));
  std::vector<int> order(pilot_y.size());
  std::iota(order.begin(), order.end(), 0);

  const auto batch = static_cast<std::size_t>(config.batch);
  RowMatrix xb;
  std::vector<int> lb;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t n = std::min(batch, order.size() - start);
      xb.resize(static_cast<Eigen::Index>(n), x.cols());
      lb.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const int idx = order[start + i];
        xb.row(static_cast<Eigen::Index>(i)) = x.row(idx);
        lb[i] = pilot_branches[static_cast<std::size_t>(idx)];
      }
      const LossGrad lg = loss_and_grad(net, xb, lb);
      if (!std::isfinite(lg.loss)) throw NumericalDegeneracy("training loss is not finite");
      adamax_step(state, net.params(), lg.grad, config);
    }
  }
  result.final_loss = mean_loss(net, x, pilot_branches);
  if (!std::isfinite(result.final_loss)) throw NumericalDegeneracy("training loss is not finite");
  return result;
}

LikelihoodMatrix predict_likelihoods(const Mlp& mlp, std::span<const Sample> payload_y) {
  const RowMatrix p = forward_batch(mlp, feature_matrix(payload_y, mlp.input_dim()));
  std::vector<double> values(p.data(), p.data() + p.size());
  return LikelihoodMatrix(static_cast<std::size_t>(p.rows()), static_cast<std::size_t>(p.cols()),
                          std::move(values));
}

}  // namespace oltd
