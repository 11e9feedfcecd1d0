#include "oltd/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace oltd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

double log_sum(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double clamp_llr(double v) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, -kLlrClamp, kLlrClamp);
}

// Incoming branch indices per state, ascending.
std::vector<std::vector<int>> incoming(const Trellis& trellis) {
  std::vector<std::vector<int>> in(static_cast<std::size_t>(trellis.num_states()));
  for (int b = 0; b < trellis.branch_count(); ++b) {
    in[static_cast<std::size_t>(trellis.branch(b).to)].push_back(b);
  }
  return in;
}

}  // namespace

LikelihoodMatrix::LikelihoodMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) throw std::invalid_argument("likelihood matrix size mismatch");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("likelihoods must be finite and nonnegative");
    }
  }
}

LikelihoodMatrix LikelihoodMatrix::from_log(std::size_t rows, std::size_t cols,
                                            std::span<const double> log_values) {
  if (log_values.size() != rows * cols) throw std::invalid_argument("likelihood matrix size mismatch");
  std::vector<double> v(rows * cols);
  for (std::size_t k = 0; k < rows; ++k) {
    const auto row = log_values.subspan(k * cols, cols);
    const double norm = log_sum(row);
    if (!std::isfinite(norm)) throw NumericalDegeneracy("likelihood row " + std::to_string(k) + " is degenerate");
    for (std::size_t t = 0; t < cols; ++t) v[k * cols + t] = std::exp(row[t] - norm);
  }
  return LikelihoodMatrix(rows, cols, std::move(v));
}

void LikelihoodMatrix::scale_row(std::size_t k, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw std::invalid_argument("row scale must be positive");
  for (std::size_t t = 0; t < cols_; ++t) values_[k * cols_ + t] *= factor;
}

bool LikelihoodMatrix::rows_normalized(double tol) const noexcept {
  for (std::size_t k = 0; k < rows_; ++k) {
    double s = 0.0;
    for (double v : row(k)) s += v;
    if (std::abs(s - 1.0) > tol) return false;
  }
  return true;
}

PriorTable::PriorTable(std::size_t rows, const Trellis& trellis, std::vector<double> values)
    : rows_(rows), cols_(static_cast<std::size_t>(trellis.branch_count())), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) throw std::invalid_argument("prior table size mismatch");
  const auto q = static_cast<std::size_t>(trellis.alphabet_size());
  for (std::size_t k = 0; k < rows_; ++k) {
    for (std::size_t s = 0; s < static_cast<std::size_t>(trellis.num_states()); ++s) {
      double total = 0.0;
      for (std::size_t i = 0; i < q; ++i) {
        const double p = values_[k * cols_ + s * q + i];
        if (!(p >= 0.0)) throw std::invalid_argument("prior probabilities must be nonnegative");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("outgoing prior probabilities must sum to one");
      }
    }
  }
}

PriorTable PriorTable::uniform(std::size_t rows, const Trellis& trellis) {
  const auto cols = static_cast<std::size_t>(trellis.branch_count());
  return PriorTable(rows, trellis,
                    std::vector<double>(rows * cols, 1.0 / static_cast<double>(trellis.alphabet_size())));
}

LikelihoodMatrix gaussian_likelihoods(std::span<const Sample> y, const Trellis& trellis, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_likelihoods: sigma must be > 0");
  const auto cols = static_cast<std::size_t>(trellis.branch_count());
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const double log_norm = -std::log(std::sqrt(2.0 * std::numbers::pi) * sigma);
  std::vector<double> logs(y.size() * cols);
  for (std::size_t k = 0; k < y.size(); ++k) {
    for (std::size_t t = 0; t < cols; ++t) {
      logs[k * cols + t] = log_norm - std::norm(y[k] - trellis.branch(static_cast<int>(t)).ref_output) * inv;
    }
  }
  return LikelihoodMatrix::from_log(y.size(), cols, logs);
}

LikelihoodMatrix poisson_likelihoods(std::span<const Sample> y, const Trellis& trellis) {
  const auto cols = static_cast<std::size_t>(trellis.branch_count());
  for (std::size_t t = 0; t < cols; ++t) {
    const Sample v = trellis.branch(static_cast<int>(t)).ref_output;
    if (v.real() < 0.0 || v.imag() != 0.0) {
      throw std::invalid_argument("poisson_likelihoods: branch outputs must be real and nonnegative");
    }
  }
  std::vector<double> logs(y.size() * cols);
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double count = y[k].real();
    if (count < 0.0 || count != std::floor(count) || y[k].imag() != 0.0) {
      throw std::invalid_argument("poisson_likelihoods: counts must be nonnegative integers");
    }
    const double lf = std::lgamma(count + 1.0);
    for (std::size_t t = 0; t < cols; ++t) {
      const double rate = trellis.branch(static_cast<int>(t)).ref_output.real() + 1.0;
      logs[k * cols + t] = count * std::log(rate) - rate - lf;
    }
  }
  return LikelihoodMatrix::from_log(y.size(), cols, logs);
}

std::vector<int> viterbi_min_cost(std::span<const double> cost, const Trellis& trellis,
                                  std::optional<int> start_state) {
  const auto states = static_cast<std::size_t>(trellis.num_states());
  const auto cols = static_cast<std::size_t>(trellis.branch_count());
  if (cost.size() % cols != 0) throw std::invalid_argument("viterbi: cost table size mismatch");
  const std::size_t steps = cost.size() / cols;
  const auto in = incoming(trellis);
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> metric(states, start_state ? inf : 0.0);
  if (start_state) metric.at(static_cast<std::size_t>(*start_state)) = 0.0;
  std::vector<double> next(states);
  std::vector<int> survivor(steps * states, -1);

  for (std::size_t k = 0; k < steps; ++k) {
    const double* c = cost.data() + k * cols;
    for (std::size_t s = 0; s < states; ++s) {
      double best = inf;
      int arg = -1;
      for (int b : in[s]) {
        const double m = metric[static_cast<std::size_t>(trellis.branch(b).from)] + c[b];
        if (m < best) {
          best = m;
          arg = b;
        }
      }
      if (arg < 0 && !in[s].empty()) arg = in[s].front();
      next[s] = best;
      survivor[k * states + s] = arg;
    }
    std::swap(metric, next);
  }

  std::size_t state = static_cast<std::size_t>(std::min_element(metric.begin(), metric.end()) - metric.begin());
  std::vector<int> labels(steps);
  for (std::size_t k = steps; k-- > 0;) {
    const int b = survivor[k * states + state];
    if (b < 0) throw NumericalDegeneracy("viterbi: no surviving path");
    labels[k] = trellis.branch(b).input;
    state = static_cast<std::size_t>(trellis.branch(b).from);
  }
  return labels;
}

std::vector<int> viterbi_detect(const LikelihoodMatrix& lik, const Trellis& trellis, int start_state) {
  if (lik.cols() != static_cast<std::size_t>(trellis.branch_count())) {
    throw std::invalid_argument("viterbi_detect: likelihood columns != branch count");
  }
  std::vector<double> cost(lik.values().size());
  std::transform(lik.values().begin(), lik.values().end(), cost.begin(),
                 [](double v) { return -std::log(std::max(v, kLikelihoodFloor)); });
  return viterbi_min_cost(cost, trellis, start_state);
}

BranchPosteriors bcjr_branch_posteriors(const LikelihoodMatrix& lik, const PriorTable& priors,
                                        const Trellis& trellis, const BcjrOptions& options) {
  const auto states = static_cast<std::size_t>(trellis.num_states());
  const auto cols = static_cast<std::size_t>(trellis.branch_count());
  const std::size_t steps = lik.rows();
  if (lik.cols() != cols || priors.cols() != cols || priors.rows() != steps) {
    throw std::invalid_argument("bcjr: likelihood/prior shapes do not match the trellis");
  }

  // log gamma
  std::vector<double> gamma(steps * cols);
  for (std::size_t k = 0; k < steps; ++k) {
    // a row that sits entirely at the floor carries no information
    const auto row = lik.row(k);
    if (!row.empty() && *std::max_element(row.begin(), row.end()) < kLikelihoodFloor) {
      throw NumericalDegeneracy("bcjr: likelihood row " + std::to_string(k) + " is zero");
    }
    for (std::size_t t = 0; t < cols; ++t) {
      const double l = lik(k, t);
      if (!std::isfinite(l)) throw NumericalDegeneracy("bcjr: non-finite likelihood at step " + std::to_string(k));
      const double p = priors(k, t);
      gamma[k * cols + t] = p > 0.0 ? std::log(p) + std::log(std::max(l, kLikelihoodFloor)) : kNegInf;
    }
  }

  const auto in = incoming(trellis);
  std::vector<double> alpha((steps + 1) * states, kNegInf);
  if (options.initial_state) {
    alpha.at(static_cast<std::size_t>(*options.initial_state)) = 0.0;
  } else {
    std::fill_n(alpha.begin(), states, -std::log(static_cast<double>(states)));
  }
  for (std::size_t k = 0; k < steps; ++k) {
    const double* a = alpha.data() + k * states;
    double* an = alpha.data() + (k + 1) * states;
    for (std::size_t s = 0; s < states; ++s) {
      double acc = kNegInf;
      for (int b : in[s]) {
        acc = log_add(acc, a[trellis.branch(b).from] + gamma[k * cols + static_cast<std::size_t>(b)]);
      }
      an[s] = acc;
    }
    const double norm = log_sum({an, states});
    if (!std::isfinite(norm)) throw NumericalDegeneracy("bcjr: forward recursion collapsed at step " + std::to_string(k));
    for (std::size_t s = 0; s < states; ++s) an[s] -= norm;
  }

  std::vector<double> beta((steps + 1) * states, kNegInf);
  std::fill_n(beta.begin() + static_cast<std::ptrdiff_t>(steps * states), states, 0.0);
  const auto q = static_cast<std::size_t>(trellis.alphabet_size());
  for (std::size_t k = steps; k-- > 0;) {
    const double* bn = beta.data() + (k + 1) * states;
    double* bk = beta.data() + k * states;
    for (std::size_t s = 0; s < states; ++s) {
      double acc = kNegInf;
      for (std::size_t i = 0; i < q; ++i) {
        const std::size_t b = s * q + i;
        acc = log_add(acc, gamma[k * cols + b] + bn[trellis.branch(static_cast<int>(b)).to]);
      }
      bk[s] = acc;
    }
    const double norm = log_sum({bk, states});
    if (!std::isfinite(norm)) throw NumericalDegeneracy("bcjr: backward recursion collapsed at step " + std::to_string(k));
    for (std::size_t s = 0; s < states; ++s) bk[s] -= norm;
  }

  BranchPosteriors post{steps, cols, std::vector<double>(steps * cols)};
  for (std::size_t k = 0; k < steps; ++k) {
    double* row = post.log_post.data() + k * cols;
    for (std::size_t t = 0; t < cols; ++t) {
      const auto& tr = trellis.branch(static_cast<int>(t));
      row[t] = alpha[k * states + static_cast<std::size_t>(tr.from)] + gamma[k * cols + t] +
               beta[(k + 1) * states + static_cast<std::size_t>(tr.to)];
    }
    const double norm = log_sum({row, cols});
    if (!std::isfinite(norm)) throw NumericalDegeneracy("bcjr: zero posterior mass at step " + std::to_string(k));
    for (std::size_t t = 0; t < cols; ++t) row[t] -= norm;
  }
  return post;
}

namespace {

template <typename BitOf>
LlrSequence marginal_llrs(const BranchPosteriors& post, int bits, BitOf bit_of) {
  LlrSequence out(post.rows * static_cast<std::size_t>(bits));
  for (std::size_t k = 0; k < post.rows; ++k) {
    for (int j = 0; j < bits; ++j) {
      double one = kNegInf;
      double zero = kNegInf;
      for (std::size_t t = 0; t < post.cols; ++t) {
        const double lp = post(k, t);
        if (bit_of(static_cast<int>(t), j)) {
          one = log_add(one, lp);
        } else {
          zero = log_add(zero, lp);
        }
      }
      out[k * static_cast<std::size_t>(bits) + static_cast<std::size_t>(j)] = clamp_llr(one - zero);
    }
  }
  return out;
}

}  // namespace

LlrSequence input_bit_llrs(const BranchPosteriors& post, const Trellis& trellis) {
  return marginal_llrs(post, trellis.bits_per_input(),
                       [&](int t, int j) { return trellis.input_bit(t, j); });
}

LlrSequence code_bit_llrs(const BranchPosteriors& post, const Trellis& trellis) {
  return marginal_llrs(post, trellis.code_bits_per_branch(),
                       [&](int t, int j) { return trellis.code_bit(t, j); });
}

LlrSequence bcjr_detect(const LikelihoodMatrix& lik, const PriorTable& priors, const Trellis& trellis,
                        const BcjrOptions& options) {
  if (trellis.bits_per_input() < 1) throw std::invalid_argument("bcjr_detect: trellis inputs carry no bits");
  return input_bit_llrs(bcjr_branch_posteriors(lik, priors, trellis, options), trellis);
}

Bits hard_decisions(std::span<const double> llrs) {
  Bits out(llrs.size());
  std::transform(llrs.begin(), llrs.end(), out.begin(), [](double l) { return static_cast<Bit>(l >= 0.0); });
  return out;
}

}  // namespace oltd
