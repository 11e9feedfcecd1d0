#include "oltd/fec.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "oltd/detector.hpp"
#include "oltd/rng.hpp"

namespace oltd {

Trellis ble_code_trellis() { return build_cc_trellis(kBleG0, kBleG1); }

Bits conv_encode(std::span<const Bit> u, std::span<const int> g0, std::span<const int> g1) {
  if (u.empty()) throw std::invalid_argument("conv_encode: empty input");
  const Trellis code = build_cc_trellis(g0, g1);
  Bits out;
  out.reserve(2 * u.size());
  int state = 0;
  for (Bit b : u) {
    const auto& t = code.branch(code.branch_index(state, b & 1));
    out.push_back(static_cast<Bit>(t.code_bits & 1U));
    out.push_back(static_cast<Bit>((t.code_bits >> 1) & 1U));
    state = t.to;
  }
  return out;
}

Interleaver::Interleaver(std::vector<std::uint32_t> permutation, std::uint64_t seed)
    : perm_(std::move(permutation)), seed_(seed) {
  std::vector<bool> hit(perm_.size(), false);
  for (auto p : perm_) {
    if (p >= perm_.size() || hit[p]) throw std::invalid_argument("interleaver is not a permutation");
    hit[p] = true;
  }
}

Interleaver make_interleaver(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("make_interleaver: length must be >= 1");
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0U);
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  return Interleaver(std::move(perm), seed);
}

Interleaver identity_interleaver(std::size_t n) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0U);
  return Interleaver(std::move(perm), 0);
}

Bits viterbi_decode_cc(std::span<const double> coded_llrs, const Trellis& code_trellis) {
  const int n_out = code_trellis.code_bits_per_branch();
  if (n_out < 1 || coded_llrs.size() % static_cast<std::size_t>(n_out) != 0) {
    throw std::invalid_argument("viterbi_decode_cc: length not divisible by the code rate");
  }
  const std::size_t steps = coded_llrs.size() / static_cast<std::size_t>(n_out);
  const int branches = code_trellis.branch_count();

  // cost = -(sum_j c_j L_j): the shared Viterbi core minimizes
  std::vector<double> cost(steps * static_cast<std::size_t>(branches));
  for (std::size_t k = 0; k < steps; ++k) {
    for (int b = 0; b < branches; ++b) {
      double m = 0.0;
      for (int j = 0; j < n_out; ++j) {
        if (code_trellis.code_bit(b, j)) m += coded_llrs[k * static_cast<std::size_t>(n_out) + static_cast<std::size_t>(j)];
      }
      cost[k * static_cast<std::size_t>(branches) + static_cast<std::size_t>(b)] = -m;
    }
  }
  const auto labels = viterbi_min_cost(cost, code_trellis, 0);
  Bits out(labels.size());
  std::transform(labels.begin(), labels.end(), out.begin(), [](int v) { return static_cast<Bit>(v); });
  return out;
}

Bits viterbi_decode_cc(std::span<const double> coded_llrs) {
  static const Trellis code = ble_code_trellis();
  return viterbi_decode_cc(coded_llrs, code);
}

Bits viterbi_decode_cc_hard(std::span<const Bit> coded_bits) {
  std::vector<double> llrs(coded_bits.size());
  std::transform(coded_bits.begin(), coded_bits.end(), llrs.begin(),
                 [](Bit b) { return b ? 1.0 : -1.0; });
  return viterbi_decode_cc(llrs);
}

}  // namespace oltd
