#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "oltd/trellis.hpp"
#include "oltd/types.hpp"

namespace oltd {

/// BLE LE Coded generator polynomials, ascending powers of x:
/// G0 = 1 + x + x^2 + x^3, G1 = 1 + x^2 + x^3.
inline constexpr std::array<int, 4> kBleG0{1, 1, 1, 1};
inline constexpr std::array<int, 4> kBleG1{1, 0, 1, 1};

/// Trellis of the BLE rate-1/2 code.
Trellis ble_code_trellis();

/// Rate-1/2 feedforward encoding from the zero state, no tail bits.
/// Output is G0-first: a[2k] from g0, a[2k+1] from g1.
/// Throws std::invalid_argument on empty input.
Bits conv_encode(std::span<const Bit> u, std::span<const int> g0 = kBleG0,
                 std::span<const int> g1 = kBleG1);

/// Frame-sized bit interleaver. interleave(x)[i] = x[perm[i]].
class Interleaver {
 public:
  Interleaver(std::vector<std::uint32_t> permutation, std::uint64_t seed);

  std::size_t size() const noexcept { return perm_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const std::uint32_t> permutation() const noexcept { return perm_; }

  template <typename T>
  std::vector<T> interleave(std::span<const T> x) const {
    check(x.size());
    std::vector<T> y(x.size());
    for (std::size_t i = 0; i < perm_.size(); ++i) y[i] = x[perm_[i]];
    return y;
  }

  template <typename T>
  std::vector<T> deinterleave(std::span<const T> y) const {
    check(y.size());
    std::vector<T> x(y.size());
    for (std::size_t i = 0; i < perm_.size(); ++i) x[perm_[i]] = y[i];
    return x;
  }

 private:
  void check(std::size_t n) const {
    if (n != perm_.size()) throw std::invalid_argument("interleaver length mismatch");
  }

  std::vector<std::uint32_t> perm_;
  std::uint64_t seed_;
};

/// Uniformly random permutation of [0, n), deterministic in `seed`.
Interleaver make_interleaver(std::size_t n, std::uint64_t seed);

/// Identity permutation (the non-interleaved transmitter).
Interleaver identity_interleaver(std::size_t n);

/// Soft-input Viterbi decoding of an unterminated rate-1/2 frame that starts
/// in the zero state. The path metric is sum_j c_j * L_j over coded bits
/// c_j with LLRs L_j; ties go to the smaller branch index and the decoder
/// ends on the best final state (smallest index on ties).
/// Throws std::invalid_argument if the length is odd.
Bits viterbi_decode_cc(std::span<const double> coded_llrs, const Trellis& code_trellis);
Bits viterbi_decode_cc(std::span<const double> coded_llrs);

/// Hard-input decoding (minimum Hamming distance).
Bits viterbi_decode_cc_hard(std::span<const Bit> coded_bits);

}  // namespace oltd
