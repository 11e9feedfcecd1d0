#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oltd/types.hpp"

namespace oltd {

/// A labeled state transition. `input` is the symbol label that drives it;
/// for multi-bit labels the bits are read MSB first. `code_bits` holds the
/// coded output bits of a convolutional-code branch (bit j of the branch
/// word is `(code_bits >> j) & 1`).
struct Transition {
  int from = 0;
  int to = 0;
  int input = 0;
  Sample ref_output{};
  std::uint32_t code_bits = 0;
};

/// Time-invariant trellis. Branches are indexed `state * alphabet_size + input`
/// and every (state, input) pair has exactly one outgoing branch.
/// Immutable after construction.
class Trellis {
 public:
  /// Validates the transition table; throws std::invalid_argument when a
  /// (state, input) slot is missing or duplicated, a target is out of range,
  /// or a reference output is not finite.
  Trellis(int num_states, int alphabet_size, int bits_per_input,
          std::vector<Transition> transitions, int code_bits_per_branch = 0);

  int num_states() const noexcept { return num_states_; }
  int alphabet_size() const noexcept { return alphabet_size_; }
  int branch_count() const noexcept { return num_states_ * alphabet_size_; }
  /// Number of bits carried by one input label (0 when the alphabet size is
  /// not a power of two).
  int bits_per_input() const noexcept { return bits_per_input_; }
  int code_bits_per_branch() const noexcept { return code_bits_per_branch_; }

  int branch_index(int state, int input) const noexcept {
    return state * alphabet_size_ + input;
  }
  const Transition& branch(int index) const { return transitions_[static_cast<std::size_t>(index)]; }
  std::span<const Transition> transitions() const noexcept { return transitions_; }

  /// Bit j (0 = most significant) of the input label on `branch`.
  int input_bit(int branch, int j) const noexcept {
    return (transitions_[static_cast<std::size_t>(branch)].input >> (bits_per_input_ - 1 - j)) & 1;
  }
  int code_bit(int branch, int j) const noexcept {
    return static_cast<int>((transitions_[static_cast<std::size_t>(branch)].code_bits >> j) & 1U);
  }

  /// Walks a label sequence from `start_state` and returns the branch taken
  /// at every step.
  std::vector<int> walk(std::span<const int> inputs, int start_state = 0) const;
  /// State reached after walking `inputs` from `start_state`.
  int end_state(std::span<const int> inputs, int start_state = 0) const;

  /// Copy with every reference output multiplied by `gain`.
  Trellis scaled(Sample gain) const;

 private:
  int num_states_;
  int alphabet_size_;
  int bits_per_input_;
  int code_bits_per_branch_;
  std::vector<Transition> transitions_;
};

/// ISI channel trellis over `alphabet` with memory `taps.size() - 1`.
/// The state is the tuple of the L-1 most recent symbols, numbered
/// lexicographically with the most recent symbol varying fastest; state 0 is
/// the history filled with alphabet[0]. Branch output is sum_l h_l x_{k-l}.
Trellis build_isi_trellis(std::span<const Sample> taps, std::span<const Sample> alphabet);

/// Four-phase GFSK trellis for modulation index 0.5: states theta = i*pi/2,
/// input bit b maps to I = 2b - 1, the branch output is
/// exp(j(theta + pi/4 * I)) and the next phase is theta + pi/2 * I.
Trellis build_gfsk_trellis();

/// Rate-1/2 feedforward convolutional code trellis. Polynomials are given as
/// coefficient lists in ascending powers of x; both must have the same
/// degree m >= 1. States hold the last m input bits, most recent in bit 0.
/// Branch code word: bit 0 from g0, bit 1 from g1.
Trellis build_cc_trellis(std::span<const int> g0, std::span<const int> g1);

/// GFSK followed by a two-tap channel h0 x_n + h1 x_{n-1}. The state is
/// (phase index, index of the previous GFSK symbol among the four points
/// exp(j(2m+1)pi/4)), numbered `prev * 4 + phase`; 16 states, 32 branches.
/// Only two taps are supported; longer channels throw Unsupported.
Trellis build_gfsk_isi_trellis(std::span<const Sample> taps);

/// Index m of a GFSK output point exp(j(2m+1)pi/4), m in [0, 4).
int gfsk_point_index(Sample x);

}  // namespace oltd
