#include "oltd/trellis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace oltd {

namespace {

int log2_exact(int n) {
  int bits = 0;
  while ((1 << bits) < n) ++bits;
  return (1 << bits) == n ? bits : 0;
}

int ipow(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

int poly_degree(std::span<const int> g) {
  int deg = -1;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] != 0 && g[i] != 1) {
      throw std::invalid_argument("polynomial coefficients must be 0 or 1");
    }
    if (g[i] != 0) deg = static_cast<int>(i);
  }
  return deg;
}

}  // namespace

Trellis::Trellis(int num_states, int alphabet_size, int bits_per_input,
                 std::vector<Transition> transitions, int code_bits_per_branch)
    : num_states_(num_states),
      alphabet_size_(alphabet_size),
      bits_per_input_(bits_per_input),
      code_bits_per_branch_(code_bits_per_branch) {
  if (num_states < 1 || alphabet_size < 1) {
    throw std::invalid_argument("trellis needs at least one state and one input");
  }
  if (bits_per_input < 0 || (bits_per_input > 0 && (1 << bits_per_input) != alphabet_size)) {
    throw std::invalid_argument("bits_per_input inconsistent with alphabet size");
  }
  const auto count = static_cast<std::size_t>(num_states) * static_cast<std::size_t>(alphabet_size);
  if (transitions.size() != count) {
    throw std::invalid_argument("expected " + std::to_string(count) + " transitions, got " +
                                std::to_string(transitions.size()));
  }
  transitions_.assign(count, Transition{});
  std::vector<bool> seen(count, false);
  for (const auto& t : transitions) {
    if (t.from < 0 || t.from >= num_states || t.input < 0 || t.input >= alphabet_size) {
      throw std::invalid_argument("transition source or input out of range");
    }
    if (t.to < 0 || t.to >= num_states) {
      throw std::invalid_argument("transition target out of range");
    }
    if (!std::isfinite(t.ref_output.real()) || !std::isfinite(t.ref_output.imag())) {
      throw std::invalid_argument("transition reference output is not finite");
    }
    const auto idx = static_cast<std::size_t>(t.from * alphabet_size + t.input);
    if (seen[idx]) throw std::invalid_argument("duplicate (state, input) transition");
    seen[idx] = true;
    transitions_[idx] = t;
  }
}

std::vector<int> Trellis::walk(std::span<const int> inputs, int start_state) const {
  std::vector<int> branches;
  branches.reserve(inputs.size());
  int state = start_state;
  for (int in : inputs) {
    const int b = branch_index(state, in);
    branches.push_back(b);
    state = branch(b).to;
  }
  return branches;
}

int Trellis::end_state(std::span<const int> inputs, int start_state) const {
  int state = start_state;
  for (int in : inputs) state = branch(branch_index(state, in)).to;
  return state;
}

Trellis Trellis::scaled(Sample gain) const {
  auto copy = transitions_;
  for (auto& t : copy) t.ref_output *= gain;
  return Trellis(num_states_, alphabet_size_, bits_per_input_, std::move(copy), code_bits_per_branch_);
}

Trellis build_isi_trellis(std::span<const Sample> taps, std::span<const Sample> alphabet) {
  if (taps.empty()) throw std::invalid_argument("ISI trellis needs at least one tap");
  if (alphabet.empty()) throw std::invalid_argument("ISI trellis needs a nonempty alphabet");

  const int q = static_cast<int>(alphabet.size());
  const int memory = static_cast<int>(taps.size()) - 1;
  const int states = ipow(q, memory);
  const int keep = memory > 0 ? ipow(q, memory - 1) : 1;

  std::vector<Transition> ts;
  ts.reserve(static_cast<std::size_t>(states * q));
  std::vector<int> history(static_cast<std::size_t>(memory));
  for (int s = 0; s < states; ++s) {
    int rem = s;
    for (int i = 0; i < memory; ++i) {
      history[static_cast<std::size_t>(i)] = rem % q;  // x_{k-1-i}
      rem /= q;
    }
    for (int in = 0; in < q; ++in) {
      Sample v{};
      v += taps[0] * alphabet[static_cast<std::size_t>(in)];
      for (int l = 1; l <= memory; ++l) {
        v += taps[static_cast<std::size_t>(l)] *
             alphabet[static_cast<std::size_t>(history[static_cast<std::size_t>(l - 1)])];
      }
      const int next = memory > 0 ? in + q * (s % keep) : 0;
      ts.push_back({s, next, in, v, 0});
    }
  }
  return Trellis(states, q, log2_exact(q), std::move(ts));
}

Trellis build_gfsk_trellis() {
  using std::numbers::pi;
  std::vector<Transition> ts;
  for (int s = 0; s < 4; ++s) {
    for (int b = 0; b < 2; ++b) {
      const int dir = 2 * b - 1;
      const double phase = pi / 2.0 * s + pi / 4.0 * dir;
      ts.push_back({s, (s + dir + 4) % 4, b, std::polar(1.0, phase), 0});
    }
  }
  return Trellis(4, 2, 1, std::move(ts));
}

Trellis build_cc_trellis(std::span<const int> g0, std::span<const int> g1) {
  const int m0 = poly_degree(g0);
  const int m1 = poly_degree(g1);
  if (m0 < 1 || m1 < 1) throw std::invalid_argument("code polynomials need memory >= 1");
  if (m0 != m1) throw std::invalid_argument("code polynomials must have equal memory");
  const int m = m0;
  const int states = 1 << m;

  std::vector<Transition> ts;
  ts.reserve(static_cast<std::size_t>(states * 2));
  for (int s = 0; s < states; ++s) {
    for (int u = 0; u < 2; ++u) {
      // register[0] = u_k, register[i] = u_{k-i}
      const int reg = u | (s << 1);
      int c0 = 0;
      int c1 = 0;
      for (int i = 0; i <= m; ++i) {
        const int bit = (reg >> i) & 1;
        c0 ^= g0[static_cast<std::size_t>(i)] & bit;
        c1 ^= g1[static_cast<std::size_t>(i)] & bit;
      }
      const int next = reg & (states - 1);
      ts.push_back({s, next, u, Sample{}, static_cast<std::uint32_t>(c0 | (c1 << 1))});
    }
  }
  return Trellis(states, 2, 1, std::move(ts), 2);
}

int gfsk_point_index(Sample x) {
  using std::numbers::pi;
  double a = std::arg(x);
  if (a < 0) a += 2.0 * pi;
  const int m = static_cast<int>(std::lround((a - pi / 4.0) / (pi / 2.0)));
  return ((m % 4) + 4) % 4;
}

Trellis build_gfsk_isi_trellis(std::span<const Sample> taps) {
  using std::numbers::pi;
  if (taps.empty()) throw std::invalid_argument("GFSK-ISI trellis needs taps");
  if (taps.size() > 2) throw Unsupported("GFSK-ISI trellis supports at most two taps");
  const Sample h0 = taps[0];
  const Sample h1 = taps.size() > 1 ? taps[1] : Sample{};

  std::vector<Transition> ts;
  ts.reserve(32);
  for (int prev = 0; prev < 4; ++prev) {
    const Sample x_prev = std::polar(1.0, pi / 4.0 * (2 * prev + 1));
    for (int phase = 0; phase < 4; ++phase) {
      const int s = prev * 4 + phase;
      for (int b = 0; b < 2; ++b) {
        const int dir = 2 * b - 1;
        const Sample x = std::polar(1.0, pi / 2.0 * phase + pi / 4.0 * dir);
        Sample v{};
        v += h0 * x;
        v += h1 * x_prev;
        const int next = gfsk_point_index(x) * 4 + (phase + dir + 4) % 4;
        ts.push_back({s, next, b, v, 0});
      }
    }
  }
  return Trellis(16, 2, 1, std::move(ts));
}

}  // namespace oltd
