#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace oltd {

/// One received or transmitted baseband sample, taken once per symbol period.
using Sample = std::complex<double>;
using SampleSeq = std::vector<Sample>;

/// Bits are stored one per byte, values 0 or 1.
using Bit = std::uint8_t;
using Bits = std::vector<Bit>;

/// Per-bit log-likelihood ratios, log p(1)/p(0); positive favors 1.
using LlrSequence = std::vector<double>;

/// Raised when a detector meets likelihoods it cannot turn into posteriors
/// (non-finite entries, or a row that is zero everywhere).
class NumericalDegeneracy : public std::runtime_error {
 public:
  explicit NumericalDegeneracy(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for configurations outside what the library models.
class Unsupported : public std::logic_error {
 public:
  explicit Unsupported(const std::string& what) : std::logic_error(what) {}
};

}  // namespace oltd
