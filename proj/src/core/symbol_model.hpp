#pragma once

#include <cstdint>
#include <vector>

#include "rangecoder.hpp"

namespace lvq {

// Frequency table for integer symbols drawn from a Gaussian of the given
// mean and scale. Admissible values satisfy v = phase (mod stride) and live
// in a window wide enough to cover twelve standard deviations; two escape
// symbols catch everything outside it, falling back to a fixed eight-byte
// code. Every admissible symbol keeps a frequency of at least one so any
// integer remains encodable regardless of how badly the model fits.
class WindowModel {
 public:
  WindowModel(double mean, double sig, int64_t stride = 1, int64_t phase = 0);

  int symbol_count() const { return static_cast<int>(cdf_.size()) - 1; }
  int64_t lo() const { return lo_value_; }
  int64_t hi() const;
  int64_t stride() const { return stride_; }

  bool is_escape(int sym) const {
    return sym == 0 || sym == symbol_count() - 1;
  }
  // only meaningful for non-escape symbols
  int64_t value_at(int sym) const {
    return lo_value_ + static_cast<int64_t>(sym - 1) * stride_;
  }
  // escape index when the value falls outside the window; requires the value
  // to be admissible for the stride
  int symbol_for(int64_t value) const;

  uint32_t cum(int sym) const { return cdf_[sym]; }
  uint32_t freq(int sym) const { return cdf_[sym + 1] - cdf_[sym]; }
  int find(uint32_t target) const;

  // exact information content in bits of coding this value with this table
  double code_bits(int64_t value) const;

 private:
  std::vector<uint32_t> cdf_;  // cdf_[0] = 0 ... cdf_[count] = 2^16
  int64_t lo_value_ = 0;
  int64_t stride_ = 1;
};

// Symbol plus escape-payload round trip on top of the range coder.
void encode_value(RangeEncoder& enc, const WindowModel& model, int64_t value);
int64_t decode_value(RangeDecoder& dec, const WindowModel& model);

// Single fair bit, used for lattice coset selection.
void encode_bit(RangeEncoder& enc, int bit);
int decode_bit(RangeDecoder& dec);

}  // namespace lvq
