#pragma once

#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace lvq {

// Byte-oriented range coder with a 64-bit range register and a fixed
// probability denominator of 2^16, so the scale division is a shift and
// encode/decode stay bit-exact across platforms. Carries are deferred
// through a cache byte plus a run of pending 0xFF bytes; the low register
// lives in 128 bits so the carry is just bit 64.
class RangeEncoder {
 public:
  static constexpr uint32_t kTotalBits = 16;
  static constexpr uint32_t kTotal = 1u << kTotalBits;

  // Appends a symbol occupying [cum, cum+freq) / kTotal. freq >= 1.
  void encode(uint32_t cum, uint32_t freq);

  // Seals the stream, emitting only as many tail bytes as the final
  // interval requires; the decoder reads missing tail bytes as zero.
  // The first byte of every stream is 0x00.
  std::vector<uint8_t> finish();

  size_t bytes_so_far() const { return out_.size(); }

 private:
  void shift_low();

  unsigned __int128 low_ = 0;
  uint64_t range_ = ~0ull;
  uint8_t cache_ = 0;  // the mandatory leading zero byte until displaced
  uint64_t pending_ff_ = 0;
  bool empty_ = true;
  bool finished_ = false;
  std::vector<uint8_t> out_;
};

class RangeDecoder {
 public:
  static constexpr uint32_t kTotal = RangeEncoder::kTotal;

  // The buffer is borrowed, not copied; it must outlive the decoder.
  RangeDecoder(const uint8_t* data, size_t size);

  // Cumulative-frequency estimate of the next symbol; the caller maps it to
  // a symbol s with cum(s) <= target < cum(s)+freq(s) and then consumes it.
  uint32_t decode_target();
  void consume(uint32_t cum, uint32_t freq);

 private:
  uint8_t next_byte();

  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
  // Reads past the buffer decode as zero, which legitimately happens for at
  // most 8 bytes (the decoder's lookahead minus the encoder's minimal tail).
  // Anything deeper means the stream was truncated.
  int past_end_ = 0;
  bool primed_ = false;  // priming is lazy so empty streams stay valid
  uint64_t code_ = 0;
  uint64_t range_ = ~0ull;
};

}  // namespace lvq
