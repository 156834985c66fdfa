#include "rangecoder.hpp"

namespace lvq {

namespace {
constexpr uint64_t kRenormBound = 1ull << 48;
constexpr unsigned __int128 kLowMask =
    ((static_cast<unsigned __int128>(1) << 64) - 1);
}  // namespace

void RangeEncoder::shift_low() {
  uint32_t carry = static_cast<uint32_t>(low_ >> 64);
  uint8_t top = static_cast<uint8_t>(low_ >> 56);
  if (carry || top != 0xFF) {
    // carry implies the windowed low collapsed below 2^56, so top is never
    // 0xFF here and cache_ + carry cannot itself overflow
    out_.push_back(static_cast<uint8_t>(cache_ + carry));
    for (; pending_ff_ > 0; --pending_ff_)
      out_.push_back(static_cast<uint8_t>(0xFF + carry));
    cache_ = top;
  } else {
    ++pending_ff_;
  }
  low_ = (low_ << 8) & kLowMask;
}

void RangeEncoder::encode(uint32_t cum, uint32_t freq) {
  if (finished_) fail(ErrorCode::InvalidArgument, "encoder already finished");
  if (freq == 0 || cum + freq > kTotal)
    fail(ErrorCode::InvalidArgument, "invalid coding interval");
  empty_ = false;
  uint64_t r = range_ >> kTotalBits;
  low_ += static_cast<unsigned __int128>(r) * cum;
  range_ = r * freq;
  while (range_ < kRenormBound) {
    shift_low();
    range_ <<= 8;
  }
}

std::vector<uint8_t> RangeEncoder::finish() {
  if (finished_) fail(ErrorCode::InvalidArgument, "encoder already finished");
  finished_ = true;
  if (empty_) return {};
  // shortest tail: the smallest k whose 2^(64-8k)-aligned round-up of low
  // still lands inside [low, low+range); the decoder pads the rest with
  // zero bytes
  int k = 8;
  unsigned __int128 v = low_;
  for (int t = 0; t <= 8; ++t) {
    unsigned __int128 step = static_cast<unsigned __int128>(1) << (64 - 8 * t);
    unsigned __int128 cand = (low_ + step - 1) & ~(step - 1);
    if (cand - low_ < range_) {
      v = cand;
      k = t;
      break;
    }
  }
  low_ = v;
  for (int i = 0; i < k; ++i) shift_low();
  // drain the pipeline; a carry can remain only when k == 0
  uint32_t carry = static_cast<uint32_t>(low_ >> 64);
  out_.push_back(static_cast<uint8_t>(cache_ + carry));
  for (; pending_ff_ > 0; --pending_ff_)
    out_.push_back(static_cast<uint8_t>(0xFF + carry));
  return std::move(out_);
}

RangeDecoder::RangeDecoder(const uint8_t* data, size_t size)
    : data_(data), size_(size) {}

uint8_t RangeDecoder::next_byte() {
  if (pos_ < size_) return data_[pos_++];
  if (++past_end_ > 8)
    fail(ErrorCode::CorruptStream, "range stream exhausted: truncated input");
  return 0;
}

uint32_t RangeDecoder::decode_target() {
  if (!primed_) {
    next_byte();  // encoder's mandatory leading zero byte
    for (int i = 0; i < 8; ++i) code_ = (code_ << 8) | next_byte();
    primed_ = true;
  }
  uint64_t r = range_ >> RangeEncoder::kTotalBits;
  uint64_t t = code_ / r;
  return static_cast<uint32_t>(t < kTotal - 1 ? t : kTotal - 1);
}

void RangeDecoder::consume(uint32_t cum, uint32_t freq) {
  if (!primed_)
    fail(ErrorCode::InvalidArgument, "consume before decode_target");
  if (freq == 0 || cum + freq > kTotal)
    fail(ErrorCode::InvalidArgument, "invalid coding interval");
  uint64_t r = range_ >> RangeEncoder::kTotalBits;
  code_ -= r * cum;
  range_ = r * freq;
  while (range_ < kRenormBound) {
    code_ = (code_ << 8) | next_byte();
    range_ <<= 8;
  }
}

}  // namespace lvq
