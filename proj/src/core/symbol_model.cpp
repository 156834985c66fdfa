#include "symbol_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "entropy_model.hpp"
#include "errors.hpp"
#include "rounding.hpp"

namespace lvq {

namespace {

constexpr uint32_t kTotal = RangeEncoder::kTotal;      // 2^16
constexpr uint32_t kWindowBudget = kTotal - 2;         // escapes take 1 each
constexpr int64_t kMinHalfWidth = 32;
constexpr int64_t kMaxHalfWidth = 30000;

uint64_t zigzag(int64_t v) {
  return (static_cast<uint64_t>(v) << 1) ^ static_cast<uint64_t>(v >> 63);
}

int64_t unzigzag(uint64_t z) {
  return static_cast<int64_t>(z >> 1) ^ -static_cast<int64_t>(z & 1);
}

// Deterministic largest-remainder apportionment of kWindowBudget among the
// window bins, every bin at least 1. The window never exceeds 60001 bins, so
// a positive count always fits.
std::vector<uint32_t> quantize_masses(const std::vector<double>& mass) {
  const size_t n = mass.size();
  double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  std::vector<double> x(n);
  if (!(total > 0.0) || !std::isfinite(total)) {
    // degenerate model (all mass underflowed); fall back to uniform
    std::fill(x.begin(), x.end(), double(kWindowBudget) / double(n));
  } else {
    for (size_t i = 0; i < n; ++i) x[i] = mass[i] / total * kWindowBudget;
  }
  std::vector<uint32_t> f(n);
  int64_t sum = 0;
  for (size_t i = 0; i < n; ++i) {
    f[i] = std::max<uint32_t>(1, static_cast<uint32_t>(x[i]));
    sum += f[i];
  }
  int64_t deficit = int64_t(kWindowBudget) - sum;
  if (deficit > 0) {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t(0));
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      double ra = x[a] - std::floor(x[a]);
      double rb = x[b] - std::floor(x[b]);
      if (ra != rb) return ra > rb;
      return a < b;
    });
    // spread evenly when the deficit exceeds the bin count
    int64_t each = deficit / int64_t(n);
    int64_t rest = deficit % int64_t(n);
    for (size_t i = 0; i < n; ++i) f[i] += static_cast<uint32_t>(each);
    for (int64_t i = 0; i < rest; ++i) f[order[size_t(i)]] += 1;
  } else if (deficit < 0) {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t(0));
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (f[a] != f[b]) return f[a] > f[b];
      return a < b;
    });
    size_t i = 0;
    while (deficit < 0) {
      if (f[order[i]] > 1) {
        --f[order[i]];
        ++deficit;
      }
      i = (i + 1) % n;
    }
  }
  return f;
}

}  // namespace

WindowModel::WindowModel(double mean, double sig, int64_t stride,
                         int64_t phase) {
  if (!(sig > 0.0) || !std::isfinite(mean))
    fail(ErrorCode::InvalidArgument, "window model needs finite mean, sig > 0");
  if (stride < 1) fail(ErrorCode::InvalidArgument, "stride must be >= 1");
  stride_ = stride;
  phase = ((phase % stride) + stride) % stride;

  // center: admissible value nearest the mean
  int64_t c0 = checked_symbol(mean);
  int64_t r = (((c0 - phase) % stride) + stride) % stride;
  int64_t below = c0 - r;
  int64_t above = below + stride;
  int64_t center =
      (mean - double(below) <= double(above) - mean) ? below : above;

  int64_t half = static_cast<int64_t>(std::ceil(12.0 * sig / double(stride)));
  half = std::clamp(half, kMinHalfWidth, kMaxHalfWidth);
  lo_value_ = center - half * stride_;
  const size_t bins = static_cast<size_t>(2 * half + 1);

  std::vector<double> mass(bins);
  for (size_t j = 0; j < bins; ++j) {
    double v = double(lo_value_ + int64_t(j) * stride_);
    mass[j] = bin_probability(v - mean, sig);
  }
  std::vector<uint32_t> f = quantize_masses(mass);

  cdf_.resize(bins + 3);
  cdf_[0] = 0;
  cdf_[1] = 1;  // low escape
  for (size_t j = 0; j < bins; ++j) cdf_[j + 2] = cdf_[j + 1] + f[j];
  cdf_[bins + 2] = kTotal;  // high escape
}

int64_t WindowModel::hi() const {
  return lo_value_ + int64_t(symbol_count() - 3) * stride_;
}

int WindowModel::symbol_for(int64_t value) const {
  int64_t phase = ((lo_value_ % stride_) + stride_) % stride_;
  if ((((value - phase) % stride_) + stride_) % stride_ != 0)
    fail(ErrorCode::InvalidArgument, "value violates the model's stride");
  if (value < lo_value_) return 0;
  if (value > hi()) return symbol_count() - 1;
  return static_cast<int>((value - lo_value_) / stride_) + 1;
}

int WindowModel::find(uint32_t target) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  return static_cast<int>(it - cdf_.begin()) - 1;
}

double WindowModel::code_bits(int64_t value) const {
  int sym = symbol_for(value);
  double bits = -std::log2(double(freq(sym)) / double(kTotal));
  if (is_escape(sym)) bits += 64.0;  // fixed-length fallback payload
  return bits;
}

void encode_value(RangeEncoder& enc, const WindowModel& model, int64_t value) {
  int sym = model.symbol_for(value);
  enc.encode(model.cum(sym), model.freq(sym));
  if (model.is_escape(sym)) {
    uint64_t z = zigzag(value);
    for (int i = 0; i < 8; ++i) {
      uint32_t b = static_cast<uint32_t>((z >> (8 * i)) & 0xFF);
      enc.encode(b << 8, 256);
    }
  }
}

int64_t decode_value(RangeDecoder& dec, const WindowModel& model) {
  int sym = model.find(dec.decode_target());
  dec.consume(model.cum(sym), model.freq(sym));
  if (!model.is_escape(sym)) return model.value_at(sym);
  uint64_t z = 0;
  for (int i = 0; i < 8; ++i) {
    uint32_t b = dec.decode_target() >> 8;
    dec.consume(b << 8, 256);
    z |= static_cast<uint64_t>(b) << (8 * i);
  }
  return unzigzag(z);
}

void encode_bit(RangeEncoder& enc, int bit) {
  enc.encode(bit ? kTotal / 2 : 0, kTotal / 2);
}

int decode_bit(RangeDecoder& dec) {
  int bit = dec.decode_target() >= kTotal / 2 ? 1 : 0;
  dec.consume(bit ? kTotal / 2 : 0, kTotal / 2);
  return bit;
}

}  // namespace lvq
