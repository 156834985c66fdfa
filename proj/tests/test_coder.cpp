#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "core/entropy_model.hpp"
#include "core/rng.hpp"
#include "core/symbol_model.hpp"

using namespace lvq;

namespace {

std::vector<int64_t> gaussian_symbols(Rng& rng, double mean, double sig,
                                      int count, int outlier_per_mille) {
  std::vector<int64_t> v(count);
  for (int i = 0; i < count; ++i) {
    if (outlier_per_mille > 0 &&
        rng.next_below(1000) < uint64_t(outlier_per_mille)) {
      int64_t mag = int64_t(1) << (10 + rng.next_below(44));
      v[i] = (rng.next_below(2) ? 1 : -1) * mag;
    } else {
      double x = mean + rng.next_normal() * sig;
      v[i] = llround(x);
    }
  }
  return v;
}

}  // namespace

TEST_CASE("round trip across many models and scales") {
  Rng rng(0xc0de);
  for (int trial = 0; trial < 60; ++trial) {
    double mean = (rng.next_unit() - 0.5) * 200.0;
    double sig = 0.02 + rng.next_unit() * 40.0;
    WindowModel model(mean, sig);
    auto data = gaussian_symbols(rng, mean, sig, 1500, trial % 3 == 0 ? 5 : 0);

    RangeEncoder enc;
    for (int64_t v : data) encode_value(enc, model, v);
    auto bytes = enc.finish();
    REQUIRE(!bytes.empty());
    CHECK(bytes[0] == 0x00);

    RangeDecoder dec(bytes.data(), bytes.size());
    for (int64_t v : data) CHECK(decode_value(dec, model) == v);
  }
}

TEST_CASE("interleaved per-dimension models share one stream") {
  Rng rng(0xfeed);
  std::vector<WindowModel> models;
  for (int d = 0; d < 6; ++d)
    models.emplace_back(0.0, 0.3 + 1.7 * d, 1, 0);
  std::vector<std::vector<int64_t>> cols(6);
  for (int d = 0; d < 6; ++d)
    cols[d] = gaussian_symbols(rng, 0.0, 0.3 + 1.7 * d, 800, 2);

  RangeEncoder enc;
  for (int i = 0; i < 800; ++i)
    for (int d = 0; d < 6; ++d) encode_value(enc, models[d], cols[d][i]);
  auto bytes = enc.finish();

  RangeDecoder dec(bytes.data(), bytes.size());
  for (int i = 0; i < 800; ++i)
    for (int d = 0; d < 6; ++d)
      CHECK(decode_value(dec, models[d]) == cols[d][i]);
}

TEST_CASE("encoding is deterministic") {
  Rng rng(1);
  WindowModel model(0.0, 2.5);
  auto data = gaussian_symbols(rng, 0.0, 2.5, 4000, 3);
  RangeEncoder a, b;
  for (int64_t v : data) encode_value(a, model, v);
  for (int64_t v : data) encode_value(b, model, v);
  CHECK(a.finish() == b.finish());
}

TEST_CASE("carry chains survive skewed intervals") {
  // near-certain symbols at a nonzero offset drive long 0xFF runs
  RangeEncoder enc;
  for (int i = 0; i < 5000; ++i) enc.encode(1, 65534);
  for (int i = 0; i < 100; ++i) enc.encode(65535, 1);
  auto bytes = enc.finish();
  RangeDecoder dec(bytes.data(), bytes.size());
  for (int i = 0; i < 5000; ++i) {
    uint32_t t = dec.decode_target();
    CHECK(t >= 1);
    CHECK(t < 65535);
    dec.consume(1, 65534);
  }
  for (int i = 0; i < 100; ++i) {
    CHECK(dec.decode_target() == 65535);
    dec.consume(65535, 1);
  }
}

TEST_CASE("measured size stays close to the model's own codelength") {
  Rng rng(0xace);
  for (double sig : {0.4, 1.0, 6.0, 25.0}) {
    WindowModel model(0.0, sig);
    auto data = gaussian_symbols(rng, 0.0, sig, 20000, 1);
    double want_bits = 0.0;
    RangeEncoder enc;
    for (int64_t v : data) {
      want_bits += model.code_bits(v);
      encode_value(enc, model, v);
    }
    double got_bits = 8.0 * double(enc.finish().size());
    CHECK(got_bits <= want_bits * 1.005 + 64.0);
    CHECK(got_bits >= want_bits * 0.999 - 64.0);
  }
}

TEST_CASE("tiny streams") {
  // a single almost-certain symbol costs at most three bytes
  WindowModel model(0.0, 0.05);
  RangeEncoder enc;
  encode_value(enc, model, 0);
  auto bytes = enc.finish();
  CHECK(bytes.size() <= 3);
  RangeDecoder dec(bytes.data(), bytes.size());
  CHECK(decode_value(dec, model) == 0);

  // zero symbols yield an empty payload
  RangeEncoder empty;
  CHECK(empty.finish().empty());
}

TEST_CASE("escape fallback reaches the full symbol range") {
  WindowModel model(0.0, 1.0);
  const int64_t big = 9007199254740992ll;  // 2^53
  std::vector<int64_t> vals = {big,     -big, 4503599627370496ll,
                               -777777, 1,    0,
                               42,      -9007199254740991ll};
  RangeEncoder enc;
  for (int64_t v : vals) encode_value(enc, model, v);
  auto bytes = enc.finish();
  RangeDecoder dec(bytes.data(), bytes.size());
  for (int64_t v : vals) CHECK(decode_value(dec, model) == v);
}

TEST_CASE("window shifts commute with coding") {
  Rng rng(0x5417);
  auto data = gaussian_symbols(rng, 0.0, 3.0, 3000, 0);
  WindowModel base(0.0, 3.0), shifted(129.0, 3.0);
  RangeEncoder a, b;
  for (int64_t v : data) {
    encode_value(a, base, v);
    encode_value(b, shifted, v + 129);
  }
  CHECK(a.finish() == b.finish());
}

TEST_CASE("stride-two models keep parity and save about one bit") {
  Rng rng(0x717);
  for (int phase = 0; phase < 2; ++phase) {
    WindowModel m2(0.0, 8.0, 2, phase);
    std::vector<int64_t> data;
    for (int i = 0; i < 4000; ++i) {
      int64_t v = llround(rng.next_normal() * 8.0);
      v -= ((v % 2 + 2) % 2 + (2 - phase)) % 2;  // snap to admissible parity
      data.push_back(v);
    }
    RangeEncoder enc;
    double full_bits = 0.0, half_bits = 0.0;
    WindowModel m1(0.0, 8.0);
    for (int64_t v : data) {
      encode_value(enc, m2, v);
      half_bits += m2.code_bits(v);
      full_bits += m1.code_bits(v);
    }
    auto bytes = enc.finish();
    RangeDecoder dec(bytes.data(), bytes.size());
    for (int64_t v : data) {
      int64_t got = decode_value(dec, m2);
      CHECK(got == v);
      CHECK(((got % 2) + 2) % 2 == phase);
    }
    double per_sym = (full_bits - half_bits) / double(data.size());
    CHECK(per_sym > 0.8);
    CHECK(per_sym < 1.2);
  }
}

TEST_CASE("fair bits") {
  Rng rng(9);
  std::vector<int> bits(4000);
  for (auto& b : bits) b = int(rng.next_below(2));
  RangeEncoder enc;
  for (int b : bits) encode_bit(enc, b);
  auto bytes = enc.finish();
  // 4000 fair bits should cost almost exactly 500 bytes
  CHECK(bytes.size() >= 499);
  CHECK(bytes.size() <= 502);
  RangeDecoder dec(bytes.data(), bytes.size());
  for (int b : bits) CHECK(decode_bit(dec) == b);
}

TEST_CASE("truncation is rejected or visibly wrong") {
  Rng rng(0xdead);
  WindowModel model(0.0, 4.0);
  auto data = gaussian_symbols(rng, 0.0, 4.0, 2000, 0);
  RangeEncoder enc;
  for (int64_t v : data) encode_value(enc, model, v);
  auto bytes = enc.finish();

  auto chopped = bytes;
  chopped.resize(bytes.size() - 12);
  bool caught = false;
  try {
    RangeDecoder dec(chopped.data(), chopped.size());
    for (int64_t v : data) {
      if (decode_value(dec, model) != v) {
        caught = true;
        break;
      }
    }
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CorruptStream);
    caught = true;
  }
  CHECK(caught);
}

TEST_CASE("api misuse is rejected") {
  RangeEncoder enc;
  CHECK_THROWS_AS(enc.encode(0, 0), Error);
  CHECK_THROWS_AS(enc.encode(65000, 1000), Error);
  RangeDecoder dec(nullptr, 0);
  CHECK_THROWS_AS(dec.consume(0, 100), Error);
  RangeEncoder done;
  done.encode(0, 32768);
  done.finish();
  CHECK_THROWS_AS(done.encode(0, 32768), Error);
  CHECK_THROWS_AS(done.finish(), Error);
  CHECK_THROWS_AS(WindowModel(0.0, -1.0), Error);
  WindowModel m2(0.0, 1.0, 2, 0);
  CHECK_THROWS_AS(m2.symbol_for(3), Error);  // wrong parity
}
