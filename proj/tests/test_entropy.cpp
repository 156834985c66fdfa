#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/entropy_model.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

using namespace lvq;

TEST_CASE("bin probability against the libm normal CDF") {
  Rng rng(404);
  for (int it = 0; it < 20000; ++it) {
    double delta = (rng.next_unit() - 0.5) * 20.0;
    double sig = 0.05 + rng.next_unit() * 6.0;
    double a = (delta - 0.5) / (sig * std::sqrt(2.0));
    double b = (delta + 0.5) / (sig * std::sqrt(2.0));
    double want = 0.5 * (std::erf(b) - std::erf(a));
    if (want < 1e-290) continue;  // oracle loses all precision first
    CHECK(bin_probability(delta, sig) ==
          doctest::Approx(want).epsilon(1e-11));
  }
}

TEST_CASE("probabilities sum to one") {
  for (double sig : {0.2, 1.0, 3.5, 17.0}) {
    double total = 0.0;
    int64_t kmax = static_cast<int64_t>(std::ceil(42.0 * sig)) + 2;
    for (int64_t k = -kmax; k <= kmax; ++k)
      total += bin_probability(static_cast<double>(k), sig);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("log-domain probability") {
  // agrees with the plain mass where both are representable
  CHECK(std::exp2(log2_bin_probability(3.0, 0.7)) ==
        doctest::Approx(bin_probability(3.0, 0.7)).epsilon(1e-12));
  // finite far beyond underflow
  CHECK(log2_bin_probability(120.0, 1.0) ==
        doctest::Approx(-10309.249644709642).epsilon(1e-12));
  CHECK(std::isfinite(log2_bin_probability(2000.0, 0.5)));
}

TEST_CASE("relaxed codelength equals the negative log mass") {
  Rng rng(8);
  for (int it = 0; it < 5000; ++it) {
    double x = (rng.next_unit() - 0.5) * 12.0;
    double sig = 0.1 + rng.next_unit() * 4.0;
    CHECK(relaxed_bits(x, sig).bits ==
          doctest::Approx(-log2_bin_probability(x, sig)).epsilon(1e-11));
  }
}

TEST_CASE("discrete entropy frozen values and asymptotics") {
  CHECK(discrete_entropy_bits(1.0) ==
        doctest::Approx(2.1048326541776681).epsilon(1e-12));
  CHECK(discrete_entropy_bits(0.25) ==
        doctest::Approx(0.31246607797739406).epsilon(1e-12));
  CHECK(discrete_entropy_bits(4.0) ==
        doctest::Approx(4.0508428534229077).epsilon(1e-12));

  // monotone in the scale
  double prev = 0.0;
  for (double sig = 0.1; sig < 40.0; sig *= 1.6) {
    double h = discrete_entropy_bits(sig);
    CHECK(h > prev);
    prev = h;
  }

  // converges to the differential entropy of the matching Gaussian
  double limit = 0.5 * std::log2(2.0 * M_PI * M_E * 64.0 * 64.0);
  CHECK(std::fabs(discrete_entropy_bits(64.0) - limit) < 1e-3);
}

TEST_CASE("invalid scales are rejected") {
  CHECK_THROWS_AS(bin_probability(0.0, 0.0), Error);
  CHECK_THROWS_AS(discrete_entropy_bits(-1.0), Error);
  try {
    bin_probability(0.0, -2.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}
