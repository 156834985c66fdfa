#pragma once

// Self-contained double-precision exp/log/erf family built only from IEEE
// arithmetic (+,-,*,/, ldexp/frexp). libm's transcendentals differ in the
// last ulps between implementations, which would leak into the fixed-point
// CDF tables and break bit-identical payloads across platforms. Accuracy is
// checked against libm in the test suite (<= 1e-14 relative).

namespace lvq::det {

double exp(double x);
double log(double x);
double log1p(double x);

double erf(double x);
double erfc(double x);
// Scaled complement: erfcx(x) = exp(x^2) * erfc(x), finite for large x.
// Valid for x >= 0 (callers mirror negatives through erfc identities).
double erfcx(double x);

// Standard normal CDF and upper-tail-stable helpers.
double normal_cdf(double x);

// P(a < X < b) for X ~ N(0,1), a <= b, evaluated without cancellation by
// pairing erfc terms of matching sign.
double normal_mass(double a, double b);

// log of normal_mass, usable far into the tails where the mass underflows.
double log_normal_mass(double a, double b);

// Rate of one quantization bin in bits plus exact partials.
// x is the (noisy) coordinate in step units, sig the model scale in step
// units: p = Phi((x+1/2)/sig) - Phi((x-1/2)/sig), bits = -log2 p.
struct BinRate {
  double bits;
  double d_x;    // d bits / d x
  double d_sig;  // d bits / d sig
};
BinRate bin_rate(double x, double sig);

}  // namespace lvq::det
