#include "detmath.hpp"

#include <cmath>  // ldexp/frexp/isnan only; exactness guaranteed by IEEE-754
#include <cstdint>
#include <limits>

namespace lvq::det {

namespace {

constexpr double kLn2Hi = 6.93147180369123816490e-01;  // upper bits of ln 2
constexpr double kLn2Lo = 1.90821492927058770002e-10;  // ln 2 - kLn2Hi
constexpr double kInvLn2 = 1.44269504088896338700e+00;
constexpr double kLn2 = 6.93147180559945309417e-01;
constexpr double kInvSqrt2 = 7.07106781186547524401e-01;
constexpr double kInvSqrtPi = 5.64189583547756286948e-01;  // 1/sqrt(pi)
constexpr double kLogSqrt2Pi = 9.18938533204672741781e-01; // ln sqrt(2*pi)
constexpr double kInf = std::numeric_limits<double>::infinity();

double poly_expm1_core(double r) {
  // Taylor for exp(r) - 1 on |r| <= 0.5*ln2, degree 13 in Horner form.
  double s = 1.0 / 6227020800.0;  // 1/13!
  s = s * r + 1.0 / 479001600.0;
  s = s * r + 1.0 / 39916800.0;
  s = s * r + 1.0 / 3628800.0;
  s = s * r + 1.0 / 362880.0;
  s = s * r + 1.0 / 40320.0;
  s = s * r + 1.0 / 5040.0;
  s = s * r + 1.0 / 720.0;
  s = s * r + 1.0 / 120.0;
  s = s * r + 1.0 / 24.0;
  s = s * r + 1.0 / 6.0;
  s = s * r + 0.5;
  s = s * r + 1.0;
  return s * r;
}

}  // namespace

double exp(double x) {
  if (std::isnan(x)) return x;
  if (x > 709.782712893384) return kInf;
  if (x < -745.2) return 0.0;
  // x = k*ln2 + r with |r| <= ln2/2; the two-part constant keeps r exact
  // enough that the polynomial dominates the error.
  double kd = x * kInvLn2;
  kd = (kd >= 0.0) ? static_cast<double>(static_cast<long long>(kd + 0.5))
                   : static_cast<double>(static_cast<long long>(kd - 0.5));
  int k = static_cast<int>(kd);
  double r = (x - kd * kLn2Hi) - kd * kLn2Lo;
  double em1 = poly_expm1_core(r);
  return std::ldexp(1.0 + em1, k);
}

double log(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0.0) return -kInf;
  if (x == kInf) return kInf;
  int e = 0;
  double m = std::frexp(x, &e);  // x = m * 2^e, m in [0.5, 1)
  if (m < kInvSqrt2) {           // renormalize m into [sqrt(1/2), sqrt(2))
    m *= 2.0;
    e -= 1;
  }
  // log(m) = 2 atanh(s), s = (m-1)/(m+1), |s| <= 3-2*sqrt(2) ~ 0.1716
  double s = (m - 1.0) / (m + 1.0);
  double z = s * s;
  double p = 1.0 / 19.0;
  p = p * z + 1.0 / 17.0;
  p = p * z + 1.0 / 15.0;
  p = p * z + 1.0 / 13.0;
  p = p * z + 1.0 / 11.0;
  p = p * z + 1.0 / 9.0;
  p = p * z + 1.0 / 7.0;
  p = p * z + 1.0 / 5.0;
  p = p * z + 1.0 / 3.0;
  p = p * z + 1.0;
  double lm = 2.0 * s * p;
  double ed = static_cast<double>(e);
  return ed * kLn2Hi + (lm + ed * kLn2Lo);
}

double log1p(double x) {
  if (std::isnan(x)) return x;
  if (x <= -1.0) {
    return (x == -1.0) ? -kInf : std::numeric_limits<double>::quiet_NaN();
  }
  // Small |x|: atanh series directly on u = x/(2+x) avoids forming 1+x.
  if (x > -0.25 && x < 0.25) {
    double s = x / (2.0 + x);
    double z = s * s;
    double p = 1.0 / 15.0;
    p = p * z + 1.0 / 13.0;
    p = p * z + 1.0 / 11.0;
    p = p * z + 1.0 / 9.0;
    p = p * z + 1.0 / 7.0;
    p = p * z + 1.0 / 5.0;
    p = p * z + 1.0 / 3.0;
    p = p * z + 1.0;
    return 2.0 * s * p;
  }
  return log(1.0 + x);
}

namespace {

// Cody's rational approximations (the classic CALERF decomposition):
// region 1 gives erf directly, regions 2 and 3 give erfcx; erfc follows by
// multiplying exp(-x^2) computed with a split argument so the squared term
// stays accurate for large x.

const double kA[5] = {3.16112374387056560e00, 1.13864154151050156e02,
                      3.77485237685302021e02, 3.20937758913846947e03,
                      1.85777706184603153e-1};
const double kB[4] = {2.36012909523441209e01, 2.44024637934444173e02,
                      1.28261652607737228e03, 2.84423683343917062e03};
const double kC[9] = {5.64188496988670089e-1, 8.88314979438837594e00,
                      6.61191906371416295e01, 2.98635138197400131e02,
                      8.81952221241769090e02, 1.71204761263407058e03,
                      2.05107837782607147e03, 1.23033935479799725e03,
                      2.15311535474403846e-8};
const double kD[8] = {1.57449261107098347e01, 1.17693950891312499e02,
                      5.37181101862009858e02, 1.62138957456669019e03,
                      3.29079923573345963e03, 4.36261909014324716e03,
                      3.43936767414372164e03, 1.23033935480374942e03};
const double kP[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                      1.25781726111229246e-1, 1.60837851487422766e-2,
                      6.58749161529837803e-4, 1.63153871373020978e-2};
const double kQ[5] = {2.56852019228982242e00, 1.87295284992346047e00,
                      5.27905102951428412e-1, 6.05183413124413191e-2,
                      2.33520497626869185e-3};

double erf_small(double x) {  // |x| <= 0.46875
  double z = x * x;
  double xnum = kA[4] * z;
  double xden = z;
  for (int i = 0; i < 3; ++i) {
    xnum = (xnum + kA[i]) * z;
    xden = (xden + kB[i]) * z;
  }
  return x * (xnum + kA[3]) / (xden + kB[3]);
}

double erfcx_mid(double y) {  // 0.46875 <= y <= 4
  double xnum = kC[8] * y;
  double xden = y;
  for (int i = 0; i < 7; ++i) {
    xnum = (xnum + kC[i]) * y;
    xden = (xden + kD[i]) * y;
  }
  return (xnum + kC[7]) / (xden + kD[7]);
}

double erfcx_large(double y) {  // y > 4
  double z = 1.0 / (y * y);
  double xnum = kP[5] * z;
  double xden = z;
  for (int i = 0; i < 4; ++i) {
    xnum = (xnum + kP[i]) * z;
    xden = (xden + kQ[i]) * z;
  }
  double r = z * (xnum + kP[4]) / (xden + kQ[4]);
  return (kInvSqrtPi - r) / y;
}

double exp_neg_sq(double y) {
  // exp(-y^2) with y^2 split into an exactly-representable part plus a
  // remainder, following Cody: keeps ~1 ulp instead of y*y rounding error
  // getting amplified by the exponential.
  double ysq = static_cast<double>(static_cast<long long>(y * 16.0)) / 16.0;
  double del = (y - ysq) * (y + ysq);
  return exp(-ysq * ysq) * exp(-del);
}

}  // namespace

double erfcx(double x) {
  if (x < 0.46875) {
    // Only queried for x >= 0 in practice; fall back through erfc.
    return exp(x * x) * erfc(x);
  }
  if (x <= 4.0) return erfcx_mid(x);
  if (x > 2.6e307) return 0.0;  // would overflow 1/x path
  return erfcx_large(x);
}

double erfc(double x) {
  if (std::isnan(x)) return x;
  double y = x < 0.0 ? -x : x;
  double result;
  if (y <= 0.46875) {
    result = 1.0 - erf_small(x);
    return result;
  }
  if (y <= 4.0) {
    result = exp_neg_sq(y) * erfcx_mid(y);
  } else if (y < 26.6) {
    result = exp_neg_sq(y) * erfcx_large(y);
  } else {
    result = 0.0;
  }
  return (x < 0.0) ? 2.0 - result : result;
}

double erf(double x) {
  if (std::isnan(x)) return x;
  double y = x < 0.0 ? -x : x;
  if (y <= 0.46875) return erf_small(x);
  double c = erfc(y);
  return (x < 0.0) ? c - 1.0 : 1.0 - c;
}

double normal_cdf(double x) { return 0.5 * erfc(-x * kInvSqrt2); }

double normal_mass(double a, double b) {
  // Phi(b) - Phi(a) = 0.5*(erfc(a/sqrt2) - erfc(b/sqrt2)); picking the
  // branch by sign keeps both erfc arguments non-negative, so no
  // catastrophic cancellation against the constant 2.
  double as = a * kInvSqrt2;
  double bs = b * kInvSqrt2;
  if (as >= 0.0) return 0.5 * (erfc(as) - erfc(bs));
  if (bs <= 0.0) return 0.5 * (erfc(-bs) - erfc(-as));
  return 1.0 - 0.5 * (erfc(bs) + erfc(-as));
}

double log_normal_mass(double a, double b) {
  if (a >= 0.0) {
    // Both bounds in the upper tail: factor the dominant erfc.
    double as = a * kInvSqrt2;
    double bs = b * kInvSqrt2;
    double ea = erfcx(as);
    double ratio = exp(as * as - bs * bs) * erfcx(bs) / ea;
    // erfc(as) = exp(-as^2) * ea
    return -kLn2 - as * as + log(ea) + log1p(-ratio);
  }
  if (b <= 0.0) return log_normal_mass(-b, -a);
  return log(normal_mass(a, b));
}

BinRate bin_rate(double x, double sig) {
  double a = (x + 0.5) / sig;
  double b = (x - 0.5) / sig;
  double p = normal_mass(b, a);
  double bits, ra, rb;  // ra = phi(a)/p, rb = phi(b)/p
  if (p > 1e-280) {
    bits = -log(p) * kInvLn2;
    double pa = exp(-0.5 * a * a);
    double pb = exp(-0.5 * b * b);
    // 1/sqrt(2*pi) folded into a shared factor below.
    ra = pa / p;
    rb = pb / p;
  } else {
    // Deep-tail branch: work with log p so the gradient stays informative
    // instead of degenerating to 0/0 when the mass underflows.
    double lp = log_normal_mass(b, a);
    bits = -lp * kInvLn2;
    ra = exp(-0.5 * a * a - lp);
    rb = exp(-0.5 * b * b - lp);
  }
  constexpr double kInvSqrt2Pi = 3.98942280401432677940e-01;
  ra *= kInvSqrt2Pi;
  rb *= kInvSqrt2Pi;
  BinRate out;
  out.bits = bits;
  // d bits/d p = -1/(p ln2); dp/dx = (phi(a)-phi(b))/sig;
  // dp/dsig = (b*phi(b) - a*phi(a))/sig.
  out.d_x = (rb - ra) / (sig * kLn2);
  out.d_sig = (a * ra - b * rb) / (sig * kLn2);
  return out;
}

}  // namespace lvq::det
