#include "entropy_model.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace lvq {

namespace {
constexpr double kLog2e = 1.4426950408889634;
}

double bin_probability(double delta, double sig) {
  if (!(sig > 0.0)) fail(ErrorCode::InvalidArgument, "sig must be positive");
  return det::normal_mass((delta - 0.5) / sig, (delta + 0.5) / sig);
}

double log2_bin_probability(double delta, double sig) {
  if (!(sig > 0.0)) fail(ErrorCode::InvalidArgument, "sig must be positive");
  return det::log_normal_mass((delta - 0.5) / sig, (delta + 0.5) / sig) *
         kLog2e;
}

double discrete_entropy_bits(double sig) {
  if (!(sig > 0.0)) fail(ErrorCode::InvalidArgument, "sig must be positive");
  // all mass beyond 40 standard deviations is far below double resolution
  int64_t kmax = static_cast<int64_t>(std::ceil(40.0 * sig + 1.0));
  double h = 0.0;
  for (int64_t k = -kmax; k <= kmax; ++k) {
    double p = bin_probability(static_cast<double>(k), sig);
    if (p > 0.0) h -= p * det::log(p);
  }
  return h * kLog2e;
}

}  // namespace lvq
