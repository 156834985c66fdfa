#include "gains.hpp"

#include <cmath>

#include "detmath.hpp"

namespace lvq {

double GainVector::gain(int m) const {
  if (m < 0 || m >= count())
    fail(ErrorCode::IndexOutOfRange, "gain target out of range");
  return det::exp(log_gain[m]);
}

void validate_lambdas(const std::vector<double>& lambdas) {
  if (lambdas.empty())
    fail(ErrorCode::InvalidArgument, "at least one rate weight is required");
  for (size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i]))
      fail(ErrorCode::InvalidArgument, "rate weights must be positive finite");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
      fail(ErrorCode::InvalidArgument, "rate weights must strictly increase");
  }
}

}  // namespace lvq
