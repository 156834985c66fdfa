#pragma once

#include <cstdint>

#include "detmath.hpp"

namespace lvq {

// Per-dimension model for quantized coefficients: a zero-mean Gaussian of
// scale sig convolved with the unit quantization bin. `delta` is the bin
// center relative to the Gaussian mean, so the probability is the Gaussian
// mass of [delta-1/2, delta+1/2].
double bin_probability(double delta, double sig);

// log2 of the same mass, finite far beyond double underflow.
double log2_bin_probability(double delta, double sig);

// Differentiable codelength proxy evaluated at the noisy surrogate value.
inline det::BinRate relaxed_bits(double x, double sig) {
  return det::bin_rate(x, sig);
}

// Entropy in bits of the rounded variable round(N(0, sig^2) + U(-1/2,1/2)).
// Summed over the alphabet until the tail mass is negligible.
double discrete_entropy_bits(double sig);

}  // namespace lvq
