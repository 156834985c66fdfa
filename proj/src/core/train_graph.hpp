#pragma once

#include <Eigen/Dense>

#include "basis_params.hpp"
#include "gains.hpp"

namespace lvq {

// Everything the rate-distortion objective learns. The quantizer itself
// (integer rounding) is not differentiable, so training substitutes uniform
// noise on [-1/2, 1/2) for the rounding error and a smooth bin-mass
// codelength for the coder; both relaxations are exact in expectation for
// the quantities they stand in for.
struct TrainState {
  BasisParams basis;
  Eigen::VectorXd mu;     // input mean, dim
  Eigen::VectorXd sigma;  // per-dimension coefficient scales, dim
  double q_s = 1.0;       // base quantization step
  GainVector gains;

  static TrainState init(int dim, int num_targets);
};

struct TrainGrad {
  BasisGrad basis;
  Eigen::VectorXd mu, sigma;
  double q_s = 0.0;
  Eigen::VectorXd log_gain;

  explicit TrainGrad(const TrainState& st)
      : basis(st.basis),
        mu(Eigen::VectorXd::Zero(st.mu.size())),
        sigma(Eigen::VectorXd::Zero(st.sigma.size())),
        log_gain(Eigen::VectorXd::Zero(st.gains.count())) {}
};

struct ForwardStats {
  double loss = 0.0;
  double mse = 0.0;        // per-sample mean squared error, averaged per dim
  double rate_bits = 0.0;  // mean bits per vector
};

// One relaxed pass over a batch (columns are input vectors) for one rate
// target. `noise` must match the batch's shape with entries in [-1/2, 1/2);
// the caller owns the draw so that evaluations are repeatable. Gradients
// accumulate into `grad` when it is non-null.
ForwardStats forward_pass(const TrainState& st, const Eigen::MatrixXd& batch,
                          const Eigen::MatrixXd& noise, double lambda,
                          int target, TrainGrad* grad);

// Flat parameter order: skew_u, skew_v, basis log_sigma, mu, sigma, q_s,
// log_gain. The optimizer walks this vector; the masks that freeze subsets
// of it live with the training loop.
Eigen::VectorXd flatten(const TrainState& st);
void unflatten(const Eigen::VectorXd& flat, TrainState& st);
Eigen::VectorXd flatten_grad(const TrainGrad& g);
int flat_size(const TrainState& st);

}  // namespace lvq
