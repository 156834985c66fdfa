#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "errors.hpp"

namespace lvq {

// Stationary AR(1) Gaussian vectors: covariance C_ij = var * rho^|i-j|,
// drawn as L * z with the explicit Cholesky factor so every platform
// produces the same doubles from the same seed. Columns are vectors.
Eigen::MatrixXd ar1_vectors(int dim, double rho, double var, int64_t count,
                            uint64_t seed);

// Every tenth vector (index 9 mod 10) is held out for evaluation.
void split_train_eval(const Eigen::MatrixXd& all, Eigen::MatrixXd& train,
                      Eigen::MatrixXd& holdout);

// Distortion reference level: four standard deviations of the scalar data.
double source_peak(const Eigen::MatrixXd& data);

}  // namespace lvq
