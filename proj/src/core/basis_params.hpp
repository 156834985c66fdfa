#pragma once

#include <Eigen/Dense>

#include "errors.hpp"

namespace lvq {

// Learnable factored basis B = U * diag(exp(log_sigma)) * V^T. The rotations
// are Cayley transforms of skew-symmetric matrices, so any parameter vector
// yields a valid basis: orthogonal factors, strictly positive singular
// values, and an inverse that is available analytically. Optimization runs
// over the unconstrained parameters only.
struct BasisParams {
  int dim = 0;
  Eigen::VectorXd skew_u;     // dim*(dim-1)/2, upper triangle row-major
  Eigen::VectorXd skew_v;
  Eigen::VectorXd log_sigma;  // dim

  static BasisParams identity(int dim);
  int skew_count() const { return dim * (dim - 1) / 2; }
};

struct MaterializedBasis {
  Eigen::MatrixXd u, v;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd b;  // u * diag(sigma) * v^T
  Eigen::MatrixXd w;  // exact inverse v * diag(1/sigma) * u^T
  double abs_det = 0.0;
};

struct BasisGrad {
  Eigen::VectorXd skew_u, skew_v, log_sigma;

  explicit BasisGrad(const BasisParams& p)
      : skew_u(Eigen::VectorXd::Zero(p.skew_count())),
        skew_v(Eigen::VectorXd::Zero(p.skew_count())),
        log_sigma(Eigen::VectorXd::Zero(p.dim)) {}
};

// Q = (I - S)^-1 (I + S), a proper rotation for any skew-symmetric S.
Eigen::MatrixXd cayley(const Eigen::VectorXd& skew, int dim);

// Accumulates d<loss>/d(skew) into grad given d<loss>/dQ.
void cayley_backward(const Eigen::VectorXd& skew, int dim,
                     const Eigen::MatrixXd& q, const Eigen::MatrixXd& q_bar,
                     Eigen::VectorXd& grad);

MaterializedBasis materialize(const BasisParams& p);

// Accumulates parameter gradients given loss gradients with respect to both
// the basis and its inverse (the forward pass uses W directly, so both
// matter).
void materialize_backward(const BasisParams& p, const MaterializedBasis& m,
                          const Eigen::MatrixXd& b_bar,
                          const Eigen::MatrixXd& w_bar, BasisGrad& out);

}  // namespace lvq
