#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "errors.hpp"

namespace lvq {

// Adam over a flat parameter vector. A coordinate whose gradient is always
// zero keeps zero moments, so masking a parameter group by zeroing its
// gradient freezes it exactly.
class Adam {
 public:
  Adam(int size, double lr)
      : lr_(lr),
        m_(Eigen::VectorXd::Zero(size)),
        v_(Eigen::VectorXd::Zero(size)) {
    if (size <= 0 || !(lr > 0.0))
      fail(ErrorCode::InvalidArgument, "optimizer needs size > 0, lr > 0");
  }

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    if (params.size() != m_.size() || grad.size() != m_.size())
      fail(ErrorCode::DimensionMismatch, "optimizer size");
    ++t_;
    m_ = kBeta1 * m_ + (1.0 - kBeta1) * grad;
    v_ = kBeta2 * v_ + (1.0 - kBeta2) * grad.cwiseProduct(grad);
    double c1 = 1.0 - std::pow(kBeta1, t_);
    double c2 = 1.0 - std::pow(kBeta2, t_);
    for (int i = 0; i < params.size(); ++i)
      params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
  }

  int steps() const { return t_; }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  double lr_;
  int t_ = 0;
  Eigen::VectorXd m_, v_;
};

}  // namespace lvq
