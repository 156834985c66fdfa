#include "source.hpp"

#include <cmath>

#include "rng.hpp"

namespace lvq {

Eigen::MatrixXd ar1_vectors(int dim, double rho, double var, int64_t count,
                            uint64_t seed) {
  if (dim <= 0 || count <= 0)
    fail(ErrorCode::InvalidArgument, "source shape must be positive");
  if (!(var > 0.0) || !(rho > -1.0 && rho < 1.0))
    fail(ErrorCode::InvalidArgument, "need var > 0 and |rho| < 1");
  Eigen::MatrixXd cov(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      cov(i, j) = var * std::pow(rho, std::abs(i - j));
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::InvalidArgument, "source covariance not positive definite");
  Eigen::MatrixXd l = llt.matrixL();

  Rng rng(derive_seed(seed, 0xda7a));
  Eigen::MatrixXd out(dim, count);
  Eigen::VectorXd z(dim);
  for (int64_t c = 0; c < count; ++c) {
    for (int i = 0; i < dim; ++i) z[i] = rng.next_normal();
    out.col(c) = l * z;
  }
  return out;
}

void split_train_eval(const Eigen::MatrixXd& all, Eigen::MatrixXd& train,
                      Eigen::MatrixXd& holdout) {
  const int64_t n = all.cols();
  const int64_t held = n / 10;
  train.resize(all.rows(), n - held);
  holdout.resize(all.rows(), held);
  int64_t t = 0, h = 0;
  for (int64_t i = 0; i < n; ++i) {
    if (i % 10 == 9)
      holdout.col(h++) = all.col(i);
    else
      train.col(t++) = all.col(i);
  }
}

double source_peak(const Eigen::MatrixXd& data) {
  if (data.size() == 0) fail(ErrorCode::EmptyInput, "no data for peak");
  double mean = data.mean();
  double var = (data.array() - mean).square().mean();
  return 4.0 * std::sqrt(var);
}

}  // namespace lvq
