#include "basis_params.hpp"

#include "detmath.hpp"

namespace lvq {

namespace {

Eigen::MatrixXd skew_from(const Eigen::VectorXd& skew, int dim) {
  if (skew.size() != dim * (dim - 1) / 2)
    fail(ErrorCode::DimensionMismatch, "skew parameter count");
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, dim);
  int k = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j, ++k) {
      s(i, j) = skew[k];
      s(j, i) = -skew[k];
    }
  return s;
}

}  // namespace

BasisParams BasisParams::identity(int dim) {
  if (dim <= 0) fail(ErrorCode::InvalidArgument, "dimension must be positive");
  BasisParams p;
  p.dim = dim;
  p.skew_u = Eigen::VectorXd::Zero(dim * (dim - 1) / 2);
  p.skew_v = Eigen::VectorXd::Zero(dim * (dim - 1) / 2);
  p.log_sigma = Eigen::VectorXd::Zero(dim);
  return p;
}

Eigen::MatrixXd cayley(const Eigen::VectorXd& skew, int dim) {
  Eigen::MatrixXd s = skew_from(skew, dim);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
  // I - S is nonsingular for every real skew S (its spectrum is 1 - i*t)
  return (id - s).partialPivLu().solve(id + s);
}

void cayley_backward(const Eigen::VectorXd& skew, int dim,
                     const Eigen::MatrixXd& q, const Eigen::MatrixXd& q_bar,
                     Eigen::VectorXd& grad) {
  Eigen::MatrixXd s = skew_from(skew, dim);
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
  // dQ = (I-S)^-1 dS (Q + I)  =>  S_bar = (I-S)^-T q_bar (Q + I)^T
  Eigen::MatrixXd m_t = (id - s).transpose().partialPivLu().solve(q_bar);
  Eigen::MatrixXd s_bar = m_t * (q + id).transpose();
  int k = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j, ++k)
      grad[k] += s_bar(i, j) - s_bar(j, i);
}

MaterializedBasis materialize(const BasisParams& p) {
  if (p.log_sigma.size() != p.dim)
    fail(ErrorCode::DimensionMismatch, "log_sigma size");
  MaterializedBasis m;
  m.u = cayley(p.skew_u, p.dim);
  m.v = cayley(p.skew_v, p.dim);
  m.sigma.resize(p.dim);
  m.abs_det = 1.0;
  for (int i = 0; i < p.dim; ++i) {
    m.sigma[i] = det::exp(p.log_sigma[i]);
    m.abs_det *= m.sigma[i];
  }
  m.b = m.u * m.sigma.asDiagonal() * m.v.transpose();
  m.w = m.v * m.sigma.cwiseInverse().asDiagonal() * m.u.transpose();
  return m;
}

void materialize_backward(const BasisParams& p, const MaterializedBasis& m,
                          const Eigen::MatrixXd& b_bar,
                          const Eigen::MatrixXd& w_bar, BasisGrad& out) {
  // B = U E V^T and W = V F U^T with E = diag(sigma), F = E^-1
  Eigen::VectorXd inv_sigma = m.sigma.cwiseInverse();
  Eigen::MatrixXd u_bar = b_bar * m.v * m.sigma.asDiagonal() +
                          w_bar.transpose() * m.v * inv_sigma.asDiagonal();
  Eigen::MatrixXd v_bar = b_bar.transpose() * m.u * m.sigma.asDiagonal() +
                          w_bar * m.u * inv_sigma.asDiagonal();
  Eigen::VectorXd e_bar = (m.u.transpose() * b_bar * m.v).diagonal();
  Eigen::VectorXd f_bar = (m.v.transpose() * w_bar * m.u).diagonal();
  for (int i = 0; i < p.dim; ++i)
    out.log_sigma[i] +=
        e_bar[i] * m.sigma[i] - f_bar[i] * inv_sigma[i];
  cayley_backward(p.skew_u, p.dim, m.u, u_bar, out.skew_u);
  cayley_backward(p.skew_v, p.dim, m.v, v_bar, out.skew_v);
}

}  // namespace lvq
