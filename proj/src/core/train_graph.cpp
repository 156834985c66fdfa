#include "train_graph.hpp"

#include <cmath>

#include "detmath.hpp"
#include "errors.hpp"

namespace lvq {

TrainState TrainState::init(int dim, int num_targets) {
  TrainState st;
  st.basis = BasisParams::identity(dim);
  st.mu = Eigen::VectorXd::Zero(dim);
  st.sigma = Eigen::VectorXd::Ones(dim);
  st.q_s = 1.0;
  st.gains = GainVector::zeros(num_targets);
  return st;
}

ForwardStats forward_pass(const TrainState& st, const Eigen::MatrixXd& batch,
                          const Eigen::MatrixXd& noise, double lambda,
                          int target, TrainGrad* grad) {
  const int n = st.basis.dim;
  const int nb = static_cast<int>(batch.cols());
  if (batch.rows() != n || noise.rows() != n || noise.cols() != nb)
    fail(ErrorCode::DimensionMismatch, "batch/noise shape");
  if (nb == 0) fail(ErrorCode::EmptyInput, "empty batch");
  if (!batch.allFinite()) fail(ErrorCode::NonFinite, "batch has non-finite values");
  if (!(lambda > 0.0)) fail(ErrorCode::InvalidArgument, "lambda must be positive");

  MaterializedBasis m = materialize(st.basis);
  const double g = st.gains.gain(target);
  const double s = g * st.q_s;
  if (!(s > 0.0) || !std::isfinite(s))
    fail(ErrorCode::NonFinite, "quantization step degenerate");

  Eigen::MatrixXd fc = batch.colwise() - st.mu;
  Eigen::MatrixXd t = m.w * fc;
  Eigen::MatrixXd xt = t / s + noise;  // noisy surrogate of rounded coords

  // rate and its local derivatives, dimension scales measured in steps
  Eigen::VectorXd sig_t = st.sigma / s;
  double rate_sum = 0.0;
  Eigen::MatrixXd dx, dsig;
  if (grad) {
    dx.resize(n, nb);
    dsig.resize(n, nb);
  }
  for (int j = 0; j < nb; ++j)
    for (int i = 0; i < n; ++i) {
      det::BinRate br = det::bin_rate(xt(i, j), sig_t[i]);
      rate_sum += br.bits;
      if (grad) {
        dx(i, j) = br.d_x;
        dsig(i, j) = br.d_sig;
      }
    }

  Eigen::MatrixXd y = s * xt;
  Eigen::MatrixXd fhat = (m.b * y).colwise() + st.mu;
  Eigen::MatrixXd resid = fhat - batch;

  ForwardStats stats;
  stats.mse = resid.squaredNorm() / (double(n) * double(nb));
  stats.rate_bits = rate_sum / double(nb);
  stats.loss = stats.mse + lambda * stats.rate_bits;
  if (!std::isfinite(stats.loss))
    fail(ErrorCode::NonFinite, "loss diverged");
  if (!grad) return stats;

  const double wr = lambda / double(nb);  // rate weight per element
  Eigen::MatrixXd e_bar = resid * (2.0 / (double(n) * double(nb)));
  Eigen::MatrixXd b_bar = e_bar * y.transpose();
  Eigen::MatrixXd y_bar = m.b.transpose() * e_bar;
  grad->mu += e_bar.rowwise().sum();

  Eigen::MatrixXd xt_bar = s * y_bar + wr * dx;
  double s_bar = (y_bar.cwiseProduct(xt)).sum();
  // xt = t/s + noise: the surrogate itself moves when s does
  Eigen::MatrixXd x = t / s;
  s_bar -= (xt_bar.cwiseProduct(x)).sum() / s;
  // sig_t = sigma/s
  for (int i = 0; i < n; ++i) {
    double row_dsig = grad ? dsig.row(i).sum() : 0.0;
    grad->sigma[i] += wr * row_dsig / s;
    s_bar -= wr * row_dsig * st.sigma[i] / (s * s);
  }

  Eigen::MatrixXd t_bar = xt_bar / s;
  Eigen::MatrixXd w_bar = t_bar * fc.transpose();
  Eigen::MatrixXd fc_bar = m.w.transpose() * t_bar;
  grad->mu -= fc_bar.rowwise().sum();

  grad->q_s += s_bar * g;
  grad->log_gain[target] += s_bar * s;
  materialize_backward(st.basis, m, b_bar, w_bar, grad->basis);
  return stats;
}

int flat_size(const TrainState& st) {
  return 2 * st.basis.skew_count() + 3 * st.basis.dim + 1 + st.gains.count();
}

Eigen::VectorXd flatten(const TrainState& st) {
  Eigen::VectorXd out(flat_size(st));
  int k = st.basis.skew_count(), n = st.basis.dim;
  int at = 0;
  out.segment(at, k) = st.basis.skew_u;
  at += k;
  out.segment(at, k) = st.basis.skew_v;
  at += k;
  out.segment(at, n) = st.basis.log_sigma;
  at += n;
  out.segment(at, n) = st.mu;
  at += n;
  out.segment(at, n) = st.sigma;
  at += n;
  out[at++] = st.q_s;
  out.segment(at, st.gains.count()) = st.gains.log_gain;
  return out;
}

void unflatten(const Eigen::VectorXd& flat, TrainState& st) {
  if (flat.size() != flat_size(st))
    fail(ErrorCode::DimensionMismatch, "flat parameter size");
  int k = st.basis.skew_count(), n = st.basis.dim;
  int at = 0;
  st.basis.skew_u = flat.segment(at, k);
  at += k;
  st.basis.skew_v = flat.segment(at, k);
  at += k;
  st.basis.log_sigma = flat.segment(at, n);
  at += n;
  st.mu = flat.segment(at, n);
  at += n;
  st.sigma = flat.segment(at, n);
  at += n;
  st.q_s = flat[at++];
  st.gains.log_gain = flat.segment(at, st.gains.count());
}

Eigen::VectorXd flatten_grad(const TrainGrad& g) {
  int k = static_cast<int>(g.basis.skew_u.size());
  int n = static_cast<int>(g.mu.size());
  Eigen::VectorXd out(2 * k + 3 * n + 1 + g.log_gain.size());
  int at = 0;
  out.segment(at, k) = g.basis.skew_u;
  at += k;
  out.segment(at, k) = g.basis.skew_v;
  at += k;
  out.segment(at, n) = g.basis.log_sigma;
  at += n;
  out.segment(at, n) = g.mu;
  at += n;
  out.segment(at, n) = g.sigma;
  at += n;
  out[at++] = g.q_s;
  out.segment(at, g.log_gain.size()) = g.log_gain;
  return out;
}

}  // namespace lvq
