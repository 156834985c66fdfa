#include "bdrate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace lvq {

namespace {

struct Curve {
  std::vector<double> psnr, log_rate;
  double lo, hi;
};

Curve prepare(const std::vector<RdPoint>& pts, const char* which) {
  if (pts.size() < 4)
    fail(ErrorCode::TooFewPoints,
         std::string(which) + " curve needs at least 4 points");
  Curve c;
  for (const RdPoint& p : pts) {
    if (!std::isfinite(p.psnr_db) || !std::isfinite(p.bits_per_vector) ||
        p.bits_per_vector <= 0.0)
      fail(ErrorCode::InvalidArgument,
           std::string(which) + " curve has a bad point");
    c.psnr.push_back(p.psnr_db);
    c.log_rate.push_back(std::log10(p.bits_per_vector));
  }
  std::vector<size_t> order(c.psnr.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return c.psnr[a] < c.psnr[b]; });
  Curve s;
  for (size_t i : order) {
    s.psnr.push_back(c.psnr[i]);
    s.log_rate.push_back(c.log_rate[i]);
  }
  for (size_t i = 1; i < s.psnr.size(); ++i)
    if (s.psnr[i] == s.psnr[i - 1])
      fail(ErrorCode::InvalidArgument,
           std::string(which) + " curve has duplicate quality points");
  s.lo = s.psnr.front();
  s.hi = s.psnr.back();
  return s;
}

// least-squares cubic in (psnr - shift); shift keeps the Vandermonde tame
Eigen::Vector4d fit(const Curve& c, double shift) {
  Eigen::MatrixXd a(c.psnr.size(), 4);
  Eigen::VectorXd y(c.psnr.size());
  for (size_t i = 0; i < c.psnr.size(); ++i) {
    double t = c.psnr[i] - shift;
    a(i, 0) = 1.0;
    a(i, 1) = t;
    a(i, 2) = t * t;
    a(i, 3) = t * t * t;
    y[i] = c.log_rate[i];
  }
  return a.colPivHouseholderQr().solve(y);
}

double integral(const Eigen::Vector4d& k, double a, double b) {
  auto anti = [&](double t) {
    return t * (k[0] + t * (k[1] / 2 + t * (k[2] / 3 + t * k[3] / 4)));
  };
  return anti(b) - anti(a);
}

}  // namespace

double bd_rate_percent(const std::vector<RdPoint>& ref,
                       const std::vector<RdPoint>& test) {
  Curve r = prepare(ref, "reference");
  Curve t = prepare(test, "test");
  double lo = std::max(r.lo, t.lo);
  double hi = std::min(r.hi, t.hi);
  if (!(hi - lo >= 0.5))
    fail(ErrorCode::InsufficientOverlap,
         "curves share less than 0.5 dB of quality range");

  double shift = 0.5 * (lo + hi);
  Eigen::Vector4d kr = fit(r, shift);
  Eigen::Vector4d kt = fit(t, shift);
  double avg_diff =
      (integral(kt, lo - shift, hi - shift) - integral(kr, lo - shift, hi - shift)) /
      (hi - lo);
  return 100.0 * (std::pow(10.0, avg_diff) - 1.0);
}

}  // namespace lvq
