#pragma once

#include <Eigen/Dense>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace lvq {

// Variable-rate control: a shared base step q_s plus one learned log-gain
// per operating point. Target m quantizes with step exp(log_gain[m]) * q_s,
// so one model serves several rate points.
struct GainVector {
  Eigen::VectorXd log_gain;  // size >= 1; all zeros means single-rate

  static GainVector single() {
    GainVector g;
    g.log_gain = Eigen::VectorXd::Zero(1);
    return g;
  }
  static GainVector zeros(int count) {
    if (count < 1) fail(ErrorCode::InvalidArgument, "need at least one target");
    GainVector g;
    g.log_gain = Eigen::VectorXd::Zero(count);
    return g;
  }

  int count() const { return static_cast<int>(log_gain.size()); }
  double gain(int m) const;
  double step(int m, double q_s) const { return gain(m) * q_s; }
};

// Multirate training pairs each target with its own rate weight; the weights
// must be distinct and sorted so the targets are ordered low-rate to
// high-rate by construction.
void validate_lambdas(const std::vector<double>& lambdas);

inline int sample_target(Rng& rng, int count) {
  return static_cast<int>(rng.next_below(static_cast<uint64_t>(count)));
}

}  // namespace lvq
