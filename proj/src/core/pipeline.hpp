#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "model.hpp"

namespace lvq {

struct TrainConfig {
  QuantizerKind kind = QuantizerKind::Usq;
  std::vector<double> lambdas = {0.008};  // one per rate target, increasing
  int iters = 5000;
  int batch = 256;
  double lr = 0.01;
  uint64_t seed = 0;
};

Model train_model(const Eigen::MatrixXd& train_data, const TrainConfig& cfg);

// Serialized stream: self-describing header plus entropy-coded payload.
std::vector<uint8_t> compress(const Model& model, const Eigen::MatrixXd& data,
                              int target);
Eigen::MatrixXd decompress(const Model& model,
                           const std::vector<uint8_t>& stream);

struct RdPoint {
  double lambda = 0.0;
  int target = 0;
  double bits_per_vector = 0.0;  // payload only; the header is fixed cost
  double mse = 0.0;              // per scalar
  double psnr_db = 0.0;
};

// Runs the real coder end to end on `data` and cross-checks that the decoder
// reproduces the encoder-side reconstruction bit for bit.
RdPoint evaluate(const Model& model, const Eigen::MatrixXd& data, int target,
                 double peak);

// One single-rate model per weight, trained and evaluated independently
// (seed offset by index), optionally across threads. Results keep the input
// order regardless of scheduling.
std::vector<RdPoint> sweep_lambdas(const Eigen::MatrixXd& train_split,
                                   const Eigen::MatrixXd& report_split,
                                   const TrainConfig& base,
                                   const std::vector<double>& lambdas,
                                   double peak, int jobs);

}  // namespace lvq
