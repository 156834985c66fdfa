#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace lvq {

// A lattice is the set {B*u : u integer}; columns of B are the basis
// vectors. The inverse is cached because every quantization needs it.
class LatticeBasis {
 public:
  explicit LatticeBasis(Eigen::MatrixXd b);

  int dim() const { return static_cast<int>(b_.rows()); }
  const Eigen::MatrixXd& matrix() const { return b_; }
  const Eigen::MatrixXd& inverse() const { return inv_; }
  double det() const { return det_; }
  double cell_volume() const { return det_ < 0 ? -det_ : det_; }

 private:
  Eigen::MatrixXd b_;
  Eigen::MatrixXd inv_;
  double det_ = 0.0;
};

struct LatticePoint {
  std::vector<int64_t> coords;  // integer coordinates in the given basis
  Eigen::VectorXd embedding;    // B * coords
};

enum class NamedLattice { Zn, Dn, E8, A2 };

// Fixed generator matrices. Dn uses columns {e_i - e_n, 2*e_n}, whose dual
// vectors all have norm <= sqrt(n)/2; that keeps small-radius brute-force
// boxes provably sufficient in the dimensions we test.
Eigen::MatrixXd named_generator(NamedLattice which, int dim);

const char* named_lattice_label(NamedLattice which);

// Babai rounding: u = round(B^-1 y). Fast, inexact for skewed bases.
LatticePoint babai_round(const LatticeBasis& basis, const Eigen::VectorXd& y);

// Exact nearest-point rules for the structured lattices.
LatticePoint nearest_point_zn(const Eigen::VectorXd& y);
LatticePoint nearest_point_dn(const Eigen::VectorXd& y);
LatticePoint nearest_point_e8(const Eigen::VectorXd& y);
LatticePoint nearest_point_a2(const Eigen::VectorXd& y);

// Exhaustive search over the coordinate box center +- radius where center is
// the Babai rounding. Candidate subtrees are pruned only when strictly worse
// than the incumbent, so exactness and the lexicographic tie rule survive.
// Guard: (2*radius+1)^dim must not exceed 10^7.
LatticePoint brute_force_nearest(const LatticeBasis& basis,
                                 const Eigen::VectorXd& y, int radius);

struct NsmEstimate {
  double g;          // normalized second moment estimate
  double std_error;  // standard error of the mean
  uint64_t samples;
};

// Monte Carlo NSM: sample uniformly over the fundamental cell B*[0,1)^n,
// quantize, average ||e||^2 / (n * V^(2/n)).
NsmEstimate nsm_monte_carlo(NamedLattice which, int dim, uint64_t samples,
                            uint64_t seed);
// Same estimate for an arbitrary basis quantized with Babai rounding.
NsmEstimate nsm_babai_monte_carlo(const LatticeBasis& basis, uint64_t samples,
                                  uint64_t seed);

}  // namespace lvq
