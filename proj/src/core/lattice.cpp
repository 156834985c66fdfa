#include "lattice.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <limits>

#include "rng.hpp"
#include "rounding.hpp"

namespace lvq {

namespace {

void check_vector(const Eigen::VectorXd& y, int dim) {
  if (y.size() != dim) {
    fail(ErrorCode::DimensionMismatch, "input vector dimension mismatch");
  }
  if (!y.allFinite()) {
    fail(ErrorCode::NonFinite, "input vector has non-finite entries");
  }
}

LatticePoint make_point(const Eigen::MatrixXd& b, std::vector<int64_t> u) {
  Eigen::VectorXd ud(b.cols());
  for (int i = 0; i < ud.size(); ++i) ud[i] = static_cast<double>(u[i]);
  LatticePoint p;
  p.coords = std::move(u);
  p.embedding = b * ud;
  return p;
}

// Integer coordinates of an embedding that is known to be a lattice point:
// the solve lands within float noise of integers, so plain rounding is safe.
std::vector<int64_t> coords_of(const Eigen::MatrixXd& inv,
                               const Eigen::VectorXd& z) {
  Eigen::VectorXd u = inv * z;
  std::vector<int64_t> out(u.size());
  for (int i = 0; i < u.size(); ++i) {
    out[i] = static_cast<int64_t>(round_half_even(u[i]));
  }
  return out;
}

}  // namespace

LatticeBasis::LatticeBasis(Eigen::MatrixXd b) : b_(std::move(b)) {
  if (b_.rows() == 0 || b_.rows() != b_.cols()) {
    fail(ErrorCode::InvalidArgument, "basis must be square and non-empty");
  }
  if (!b_.allFinite()) {
    fail(ErrorCode::NonFinite, "basis has non-finite entries");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b_);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(b_.rows() - 1);
  if (!(smin > 0.0) || !(smax / smin <= 1e12)) {
    fail(ErrorCode::SingularBasis, "basis is singular or near-singular");
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(b_);
  inv_ = lu.inverse();
  det_ = lu.determinant();
}

Eigen::MatrixXd named_generator(NamedLattice which, int dim) {
  switch (which) {
    case NamedLattice::Zn: {
      if (dim < 1) fail(ErrorCode::InvalidArgument, "Zn needs dim >= 1");
      return Eigen::MatrixXd::Identity(dim, dim);
    }
    case NamedLattice::Dn: {
      if (dim < 2) fail(ErrorCode::InvalidArgument, "Dn needs dim >= 2");
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
      for (int j = 0; j + 1 < dim; ++j) {
        g(j, j) = 1.0;
        g(dim - 1, j) = -1.0;
      }
      g(dim - 1, dim - 1) = 2.0;
      return g;
    }
    case NamedLattice::E8: {
      if (dim != 8) fail(ErrorCode::InvalidArgument, "E8 is 8-dimensional");
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(8, 8);
      g(0, 0) = 2.0;
      for (int j = 1; j < 7; ++j) {
        g(j - 1, j) = -1.0;
        g(j, j) = 1.0;
      }
      for (int i = 0; i < 8; ++i) g(i, 7) = 0.5;
      return g;
    }
    case NamedLattice::A2: {
      if (dim != 2) fail(ErrorCode::InvalidArgument, "A2 is 2-dimensional");
      Eigen::MatrixXd g(2, 2);
      g << 1.0, 0.5, 0.0, std::sqrt(3.0) / 2.0;
      return g;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown lattice");
}

const char* named_lattice_label(NamedLattice which) {
  switch (which) {
    case NamedLattice::Zn: return "zn";
    case NamedLattice::Dn: return "dn";
    case NamedLattice::E8: return "e8";
    case NamedLattice::A2: return "a2";
  }
  return "?";
}

LatticePoint babai_round(const LatticeBasis& basis, const Eigen::VectorXd& y) {
  check_vector(y, basis.dim());
  Eigen::VectorXd t = basis.inverse() * y;
  std::vector<int64_t> u(t.size());
  for (int i = 0; i < t.size(); ++i) {
    u[i] = static_cast<int64_t>(round_half_even(t[i]));
  }
  return make_point(basis.matrix(), std::move(u));
}

LatticePoint nearest_point_zn(const Eigen::VectorXd& y) {
  if (y.size() == 0) fail(ErrorCode::InvalidArgument, "empty input");
  if (!y.allFinite()) fail(ErrorCode::NonFinite, "non-finite input");
  LatticePoint p;
  p.coords.resize(y.size());
  p.embedding.resize(y.size());
  for (int i = 0; i < y.size(); ++i) {
    double r = round_half_even(y[i]);
    p.coords[i] = static_cast<int64_t>(r);
    p.embedding[i] = r;
  }
  return p;
}

namespace {

// Round every coordinate; if the sum is odd, re-round the coordinate with
// the largest rounding error to its second-nearest integer. Returns the
// embedding-space integer vector.
Eigen::VectorXd dn_round(const Eigen::VectorXd& y) {
  Eigen::VectorXd r(y.size());
  int64_t sum = 0;
  for (int i = 0; i < y.size(); ++i) {
    r[i] = round_half_even(y[i]);
    sum += static_cast<int64_t>(r[i]);
  }
  if (sum % 2 != 0) {
    int worst = 0;
    double worst_err = -1.0;
    for (int i = 0; i < y.size(); ++i) {
      double err = std::fabs(y[i] - r[i]);
      if (err > worst_err) {
        worst_err = err;
        worst = i;
      }
    }
    double err = y[worst] - r[worst];
    r[worst] += (err >= 0.0) ? 1.0 : -1.0;
  }
  return r;
}

}  // namespace

LatticePoint nearest_point_dn(const Eigen::VectorXd& y) {
  if (y.size() < 2) fail(ErrorCode::InvalidArgument, "Dn needs dim >= 2");
  if (!y.allFinite()) fail(ErrorCode::NonFinite, "non-finite input");
  static thread_local int cached_dim = -1;
  static thread_local Eigen::MatrixXd g, ginv;
  if (cached_dim != y.size()) {
    g = named_generator(NamedLattice::Dn, static_cast<int>(y.size()));
    ginv = g.inverse();
    cached_dim = static_cast<int>(y.size());
  }
  Eigen::VectorXd z = dn_round(y);
  LatticePoint p;
  p.coords = coords_of(ginv, z);
  p.embedding = z;
  return p;
}

LatticePoint nearest_point_e8(const Eigen::VectorXd& y) {
  if (y.size() != 8) fail(ErrorCode::DimensionMismatch, "E8 needs dim 8");
  if (!y.allFinite()) fail(ErrorCode::NonFinite, "non-finite input");
  static const Eigen::MatrixXd g = named_generator(NamedLattice::E8, 8);
  static const Eigen::MatrixXd ginv = g.inverse();
  Eigen::VectorXd half = Eigen::VectorXd::Constant(8, 0.5);
  Eigen::VectorXd a = dn_round(y);
  Eigen::VectorXd b = dn_round(y - half) + half;
  double da = (y - a).squaredNorm();
  double db = (y - b).squaredNorm();
  const Eigen::VectorXd& z = (da <= db) ? a : b;  // ties resolve to D8
  LatticePoint p;
  p.coords = coords_of(ginv, z);
  p.embedding = z;
  return p;
}

LatticePoint nearest_point_a2(const Eigen::VectorXd& y) {
  if (y.size() != 2) fail(ErrorCode::DimensionMismatch, "A2 needs dim 2");
  if (!y.allFinite()) fail(ErrorCode::NonFinite, "non-finite input");
  static const Eigen::MatrixXd g = named_generator(NamedLattice::A2, 2);
  static const Eigen::MatrixXd ginv = g.inverse();
  Eigen::VectorXd t = ginv * y;
  int64_t c0 = static_cast<int64_t>(round_half_even(t[0]));
  int64_t c1 = static_cast<int64_t>(round_half_even(t[1]));
  // The hexagonal Voronoi cell is covered by the Babai candidate plus its
  // eight coordinate neighbors; scanning them in lex order keeps ties on the
  // lexicographically smallest coordinates.
  double best = std::numeric_limits<double>::infinity();
  int64_t bu0 = c0, bu1 = c1;
  Eigen::VectorXd z(2);
  for (int64_t du0 = -1; du0 <= 1; ++du0) {
    for (int64_t du1 = -1; du1 <= 1; ++du1) {
      int64_t u0 = c0 + du0, u1 = c1 + du1;
      z[0] = g(0, 0) * u0 + g(0, 1) * u1;
      z[1] = g(1, 0) * u0 + g(1, 1) * u1;
      double d = (y - z).squaredNorm();
      if (d < best) {
        best = d;
        bu0 = u0;
        bu1 = u1;
      }
    }
  }
  LatticePoint p;
  p.coords = {bu0, bu1};
  Eigen::VectorXd ud(2);
  ud << static_cast<double>(bu0), static_cast<double>(bu1);
  p.embedding = g * ud;
  return p;
}

LatticePoint brute_force_nearest(const LatticeBasis& basis,
                                 const Eigen::VectorXd& y, int radius) {
  check_vector(y, basis.dim());
  if (radius < 0) fail(ErrorCode::InvalidArgument, "radius must be >= 0");
  const int n = basis.dim();
  double cand = 1.0;
  for (int i = 0; i < n; ++i) cand *= 2.0 * radius + 1.0;
  if (cand > 1e7) {
    fail(ErrorCode::SearchTooLarge, "candidate box exceeds 1e7 points");
  }

  Eigen::VectorXd t = basis.inverse() * y;
  std::vector<int64_t> center(n);
  for (int i = 0; i < n; ++i) {
    center[i] = static_cast<int64_t>(round_half_even(t[i]));
  }

  // Rotate into upper-triangular coordinates so partial residuals from the
  // already-fixed trailing components are final; that makes subtree pruning
  // exact (prune strictly-worse only, to preserve tie candidates).
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis.matrix());
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd yr = q.transpose() * y;

  std::vector<int64_t> u(n), best_u;
  double best = std::numeric_limits<double>::infinity();

  // DFS from the last coordinate down; res[k] depends only on u[k..n-1].
  auto search = [&](auto&& self, int level, double acc) -> void {
    for (int64_t off = -radius; off <= radius; ++off) {
      u[level] = center[level] + off;
      double res = yr[level];
      for (int j = level; j < n; ++j) {
        res -= r(level, j) * static_cast<double>(u[j]);
      }
      double acc2 = acc + res * res;
      if (acc2 > best) continue;  // strictly worse: cannot hold a tie
      if (level == 0) {
        if (acc2 < best) {
          best = acc2;
          best_u = u;
        } else if (acc2 == best && u < best_u) {
          best_u = u;
        }
      } else {
        self(self, level - 1, acc2);
      }
    }
  };
  search(search, n - 1, 0.0);
  return make_point(basis.matrix(), std::move(best_u));
}

namespace {

NsmEstimate nsm_run(const Eigen::MatrixXd& b, uint64_t samples, uint64_t seed,
                    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& q) {
  if (samples == 0) fail(ErrorCode::InvalidArgument, "samples must be > 0");
  const int n = static_cast<int>(b.rows());
  double vol = std::fabs(b.determinant());
  double denom = n * std::pow(vol, 2.0 / n);
  Rng rng(seed);
  Eigen::VectorXd w(n), y(n);
  double mean = 0.0, m2 = 0.0;
  for (uint64_t i = 0; i < samples; ++i) {
    for (int k = 0; k < n; ++k) w[k] = rng.next_unit();
    y = b * w;
    Eigen::VectorXd e = y - q(y);
    double g = e.squaredNorm() / denom;
    double delta = g - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (g - mean);
  }
  NsmEstimate out;
  out.g = mean;
  out.samples = samples;
  double var = (samples > 1) ? m2 / static_cast<double>(samples - 1) : 0.0;
  out.std_error = std::sqrt(var / static_cast<double>(samples));
  return out;
}

}  // namespace

NsmEstimate nsm_monte_carlo(NamedLattice which, int dim, uint64_t samples,
                            uint64_t seed) {
  Eigen::MatrixXd g = named_generator(which, dim);
  switch (which) {
    case NamedLattice::Zn:
      return nsm_run(g, samples, seed, [](const Eigen::VectorXd& y) {
        return nearest_point_zn(y).embedding;
      });
    case NamedLattice::Dn:
      return nsm_run(g, samples, seed, [](const Eigen::VectorXd& y) {
        return nearest_point_dn(y).embedding;
      });
    case NamedLattice::E8:
      return nsm_run(g, samples, seed, [](const Eigen::VectorXd& y) {
        return nearest_point_e8(y).embedding;
      });
    case NamedLattice::A2:
      return nsm_run(g, samples, seed, [](const Eigen::VectorXd& y) {
        return nearest_point_a2(y).embedding;
      });
  }
  fail(ErrorCode::InvalidArgument, "unknown lattice");
}

NsmEstimate nsm_babai_monte_carlo(const LatticeBasis& basis, uint64_t samples,
                                  uint64_t seed) {
  return nsm_run(basis.matrix(), samples, seed,
                 [&](const Eigen::VectorXd& y) {
                   return babai_round(basis, y).embedding;
                 });
}

}  // namespace lvq
