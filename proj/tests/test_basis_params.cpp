#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/basis_params.hpp"
#include "core/rng.hpp"

using namespace lvq;

namespace {

BasisParams random_params(Rng& rng, int dim, double span) {
  BasisParams p = BasisParams::identity(dim);
  for (int i = 0; i < p.skew_count(); ++i) {
    p.skew_u[i] = (rng.next_unit() - 0.5) * span;
    p.skew_v[i] = (rng.next_unit() - 0.5) * span;
  }
  for (int i = 0; i < dim; ++i) p.log_sigma[i] = (rng.next_unit() - 0.5) * 2.0;
  return p;
}

}  // namespace

TEST_CASE("cayley basics") {
  // zero skew is the identity
  Eigen::VectorXd z = Eigen::VectorXd::Zero(6);
  CHECK((cayley(z, 4) - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);

  // rotations: orthogonal with determinant +1, never -1
  Rng rng(2024);
  for (int dim : {2, 3, 4, 8}) {
    for (int it = 0; it < 50; ++it) {
      Eigen::VectorXd s(dim * (dim - 1) / 2);
      for (int i = 0; i < s.size(); ++i) s[i] = (rng.next_unit() - 0.5) * 6.0;
      Eigen::MatrixXd q = cayley(s, dim);
      CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(dim, dim))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
      CHECK(q.determinant() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  // n=2 closed form: skew value tan(phi/2) rotates by -phi
  double phi = 0.3;
  Eigen::VectorXd s1(1);
  s1[0] = std::tan(phi / 2.0);
  Eigen::MatrixXd q = cayley(s1, 2);
  CHECK(q(0, 0) == doctest::Approx(std::cos(phi)).epsilon(1e-14));
  CHECK(q(0, 1) == doctest::Approx(std::sin(phi)).epsilon(1e-14));
  CHECK(q(1, 0) == doctest::Approx(-std::sin(phi)).epsilon(1e-14));
}

TEST_CASE("materialized basis invariants") {
  Rng rng(7);
  for (int dim : {2, 4, 8}) {
    for (int it = 0; it < 30; ++it) {
      BasisParams p = random_params(rng, dim, 3.0);
      MaterializedBasis m = materialize(p);
      // W is the exact inverse by construction
      CHECK((m.b * m.w - Eigen::MatrixXd::Identity(dim, dim))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
      // |det B| tracks the singular values
      CHECK(m.abs_det ==
            doctest::Approx(std::fabs(m.b.determinant())).epsilon(1e-9));
      double prod = 1.0;
      for (int i = 0; i < dim; ++i) prod *= std::exp(p.log_sigma[i]);
      CHECK(m.abs_det == doctest::Approx(prod).epsilon(1e-12));
      // singular values of B match sigma (sorted)
      Eigen::VectorXd sv =
          Eigen::JacobiSVD<Eigen::MatrixXd>(m.b).singularValues();
      Eigen::VectorXd want = m.sigma;
      std::sort(want.data(), want.data() + dim, std::greater<double>());
      CHECK((sv - want).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  // identity params materialize to the identity basis
  MaterializedBasis id = materialize(BasisParams::identity(3));
  CHECK((id.b - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
  CHECK(id.abs_det == 1.0);
}

TEST_CASE("cayley gradient matches finite differences") {
  Rng rng(55);
  for (int dim : {2, 4, 7}) {
    int k = dim * (dim - 1) / 2;
    for (int it = 0; it < 10; ++it) {
      Eigen::VectorXd s(k);
      for (int i = 0; i < k; ++i) s[i] = (rng.next_unit() - 0.5) * 2.0;
      Eigen::MatrixXd q_bar(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) q_bar(i, j) = rng.next_unit() - 0.5;

      Eigen::VectorXd grad = Eigen::VectorXd::Zero(k);
      cayley_backward(s, dim, cayley(s, dim), q_bar, grad);

      const double h = 1e-6;
      for (int i = 0; i < k; ++i) {
        Eigen::VectorXd sp = s, sm = s;
        sp[i] += h;
        sm[i] -= h;
        double fd = ((cayley(sp, dim) - cayley(sm, dim)).cwiseProduct(q_bar))
                        .sum() /
                    (2 * h);
        CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("factored basis gradients match finite differences") {
  Rng rng(91);
  for (int dim : {2, 4, 8}) {
    BasisParams p = random_params(rng, dim, 2.0);
    Eigen::MatrixXd b_bar(dim, dim), w_bar(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        b_bar(i, j) = rng.next_unit() - 0.5;
        w_bar(i, j) = rng.next_unit() - 0.5;
      }
    // scalar probe: loss = <b_bar, B> + <w_bar, W>
    auto loss = [&](const BasisParams& q) {
      MaterializedBasis m = materialize(q);
      return (m.b.cwiseProduct(b_bar)).sum() + (m.w.cwiseProduct(w_bar)).sum();
    };

    BasisGrad g(p);
    materialize_backward(p, materialize(p), b_bar, w_bar, g);

    const double h = 1e-6;
    auto fd_check = [&](Eigen::VectorXd BasisParams::*field,
                        const Eigen::VectorXd& got) {
      const Eigen::VectorXd& base = p.*field;
      for (int i = 0; i < base.size(); ++i) {
        BasisParams pp = p, pm = p;
        (pp.*field)[i] += h;
        (pm.*field)[i] -= h;
        double fd = (loss(pp) - loss(pm)) / (2 * h);
        CHECK(got[i] == doctest::Approx(fd).epsilon(2e-5));
      }
    };
    fd_check(&BasisParams::skew_u, g.skew_u);
    fd_check(&BasisParams::skew_v, g.skew_v);
    fd_check(&BasisParams::log_sigma, g.log_sigma);
  }
}

TEST_CASE("gradient accumulation adds instead of overwriting") {
  BasisParams p = BasisParams::identity(3);
  p.skew_u << 0.1, -0.2, 0.3;
  MaterializedBasis m = materialize(p);
  Eigen::MatrixXd b_bar = Eigen::MatrixXd::Constant(3, 3, 0.25);
  Eigen::MatrixXd w_bar = Eigen::MatrixXd::Zero(3, 3);
  BasisGrad once(p), twice(p);
  materialize_backward(p, m, b_bar, w_bar, once);
  materialize_backward(p, m, b_bar, w_bar, twice);
  materialize_backward(p, m, b_bar, w_bar, twice);
  CHECK((twice.skew_u - 2.0 * once.skew_u).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((twice.log_sigma - 2.0 * once.log_sigma).cwiseAbs().maxCoeff() < 1e-14);
}
