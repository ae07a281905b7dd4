#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "nholo/nconn.hpp"
#include "test_support.hpp"

using namespace nholo;
using nholo::testing::parse_grid;
using nholo::testing::Rng;

namespace {

Eigen::VectorXd pt(std::initializer_list<double> v) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

NConnection from_grid(const std::vector<std::vector<std::string>>& src,
                      const Dims& dims) {
  return NConnection(dims, parse_grid(src, dims));
}

}  // namespace

TEST_CASE("curvature of the examples") {
  Dims d21(2, 1);
  NConnection nc = from_grid({{"y1", "x1*y1"}}, d21);
  Tensor3<double> omega = nconnection_curvature(nc, pt({2, 0, 3}));
  CHECK(omega(0, 0, 1) == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(omega(0, 1, 0) == omega(0, 0, 1) * -1.0);
  CHECK(omega(0, 0, 0) == 0.0);

  CHECK(max_abs(nconnection_curvature(zero_nconnection(d21), pt({2, 0, 3}))) ==
        0.0);

  // y-linear N with the curvature terms cancelling.
  NConnection lin = from_grid({{"y1", "0"}}, d21);
  CHECK(max_abs(nconnection_curvature(lin, pt({1, 2, 5}))) == 0.0);

  // A single horizontal index makes Omega vanish by antisymmetry.
  Dims d12(1, 2);
  NConnection nc1 = from_grid({{"sin(x1)*y2"}, {"x1*y1*y2"}}, d12);
  CHECK(max_abs(nconnection_curvature(nc1, pt({0.7, 1.1, -0.4}))) == 0.0);
}

TEST_CASE("bracket oracle agrees with the coefficient formula") {
  Dims d21(2, 1);
  NConnection nc = from_grid({{"y1", "x1*y1"}}, d21);
  Eigen::VectorXd v = nijenhuis_curvature_oracle(nc, 0, 1, pt({2, 0, 3}));
  CHECK(v[0] == doctest::Approx(-3.0).epsilon(1e-14));

  Rng rng(555u);
  for (int trial = 0; trial < 100; ++trial) {
    int n = nholo::testing::uniform_int(rng, 1, 3);
    int m = nholo::testing::uniform_int(rng, 1, 3);
    auto inst = nholo::testing::random_instance(rng, n, m);
    NConnection rnc = from_grid(inst.N, inst.dims);
    Eigen::VectorXd p = nholo::testing::random_point(rng, n + m);
    Tensor3<double> omega = nconnection_curvature(rnc, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd bracket = nijenhuis_curvature_oracle(rnc, i, j, p);
        for (int a = 0; a < m; ++a)
          CHECK(std::abs(bracket[a] - omega(a, i, j)) < 1e-9);
      }
  }
}

TEST_CASE("adapted frames: structure, duality, anholonomy") {
  Dims d11(1, 1);
  NConnection nc = from_grid({{"y1/2"}}, d11);
  AdaptedFramePoint fp = adapted_frames(nc, pt({0.3, 1.7}));
  CHECK(fp.frame(0, 0) == 1.0);
  CHECK(fp.frame(1, 1) == 1.0);
  CHECK(fp.frame(1, 0) == 0.0);                     // block upper-triangular
  CHECK(fp.frame(0, 1) == doctest::Approx(-0.85));  // -N^1_1 = -y1/2
  CHECK(fp.coframe(0, 1) == doctest::Approx(0.85));
  CHECK((fp.frame * fp.coframe - Eigen::MatrixXd::Identity(2, 2)).norm() <
        1e-15);
  CHECK(fp.W(1, 0, 1) == doctest::Approx(0.5).epsilon(1e-14));  // d_y (y/2)
  CHECK(fp.W(1, 1, 0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(fp.W(0, 0, 1) == 0.0);

  AdaptedFramePoint flat = adapted_frames(zero_nconnection(d11), pt({0, 0}));
  CHECK(flat.frame.isIdentity(0.0));
  CHECK(flat.coframe.isIdentity(0.0));
  CHECK(max_abs(flat.W) == 0.0);

  Rng rng(808u);
  for (int trial = 0; trial < 50; ++trial) {
    int n = nholo::testing::uniform_int(rng, 1, 3);
    int m = nholo::testing::uniform_int(rng, 1, 3);
    auto inst = nholo::testing::random_instance(rng, n, m);
    NConnection rnc = from_grid(inst.N, inst.dims);
    Eigen::VectorXd p = nholo::testing::random_point(rng, n + m);
    AdaptedFramePoint rfp = adapted_frames(rnc, p);
    CHECK((rfp.frame * rfp.coframe - Eigen::MatrixXd::Identity(n + m, n + m))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    // W antisymmetry in the lower pair.
    for (int gmm = 0; gmm < n + m; ++gmm)
      for (int al = 0; al < n + m; ++al)
        for (int be = 0; be < n + m; ++be)
          CHECK(rfp.W(gmm, al, be) == -rfp.W(gmm, be, al));
  }
}

TEST_CASE("frame derivative of scalar functions") {
  Dims d11(1, 1);
  NConnection nc = from_grid({{"0.75"}}, d11);  // constant N
  Expression f = parse("y1", d11);
  Eigen::VectorXd df = frame_derivative(f, nc, pt({0.2, 0.9}));
  CHECK(df[0] == doctest::Approx(-0.75).epsilon(1e-14));  // e_1(y1) = -N
  CHECK(df[1] == 1.0);

  // The vertical rows never depend on N; with N = 0, all rows are plain
  // partials.
  Rng rng(99u);
  Dims d22(2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = nholo::testing::random_instance(rng, 2, 2);
    NConnection rnc = from_grid(inst.N, inst.dims);
    Expression g = parse(nholo::testing::random_expr(rng, d22, 3), d22);
    Eigen::VectorXd p = nholo::testing::random_point(rng, 4);
    Eigen::VectorXd with_n = frame_derivative(g, rnc, p);
    Eigen::VectorXd no_n = frame_derivative(g, zero_nconnection(d22), p);
    Jet gj = evaluate_jet(g, p, 1);
    for (int a = 0; a < 2; ++a) {
      CHECK(with_n[2 + a] == no_n[2 + a]);
      CHECK(no_n[2 + a] == gj.partial_axes({2 + a}));
    }
    for (int i = 0; i < 2; ++i) CHECK(no_n[i] == gj.partial_axes({i}));
  }
}

// [e_alpha, e_beta](f) = W^gamma_{alpha beta} e_gamma(f) on random scalar
// functions: the anholonomy coefficients reproduce the jet-exact commutator.
TEST_CASE("anholonomy coefficients reproduce frame commutators") {
  Rng rng(2024u);
  for (int trial = 0; trial < 30; ++trial) {
    int n = nholo::testing::uniform_int(rng, 1, 3);
    int m = nholo::testing::uniform_int(rng, 1, 3);
    Dims dims(n, m);
    auto inst = nholo::testing::random_instance(rng, n, m);
    NConnection nc = from_grid(inst.N, dims);
    Expression f =
        parse(nholo::testing::random_expr(rng, dims, 3), dims);
    Eigen::VectorXd p = nholo::testing::random_point(rng, n + m);

    Jet fj = evaluate_jet(f, p, 2);
    JetMatrix N(m, n);
    for (int a = 0; a < m; ++a)
      for (int i = 0; i < n; ++i) N(a, i) = nc.coeff(a, i).jet(p, 1);

    auto edir = [&](const Jet& u, int alpha) {
      if (alpha >= n) return u.derivative(alpha);
      Jet acc = u.derivative(alpha);
      for (int a = 0; a < m; ++a) acc -= N(a, alpha) * u.derivative(n + a);
      return acc;
    };

    AdaptedFramePoint fp = adapted_frames(nc, p);
    Eigen::VectorXd ef = frame_derivative(f, nc, p);
    for (int al = 0; al < n + m; ++al)
      for (int be = 0; be < n + m; ++be) {
        double lhs = edir(edir(fj, be), al).value() -
                     edir(edir(fj, al), be).value();
        double rhs = 0.0;
        for (int gmm = 0; gmm < n + m; ++gmm)
          rhs += fp.W(gmm, al, be) * ef[gmm];
        CHECK(std::abs(lhs - rhs) < 1e-9);
      }
  }
}
