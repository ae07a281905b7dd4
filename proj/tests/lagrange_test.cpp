#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "nholo/dconn.hpp"
#include "nholo/lagrange.hpp"
#include "test_support.hpp"

using namespace nholo;
using namespace nholo::testing;

namespace {

LagrangeProblem problem(int n, const std::string& src) {
  return LagrangeProblem(n, ScalarField(parse(src, Dims(n, n))));
}

}  // namespace

TEST_CASE("free particle has the flat Hessian metric and no spray") {
  LagrangeProblem P = problem(2, "0.5*(y1^2 + y2^2)");
  Eigen::VectorXd pt(4);
  pt << 0.3, -1.1, 0.8, 0.25;
  HessianMetric hm = hessian_metric(P, pt);
  CHECK((hm.g - 0.5 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((hm.ginv - 2.0 * Eigen::MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  CHECK(semispray(P, pt).cwiseAbs().maxCoeff() == 0.0);

  NConnection nc = canonical_nconnection(P);
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i) CHECK(nc.coeff(a, i).value(pt) == 0.0);
}

TEST_CASE("exponential Lagrangian hand chain") {
  LagrangeProblem P = problem(1, "0.5*exp(x1)*y1^2");
  Eigen::VectorXd pt(2);
  pt << 0.3, 1.7;

  HessianMetric hm = hessian_metric(P, pt);
  CHECK(hm.g(0, 0) == doctest::Approx(0.5 * std::exp(0.3)).epsilon(1e-13));

  Eigen::VectorXd G = semispray(P, pt);
  CHECK(G[0] == doctest::Approx(1.7 * 1.7 / 4.0).epsilon(1e-12));

  NConnection nc = canonical_nconnection(P);
  CHECK(nc.coeff(0, 0).value(pt) == doctest::Approx(0.85).epsilon(1e-12));

  // The lifted geometry reproduces the hand-built d-metric g = h = exp(x1)/2
  // with N = y1/2, down to the connection coefficients: all four canonical
  // blocks are 1/2 except the vertical C blocks, which vanish.
  GeometryJets geo = make_geometry(P, pt, 2);
  CHECK(geo.g(0, 0).value() ==
        doctest::Approx(0.5 * std::exp(0.3)).epsilon(1e-13));
  CHECK(geo.h(0, 0).value() ==
        doctest::Approx(0.5 * std::exp(0.3)).epsilon(1e-13));
  CHECK(geo.N(0, 0).value() == doctest::Approx(0.85).epsilon(1e-12));

  DConnectionValues conn = values(canonical_connection_jets(geo));
  CHECK(conn.Lh(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(conn.Lv(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-11));
  CHECK(std::abs(conn.Ch(0, 0, 0)) < 1e-12);
  CHECK(std::abs(conn.Cv(0, 0, 0)) < 1e-12);
  CHECK(metricity_residual(canonical_connection_jets(geo), geo).max() < 1e-10);
}

TEST_CASE("degenerate velocity Hessian is rejected with the point") {
  LagrangeProblem P = problem(1, "x1*y1");
  Eigen::VectorXd pt(2);
  pt << 0.4, 0.9;
  bool threw = false;
  try {
    hessian_metric(P, pt);
  } catch (const DegenerateMetricError& e) {
    threw = true;
    std::string msg = e.what();
    CHECK(msg.find("degenerate") != std::string::npos);
    CHECK(msg.find("0.4") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("spray coefficients of a homogeneous Lagrangian scale quadratically") {
  LagrangeProblem P = problem(
      2,
      "(y1^4 + y2^4 + (1 + 0.3*sin(x1))*(y1*y2)^2)^0.5 + 0.2*(y1^2 + y2^2)");
  Rng rng(713);
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::VectorXd pt = random_point(rng, 4);
    pt[2] = uniform(rng, 0.5, 1.3) * (uniform_int(rng, 0, 1) ? 1.0 : -1.0);
    pt[3] = uniform(rng, 0.5, 1.3) * (uniform_int(rng, 0, 1) ? 1.0 : -1.0);
    Eigen::VectorXd G = semispray(P, pt);
    for (double lambda : {0.5, 2.0, 3.7}) {
      Eigen::VectorXd scaled = pt;
      scaled[2] *= lambda;
      scaled[3] *= lambda;
      Eigen::VectorXd Gs = semispray(P, scaled);
      CHECK((Gs - lambda * lambda * G).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("quadratic Lagrangian reproduces coordinate Christoffels") {
  // L = g_ij(x) y^i y^j for an x-dependent metric: the induced N-connection
  // is gamma^i_{jk}(x) y^k and the horizontal canonical block is gamma itself.
  std::vector<std::vector<std::string>> gsrc = {
      {"2 + 0.4*sin(x1)", "0.3*x2"},
      {"0.3*x2", "1.5 + 0.2*cos(x1 + x2)"}};
  std::string L =
      "(2 + 0.4*sin(x1))*y1^2 + 0.6*x2*y1*y2 + (1.5 + 0.2*cos(x1 + x2))*y2^2";
  LagrangeProblem P = problem(2, L);
  FieldMatrix gfields = parse_grid(gsrc, Dims(2, 2));

  Rng rng(802);
  double worst_g = 0.0, worst_N = 0.0, worst_L = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd pt = random_point(rng, 4);
    if (std::abs(pt[2]) < 0.2) pt[2] += 0.4;
    if (std::abs(pt[3]) < 0.2) pt[3] += 0.4;
    CoordinateCurvature cc = coordinate_riemann_oracle(gfields, pt);

    HessianMetric hm = hessian_metric(P, pt);
    NConnection nc = canonical_nconnection(P);
    GeometryJets geo = make_geometry(P, pt, 2);
    DConnectionValues conn = values(canonical_connection_jets(geo));

    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double gval = gfields(i, j).value(pt);
        worst_g = std::max(worst_g, std::abs(hm.g(i, j) - gval));
        double ny = 0.0;
        for (int k = 0; k < 2; ++k) ny += cc.christoffel(i, j, k) * pt[2 + k];
        worst_N = std::max(worst_N, std::abs(nc.coeff(i, j).value(pt) - ny));
        for (int k = 0; k < 2; ++k)
          worst_L = std::max(
              worst_L, std::abs(conn.Lh(i, j, k) - cc.christoffel(i, j, k)));
      }
  }
  CHECK(worst_g < 1e-10);
  CHECK(worst_N < 1e-8);
  CHECK(worst_L < 1e-8);
}

TEST_CASE("lifted geometry is metric for random regular Lagrangians") {
  Rng rng(4410);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    LagrangeProblem P = problem(2, random_lagrangian(rng, 2));
    for (int rep = 0; rep < 2; ++rep) {
      Eigen::VectorXd pt = random_point(rng, 4);
      if (std::abs(pt[2]) < 0.3) pt[2] += 0.5;
      if (std::abs(pt[3]) < 0.3) pt[3] += 0.5;
      GeometryJets geo = make_geometry(P, pt, 2);
      worst = std::max(
          worst, metricity_residual(canonical_connection_jets(geo), geo).max());
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("almost complex structure squares to minus the identity") {
  Eigen::MatrixXd F1 = almost_complex_adapted(1);
  Eigen::MatrixXd expect(2, 2);
  expect << 0, -1, 1, 0;
  CHECK((F1 - expect).cwiseAbs().maxCoeff() == 0.0);

  for (int n : {1, 2, 3}) {
    Eigen::MatrixXd F = almost_complex_adapted(n);
    Eigen::MatrixXd FF = F * F;
    CHECK((FF + Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() ==
          0.0);
  }

  // Conjugating into coordinate components preserves the square.
  Rng rng(2207);
  for (int trial = 0; trial < 5; ++trial) {
    LagrangeProblem P = problem(2, random_lagrangian(rng, 2));
    Eigen::VectorXd pt = random_point(rng, 4);
    if (std::abs(pt[2]) < 0.3) pt[2] += 0.5;
    if (std::abs(pt[3]) < 0.3) pt[3] += 0.5;
    NConnection nc = canonical_nconnection(P);
    Eigen::MatrixXd Fc = almost_complex_coordinates(nc, pt);
    CHECK((Fc * Fc + Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("flat geodesics are straight lines") {
  LagrangeProblem P = problem(2, "0.5*(y1^2 + y2^2)");
  Eigen::VectorXd x0(2), y0(2);
  x0 << 0.1, -0.2;
  y0 << 0.7, 0.4;
  GeodesicResult res = geodesic_integrate(P, x0, y0, 1.0, 101);
  Eigen::VectorXd end = res.states.back();
  CHECK((end.head(2) - (x0 + y0)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((end.tail(2) - y0).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(res.el_residual < 1e-10);
  CHECK(res.energy_drift < 1e-11);
}

TEST_CASE("exponential geodesic matches the closed form") {
  // d/dtau(e^x xdot) = (1/2)e^x xdot^2 gives x(tau) = 2 log(1 + tau/2).
  LagrangeProblem P = problem(1, "0.5*exp(x1)*y1^2");
  Eigen::VectorXd x0(1), y0(1);
  x0 << 0.0;
  y0 << 1.0;
  GeodesicResult res = geodesic_integrate(P, x0, y0, 1.0, 401);
  CHECK(std::abs(res.states.back()[0] - 2.0 * std::log(1.5)) < 1e-8);
  CHECK(res.el_residual < 1e-6);
  CHECK(res.energy_drift < 1e-8);
}

TEST_CASE("sphere geodesic closes to a great circle") {
  // Unit sphere in polar coordinates; unit-speed start tilted against the
  // equator returns to the same point and velocity after one period, with
  // the azimuth advanced by a full turn.
  LagrangeProblem P = problem(2, "0.5*(y1^2 + sin(x1)^2*y2^2)");
  Eigen::VectorXd x0(2), y0(2);
  const double half_pi = std::acos(0.0);
  x0 << half_pi, 0.0;
  y0 << 0.6, 0.8;
  const double period = 4.0 * half_pi;
  GeodesicResult res = geodesic_integrate(P, x0, y0, period, 801);
  Eigen::VectorXd end = res.states.back();
  CHECK(std::abs(end[0] - half_pi) < 1e-4);
  CHECK(std::abs(end[1] - period) < 1e-4);
  CHECK(std::abs(end[2] - 0.6) < 1e-4);
  CHECK(std::abs(end[3] - 0.8) < 1e-4);
  CHECK(res.el_residual < 1e-6);
  CHECK(res.energy_drift < 1e-8);
}

TEST_CASE("random regular Lagrangians pass the geodesic self-checks") {
  Rng rng(9090);
  double worst_el = 0.0, worst_energy = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    LagrangeProblem P = problem(2, random_lagrangian(rng, 2));
    Eigen::VectorXd x0 = random_point(rng, 2, -0.4, 0.4);
    Eigen::VectorXd y0(2);
    y0 << uniform(rng, 0.5, 1.0) * (uniform_int(rng, 0, 1) ? 1.0 : -1.0),
        uniform(rng, 0.5, 1.0) * (uniform_int(rng, 0, 1) ? 1.0 : -1.0);
    GeodesicResult res = geodesic_integrate(P, x0, y0, 1.0, 401);
    worst_el = std::max(worst_el, res.el_residual);
    worst_energy = std::max(worst_energy, res.energy_drift);
  }
  CHECK(worst_el < 1e-6);
  CHECK(worst_energy < 1e-8);
}

TEST_CASE("jet order budget is enforced through the derived fields") {
  LagrangeProblem P = problem(1, "0.5*exp(x1)*y1^2");
  Eigen::VectorXd pt(2);
  pt << 0.1, 0.9;
  CHECK_NOTHROW(make_geometry(P, pt, 3));
  CHECK_THROWS_AS(make_geometry(P, pt, 4), std::invalid_argument);
}
