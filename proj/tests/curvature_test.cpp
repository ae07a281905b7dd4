#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "nholo/curvature.hpp"
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

GeometryJets random_geometry(Rng& rng, int n, int m) {
  auto inst = nholo::testing::random_instance(rng, n, m);
  DMetric dm(inst.dims, parse_grid(inst.g, inst.dims),
             parse_grid(inst.h, inst.dims));
  NConnection nc(inst.dims, parse_grid(inst.N, inst.dims));
  return make_geometry(dm, nc, nholo::testing::random_point(rng, n + m), 2);
}

}  // namespace

TEST_CASE("three torsion paths agree; pure blocks vanish exactly") {
  Rng rng(6001u);
  for (int trial = 0; trial < 30; ++trial) {
    int n = nholo::testing::uniform_int(rng, 1, 3);
    int m = nholo::testing::uniform_int(rng, 1, 3);
    GeometryJets geo = random_geometry(rng, n, m);

    DConnectionJets can = canonical_connection_jets(geo);
    TorsionBlocks direct = dtorsion(can, geo);
    CHECK(gap(direct, torsion_via_forms_oracle(can, geo)) < 1e-8);
    CHECK(gap(direct, torsion_via_commutator_oracle(can, geo)) < 1e-8);
    // The symmetrized Christoffel brackets cancel term by term, not just to
    // rounding.
    CHECK(max_abs(direct.Thh) == 0.0);
    CHECK(max_abs(direct.Tvv) == 0.0);

    DConnectionJets ber = berwald_connection_jets(geo);
    TorsionBlocks bdirect = dtorsion(ber, geo);
    CHECK(gap(bdirect, torsion_via_forms_oracle(ber, geo)) < 1e-8);
    CHECK(gap(bdirect, torsion_via_commutator_oracle(ber, geo)) < 1e-8);
    CHECK(max_abs(bdirect.Tvm) == 0.0);  // Lv is the bare N-gradient
    CHECK(max_abs(bdirect.Thv) == 0.0);  // no hv block at all
  }
}

TEST_CASE("three curvature paths agree") {
  Rng rng(6002u);
  for (int trial = 0; trial < 25; ++trial) {
    int n = nholo::testing::uniform_int(rng, 1, 3);
    int m = nholo::testing::uniform_int(rng, 1, 3);
    GeometryJets geo = random_geometry(rng, n, m);
    for (bool berwald : {false, true}) {
      DConnectionJets c = berwald ? berwald_connection_jets(geo)
                                  : canonical_connection_jets(geo);
      CurvatureBlocks direct = dcurvature(c, geo);
      CHECK(gap(direct, curvature_via_forms_oracle(c, geo)) < 1e-8);
      CHECK(gap(direct, curvature_via_commutator_oracle(c, geo)) < 1e-8);
    }
  }
}

TEST_CASE("unit sphere horizontal block") {
  Dims d21(2, 1);
  DMetric dm(d21, parse_grid({{"1", "0"}, {"0", "sin(x1)^2"}}, d21),
             parse_grid({{"1"}}, d21));
  NConnection nc = zero_nconnection(d21);
  Eigen::VectorXd p = pt({1.0, 0.7, 0.4});
  GeometryJets geo = make_geometry(dm, nc, p, 2);
  DConnectionJets can = canonical_connection_jets(geo);
  RicciData rd = ricci_einstein(dcurvature(can, geo), geo);

  CHECK(rd.scalar == doctest::Approx(2.0).epsilon(1e-10));
  // Ricci equals the metric on the sphere block, vanishes elsewhere.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(rd.ricci(i, j) - geo.g(i, j).value()) < 1e-10);
  CHECK(std::abs(rd.ricci(2, 2)) < 1e-12);
  CHECK(std::abs(rd.ricci(0, 2)) + std::abs(rd.ricci(2, 0)) < 1e-12);

  // Einstein tensor: zero on the sphere block, -h on the flat block.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(rd.einstein(i, j)) < 1e-10);
  CHECK(einstein_source_residual(rd, geo, 0.0, -1.0) < 1e-10);

  // Independent coordinate-Christoffel computation of the same block.
  nholo::testing::CoordinateCurvature cc =
      nholo::testing::coordinate_riemann_oracle(dm.g, p);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(rd.ricci(i, j) - cc.ricci(i, j)) < 1e-10);
  CHECK(cc.scalar == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("product metric splits into coordinate curvatures") {
  Dims d22(2, 2);
  std::vector<std::vector<std::string>> gsrc = {
      {"1.4 + 0.3*sin(x1 + x2)", "0.2*cos(x1)"},
      {"0.2*cos(x1)", "1.2 + 0.25*cos(x2)"}};
  // h written in the vertical coordinates, and the same surface re-labelled
  // in x for the coordinate oracle.
  std::vector<std::vector<std::string>> hsrc = {
      {"1.3 + 0.3*cos(y1)", "0.15*sin(y2)"},
      {"0.15*sin(y2)", "1.5 + 0.2*sin(y1 + y2)"}};
  std::vector<std::vector<std::string>> hsrc_x = {
      {"1.3 + 0.3*cos(x1)", "0.15*sin(x2)"},
      {"0.15*sin(x2)", "1.5 + 0.2*sin(x1 + x2)"}};

  DMetric dm(d22, parse_grid(gsrc, d22), parse_grid(hsrc, d22));
  Eigen::VectorXd p = pt({0.5, -0.3, 0.8, 0.1});
  GeometryJets geo = make_geometry(dm, zero_nconnection(d22), p, 2);
  RicciData rd =
      ricci_einstein(dcurvature(canonical_connection_jets(geo), geo), geo);

  nholo::testing::CoordinateCurvature cg =
      nholo::testing::coordinate_riemann_oracle(dm.g, p);
  FieldMatrix hx = parse_grid(hsrc_x, d22);
  nholo::testing::CoordinateCurvature ch =
      nholo::testing::coordinate_riemann_oracle(hx, pt({0.8, 0.1, 0.0, 0.0}));

  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(rd.ricci(i, j) - cg.ricci(i, j)) < 1e-9);
      CHECK(std::abs(rd.ricci(2 + i, 2 + j) - ch.ricci(i, j)) < 1e-9);
    }
  CHECK(rd.scalar ==
        doctest::Approx(cg.scalar + ch.scalar).epsilon(1e-9));
}

TEST_CASE("mixed Ricci blocks are genuinely nonsymmetric") {
  Rng rng(6003u);
  double asym = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    GeometryJets geo = random_geometry(rng, 2, 2);
    RicciData rd =
        ricci_einstein(dcurvature(canonical_connection_jets(geo), geo), geo);
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < 2; ++a)
        asym = std::max(asym,
                        std::abs(rd.ricci(i, 2 + a) - rd.ricci(2 + a, i)));
  }
  CHECK(asym > 1e-8);
}

TEST_CASE("trace of the Einstein tensor") {
  Rng rng(6004u);
  for (int trial = 0; trial < 20; ++trial) {
    int n = nholo::testing::uniform_int(rng, 1, 3);
    int m = nholo::testing::uniform_int(rng, 1, 3);
    GeometryJets geo = random_geometry(rng, n, m);
    RicciData rd =
        ricci_einstein(dcurvature(canonical_connection_jets(geo), geo), geo);
    double trace = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        trace += geo.ginv(i, j).value() * rd.einstein(i, j);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        trace += geo.hinv(a, b).value() * rd.einstein(n + a, n + b);
    double expected = rd.scalar * (1.0 - 0.5 * (n + m));
    CHECK(std::abs(trace - expected) <
          1e-9 * std::max(1.0, std::abs(rd.scalar)));
  }
}

TEST_CASE("metric compatibility makes lowered curvature skew") {
  Rng rng(6005u);
  for (int trial = 0; trial < 15; ++trial) {
    int n = nholo::testing::uniform_int(rng, 1, 3);
    int m = nholo::testing::uniform_int(rng, 1, 3);
    GeometryJets geo = random_geometry(rng, n, m);
    CurvatureBlocks r = dcurvature(canonical_connection_jets(geo), geo);

    double worst = 0.0;
    auto lower_h = [&](const Tensor4<double>& B, int p_, int q, int s, int t) {
      double acc = 0.0;
      for (int l = 0; l < n; ++l)
        acc += geo.g(p_, l).value() * B(l, q, s, t);
      return acc;
    };
    auto lower_v = [&](const Tensor4<double>& B, int p_, int q, int s, int t) {
      double acc = 0.0;
      for (int l = 0; l < m; ++l)
        acc += geo.h(p_, l).value() * B(l, q, s, t);
      return acc;
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int s = 0; s < n; ++s)
          for (int t = 0; t < n; ++t)
            worst = std::max(worst, std::abs(lower_h(r.B1, i, j, s, t) +
                                             lower_h(r.B1, j, i, s, t)));
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int s = 0; s < n; ++s)
          for (int t = 0; t < n; ++t)
            worst = std::max(worst, std::abs(lower_v(r.B2, a, b, s, t) +
                                             lower_v(r.B2, b, a, s, t)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int s = 0; s < n; ++s)
          for (int t = 0; t < m; ++t)
            worst = std::max(worst, std::abs(lower_h(r.B3, i, j, s, t) +
                                             lower_h(r.B3, j, i, s, t)));
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int s = 0; s < n; ++s)
          for (int t = 0; t < m; ++t)
            worst = std::max(worst, std::abs(lower_v(r.B4, a, b, s, t) +
                                             lower_v(r.B4, b, a, s, t)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int s = 0; s < m; ++s)
          for (int t = 0; t < m; ++t)
            worst = std::max(worst, std::abs(lower_h(r.B5, i, j, s, t) +
                                             lower_h(r.B5, j, i, s, t)));
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int s = 0; s < m; ++s)
          for (int t = 0; t < m; ++t)
            worst = std::max(worst, std::abs(lower_v(r.B6, a, b, s, t) +
                                             lower_v(r.B6, b, a, s, t)));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("flat geometry has no curvature anywhere") {
  Dims d22(2, 2);
  DMetric dm = eta_dmetric(d22, {1.0, 1.0}, {1.0, 1.0});
  GeometryJets geo =
      make_geometry(dm, zero_nconnection(d22), pt({0.1, 0.2, 0.3, 0.4}), 2);
  CurvatureBlocks r = dcurvature(canonical_connection_jets(geo), geo);
  CHECK(max_abs(r.B1) == 0.0);
  CHECK(max_abs(r.B2) == 0.0);
  CHECK(max_abs(r.B3) == 0.0);
  CHECK(max_abs(r.B4) == 0.0);
  CHECK(max_abs(r.B5) == 0.0);
  CHECK(max_abs(r.B6) == 0.0);
}
