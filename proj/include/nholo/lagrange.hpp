// Lagrangian front end: from a regular Lagrangian L(x, y) on a 2n-dimensional
// phase domain, derive the Hessian metric, the semispray, the induced
// N-connection, and the lifted d-metric that feed the geometry pipeline.
// Includes the adapted almost-complex structure and a geodesic integrator
// with Euler-Lagrange and energy self-checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nholo/dmetric.hpp"
#include "nholo/errors.hpp"
#include "nholo/field.hpp"
#include "nholo/geometry.hpp"
#include "nholo/nconn.hpp"

namespace nholo {

struct LagrangeProblem {
  Dims dims{1, 1};  // always square: one velocity per base coordinate
  ScalarField L;
  double regularity_tol = 1e-10;

  LagrangeProblem(int n, ScalarField lagrangian, double tol = 1e-10)
      : dims(n, n), L(std::move(lagrangian)), regularity_tol(tol) {
    if (n < 1) throw std::invalid_argument("LagrangeProblem: n must be >= 1");
  }
};

namespace detail {

inline std::string point_str(const Eigen::VectorXd& p) {
  std::string out = "(";
  char buf[32];
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", p[i]);
    out += buf;
    if (i + 1 < p.size()) out += ", ";
  }
  return out + ")";
}

struct LagrangeJets {
  Jet L;            // order K+2
  JetMatrix hg;     // order K, hg_ij = 1/2 d2L/dy_i dy_j
  JetMatrix hginv;  // order K
};

inline LagrangeJets lagrange_jets(const LagrangeProblem& P,
                                  const Eigen::VectorXd& point, int order) {
  const int n = P.dims.n;
  if (point.size() != 2 * n)
    throw std::invalid_argument("lagrange_jets: point length");
  LagrangeJets out;
  out.L = P.L.jet(point, order + 2);
  out.hg = JetMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet e = 0.5 * out.L.derivative(n + i).derivative(n + j);
      out.hg(i, j) = e;
      out.hg(j, i) = e;
    }
  Eigen::MatrixXd v = values(out.hg);
  if (!v.allFinite() || std::abs(v.determinant()) <= P.regularity_tol)
    throw DegenerateMetricError("Lagrangian Hessian degenerate at " +
                                point_str(point));
  out.hginv = jet_matrix_inverse(out.hg, 1e-12, "Lagrangian Hessian");
  return out;
}

// Spray coefficient jets at `order` (consumes L at order+2):
//   G^a = 1/4 hg^{aj} ( y^k d2L/dy^j dx^k - dL/dx^j ).
inline std::vector<Jet> semispray_jets(const LagrangeProblem& P,
                                       const Eigen::VectorXd& point,
                                       int order) {
  const int n = P.dims.n;
  LagrangeJets lj = lagrange_jets(P, point, order);
  std::vector<Jet> G(static_cast<std::size_t>(n), Jet(0.0));
  for (int a = 0; a < n; ++a) {
    Jet acc = 0.0;
    for (int j = 0; j < n; ++j) {
      Jet inner = -lj.L.derivative(j);
      for (int k = 0; k < n; ++k)
        inner += Jet::variable(2 * n, order, n + k, point[n + k]) *
                 lj.L.derivative(n + j).derivative(k);
      acc += lj.hginv(a, j) * inner;
    }
    G[static_cast<std::size_t>(a)] = 0.25 * acc;
  }
  return G;
}

}  // namespace detail

struct HessianMetric {
  Eigen::MatrixXd g, ginv;
};

inline HessianMetric hessian_metric(const LagrangeProblem& P,
                                    const Eigen::VectorXd& point) {
  detail::LagrangeJets lj = detail::lagrange_jets(P, point, 0);
  return HessianMetric{values(lj.hg), values(lj.hginv)};
}

inline Eigen::VectorXd semispray(const LagrangeProblem& P,
                                 const Eigen::VectorXd& point) {
  std::vector<Jet> G = detail::semispray_jets(P, point, 0);
  Eigen::VectorXd out(P.dims.n);
  for (int a = 0; a < P.dims.n; ++a)
    out[a] = G[static_cast<std::size_t>(a)].value();
  return out;
}

// N^a_i = dG^a/dy^i, exposed as derived fields so the whole geometry stack
// can consume the Lagrangian exactly like hand-written coefficients. A jet of
// order K here costs a jet of L at order K+3.
inline NConnection canonical_nconnection(const LagrangeProblem& P) {
  const int n = P.dims.n;
  FieldMatrix coeff(n, n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i) {
      auto fn = [P, a, i, n](const Eigen::VectorXd& point, int order) {
        return detail::semispray_jets(P, point, order + 1)
            [static_cast<std::size_t>(a)]
                .derivative(n + i);
      };
      coeff(a, i) = ScalarField::from_function(
          fn, "dG" + std::to_string(a + 1) + "/dy" + std::to_string(i + 1));
    }
  return NConnection(P.dims, coeff);
}

// Both metric blocks equal the Hessian metric; pair with the induced
// N-connection for the lifted geometry.
inline DMetric sasaki_lift(const LagrangeProblem& P) {
  const int n = P.dims.n;
  FieldMatrix block(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto fn = [P, i, j](const Eigen::VectorXd& point, int order) {
        return detail::lagrange_jets(P, point, order).hg(i, j);
      };
      block(i, j) = ScalarField::from_function(
          fn, "hg" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  return DMetric(P.dims, block, block);
}

inline GeometryJets make_geometry(const LagrangeProblem& P,
                                  const Eigen::VectorXd& point, int order) {
  return make_geometry(sasaki_lift(P), canonical_nconnection(P), point, order);
}

// ---------------------------------------------------------------------------
// Almost-complex structure of the adapted frame: swaps the horizontal and
// vertical legs, F(e_i) = e_{n+i}, F(e_{n+i}) = -e_i. Square dims only.

inline Eigen::MatrixXd almost_complex_adapted(int n) {
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    F(n + i, i) = 1.0;
    F(i, n + i) = -1.0;
  }
  return F;
}

// The same operator on coordinate components: columns of coframe^T undo the
// frame decomposition, rows of frame^T rebuild coordinates.
inline Eigen::MatrixXd almost_complex_coordinates(const NConnection& nc,
                                                  const Eigen::VectorXd& point) {
  if (nc.dims.n != nc.dims.m)
    throw std::invalid_argument("almost_complex_coordinates: needs n == m");
  AdaptedFramePoint fp = adapted_frames(nc, point);
  return fp.frame.transpose() * almost_complex_adapted(nc.dims.n) *
         fp.coframe.transpose();
}

// ---------------------------------------------------------------------------
// Geodesics of the semispray: dx/dtau = y, dy/dtau = -2G(x, y), integrated
// with an embedded 4/5 Runge-Kutta pair (Dormand-Prince coefficients, FSAL),
// reported on a uniform parameter grid. Two self-checks ride along: the
// Euler-Lagrange residual d/dtau(dL/dy) - dL/dx via five-point differences
// on the grid, and the drift of the energy E = y dL/dy - L.

struct GeodesicResult {
  Eigen::VectorXd tau;                  // uniform grid, tau[0] = 0
  std::vector<Eigen::VectorXd> states;  // (x, y) per grid point
  double el_residual = 0.0;
  double energy_drift = 0.0;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

inline GeodesicResult geodesic_integrate(const LagrangeProblem& P,
                                         const Eigen::VectorXd& x0,
                                         const Eigen::VectorXd& y0,
                                         double tau_end, int samples,
                                         double abs_tol = 1e-10,
                                         double rel_tol = 1e-8) {
  const int n = P.dims.n;
  if (x0.size() != n || y0.size() != n)
    throw std::invalid_argument("geodesic_integrate: state length");
  if (!(tau_end > 0.0))
    throw std::invalid_argument("geodesic_integrate: tau_end must be > 0");
  if (samples < 5)
    throw std::invalid_argument(
        "geodesic_integrate: need at least 5 samples for the residual "
        "stencil");

  auto rhs = [&](const Eigen::VectorXd& s) {
    Eigen::VectorXd point = s;
    Eigen::VectorXd out(2 * n);
    out.head(n) = s.tail(n);
    out.tail(n) = -2.0 * semispray(P, point);
    return out;
  };

  // Dormand-Prince 5(4) tableau.
  static const double A[7][6] = {
      {0, 0, 0, 0, 0, 0},
      {1.0 / 5, 0, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
      {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
       -5103.0 / 18656, 0},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double B5[7] = {35.0 / 384,      0,           500.0 / 1113,
                               125.0 / 192,     -2187.0 / 6784,
                               11.0 / 84,       0};
  static const double B4[7] = {5179.0 / 57600,  0,           7571.0 / 16695,
                               393.0 / 640,     -92097.0 / 339200,
                               187.0 / 2100,    1.0 / 40};

  GeodesicResult res;
  res.tau = Eigen::VectorXd::LinSpaced(samples, 0.0, tau_end);
  res.states.reserve(static_cast<std::size_t>(samples));

  Eigen::VectorXd s(2 * n);
  s.head(n) = x0;
  s.tail(n) = y0;
  double t = 0.0;
  res.states.push_back(s);

  Eigen::VectorXd k[7];
  k[0] = rhs(s);
  double h = tau_end / (samples - 1);

  for (int next = 1; next < samples; ++next) {
    const double t_goal = res.tau[next];
    while (t < t_goal) {
      bool clipped = false;
      if (t + h >= t_goal) {
        h = t_goal - t;
        clipped = true;
      }
      for (int stage = 1; stage < 7; ++stage) {
        Eigen::VectorXd arg = s;
        for (int p = 0; p < stage; ++p) arg += h * A[stage][p] * k[p];
        k[stage] = rhs(arg);
      }
      Eigen::VectorXd s5 = s, err = Eigen::VectorXd::Zero(2 * n);
      for (int p = 0; p < 7; ++p) {
        s5 += h * B5[p] * k[p];
        err += h * (B5[p] - B4[p]) * k[p];
      }
      double scale = 0.0;
      for (int c = 0; c < 2 * n; ++c) {
        double tol =
            abs_tol + rel_tol * std::max(std::abs(s[c]), std::abs(s5[c]));
        scale = std::max(scale, std::abs(err[c]) / tol);
      }
      if (scale <= 1.0) {
        t += h;
        s = s5;
        k[0] = k[6];  // FSAL
        ++res.accepted_steps;
      } else {
        ++res.rejected_steps;
      }
      double factor = scale > 0.0 ? 0.9 * std::pow(scale, -0.2) : 5.0;
      h *= std::min(5.0, std::max(0.2, factor));
      if (clipped && scale <= 1.0) break;
      if (h < 1e-14 * std::max(1.0, std::abs(t)))
        throw DomainError("geodesic step size underflow at tau = " +
                          std::to_string(t));
    }
    res.states.push_back(s);
  }

  // Conjugate momenta and forces on the grid, then the residual and drift.
  const double dt = res.tau[1] - res.tau[0];
  Eigen::MatrixXd p_grid(samples, n), q_grid(samples, n);
  Eigen::VectorXd energy(samples);
  for (int g = 0; g < samples; ++g) {
    Jet L = P.L.jet(res.states[static_cast<std::size_t>(g)], 1);
    double e = -L.value();
    for (int i = 0; i < n; ++i) {
      double pi = L.derivative(n + i).value();
      p_grid(g, i) = pi;
      q_grid(g, i) = L.derivative(i).value();
      e += res.states[static_cast<std::size_t>(g)][n + i] * pi;
    }
    energy[g] = e;
  }
  for (int g = 2; g + 2 < samples; ++g)
    for (int i = 0; i < n; ++i) {
      double dp = (p_grid(g - 2, i) - 8.0 * p_grid(g - 1, i) +
                   8.0 * p_grid(g + 1, i) - p_grid(g + 2, i)) /
                  (12.0 * dt);
      res.el_residual =
          std::max(res.el_residual, std::abs(dp - q_grid(g, i)));
    }
  for (int g = 0; g < samples; ++g)
    res.energy_drift =
        std::max(res.energy_drift, std::abs(energy[g] - energy[0]));
  return res;
}

}  // namespace nholo
