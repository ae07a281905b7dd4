// Nonlinear connections N^a_i(u), the frames they adapt, and the two
// independent routes to their curvature.
//
// Conventions used throughout the library:
//   e_i     = d/dx^i - N^a_i d/dy^a   (horizontal frame vectors)
//   e_{n+a} = d/dy^a                  (vertical frame vectors)
//   e^i     = dx^i
//   e^{n+a} = dy^a + N^a_i dx^i
//   [e_alpha, e_beta] = W^gamma_{alpha beta} e_gamma
// The nonzero anholonomy blocks are W^{n+a}_{ij} = Omega^a_{ij} and
// W^{n+b}_{i,n+a} = dN^b_i/dy^a (antisymmetric partner with a sign flip).
#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "nholo/dims.hpp"
#include "nholo/field.hpp"
#include "nholo/tensor.hpp"

namespace nholo {

struct NConnection {
  Dims dims{1, 1};
  FieldMatrix coeff;  // m x n, coeff(a, i) = N^a_i

  NConnection(Dims d, FieldMatrix c) : dims(d), coeff(std::move(c)) {
    if (coeff.rows() != dims.m || coeff.cols() != dims.n)
      throw std::invalid_argument("NConnection: coefficient matrix must be m x n");
  }
};

inline NConnection zero_nconnection(const Dims& dims) {
  FieldMatrix c(dims.m, dims.n);
  for (int a = 0; a < dims.m; ++a)
    for (int i = 0; i < dims.n; ++i) c(a, i) = ScalarField(0.0);
  return NConnection(dims, std::move(c));
}

// Frame data at one point.
//   frame:   row alpha = coordinate components of e_alpha; block
//            upper-triangular with unit diagonal blocks.
//   coframe: column alpha = coordinate components of e^alpha, so that
//            frame * coframe = identity (duality).
//   W:       W(gamma, alpha, beta) with [e_alpha, e_beta] = W^gamma e_gamma.
struct AdaptedFramePoint {
  Eigen::MatrixXd frame;
  Eigen::MatrixXd coframe;
  Tensor3<double> W;
};

namespace detail {

// N coefficients as jets at a point, mirroring nothing (N is not symmetric).
inline JetMatrix nconnection_jets(const NConnection& nc,
                                  const Eigen::VectorXd& point, int order) {
  JetMatrix N(nc.dims.m, nc.dims.n);
  for (int a = 0; a < nc.dims.m; ++a)
    for (int i = 0; i < nc.dims.n; ++i) N(a, i) = nc.coeff(a, i).jet(point, order);
  return N;
}

}  // namespace detail

// N-connection curvature from the expanded coefficient formula
//   Omega^a_{ij} = d_j N^a_i - d_i N^a_j + N^b_i d_b N^a_j - N^b_j d_b N^a_i.
// Result indexed (a, i, j); antisymmetric in (i, j) exactly.
inline Tensor3<double> nconnection_curvature(const NConnection& nc,
                                             const Eigen::VectorXd& point) {
  const int n = nc.dims.n, m = nc.dims.m;
  JetMatrix N = detail::nconnection_jets(nc, point, 1);
  Tensor3<double> omega(m, n, n);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) {
      omega(a, i, i) = 0.0;
      for (int j = i + 1; j < n; ++j) {
        double acc = N(a, i).partial_axes({j}) - N(a, j).partial_axes({i});
        for (int b = 0; b < m; ++b)
          acc += N(b, i).value() * N(a, j).partial_axes({n + b}) -
                 N(b, j).value() * N(a, i).partial_axes({n + b});
        omega(a, i, j) = acc;
        omega(a, j, i) = -acc;
      }
    }
  return omega;
}

// Independent route: the vertical components of the jet-exact vector-field
// bracket [e_i, e_j], computed from the generic formula
//   [X, Y]^mu = X^nu d_nu Y^mu - Y^nu d_nu X^mu
// on the coordinate component functions of the horizontal frames. The
// horizontal components of this bracket vanish identically (the h-components
// of e_i are constants), so the v-part is the whole bracket.
inline Eigen::VectorXd nijenhuis_curvature_oracle(const NConnection& nc, int i,
                                                  int j,
                                                  const Eigen::VectorXd& point) {
  const int n = nc.dims.n, m = nc.dims.m, d = n + m;
  if (i < 0 || i >= n || j < 0 || j >= n)
    throw std::invalid_argument("nijenhuis_curvature_oracle: h-index range");
  JetMatrix N = detail::nconnection_jets(nc, point, 1);
  // Component functions of e_i and e_j as jets.
  JetVector X(d), Y(d);
  for (int mu = 0; mu < d; ++mu) {
    X[mu] = Jet(mu == i ? 1.0 : 0.0).lifted(d, 1);
    Y[mu] = Jet(mu == j ? 1.0 : 0.0).lifted(d, 1);
  }
  for (int a = 0; a < m; ++a) {
    X[n + a] = -N(a, i);
    Y[n + a] = -N(a, j);
  }
  Eigen::VectorXd v(m);
  for (int a = 0; a < m; ++a) {
    double acc = 0.0;
    for (int nu = 0; nu < d; ++nu)
      acc += X[nu].value() * Y[n + a].partial_axes({nu}) -
             Y[nu].value() * X[n + a].partial_axes({nu});
    v[a] = acc;
  }
  return v;
}

inline AdaptedFramePoint adapted_frames(const NConnection& nc,
                                        const Eigen::VectorXd& point) {
  const int n = nc.dims.n, m = nc.dims.m, d = n + m;
  JetMatrix N = detail::nconnection_jets(nc, point, 1);
  AdaptedFramePoint out;
  out.frame = Eigen::MatrixXd::Identity(d, d);
  out.coframe = Eigen::MatrixXd::Identity(d, d);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) {
      out.frame(i, n + a) = -N(a, i).value();
      out.coframe(i, n + a) = N(a, i).value();  // column n+a carries e^{n+a}
    }
  Tensor3<double> omega = nconnection_curvature(nc, point);
  out.W = Tensor3<double>(d, d, d);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) out.W(n + a, i, j) = omega(a, i, j);
      for (int b = 0; b < m; ++b) {
        double dN = N(b, i).partial_axes({n + a});
        out.W(n + b, i, n + a) = dN;
        out.W(n + b, n + a, i) = -dN;
      }
    }
  return out;
}

// e_alpha(f) for every frame direction: the N-elongated derivative for
// horizontal alpha, the plain vertical partial otherwise.
inline Eigen::VectorXd frame_derivative(const Expression& f,
                                        const NConnection& nc,
                                        const Eigen::VectorXd& point) {
  const int n = nc.dims.n, m = nc.dims.m;
  Jet fj = evaluate_jet(f, point, 1);
  JetMatrix N = detail::nconnection_jets(nc, point, 0);
  Eigen::VectorXd out(n + m);
  for (int i = 0; i < n; ++i) {
    double acc = fj.partial_axes({i});
    for (int a = 0; a < m; ++a)
      acc -= N(a, i).value() * fj.partial_axes({n + a});
    out[i] = acc;
  }
  for (int a = 0; a < m; ++a) out[n + a] = fj.partial_axes({n + a});
  return out;
}

}  // namespace nholo
