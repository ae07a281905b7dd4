// d-metrics (block pair g_ij, h_ab adapted to an N-connection), the
// off-diagonal coordinate ansatz they are equivalent to, and the algebraic
// extraction of N from a generic off-diagonal metric.
//
// Ansatz block structure, with N^a_i the connection coefficients:
//   [ g_ij + N^a_i N^b_j h_ab    h_ab N^b_i ]
//   [ h_ab N^b_j                 h_ab       ]
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>

#include "nholo/dims.hpp"
#include "nholo/field.hpp"
#include "nholo/nconn.hpp"
#include "nholo/tensor.hpp"

namespace nholo {

struct DMetric {
  Dims dims{1, 1};
  FieldMatrix g;  // n x n, symmetric
  FieldMatrix h;  // m x m, symmetric

  DMetric(Dims d, FieldMatrix g_in, FieldMatrix h_in)
      : dims(d), g(std::move(g_in)), h(std::move(h_in)) {
    if (g.rows() != dims.n || g.cols() != dims.n)
      throw std::invalid_argument("DMetric: g must be n x n");
    if (h.rows() != dims.m || h.cols() != dims.m)
      throw std::invalid_argument("DMetric: h must be m x m");
  }
};

// Constant diagonal d-metric from signature lists (entries typically +1/-1).
inline DMetric eta_dmetric(const Dims& dims, const std::vector<double>& h_signs,
                           const std::vector<double>& v_signs) {
  if (static_cast<int>(h_signs.size()) != dims.n ||
      static_cast<int>(v_signs.size()) != dims.m)
    throw std::invalid_argument("eta_dmetric: signature lengths must be (n, m)");
  FieldMatrix g(dims.n, dims.n), h(dims.m, dims.m);
  for (int i = 0; i < dims.n; ++i)
    for (int j = 0; j < dims.n; ++j)
      g(i, j) = ScalarField(i == j ? h_signs[i] : 0.0);
  for (int a = 0; a < dims.m; ++a)
    for (int b = 0; b < dims.m; ++b)
      h(a, b) = ScalarField(a == b ? v_signs[a] : 0.0);
  return DMetric(dims, std::move(g), std::move(h));
}

struct AnsatzMetric {
  Dims dims{1, 1};
  FieldMatrix entries;  // (n+m) x (n+m), symmetric

  AnsatzMetric(Dims d, FieldMatrix e) : dims(d), entries(std::move(e)) {
    if (entries.rows() != dims.total() || entries.cols() != dims.total())
      throw std::invalid_argument("AnsatzMetric: matrix must be (n+m) square");
  }
};

// Assemble the off-diagonal ansatz as derived fields, so the result can be
// evaluated with jets anywhere (round-trip tests, ansatz-mode pipelines).
inline AnsatzMetric to_ansatz(const DMetric& dm, const NConnection& nc) {
  if (!(dm.dims == nc.dims))
    throw std::invalid_argument("to_ansatz: dims mismatch");
  const int n = dm.dims.n, m = dm.dims.m;
  FieldMatrix entries(n + m, n + m);
  auto entry = [&](int mu, int nu) {
    return ScalarField::from_function(
        [dm, nc, mu, nu, n, m](const Eigen::VectorXd& point, int order) {
          auto G = [&](int i, int j) { return dm.g(i, j).jet(point, order); };
          auto H = [&](int a, int b) { return dm.h(a, b).jet(point, order); };
          auto N = [&](int a, int i) { return nc.coeff(a, i).jet(point, order); };
          if (mu < n && nu < n) {
            Jet acc = G(mu, nu);
            for (int a = 0; a < m; ++a)
              for (int b = 0; b < m; ++b)
                acc += N(a, mu) * N(b, nu) * H(a, b);
            return acc;
          }
          if (mu < n) {  // nu = n + a
            Jet acc = Jet(0.0);
            for (int b = 0; b < m; ++b) acc += H(nu - n, b) * N(b, mu);
            return acc;
          }
          if (nu < n) {
            Jet acc = Jet(0.0);
            for (int b = 0; b < m; ++b) acc += H(mu - n, b) * N(b, nu);
            return acc;
          }
          return H(mu - n, nu - n);
        },
        "ansatz(" + std::to_string(mu) + "," + std::to_string(nu) + ")");
  };
  for (int mu = 0; mu < n + m; ++mu)
    for (int nu = 0; nu < n + m; ++nu) entries(mu, nu) = entry(mu, nu);
  return AnsatzMetric(dm.dims, std::move(entries));
}

inline Eigen::MatrixXd ansatz_values(const AnsatzMetric& am,
                                     const Eigen::VectorXd& point) {
  const int d = am.dims.total();
  Eigen::MatrixXd out(d, d);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = 0; nu < d; ++nu) out(mu, nu) = am.entries(mu, nu).value(point);
  return out;
}

struct ExtractedJets {
  JetMatrix g, h, N;
};

// Algebraic block extraction at the jet level:
//   h = vv block, N^b_i = h^{ba} (vh block)_{ai}, g = hh block - N^T h N.
// g and h are mirrored across the diagonal so downstream symmetry-based
// cancellations (canonical torsion zeros) stay exact.
inline ExtractedJets extract_nconnection_jets(const JetMatrix& full,
                                              const Dims& dims) {
  const int n = dims.n, m = dims.m;
  if (full.rows() != n + m || full.cols() != n + m)
    throw std::invalid_argument("extract_nconnection_jets: shape");
  ExtractedJets out;
  out.h = full.block(n, n, m, m);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) out.h(b, a) = out.h(a, b);
  JetMatrix hinv = jet_matrix_inverse(out.h, 1e-10, "ansatz vv-block");
  out.N = JetMatrix(m, n);
  for (int b = 0; b < m; ++b)
    for (int i = 0; i < n; ++i) {
      Jet acc = Jet(0.0);
      for (int a = 0; a < m; ++a) acc += hinv(b, a) * full(n + a, i);
      out.N(b, i) = acc;
    }
  out.g = JetMatrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Jet acc = full(i, j);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          acc -= out.N(a, i) * out.h(a, b) * out.N(b, j);
      out.g(i, j) = acc;
      out.g(j, i) = acc;
    }
  return out;
}

struct ExtractedBlocks {
  Eigen::MatrixXd g, h, N;
};

inline ExtractedBlocks extract_nconnection(const AnsatzMetric& am,
                                           const Eigen::VectorXd& point) {
  const int d = am.dims.total();
  JetMatrix full(d, d);
  for (int mu = 0; mu < d; ++mu)
    for (int nu = mu; nu < d; ++nu) {
      Jet e = am.entries(mu, nu).jet(point, 0);
      full(mu, nu) = e;
      full(nu, mu) = e;
    }
  ExtractedJets jets = extract_nconnection_jets(full, am.dims);
  return ExtractedBlocks{values(jets.g), values(jets.h), values(jets.N)};
}

// Max over (i, a) of |brg(e_i, d_a)|, the pairing of a horizontal frame of
// the GIVEN N-connection with a vertical coordinate vector under the ansatz
// metric. Zero exactly when N is the connection the metric encodes.
inline double block_orthogonality_residual(const AnsatzMetric& am,
                                           const NConnection& nc,
                                           const Eigen::VectorXd& point) {
  if (!(am.dims == nc.dims))
    throw std::invalid_argument("block_orthogonality_residual: dims mismatch");
  const int n = am.dims.n, m = am.dims.m;
  Eigen::MatrixXd full = ansatz_values(am, point);
  Eigen::MatrixXd N(m, n);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) N(a, i) = nc.coeff(a, i).value(point);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) {
      double acc = full(i, n + a);
      for (int b = 0; b < m; ++b) acc -= N(b, i) * full(n + b, n + a);
      worst = std::max(worst, std::abs(acc));
    }
  return worst;
}

}  // namespace nholo
