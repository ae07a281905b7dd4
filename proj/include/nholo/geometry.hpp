// GeometryJets: every downstream object (connections, torsions, curvatures,
// characteristic forms) is computed from this one bundle of jets evaluated at
// a single point. Building it is the only place where metric/connection
// fields are evaluated, so all modes (d-metric + N, off-diagonal ansatz,
// Lagrangian-derived) feed the identical pipeline.
//
// Symmetric blocks are evaluated on the upper triangle and mirrored, so
// entries (i,j) and (j,i) are bit-identical; canonical-connection symmetries
// then cancel exactly in torsion components, not merely to rounding.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "nholo/dims.hpp"
#include "nholo/dmetric.hpp"
#include "nholo/jet.hpp"
#include "nholo/nconn.hpp"

namespace nholo {

struct GeometryJets {
  Dims dims{1, 1};
  int order = 0;  // truncation order of the stored entries
  Eigen::VectorXd point;
  JetMatrix g, h;        // metric blocks, n x n and m x m
  JetMatrix ginv, hinv;  // their inverses in the jet algebra
  JetMatrix N;           // connection coefficients, m x n

  // Vertical partial e_{n+a}(f) = df/dy^a; drops the jet order by one.
  Jet vpartial(const Jet& f, int a) const { return f.derivative(dims.n + a); }

  // Horizontal frame derivative e_i(f) = d_i f - N^a_i d_{n+a} f.
  Jet hframe(const Jet& f, int i) const {
    Jet acc = f.derivative(i);
    for (int a = 0; a < dims.m; ++a)
      acc -= N(a, i) * f.derivative(dims.n + a);
    return acc;
  }

  Jet frame_dir(const Jet& f, int alpha) const {
    return alpha < dims.n ? hframe(f, alpha) : vpartial(f, alpha - dims.n);
  }

  // N-connection curvature Omega^a_{ij} = e_j(N^a_i) - e_i(N^a_j).
  Jet omega(int a, int i, int j) const {
    return hframe(N(a, i), j) - hframe(N(a, j), i);
  }

  // e_b(N^a_k): the vertical derivative of the connection coefficients.
  Jet dN(int b, int a, int k) const { return N(a, k).derivative(dims.n + b); }

  // Frame metric G_{alpha beta}: block-diagonal (g, h) in the adapted frame.
  Jet G(int alpha, int beta) const {
    bool ah = alpha < dims.n, bh = beta < dims.n;
    if (ah != bh) return Jet(0.0);
    return ah ? g(alpha, beta) : h(alpha - dims.n, beta - dims.n);
  }

  Jet Ginv(int alpha, int beta) const {
    bool ah = alpha < dims.n, bh = beta < dims.n;
    if (ah != bh) return Jet(0.0);
    return ah ? ginv(alpha, beta) : hinv(alpha - dims.n, beta - dims.n);
  }
};

namespace detail {

inline JetMatrix symmetric_jets(const FieldMatrix& grid,
                                const Eigen::VectorXd& point, int order) {
  const int k = static_cast<int>(grid.rows());
  JetMatrix out(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      Jet e = grid(i, j).jet(point, order);
      out(i, j) = e;
      out(j, i) = e;
    }
  return out;
}

}  // namespace detail

inline GeometryJets make_geometry(const DMetric& dm, const NConnection& nc,
                                  const Eigen::VectorXd& point, int order) {
  if (!(dm.dims == nc.dims))
    throw std::invalid_argument("make_geometry: dims mismatch");
  if (point.size() != dm.dims.total())
    throw std::invalid_argument("make_geometry: point length");
  GeometryJets gj;
  gj.dims = dm.dims;
  gj.order = order;
  gj.point = point;
  gj.g = detail::symmetric_jets(dm.g, point, order);
  gj.h = detail::symmetric_jets(dm.h, point, order);
  gj.N = detail::nconnection_jets(nc, point, order);
  gj.ginv = jet_matrix_inverse(gj.g, 1e-10, "metric h-block");
  gj.hinv = jet_matrix_inverse(gj.h, 1e-10, "metric v-block");
  return gj;
}

inline GeometryJets make_geometry(const AnsatzMetric& am,
                                  const Eigen::VectorXd& point, int order) {
  if (point.size() != am.dims.total())
    throw std::invalid_argument("make_geometry: point length");
  JetMatrix full = detail::symmetric_jets(am.entries, point, order);
  ExtractedJets blocks = extract_nconnection_jets(full, am.dims);
  GeometryJets gj;
  gj.dims = am.dims;
  gj.order = order;
  gj.point = point;
  gj.g = std::move(blocks.g);
  gj.h = std::move(blocks.h);
  gj.N = std::move(blocks.N);
  gj.ginv = jet_matrix_inverse(gj.g, 1e-10, "extracted h-block");
  gj.hinv = jet_matrix_inverse(gj.h, 1e-10, "extracted v-block (ansatz)");
  return gj;
}

}  // namespace nholo
