// Distinguished linear connections on the total space, split into the four
// blocks an N-connection induces: Lh [i][j][k] and Lv [a][b][k] for
// horizontal directions, Ch [i][j][c] and Cv [a][b][c] for vertical ones.
// Coefficient convention throughout: coeff(out, object, direction), so the
// LAST index names the frame direction the derivative is taken along.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "nholo/geometry.hpp"
#include "nholo/tensor.hpp"

namespace nholo {

// The vv block of the metric-compatible connection symmetrizes the vertical
// Christoffel bracket over its lower pair. kUnsymmetrized repeats the first
// direction in the middle term instead; it is kept as a diagnostic knob
// because it breaks vv-metricity in a detectable way while leaving the other
// three blocks untouched.
enum class VvTermForm { kSymmetrized, kUnsymmetrized };

struct DConnectionJets {
  Dims dims{1, 1};
  Tensor3<Jet> Lh;  // (i, j, k)
  Tensor3<Jet> Lv;  // (a, b, k)
  Tensor3<Jet> Ch;  // (i, j, c)
  Tensor3<Jet> Cv;  // (a, b, c)
};

struct DConnectionValues {
  Dims dims{1, 1};
  Tensor3<double> Lh, Lv, Ch, Cv;
};

inline DConnectionValues values(const DConnectionJets& c) {
  return DConnectionValues{c.dims, values(c.Lh), values(c.Lv), values(c.Ch),
                           values(c.Cv)};
}

// Metric-compatible connection with vanishing pure-horizontal and
// pure-vertical torsion. Needs geometry jets of order >= 1 (each block
// spends one derivative on the metric or N).
inline DConnectionJets canonical_connection_jets(
    const GeometryJets& geo, VvTermForm vv_form = VvTermForm::kSymmetrized) {
  const int n = geo.dims.n, m = geo.dims.m;
  DConnectionJets c;
  c.dims = geo.dims;
  c.Lh = Tensor3<Jet>(n, n, n);
  c.Lv = Tensor3<Jet>(m, m, n);
  c.Ch = Tensor3<Jet>(n, n, m);
  c.Cv = Tensor3<Jet>(m, m, m);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet acc = 0.0;
        for (int r = 0; r < n; ++r)
          acc += geo.ginv(i, r) *
                 (geo.hframe(geo.g(j, r), k) + geo.hframe(geo.g(k, r), j) -
                  geo.hframe(geo.g(j, k), r));
        c.Lh(i, j, k) = 0.5 * acc;
      }

  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < n; ++k) {
        Jet acc = geo.dN(b, a, k);
        for (int cc = 0; cc < m; ++cc) {
          Jet inner = geo.hframe(geo.h(b, cc), k);
          for (int d = 0; d < m; ++d)
            inner -= geo.h(d, cc) * geo.dN(b, d, k) +
                     geo.h(d, b) * geo.dN(cc, d, k);
          acc += 0.5 * geo.hinv(a, cc) * inner;
        }
        c.Lv(a, b, k) = acc;
      }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int cc = 0; cc < m; ++cc) {
        Jet acc = 0.0;
        for (int k = 0; k < n; ++k)
          acc += geo.ginv(i, k) * geo.vpartial(geo.g(j, k), cc);
        c.Ch(i, j, cc) = 0.5 * acc;
      }

  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int cc = 0; cc < m; ++cc) {
        Jet acc = 0.0;
        for (int d = 0; d < m; ++d) {
          Jet middle = vv_form == VvTermForm::kSymmetrized
                           ? geo.vpartial(geo.h(cc, d), b)
                           : geo.vpartial(geo.h(cc, d), cc);
          acc += geo.hinv(a, d) * (geo.vpartial(geo.h(b, d), cc) + middle -
                                   geo.vpartial(geo.h(b, cc), d));
        }
        c.Cv(a, b, cc) = 0.5 * acc;
      }

  return c;
}

// Shares Lh and Cv with the metric-compatible connection but takes the bare
// N-gradient in the vh block and drops the hv block entirely. Fails
// vh-metricity whenever h varies along the horizontal frame.
inline DConnectionJets berwald_connection_jets(const GeometryJets& geo) {
  const int n = geo.dims.n, m = geo.dims.m;
  DConnectionJets c = canonical_connection_jets(geo);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < n; ++k) c.Lv(a, b, k) = geo.dN(b, a, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int cc = 0; cc < m; ++cc) c.Ch(i, j, cc) = Jet(0.0);
  return c;
}

// Anholonomy coefficients of the adapted frame as jets:
// [e_alpha, e_beta] = W(gamma, alpha, beta) e_gamma. Only the rows with a
// vertical output index are nonzero.
inline Tensor3<Jet> anholonomy_jets(const GeometryJets& geo) {
  const int n = geo.dims.n, m = geo.dims.m, nm = n + m;
  Tensor3<Jet> W(nm, nm, nm);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        Jet om = geo.omega(a, i, j);
        W(n + a, i, j) = om;
        W(n + a, j, i) = -om;
      }
      for (int b = 0; b < m; ++b) {
        Jet d = geo.dN(a, b, i);  // e_{n+a}(N^b_i)
        W(n + b, i, n + a) = d;
        W(n + b, n + a, i) = -d;
      }
    }
  return W;
}

// Embed the four blocks into a dense (n+m)^3 coefficient cube, zeros in the
// slots a distinguished connection never populates.
inline Tensor3<Jet> full_frame(const DConnectionJets& c) {
  const int n = c.dims.n, m = c.dims.m, nm = n + m;
  Tensor3<Jet> full(nm, nm, nm);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) full(i, j, k) = c.Lh(i, j, k);
      for (int cc = 0; cc < m; ++cc) full(i, j, n + cc) = c.Ch(i, j, cc);
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      for (int k = 0; k < n; ++k) full(n + a, n + b, k) = c.Lv(a, b, k);
      for (int cc = 0; cc < m; ++cc)
        full(n + a, n + b, n + cc) = c.Cv(a, b, cc);
    }
  return full;
}

// Levi-Civita connection of the assembled metric, expressed in the adapted
// frame via the anholonomic Koszul formula:
//   2 G(D_alpha e_beta, e_gamma) = e_alpha G_bg + e_beta G_ag - e_gamma G_ab
//     + W(l,alpha,beta) G_lg - W(l,beta,gamma) G_la + W(l,gamma,alpha) G_lb.
// Returned as coeff(delta, beta, alpha) with alpha the direction.
inline Tensor3<Jet> levi_civita_jets(const GeometryJets& geo) {
  const int nm = geo.dims.total();
  Tensor3<Jet> W = anholonomy_jets(geo);
  Tensor3<Jet> K(nm, nm, nm);  // (alpha, beta, gamma), all lowered
  for (int al = 0; al < nm; ++al)
    for (int be = 0; be < nm; ++be)
      for (int ga = 0; ga < nm; ++ga) {
        Jet acc = geo.frame_dir(geo.G(be, ga), al) +
                  geo.frame_dir(geo.G(al, ga), be) -
                  geo.frame_dir(geo.G(al, be), ga);
        for (int l = 0; l < nm; ++l)
          acc += W(l, al, be) * geo.G(l, ga) - W(l, be, ga) * geo.G(l, al) +
                 W(l, ga, al) * geo.G(l, be);
        K(al, be, ga) = 0.5 * acc;
      }
  Tensor3<Jet> full(nm, nm, nm);
  for (int de = 0; de < nm; ++de)
    for (int be = 0; be < nm; ++be)
      for (int al = 0; al < nm; ++al) {
        Jet acc = 0.0;
        for (int ga = 0; ga < nm; ++ga) acc += geo.Ginv(de, ga) * K(al, be, ga);
        full(de, be, al) = acc;
      }
  return full;
}

// Frame derivatives of the metric blocks minus the connection terms, reported
// per (metric block, frame direction) pair. All four vanish for the
// metric-compatible connection; vh is the block the bare N-gradient breaks.
struct MetricityResidual {
  double hh = 0.0;  // D_k g_ij
  double hv = 0.0;  // D_c g_ij
  double vh = 0.0;  // D_k h_ab
  double vv = 0.0;  // D_c h_ab
  double max() const { return std::max(std::max(hh, hv), std::max(vh, vv)); }
};

inline MetricityResidual metricity_residual(const DConnectionJets& c,
                                            const GeometryJets& geo) {
  const int n = geo.dims.n, m = geo.dims.m;
  MetricityResidual r;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double acc = geo.hframe(geo.g(i, j), k).value();
        for (int l = 0; l < n; ++l)
          acc -= c.Lh(l, i, k).value() * geo.g(l, j).value() +
                 c.Lh(l, j, k).value() * geo.g(i, l).value();
        r.hh = std::max(r.hh, std::abs(acc));
      }
      for (int cc = 0; cc < m; ++cc) {
        double acc = geo.vpartial(geo.g(i, j), cc).value();
        for (int l = 0; l < n; ++l)
          acc -= c.Ch(l, i, cc).value() * geo.g(l, j).value() +
                 c.Ch(l, j, cc).value() * geo.g(i, l).value();
        r.hv = std::max(r.hv, std::abs(acc));
      }
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      for (int k = 0; k < n; ++k) {
        double acc = geo.hframe(geo.h(a, b), k).value();
        for (int d = 0; d < m; ++d)
          acc -= c.Lv(d, a, k).value() * geo.h(d, b).value() +
                 c.Lv(d, b, k).value() * geo.h(a, d).value();
        r.vh = std::max(r.vh, std::abs(acc));
      }
      for (int cc = 0; cc < m; ++cc) {
        double acc = geo.vpartial(geo.h(a, b), cc).value();
        for (int d = 0; d < m; ++d)
          acc -= c.Cv(d, a, cc).value() * geo.h(d, b).value() +
                 c.Cv(d, b, cc).value() * geo.h(a, d).value();
        r.vv = std::max(r.vv, std::abs(acc));
      }
    }
  return r;
}

// Same residual for a dense coefficient cube against the assembled frame
// metric; used to confirm the Levi-Civita coefficients.
inline double full_metricity_residual(const Tensor3<Jet>& full,
                                      const GeometryJets& geo) {
  const int nm = geo.dims.total();
  double worst = 0.0;
  for (int al = 0; al < nm; ++al)
    for (int be = 0; be < nm; ++be)
      for (int ga = 0; ga < nm; ++ga) {
        double acc = geo.frame_dir(geo.G(be, ga), al).value();
        for (int l = 0; l < nm; ++l)
          acc -= full(l, be, al).value() * geo.G(l, ga).value() +
                 full(l, ga, al).value() * geo.G(be, l).value();
        worst = std::max(worst, std::abs(acc));
      }
  return worst;
}

// Deformation joining the Levi-Civita coefficients to the metric-compatible
// distinguished ones. Only two blocks are populated:
//   Pvh(a, b, k) = e_{n+b}(N^a_k)
//   Phv(i, j, c) = -1/2 ginv^{ik} Omega^a_{kj} h_{ca}
// residual is the worst blockwise gap in the deformation identity; it checks
// that the split connection really is the Levi-Civita one plus P.
struct Distortion {
  Tensor3<double> Pvh;  // (a, b, k)
  Tensor3<double> Phv;  // (i, j, c)
  double residual = 0.0;
};

inline Distortion distortion(const GeometryJets& geo) {
  const int n = geo.dims.n, m = geo.dims.m;
  DConnectionJets can = canonical_connection_jets(geo);
  Tensor3<Jet> lc = levi_civita_jets(geo);

  Distortion d;
  d.Pvh = Tensor3<double>(m, m, n);
  d.Phv = Tensor3<double>(n, n, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < n; ++k) d.Pvh(a, b, k) = geo.dN(b, a, k).value();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int cc = 0; cc < m; ++cc) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
          for (int a = 0; a < m; ++a)
            acc += geo.ginv(i, k).value() * geo.omega(a, k, j).value() *
                   geo.h(cc, a).value();
        d.Phv(i, j, cc) = -0.5 * acc;
      }

  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        worst = std::max(
            worst, std::abs(can.Lh(i, j, k).value() - lc(i, j, k).value()));
  // The vh piece of the Levi-Civita connection sits at the swapped lower
  // pair: torsion freeness trades D_{e_{n+b}} e_k against D_{e_k} e_{n+b}.
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < n; ++k)
        worst = std::max(worst, std::abs(can.Lv(a, b, k).value() -
                                         (lc(n + a, k, n + b).value() +
                                          d.Pvh(a, b, k))));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int cc = 0; cc < m; ++cc)
        worst = std::max(worst, std::abs(can.Ch(i, j, cc).value() -
                                         (lc(i, j, n + cc).value() +
                                          d.Phv(i, j, cc))));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int cc = 0; cc < m; ++cc)
        worst = std::max(worst,
                         std::abs(can.Cv(a, b, cc).value() -
                                  lc(n + a, n + b, n + cc).value()));
  d.residual = worst;
  return d;
}

}  // namespace nholo
