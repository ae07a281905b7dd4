// Torsion and curvature of a distinguished connection, each computed three
// ways: from the block component formulas, from the structure equations with
// exterior derivatives taken in coordinates, and from commutators of
// covariant derivatives with frame brackets taken in coordinates. The paths
// share only the geometry jets, so agreement is a real cross-check.
//
// Storage convention for the 2-form slots: every block stores the form
// evaluated on (e_nu, e_mu) with the block's last two indices (mu, nu), i.e.
// the pair is uniformly reversed relative to the index order. Antisymmetry
// makes the choice a convention; it has to be applied consistently and is,
// everywhere in this header.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "nholo/dconn.hpp"
#include "nholo/geometry.hpp"
#include "nholo/tensor.hpp"

namespace nholo {

// ---------------------------------------------------------------------------
// Coordinate components of the adapted frame and coframe as jets. Rows of E
// are frame vectors, columns of A are coframe covectors; both are dense
// (n+m)^2 with the N-block carrying all the structure.

namespace detail {

inline JetMatrix frame_components(const GeometryJets& geo) {
  const int n = geo.dims.n, m = geo.dims.m, nm = n + m;
  JetMatrix E(nm, nm);
  for (int r = 0; r < nm; ++r)
    for (int c = 0; c < nm; ++c) E(r, c) = Jet(r == c ? 1.0 : 0.0);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) E(i, n + a) = -geo.N(a, i);
  return E;
}

inline JetMatrix coframe_components(const GeometryJets& geo) {
  const int n = geo.dims.n, m = geo.dims.m, nm = n + m;
  JetMatrix A(nm, nm);
  for (int r = 0; r < nm; ++r)
    for (int c = 0; c < nm; ++c) A(r, c) = Jet(r == c ? 1.0 : 0.0);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) A(i, n + a) = geo.N(a, i);
  return A;
}

// Anholonomy values from generic vector-field brackets of the coordinate
// components, contracted back through the coframe. Independent of the
// analytic formulas in anholonomy_jets.
inline Tensor3<double> bracket_anholonomy_values(const GeometryJets& geo) {
  const int nm = geo.dims.total();
  JetMatrix E = frame_components(geo);
  JetMatrix A = coframe_components(geo);
  Tensor3<double> W(nm, nm, nm);
  for (int mu = 0; mu < nm; ++mu)
    for (int nu = mu + 1; nu < nm; ++nu) {
      for (int al = 0; al < nm; ++al) {
        double acc = 0.0;
        for (int cb = 0; cb < nm; ++cb) {  // coordinate slot of the bracket
          double br = 0.0;
          for (int cd = 0; cd < nm; ++cd)
            br += E(mu, cd).value() * E(nu, cb).derivative(cd).value() -
                  E(nu, cd).value() * E(mu, cb).derivative(cd).value();
          acc += A(cb, al).value() * br;
        }
        W(al, mu, nu) = acc;
        W(al, nu, mu) = -acc;
      }
    }
  return W;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Torsion. Block storage:
//   Thh (i, j, k) = T^i_{jk}         Thv (i, j, a) = T^i_{j a}
//   Tvh (a, j, i) = T^a_{ji}         Tvm (a, b, i) = T^a_{b i}
//   Tvv (a, b, c) = T^a_{bc}

struct TorsionBlocks {
  Dims dims{1, 1};
  Tensor3<double> Thh, Thv, Tvh, Tvm, Tvv;
};

inline double max_abs(const TorsionBlocks& t) {
  return std::max({max_abs(t.Thh), max_abs(t.Thv), max_abs(t.Tvh),
                   max_abs(t.Tvm), max_abs(t.Tvv)});
}

inline double gap(const TorsionBlocks& a, const TorsionBlocks& b) {
  double worst = 0.0;
  auto block = [&worst](const Tensor3<double>& x, const Tensor3<double>& y) {
    for (int i = 0; i < x.dim0(); ++i)
      for (int j = 0; j < x.dim1(); ++j)
        for (int k = 0; k < x.dim2(); ++k)
          worst = std::max(worst, std::abs(x(i, j, k) - y(i, j, k)));
  };
  block(a.Thh, b.Thh);
  block(a.Thv, b.Thv);
  block(a.Tvh, b.Tvh);
  block(a.Tvm, b.Tvm);
  block(a.Tvv, b.Tvv);
  return worst;
}

inline TorsionBlocks dtorsion(const DConnectionJets& c,
                              const GeometryJets& geo) {
  const int n = geo.dims.n, m = geo.dims.m;
  TorsionBlocks t;
  t.dims = geo.dims;
  t.Thh = Tensor3<double>(n, n, n);
  t.Thv = Tensor3<double>(n, n, m);
  t.Tvh = Tensor3<double>(m, n, n);
  t.Tvm = Tensor3<double>(m, m, n);
  t.Tvv = Tensor3<double>(m, m, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k)
        t.Thh(i, j, k) = c.Lh(i, j, k).value() - c.Lh(i, k, j).value();
      for (int a = 0; a < m; ++a) t.Thv(i, j, a) = c.Ch(i, j, a).value();
    }
  for (int a = 0; a < m; ++a) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) t.Tvh(a, j, i) = geo.omega(a, j, i).value();
    for (int b = 0; b < m; ++b) {
      for (int i = 0; i < n; ++i)
        t.Tvm(a, b, i) = geo.dN(b, a, i).value() - c.Lv(a, b, i).value();
      for (int cc = 0; cc < m; ++cc)
        t.Tvv(a, b, cc) = c.Cv(a, b, cc).value() - c.Cv(a, cc, b).value();
    }
  }
  return t;
}

namespace detail {

// Shared readout: given the torsion 2-form components SE(al, mu, nu) =
// T^al(e_mu, e_nu), split them into the block layout.
inline TorsionBlocks split_torsion_form(
    const GeometryJets& geo,
    const std::function<double(int, int, int)>& se) {
  const int n = geo.dims.n, m = geo.dims.m;
  TorsionBlocks t;
  t.dims = geo.dims;
  t.Thh = Tensor3<double>(n, n, n);
  t.Thv = Tensor3<double>(n, n, m);
  t.Tvh = Tensor3<double>(m, n, n);
  t.Tvm = Tensor3<double>(m, m, n);
  t.Tvv = Tensor3<double>(m, m, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) t.Thh(i, j, k) = se(i, k, j);
      for (int a = 0; a < m; ++a) t.Thv(i, j, a) = se(i, geo.dims.n + a, j);
    }
  for (int a = 0; a < m; ++a) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) t.Tvh(a, j, i) = se(n + a, i, j);
    for (int b = 0; b < m; ++b) {
      for (int i = 0; i < n; ++i) t.Tvm(a, b, i) = se(n + a, n + b, i);
      for (int cc = 0; cc < m; ++cc)
        t.Tvv(a, b, cc) = se(n + a, n + cc, n + b);
    }
  }
  return t;
}

}  // namespace detail

// First structure equation, T^al = d e^al + Gamma^al_be ^ e^be, with the
// exterior derivative computed from coordinate components of the coframe.
inline TorsionBlocks torsion_via_forms_oracle(const DConnectionJets& c,
                                              const GeometryJets& geo) {
  const int nm = geo.dims.total();
  JetMatrix E = detail::frame_components(geo);
  JetMatrix A = detail::coframe_components(geo);
  Tensor3<Jet> full = full_frame(c);

  // de^al(e_mu, e_nu) = sum over coordinate slots of
  //   e_mu(A^al_cb) E_nu^cb - e_nu(A^al_cb) E_mu^cb.
  auto de = [&](int al, int mu, int nu) {
    double acc = 0.0;
    for (int cb = 0; cb < nm; ++cb) {
      double dmu = 0.0, dnu = 0.0;
      for (int cd = 0; cd < nm; ++cd) {
        dmu += E(mu, cd).value() * A(cb, al).derivative(cd).value();
        dnu += E(nu, cd).value() * A(cb, al).derivative(cd).value();
      }
      acc += dmu * E(nu, cb).value() - dnu * E(mu, cb).value();
    }
    return acc;
  };
  auto se = [&](int al, int mu, int nu) {
    return de(al, mu, nu) + full(al, nu, mu).value() - full(al, mu, nu).value();
  };
  return detail::split_torsion_form(geo, se);
}

// T(e_mu, e_nu) = D_mu e_nu - D_nu e_mu - [e_mu, e_nu], with the bracket
// taken on coordinate components.
inline TorsionBlocks torsion_via_commutator_oracle(const DConnectionJets& c,
                                                   const GeometryJets& geo) {
  Tensor3<double> W = detail::bracket_anholonomy_values(geo);
  Tensor3<Jet> full = full_frame(c);
  auto se = [&](int al, int mu, int nu) {
    return full(al, nu, mu).value() - full(al, mu, nu).value() - W(al, mu, nu);
  };
  return detail::split_torsion_form(geo, se);
}

// ---------------------------------------------------------------------------
// Curvature. Block storage (last two indices are the reversed form pair):
//   B1 (i, h, j, k) = R^i_{h jk}     B2 (a, b, j, k) = R^a_{b jk}
//   B3 (i, j, k, a) = P^i_{j ka}     B4 (c, b, k, a) = P^c_{b ka}
//   B5 (i, j, b, c) = S^i_{j bc}     B6 (a, b, c, d) = S^a_{b cd}

struct CurvatureBlocks {
  Dims dims{1, 1};
  Tensor4<double> B1, B2, B3, B4, B5, B6;
};

inline double gap(const CurvatureBlocks& a, const CurvatureBlocks& b) {
  double worst = 0.0;
  auto block = [&worst](const Tensor4<double>& x, const Tensor4<double>& y) {
    for (int i = 0; i < x.dim0(); ++i)
      for (int j = 0; j < x.dim1(); ++j)
        for (int k = 0; k < x.dim2(); ++k)
          for (int l = 0; l < x.dim3(); ++l)
            worst = std::max(worst, std::abs(x(i, j, k, l) - y(i, j, k, l)));
  };
  block(a.B1, b.B1);
  block(a.B2, b.B2);
  block(a.B3, b.B3);
  block(a.B4, b.B4);
  block(a.B5, b.B5);
  block(a.B6, b.B6);
  return worst;
}

inline CurvatureBlocks allocate_curvature(const Dims& dims) {
  const int n = dims.n, m = dims.m;
  CurvatureBlocks r;
  r.dims = dims;
  r.B1 = Tensor4<double>(n, n, n, n);
  r.B2 = Tensor4<double>(m, m, n, n);
  r.B3 = Tensor4<double>(n, n, n, m);
  r.B4 = Tensor4<double>(m, m, n, m);
  r.B5 = Tensor4<double>(n, n, m, m);
  r.B6 = Tensor4<double>(m, m, m, m);
  return r;
}

// Block component formulas. The mixed blocks use the h-covariant derivative
// of the vertical coefficients and the mixed torsion T^b_{ka}; the structure
// below keeps those groupings visible.
inline CurvatureBlocks dcurvature(const DConnectionJets& c,
                                  const GeometryJets& geo) {
  const int n = geo.dims.n, m = geo.dims.m;
  CurvatureBlocks r = allocate_curvature(geo.dims);

  for (int i = 0; i < n; ++i)
    for (int h = 0; h < n; ++h)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double acc = geo.hframe(c.Lh(i, h, j), k).value() -
                       geo.hframe(c.Lh(i, h, k), j).value();
          for (int mm = 0; mm < n; ++mm)
            acc += c.Lh(mm, h, j).value() * c.Lh(i, mm, k).value() -
                   c.Lh(mm, h, k).value() * c.Lh(i, mm, j).value();
          for (int a = 0; a < m; ++a)
            acc -= c.Ch(i, h, a).value() * geo.omega(a, k, j).value();
          r.B1(i, h, j, k) = acc;
        }

  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double acc = geo.hframe(c.Lv(a, b, j), k).value() -
                       geo.hframe(c.Lv(a, b, k), j).value();
          for (int cc = 0; cc < m; ++cc)
            acc += c.Lv(cc, b, j).value() * c.Lv(a, cc, k).value() -
                   c.Lv(cc, b, k).value() * c.Lv(a, cc, j).value();
          for (int cc = 0; cc < m; ++cc)
            acc -= c.Cv(a, b, cc).value() * geo.omega(cc, k, j).value();
          r.B2(a, b, j, k) = acc;
        }

  // D_k C^i_{ja}: h-covariant derivative of the hv block.
  auto DkCh = [&](int i, int j, int a, int k) {
    double acc = geo.hframe(c.Ch(i, j, a), k).value();
    for (int mm = 0; mm < n; ++mm)
      acc += c.Lh(i, mm, k).value() * c.Ch(mm, j, a).value() -
             c.Lh(mm, j, k).value() * c.Ch(i, mm, a).value();
    for (int b = 0; b < m; ++b)
      acc -= c.Lv(b, a, k).value() * c.Ch(i, j, b).value();
    return acc;
  };
  auto Tmix = [&](int b, int k, int a) {
    return geo.dN(a, b, k).value() - c.Lv(b, a, k).value();
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < m; ++a) {
          double acc =
              geo.vpartial(c.Lh(i, j, k), a).value() - DkCh(i, j, a, k);
          for (int b = 0; b < m; ++b)
            acc += c.Ch(i, j, b).value() * Tmix(b, k, a);
          r.B3(i, j, k, a) = acc;
        }

  auto DkCv = [&](int cc, int b, int a, int k) {
    double acc = geo.hframe(c.Cv(cc, b, a), k).value();
    for (int d = 0; d < m; ++d)
      acc += c.Lv(cc, d, k).value() * c.Cv(d, b, a).value() -
             c.Lv(d, b, k).value() * c.Cv(cc, d, a).value() -
             c.Lv(d, a, k).value() * c.Cv(cc, b, d).value();
    return acc;
  };
  for (int cc = 0; cc < m; ++cc)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < m; ++a) {
          double acc =
              geo.vpartial(c.Lv(cc, b, k), a).value() - DkCv(cc, b, a, k);
          for (int d = 0; d < m; ++d)
            acc += c.Cv(cc, b, d).value() * Tmix(d, k, a);
          r.B4(cc, b, k, a) = acc;
        }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int b = 0; b < m; ++b)
        for (int cc = 0; cc < m; ++cc) {
          double acc = geo.vpartial(c.Ch(i, j, b), cc).value() -
                       geo.vpartial(c.Ch(i, j, cc), b).value();
          for (int mm = 0; mm < n; ++mm)
            acc += c.Ch(mm, j, b).value() * c.Ch(i, mm, cc).value() -
                   c.Ch(mm, j, cc).value() * c.Ch(i, mm, b).value();
          r.B5(i, j, b, cc) = acc;
        }

  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int cc = 0; cc < m; ++cc)
        for (int d = 0; d < m; ++d) {
          double acc = geo.vpartial(c.Cv(a, b, cc), d).value() -
                       geo.vpartial(c.Cv(a, b, d), cc).value();
          for (int e = 0; e < m; ++e)
            acc += c.Cv(e, b, cc).value() * c.Cv(a, e, d).value() -
                   c.Cv(e, b, d).value() * c.Cv(a, e, cc).value();
          r.B6(a, b, cc, d) = acc;
        }

  return r;
}

namespace detail {

// Split the 2-form components form(al, be, mu, nu) = R^al_be(e_mu, e_nu)
// into the six block slots, reversing the pair uniformly.
inline CurvatureBlocks split_curvature_form(
    const GeometryJets& geo,
    const std::function<double(int, int, int, int)>& form) {
  const int n = geo.dims.n, m = geo.dims.m;
  CurvatureBlocks r = allocate_curvature(geo.dims);
  for (int i = 0; i < n; ++i)
    for (int h = 0; h < n; ++h)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) r.B1(i, h, j, k) = form(i, h, k, j);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          r.B2(a, b, j, k) = form(n + a, n + b, k, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < m; ++a) r.B3(i, j, k, a) = form(i, j, n + a, k);
  for (int cc = 0; cc < m; ++cc)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < m; ++a)
          r.B4(cc, b, k, a) = form(n + cc, n + b, n + a, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int b = 0; b < m; ++b)
        for (int cc = 0; cc < m; ++cc)
          r.B5(i, j, b, cc) = form(i, j, n + cc, n + b);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int cc = 0; cc < m; ++cc)
        for (int d = 0; d < m; ++d)
          r.B6(a, b, cc, d) = form(n + a, n + b, n + d, n + cc);
  return r;
}

}  // namespace detail

// Second structure equation on the dense coefficient cube,
//   R^al_be = d Gamma^al_be + Gamma^al_ga ^ Gamma^ga_be,
// evaluated on frame pairs with the analytic anholonomy supplying the
// non-closure of the coframe.
inline CurvatureBlocks curvature_via_forms_oracle(const DConnectionJets& c,
                                                  const GeometryJets& geo) {
  const int nm = geo.dims.total();
  Tensor3<Jet> full = full_frame(c);
  Tensor3<Jet> W = anholonomy_jets(geo);
  auto form = [&](int al, int be, int mu, int nu) {
    double acc = geo.frame_dir(full(al, be, nu), mu).value() -
                 geo.frame_dir(full(al, be, mu), nu).value();
    for (int l = 0; l < nm; ++l) {
      acc -= full(al, be, l).value() * W(l, mu, nu).value();
      acc += full(al, l, mu).value() * full(l, be, nu).value() -
             full(al, l, nu).value() * full(l, be, mu).value();
    }
    return acc;
  };
  return detail::split_curvature_form(geo, form);
}

// R(e_mu, e_nu) e_be = D_mu (D_nu e_be) - D_nu (D_mu e_be) - D_[e_mu, e_nu]
// e_be, composed on frame-component jet fields with the bracket term from
// coordinate brackets.
inline CurvatureBlocks curvature_via_commutator_oracle(
    const DConnectionJets& c, const GeometryJets& geo) {
  const int nm = geo.dims.total();
  Tensor3<Jet> full = full_frame(c);
  Tensor3<double> W = detail::bracket_anholonomy_values(geo);

  // D_mu applied to a vector field given by frame components v^l (jets):
  // (D_mu v)^al = e_mu(v^al) + Gamma^al_{l mu} v^l.
  auto covariant = [&](const std::vector<Jet>& v, int mu) {
    std::vector<Jet> out(static_cast<std::size_t>(nm), Jet(0.0));
    for (int al = 0; al < nm; ++al) {
      Jet acc = geo.frame_dir(v[static_cast<std::size_t>(al)], mu);
      for (int l = 0; l < nm; ++l)
        acc += full(al, l, mu) * v[static_cast<std::size_t>(l)];
      out[static_cast<std::size_t>(al)] = acc;
    }
    return out;
  };

  auto form = [&](int al, int be, int mu, int nu) {
    std::vector<Jet> ebe(static_cast<std::size_t>(nm), Jet(0.0));
    ebe[static_cast<std::size_t>(be)] = Jet(1.0);
    std::vector<Jet> dnu = covariant(ebe, nu);
    std::vector<Jet> dmu = covariant(ebe, mu);
    double acc = covariant(dnu, mu)[static_cast<std::size_t>(al)].value() -
                 covariant(dmu, nu)[static_cast<std::size_t>(al)].value();
    for (int l = 0; l < nm; ++l)
      acc -= W(l, mu, nu) * full(al, be, l).value();
    return acc;
  };
  return detail::split_curvature_form(geo, form);
}

// ---------------------------------------------------------------------------
// Contractions. The Ricci matrix is indexed by frame slots and is not
// symmetric in general: the two mixed blocks come from different curvature
// blocks and need not match.

struct RicciData {
  Eigen::MatrixXd ricci;     // (n+m) x (n+m)
  Eigen::MatrixXd einstein;  // (n+m) x (n+m)
  double scalar = 0.0;
};

inline RicciData ricci_einstein(const CurvatureBlocks& r,
                                const GeometryJets& geo) {
  const int n = geo.dims.n, m = geo.dims.m, nm = n + m;
  RicciData out;
  out.ricci = Eigen::MatrixXd::Zero(nm, nm);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += r.B1(k, i, j, k);
      out.ricci(i, j) = acc;
    }
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < m; ++a) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc -= r.B3(k, i, k, a);
      out.ricci(i, n + a) = acc;
    }
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int b = 0; b < m; ++b) acc += r.B4(b, a, i, b);
      out.ricci(n + a, i) = acc;
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double acc = 0.0;
      for (int cc = 0; cc < m; ++cc) acc += r.B6(cc, a, b, cc);
      out.ricci(n + a, n + b) = acc;
    }

  double scalar = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      scalar += geo.ginv(i, j).value() * out.ricci(i, j);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      scalar += geo.hinv(a, b).value() * out.ricci(n + a, n + b);
  out.scalar = scalar;

  out.einstein = out.ricci;
  for (int al = 0; al < nm; ++al)
    for (int be = 0; be < nm; ++be)
      out.einstein(al, be) -= 0.5 * geo.G(al, be).value() * scalar;
  return out;
}

// Worst entry of E_{al be} - Upsilon_{al be} for a block-diagonal source
// Upsilon = diag(lambda_h g, lambda_v h).
inline double einstein_source_residual(const RicciData& rd,
                                       const GeometryJets& geo,
                                       double lambda_h, double lambda_v) {
  const int n = geo.dims.n, m = geo.dims.m, nm = n + m;
  double worst = 0.0;
  for (int al = 0; al < nm; ++al)
    for (int be = 0; be < nm; ++be) {
      double src = 0.0;
      if (al < n && be < n) src = lambda_h * geo.g(al, be).value();
      if (al >= n && be >= n) src = lambda_v * geo.h(al - n, be - n).value();
      worst = std::max(worst, std::abs(rd.einstein(al, be) - src));
    }
  return worst;
}

}  // namespace nholo
