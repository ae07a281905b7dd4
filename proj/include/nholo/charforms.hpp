// Characteristic forms built from the curvature of a d-connection: the
// matrix-valued curvature 2-form over adapted frame pairs, its trace powers
// under the wedge product, Chern character components, the first Pontryagin
// form, and the degree-4 term of the A-hat genus. Everything is truncated at
// form degree 4 and evaluated pointwise; no global integration happens here.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nholo/curvature.hpp"

namespace nholo {

// Curvature 2-form: for every strictly increasing frame pair mu < nu, the
// endomorphism matrix R^alpha_beta(e_mu, e_nu). Pairs are ordered
// lexicographically. Mixed endomorphism slots (one horizontal leg, one
// vertical) are structurally zero for d-connections and stay zero here.
struct MatrixTwoForm {
  Dims dims{1, 1};
  int d = 2;
  std::vector<std::pair<int, int>> pairs;
  std::vector<Eigen::MatrixXd> comp;

  int pair_index(int mu, int nu) const {
    // lex rank of (mu, nu) with mu < nu among increasing pairs
    return mu * d - mu * (mu + 1) / 2 + (nu - mu - 1);
  }

  // Signed dense access, antisymmetric in (mu, nu).
  double operator()(int al, int be, int mu, int nu) const {
    if (mu == nu) return 0.0;
    if (mu < nu) return comp[static_cast<std::size_t>(pair_index(mu, nu))](al, be);
    return -comp[static_cast<std::size_t>(pair_index(nu, mu))](al, be);
  }
};

namespace detail {

inline MatrixTwoForm empty_form(const Dims& dims) {
  MatrixTwoForm F;
  F.dims = dims;
  F.d = dims.n + dims.m;
  for (int mu = 0; mu < F.d; ++mu)
    for (int nu = mu + 1; nu < F.d; ++nu) {
      F.pairs.emplace_back(mu, nu);
      F.comp.push_back(Eigen::MatrixXd::Zero(F.d, F.d));
    }
  return F;
}

}  // namespace detail

// The stored curvature blocks carry the form evaluated on the reversed frame
// pair, so every increasing-pair component is minus the matching block entry.
inline MatrixTwoForm assemble_curvature_form(const CurvatureBlocks& curv,
                                             const Dims& dims) {
  const int n = dims.n, m = dims.m;
  MatrixTwoForm F = detail::empty_form(dims);
  for (std::size_t p = 0; p < F.pairs.size(); ++p) {
    auto [mu, nu] = F.pairs[p];
    Eigen::MatrixXd& M = F.comp[p];
    const bool mu_h = mu < n, nu_h = nu < n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (mu_h && nu_h) M(i, j) = -curv.B1(i, j, mu, nu);
        else if (mu_h) M(i, j) = -curv.B3(i, j, mu, nu - n);
        else M(i, j) = -curv.B5(i, j, mu - n, nu - n);
      }
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        if (mu_h && nu_h) M(n + a, n + b) = -curv.B2(a, b, mu, nu);
        else if (mu_h) M(n + a, n + b) = -curv.B4(a, b, mu, nu - n);
        else M(n + a, n + b) = -curv.B6(a, b, mu - n, nu - n);
      }
  }
  return F;
}

// Storage inverse of assemble_curvature_form.
inline CurvatureBlocks blocks_from_form(const MatrixTwoForm& F) {
  const int n = F.dims.n, m = F.dims.m;
  CurvatureBlocks out = allocate_curvature(F.dims);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out.B1(i, j, k, l) = -F(i, j, k, l);
      for (int k = 0; k < n; ++k)
        for (int a = 0; a < m; ++a) out.B3(i, j, k, a) = -F(i, j, k, n + a);
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) out.B5(i, j, b, c) = -F(i, j, n + b, n + c);
    }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out.B2(a, b, k, l) = -F(n + a, n + b, k, l);
      for (int k = 0; k < n; ++k)
        for (int c = 0; c < m; ++c)
          out.B4(a, b, k, c) = -F(n + a, n + b, k, n + c);
      for (int c = 0; c < m; ++c)
        for (int e = 0; e < m; ++e)
          out.B6(a, b, c, e) = -F(n + a, n + b, n + c, n + e);
    }
  return out;
}

inline MatrixTwoForm scaled(const MatrixTwoForm& F, double c) {
  MatrixTwoForm out = F;
  for (auto& M : out.comp) M *= c;
  return out;
}

// Endomorphism conjugation R -> P R P^{-1} on every pair component.
inline MatrixTwoForm conjugated(const MatrixTwoForm& F,
                                const Eigen::MatrixXd& P) {
  MatrixTwoForm out = F;
  Eigen::MatrixXd Pinv = P.inverse();
  for (auto& M : out.comp) M = P * M * Pinv;
  return out;
}

// Homogeneous even-degree form component. Degree-2 coefficients sit in a full
// antisymmetric matrix; degree-4 coefficients are listed over increasing
// quadruples. `i_power` records how many factors of 1/i the consumer must
// still apply (Chern components of odd word length are imaginary for real
// curvature); the stored coefficients themselves are real.
struct FormPolynomial {
  Dims dims{1, 1};
  int degree = 0;
  bool beyond_dimension = false;  // degree exceeds n+m, coefficients zero
  int i_power = 0;
  double scalar = 0.0;
  Eigen::MatrixXd two;
  std::vector<std::array<int, 4>> quads;
  Eigen::VectorXd four;

  // Signed degree-4 lookup for arbitrary index order.
  double coefficient4(int mu, int nu, int rho, int sg) const {
    std::array<int, 4> idx = {mu, nu, rho, sg};
    double sign = 1.0;
    for (std::size_t i = 0; i < 4; ++i)  // tiny bubble sort tracking parity
      for (std::size_t j = 0; j + 1 < 4 - i; ++j) {
        if (idx[j] == idx[j + 1]) return 0.0;
        if (idx[j] > idx[j + 1]) {
          std::swap(idx[j], idx[j + 1]);
          sign = -sign;
        }
      }
    for (std::size_t q = 0; q < quads.size(); ++q)
      if (quads[q] == idx) return sign * four[static_cast<Eigen::Index>(q)];
    return 0.0;
  }
};

// Tr_1 = tr R as a 2-form; Tr_2 = tr(R wedge R) as a 4-form, expanded over
// the three increasing (2,2)-shuffles of each quadruple with signs +, -, +.
inline FormPolynomial trace_powers(const MatrixTwoForm& F, int k) {
  if (k != 1 && k != 2)
    throw std::invalid_argument("trace_powers: k must be 1 or 2");
  FormPolynomial out;
  out.dims = F.dims;
  out.degree = 2 * k;
  if (out.degree > F.d) {
    out.beyond_dimension = true;
    if (k == 1) out.two = Eigen::MatrixXd::Zero(F.d, F.d);
    return out;
  }
  if (k == 1) {
    out.two = Eigen::MatrixXd::Zero(F.d, F.d);
    for (std::size_t p = 0; p < F.pairs.size(); ++p) {
      auto [mu, nu] = F.pairs[p];
      double t = F.comp[p].trace();
      out.two(mu, nu) = t;
      out.two(nu, mu) = -t;
    }
    return out;
  }
  auto M = [&](int a, int b) -> const Eigen::MatrixXd& {
    return F.comp[static_cast<std::size_t>(F.pair_index(a, b))];
  };
  for (int mu = 0; mu < F.d; ++mu)
    for (int nu = mu + 1; nu < F.d; ++nu)
      for (int rho = nu + 1; rho < F.d; ++rho)
        for (int sg = rho + 1; sg < F.d; ++sg) {
          double c = (M(mu, nu) * M(rho, sg)).trace() -
                     (M(mu, rho) * M(nu, sg)).trace() +
                     (M(mu, sg) * M(nu, rho)).trace();
          out.quads.push_back({mu, nu, rho, sg});
          out.four.conservativeResize(
              static_cast<Eigen::Index>(out.quads.size()));
          out.four[static_cast<Eigen::Index>(out.quads.size()) - 1] = 2.0 * c;
        }
  return out;
}

// ch_k = Tr_k / (k! (2 pi)^k) with the powers of 1/i carried on the tag.
struct ChernCharacter {
  double ch0 = 0.0;
  FormPolynomial ch1, ch2;
};

inline ChernCharacter chern_character(const MatrixTwoForm& F,
                                      const Dims& dims) {
  const double two_pi = 8.0 * std::atan(1.0);
  ChernCharacter out;
  out.ch0 = dims.n + dims.m;
  out.ch1 = trace_powers(F, 1);
  out.ch1.two /= two_pi;
  out.ch1.i_power = 1;
  out.ch2 = trace_powers(F, 2);
  out.ch2.four /= 2.0 * two_pi * two_pi;
  out.ch2.i_power = 2;
  return out;
}

// p_1 = -tr(R~ wedge R~)/2 with R~ = R/(2 pi).
inline FormPolynomial pontryagin_first(const MatrixTwoForm& F) {
  const double two_pi = 8.0 * std::atan(1.0);
  FormPolynomial out = trace_powers(F, 2);
  out.four *= -0.5 / (two_pi * two_pi);
  return out;
}

// Degree-4 A-hat component. The determinant expansion of
// det^{1/2}(R~/2 / sinh(R~/2)) starts 1 + tr(R~ wedge R~)/48; the sign is
// pinned by the scalar sinh-series oracle in the test suite.
inline FormPolynomial a_hat_degree4(const MatrixTwoForm& F) {
  const double two_pi = 8.0 * std::atan(1.0);
  FormPolynomial out = trace_powers(F, 2);
  out.four *= 1.0 / (48.0 * two_pi * two_pi);
  return out;
}

}  // namespace nholo
