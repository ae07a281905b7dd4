// Truncated multivariate jets: a value together with all raw partial
// derivatives up to a fixed total order, stored densely in the graded order
// of MultiIndexTable. Arithmetic follows the Leibniz rule exactly, so within
// the truncation order every coefficient is an exact derivative of the
// composite function (no finite differencing anywhere).
//
// A Jet is either "constant" (no variables attached; represents a function
// that is identically a constant, all derivatives zero) or attached to a
// fixed variable count and truncation order. Mixed-order binary operations
// truncate to the smaller order; constants act as if they had infinite order.
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "nholo/errors.hpp"
#include "nholo/multiindex.hpp"

namespace nholo {

class Jet {
 public:
  // Constant 0. Also what Eigen uses for Scalar() default construction.
  Jet() : Jet(0.0) {}

  // Implicit: plain numbers participate in jet arithmetic as constants.
  Jet(double value) : nvars_(0), order_(0), c_(1) { c_[0] = value; }

  static Jet constant(double value) { return Jet(value); }

  // Jet of the coordinate function u^axis at a point: value plus unit first
  // derivative in slot `axis`.
  static Jet variable(int nvars, int order, int axis, double value) {
    check_order(order);
    if (axis < 0 || axis >= nvars)
      throw std::invalid_argument("Jet::variable: axis out of range");
    const MultiIndexTable& table = MultiIndexTable::get(nvars);
    Jet j;
    j.nvars_ = nvars;
    j.order_ = order;
    j.c_ = Eigen::VectorXd::Zero(table.size_at(order));
    j.c_[0] = value;
    if (order >= 1) j.c_[1 + axis] = 1.0;  // grade-1 block is slot 1..nvars
    return j;
  }

  bool is_constant() const { return nvars_ == 0; }
  int nvars() const { return nvars_; }
  int order() const { return order_; }
  double value() const { return c_[0]; }

  const Eigen::VectorXd& coefficients() const { return c_; }

  // Raw partial derivative for an exponent tuple (length nvars). Constants
  // report 0 for every derivative of positive order.
  double partial(const std::vector<int>& exponents) const {
    int total = 0;
    for (int e : exponents) total += e;
    if (is_constant()) return total == 0 ? c_[0] : 0.0;
    if (static_cast<int>(exponents.size()) != nvars_)
      throw std::invalid_argument("Jet::partial: exponent tuple length");
    if (total > order_)
      throw std::invalid_argument("Jet::partial: order exceeds truncation");
    int idx = MultiIndexTable::get(nvars_).index_of(exponents);
    return c_[idx];
  }

  // Convenience: derivative by a list of axes, e.g. {0, 0, 2} = d^3/du0^2 du2.
  double partial_axes(std::initializer_list<int> axes) const {
    std::vector<int> exps(is_constant() ? 0 : nvars_, 0);
    for (int a : axes) {
      if (is_constant()) return 0.0;
      if (a < 0 || a >= nvars_)
        throw std::invalid_argument("Jet::partial_axes: axis out of range");
      exps[a] += 1;
    }
    return partial(exps);
  }

  Jet truncated(int order) const {
    check_order(order);
    if (is_constant() || order >= order_) return *this;
    Jet j;
    j.nvars_ = nvars_;
    j.order_ = order;
    j.c_ = c_.head(MultiIndexTable::get(nvars_).size_at(order));
    return j;
  }

  // Promote a constant to a full-size jet; passes non-constant jets through
  // (with truncation). Used to normalize expression evaluation results.
  Jet lifted(int nvars, int order) const {
    check_order(order);
    if (!is_constant()) {
      if (nvars_ != nvars)
        throw std::logic_error("Jet::lifted: variable count mismatch");
      if (order_ < order)
        throw std::logic_error("Jet::lifted: cannot raise truncation order");
      return truncated(order);
    }
    Jet j;
    j.nvars_ = nvars;
    j.order_ = order;
    j.c_ = Eigen::VectorXd::Zero(MultiIndexTable::get(nvars).size_at(order));
    j.c_[0] = c_[0];
    return j;
  }

  // Jet of the partial derivative d/du^axis, one order lower. Exact: the
  // coefficient for kappa is the stored coefficient for kappa + e_axis.
  Jet derivative(int axis) const {
    if (is_constant()) return Jet(0.0);
    if (order_ < 1)
      throw std::logic_error("Jet::derivative: requires order >= 1");
    const MultiIndexTable& table = MultiIndexTable::get(nvars_);
    Jet j;
    j.nvars_ = nvars_;
    j.order_ = order_ - 1;
    int size = table.size_at(j.order_);
    j.c_.resize(size);
    for (int idx = 0; idx < size; ++idx) j.c_[idx] = c_[table.shifted(idx, axis)];
    return j;
  }

  bool all_finite() const {
    for (Eigen::Index i = 0; i < c_.size(); ++i)
      if (!std::isfinite(c_[i])) return false;
    return true;
  }

  Jet operator-() const {
    Jet j = *this;
    j.c_ = -j.c_;
    return j;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    if (a.is_constant() && b.is_constant()) return Jet(a.c_[0] + b.c_[0]);
    if (a.is_constant()) {
      Jet j = b;
      j.c_[0] += a.c_[0];
      return j;
    }
    if (b.is_constant()) {
      Jet j = a;
      j.c_[0] += b.c_[0];
      return j;
    }
    check_compatible(a, b);
    int order = std::min(a.order_, b.order_);
    int size = MultiIndexTable::get(a.nvars_).size_at(order);
    Jet j;
    j.nvars_ = a.nvars_;
    j.order_ = order;
    j.c_ = a.c_.head(size) + b.c_.head(size);
    return j;
  }

  friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (a.is_constant()) {
      Jet j = b;
      j.c_ *= a.c_[0];
      return j;
    }
    if (b.is_constant()) {
      Jet j = a;
      j.c_ *= b.c_[0];
      return j;
    }
    check_compatible(a, b);
    const MultiIndexTable& table = MultiIndexTable::get(a.nvars_);
    int order = std::min(a.order_, b.order_);
    int size = table.size_at(order);
    Jet j;
    j.nvars_ = a.nvars_;
    j.order_ = order;
    j.c_ = Eigen::VectorXd::Zero(size);
    for (int idx = 0; idx < size; ++idx) {
      double acc = 0.0;
      for (const auto& t : table.product_terms(idx))
        acc += t.weight * a.c_[t.left] * b.c_[t.right];
      j.c_[idx] = acc;
    }
    return j;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.is_constant()) {
      if (b.c_[0] == 0.0) throw DomainError("division by zero");
      Jet j = a;
      if (j.is_constant()) return Jet(a.c_[0] / b.c_[0]);
      j.c_ /= b.c_[0];
      return j;
    }
    int order = a.is_constant() ? b.order_ : std::min(a.order_, b.order_);
    return a * reciprocal(b.truncated(order));
  }

  Jet& operator+=(const Jet& rhs) { return *this = *this + rhs; }
  Jet& operator-=(const Jet& rhs) { return *this = *this - rhs; }
  Jet& operator*=(const Jet& rhs) { return *this = *this * rhs; }
  Jet& operator/=(const Jet& rhs) { return *this = *this / rhs; }

  // phi(f) for a scalar function phi with derivative values derivs[0..K] at
  // the point f.value(), K = f.order(). Exact in the truncated algebra: with
  // w = f - f.value(), phi(f) = sum_k derivs[k]/k! w^k, and w^(K+1) == 0.
  static Jet compose_series(const Jet& f, const double* derivs) {
    if (f.is_constant()) return Jet(derivs[0]);
    const int K = f.order_;
    double taylor[kMaxJetOrder + 1];
    double fact = 1.0;
    for (int k = 0; k <= K; ++k) {
      if (k > 0) fact *= k;
      taylor[k] = derivs[k] / fact;
    }
    Jet w = f;
    w.c_[0] = 0.0;
    Jet r = Jet(taylor[K]);
    for (int k = K - 1; k >= 0; --k) r = r * w + Jet(taylor[k]);
    return r;
  }

 private:
  static void check_order(int order) {
    if (order < 0 || order > kMaxJetOrder)
      throw std::invalid_argument("Jet: order must be in [0, " +
                                  std::to_string(kMaxJetOrder) + "]");
  }

  static void check_compatible(const Jet& a, const Jet& b) {
    if (a.nvars_ != b.nvars_)
      throw std::logic_error("Jet: operands have different variable counts");
  }

  static Jet reciprocal(const Jet& b) {
    double c = b.value();
    if (c == 0.0) throw DomainError("division by zero");
    double derivs[kMaxJetOrder + 1];
    derivs[0] = 1.0 / c;
    double fact = 1.0;
    for (int k = 1; k <= b.order(); ++k) {
      fact *= -k;
      derivs[k] = fact / std::pow(c, k + 1);
    }
    return compose_series(b, derivs);
  }

  int nvars_;  // 0 marks a constant
  int order_;
  Eigen::VectorXd c_;
};

namespace detail {

// Derivative ladders d^k phi / dc^k, k = 0..order, for the elementary
// functions. Throws DomainError outside the function's domain.
inline void sin_derivs(double c, int order, double* d) {
  double table[4] = {std::sin(c), std::cos(c), -std::sin(c), -std::cos(c)};
  for (int k = 0; k <= order; ++k) d[k] = table[k % 4];
}

inline void cos_derivs(double c, int order, double* d) {
  double table[4] = {std::cos(c), -std::sin(c), -std::cos(c), std::sin(c)};
  for (int k = 0; k <= order; ++k) d[k] = table[k % 4];
}

inline void exp_derivs(double c, int order, double* d) {
  double e = std::exp(c);
  for (int k = 0; k <= order; ++k) d[k] = e;
}

inline void sinh_derivs(double c, int order, double* d) {
  double s = std::sinh(c), ch = std::cosh(c);
  for (int k = 0; k <= order; ++k) d[k] = (k % 2 == 0) ? s : ch;
}

inline void cosh_derivs(double c, int order, double* d) {
  double s = std::sinh(c), ch = std::cosh(c);
  for (int k = 0; k <= order; ++k) d[k] = (k % 2 == 0) ? ch : s;
}

inline void log_derivs(double c, int order, double* d) {
  if (c <= 0.0) throw DomainError("log of a nonpositive value");
  d[0] = std::log(c);
  double fact = 1.0;
  for (int k = 1; k <= order; ++k) {
    // d^k log = (-1)^(k-1) (k-1)! / c^k
    if (k >= 2) fact *= -(k - 1);
    d[k] = fact / std::pow(c, k);
  }
}

inline void sqrt_derivs(double c, int order, double* d) {
  if (c < 0.0 || (c == 0.0 && order >= 1))
    throw DomainError("sqrt of a negative value or derivative at zero");
  d[0] = std::sqrt(c);
  double coeff = 1.0;
  for (int k = 1; k <= order; ++k) {
    coeff *= 0.5 - (k - 1);
    d[k] = coeff * std::pow(c, 0.5 - k);
  }
}

inline void tan_derivs(double c, int order, double* d) {
  double t = std::tan(c);
  if (!std::isfinite(t)) throw DomainError("tan at a pole");
  double f[7] = {};
  f[0] = t;
  f[1] = 1.0 + t * t;
  f[2] = 2.0 * t * f[1];
  f[3] = 2.0 * f[1] * f[1] + 2.0 * t * f[2];
  f[4] = 6.0 * f[1] * f[2] + 2.0 * t * f[3];
  f[5] = 6.0 * f[2] * f[2] + 8.0 * f[1] * f[3] + 2.0 * t * f[4];
  f[6] = 20.0 * f[2] * f[3] + 10.0 * f[1] * f[4] + 2.0 * t * f[5];
  for (int k = 0; k <= order; ++k) d[k] = f[k];
}

inline void atan_derivs(double c, int order, double* d) {
  double u = 1.0 / (1.0 + c * c);
  double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u, u6 = u5 * u;
  double c2 = c * c, c3 = c2 * c, c4 = c3 * c, c5 = c4 * c;
  double f[7] = {};
  f[0] = std::atan(c);
  f[1] = u;
  f[2] = -2.0 * c * u2;
  f[3] = -2.0 * u2 + 8.0 * c2 * u3;
  f[4] = 24.0 * c * u3 - 48.0 * c3 * u4;
  f[5] = 24.0 * u3 - 288.0 * c2 * u4 + 384.0 * c4 * u5;
  f[6] = -720.0 * c * u4 + 3840.0 * c3 * u5 - 3840.0 * c5 * u6;
  for (int k = 0; k <= order; ++k) d[k] = f[k];
}

inline void pow_real_derivs(double c, double p, int order, double* d) {
  if (c <= 0.0)
    throw DomainError("power with non-integer exponent requires positive base");
  double coeff = 1.0;
  d[0] = std::pow(c, p);
  for (int k = 1; k <= order; ++k) {
    coeff *= p - (k - 1);
    d[k] = coeff * std::pow(c, p - k);
  }
}

}  // namespace detail

inline Jet sin(const Jet& f) {
  double d[kMaxJetOrder + 1];
  detail::sin_derivs(f.value(), f.is_constant() ? 0 : f.order(), d);
  return Jet::compose_series(f, d);
}
inline Jet cos(const Jet& f) {
  double d[kMaxJetOrder + 1];
  detail::cos_derivs(f.value(), f.is_constant() ? 0 : f.order(), d);
  return Jet::compose_series(f, d);
}
inline Jet tan(const Jet& f) {
  double d[kMaxJetOrder + 1];
  detail::tan_derivs(f.value(), f.is_constant() ? 0 : f.order(), d);
  return Jet::compose_series(f, d);
}
inline Jet atan(const Jet& f) {
  double d[kMaxJetOrder + 1];
  detail::atan_derivs(f.value(), f.is_constant() ? 0 : f.order(), d);
  return Jet::compose_series(f, d);
}
inline Jet exp(const Jet& f) {
  double d[kMaxJetOrder + 1];
  detail::exp_derivs(f.value(), f.is_constant() ? 0 : f.order(), d);
  return Jet::compose_series(f, d);
}
inline Jet log(const Jet& f) {
  double d[kMaxJetOrder + 1];
  detail::log_derivs(f.value(), f.is_constant() ? 0 : f.order(), d);
  return Jet::compose_series(f, d);
}
inline Jet sqrt(const Jet& f) {
  double d[kMaxJetOrder + 1];
  detail::sqrt_derivs(f.value(), f.is_constant() ? 0 : f.order(), d);
  return Jet::compose_series(f, d);
}
inline Jet sinh(const Jet& f) {
  double d[kMaxJetOrder + 1];
  detail::sinh_derivs(f.value(), f.is_constant() ? 0 : f.order(), d);
  return Jet::compose_series(f, d);
}
inline Jet cosh(const Jet& f) {
  double d[kMaxJetOrder + 1];
  detail::cosh_derivs(f.value(), f.is_constant() ? 0 : f.order(), d);
  return Jet::compose_series(f, d);
}

// Integer power by repeated multiplication; valid for any base value.
// pow(f, 0) is the constant 1 by polynomial convention.
inline Jet pow(const Jet& f, long exponent) {
  if (exponent == 0) return Jet(1.0);
  if (exponent < 0) return Jet(1.0) / pow(f, -exponent);
  Jet acc = Jet(1.0);
  Jet base = f;
  long e = exponent;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return acc;
}

// Real power; requires a strictly positive base value.
inline Jet pow(const Jet& f, double p) {
  double d[kMaxJetOrder + 1];
  detail::pow_real_derivs(f.value(), p, f.is_constant() ? 0 : f.order(), d);
  return Jet::compose_series(f, d);
}

// General power with a varying exponent: exp(e * log(f)).
inline Jet pow(const Jet& f, const Jet& e) {
  if (e.is_constant()) return pow(f, e.value());
  return exp(e * log(f));
}

}  // namespace nholo

namespace Eigen {

template <>
struct NumTraits<nholo::Jet> : GenericNumTraits<nholo::Jet> {
  typedef nholo::Jet Real;
  typedef nholo::Jet NonInteger;
  typedef nholo::Jet Nested;
  typedef nholo::Jet Literal;

  static inline Real epsilon() {
    return nholo::Jet(std::numeric_limits<double>::epsilon());
  }
  static inline Real dummy_precision() { return nholo::Jet(1e-12); }
  static inline Real highest() {
    return nholo::Jet(std::numeric_limits<double>::max());
  }
  static inline Real lowest() {
    return nholo::Jet(-std::numeric_limits<double>::max());
  }
  static inline int digits10() {
    return std::numeric_limits<double>::digits10;
  }

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    ReadCost = 8,
    AddCost = 16,
    MulCost = 64,
    RequireInitialization = 1,
  };
};

}  // namespace Eigen

namespace nholo {

using JetMatrix = Eigen::Matrix<Jet, Eigen::Dynamic, Eigen::Dynamic>;
using JetVector = Eigen::Matrix<Jet, Eigen::Dynamic, 1>;

// Inverse of a square jet-valued matrix by Gauss-Jordan elimination with
// partial pivoting on the value parts. A jet is invertible exactly when its
// value part is nonzero, so pivot selection over values is the right notion;
// a best pivot below `pivot_eps` means the underlying matrix is degenerate at
// the evaluation point.
inline JetMatrix jet_matrix_inverse(const JetMatrix& a,
                                    double pivot_eps = 1e-10,
                                    const char* what = "matrix") {
  const int k = static_cast<int>(a.rows());
  if (a.cols() != k) throw std::invalid_argument("jet_matrix_inverse: square");
  JetMatrix m = a;
  JetMatrix inv(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) inv(i, j) = Jet(i == j ? 1.0 : 0.0);
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    double best = std::abs(m(col, col).value());
    for (int r = col + 1; r < k; ++r) {
      double v = std::abs(m(r, col).value());
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best < pivot_eps)
      throw DegenerateMetricError(std::string(what) +
                                  " is degenerate: pivot " +
                                  std::to_string(best) + " below threshold");
    if (pivot != col) {
      m.row(pivot).swap(m.row(col));
      inv.row(pivot).swap(inv.row(col));
    }
    Jet d = m(col, col);
    for (int j = 0; j < k; ++j) {
      m(col, j) = m(col, j) / d;
      inv(col, j) = inv(col, j) / d;
    }
    for (int r = 0; r < k; ++r) {
      if (r == col) continue;
      Jet f = m(r, col);
      if (f.is_constant() && f.value() == 0.0) continue;
      for (int j = 0; j < k; ++j) {
        m(r, j) = m(r, j) - f * m(col, j);
        inv(r, j) = inv(r, j) - f * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace nholo
