// Minimal dense rank-3/rank-4 containers for connection and curvature
// coefficients. Index-heavy geometry reads far better with plain (i, j, k)
// access than with reshaped matrices.
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <vector>

#include "nholo/jet.hpp"

namespace nholo {

template <typename T>
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d0, int d1, int d2)
      : d0_(d0), d1_(d1), d2_(d2),
        v_(static_cast<std::size_t>(d0) * d1 * d2) {}

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }

  T& operator()(int i, int j, int k) { return v_[flat(i, j, k)]; }
  const T& operator()(int i, int j, int k) const { return v_[flat(i, j, k)]; }

 private:
  std::size_t flat(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * d1_ + j) * d2_ + k;
  }
  int d0_ = 0, d1_ = 0, d2_ = 0;
  std::vector<T> v_;
};

template <typename T>
class Tensor4 {
 public:
  Tensor4() = default;
  Tensor4(int d0, int d1, int d2, int d3)
      : d0_(d0), d1_(d1), d2_(d2), d3_(d3),
        v_(static_cast<std::size_t>(d0) * d1 * d2 * d3) {}

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }
  int dim3() const { return d3_; }

  T& operator()(int i, int j, int k, int l) { return v_[flat(i, j, k, l)]; }
  const T& operator()(int i, int j, int k, int l) const {
    return v_[flat(i, j, k, l)];
  }

 private:
  std::size_t flat(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * d1_ + j) * d2_ + k) * d3_ + l;
  }
  int d0_ = 0, d1_ = 0, d2_ = 0, d3_ = 0;
  std::vector<T> v_;
};

inline double max_abs(const Tensor3<double>& t) {
  double m = 0.0;
  for (int i = 0; i < t.dim0(); ++i)
    for (int j = 0; j < t.dim1(); ++j)
      for (int k = 0; k < t.dim2(); ++k)
        m = std::max(m, std::abs(t(i, j, k)));
  return m;
}

inline double max_abs(const Tensor4<double>& t) {
  double m = 0.0;
  for (int i = 0; i < t.dim0(); ++i)
    for (int j = 0; j < t.dim1(); ++j)
      for (int k = 0; k < t.dim2(); ++k)
        for (int l = 0; l < t.dim3(); ++l)
          m = std::max(m, std::abs(t(i, j, k, l)));
  return m;
}

inline Tensor3<double> values(const Tensor3<Jet>& t) {
  Tensor3<double> r(t.dim0(), t.dim1(), t.dim2());
  for (int i = 0; i < t.dim0(); ++i)
    for (int j = 0; j < t.dim1(); ++j)
      for (int k = 0; k < t.dim2(); ++k) r(i, j, k) = t(i, j, k).value();
  return r;
}

inline Eigen::MatrixXd values(const JetMatrix& m) {
  Eigen::MatrixXd r(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).value();
  return r;
}

}  // namespace nholo
