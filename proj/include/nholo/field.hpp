// ScalarField: anything that can be evaluated to a jet at a point. Parsed
// expressions are the common case; derived quantities (Hessian metrics,
// induced connection coefficients, ansatz entries) plug in through the
// function-backed constructor so the geometry pipeline has a single input
// shape. Fields are immutable value types and safe to copy across threads.
#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "nholo/expression.hpp"
#include "nholo/jet.hpp"

namespace nholo {

class ScalarField {
 public:
  using EvalFn = std::function<Jet(const Eigen::VectorXd&, int)>;

  ScalarField() = default;

  ScalarField(Expression expr)  // implicit: expressions are fields
      : expr_(std::make_shared<Expression>(std::move(expr))) {}

  explicit ScalarField(double constant)
      : fn_(std::make_shared<EvalFn>(
            [constant](const Eigen::VectorXd&, int) { return Jet(constant); })),
        label_(std::to_string(constant)) {}

  static ScalarField from_function(EvalFn fn, std::string label) {
    ScalarField f;
    f.fn_ = std::make_shared<EvalFn>(std::move(fn));
    f.label_ = std::move(label);
    return f;
  }

  bool empty() const { return !expr_ && !fn_; }

  // Full-size jet at `point`, truncated at `order`.
  Jet jet(const Eigen::VectorXd& point, int order) const {
    if (empty()) throw std::logic_error("ScalarField: evaluating empty field");
    Jet j = expr_ ? evaluate_jet(*expr_, point, order) : (*fn_)(point, order);
    return j.lifted(static_cast<int>(point.size()), order);
  }

  double value(const Eigen::VectorXd& point) const {
    return jet(point, 0).value();
  }

  // Source form for expressions, a short label for derived fields.
  std::string str() const {
    if (expr_) return expr_->str();
    return label_;
  }

 private:
  std::shared_ptr<const Expression> expr_;
  std::shared_ptr<const EvalFn> fn_;
  std::string label_;
};

using FieldMatrix = Eigen::Matrix<ScalarField, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace nholo
