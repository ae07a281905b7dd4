// Expression trees for the coordinate DSL, their printer, and jet evaluation.
//
// Grammar (whitespace insensitive):
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := NUMBER | COORD | FUNC '(' expr ')' | '(' expr ')'
// Coordinates are x1..xn and y1..ym. '^' with a literal integer exponent is
// evaluated by repeated multiplication and is defined for any base; any other
// exponent requires a strictly positive base at the evaluation point.
#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <memory>
#include <string>

#include "nholo/dims.hpp"
#include "nholo/errors.hpp"
#include "nholo/jet.hpp"

namespace nholo {

enum class ExprKind {
  kLiteral,
  kCoord,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPowInt,
  kPow,
  kNeg,
  kCall,
};

enum class Func { kSin, kCos, kTan, kAtan, kExp, kLog, kSqrt, kSinh, kCosh };

const char* func_name(Func f);

struct ExprNode {
  ExprKind kind;
  double literal = 0.0;  // kLiteral
  int axis = -1;         // kCoord: 0-based slot in the combined (x, y) vector
  long exponent = 0;     // kPowInt
  Func func = Func::kSin;
  std::shared_ptr<const ExprNode> a;  // operand / left operand / call argument
  std::shared_ptr<const ExprNode> b;  // right operand
  std::size_t offset = 0;  // byte offset of this subexpression in the source
};

// Immutable parsed expression tied to the dimensions it was parsed against.
class Expression {
 public:
  Expression() = default;
  Expression(std::shared_ptr<const ExprNode> root, Dims dims)
      : root_(std::move(root)), dims_(dims) {}

  bool empty() const { return root_ == nullptr; }
  const ExprNode& root() const { return *root_; }
  const Dims& dims() const { return dims_; }

  // Source form that parses back to a structurally identical tree.
  std::string str() const;

  bool same_structure(const Expression& other) const;

 private:
  std::shared_ptr<const ExprNode> root_;
  Dims dims_;
};

// Parses `source` against the declared dimensions. Throws ParseError with the
// byte offset of the first offending token.
Expression parse(const std::string& source, const Dims& dims);

// Jet of the expression at `point` (length dims.total()), truncated at
// `order`. Orders 0..4 are the supported public range; derived fields use up
// to kMaxJetOrder internally. Domain failures throw DomainError naming the
// offending subexpression. The result is always a full-size jet (never the
// constant representation), so downstream code can take derivatives of it.
Jet evaluate_jet(const Expression& expr, const Eigen::VectorXd& point,
                 int order);

double evaluate(const Expression& expr, const Eigen::VectorXd& point);

}  // namespace nholo
