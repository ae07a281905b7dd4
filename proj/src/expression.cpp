#include "nholo/expression.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

namespace nholo {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_node(ExprNode node) {
  return std::make_shared<const ExprNode>(std::move(node));
}

struct FuncEntry {
  const char* name;
  Func func;
};

constexpr std::array<FuncEntry, 9> kFuncs = {{
    {"sin", Func::kSin},
    {"cos", Func::kCos},
    {"tan", Func::kTan},
    {"atan", Func::kAtan},
    {"exp", Func::kExp},
    {"log", Func::kLog},
    {"sqrt", Func::kSqrt},
    {"sinh", Func::kSinh},
    {"cosh", Func::kCosh},
}};

// If the node is a literal integer up to a chain of unary minuses, report its
// signed value; such exponents get the repeated-multiplication power.
bool literal_integer(const ExprNode& node, long* out) {
  const ExprNode* n = &node;
  long sign = 1;
  while (n->kind == ExprKind::kNeg) {
    sign = -sign;
    n = n->a.get();
  }
  if (n->kind != ExprKind::kLiteral) return false;
  double v = n->literal;
  if (!(std::rint(v) == v) || std::abs(v) > 1e15) return false;
  *out = sign * static_cast<long>(v);
  return true;
}

class Parser {
 public:
  Parser(const std::string& source, const Dims& dims)
      : src_(source), dims_(dims) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError(pos_, "expected end of input");
    return e;
  }

 private:
  NodePtr parse_expr() {
    NodePtr left = parse_term();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (consume('+')) {
        left = make_node({ExprKind::kAdd, 0, -1, 0, Func::kSin, left,
                          parse_term(), at});
      } else if (consume('-')) {
        left = make_node({ExprKind::kSub, 0, -1, 0, Func::kSin, left,
                          parse_term(), at});
      } else {
        return left;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr left = parse_unary();
    for (;;) {
      skip_ws();
      std::size_t at = pos_;
      if (consume('*')) {
        left = make_node({ExprKind::kMul, 0, -1, 0, Func::kSin, left,
                          parse_unary(), at});
      } else if (consume('/')) {
        left = make_node({ExprKind::kDiv, 0, -1, 0, Func::kSin, left,
                          parse_unary(), at});
      } else {
        return left;
      }
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    std::size_t at = pos_;
    if (consume('-'))
      return make_node(
          {ExprKind::kNeg, 0, -1, 0, Func::kSin, parse_unary(), nullptr, at});
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_ws();
    std::size_t at = pos_;
    if (!consume('^')) return base;
    NodePtr exponent = parse_unary();
    long k = 0;
    if (literal_integer(*exponent, &k))
      return make_node(
          {ExprKind::kPowInt, 0, -1, k, Func::kSin, base, nullptr, at});
    return make_node(
        {ExprKind::kPow, 0, -1, 0, Func::kSin, base, exponent, at});
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ == src_.size())
      throw ParseError(pos_, "unexpected end of input");
    std::size_t at = pos_;
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    if (consume('(')) {
      NodePtr inner = parse_expr();
      skip_ws();
      if (!consume(')')) throw ParseError(pos_, "expected ')'");
      return inner;
    }
    throw ParseError(
        at, std::string("expected a number, coordinate, function, or '(', "
                        "found '") +
                c + "'");
  }

  NodePtr parse_number() {
    std::size_t at = pos_;
    const char* begin = src_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError(at, "malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_node(
        {ExprKind::kLiteral, v, -1, 0, Func::kSin, nullptr, nullptr, at});
  }

  NodePtr parse_identifier() {
    std::size_t at = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_'))
      ++pos_;
    std::string name = src_.substr(at, pos_ - at);

    if ((name[0] == 'x' || name[0] == 'y') && name.size() > 1 &&
        all_digits(name, 1)) {
      int index = std::atoi(name.c_str() + 1);
      int limit = name[0] == 'x' ? dims_.n : dims_.m;
      if (index < 1 || index > limit)
        throw ParseError(at, "coordinate index out of range: " + name + " (" +
                                 (name[0] == 'x' ? "n" : "m") + " = " +
                                 std::to_string(limit) + ")");
      int axis = name[0] == 'x' ? index - 1 : dims_.n + index - 1;
      return make_node(
          {ExprKind::kCoord, 0, axis, 0, Func::kSin, nullptr, nullptr, at});
    }

    for (const auto& entry : kFuncs) {
      if (name == entry.name) {
        skip_ws();
        if (!consume('('))
          throw ParseError(pos_, "expected '(' after function name '" + name +
                                     "'");
        NodePtr arg = parse_expr();
        skip_ws();
        if (!consume(')')) throw ParseError(pos_, "expected ')'");
        return make_node(
            {ExprKind::kCall, 0, -1, 0, entry.func, arg, nullptr, at});
      }
    }
    throw ParseError(at, "unknown identifier '" + name + "'");
  }

  static bool all_digits(const std::string& s, std::size_t from) {
    for (std::size_t i = from; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool consume(char c) {
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  const std::string& src_;
  Dims dims_;
  std::size_t pos_ = 0;
};

// Printer precedence levels; parenthesization preserves tree structure under
// reparsing, which the round-trip property test pins down.
int prec(const ExprNode& n) {
  switch (n.kind) {
    case ExprKind::kAdd:
    case ExprKind::kSub:
      return 10;
    case ExprKind::kMul:
    case ExprKind::kDiv:
      return 20;
    case ExprKind::kNeg:
      return 25;
    case ExprKind::kPowInt:
    case ExprKind::kPow:
      return 30;
    default:
      return 40;
  }
}

std::string print_literal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print_node(const ExprNode& n, const Dims& dims);

std::string wrapped(const ExprNode& n, const Dims& dims, bool parens) {
  std::string s = print_node(n, dims);
  return parens ? "(" + s + ")" : s;
}

std::string print_node(const ExprNode& n, const Dims& dims) {
  switch (n.kind) {
    case ExprKind::kLiteral:
      return print_literal(n.literal);
    case ExprKind::kCoord:
      return n.axis < dims.n ? "x" + std::to_string(n.axis + 1)
                             : "y" + std::to_string(n.axis - dims.n + 1);
    case ExprKind::kAdd:
      return wrapped(*n.a, dims, false) + " + " +
             wrapped(*n.b, dims, prec(*n.b) <= 10);
    case ExprKind::kSub:
      return wrapped(*n.a, dims, false) + " - " +
             wrapped(*n.b, dims, prec(*n.b) <= 10);
    case ExprKind::kMul:
      return wrapped(*n.a, dims, prec(*n.a) < 20) + "*" +
             wrapped(*n.b, dims, prec(*n.b) <= 20);
    case ExprKind::kDiv:
      return wrapped(*n.a, dims, prec(*n.a) < 20) + "/" +
             wrapped(*n.b, dims, prec(*n.b) <= 20);
    case ExprKind::kNeg:
      return "-" + wrapped(*n.a, dims, prec(*n.a) <= 20);
    case ExprKind::kPowInt: {
      std::string e = std::to_string(n.exponent);
      if (n.exponent < 0) e = "(" + e + ")";
      return wrapped(*n.a, dims, prec(*n.a) < 40) + "^" + e;
    }
    case ExprKind::kPow:
      return wrapped(*n.a, dims, prec(*n.a) < 40) + "^" +
             wrapped(*n.b, dims, prec(*n.b) <= 20);
    case ExprKind::kCall:
      return std::string(func_name(n.func)) + "(" + print_node(*n.a, dims) +
             ")";
  }
  return {};
}

bool same_node(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::kLiteral:
      return a.literal == b.literal;
    case ExprKind::kCoord:
      return a.axis == b.axis;
    case ExprKind::kPowInt:
      return a.exponent == b.exponent && same_node(*a.a, *b.a);
    case ExprKind::kNeg:
      return same_node(*a.a, *b.a);
    case ExprKind::kCall:
      return a.func == b.func && same_node(*a.a, *b.a);
    default:
      return same_node(*a.a, *b.a) && same_node(*a.b, *b.b);
  }
}

class JetEvaluator {
 public:
  JetEvaluator(const Eigen::VectorXd& point, int order, const Dims& dims)
      : point_(point), order_(order), dims_(dims) {}

  Jet eval(const ExprNode& n) {
    switch (n.kind) {
      case ExprKind::kLiteral:
        return Jet(n.literal);
      case ExprKind::kCoord:
        return Jet::variable(dims_.total(), order_, n.axis, point_[n.axis]);
      case ExprKind::kAdd:
        return eval(*n.a) + eval(*n.b);
      case ExprKind::kSub:
        return eval(*n.a) - eval(*n.b);
      case ExprKind::kMul:
        return eval(*n.a) * eval(*n.b);
      case ExprKind::kDiv: {
        Jet a = eval(*n.a);
        Jet b = eval(*n.b);
        return guarded(n, [&] { return a / b; });
      }
      case ExprKind::kPowInt: {
        Jet a = eval(*n.a);
        return guarded(n, [&] { return pow(a, n.exponent); });
      }
      case ExprKind::kPow: {
        Jet a = eval(*n.a);
        Jet b = eval(*n.b);
        return guarded(n, [&] { return pow(a, b); });
      }
      case ExprKind::kNeg:
        return -eval(*n.a);
      case ExprKind::kCall: {
        Jet a = eval(*n.a);
        return guarded(n, [&] {
          switch (n.func) {
            case Func::kSin:
              return sin(a);
            case Func::kCos:
              return cos(a);
            case Func::kTan:
              return tan(a);
            case Func::kAtan:
              return atan(a);
            case Func::kExp:
              return exp(a);
            case Func::kLog:
              return log(a);
            case Func::kSqrt:
              return sqrt(a);
            case Func::kSinh:
              return sinh(a);
            case Func::kCosh:
              return cosh(a);
          }
          return a;  // unreachable
        });
      }
    }
    throw std::logic_error("JetEvaluator: unknown node kind");
  }

 private:
  // Attach the offending subexpression to domain failures raised by the jet
  // layer; the innermost failing subtree wins.
  template <typename F>
  Jet guarded(const ExprNode& n, F&& body) {
    try {
      return body();
    } catch (const DomainError& e) {
      if (!e.fragment().empty()) throw;
      throw DomainError(e.reason(), print_node(n, dims_), n.offset);
    }
  }

  const Eigen::VectorXd& point_;
  int order_;
  Dims dims_;
};

}  // namespace

const char* func_name(Func f) {
  for (const auto& entry : kFuncs)
    if (entry.func == f) return entry.name;
  return "?";
}

std::string Expression::str() const {
  if (empty()) return {};
  return print_node(*root_, dims_);
}

bool Expression::same_structure(const Expression& other) const {
  if (empty() || other.empty()) return empty() == other.empty();
  return same_node(*root_, *other.root_);
}

Expression parse(const std::string& source, const Dims& dims) {
  Parser parser(source, dims);
  return Expression(parser.run(), dims);
}

Jet evaluate_jet(const Expression& expr, const Eigen::VectorXd& point,
                 int order) {
  if (expr.empty()) throw std::logic_error("evaluate_jet: empty expression");
  if (point.size() != expr.dims().total())
    throw std::invalid_argument("evaluate_jet: point length " +
                                std::to_string(point.size()) +
                                " does not match dims total " +
                                std::to_string(expr.dims().total()));
  if (order < 0 || order > kMaxJetOrder)
    throw std::invalid_argument("evaluate_jet: order out of range");
  JetEvaluator ev(point, order, expr.dims());
  Jet j = ev.eval(expr.root()).lifted(expr.dims().total(), order);
  if (!j.all_finite())
    throw DomainError("non-finite result", expr.str(), expr.root().offset);
  return j;
}

double evaluate(const Expression& expr, const Eigen::VectorXd& point) {
  return evaluate_jet(expr, point, 0).value();
}

}  // namespace nholo
