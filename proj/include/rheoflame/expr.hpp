#pragma once

// Arithmetic expressions over (t, u, v) used by scenario files to state the
// Zermelo control coefficients.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rheoflame {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& subexpression, const std::string& message);
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

enum class Variable { t, u, v };

enum class Function { sin, cos, tan, sqrt, exp, log, abs, atan2, min, max };

enum class NodeKind { number, pi, variable, negate, add, subtract, multiply, divide, power, call };

struct ExprNode {
  NodeKind kind = NodeKind::number;
  double value = 0.0;
  Variable variable = Variable::t;
  Function function = Function::sin;
  int lhs = -1;  // operand, first argument
  int rhs = -1;  // second operand, second argument
};

/// Immutable expression tree. Copies share the node storage, so an Expr can
/// be captured by value and evaluated from any thread.
class Expr {
 public:
  Expr();

  double eval(double t, double u, double v) const;

  /// Fully parenthesized rendering; parse(to_string()) reproduces the tree.
  std::string to_string() const;

  bool operator==(const Expr& other) const;

  const std::vector<ExprNode>& nodes() const { return *nodes_; }
  int root() const { return root_; }

 private:
  friend Expr parse(std::string_view text);
  Expr(std::shared_ptr<const std::vector<ExprNode>> nodes, int root);

  std::shared_ptr<const std::vector<ExprNode>> nodes_;
  int root_;
};

Expr parse(std::string_view text);

inline double eval(const Expr& e, double t, double u, double v) { return e.eval(t, u, v); }

int function_arity(Function f);
std::string_view function_name(Function f);

}  // namespace rheoflame
