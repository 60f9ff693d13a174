#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "rlvr/rational.hpp"

namespace rlvr {

/// Parse tree for rational arithmetic: + - * / ^ (integer exponent), unary minus
/// and parentheses. No free variables.
class MathExprTree {
 public:
  enum class Op { Add, Sub, Mul, Div, Pow };

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Number {
    Rational value;
  };
  struct Negate {
    NodePtr operand;
  };
  struct Binary {
    Op op;
    NodePtr lhs;
    NodePtr rhs;
  };
  struct Node {
    std::variant<Number, Negate, Binary> kind;
  };

  explicit MathExprTree(NodePtr root) : root_(std::move(root)) {}

  const Node& root() const { return *root_; }

  /// Exact value, or nullopt when the expression divides by zero (or raises zero
  /// to a negative power, or uses a non-integer exponent).
  std::optional<Rational> evaluate() const;

  /// Prefix rendering such as "Add(2,Mul(3,4))"; used by tests and diagnostics.
  std::string to_string() const;

 private:
  NodePtr root_;
};

/// Precedence (high to low): ^, unary minus, * and /, + and -. `^` is right
/// associative; the other binary operators associate to the left.
/// Throws ParseError on unbalanced parentheses, unknown tokens or empty operands.
MathExprTree parse_math_expr(std::string_view text);

/// True iff both trees evaluate to the same rational. Undefined values never match.
bool expr_equivalent(const MathExprTree& a, const MathExprTree& b);

}  // namespace rlvr
