#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metallab/jet.hpp"

namespace metallab {

enum class UnaryOp { Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

/// Scalar expression tree over real variables and named constants.
///
/// Nodes are immutable and shared, so copying an Expr is cheap and
/// concurrent evaluation is safe.
class Expr {
public:
  enum class Kind { Constant, Variable, Named, Unary, Binary };

  struct Node {
    Kind kind = Kind::Constant;
    double number = 0.0;
    std::string name;
    UnaryOp unary = UnaryOp::Neg;
    BinaryOp binary = BinaryOp::Add;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
    std::size_t offset = 0;
  };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double v);
  static Expr variable(std::string name);
  static Expr named(std::string name);
  static Expr unary(UnaryOp op, const Expr& arg);
  static Expr binary(BinaryOp op, const Expr& lhs, const Expr& rhs);

  const Node& node() const { return *root_; }

  /// Names of variable nodes, sorted and deduplicated.
  std::vector<std::string> variables() const;

  /// Structural equality; source offsets are ignored.
  friend bool operator==(const Expr& a, const Expr& b);

  friend Expr operator+(const Expr& a, const Expr& b) { return binary(BinaryOp::Add, a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return binary(BinaryOp::Sub, a, b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return binary(BinaryOp::Mul, a, b); }
  friend Expr operator/(const Expr& a, const Expr& b) { return binary(BinaryOp::Div, a, b); }

private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  friend class ExprParser;

  std::shared_ptr<const Node> root_;
};

/// Names that are always recognized as named constants. `sigma` and
/// `sigma_bar` must be bound at evaluation time; `pi` is built in.
inline constexpr std::string_view kBuiltinConstants[] = {"pi", "sigma", "sigma_bar"};

/// Parses `source`. Identifiers must be in `allowed_vars` (become variables),
/// in `kBuiltinConstants`, or in `extra_constants` (become named constants).
///
/// Precedence, loosest first: `+ -`, `* /`, unary `-`, `^` (right
/// associative, `**` is an alias). The exponent of `^` may not reference
/// variables.
Expr parse(std::string_view source, std::span<const std::string> allowed_vars,
           std::span<const std::string> extra_constants = {});

/// Canonical, fully parenthesized text; parse(print(e)) == e.
std::string print(const Expr& e);

using Constants = std::map<std::string, double, std::less<>>;

/// Values of the active variables; gradient/Hessian indices follow `names`.
struct Point {
  std::vector<std::string> names;
  std::vector<double> values;
};

/// Evaluates value, gradient and Hessian with respect to `point.names`.
///
/// Throws DomainError on log/sqrt/division/pow domain violations and Error
/// when a variable or named constant is unbound.
Jet2 eval_jet2(const Expr& e, const Point& point, const Constants& consts = {});

/// Value only; variables must be absent or bound in `consts`.
double eval_value(const Expr& e, const Constants& consts = {});

}  // namespace metallab
