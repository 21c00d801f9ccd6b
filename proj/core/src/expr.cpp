#include "metallab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "metallab/errors.hpp"

namespace metallab {

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_node(Expr::Node n) { return std::make_shared<const Expr::Node>(std::move(n)); }

struct FunctionName {
  std::string_view name;
  UnaryOp op;
};

constexpr FunctionName kFunctions[] = {
    {"sin", UnaryOp::Sin}, {"cos", UnaryOp::Cos},   {"tan", UnaryOp::Tan}, {"exp", UnaryOp::Exp},
    {"log", UnaryOp::Log}, {"sqrt", UnaryOp::Sqrt}, {"abs", UnaryOp::Abs},
};

bool contains(std::span<const std::string> names, std::string_view n) {
  return std::find(names.begin(), names.end(), n) != names.end();
}

bool has_variables(const Expr::Node& n) {
  switch (n.kind) {
    case Expr::Kind::Variable: return true;
    case Expr::Kind::Unary: return has_variables(*n.lhs);
    case Expr::Kind::Binary: return has_variables(*n.lhs) || has_variables(*n.rhs);
    default: return false;
  }
}

}  // namespace

// Recursive descent over the grammar
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := ('-'|'+') unary | power
//   power  := primary (('^'|'**') exponent)?
//   exponent := ('-'|'+') exponent | power
//   primary := number | ident | func '(' expr ')' | '(' expr ')'
class ExprParser {
public:
  ExprParser(std::string_view src, std::span<const std::string> vars, std::span<const std::string> consts)
      : src_(src), vars_(vars), consts_(consts) {}

  Expr run() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError("empty expression", pos_);
    NodePtr root = parse_expr();
    skip_ws();
    if (pos_ < src_.size()) throw SyntaxError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_);
    return Expr(root);
  }

private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool peek_pow() {
    skip_ws();
    if (pos_ >= src_.size()) return false;
    if (src_[pos_] == '^') return true;
    return src_[pos_] == '*' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*';
  }

  void consume_pow() { pos_ += (src_[pos_] == '^') ? 1 : 2; }

  NodePtr binary(BinaryOp op, NodePtr l, NodePtr r, std::size_t at) {
    Expr::Node n;
    n.kind = Expr::Kind::Binary;
    n.binary = op;
    n.lhs = std::move(l);
    n.rhs = std::move(r);
    n.offset = at;
    return make_node(std::move(n));
  }

  NodePtr unary(UnaryOp op, NodePtr arg, std::size_t at) {
    Expr::Node n;
    n.kind = Expr::Kind::Unary;
    n.unary = op;
    n.lhs = std::move(arg);
    n.offset = at;
    return make_node(std::move(n));
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (true) {
      skip_ws();
      if (pos_ >= src_.size()) return lhs;
      const char c = src_[pos_];
      if (c != '+' && c != '-') return lhs;
      const std::size_t at = pos_++;
      NodePtr rhs = parse_term();
      lhs = binary(c == '+' ? BinaryOp::Add : BinaryOp::Sub, lhs, rhs, at);
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (true) {
      skip_ws();
      if (pos_ >= src_.size()) return lhs;
      const char c = src_[pos_];
      if (c != '*' && c != '/') return lhs;
      if (c == '*' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') return lhs;
      const std::size_t at = pos_++;
      NodePtr rhs = parse_unary();
      lhs = binary(c == '*' ? BinaryOp::Mul : BinaryOp::Div, lhs, rhs, at);
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
      const char c = src_[pos_];
      const std::size_t at = pos_++;
      NodePtr arg = parse_unary();
      return c == '-' ? unary(UnaryOp::Neg, arg, at) : arg;
    }
    return parse_power();
  }

  NodePtr parse_exponent() {
    skip_ws();
    if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
      const char c = src_[pos_];
      const std::size_t at = pos_++;
      NodePtr arg = parse_exponent();
      return c == '-' ? unary(UnaryOp::Neg, arg, at) : arg;
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (!peek_pow()) return base;
    const std::size_t at = pos_;
    consume_pow();
    const std::size_t exp_at = (skip_ws(), pos_);
    NodePtr exponent = parse_exponent();
    if (has_variables(*exponent)) throw SyntaxError("exponent must not depend on variables", exp_at);
    return binary(BinaryOp::Pow, base, exponent, at);
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError("expected operand", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!peek(')')) throw SyntaxError("expected ')'", pos_);
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw SyntaxError("expected operand", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t count = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) throw SyntaxError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw SyntaxError("malformed exponent in number", pos_);
    }
    double value = 0.0;
    const auto text = src_.substr(start, pos_ - start);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc()) throw SyntaxError("number out of range", start);
    Expr::Node n;
    n.kind = Expr::Kind::Constant;
    n.number = value;
    n.offset = start;
    return make_node(std::move(n));
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(src_.substr(start, pos_ - start));
    if (peek('(')) {
      const auto fn = std::find_if(std::begin(kFunctions), std::end(kFunctions),
                                   [&](const FunctionName& f) { return f.name == name; });
      if (fn == std::end(kFunctions)) throw UnknownIdentifier(name, start);
      ++pos_;
      NodePtr arg = parse_expr();
      if (!peek(')')) throw SyntaxError("expected ')'", pos_);
      ++pos_;
      return unary(fn->op, arg, start);
    }
    Expr::Node n;
    n.name = name;
    n.offset = start;
    if (contains(vars_, name)) {
      n.kind = Expr::Kind::Variable;
    } else if (contains(consts_, name) ||
               std::find(std::begin(kBuiltinConstants), std::end(kBuiltinConstants), name) !=
                   std::end(kBuiltinConstants)) {
      n.kind = Expr::Kind::Named;
    } else {
      throw UnknownIdentifier(name, start);
    }
    return make_node(std::move(n));
  }

  std::string_view src_;
  std::span<const std::string> vars_;
  std::span<const std::string> consts_;
  std::size_t pos_ = 0;
};

Expr Expr::constant(double v) {
  Node n;
  n.kind = Kind::Constant;
  n.number = v;
  return Expr(make_node(std::move(n)));
}

Expr Expr::variable(std::string name) {
  Node n;
  n.kind = Kind::Variable;
  n.name = std::move(name);
  return Expr(make_node(std::move(n)));
}

Expr Expr::named(std::string name) {
  Node n;
  n.kind = Kind::Named;
  n.name = std::move(name);
  return Expr(make_node(std::move(n)));
}

Expr Expr::unary(UnaryOp op, const Expr& arg) {
  Node n;
  n.kind = Kind::Unary;
  n.unary = op;
  n.lhs = arg.root_;
  return Expr(make_node(std::move(n)));
}

Expr Expr::binary(BinaryOp op, const Expr& lhs, const Expr& rhs) {
  Node n;
  n.kind = Kind::Binary;
  n.binary = op;
  n.lhs = lhs.root_;
  n.rhs = rhs.root_;
  return Expr(make_node(std::move(n)));
}

namespace {

void collect_variables(const Expr::Node& n, std::set<std::string>& out) {
  switch (n.kind) {
    case Expr::Kind::Variable: out.insert(n.name); break;
    case Expr::Kind::Unary: collect_variables(*n.lhs, out); break;
    case Expr::Kind::Binary:
      collect_variables(*n.lhs, out);
      collect_variables(*n.rhs, out);
      break;
    default: break;
  }
}

bool same_tree(const Expr::Node& a, const Expr::Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Constant: return a.number == b.number;
    case Expr::Kind::Variable:
    case Expr::Kind::Named: return a.name == b.name;
    case Expr::Kind::Unary: return a.unary == b.unary && same_tree(*a.lhs, *b.lhs);
    case Expr::Kind::Binary:
      return a.binary == b.binary && same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
  }
  return false;
}

std::string_view unary_name(UnaryOp op) {
  for (const auto& f : kFunctions) {
    if (f.op == op) return f.name;
  }
  return "-";
}

char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

void print_node(const Expr::Node& n, std::string& out) {
  switch (n.kind) {
    case Expr::Kind::Constant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      out += buf;
      break;
    }
    case Expr::Kind::Variable:
    case Expr::Kind::Named: out += n.name; break;
    case Expr::Kind::Unary:
      if (n.unary == UnaryOp::Neg) {
        out += "(-";
        print_node(*n.lhs, out);
        out += ')';
      } else {
        out += unary_name(n.unary);
        out += '(';
        print_node(*n.lhs, out);
        out += ')';
      }
      break;
    case Expr::Kind::Binary:
      out += '(';
      print_node(*n.lhs, out);
      out += ' ';
      out += binary_symbol(n.binary);
      out += ' ';
      print_node(*n.rhs, out);
      out += ')';
      break;
  }
}

class JetEvaluator {
public:
  JetEvaluator(const Point& point, const Constants& consts) : point_(point), consts_(consts) {}

  Jet2 eval(const Expr::Node& n) const {
    const std::size_t dim = point_.names.size();
    switch (n.kind) {
      case Expr::Kind::Constant: return Jet2::constant(dim, n.number);
      case Expr::Kind::Variable: {
        for (std::size_t i = 0; i < dim; ++i) {
          if (point_.names[i] == n.name) return Jet2::variable(dim, i, point_.values[i]);
        }
        if (auto it = consts_.find(n.name); it != consts_.end()) return Jet2::constant(dim, it->second);
        throw Error("unbound variable \"" + n.name + "\"");
      }
      case Expr::Kind::Named: {
        if (auto it = consts_.find(n.name); it != consts_.end()) return Jet2::constant(dim, it->second);
        if (n.name == "pi") return Jet2::constant(dim, std::numbers::pi);
        throw Error("unbound constant \"" + n.name + "\"");
      }
      case Expr::Kind::Unary: return eval_unary(n, eval(*n.lhs));
      case Expr::Kind::Binary: return eval_binary(n);
    }
    return Jet2::constant(dim, 0.0);
  }

private:
  static Jet2 eval_unary(const Expr::Node& n, const Jet2& a) {
    const double x = a.value();
    switch (n.unary) {
      case UnaryOp::Neg: return -a;
      case UnaryOp::Sin: return a.compose(std::sin(x), std::cos(x), -std::sin(x));
      case UnaryOp::Cos: return a.compose(std::cos(x), -std::sin(x), -std::cos(x));
      case UnaryOp::Tan: {
        const double c = std::cos(x);
        if (c == 0.0) throw DomainError("tan at a pole", n.offset);
        const double t = std::tan(x);
        const double sec2 = 1.0 + t * t;
        return a.compose(t, sec2, 2.0 * t * sec2);
      }
      case UnaryOp::Exp: {
        const double e = std::exp(x);
        return a.compose(e, e, e);
      }
      case UnaryOp::Log:
        if (!(x > 0.0)) throw DomainError("log of nonpositive value", n.offset);
        return a.compose(std::log(x), 1.0 / x, -1.0 / (x * x));
      case UnaryOp::Sqrt: {
        if (x < 0.0) throw DomainError("sqrt of negative value", n.offset);
        const double s = std::sqrt(x);
        if (x == 0.0) {
          if (!a.is_constant()) throw DomainError("sqrt is not differentiable at 0", n.offset);
          return Jet2::constant(a.size(), 0.0);
        }
        return a.compose(s, 0.5 / s, -0.25 / (s * x));
      }
      case UnaryOp::Abs: {
        const double sign = (x > 0.0) - (x < 0.0);
        return a.compose(std::fabs(x), sign, 0.0);
      }
    }
    return a;
  }

  Jet2 eval_binary(const Expr::Node& n) const {
    const Jet2 a = eval(*n.lhs);
    const Jet2 b = eval(*n.rhs);
    switch (n.binary) {
      case BinaryOp::Add: return a + b;
      case BinaryOp::Sub: return a - b;
      case BinaryOp::Mul: return a * b;
      case BinaryOp::Div:
        if (b.value() == 0.0) throw DomainError("division by zero", n.offset);
        return a * reciprocal(b);
      case BinaryOp::Pow: return power(n, a, b.value());
    }
    return a;
  }

  static Jet2 power(const Expr::Node& n, const Jet2& base, double e) {
    const double x = base.value();
    if (std::nearbyint(e) == e && std::fabs(e) <= 1e9) {
      const auto k = static_cast<long long>(e);
      if (k < 0 && x == 0.0) throw DomainError("division by zero in negative power", n.offset);
      return integer_power(base, k);
    }
    if (!(x > 0.0)) throw DomainError("non-integer power of nonpositive base", n.offset);
    const double v = std::pow(x, e);
    return base.compose(v, e * v / x, e * (e - 1.0) * v / (x * x));
  }

  const Point& point_;
  const Constants& consts_;
};

}  // namespace

std::vector<std::string> Expr::variables() const {
  std::set<std::string> names;
  collect_variables(*root_, names);
  return {names.begin(), names.end()};
}

bool operator==(const Expr& a, const Expr& b) { return same_tree(*a.root_, *b.root_); }

Expr parse(std::string_view source, std::span<const std::string> allowed_vars,
           std::span<const std::string> extra_constants) {
  return ExprParser(source, allowed_vars, extra_constants).run();
}

std::string print(const Expr& e) {
  std::string out;
  print_node(e.node(), out);
  return out;
}

Jet2 eval_jet2(const Expr& e, const Point& point, const Constants& consts) {
  return JetEvaluator(point, consts).eval(e.node());
}

double eval_value(const Expr& e, const Constants& consts) {
  static const Point kEmpty;
  return eval_jet2(e, kEmpty, consts).value();
}

}  // namespace metallab
