#include "chronexp/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

namespace chronexp::expr {

namespace {

using NodeRef = Expression::NodeRef;
using Kind = Expression::Kind;

NodeRef make_node(Expression::Node n) {
  return std::make_shared<const Expression::Node>(std::move(n));
}

NodeRef mk_const(double v) { return make_node({Kind::Constant, v, {}, BuiltinFn::Sin, {}}); }
NodeRef mk_var(std::string name) {
  return make_node({Kind::Variable, 0.0, std::move(name), BuiltinFn::Sin, {}});
}

bool is_const(const NodeRef& n, double v) {
  return n->kind == Kind::Constant && n->value == v;
}
bool is_const(const NodeRef& n) { return n->kind == Kind::Constant; }

NodeRef mk_neg(NodeRef a) {
  if (is_const(a)) return mk_const(-a->value);
  if (a->kind == Kind::Negate) return a->args[0];
  return make_node({Kind::Negate, 0.0, {}, BuiltinFn::Sin, {std::move(a)}});
}

NodeRef mk_add(NodeRef a, NodeRef b) {
  if (is_const(a) && is_const(b)) return mk_const(a->value + b->value);
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  return make_node({Kind::Add, 0.0, {}, BuiltinFn::Sin, {std::move(a), std::move(b)}});
}

NodeRef mk_sub(NodeRef a, NodeRef b) {
  if (is_const(a) && is_const(b)) return mk_const(a->value - b->value);
  if (is_const(b, 0)) return a;
  if (is_const(a, 0)) return mk_neg(std::move(b));
  return make_node({Kind::Sub, 0.0, {}, BuiltinFn::Sin, {std::move(a), std::move(b)}});
}

NodeRef mk_mul(NodeRef a, NodeRef b) {
  if (is_const(a) && is_const(b)) return mk_const(a->value * b->value);
  if (is_const(a, 0) || is_const(b, 0)) return mk_const(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  return make_node({Kind::Mul, 0.0, {}, BuiltinFn::Sin, {std::move(a), std::move(b)}});
}

NodeRef mk_div(NodeRef a, NodeRef b) {
  if (is_const(a, 0) && !is_const(b, 0)) return mk_const(0);
  if (is_const(b, 1)) return a;
  return make_node({Kind::Div, 0.0, {}, BuiltinFn::Sin, {std::move(a), std::move(b)}});
}

NodeRef mk_pow(NodeRef a, NodeRef b) {
  if (is_const(b, 1)) return a;
  if (is_const(b, 0)) return mk_const(1);
  if (is_const(a) && is_const(b)) {
    double v = std::pow(a->value, b->value);
    if (std::isfinite(v)) return mk_const(v);
  }
  return make_node({Kind::Pow, 0.0, {}, BuiltinFn::Sin, {std::move(a), std::move(b)}});
}

NodeRef mk_call(BuiltinFn fn, std::vector<NodeRef> args) {
  return make_node({Kind::Call, 0.0, {}, fn, std::move(args)});
}

struct BuiltinInfo {
  const char* name;
  BuiltinFn fn;
  int arity;
};

constexpr BuiltinInfo kBuiltins[] = {
    {"sin", BuiltinFn::Sin, 1}, {"cos", BuiltinFn::Cos, 1},
    {"exp", BuiltinFn::Exp, 1}, {"log", BuiltinFn::Log, 1},
    {"pow", BuiltinFn::Pow, 2}, {"sqrt", BuiltinFn::Sqrt, 1},
    {"abs", BuiltinFn::Abs, 1},
};

const BuiltinInfo* find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins)
    if (name == b.name) return &b;
  return nullptr;
}

const char* builtin_name(BuiltinFn fn) {
  for (const auto& b : kBuiltins)
    if (b.fn == fn) return b.name;
  return "?";
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over the documented grammar. Offsets are 1-based.

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodeRef run() {
    NodeRef e = parse_expr();
    skip_ws();
    if (pos_ < text_.size())
      fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_ + 1), pos_ + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodeRef parse_expr() {
    NodeRef lhs = parse_term();
    for (;;) {
      if (consume('+'))
        lhs = mk_add(std::move(lhs), parse_term());
      else if (consume('-'))
        lhs = mk_sub(std::move(lhs), parse_term());
      else
        return lhs;
    }
  }

  NodeRef parse_term() {
    NodeRef lhs = parse_factor();
    for (;;) {
      if (consume('*'))
        lhs = mk_mul(std::move(lhs), parse_factor());
      else if (consume('/'))
        lhs = mk_div(std::move(lhs), parse_factor());
      else
        return lhs;
    }
  }

  NodeRef parse_factor() {
    NodeRef base = parse_base();
    if (consume('^')) return mk_pow(std::move(base), parse_factor());
    return base;
  }

  NodeRef parse_base() {
    char c = peek();
    if (c == '-') {
      ++pos_;
      return mk_neg(parse_base());
    }
    if (c == '(') {
      ++pos_;
      NodeRef e = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail("expected a number, identifier or '('");
  }

  NodeRef parse_number() {
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    // text_ views a NUL-terminated buffer (see Expression::parse)
    double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return mk_const(v);
  }

  NodeRef parse_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (peek() == '(') {
      const BuiltinInfo* b = find_builtin(name);
      if (!b) {
        pos_ = start;
        fail("unknown function '" + name + "'");
      }
      ++pos_;  // '('
      std::vector<NodeRef> args;
      if (peek() != ')') {
        args.push_back(parse_expr());
        while (consume(',')) args.push_back(parse_expr());
      }
      if (!consume(')')) fail("expected ')'");
      if (static_cast<int>(args.size()) != b->arity) {
        pos_ = start;
        fail("function '" + name + "' expects " + std::to_string(b->arity) +
             " argument(s), got " + std::to_string(args.size()));
      }
      return mk_call(b->fn, std::move(args));
    }
    return mk_var(std::move(name));
  }
};

// ---------------------------------------------------------------------------
// Printing with minimal parentheses.

int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Negate: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

void print_node(const NodeRef& n, std::ostream& os, int parent_prec, bool rhs_of_binary) {
  int prec = precedence(n->kind);
  bool parens = prec < parent_prec || (prec == parent_prec && rhs_of_binary);
  switch (n->kind) {
    case Kind::Constant: {
      double v = n->value;
      if (v < 0) {
        os << '(';
        std::ostringstream tmp;
        tmp.precision(17);
        tmp << v;
        os << tmp.str() << ')';
      } else {
        std::ostringstream tmp;
        tmp.precision(17);
        tmp << v;
        os << tmp.str();
      }
      return;
    }
    case Kind::Variable: os << n->name; return;
    case Kind::Call: {
      os << builtin_name(n->fn) << '(';
      for (std::size_t i = 0; i < n->args.size(); ++i) {
        if (i) os << ", ";
        print_node(n->args[i], os, 0, false);
      }
      os << ')';
      return;
    }
    case Kind::Negate:
      if (parens) os << '(';
      os << '-';
      print_node(n->args[0], os, prec + 1, false);
      if (parens) os << ')';
      return;
    default: break;
  }
  const char* op = n->kind == Kind::Add   ? "+"
                   : n->kind == Kind::Sub ? "-"
                   : n->kind == Kind::Mul ? "*"
                   : n->kind == Kind::Div ? "/"
                                          : "^";
  if (parens) os << '(';
  // '^' is right-associative: parenthesize its left child at equal precedence.
  bool pow = n->kind == Kind::Pow;
  print_node(n->args[0], os, pow ? prec + 1 : prec, false);
  os << op;
  print_node(n->args[1], os, prec, !pow);
  if (parens) os << ')';
}

void collect_vars(const NodeRef& n, std::set<std::string>& out) {
  if (n->kind == Kind::Variable) out.insert(n->name);
  for (const auto& a : n->args) collect_vars(a, out);
}

// ---------------------------------------------------------------------------
// Evaluation. Returns false and fills `err` on a domain error.

bool eval_node(const NodeRef& n, const Bindings& b, double& out, EvalError* err);

bool domain_fail(const NodeRef& n, const std::string& msg, EvalError* err) {
  if (err) {
    std::ostringstream os;
    print_node(n, os, 0, false);
    *err = {msg, os.str()};
  }
  return false;
}

bool eval_node(const NodeRef& n, const Bindings& b, double& out, EvalError* err) {
  switch (n->kind) {
    case Kind::Constant: out = n->value; return true;
    case Kind::Variable: {
      auto it = b.find(n->name);
      if (it == b.end()) return domain_fail(n, "unbound variable '" + n->name + "'", err);
      out = it->second;
      return true;
    }
    case Kind::Negate: {
      double a;
      if (!eval_node(n->args[0], b, a, err)) return false;
      out = -a;
      return true;
    }
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      double x, y;
      if (!eval_node(n->args[0], b, x, err) || !eval_node(n->args[1], b, y, err)) return false;
      if (n->kind == Kind::Add) out = x + y;
      else if (n->kind == Kind::Sub) out = x - y;
      else if (n->kind == Kind::Mul) out = x * y;
      else {
        if (y == 0.0) return domain_fail(n, "division by zero", err);
        out = x / y;
      }
      return true;
    }
    case Kind::Pow: {
      double x, y;
      if (!eval_node(n->args[0], b, x, err) || !eval_node(n->args[1], b, y, err)) return false;
      if (x < 0 && y != std::floor(y))
        return domain_fail(n, "fractional power of a negative base", err);
      if (x == 0 && y < 0) return domain_fail(n, "zero raised to a negative power", err);
      out = std::pow(x, y);
      return true;
    }
    case Kind::Call: {
      double a0;
      if (!eval_node(n->args[0], b, a0, err)) return false;
      switch (n->fn) {
        case BuiltinFn::Sin: out = std::sin(a0); return true;
        case BuiltinFn::Cos: out = std::cos(a0); return true;
        case BuiltinFn::Exp: out = std::exp(a0); return true;
        case BuiltinFn::Abs: out = std::fabs(a0); return true;
        case BuiltinFn::Log:
          if (a0 <= 0) return domain_fail(n, "log of a non-positive number", err);
          out = std::log(a0);
          return true;
        case BuiltinFn::Sqrt:
          if (a0 < 0) return domain_fail(n, "sqrt of a negative number", err);
          out = std::sqrt(a0);
          return true;
        case BuiltinFn::Pow: {
          double a1;
          if (!eval_node(n->args[1], b, a1, err)) return false;
          if (a0 < 0 && a1 != std::floor(a1))
            return domain_fail(n, "fractional power of a negative base", err);
          if (a0 == 0 && a1 < 0) return domain_fail(n, "zero raised to a negative power", err);
          out = std::pow(a0, a1);
          return true;
        }
      }
      return domain_fail(n, "unreachable builtin", err);
    }
  }
  return domain_fail(n, "corrupt expression node", err);
}

// ---------------------------------------------------------------------------
// Differentiation.

NodeRef diff(const NodeRef& n, std::string_view var) {
  switch (n->kind) {
    case Kind::Constant: return mk_const(0);
    case Kind::Variable: return mk_const(n->name == var ? 1 : 0);
    case Kind::Negate: return mk_neg(diff(n->args[0], var));
    case Kind::Add: return mk_add(diff(n->args[0], var), diff(n->args[1], var));
    case Kind::Sub: return mk_sub(diff(n->args[0], var), diff(n->args[1], var));
    case Kind::Mul:
      return mk_add(mk_mul(diff(n->args[0], var), n->args[1]),
                    mk_mul(n->args[0], diff(n->args[1], var)));
    case Kind::Div: {
      // (u/v)' = u'/v - u v'/v^2
      NodeRef u = n->args[0], v = n->args[1];
      return mk_sub(mk_div(diff(u, var), v),
                    mk_div(mk_mul(u, diff(v, var)), mk_pow(v, mk_const(2))));
    }
    case Kind::Pow: {
      NodeRef u = n->args[0], v = n->args[1];
      if (is_const(v)) {
        // power rule, keeps negative bases with integer exponents legal
        return mk_mul(mk_mul(v, mk_pow(u, mk_const(v->value - 1))), diff(u, var));
      }
      // u^v = exp(v log u)
      NodeRef lhs = mk_mul(diff(v, var), mk_call(BuiltinFn::Log, {u}));
      NodeRef rhs = mk_div(mk_mul(v, diff(u, var)), u);
      return mk_mul(mk_pow(u, v), mk_add(std::move(lhs), std::move(rhs)));
    }
    case Kind::Call: {
      NodeRef u = n->args[0];
      NodeRef du = diff(u, var);
      switch (n->fn) {
        case BuiltinFn::Sin: return mk_mul(mk_call(BuiltinFn::Cos, {u}), du);
        case BuiltinFn::Cos: return mk_neg(mk_mul(mk_call(BuiltinFn::Sin, {u}), du));
        case BuiltinFn::Exp: return mk_mul(mk_call(BuiltinFn::Exp, {u}), du);
        case BuiltinFn::Log: return mk_div(du, u);
        case BuiltinFn::Sqrt:
          return mk_div(du, mk_mul(mk_const(2), mk_call(BuiltinFn::Sqrt, {u})));
        case BuiltinFn::Abs:
          // u/|u| du; undefined at u = 0, reported at evaluation time
          return mk_mul(mk_div(u, mk_call(BuiltinFn::Abs, {u})), du);
        case BuiltinFn::Pow:
          return diff(mk_pow(u, n->args[1]), var);
      }
      break;
    }
  }
  throw std::logic_error("diff: corrupt expression node");
}

}  // namespace

Expression::Expression() : root_(mk_const(0)) {}

Expression::Expression(NodeRef root) : root_(std::move(root)) {
  std::set<std::string> vs;
  collect_vars(root_, vs);
  vars_.assign(vs.begin(), vs.end());
}

Expression Expression::parse(std::string_view text) {
  std::string owned(text);  // guarantees NUL termination for strtod
  Parser p(owned);
  return Expression(p.run());
}

Expression Expression::constant(double v) { return Expression(mk_const(v)); }
Expression Expression::variable(std::string name) { return Expression(mk_var(std::move(name))); }

double Expression::eval(const Bindings& b) const {
  double out;
  EvalError err;
  if (!eval_node(root_, b, out, &err)) throw DomainError(std::move(err));
  if (!std::isfinite(out)) throw DomainError({"non-finite result", str()});
  return out;
}

std::optional<double> Expression::try_eval(const Bindings& b, EvalError* err) const {
  double out;
  if (!eval_node(root_, b, out, err)) return std::nullopt;
  if (!std::isfinite(out)) {
    if (err) *err = {"non-finite result", str()};
    return std::nullopt;
  }
  return out;
}

Expression Expression::derivative(std::string_view var) const {
  return Expression(diff(root_, var));
}

std::string Expression::str() const {
  std::ostringstream os;
  print_node(root_, os, 0, false);
  return os.str();
}

bool Expression::depends_on(std::string_view var) const {
  return std::binary_search(vars_.begin(), vars_.end(), var);
}

namespace {
bool same_node(const NodeRef& a, const NodeRef& b) {
  if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
  if (a->kind == Kind::Constant && a->value != b->value) return false;
  if (a->kind == Kind::Variable && a->name != b->name) return false;
  if (a->kind == Kind::Call && a->fn != b->fn) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!same_node(a->args[i], b->args[i])) return false;
  return true;
}
}  // namespace

bool Expression::same_tree(const Expression& other) const {
  return same_node(root_, other.root_);
}

Expression operator+(const Expression& a, const Expression& b) {
  return Expression(mk_add(a.root_, b.root_));
}
Expression operator-(const Expression& a, const Expression& b) {
  return Expression(mk_sub(a.root_, b.root_));
}
Expression operator*(const Expression& a, const Expression& b) {
  return Expression(mk_mul(a.root_, b.root_));
}
Expression operator/(const Expression& a, const Expression& b) {
  return Expression(mk_div(a.root_, b.root_));
}
Expression Expression::operator-() const { return Expression(mk_neg(root_)); }

Expression Expression::pow(const Expression& exponent) const {
  return Expression(mk_pow(root_, exponent.root_));
}

Expression Expression::call(BuiltinFn fn, std::vector<Expression> args) {
  std::vector<NodeRef> nargs;
  nargs.reserve(args.size());
  for (auto& a : args) nargs.push_back(a.root_);
  return Expression(mk_call(fn, std::move(nargs)));
}

}  // namespace chronexp::expr
