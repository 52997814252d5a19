#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chronexp::expr {

// Variable bindings for evaluation. Heterogeneous lookup so string_views work.
using Bindings = std::map<std::string, double, std::less<>>;

// Thrown by Expression::parse. `offset` is the 1-based byte offset of the
// first offending character.
struct ParseError : std::runtime_error {
  ParseError(std::string msg, std::size_t off)
      : std::runtime_error(std::move(msg)), offset(off) {}
  std::size_t offset;
};

// Evaluation failure as a value: log of a non-positive number, division by
// zero, fractional power of a negative base, or an unbound variable.
struct EvalError {
  std::string message;
  std::string subexpression;  // pretty-printed offending subtree
};

// Thrown by Expression::eval; carries what try_eval reports.
struct DomainError : std::runtime_error {
  explicit DomainError(EvalError e)
      : std::runtime_error(e.message + " in '" + e.subexpression + "'"),
        error(std::move(e)) {}
  EvalError error;
};

enum class BuiltinFn { Sin, Cos, Exp, Log, Pow, Sqrt, Abs };

// Immutable scalar expression in named variables.
//
// Grammar (infix, '^' right-associative, implicit multiplication rejected):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' factor)?
//   base   := number | ident | ident '(' args ')' | '(' expr ')' | '-' base
class Expression {
 public:
  enum class Kind { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };

  struct Node;
  using NodeRef = std::shared_ptr<const Node>;

  struct Node {
    Kind kind;
    double value = 0.0;        // Constant
    std::string name;          // Variable
    BuiltinFn fn = BuiltinFn::Sin;  // Call
    std::vector<NodeRef> args;
  };

  Expression();  // the zero constant

  static Expression parse(std::string_view text);
  static Expression constant(double v);
  static Expression variable(std::string name);

  double eval(const Bindings& b) const;  // throws DomainError
  std::optional<double> try_eval(const Bindings& b,
                                 EvalError* err = nullptr) const;

  // Exact symbolic derivative. Constant-folds locally (0+x, 1*x, ...) but
  // performs no other simplification.
  Expression derivative(std::string_view var) const;

  std::string str() const;

  const std::vector<std::string>& variables() const { return vars_; }
  bool depends_on(std::string_view var) const;
  bool is_constant() const { return vars_.empty(); }

  // Structural equality (same tree shape, names and constants).
  bool same_tree(const Expression& other) const;

  // Expression algebra, used by the symbolic layers. All constant-fold.
  friend Expression operator+(const Expression&, const Expression&);
  friend Expression operator-(const Expression&, const Expression&);
  friend Expression operator*(const Expression&, const Expression&);
  friend Expression operator/(const Expression&, const Expression&);
  Expression operator-() const;
  Expression pow(const Expression& exponent) const;
  static Expression call(BuiltinFn fn, std::vector<Expression> args);

  const NodeRef& root() const { return root_; }
  explicit Expression(NodeRef root);

 private:
  NodeRef root_;
  std::vector<std::string> vars_;  // sorted free variables
};

}  // namespace chronexp::expr
