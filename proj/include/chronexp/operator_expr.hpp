#pragma once

#include <variant>

#include "chronexp/grid_function.hpp"
#include "chronexp/poly_series.hpp"

// vendored single-header json
#include <json.hpp>

namespace chronexp::opalg {

// A function value, on either backend: exact truncated series or sampled grid.
using FunctionRep = std::variant<PolySeries, GridFunction>;

// Tree of linear operators acting on FunctionRep.
class OperatorExpr {
 public:
  enum class Kind { MulByFunction, PartialDeriv, Sum, Compose, Commutator, Scale, Identity, Zero };

  static OperatorExpr mul(expr::Expression f);
  static OperatorExpr d(std::string var);
  static OperatorExpr sum(std::vector<OperatorExpr> terms);
  // compose({A, B, C}) applies C first, then B, then A
  static OperatorExpr compose(std::vector<OperatorExpr> factors);
  static OperatorExpr commutator(OperatorExpr lhs, OperatorExpr rhs);
  static OperatorExpr scale(double factor, OperatorExpr child);
  static OperatorExpr identity();
  static OperatorExpr zero();

  Kind kind() const { return kind_; }
  const expr::Expression& function() const { return fn_; }
  const std::string& var() const { return var_; }
  double factor() const { return factor_; }
  const std::vector<OperatorExpr>& children() const { return children_; }

  // The first-order shape: sum of function-times-partial terms plus at most
  // one plain multiplication term.
  bool derivative_shaped() const;
  // Stricter: a pure vector field (no multiplication term).
  bool vector_field_shaped() const;

  nlohmann::json to_json() const;
  static OperatorExpr from_json(const nlohmann::json& j);

 private:
  Kind kind_ = Kind::Zero;
  expr::Expression fn_;
  std::string var_;
  double factor_ = 1.0;
  std::vector<OperatorExpr> children_;
};

struct OperatorApplyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Applies the operator tree to a function value. On the series backend the
// result is exact up to the truncation cap (multiplier expressions must be
// polynomial); on the grid backend derivatives are 4th-order stencils and
// invalid nodes propagate.
FunctionRep apply_operator(const OperatorExpr& op, const FunctionRep& f,
                           const expr::Bindings& params = {});

PolySeries apply_operator(const OperatorExpr& op, const PolySeries& f,
                          const expr::Bindings& params = {});
GridFunction apply_operator(const OperatorExpr& op, const GridFunction& f,
                            const expr::Bindings& params = {});

}  // namespace chronexp::opalg
