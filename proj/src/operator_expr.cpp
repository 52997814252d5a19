#include "chronexp/operator_expr.hpp"

namespace chronexp::opalg {

OperatorExpr OperatorExpr::mul(expr::Expression f) {
  OperatorExpr op;
  op.kind_ = Kind::MulByFunction;
  op.fn_ = std::move(f);
  return op;
}

OperatorExpr OperatorExpr::d(std::string var) {
  OperatorExpr op;
  op.kind_ = Kind::PartialDeriv;
  op.var_ = std::move(var);
  return op;
}

OperatorExpr OperatorExpr::sum(std::vector<OperatorExpr> terms) {
  OperatorExpr op;
  op.kind_ = Kind::Sum;
  op.children_ = std::move(terms);
  return op;
}

OperatorExpr OperatorExpr::compose(std::vector<OperatorExpr> factors) {
  OperatorExpr op;
  op.kind_ = Kind::Compose;
  op.children_ = std::move(factors);
  return op;
}

OperatorExpr OperatorExpr::commutator(OperatorExpr lhs, OperatorExpr rhs) {
  OperatorExpr op;
  op.kind_ = Kind::Commutator;
  op.children_ = {std::move(lhs), std::move(rhs)};
  return op;
}

OperatorExpr OperatorExpr::scale(double factor, OperatorExpr child) {
  OperatorExpr op;
  op.kind_ = Kind::Scale;
  op.factor_ = factor;
  op.children_ = {std::move(child)};
  return op;
}

OperatorExpr OperatorExpr::identity() {
  OperatorExpr op;
  op.kind_ = Kind::Identity;
  return op;
}

OperatorExpr OperatorExpr::zero() { return OperatorExpr(); }

namespace {

// Checks one summand of the first-order shape: optionally scaled
// MulByFunction, PartialDeriv, or MulByFunction∘PartialDeriv.
bool first_order_term(const OperatorExpr& op, bool& has_mul_term) {
  const OperatorExpr* cur = &op;
  while (cur->kind() == OperatorExpr::Kind::Scale) cur = &cur->children()[0];
  switch (cur->kind()) {
    case OperatorExpr::Kind::PartialDeriv:
      return true;
    case OperatorExpr::Kind::MulByFunction:
    case OperatorExpr::Kind::Identity:
      if (has_mul_term) return false;
      has_mul_term = true;
      return true;
    case OperatorExpr::Kind::Compose: {
      const auto& fs = cur->children();
      if (fs.size() != 2) return false;
      const OperatorExpr* a = &fs[0];
      while (a->kind() == OperatorExpr::Kind::Scale) a = &a->children()[0];
      const OperatorExpr* b = &fs[1];
      while (b->kind() == OperatorExpr::Kind::Scale) b = &b->children()[0];
      return a->kind() == OperatorExpr::Kind::MulByFunction &&
             b->kind() == OperatorExpr::Kind::PartialDeriv;
    }
    default:
      return false;
  }
}

// Walks sums (possibly nested, possibly scaled) down to first-order summands.
bool shape_walk(const OperatorExpr& op, bool& has_mul) {
  switch (op.kind()) {
    case OperatorExpr::Kind::Sum: {
      for (const auto& t : op.children())
        if (!shape_walk(t, has_mul)) return false;
      return true;
    }
    case OperatorExpr::Kind::Scale:
      return shape_walk(op.children()[0], has_mul);
    default:
      return first_order_term(op, has_mul);
  }
}

}  // namespace

bool OperatorExpr::derivative_shaped() const {
  bool has_mul = false;
  return shape_walk(*this, has_mul);
}

bool OperatorExpr::vector_field_shaped() const {
  bool has_mul = false;
  return shape_walk(*this, has_mul) && !has_mul;
}

nlohmann::json OperatorExpr::to_json() const {
  using nlohmann::json;
  switch (kind_) {
    case Kind::MulByFunction: return json{{"op", "mul"}, {"fn", fn_.str()}};
    case Kind::PartialDeriv: return json{{"op", "d"}, {"var", var_}};
    case Kind::Identity: return json{{"op", "identity"}};
    case Kind::Zero: return json{{"op", "zero"}};
    case Kind::Scale:
      return json{{"op", "scale"}, {"factor", factor_}, {"child", children_[0].to_json()}};
    case Kind::Commutator:
      return json{{"op", "commutator"},
                  {"lhs", children_[0].to_json()},
                  {"rhs", children_[1].to_json()}};
    case Kind::Sum:
    case Kind::Compose: {
      json arr = json::array();
      for (const auto& c : children_) arr.push_back(c.to_json());
      return json{{"op", kind_ == Kind::Sum ? "sum" : "compose"},
                  {kind_ == Kind::Sum ? "terms" : "factors", arr}};
    }
  }
  return nullptr;
}

OperatorExpr OperatorExpr::from_json(const nlohmann::json& j) {
  const std::string op = j.at("op").get<std::string>();
  if (op == "mul") return mul(expr::Expression::parse(j.at("fn").get<std::string>()));
  if (op == "d") return d(j.at("var").get<std::string>());
  if (op == "identity") return identity();
  if (op == "zero") return zero();
  if (op == "scale")
    return scale(j.at("factor").get<double>(), from_json(j.at("child")));
  if (op == "commutator")
    return commutator(from_json(j.at("lhs")), from_json(j.at("rhs")));
  if (op == "sum" || op == "compose") {
    std::vector<OperatorExpr> kids;
    for (const auto& c : j.at(op == "sum" ? "terms" : "factors")) kids.push_back(from_json(c));
    return op == "sum" ? sum(std::move(kids)) : compose(std::move(kids));
  }
  throw std::invalid_argument("OperatorExpr::from_json: unknown op '" + op + "'");
}

// ---------------------------------------------------------------------------

PolySeries apply_operator(const OperatorExpr& op, const PolySeries& f,
                          const expr::Bindings& params) {
  using Kind = OperatorExpr::Kind;
  switch (op.kind()) {
    case Kind::Zero: return PolySeries(f.variables(), f.max_degree());
    case Kind::Identity: return f;
    case Kind::PartialDeriv: {
      const auto& vs = f.variables();
      if (std::find(vs.begin(), vs.end(), op.var()) == vs.end())
        return PolySeries(f.variables(), f.max_degree());  // independent variable
      return f.derivative(op.var());
    }
    case Kind::MulByFunction: {
      // bind parameters as exact rationals of their double values
      std::vector<std::string> names = f.variables();
      std::vector<PolySeries> leaves;
      for (const auto& v : names)
        leaves.push_back(PolySeries::variable(f.variables(), f.max_degree(), v));
      for (const auto& [k, v] : params) {
        names.push_back(k);
        leaves.push_back(PolySeries::constant(f.variables(), f.max_degree(), Rational(v)));
      }
      for (const auto& v : op.function().variables())
        if (std::find(names.begin(), names.end(), v) == names.end())
          throw OperatorApplyError("apply_operator: variable mismatch, '" + v +
                                   "' is neither a series variable nor a bound parameter");
      auto coeff = compose_polynomial(op.function(), names, leaves);
      if (!coeff)
        throw OperatorApplyError(
            "apply_operator: multiplier '" + op.function().str() +
            "' is not polynomial; the exact backend requires polynomial coefficients");
      return *coeff * f;
    }
    case Kind::Scale:
      return apply_operator(op.children()[0], f, params).scaled(Rational(op.factor()));
    case Kind::Sum: {
      PolySeries acc(f.variables(), f.max_degree());
      for (const auto& t : op.children()) acc = acc + apply_operator(t, f, params);
      return acc;
    }
    case Kind::Compose: {
      PolySeries cur = f;
      for (auto it = op.children().rbegin(); it != op.children().rend(); ++it)
        cur = apply_operator(*it, cur, params);
      return cur;
    }
    case Kind::Commutator: {
      const auto& a = op.children()[0];
      const auto& b = op.children()[1];
      return apply_operator(a, apply_operator(b, f, params), params) -
             apply_operator(b, apply_operator(a, f, params), params);
    }
  }
  throw OperatorApplyError("apply_operator: corrupt node");
}

GridFunction apply_operator(const OperatorExpr& op, const GridFunction& f,
                            const expr::Bindings& params) {
  using Kind = OperatorExpr::Kind;
  switch (op.kind()) {
    case Kind::Zero: return GridFunction(f.axes());
    case Kind::Identity: return f;
    case Kind::PartialDeriv: return f.derivative(op.var());
    case Kind::MulByFunction: {
      for (const auto& v : op.function().variables()) {
        bool on_grid = false;
        for (const auto& ax : f.axes()) on_grid = on_grid || ax.var == v;
        if (!on_grid && !params.count(v))
          throw OperatorApplyError("apply_operator: variable mismatch, '" + v +
                                   "' is neither a grid axis nor a bound parameter");
      }
      return f.multiply_pointwise(op.function(), params);
    }
    case Kind::Scale: return apply_operator(op.children()[0], f, params).scaled(op.factor());
    case Kind::Sum: {
      GridFunction acc(f.axes());
      for (const auto& t : op.children()) acc = acc + apply_operator(t, f, params);
      return acc;
    }
    case Kind::Compose: {
      GridFunction cur = f;
      for (auto it = op.children().rbegin(); it != op.children().rend(); ++it)
        cur = apply_operator(*it, cur, params);
      return cur;
    }
    case Kind::Commutator: {
      const auto& a = op.children()[0];
      const auto& b = op.children()[1];
      return apply_operator(a, apply_operator(b, f, params), params) -
             apply_operator(b, apply_operator(a, f, params), params);
    }
  }
  throw OperatorApplyError("apply_operator: corrupt node");
}

FunctionRep apply_operator(const OperatorExpr& op, const FunctionRep& f,
                           const expr::Bindings& params) {
  if (std::holds_alternative<PolySeries>(f))
    return apply_operator(op, std::get<PolySeries>(f), params);
  return apply_operator(op, std::get<GridFunction>(f), params);
}

}  // namespace chronexp::opalg
