#include "chronexp/shift.hpp"

#include <cmath>

namespace chronexp::opalg {

namespace {

using expr::Bindings;
using expr::Expression;

PolySeries shift_series(const ShiftSpec& s, const PolySeries& f, const Bindings& params) {
  if (s.psi)
    throw ShiftError("shift_apply: change of variable requires the grid backend");
  std::vector<std::string> names = f.variables();
  std::vector<PolySeries> leaves;
  for (const auto& v : names)
    leaves.push_back(PolySeries::variable(f.variables(), f.max_degree(), v));
  for (const auto& [k, v] : params) {
    names.push_back(k);
    leaves.push_back(PolySeries::constant(f.variables(), f.max_degree(), Rational(v)));
  }
  auto disp = compose_polynomial(s.displacement, names, leaves);
  if (!disp)
    throw ShiftError("shift_apply: displacement '" + s.displacement.str() +
                     "' is not polynomial; use the grid backend");
  PolySeries target = PolySeries::variable(f.variables(), f.max_degree(), s.var) + *disp;
  return f.substitute(s.var, target);
}

// cubic Lagrange on the uniform grid
double interpolate(const GridFunction& g, double x, bool& ok) {
  const auto& ax = g.axes()[0];
  const double h = ax.h();
  int i0 = static_cast<int>(std::floor((x - ax.lo) / h)) - 1;
  i0 = std::max(0, std::min(ax.n - 4, i0));
  double acc = 0;
  for (int k = 0; k < 4; ++k) {
    if (!g.valid(i0 + k)) {
      ok = false;
      return 0;
    }
    double lk = 1;
    double xk = ax.coord(i0 + k);
    for (int m = 0; m < 4; ++m) {
      if (m == k) continue;
      lk *= (x - ax.coord(i0 + m)) / (xk - ax.coord(i0 + m));
    }
    acc += lk * g.at(i0 + k);
  }
  ok = true;
  return acc;
}

GridFunction shift_grid(const ShiftSpec& s, const GridFunction& f, const Bindings& params) {
  if (f.axis_count() != 1 || f.axes()[0].var != s.var)
    throw ShiftError("shift_apply: grid shift expects a 1-D grid over '" + s.var + "'");
  if (s.displacement.depends_on(s.var))
    throw ShiftError("shift_apply: displacement must not depend on the shifted variable");
  const double alpha = s.displacement.eval(params);
  const auto& ax = f.axes()[0];

  std::function<double(double)> forward, target_of;
  if (s.psi) {
    const Expression& psi = *s.psi;
    Expression dpsi = psi.derivative(s.var);
    double sign = 0;
    for (int i = 0; i < 101; ++i) {
      Bindings b = params;
      b[s.var] = ax.lo + (ax.hi - ax.lo) * i / 100.0;
      double d = dpsi.eval(b);
      if (i == 0) sign = d;
      if (d == 0 || d * sign < 0)
        throw ShiftError("shift_apply: psi is not strictly monotone on the window");
    }
    forward = [&psi, &params, &s](double x) {
      Bindings b = params;
      b[s.var] = x;
      return psi.eval(b);
    };
  } else {
    forward = [](double x) { return x; };
  }

  GridFunction out(f.axes());
  const double plo = forward(ax.lo), phi = forward(ax.hi);
  const double pmin = std::min(plo, phi), pmax = std::max(plo, phi);
  for (int i = 0; i < ax.n; ++i) {
    double y = forward(ax.coord(i)) + alpha;
    if (y < pmin || y > pmax) {
      out.invalidate(i);
      continue;
    }
    // invert psi on the window by bisection (identity when psi is absent)
    double xnew;
    if (s.psi) {
      double lo = ax.lo, hi = ax.hi;
      double flo = plo - y;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double fmid = forward(mid) - y;
        if ((fmid <= 0) == (flo <= 0)) {
          lo = mid;
          flo = fmid;
        } else {
          hi = mid;
        }
      }
      xnew = 0.5 * (lo + hi);
    } else {
      xnew = y;
    }
    bool ok;
    double v = interpolate(f, xnew, ok);
    if (!ok)
      out.invalidate(i);
    else
      out.at(i) = v;
  }
  return out;
}

}  // namespace

FunctionRep shift_apply(const ShiftSpec& s, const FunctionRep& f, const Bindings& params) {
  if (std::holds_alternative<PolySeries>(f))
    return shift_series(s, std::get<PolySeries>(f), params);
  return shift_grid(s, std::get<GridFunction>(f), params);
}

OperatorExpr shift_conjugation(double alpha, double beta, const expr::Expression& a,
                               const std::string& var) {
  using expr::BuiltinFn;
  Expression x = Expression::variable(var);
  Expression coeff;
  if (alpha == 1.0) {
    Expression gain = Expression::call(
        BuiltinFn::Exp, {Expression::constant(beta - 1.0) * a});
    coeff = gain * x.pow(Expression::constant(beta));
  } else if (alpha == beta) {
    coeff = x.pow(Expression::constant(alpha));
  } else {
    const double e1 = beta * (1 - alpha) / (beta - alpha);
    const double e2 = alpha * (1 - alpha) / (beta - alpha);
    const double p = (beta - alpha) / (1 - alpha);
    Expression bracket = x.pow(Expression::constant(e1)) +
                         Expression::constant(1 - alpha) * a * x.pow(Expression::constant(e2));
    coeff = bracket.pow(Expression::constant(p));
  }
  return OperatorExpr::compose({OperatorExpr::mul(coeff), OperatorExpr::d(var)});
}

GridFunction shift_conjugation_direct(double alpha, double beta, double a_value,
                                      const GridFunction& f) {
  const std::string var = f.axes()[0].var;
  Expression x = Expression::variable(var);

  // x^alpha d/dx = d/dpsi with psi'(x) = x^(-alpha)
  ShiftSpec inward{var, expr::Expression::constant(-a_value), std::nullopt};
  ShiftSpec outward{var, expr::Expression::constant(a_value), std::nullopt};
  if (alpha == 1.0) {
    inward.psi = Expression::call(expr::BuiltinFn::Log, {x});
    outward.psi = inward.psi;
  } else if (alpha != 0.0) {
    Expression psi = x.pow(Expression::constant(1 - alpha)) /
                     Expression::constant(1 - alpha);
    inward.psi = psi;
    outward.psi = psi;
  }

  GridFunction g1 = std::get<GridFunction>(shift_apply(inward, f));
  GridFunction g2 = g1.derivative(var).multiply_pointwise(x.pow(Expression::constant(beta)));
  return std::get<GridFunction>(shift_apply(outward, FunctionRep(g2)));
}

}  // namespace chronexp::opalg
