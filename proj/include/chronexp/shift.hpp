#pragma once

#include <optional>

#include "chronexp/operator_expr.hpp"

namespace chronexp::opalg {

// Argument shift x -> x + alpha, generalized through a strictly monotone
// change of variable: x -> psi^{-1}(psi(x) + alpha).
struct ShiftSpec {
  std::string var;
  expr::Expression displacement;             // alpha, may reference parameters
  std::optional<expr::Expression> psi;       // change of variable in `var`
};

struct ShiftError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Series path (psi absent, polynomial displacement): exact Taylor shift.
// Grid path: resamples f at the shifted preimages; nodes whose preimage
// leaves the window (or whose psi inversion fails) are marked invalid.
FunctionRep shift_apply(const ShiftSpec& s, const FunctionRep& f,
                        const expr::Bindings& params = {});

// Closed form of the conjugation of the operator x^beta d/dx by the flow
// exp{a x^alpha d/dx}, as a multiplication-times-derivative operator in
// `var`. Three branches: alpha == 1, alpha == beta, and the general power
// bracket (restricted to windows where the bracket stays positive).
OperatorExpr shift_conjugation(double alpha, double beta, const expr::Expression& a,
                               const std::string& var = "x");

// Direct three-factor route for cross-checking shift_conjugation on a grid:
// applies exp{a x^alpha d/dx} . (x^beta d/dx) . exp{-a x^alpha d/dx} to f by
// composing the two shift flows with the sampled derivative in between.
GridFunction shift_conjugation_direct(double alpha, double beta, double a_value,
                                      const GridFunction& f);

}  // namespace chronexp::opalg
