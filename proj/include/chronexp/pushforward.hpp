#pragma once

#include "chronexp/operator_expr.hpp"

namespace chronexp::opalg {

struct PushforwardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Truncated chronological series of a generator with polynomial coefficients,
// applied to a series: sum over m <= order of the m-fold ordered integrals,
// computed exactly by Picard iteration in `time_var` (base point 0).
PolySeries chronological_series_apply(const OperatorExpr& generator, const PolySeries& f,
                                      int order, const std::string& time_var = "t");

// Exact check of E F(b_1,...,b_n) == F(E b_1,...,E b_n) at truncation `order`,
// where E is the truncated chronological series of the generator. Both sides
// are compared through time-degree `order` in rational arithmetic. Throws
// PushforwardError when F is not polynomial in the b's or the degree budget
// is exhausted.
bool pushforward_check(const OperatorExpr& generator, const expr::Expression& F,
                       const std::vector<PolySeries>& args, int order,
                       const std::string& time_var = "t");

}  // namespace chronexp::opalg
