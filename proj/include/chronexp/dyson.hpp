#pragma once

#include "chronexp/matrix_function.hpp"
#include "chronexp/ordered_exp.hpp"

namespace chronexp::texp {

// Truncated Dyson sum: identity plus the first `order` nested ordered
// integrals of generator products, each evaluated by nested Gauss-Legendre
// with the simplex mapping. Direction T stacks later times leftmost; T0
// reverses the factors.
Matrix dyson_partial_sum(const MatrixFunction& L, double a, double t, int order,
                         int points, Direction dir = Direction::T);

}  // namespace chronexp::texp
