#include "chronexp/dyson.hpp"

#include "chronexp/quadrature.hpp"

namespace chronexp::texp {

namespace {

// m-fold nested ordered integral over a <= tau_m <= ... <= tau_1 <= u.
Matrix nested_term(const MatrixFunction& L, double a, double u, int m, int points,
                   Direction dir) {
  const int dim = L.dim();
  if (m == 0) return Matrix::Identity(dim, dim);
  const auto& rule = quad::gauss_legendre(points);
  const double mid = 0.5 * (a + u), half = 0.5 * (u - a);
  Matrix acc = Matrix::Zero(dim, dim);
  for (int i = 0; i < points; ++i) {
    const double tau = mid + half * rule.nodes[i];
    const double w = half * rule.weights[i];
    Matrix inner = nested_term(L, a, tau, m - 1, points, dir);
    if (dir == Direction::T)
      acc += w * (L(tau) * inner);
    else
      acc += w * (inner * L(tau));
  }
  return acc;
}

}  // namespace

Matrix dyson_partial_sum(const MatrixFunction& L, double a, double t, int order,
                         int points, Direction dir) {
  if (order < 0) throw std::invalid_argument("dyson_partial_sum: order must be >= 0");
  if (points < 1) throw std::invalid_argument("dyson_partial_sum: invalid quadrature budget");
  const int dim = L.dim();
  Matrix sum = Matrix::Identity(dim, dim);
  for (int m = 1; m <= order; ++m) sum += nested_term(L, a, t, m, points, dir);
  return sum;
}

}  // namespace chronexp::texp
