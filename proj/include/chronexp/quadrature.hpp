#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace chronexp::quad {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre nodes/weights by Newton iteration on the Legendre recurrence.
// Rules are cached per point count.
const GaussRule& gauss_legendre(int n);

namespace detail {
inline double norm_of(double v) { return std::fabs(v); }
inline double norm_of(const Eigen::VectorXd& v) { return v.norm(); }
inline double norm_of(const Eigen::MatrixXd& m) { return m.norm(); }
}  // namespace detail

// Single-panel Gauss quadrature of f over [a, b].
template <class F>
auto integrate_gauss(F&& f, double a, double b, int points) {
  const GaussRule& rule = gauss_legendre(points);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  using T = std::decay_t<decltype(f(a))>;
  T acc = f(mid + half * rule.nodes[0]) * (half * rule.weights[0]);
  for (int i = 1; i < points; ++i)
    acc += f(mid + half * rule.nodes[i]) * (half * rule.weights[i]);
  return acc;
}

// Composite Gauss with panel doubling until the change drops below tol
// (relative to max(1, |result|)). Throws on budget exhaustion.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, double tol, int points = 8,
                        int max_doublings = 14, int* panels_used = nullptr) {
  using T = std::decay_t<decltype(f(a))>;
  if (a == b) {
    T probe = f(a);
    if (panels_used) *panels_used = 0;
    return T(probe * 0.0);
  }
  int panels = 1;
  auto composite = [&](int p) {
    const double h = (b - a) / p;
    T acc = integrate_gauss(f, a, a + h, points);
    for (int i = 1; i < p; ++i)
      acc += integrate_gauss(f, a + i * h, a + (i + 1) * h, points);
    return acc;
  };
  T prev = composite(panels);
  for (int it = 0; it < max_doublings; ++it) {
    panels *= 2;
    T cur = composite(panels);
    double scale = std::max(1.0, detail::norm_of(cur));
    if (detail::norm_of(T(cur - prev)) <= tol * scale) {
      if (panels_used) *panels_used = panels;
      return cur;
    }
    prev = cur;
  }
  throw std::runtime_error("integrate_adaptive: panel budget exhausted");
}

}  // namespace chronexp::quad
