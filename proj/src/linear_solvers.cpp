#include "chronexp/linear_solvers.hpp"

#include "chronexp/quadrature.hpp"

namespace chronexp::texp {

Vector solve_linear_inhomogeneous(const MatrixFunction& L,
                                  const std::function<Vector(double)>& phi, Vector v,
                                  double a, double t, double tol) {
  if (L.dim() != v.size())
    throw std::invalid_argument("solve_linear_inhomogeneous: dimension mismatch");
  if (a == t) return v;
  Propagator prop(L, a, t, tol);
  Vector inner = quad::integrate_adaptive(
      [&](double tau) { return Vector(prop.inverse(tau) * phi(tau)); }, a, t, tol);
  return prop.forward(t) * (v + inner);
}

Vector solve_linear_inhomogeneous(const MatrixFunction& L,
                                  const std::vector<expr::Expression>& phi,
                                  const std::string& time_var, Vector v, double a,
                                  double t, double tol) {
  if (static_cast<int>(phi.size()) != L.dim())
    throw std::invalid_argument("solve_linear_inhomogeneous: source size mismatch");
  auto phi_fn = [&phi, &time_var](double tau) {
    expr::Bindings b{{time_var, tau}};
    Vector out(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = phi[i].eval(b);
    return out;
  };
  return solve_linear_inhomogeneous(L, phi_fn, std::move(v), a, t, tol);
}

Matrix solve_operator_sylvester(const MatrixFunction& a_fn, const MatrixFunction& b_fn,
                                const MatrixFunction& c_fn, const Matrix& K0,
                                double a, double t, double tol) {
  const int n = a_fn.dim();
  if (b_fn.dim() != n || c_fn.dim() != n || K0.rows() != n || K0.cols() != n)
    throw std::invalid_argument("solve_operator_sylvester: dimension mismatch");
  if (a == t) return K0;
  Propagator prop_a(a_fn, a, t, tol);
  Propagator prop_cneg(c_fn, a, t, tol, -1.0);  // Texp{-∫c}; inverse gives T0exp{∫c}
  Matrix inner = quad::integrate_adaptive(
      [&](double tau) {
        return Matrix(prop_a.inverse(tau) * b_fn(tau) * prop_cneg.forward(tau));
      },
      a, t, tol);
  return prop_a.forward(t) * (K0 + inner) * prop_cneg.inverse(t);
}

Matrix parameter_derivative(const MatrixFunction& A, const MatrixFunction& dA_dalpha,
                            double a, double t, double tol) {
  const int n = A.dim();
  if (dA_dalpha.dim() != n)
    throw std::invalid_argument("parameter_derivative: dimension mismatch");
  if (a == t) return Matrix::Zero(n, n);
  Propagator prop(A, a, t, tol);
  Matrix inner = quad::integrate_adaptive(
      [&](double tau) {
        return Matrix(prop.inverse(tau) * dA_dalpha(tau) * prop.forward(tau));
      },
      a, t, tol);
  return prop.forward(t) * inner;
}

Matrix parameter_derivative(const ExprMatrix& family, const std::string& time_var,
                            const std::string& alpha_var, double alpha0, double a,
                            double t, double tol) {
  expr::Bindings params{{alpha_var, alpha0}};
  MatrixFunction A = MatrixFunction::from_expressions(family, time_var, params);
  MatrixFunction dA =
      MatrixFunction::from_expressions(family.partial(alpha_var), time_var, params);
  return parameter_derivative(A, dA, a, t, tol);
}

}  // namespace chronexp::texp
