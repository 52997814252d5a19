#pragma once

#include <functional>

#include "chronexp/ordered_exp.hpp"

namespace chronexp::texp {

// Solution of u' = L(t)u + phi(t), u(a) = v, as the ordered exponential acting
// on v plus the ordered-exponential-weighted integral of the source.
Vector solve_linear_inhomogeneous(const MatrixFunction& L,
                                  const std::function<Vector(double)>& phi, Vector v,
                                  double a, double t, double tol = 1e-10);

// Expression-vector convenience: phi entries are expressions in `time_var`.
Vector solve_linear_inhomogeneous(const MatrixFunction& L,
                                  const std::vector<expr::Expression>& phi,
                                  const std::string& time_var, Vector v, double a,
                                  double t, double tol = 1e-10);

// Solution of the Sylvester-type operator ODE K' = a(t)K + K c(t) + b(t) with
// K(interval start) = K0, in ordered-exponential form.
Matrix solve_operator_sylvester(const MatrixFunction& a_fn, const MatrixFunction& b_fn,
                                const MatrixFunction& c_fn, const Matrix& K0,
                                double a, double t, double tol = 1e-10);

// d/dalpha of the forward ordered exponential of a generator family A(t,alpha),
// evaluated from the family and its alpha-partial at the expansion point.
Matrix parameter_derivative(const MatrixFunction& A, const MatrixFunction& dA_dalpha,
                            double a, double t, double tol = 1e-10);

// Expression-family convenience: entries in (time_var, alpha_var); the partial
// is taken symbolically and both are bound at alpha0.
Matrix parameter_derivative(const ExprMatrix& family, const std::string& time_var,
                            const std::string& alpha_var, double alpha0, double a,
                            double t, double tol = 1e-10);

}  // namespace chronexp::texp
