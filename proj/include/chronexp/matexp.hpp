#pragma once

#include <Eigen/Dense>

namespace chronexp::texp {

// Dense matrix exponential by scaling-and-squaring with Pade approximants,
// order selected from the 1-norm (Higham's ladder: 3/5/7/9/13).
Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& A);

}  // namespace chronexp::texp
