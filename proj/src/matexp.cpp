#include "chronexp/matexp.hpp"

#include <cmath>

namespace chronexp::texp {

namespace {

using Eigen::MatrixXd;

void pade3(const MatrixXd& A, const MatrixXd& A2, MatrixXd& U, MatrixXd& V) {
  static const double b[] = {120., 60., 12., 1.};
  MatrixXd I = MatrixXd::Identity(A.rows(), A.cols());
  U = A * (b[3] * A2 + b[1] * I);
  V = b[2] * A2 + b[0] * I;
}

void pade5(const MatrixXd& A, const MatrixXd& A2, MatrixXd& U, MatrixXd& V) {
  static const double b[] = {30240., 15120., 3360., 420., 30., 1.};
  MatrixXd I = MatrixXd::Identity(A.rows(), A.cols());
  MatrixXd A4 = A2 * A2;
  U = A * (b[5] * A4 + b[3] * A2 + b[1] * I);
  V = b[4] * A4 + b[2] * A2 + b[0] * I;
}

void pade7(const MatrixXd& A, const MatrixXd& A2, MatrixXd& U, MatrixXd& V) {
  static const double b[] = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
  MatrixXd I = MatrixXd::Identity(A.rows(), A.cols());
  MatrixXd A4 = A2 * A2;
  MatrixXd A6 = A4 * A2;
  U = A * (b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  V = b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

void pade9(const MatrixXd& A, const MatrixXd& A2, MatrixXd& U, MatrixXd& V) {
  static const double b[] = {17643225600., 8821612800., 2075673600., 302702400.,
                             30270240.,    2162160.,    110880.,     3960.,
                             90.,          1.};
  MatrixXd I = MatrixXd::Identity(A.rows(), A.cols());
  MatrixXd A4 = A2 * A2;
  MatrixXd A6 = A4 * A2;
  MatrixXd A8 = A6 * A2;
  U = A * (b[9] * A8 + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  V = b[8] * A8 + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

void pade13(const MatrixXd& A, const MatrixXd& A2, MatrixXd& U, MatrixXd& V) {
  static const double b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                             1187353796428800.,  129060195264000.,   10559470521600.,
                             670442572800.,      33522128640.,       1323241920.,
                             40840800.,          960960.,            16380.,
                             182.,               1.};
  MatrixXd I = MatrixXd::Identity(A.rows(), A.cols());
  MatrixXd A4 = A2 * A2;
  MatrixXd A6 = A4 * A2;
  U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 +
           b[3] * A2 + b[1] * I);
  V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 +
      b[2] * A2 + b[0] * I;
}

}  // namespace

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& A) {
  const double theta3 = 1.495585217958292e-2;
  const double theta5 = 2.539398330063230e-1;
  const double theta7 = 9.504178996162932e-1;
  const double theta9 = 2.097847961257068;
  const double theta13 = 5.371920351148152;

  const double nrm = A.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  MatrixXd U, V;
  int squarings = 0;
  if (nrm <= theta9) {
    MatrixXd A2 = A * A;
    if (nrm <= theta3) pade3(A, A2, U, V);
    else if (nrm <= theta5) pade5(A, A2, U, V);
    else if (nrm <= theta7) pade7(A, A2, U, V);
    else pade9(A, A2, U, V);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / theta13))));
    MatrixXd As = A / std::ldexp(1.0, squarings);
    MatrixXd A2 = As * As;
    pade13(As, A2, U, V);
  }
  MatrixXd R = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < squarings; ++i) R = R * R;
  return R;
}

}  // namespace chronexp::texp
