#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "chronexp/expr.hpp"

namespace chronexp::texp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Matrix of scalar expressions in a set of named variables. Backs
// MatrixFunction (one variable bound to time) and the two-variable operator
// fields of the PDE-system solver.
class ExprMatrix {
 public:
  ExprMatrix() = default;
  ExprMatrix(std::vector<std::vector<expr::Expression>> entries);
  static ExprMatrix parse(const std::vector<std::vector<std::string>>& entries);
  static ExprMatrix constant(const Matrix& m);

  int rows() const { return static_cast<int>(entries_.size()); }
  int cols() const { return rows() ? static_cast<int>(entries_[0].size()) : 0; }

  Matrix eval(const expr::Bindings& b) const;
  ExprMatrix partial(const std::string& var) const;  // entrywise symbolic

  const expr::Expression& at(int i, int j) const { return entries_[i][j]; }

 private:
  std::vector<std::vector<expr::Expression>> entries_;
};

// A time-to-matrix evaluator. Expression-backed and piecewise-constant
// constructions cover the CLI surface; arbitrary callables cover generators
// derived inside identity checks.
class MatrixFunction {
 public:
  MatrixFunction() = default;

  static MatrixFunction constant(Matrix m);
  static MatrixFunction from_callable(int dim, std::function<Matrix(double)> f);
  static MatrixFunction from_expressions(ExprMatrix entries, std::string time_var = "t",
                                         expr::Bindings params = {});
  // segments[i] applies on [breaks[i], breaks[i+1]); breaks.size() == segments.size()+1
  static MatrixFunction piecewise_constant(std::vector<double> breaks,
                                           std::vector<Matrix> segments);

  int dim() const { return dim_; }
  Matrix operator()(double t) const { return eval_(t); }

  bool expression_backed() const { return expr_ != nullptr; }
  // Entrywise symbolic partial derivative; expression-backed functions only.
  MatrixFunction partial(const std::string& var) const;

  // Interior discontinuities the ordered-exponential stepper must not
  // straddle. Empty for smooth generators.
  const std::vector<double>& interior_breakpoints() const { return breakpoints_; }

  MatrixFunction scaled(double s) const;
  friend MatrixFunction operator+(const MatrixFunction& a, const MatrixFunction& b);

 private:
  int dim_ = 0;
  std::function<Matrix(double)> eval_;
  std::vector<double> breakpoints_;
  struct ExprBacking {
    ExprMatrix entries;
    std::string time_var;
    expr::Bindings params;
  };
  std::shared_ptr<const ExprBacking> expr_;
};

}  // namespace chronexp::texp
