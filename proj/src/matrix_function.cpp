#include "chronexp/matrix_function.hpp"

#include <stdexcept>

namespace chronexp::texp {

ExprMatrix::ExprMatrix(std::vector<std::vector<expr::Expression>> entries)
    : entries_(std::move(entries)) {
  for (const auto& row : entries_)
    if (row.size() != entries_[0].size())
      throw std::invalid_argument("ExprMatrix: ragged rows");
}

ExprMatrix ExprMatrix::parse(const std::vector<std::vector<std::string>>& entries) {
  std::vector<std::vector<expr::Expression>> rows;
  rows.reserve(entries.size());
  for (const auto& row : entries) {
    std::vector<expr::Expression> r;
    r.reserve(row.size());
    for (const auto& s : row) r.push_back(expr::Expression::parse(s));
    rows.push_back(std::move(r));
  }
  return ExprMatrix(std::move(rows));
}

ExprMatrix ExprMatrix::constant(const Matrix& m) {
  std::vector<std::vector<expr::Expression>> rows(m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      rows[i].push_back(expr::Expression::constant(m(i, j)));
  return ExprMatrix(std::move(rows));
}

Matrix ExprMatrix::eval(const expr::Bindings& b) const {
  Matrix out(rows(), cols());
  for (int i = 0; i < rows(); ++i)
    for (int j = 0; j < cols(); ++j) out(i, j) = entries_[i][j].eval(b);
  return out;
}

ExprMatrix ExprMatrix::partial(const std::string& var) const {
  std::vector<std::vector<expr::Expression>> rows(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i)
    for (const auto& e : entries_[i]) rows[i].push_back(e.derivative(var));
  return ExprMatrix(std::move(rows));
}

MatrixFunction MatrixFunction::constant(Matrix m) {
  MatrixFunction f;
  f.dim_ = static_cast<int>(m.rows());
  f.eval_ = [m = std::move(m)](double) { return m; };
  return f;
}

MatrixFunction MatrixFunction::from_callable(int dim, std::function<Matrix(double)> fn) {
  MatrixFunction f;
  f.dim_ = dim;
  f.eval_ = std::move(fn);
  return f;
}

MatrixFunction MatrixFunction::from_expressions(ExprMatrix entries, std::string time_var,
                                                expr::Bindings params) {
  if (entries.rows() != entries.cols())
    throw std::invalid_argument("MatrixFunction: generator must be square");
  MatrixFunction f;
  f.dim_ = entries.rows();
  auto backing = std::make_shared<const ExprBacking>(
      ExprBacking{std::move(entries), std::move(time_var), std::move(params)});
  f.expr_ = backing;
  f.eval_ = [backing](double t) {
    expr::Bindings b = backing->params;
    b[backing->time_var] = t;
    return backing->entries.eval(b);
  };
  return f;
}

MatrixFunction MatrixFunction::piecewise_constant(std::vector<double> breaks,
                                                  std::vector<Matrix> segments) {
  if (breaks.size() != segments.size() + 1 || segments.empty())
    throw std::invalid_argument("piecewise_constant: breaks must bracket segments");
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    if (!(breaks[i] < breaks[i + 1]))
      throw std::invalid_argument("piecewise_constant: breakpoints must increase");
  MatrixFunction f;
  f.dim_ = static_cast<int>(segments[0].rows());
  f.breakpoints_.assign(breaks.begin() + 1, breaks.end() - 1);
  f.eval_ = [breaks = std::move(breaks), segments = std::move(segments)](double t) {
    std::size_t lo = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
      if (t >= breaks[i]) lo = i;
    return segments[lo];
  };
  return f;
}

MatrixFunction MatrixFunction::partial(const std::string& var) const {
  if (!expr_) throw std::logic_error("MatrixFunction::partial: not expression-backed");
  return from_expressions(expr_->entries.partial(var), expr_->time_var, expr_->params);
}

MatrixFunction MatrixFunction::scaled(double s) const {
  MatrixFunction f;
  f.dim_ = dim_;
  f.breakpoints_ = breakpoints_;
  f.eval_ = [inner = eval_, s](double t) { return Matrix(s * inner(t)); };
  return f;
}

MatrixFunction operator+(const MatrixFunction& a, const MatrixFunction& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("MatrixFunction: dimension mismatch");
  MatrixFunction f;
  f.dim_ = a.dim_;
  f.breakpoints_ = a.breakpoints_;
  f.breakpoints_.insert(f.breakpoints_.end(), b.breakpoints_.begin(), b.breakpoints_.end());
  std::sort(f.breakpoints_.begin(), f.breakpoints_.end());
  f.eval_ = [fa = a.eval_, fb = b.eval_](double t) { return Matrix(fa(t) + fb(t)); };
  return f;
}

}  // namespace chronexp::texp
