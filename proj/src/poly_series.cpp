#include "chronexp/poly_series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace chronexp::opalg {

namespace {
int total_degree(const std::vector<int>& expo) {
  return std::accumulate(expo.begin(), expo.end(), 0);
}
}  // namespace

PolySeries::PolySeries(std::vector<std::string> vars, int max_degree)
    : vars_(std::move(vars)), max_degree_(max_degree) {
  if (max_degree_ < 0) throw std::invalid_argument("PolySeries: negative degree cap");
}

PolySeries PolySeries::constant(std::vector<std::string> vars, int max_degree, Rational v) {
  PolySeries p(std::move(vars), max_degree);
  if (v != 0) p.coeffs_.emplace(std::vector<int>(p.vars_.size(), 0), std::move(v));
  return p;
}

PolySeries PolySeries::variable(std::vector<std::string> vars, int max_degree,
                                const std::string& name) {
  PolySeries p(std::move(vars), max_degree);
  std::vector<int> expo(p.vars_.size(), 0);
  expo[p.var_index(name)] = 1;
  if (max_degree < 1) throw std::invalid_argument("PolySeries: cap below variable degree");
  p.coeffs_.emplace(std::move(expo), Rational(1));
  return p;
}

int PolySeries::var_index(const std::string& name) const {
  auto it = std::find(vars_.begin(), vars_.end(), name);
  if (it == vars_.end())
    throw std::invalid_argument("PolySeries: unknown variable '" + name + "'");
  return static_cast<int>(it - vars_.begin());
}

void PolySeries::add_term(const std::vector<int>& expo, const Rational& c) {
  if (c == 0) return;
  if (total_degree(expo) > max_degree_) {
    lossy_ = true;
    return;
  }
  auto [it, inserted] = coeffs_.emplace(expo, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) coeffs_.erase(it);
  }
}

PolySeries PolySeries::operator+(const PolySeries& o) const {
  if (vars_ != o.vars_) throw std::invalid_argument("PolySeries: variable set mismatch");
  PolySeries r(vars_, std::min(max_degree_, o.max_degree_));
  r.lossy_ = lossy_ || o.lossy_;
  for (const auto& [e, c] : coeffs_) r.add_term(e, c);
  for (const auto& [e, c] : o.coeffs_) r.add_term(e, c);
  return r;
}

PolySeries PolySeries::operator-(const PolySeries& o) const { return *this + (-o); }

PolySeries PolySeries::operator-() const {
  PolySeries r(vars_, max_degree_);
  r.lossy_ = lossy_;
  for (const auto& [e, c] : coeffs_) r.coeffs_.emplace(e, -c);
  return r;
}

PolySeries PolySeries::scaled(const Rational& s) const {
  PolySeries r(vars_, max_degree_);
  r.lossy_ = lossy_;
  if (s == 0) return r;
  for (const auto& [e, c] : coeffs_) r.coeffs_.emplace(e, c * s);
  return r;
}

PolySeries PolySeries::operator*(const PolySeries& o) const {
  if (vars_ != o.vars_) throw std::invalid_argument("PolySeries: variable set mismatch");
  PolySeries r(vars_, std::min(max_degree_, o.max_degree_));
  r.lossy_ = lossy_ || o.lossy_;
  std::vector<int> expo(vars_.size());
  for (const auto& [ea, ca] : coeffs_)
    for (const auto& [eb, cb] : o.coeffs_) {
      for (std::size_t i = 0; i < vars_.size(); ++i) expo[i] = ea[i] + eb[i];
      r.add_term(expo, ca * cb);
    }
  return r;
}

PolySeries PolySeries::pow(int k) const {
  if (k < 0) throw std::invalid_argument("PolySeries: negative power");
  PolySeries r = constant(vars_, max_degree_, 1);
  for (int i = 0; i < k; ++i) r = r * (*this);
  return r;
}

PolySeries PolySeries::derivative(const std::string& var) const {
  const int vi = var_index(var);
  PolySeries r(vars_, max_degree_);
  r.lossy_ = lossy_;
  for (const auto& [e, c] : coeffs_) {
    if (e[vi] == 0) continue;
    std::vector<int> expo = e;
    expo[vi] -= 1;
    r.coeffs_.emplace(std::move(expo), c * e[vi]);
  }
  return r;
}

PolySeries PolySeries::antiderivative(const std::string& var) const {
  const int vi = var_index(var);
  PolySeries r(vars_, max_degree_);
  r.lossy_ = lossy_;
  for (const auto& [e, c] : coeffs_) {
    std::vector<int> expo = e;
    expo[vi] += 1;
    r.add_term(expo, c / expo[vi]);
  }
  return r;
}

PolySeries PolySeries::substitute(const std::string& var, const PolySeries& value) const {
  if (value.vars_ != vars_)
    throw std::invalid_argument("PolySeries: substitute value over different variables");
  const int vi = var_index(var);
  int pmax = 0;
  for (const auto& [e, c] : coeffs_) pmax = std::max(pmax, e[vi]);
  std::vector<PolySeries> powers;
  powers.push_back(constant(vars_, max_degree_, 1));
  for (int p = 1; p <= pmax; ++p) powers.push_back(powers.back() * value);

  PolySeries r(vars_, max_degree_);
  r.lossy_ = lossy_;
  for (const auto& [e, c] : coeffs_) {
    std::vector<int> rest = e;
    int p = rest[vi];
    rest[vi] = 0;
    PolySeries mono(vars_, max_degree_);
    mono.coeffs_.emplace(rest, c);
    r = r + mono * powers[p];
  }
  return r;
}

PolySeries PolySeries::restrict_var_degree(const std::string& var, int dmax) const {
  const int vi = var_index(var);
  PolySeries r(vars_, max_degree_);
  r.lossy_ = lossy_;
  for (const auto& [e, c] : coeffs_)
    if (e[vi] <= dmax) r.coeffs_.emplace(e, c);
  return r;
}

Rational PolySeries::coefficient(const std::vector<int>& exponents) const {
  auto it = coeffs_.find(exponents);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

double PolySeries::eval(const expr::Bindings& point) const {
  double acc = 0;
  for (const auto& [e, c] : coeffs_) {
    double term = static_cast<double>(c);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (e[i] == 0) continue;
      auto it = point.find(vars_[i]);
      if (it == point.end())
        throw std::invalid_argument("PolySeries::eval: unbound variable " + vars_[i]);
      term *= std::pow(it->second, e[i]);
    }
    acc += term;
  }
  return acc;
}

bool PolySeries::operator==(const PolySeries& o) const {
  return vars_ == o.vars_ && coeffs_ == o.coeffs_;
}

std::string PolySeries::str() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : coeffs_) {
    if (!first) os << " + ";
    first = false;
    os << c.str();
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (e[i] == 0) continue;
      os << "*" << vars_[i];
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

using expr::Expression;
using Kind = Expression::Kind;

std::optional<PolySeries> convert(const Expression::NodeRef& n,
                                  const std::vector<std::string>& arg_names,
                                  const std::vector<PolySeries>& args,
                                  const std::vector<std::string>& vars, int max_degree) {
  switch (n->kind) {
    case Kind::Constant:
      return PolySeries::constant(vars, max_degree, Rational(n->value));
    case Kind::Variable: {
      auto it = std::find(arg_names.begin(), arg_names.end(), n->name);
      if (it == arg_names.end()) return std::nullopt;
      return args[it - arg_names.begin()];
    }
    case Kind::Negate: {
      auto a = convert(n->args[0], arg_names, args, vars, max_degree);
      if (!a) return std::nullopt;
      return -*a;
    }
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      auto a = convert(n->args[0], arg_names, args, vars, max_degree);
      auto b = convert(n->args[1], arg_names, args, vars, max_degree);
      if (!a || !b) return std::nullopt;
      if (n->kind == Kind::Add) return *a + *b;
      if (n->kind == Kind::Sub) return *a - *b;
      if (n->kind == Kind::Mul) return *a * *b;
      // division only by a nonzero constant
      if (n->args[1]->kind != Kind::Constant || n->args[1]->value == 0) return std::nullopt;
      return a->scaled(Rational(1) / Rational(n->args[1]->value));
    }
    case Kind::Pow: {
      if (n->args[1]->kind != Kind::Constant) return std::nullopt;
      double p = n->args[1]->value;
      if (p < 0 || p != std::floor(p)) return std::nullopt;
      auto a = convert(n->args[0], arg_names, args, vars, max_degree);
      if (!a) return std::nullopt;
      return a->pow(static_cast<int>(p));
    }
    case Kind::Call:
      return std::nullopt;  // transcendental
  }
  return std::nullopt;
}

}  // namespace

std::optional<PolySeries> PolySeries::from_expression(const expr::Expression& e,
                                                      std::vector<std::string> vars,
                                                      int max_degree) {
  std::vector<PolySeries> args;
  args.reserve(vars.size());
  for (const auto& v : vars) args.push_back(PolySeries::variable(vars, max_degree, v));
  return convert(e.root(), vars, args, vars, max_degree);
}

std::optional<PolySeries> compose_polynomial(const expr::Expression& f,
                                             const std::vector<std::string>& arg_names,
                                             const std::vector<PolySeries>& args) {
  if (args.empty()) return std::nullopt;
  return convert(f.root(), arg_names, args, args[0].variables(), args[0].max_degree());
}

}  // namespace chronexp::opalg
