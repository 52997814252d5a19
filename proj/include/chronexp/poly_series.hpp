#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chronexp/expr.hpp"

namespace chronexp::opalg {

using Rational = boost::multiprecision::cpp_rational;

// Truncated multivariate power series with exact rational coefficients.
// All arithmetic truncates consistently at the total-degree cap; any
// operation that actually drops a term sets the sticky `lossy` flag, which
// exactness-critical checks turn into a hard error.
class PolySeries {
 public:
  PolySeries() = default;
  PolySeries(std::vector<std::string> vars, int max_degree);

  static PolySeries constant(std::vector<std::string> vars, int max_degree, Rational v);
  static PolySeries variable(std::vector<std::string> vars, int max_degree,
                             const std::string& name);
  // Conversion from a polynomial expression tree (+, -, *, integer powers,
  // division by constants). Returns nullopt for non-polynomial input.
  static std::optional<PolySeries> from_expression(const expr::Expression& e,
                                                   std::vector<std::string> vars,
                                                   int max_degree);

  const std::vector<std::string>& variables() const { return vars_; }
  int max_degree() const { return max_degree_; }
  bool lossy() const { return lossy_; }
  bool is_zero() const { return coeffs_.empty(); }
  int term_count() const { return static_cast<int>(coeffs_.size()); }

  PolySeries operator+(const PolySeries& o) const;
  PolySeries operator-(const PolySeries& o) const;
  PolySeries operator*(const PolySeries& o) const;
  PolySeries operator-() const;
  PolySeries scaled(const Rational& s) const;
  PolySeries pow(int k) const;

  PolySeries derivative(const std::string& var) const;
  // Antiderivative vanishing at 0 in `var`; terms pushed past the cap mark
  // the result lossy.
  PolySeries antiderivative(const std::string& var) const;

  // Substitute `var` by a series over the same variable list.
  PolySeries substitute(const std::string& var, const PolySeries& value) const;

  // Drop all terms whose degree in `var` exceeds dmax (an intentional
  // restriction, does not mark the result lossy).
  PolySeries restrict_var_degree(const std::string& var, int dmax) const;

  Rational coefficient(const std::vector<int>& exponents) const;
  double eval(const expr::Bindings& point) const;

  bool operator==(const PolySeries& o) const;

  std::string str() const;

 private:
  int var_index(const std::string& name) const;
  void add_term(const std::vector<int>& expo, const Rational& c);

  std::vector<std::string> vars_;
  int max_degree_ = 0;
  bool lossy_ = false;
  std::map<std::vector<int>, Rational> coeffs_;
};

// Evaluates a polynomial expression whose leaves are series (variables name
// the entries of `args`). Returns nullopt when the expression tree uses a
// non-polynomial construct.
std::optional<PolySeries> compose_polynomial(
    const expr::Expression& f, const std::vector<std::string>& arg_names,
    const std::vector<PolySeries>& args);

}  // namespace chronexp::opalg
