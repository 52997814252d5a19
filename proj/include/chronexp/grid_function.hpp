#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chronexp/expr.hpp"

namespace chronexp::opalg {

// Sampled function on a uniform grid (one or two axes). Differentiation uses
// 4th-order central stencils in the interior; nodes too close to the border
// (or to previously invalidated nodes) are flagged invalid and excluded from
// norms and comparisons.
class GridFunction {
 public:
  struct Axis {
    std::string var;
    double lo, hi;
    int n;  // node count, >= 5
    double h() const { return (hi - lo) / (n - 1); }
    double coord(int i) const { return lo + i * h(); }
  };

  explicit GridFunction(std::vector<Axis> axes);

  static GridFunction sample(std::vector<Axis> axes, const expr::Expression& f,
                             const expr::Bindings& params = {});
  static GridFunction sample(std::vector<Axis> axes,
                             const std::function<double(const expr::Bindings&)>& f);

  int axis_count() const { return static_cast<int>(axes_.size()); }
  const std::vector<Axis>& axes() const { return axes_; }
  int size() const { return static_cast<int>(values_.size()); }

  double& at(int flat) { return values_[flat]; }
  double at(int flat) const { return values_[flat]; }
  bool valid(int flat) const { return valid_[flat] != 0; }
  void invalidate(int flat) { valid_[flat] = 0; }

  expr::Bindings node_bindings(int flat) const;  // axis var -> coordinate

  GridFunction derivative(const std::string& var) const;
  GridFunction multiply_pointwise(const expr::Expression& f,
                                  const expr::Bindings& params = {}) const;

  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator-(const GridFunction& o) const;
  GridFunction scaled(double s) const;

  // max |.| over nodes valid in both (for operator-); over own valid nodes
  double max_abs_valid() const;
  int valid_count() const;

 private:
  int index(int i, int j = 0) const;
  void unravel(int flat, int& i, int& j) const;
  bool compatible(const GridFunction& o) const;

  std::vector<Axis> axes_;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

}  // namespace chronexp::opalg
