#include "chronexp/grid_function.hpp"

#include <cmath>
#include <stdexcept>

namespace chronexp::opalg {

GridFunction::GridFunction(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 2)
    throw std::invalid_argument("GridFunction: one or two axes supported");
  int total = 1;
  for (const auto& ax : axes_) {
    if (ax.n < 5) throw std::invalid_argument("GridFunction: need at least 5 nodes per axis");
    if (!(ax.hi > ax.lo)) throw std::invalid_argument("GridFunction: axis range empty");
    total *= ax.n;
  }
  values_.assign(total, 0.0);
  valid_.assign(total, 1);
}

int GridFunction::index(int i, int j) const {
  return axes_.size() == 1 ? i : i * axes_[1].n + j;
}

void GridFunction::unravel(int flat, int& i, int& j) const {
  if (axes_.size() == 1) {
    i = flat;
    j = 0;
  } else {
    i = flat / axes_[1].n;
    j = flat % axes_[1].n;
  }
}

expr::Bindings GridFunction::node_bindings(int flat) const {
  int i, j;
  unravel(flat, i, j);
  expr::Bindings b{{axes_[0].var, axes_[0].coord(i)}};
  if (axes_.size() == 2) b[axes_[1].var] = axes_[1].coord(j);
  return b;
}

GridFunction GridFunction::sample(std::vector<Axis> axes, const expr::Expression& f,
                                  const expr::Bindings& params) {
  return sample(std::move(axes), [&](const expr::Bindings& node) {
    expr::Bindings b = params;
    for (const auto& [k, v] : node) b[k] = v;
    return f.eval(b);
  });
}

GridFunction GridFunction::sample(std::vector<Axis> axes,
                                  const std::function<double(const expr::Bindings&)>& f) {
  GridFunction g(std::move(axes));
  for (int flat = 0; flat < g.size(); ++flat) g.values_[flat] = f(g.node_bindings(flat));
  return g;
}

GridFunction GridFunction::derivative(const std::string& var) const {
  int axis = -1;
  for (std::size_t k = 0; k < axes_.size(); ++k)
    if (axes_[k].var == var) axis = static_cast<int>(k);
  if (axis < 0) {
    // derivative along a variable the grid does not carry: identically zero
    GridFunction g(axes_);
    g.valid_ = valid_;
    return g;
  }
  GridFunction g(axes_);
  const double h = axes_[axis].h();
  const int stride = (axes_.size() == 2 && axis == 0) ? axes_[1].n : 1;
  const int extent = axes_[axis].n;

  for (int flat = 0; flat < size(); ++flat) {
    int i, j;
    unravel(flat, i, j);
    int pos = axis == 0 ? i : j;
    bool interior = pos >= 2 && pos <= extent - 3;
    bool ok = interior && valid_[flat];
    if (ok)
      for (int s = -2; s <= 2; ++s)
        if (!valid_[flat + s * stride]) ok = false;
    if (!ok) {
      g.valid_[flat] = 0;
      continue;
    }
    g.values_[flat] = (-values_[flat + 2 * stride] + 8 * values_[flat + stride] -
                       8 * values_[flat - stride] + values_[flat - 2 * stride]) /
                      (12 * h);
  }
  return g;
}

GridFunction GridFunction::multiply_pointwise(const expr::Expression& f,
                                              const expr::Bindings& params) const {
  GridFunction g(axes_);
  g.valid_ = valid_;
  for (int flat = 0; flat < size(); ++flat) {
    if (!g.valid_[flat]) continue;
    expr::Bindings b = params;
    for (const auto& [k, v] : node_bindings(flat)) b[k] = v;
    expr::EvalError err;
    auto value = f.try_eval(b, &err);
    if (!value)
      g.valid_[flat] = 0;
    else
      g.values_[flat] = values_[flat] * *value;
  }
  return g;
}

bool GridFunction::compatible(const GridFunction& o) const {
  if (axes_.size() != o.axes_.size()) return false;
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const auto& a = axes_[k];
    const auto& b = o.axes_[k];
    if (a.var != b.var || a.lo != b.lo || a.hi != b.hi || a.n != b.n) return false;
  }
  return true;
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
  if (!compatible(o)) throw std::invalid_argument("GridFunction: grid mismatch");
  GridFunction g(axes_);
  for (int flat = 0; flat < size(); ++flat) {
    g.valid_[flat] = valid_[flat] && o.valid_[flat];
    g.values_[flat] = values_[flat] + o.values_[flat];
  }
  return g;
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
  return *this + o.scaled(-1.0);
}

GridFunction GridFunction::scaled(double s) const {
  GridFunction g(axes_);
  g.valid_ = valid_;
  for (int flat = 0; flat < size(); ++flat) g.values_[flat] = s * values_[flat];
  return g;
}

double GridFunction::max_abs_valid() const {
  double m = 0;
  for (int flat = 0; flat < size(); ++flat)
    if (valid_[flat]) m = std::max(m, std::fabs(values_[flat]));
  return m;
}

int GridFunction::valid_count() const {
  int c = 0;
  for (auto v : valid_) c += v;
  return c;
}

}  // namespace chronexp::opalg
