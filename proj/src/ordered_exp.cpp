#include "chronexp/ordered_exp.hpp"

#include <algorithm>
#include <cmath>

#include "chronexp/dyson.hpp"
#include "chronexp/matexp.hpp"

namespace chronexp::texp {

namespace {

double rel_norm(const Matrix& diff, const Matrix& ref) {
  return diff.norm() / std::max(1.0, ref.norm());
}

// Midpoint product sweep over [lo, hi] with n uniform steps. When `record`
// is non-null it receives the running product at every node (n+1 entries,
// starting from the inherited `init`).
Matrix sweep(const MatrixFunction& g, double sign, double lo, double hi, int n,
             Direction dir, const Matrix& init, std::vector<Matrix>* record) {
  const double h = (hi - lo) / n;
  Matrix p = init;
  if (record) {
    record->clear();
    record->reserve(n + 1);
    record->push_back(p);
  }
  for (int k = 0; k < n; ++k) {
    const double tm = lo + (k + 0.5) * h;
    Matrix step = matrix_exp(Matrix(sign * h * g(tm)));
    if (dir == Direction::T)
      p = step * p;
    else
      p = p * step;
    if (record) record->push_back(p);
  }
  return p;
}

std::vector<double> cut_points(const MatrixFunction& g, double lo, double hi) {
  std::vector<double> cuts{lo};
  for (double b : g.interior_breakpoints())
    if (b > lo && b < hi) cuts.push_back(b);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

// Product over [lo, hi] split at generator breakpoints, n total steps.
Matrix product_endpoint(const MatrixFunction& g, double sign, double lo, double hi,
                        int n, Direction dir) {
  const std::vector<double> cuts = cut_points(g, lo, hi);
  Matrix p = Matrix::Identity(g.dim(), g.dim());
  const double total = hi - lo;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    int ni = std::max(1, static_cast<int>(std::lround(n * (cuts[i + 1] - cuts[i]) / total)));
    p = sweep(g, sign, cuts[i], cuts[i + 1], ni, dir, p, nullptr);
  }
  return p;
}

}  // namespace

OrderedExpResult ordered_exp(const OrderedExpTask& task) {
  const int dim = task.generator.dim();
  OrderedExpResult res;
  res.value = Matrix::Identity(dim, dim);
  if (task.a == task.t) return res;

  // t < a: reverse the interval, flip the ordering and the sign.
  if (task.t < task.a) {
    OrderedExpTask rev = task;
    rev.a = task.t;
    rev.t = task.a;
    rev.sign = -task.sign;
    rev.direction = task.direction == Direction::T ? Direction::T0 : Direction::T;
    return ordered_exp(rev);
  }

  if (task.method == MethodKind::Dyson) {
    res.value = dyson_partial_sum(task.generator.scaled(task.sign), task.a, task.t,
                                  task.dyson_order, task.dyson_points, task.direction);
    return res;
  }

  int n = std::max(2, task.control.initial_steps);
  Matrix plain_prev = product_endpoint(task.generator, task.sign, task.a, task.t, n,
                                       task.direction);
  Matrix extrap_prev;
  bool have_extrap = false;
  for (int level = 1; level <= task.control.max_levels; ++level) {
    n *= 2;
    Matrix plain = product_endpoint(task.generator, task.sign, task.a, task.t, n,
                                    task.direction);
    if (task.control.richardson) {
      Matrix extrap = plain + (plain - plain_prev) / 3.0;
      if (have_extrap) {
        double disc = rel_norm(extrap - extrap_prev, extrap);
        if (disc <= task.tolerance) {
          res.value = extrap;
          res.steps = n;
          res.levels = level;
          res.discrepancy = disc;
          return res;
        }
      }
      extrap_prev = extrap;
      have_extrap = true;
    } else {
      double disc = rel_norm(plain - plain_prev, plain);
      if (disc <= task.tolerance) {
        res.value = plain;
        res.steps = n;
        res.levels = level;
        res.discrepancy = disc;
        return res;
      }
    }
    plain_prev = plain;
    if (!plain.allFinite())
      throw ConvergenceError("ordered_exp: non-finite product (generator sample?)");
  }
  throw ConvergenceError("ordered_exp: refinement budget exhausted before tolerance");
}

Matrix ordered_exp_value(const MatrixFunction& L, double a, double t, Direction dir,
                         double sign, double tol) {
  OrderedExpTask task;
  task.generator = L;
  task.a = a;
  task.t = t;
  task.direction = dir;
  task.sign = sign;
  task.tolerance = tol;
  return ordered_exp(task).value;
}

// ---------------------------------------------------------------------------
// Propagator

namespace {

// Refines a uniform node grid over one smooth stretch until the step-doubling
// extrapolant settles. Returns extrapolated node values at the accepted grid.
std::vector<Matrix> build_nodes(const MatrixFunction& g, double sign, double lo,
                                double hi, Direction dir, double tol, double& h_out) {
  const int dim = g.dim();
  const Matrix id = Matrix::Identity(dim, dim);
  int n = 16;
  std::vector<Matrix> plain_prev, plain_cur, extrap_prev, extrap_cur;
  sweep(g, sign, lo, hi, n, dir, id, &plain_prev);
  const int max_levels = 15;
  for (int level = 1; level <= max_levels; ++level) {
    sweep(g, sign, lo, hi, 2 * n, dir, id, &plain_cur);
    extrap_cur.resize(n + 1);
    for (int k = 0; k <= n; ++k)
      extrap_cur[k] = plain_cur[2 * k] + (plain_cur[2 * k] - plain_prev[k]) / 3.0;
    if (!extrap_prev.empty()) {
      double disc = 0;
      for (int k = 0; k <= n / 2; ++k)
        disc = std::max(disc, rel_norm(extrap_cur[2 * k] - extrap_prev[k],
                                       extrap_cur[2 * k]));
      if (disc <= tol) {
        h_out = (hi - lo) / n;
        return extrap_cur;
      }
    }
    extrap_prev = std::move(extrap_cur);
    extrap_cur.clear();
    plain_prev = std::move(plain_cur);
    plain_cur.clear();
    n *= 2;
  }
  throw ConvergenceError("Propagator: refinement budget exhausted before tolerance");
}

}  // namespace

Propagator::Propagator(MatrixFunction L, double a, double b, double tol, double sign)
    : gen_(std::move(L)), a_(a), b_(b), sign_(sign), tol_(tol) {
  if (b < a) throw std::invalid_argument("Propagator: needs a <= b");
  const int dim = gen_.dim();
  const Matrix id = Matrix::Identity(dim, dim);
  prefix_.push_back(id);
  prefix_inv_.push_back(id);
  if (a == b) {
    segments_.push_back({a, b, 1.0, {id}, {id}});
    return;
  }

  const std::vector<double> cuts = cut_points(gen_, a, b);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    Segment seg;
    seg.lo = cuts[s];
    seg.hi = cuts[s + 1];
    seg.nodes = build_nodes(gen_, sign_, seg.lo, seg.hi, Direction::T, tol_, seg.h);
    seg.inverses.reserve(seg.nodes.size());
    for (const auto& m : seg.nodes) seg.inverses.push_back(m.partialPivLu().inverse());
    segments_.push_back(std::move(seg));
    if (s + 2 < cuts.size()) {
      // T ordering: later segments stack on the left
      prefix_.push_back(segments_.back().nodes.back() * prefix_.back());
      prefix_inv_.push_back(prefix_.back().partialPivLu().inverse());
    }
  }
}

int Propagator::node_count() const {
  int n = 0;
  for (const auto& s : segments_) n += static_cast<int>(s.nodes.size());
  return n;
}

const Propagator::Segment& Propagator::segment_for(double tau, int& index) const {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (tau <= segments_[i].hi || i + 1 == segments_.size()) {
      index = static_cast<int>(i);
      return segments_[i];
    }
  }
  index = 0;
  return segments_[0];
}

Matrix Propagator::partial_step(const Segment& s, double from, double delta) const {
  (void)s;
  const int dim = gen_.dim();
  if (delta == 0) return Matrix::Identity(dim, dim);
  Matrix one = matrix_exp(Matrix(sign_ * delta * gen_(from + 0.5 * delta)));
  Matrix h1 = matrix_exp(Matrix(sign_ * 0.5 * delta * gen_(from + 0.25 * delta)));
  Matrix h2 = matrix_exp(Matrix(sign_ * 0.5 * delta * gen_(from + 0.75 * delta)));
  Matrix two = h2 * h1;
  return two + (two - one) / 3.0;
}

Matrix Propagator::forward(double tau) const {
  int idx;
  const Segment& s = segment_for(std::clamp(tau, a_, b_), idx);
  double local = std::clamp(tau, s.lo, s.hi) - s.lo;
  int k = std::min(static_cast<int>(s.nodes.size()) - 1,
                   static_cast<int>(local / s.h));
  double delta = local - k * s.h;
  Matrix within = s.nodes[k];
  if (delta > 1e-14 * std::max(1.0, std::fabs(s.hi - s.lo)))
    within = partial_step(s, s.lo + k * s.h, delta) * within;
  return within * prefix_[idx];
}

Matrix Propagator::inverse(double tau) const {
  int idx;
  const Segment& s = segment_for(std::clamp(tau, a_, b_), idx);
  double local = std::clamp(tau, s.lo, s.hi) - s.lo;
  int k = std::min(static_cast<int>(s.nodes.size()) - 1,
                   static_cast<int>(local / s.h));
  double delta = local - k * s.h;
  Matrix within_inv = s.inverses[k];
  if (delta > 1e-14 * std::max(1.0, std::fabs(s.hi - s.lo))) {
    Matrix p = partial_step(s, s.lo + k * s.h, delta);
    within_inv = within_inv * p.partialPivLu().inverse();
  }
  return prefix_inv_[idx] * within_inv;
}

}  // namespace chronexp::texp
