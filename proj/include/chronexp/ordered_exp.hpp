#pragma once

#include <stdexcept>
#include <vector>

#include "chronexp/matrix_function.hpp"

namespace chronexp::texp {

// Factor ordering of the product integral. T multiplies new factors on the
// left as time grows (latest leftmost); T0 multiplies on the right.
enum class Direction { T, T0 };

enum class MethodKind { ProductIntegral, Dyson };

struct StepControl {
  int initial_steps = 16;
  bool richardson = true;  // return the step-doubling extrapolant
  int max_levels = 16;
};

struct OrderedExpTask {
  MatrixFunction generator;
  double a = 0;
  double t = 1;
  Direction direction = Direction::T;
  double sign = 1.0;  // applied to the generator
  MethodKind method = MethodKind::ProductIntegral;
  int dyson_order = 4;
  int dyson_points = 16;
  double tolerance = 1e-10;  // relative, on the step-doubling discrepancy
  StepControl control;
};

struct OrderedExpResult {
  Matrix value;
  int steps = 0;       // steps at the accepted level
  int levels = 0;      // refinement levels consumed
  double discrepancy = 0;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

OrderedExpResult ordered_exp(const OrderedExpTask& task);

// Shorthand for the common product-integral evaluation.
Matrix ordered_exp_value(const MatrixFunction& L, double a, double t,
                         Direction dir = Direction::T, double sign = 1.0,
                         double tol = 1e-10);

// Dense cache of the forward propagator Texp{sign*∫_a^τ L} for τ in [a, b].
// Nodes are stored on a uniform grid refined until the step-doubling
// extrapolant settles below tol; queries complete the partial step from the
// nearest node. inverse(τ) returns the reverse-ordered inverse propagator.
class Propagator {
 public:
  Propagator(MatrixFunction L, double a, double b, double tol, double sign = 1.0);

  Matrix forward(double tau) const;
  Matrix inverse(double tau) const;

  double a() const { return a_; }
  double b() const { return b_; }
  int node_count() const;

 private:
  struct Segment {
    double lo, hi, h;
    std::vector<Matrix> nodes;      // Texp{∫_lo^{t_k}}
    std::vector<Matrix> inverses;
  };
  const Segment& segment_for(double tau, int& index) const;
  Matrix partial_step(const Segment& s, double from, double delta) const;

  MatrixFunction gen_;
  double a_, b_, sign_, tol_;
  std::vector<Segment> segments_;
  std::vector<Matrix> prefix_;      // product of completed segments, T-ordered
  std::vector<Matrix> prefix_inv_;
};

}  // namespace chronexp::texp
