#include "chronexp/ode45.hpp"

#include <algorithm>
#include <cmath>

namespace chronexp::ode {

namespace {

using Eigen::VectorXd;

// Dormand-Prince coefficients.
const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
const double a21 = 1.0 / 5;
const double a31 = 3.0 / 40, a32 = 9.0 / 40;
const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
             a54 = -212.0 / 729;
const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
             a64 = 49.0 / 176, a65 = -5103.0 / 18656;
const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
             b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 4th-order weights for the embedded error estimate
const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
             e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
  const Field& f;
  const Options& opt;
  int n;
  VectorXd k1, k2, k3, k4, k5, k6, k7, ytmp, yerr;

  Stepper(const Field& fld, const Options& o, int dim) : f(fld), opt(o), n(dim) {
    k1.resize(n); k2.resize(n); k3.resize(n); k4.resize(n); k5.resize(n);
    k6.resize(n); k7.resize(n); ytmp.resize(n); yerr.resize(n);
  }

  // One attempted step from (t, y) with size h; fills ynew and the error norm.
  bool attempt(double t, const VectorXd& y, double h, VectorXd& ynew, double& errnorm) {
    f(t, y, k1);
    ytmp = y + h * a21 * k1;
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + h, ynew, k7);
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    if (!ynew.allFinite()) return false;
    double err = 0;
    for (int i = 0; i < n; ++i) {
      double sc = opt.abs_tol + opt.rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
      double r = yerr[i] / sc;
      err += r * r;
    }
    errnorm = std::sqrt(err / n);
    return std::isfinite(errnorm);
  }
};

Outcome run(const Field& f, double t0, double t1, VectorXd y0, const Options& opt,
            const std::function<void(double, const VectorXd&)>& observer) {
  Outcome out;
  out.y = std::move(y0);
  if (t0 == t1) return out;

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::fabs(t1 - t0);
  const double hmin = opt.min_step_fraction * span;
  Stepper st(f, opt, static_cast<int>(out.y.size()));

  double t = t0;
  double h = dir * std::min(span / 16.0, opt.max_step > 0 ? opt.max_step : span / 16.0);
  VectorXd ynew(out.y.size());

  while (dir * (t1 - t) > 0) {
    if (dir * (t + h - t1) > 0) h = t1 - t;
    double errnorm = 0;
    bool finite = st.attempt(t, out.y, h, ynew, errnorm);
    ++out.steps;
    if (out.steps > opt.max_steps) {
      out.ok = false;
      out.error = "step budget exhausted";
      return out;
    }
    if (finite && errnorm <= 1.0) {
      t += h;
      out.y.swap(ynew);
      if (observer) observer(t, out.y);
      if (out.y.lpNorm<Eigen::Infinity>() > opt.blowup_magnitude) {
        out.ok = false;
        out.blew_up = true;
        out.escape_time = t;
        return out;
      }
      double factor = errnorm > 0 ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
      h *= std::clamp(factor, 0.2, 5.0);
    } else {
      double factor = finite ? std::max(0.1, 0.9 * std::pow(errnorm, -0.2)) : 0.1;
      h *= factor;
    }
    if (opt.max_step > 0 && std::fabs(h) > opt.max_step) h = dir * opt.max_step;
    if (std::fabs(h) < hmin) {
      // step collapse: treat the current time as the escape estimate
      out.ok = false;
      out.blew_up = true;
      out.escape_time = t;
      return out;
    }
  }
  return out;
}

}  // namespace

Outcome integrate(const Field& f, double t0, double t1, Eigen::VectorXd y0,
                  const Options& opt,
                  const std::function<void(double, const Eigen::VectorXd&)>& observer) {
  return run(f, t0, t1, std::move(y0), opt, observer);
}

Outcome integrate_path(const Field& f, double t0, const std::vector<double>& targets,
                       Eigen::VectorXd y0,
                       const std::function<void(double, const Eigen::VectorXd&)>& at_target,
                       const Options& opt) {
  Outcome out;
  out.y = std::move(y0);
  double t = t0;
  for (double target : targets) {
    if (target == t) {
      if (at_target) at_target(t, out.y);
      continue;
    }
    Outcome leg = run(f, t, target, std::move(out.y), opt, {});
    leg.steps += out.steps;
    out = std::move(leg);
    if (!out.ok) return out;
    t = target;
    if (at_target) at_target(t, out.y);
  }
  return out;
}

}  // namespace chronexp::ode
