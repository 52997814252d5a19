#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace chronexp::ode {

using Field = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double max_step = 0;               // 0: no cap
  long max_steps = 20'000'000;
  double blowup_magnitude = 1e12;    // |y| above this counts as escape
  double min_step_fraction = 1e-13;  // step collapse threshold, times |t1-t0|
};

struct Outcome {
  Eigen::VectorXd y;
  bool ok = true;          // reached the target time
  bool blew_up = false;    // escape detected before the target
  double escape_time = 0;  // estimate when blew_up
  long steps = 0;
  std::string error;       // set when !ok for non-blow-up reasons
};

// Dormand-Prince 5(4) with standard step control. Integrates from t0 to t1
// (either direction). The observer, when given, sees every accepted step.
Outcome integrate(const Field& f, double t0, double t1, Eigen::VectorXd y0,
                  const Options& opt = {},
                  const std::function<void(double, const Eigen::VectorXd&)>& observer = {});

// Integrates through a monotone chain of target times starting at t0,
// invoking `at_target` exactly at each (steps are clipped to land on them).
Outcome integrate_path(const Field& f, double t0, const std::vector<double>& targets,
                       Eigen::VectorXd y0,
                       const std::function<void(double, const Eigen::VectorXd&)>& at_target,
                       const Options& opt = {});

}  // namespace chronexp::ode
