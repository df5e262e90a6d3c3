#pragma once

#include <functional>

#include <Eigen/Dense>

namespace phasegate {

struct LbfgsOptions {
  int max_iterations = 300;
  int memory = 8;
  double grad_tolerance = 1e-9;
  double step_tolerance = 1e-13;
  int max_backtracks = 40;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;  // gradient tolerance reached
};

/// Objective callback: return f(x) and fill grad (same size as x).
using ObjectiveFn =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS with Armijo backtracking. Minimizes fn from x0.
LbfgsResult lbfgs_minimize(const ObjectiveFn& fn, const Eigen::VectorXd& x0,
                           const LbfgsOptions& opts = {});

}  // namespace phasegate
