#include "phasegate/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace phasegate {

namespace {
struct Pair {
  Eigen::VectorXd s, y;
  double rho;
};
}  // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFn& fn, const Eigen::VectorXd& x0,
                           const LbfgsOptions& opts) {
  const int n = static_cast<int>(x0.size());
  Eigen::VectorXd x = x0, grad(n), grad_new(n);
  double f = fn(x, grad);

  std::deque<Pair> history;
  double gamma = 1.0;  // initial inverse-Hessian scale

  LbfgsResult res;
  res.x = x;
  res.value = f;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    if (gnorm <= opts.grad_tolerance) {
      res.converged = true;
      break;
    }

    // Two-loop recursion for the search direction.
    Eigen::VectorXd q = grad;
    std::vector<double> alpha(history.size());
    for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
      alpha[i] = history[i].rho * history[i].s.dot(q);
      q -= alpha[i] * history[i].y;
    }
    q *= gamma;
    for (size_t i = 0; i < history.size(); ++i) {
      const double beta = history[i].rho * history[i].y.dot(q);
      q += (alpha[i] - beta) * history[i].s;
    }
    Eigen::VectorXd dir = -q;

    double dg = dir.dot(grad);
    if (!(dg < 0.0)) {  // not a descent direction; fall back to steepest
      dir = -grad;
      dg = -grad.squaredNorm();
      history.clear();
      gamma = 1.0 / std::max(gnorm, 1e-12);
    }

    // Armijo backtracking.
    double step = 1.0;
    const double c1 = 1e-4;
    double f_new = f;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      x_new = x + step * dir;
      f_new = fn(x_new, grad_new);
      if (std::isfinite(f_new) && f_new <= f + c1 * step * dg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no progress possible along this direction

    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      history.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
      gamma = sy / history.back().y.squaredNorm();
    }

    const double decrease = f - f_new;
    x = std::move(x_new);
    f = f_new;
    grad = grad_new;
    res.iterations = iter + 1;
    if (decrease < opts.step_tolerance * (std::abs(f) + 1.0)) break;
  }

  res.x = x;
  res.value = f;
  return res;
}

}  // namespace phasegate
