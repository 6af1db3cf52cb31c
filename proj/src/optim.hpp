//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_SRC_OPTIM_HPP_
#define CONFKIT_SRC_OPTIM_HPP_

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include <Eigen/Dense>

namespace confkit::internal {

enum class Direction {
  kSteepest,
  kLbfgs,
};

struct DescentOptions {
  int max_iters = 500;
  double grad_tol = 1e-3;  // on the largest per-atom gradient norm
  double max_step = 0.1;   // largest displacement of any atom on a trial step
  double armijo_c = 1e-4;
  int max_halvings = 30;
  Direction direction = Direction::kSteepest;
  int lbfgs_memory = 8;
  bool record_trace = false;
};

struct DescentResult {
  double value = 0;
  double max_grad_norm = 0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  std::vector<double> trace;  // accepted values, starting with the initial one
};

inline Eigen::VectorXd flatten(const std::vector<Eigen::Vector3d> &coords) {
  Eigen::VectorXd x(3 * coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i)
    x.segment<3>(3 * i) = coords[i];
  return x;
}

inline std::vector<Eigen::Vector3d> unflatten(const Eigen::VectorXd &x) {
  std::vector<Eigen::Vector3d> out(x.size() / 3);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = x.segment<3>(3 * i);
  return out;
}

inline double max_atom_norm(const Eigen::VectorXd &g) {
  double m = 0;
  for (Eigen::Index i = 0; i + 2 < g.size(); i += 3)
    m = std::max(m, g.segment<3>(i).norm());
  return m;
}

/// Minimizes f over a flat xyz vector with backtracking (Armijo) line search.
/// `fn(x, grad)` returns f(x) and fills grad. Accepted steps never increase
/// f, so x always holds the best point seen.
template <class Fn>
DescentResult armijo_descent(Fn &&fn, Eigen::VectorXd &x, const DescentOptions &opts) {
  DescentResult res;
  Eigen::VectorXd g(x.size()), g_new(x.size()), x_new(x.size());
  double f = fn(x, g);
  res.value = f;
  res.max_grad_norm = max_atom_norm(g);
  if (opts.record_trace)
    res.trace.push_back(f);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (res.max_grad_norm < opts.grad_tol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd dir = -g;
    if (opts.direction == Direction::kLbfgs && !s_hist.empty()) {
      // Two-loop recursion.
      const std::size_t m = s_hist.size();
      std::vector<double> alpha(m);
      Eigen::VectorXd q = g;
      for (std::size_t k = m; k-- > 0;) {
        alpha[k] = rho_hist[k] * s_hist[k].dot(q);
        q -= alpha[k] * y_hist[k];
      }
      const double gamma = s_hist.back().dot(y_hist.back())
                           / y_hist.back().squaredNorm();
      Eigen::VectorXd r = gamma * q;
      for (std::size_t k = 0; k < m; ++k) {
        const double beta = rho_hist[k] * y_hist[k].dot(r);
        r += s_hist[k] * (alpha[k] - beta);
      }
      dir = -r;
      if (dir.dot(g) >= 0) {
        dir = -g;
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
      }
    }

    const double dir_max = max_atom_norm(dir);
    double step = opts.max_step / dir_max;
    if (opts.direction == Direction::kLbfgs && !s_hist.empty())
      step = std::min(1.0, step);
    const double slope = g.dot(dir);

    bool accepted = false;
    double f_new = f;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      x_new = x + step * dir;
      f_new = fn(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + opts.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.line_search_failed = true;
      break;
    }

    if (opts.direction == Direction::kLbfgs) {
      Eigen::VectorXd s = x_new - x, y = g_new - g;
      const double sy = s.dot(y);
      if (sy > 1e-12) {
        s_hist.push_back(std::move(s));
        y_hist.push_back(std::move(y));
        rho_hist.push_back(1.0 / sy);
        if (static_cast<int>(s_hist.size()) > opts.lbfgs_memory) {
          s_hist.pop_front();
          y_hist.pop_front();
          rho_hist.pop_front();
        }
      }
    }

    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    ++res.iterations;
    res.value = f;
    res.max_grad_norm = max_atom_norm(g);
    if (opts.record_trace)
      res.trace.push_back(f);
  }

  if (!res.converged && res.max_grad_norm < opts.grad_tol)
    res.converged = true;
  return res;
}

}  // namespace confkit::internal

#endif  // CONFKIT_SRC_OPTIM_HPP_
