// Copyright 2026 The usc-lindblad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "usc/least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace usc {

namespace {

void normal_matrix(const Eigen::MatrixXd& jac, Eigen::MatrixXd& a) {
  a.setZero(jac.cols(), jac.cols());
  a.selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());
  a.triangularView<Eigen::StrictlyUpper>() = a.transpose();
}

}  // namespace

LeastSquaresResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd p, const LeastSquaresOptions& opt) {
  LeastSquaresResult res;
  Eigen::VectorXd r, r_new;
  Eigen::MatrixXd jac;
  f(p, r, &jac);
  double obj = r.squaredNorm();
  res.objective_history.push_back(obj);

  Eigen::MatrixXd a;
  normal_matrix(jac, a);
  Eigen::VectorXd grad = jac.transpose() * r;
  double mu = opt.initial_damping * std::max(a.diagonal().maxCoeff(), 1e-300);
  double nu = 2.0;

  auto finish = [&](bool ok, const char* why) {
    res.params = p;
    res.objective = obj;
    res.converged = ok;
    res.stop_reason = why;
    return res;
  };

  if (!std::isfinite(obj)) return finish(false, "non-finite objective");
  for (int it = 0; it < opt.max_iterations; ++it) {
    res.iterations = it + 1;
    if (grad.lpNorm<Eigen::Infinity>() <= opt.gradient_tol) return finish(true, "gradient");

    // Marquardt scaling with a floor so flat directions still get damped
    Eigen::VectorXd d = a.diagonal().cwiseMax(1e-12 * a.diagonal().maxCoeff()).cwiseMax(1e-300);
    Eigen::MatrixXd damped = a;
    damped.diagonal() += mu * d;
    const Eigen::VectorXd h = damped.ldlt().solve(-grad);
    if (!h.allFinite()) {
      mu *= nu;
      nu *= 2.0;
      continue;
    }
    const bool tiny = h.norm() <= opt.step_tol * (p.norm() + opt.step_tol);

    const Eigen::VectorXd p_new = p + h;
    f(p_new, r_new, nullptr);
    const double obj_new = r_new.squaredNorm();
    // predicted decrease of the linear model: h^T (mu D h - g)
    const double predicted = h.dot(mu * d.cwiseProduct(h) - grad);
    const double rho = (obj - obj_new) / std::max(predicted, 1e-300);

    if (std::isfinite(obj_new) && obj_new < obj && rho > 0.0) {
      const double rel = (obj - obj_new) / std::max(obj, 1e-300);
      p = p_new;
      obj = obj_new;
      f(p, r, &jac);
      normal_matrix(jac, a);
      grad.noalias() = jac.transpose() * r;
      res.objective_history.push_back(obj);
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      if (rel <= opt.objective_tol) return finish(true, "objective");
      const auto& hist = res.objective_history;
      if (opt.stall_window > 0 && hist.size() > static_cast<std::size_t>(opt.stall_window)) {
        const double before = hist[hist.size() - 1 - static_cast<std::size_t>(opt.stall_window)];
        if (before - obj <= opt.stall_tol * before) return finish(true, "stall");
      }
    } else {
      if (tiny) return finish(true, "step");
      mu *= nu;
      nu *= 2.0;
      if (!std::isfinite(mu) || mu > 1e300) return finish(false, "damping overflow");
    }
  }
  return finish(false, "max iterations");
}

Eigen::MatrixXd numerical_jacobian(const ResidualFn& f, const Eigen::VectorXd& p, double rel_step) {
  Eigen::VectorXd r0;
  f(p, r0, nullptr);
  Eigen::MatrixXd jac(r0.size(), p.size());
  Eigen::VectorXd rp, rm;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const double h = rel_step * std::max(1.0, std::abs(p[k]));
    Eigen::VectorXd q = p;
    q[k] = p[k] + h;
    f(q, rp, nullptr);
    q[k] = p[k] - h;
    f(q, rm, nullptr);
    jac.col(k) = (rp - rm) / (2.0 * h);
  }
  return jac;
}

}  // namespace usc
