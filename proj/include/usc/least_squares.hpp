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

// Damped Gauss-Newton (Levenberg-Marquardt) minimization of ||r(p)||^2.
// Damping follows Madsen, Nielsen & Tingleff, "Methods for non-linear least
// squares problems" (2004), with Marquardt's diagonal scaling.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace usc {

/// Evaluates residuals r(p) and, when `jac` is non-null, the Jacobian dr/dp.
using ResidualFn = std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac)>;

struct LeastSquaresOptions {
  int max_iterations = 500;
  double gradient_tol = 1e-12;   // ||J^T r||_inf
  double step_tol = 1e-12;       // ||dp|| relative to ||p||
  double objective_tol = 1e-14;  // relative objective decrease of an accepted step
  double initial_damping = 1e-3;
  // converged when the objective falls by less than stall_tol (relative) over
  // stall_window accepted steps; 0 disables
  int stall_window = 0;
  double stall_tol = 1e-3;
};

struct LeastSquaresResult {
  Eigen::VectorXd params;
  double objective = 0.0;               // ||r||^2
  std::vector<double> objective_history;  // after every accepted step; starts with the initial value
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
};

LeastSquaresResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd p0, const LeastSquaresOptions& opt = {});

/// Central-difference Jacobian, used to cross-check analytic ones.
Eigen::MatrixXd numerical_jacobian(const ResidualFn& f, const Eigen::VectorXd& p, double rel_step = 1e-6);

}  // namespace usc
