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

// Fitting a lossy mode network to a target spectral density.
//
// The positive-frequency part is matched in relative least squares while
// J_mod at negative frequencies is pushed below a threshold by a hinge
// penalty whose weight is raised stage by stage until the refined negative
// grid is below the threshold:
//
//   F = (1/n+) sum_+ [(J_mod - J) / (J + eps)]^2
//     + (lambda/n-) sum_- [max(0, J_mod - m thr) / eps]^2
//
// with eps = 1e-3 max J and an inner margin m < 1 so the hard threshold is
// met with room to spare on a refined grid.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "usc/least_squares.hpp"
#include "usc/spectral.hpp"

namespace usc {

struct FitConfig {
  int n_modes = 1;
  double neg_threshold = 1e-8;
  std::vector<double> pos_grid;
  std::vector<double> neg_grid;  // may be empty (no suppression)
  int max_iterations = 2000;     // per penalty stage
  int n_restarts = 4;
  std::uint64_t rng_seed = 1;
  std::vector<double> penalty_schedule{0.0, 1e-2, 1.0, 1e2, 1e4, 1e6, 1e8};
  double penalty_margin = 0.5;
  int stall_window = 200;
  double stall_tol = 1e-3;
  int threads = 0;  // 0: hardware concurrency

  /// Throws InputError when an invariant is violated.
  void validate() const;
};

/// n points uniform over [lo, hi]. A zero lower edge is replaced by hi/n so
/// the grid stays strictly positive.
std::vector<double> uniform_grid(double lo, double hi, int n);

/// n points with |w| log-spaced from `near` to `edge`, returned as negative
/// frequencies in increasing order (near, edge > 0).
std::vector<double> negative_log_grid(double near, double edge, int n);

/// Inserts the midpoint (geometric for same-sign neighbours) between every
/// pair of consecutive grid points.
std::vector<double> refine_grid(const std::vector<double>& grid);

struct FitResult {
  ModeModel model;
  double pos_residual = 0.0;   // relative RMS on pos_grid
  double neg_violation = 0.0;  // max(0, J_mod - thr) on the refined negative grid
  double max_negative = 0.0;   // max J_mod on the refined negative grid
  bool converged = false;
  double objective = 0.0;
  std::vector<double> objective_history;
  std::vector<std::size_t> stage_starts;  // index into objective_history where each stage begins
  int restart_index = 0;
  int iterations = 0;
};

/// Starting model for one restart. Peaks of the target on pos_grid seed the
/// diagonal; remaining modes sit on a log ladder from the low edge of the
/// window, each with kappa equal to its frequency. Restarts after the first
/// jitter the diagonal and the widths.
ModeModel initialize_model(const SpectralFn& target, const FitConfig& cfg, int restart_index);

/// Residual vector and analytic Jacobian for a fixed penalty weight.
/// Parameters: [omega_ii (N), omega_i<j (N(N-1)/2), s_i (N), g (N)] with
/// kappa_i = hi / (1 + exp(-s_i)), hi = 10 times the width of the positive
/// window.
class FitObjective {
 public:
  FitObjective(const SpectralFn& target, const FitConfig& cfg);

  int n_params() const;
  Eigen::VectorXd encode(const ModeModel& m) const;
  ModeModel decode(const Eigen::VectorXd& p) const;

  void set_penalty(double lambda) { lambda_ = lambda; }
  void operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const;

  double pos_residual(const ModeModel& m) const;
  double floor() const { return eps_; }
  double kappa_max() const { return kappa_hi_; }

 private:
  int n_;
  double thr_, margin_, eps_;
  double kappa_hi_;
  double lambda_ = 0.0;
  std::vector<double> pos_, neg_;
  Eigen::VectorXd target_pos_;
};

/// Runs cfg.n_restarts independent fits through the penalty schedule and
/// returns the one with the lowest final objective (ties: lowest index).
/// Throws InputError if the target is negative or non-finite on a grid.
FitResult fit_model(const SpectralFn& target, const FitConfig& cfg);

/// Same as fit_model for one restart, optionally from a given starting model.
FitResult fit_single(const SpectralFn& target, const FitConfig& cfg, const ModeModel& start, int restart_index);

struct FitReportRow {
  double omega;
  double target;
  double model;
  double residual;  // (model - target) / (target + eps) on the positive side, model - thr on the negative side
  bool negative;
};

struct FitReport {
  std::vector<FitReportRow> rows;
  std::vector<cplx> resonances;
  double pos_residual = 0.0;
  double neg_violation = 0.0;
  double neg_threshold = 0.0;
};

FitReport fit_report(const FitResult& r, const SpectralFn& target, const FitConfig& cfg);

}  // namespace usc
