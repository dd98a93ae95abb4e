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

// Comparing trajectories and summarizing fits.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "usc/dynamics.hpp"
#include "usc/fit.hpp"

namespace usc {

struct ErrorReport {
  std::vector<double> times;
  std::vector<double> rel_error_t;  // |P_a - P_b| / max(P_b, floor)
  double avg_rel_error = 0.0;
  double max_rel_error = 0.0;
  double normalization_floor = 1e-3;
};

/// Emitter-population error of `a` against the reference `b`. If the grids
/// differ, `a` is linearly interpolated onto the reference times inside its
/// range. Throws InputError when the time ranges do not overlap.
ErrorReport relative_error(const Trajectory& a, const Trajectory& b, double floor = 1e-3);

/// Linear interpolation of (x, y) at `at`; x strictly increasing, at inside [x0, xn].
double interpolate(std::span<const double> x, std::span<const double> y, double at);

/// Least-squares slope of y(t) over the last `fraction` of the samples.
double late_slope(std::span<const double> t, std::span<const double> y, double fraction = 0.2);

/// Decay rate from a least-squares line through log P(t) for samples with
/// t in [t_lo, t_hi].
double exponential_rate(std::span<const double> t, std::span<const double> p, double t_lo, double t_hi);

struct SweepCell {
  int n_modes = 0;
  double threshold = 0.0;
  double avg_rel_error = 0.0;
  double max_rel_error = 0.0;
  double pos_residual = 0.0;
  double neg_violation = 0.0;
  std::string status = "ok";  // ok | not_converged | error: <message>
};

struct SweepDynamics {
  EmitterSpec emitter;
  int max_total_excitations = 3;
  std::size_t dimension_cap = 200000;
  Tolerances tol;
  double floor = 1e-3;
};

/// For every (N, threshold): fit, propagate on the oracle's time grid and
/// compare. Cells are independent; a failing cell is recorded and the sweep
/// continues. Rows are ordered by N, then by threshold as given.
std::vector<SweepCell> threshold_sweep(const SpectralFn& target, const Trajectory& oracle,
                                       const std::vector<int>& n_modes_list, const std::vector<double>& thresholds,
                                       const FitConfig& base, const SweepDynamics& dyn);

}  // namespace usc
