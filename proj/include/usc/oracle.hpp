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

// Reference dynamics from a direct discretization of the continuum: the bath
// is replaced by n lossless modes on a uniform grid, g_k = sqrt(J(w_k) dw), and
// the closed emitter + bath system is propagated as a state vector.

#pragma once

#include <span>

#include "usc/dynamics.hpp"

namespace usc {

struct DiscretizationSpec {
  double omega_min = 0.0;
  double omega_max = 1.0;
  int n_points = 400;

  void validate() const;
  double spacing() const { return (omega_max - omega_min) / n_points; }
  /// 2 pi / dw; the discretized bath re-focuses emitted light after this time.
  double recurrence_time() const;
};

/// Midpoint discretization. Throws InputError if J is negative or non-finite at a node.
ModeModel discretize(const SpectralFn& target, const DiscretizationSpec& d);

struct OracleResult {
  Trajectory trajectory;
  std::size_t dimension = 0;
  ode::Stats stats;
};

/// Schroedinger propagation of |e;vac> (or |g;vac>) under the truncated
/// Hamiltonian of a closed model. Only the parity sector of the initial state
/// is kept, which is exact since H conserves parity. `recurrence_time` is
/// attached to the trajectory and raises its warning flag when exceeded.
OracleResult exact_propagate(const ModeModel& model, const EmitterSpec& e, BasisSpec basis,
                             std::span<const double> times, double recurrence_time, const Tolerances& tol = {});

struct OracleConvergence {
  double points_delta = 0.0;      // sup |P_e(n) - P_e(2n)| over the common valid window
  double excitation_delta = 0.0;  // sup |P_e(N_exc) - P_e(N_exc+2)|
  double window_end = 0.0;        // end of the window used for points_delta
};

/// Re-runs the oracle with doubled n_points and with the next non-trivial
/// excitation cutoff, and reports the sup-norm changes in P_e.
OracleConvergence oracle_convergence(const SpectralFn& target, const DiscretizationSpec& d, const EmitterSpec& e,
                                     const BasisSpec& basis, std::span<const double> times, const Tolerances& tol = {});

}  // namespace usc
