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

// Lindblad master equation for the emitter + mode network:
//
//   d rho/dt = -i[H, rho] + sum_i kappa_i (a_i rho a_i^+ - {a_i^+ a_i, rho}/2)
//
// propagated on the vectorized density matrix with an adaptive embedded
// Runge-Kutta pair.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "usc/fock.hpp"
#include "usc/ode.hpp"

namespace usc {

struct QuantumState {
  Eigen::MatrixXcd rho;

  static QuantumState pure(const Eigen::VectorXcd& psi);

  cplx trace() const { return rho.trace(); }
  double purity() const;
  double hermiticity_defect() const;
  double min_eigenvalue() const;
  /// Throws InputError unless Tr = 1 +- tol, rho = rho^+ and min eigenvalue >= -tol.
  void validate(double tol = 1e-8) const;
};

/// Time series of observables. Rows of `mode_populations` follow `times`.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> emitter_population;
  Eigen::MatrixXd mode_populations;  // times x n_modes
  std::vector<double> bath_photons;
  std::vector<double> purity;
  std::vector<double> trace_defect;

  bool oracle = false;
  std::optional<double> recurrence_time;  // oracle runs only
  bool recurrence_warning = false;

  std::size_t size() const { return times.size(); }
  int n_modes() const { return static_cast<int>(mode_populations.cols()); }
  /// P_bath(t) + sum_i <n_i>(t)
  std::vector<double> total_photons() const;
};

struct Tolerances {
  double rtol = 1e-8;
  double atol = 1e-10;
};

/// Everything needed to propagate and observe one open-system run.
struct OpenSystem {
  SparseOp hamiltonian;
  std::vector<JumpOperator> jumps;
  Eigen::VectorXd emitter_diag;             // diag of |e><e|
  std::vector<Eigen::VectorXd> number_diag;  // diag of n_i per mode

  std::size_t dimension() const { return static_cast<std::size_t>(hamiltonian.rows()); }
};

OpenSystem make_open_system(const ModeModel& m, const EmitterSpec& e, const Basis& b);

/// Projector on |e;vac> or |g;vac> according to e.initial_state.
QuantumState initial_state(const Basis& b, const EmitterSpec& e);

/// -i[H, rho] + sum_i kappa_i L_{a_i}[rho]
Eigen::MatrixXcd lindblad_rhs(const QuantumState& rho, const SparseOp& h, std::span<const JumpOperator> jumps);

/// Trace norm of a Hermitian matrix.
double trace_norm(const Eigen::MatrixXcd& a);

struct PropagationResult {
  Trajectory trajectory;
  QuantumState final_state;
  ode::Stats stats;
};

/// Propagates rho0 over the output grid `times` (times[0] is the initial time).
/// Throws ode::IntegrationError on step-size underflow.
PropagationResult propagate(const QuantumState& rho0, const OpenSystem& sys, std::span<const double> times,
                            const Tolerances& tol = {});

/// Builds the basis and operators for `m` and propagates the configured
/// initial state. Throws ResourceCapError if the basis exceeds its cap.
PropagationResult simulate(const ModeModel& m, const EmitterSpec& e, const BasisSpec& basis,
                           std::span<const double> times, const Tolerances& tol = {});

struct TruncationCheck {
  int max_total_excitations = 0;
  double delta = 0.0;  // sup |P_e(N_exc) - P_e(N_exc+1)|
  bool accepted = false;
};

/// Repeats the run with the cutoff raised by one and compares P_e.
TruncationCheck truncation_convergence(const ModeModel& m, const EmitterSpec& e, const BasisSpec& basis,
                                       std::span<const double> times, double tolerance, const Tolerances& tol = {});

struct SteadyStateResult {
  QuantumState state;
  double residual = 0.0;  // trace norm of the Lindblad right-hand side
  double time = 0.0;
  bool converged = false;
};

/// Propagates from rho0 until ||rhs||_1 < stationarity_tol or `horizon` is reached.
SteadyStateResult steady_state(const QuantumState& rho0, const OpenSystem& sys, double horizon,
                               double stationarity_tol, const Tolerances& tol = {});

/// Eigenvector of H with the smallest expectation value of the total
/// excitation number (the dressed vacuum).
Eigen::VectorXd lowest_excitation_eigenstate(const SparseOp& h, const Basis& b);

/// <psi|rho|psi>
double overlap(const QuantumState& rho, const Eigen::VectorXd& psi);

}  // namespace usc
