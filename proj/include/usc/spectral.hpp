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

// Spectral densities J(w) of the electromagnetic environment: analytic targets,
// tabulated targets and the spectral density generated by a network of lossy,
// interacting bosonic modes.

#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "usc/common.hpp"

namespace usc {

/// Any spectral-density evaluator, J: energy -> energy.
using SpectralFn = std::function<double(double)>;

/// Single damped mode: Lorentzian on the whole real axis.
struct LorentzianParams {
  double omega_c = 0.0;
  double g = 0.0;
  double kappa = 1.0;

  void validate() const;
};

/// Single mode coupled to an Ohmic background; support on w > 0 only.
struct SingleModeOhmicParams {
  double omega_c = 1.0;
  double g = 0.0;
  double kappa = 1.0;

  void validate() const;
};

double eval_lorentzian(const LorentzianParams& p, double omega);
double eval_single_mode_ohmic(const SingleModeOhmicParams& p, double omega);

/// Piecewise-linear spectral density sampled at strictly increasing positive
/// frequencies. Zero outside the sampled range and for w <= 0.
class TabulatedSD {
 public:
  TabulatedSD(std::vector<double> omega, std::vector<double> j);

  double operator()(double omega) const;

  const std::vector<double>& omega() const { return omega_; }
  const std::vector<double>& values() const { return j_; }

 private:
  std::vector<double> omega_;
  std::vector<double> j_;
};

double eval_tabulated(const TabulatedSD& t, double omega);

/// Network of N lossy, mutually coupled modes with real symmetric mode matrix
/// omega_mat, decay rates kappa and emitter couplings g.
///
/// A model built with `ModeModel::closed` carries kappa = 0 and represents a
/// discretized lossless bath; its spectral density is a sum of delta peaks and
/// cannot be evaluated pointwise.
class ModeModel {
 public:
  /// Empty network (no modes).
  ModeModel() = default;
  ModeModel(Eigen::MatrixXd omega_mat, Eigen::VectorXd kappa, Eigen::VectorXd g);

  static ModeModel closed(Eigen::VectorXd omega, Eigen::VectorXd g);

  int n_modes() const { return static_cast<int>(g_.size()); }
  const Eigen::MatrixXd& omega_mat() const { return omega_mat_; }
  const Eigen::VectorXd& kappa() const { return kappa_; }
  const Eigen::VectorXd& g() const { return g_; }
  bool is_closed() const { return closed_; }

  /// omega_ij - (i/2) delta_ij kappa_i
  Eigen::MatrixXcd effective_hamiltonian() const;

  /// Same network with all emitter couplings multiplied by `factor`.
  ModeModel with_scaled_couplings(double factor) const;

  /// Flips mode signs so that every g_i >= 0. J_mod is invariant under a_i -> -a_i.
  ModeModel canonical() const;

 private:
  Eigen::MatrixXd omega_mat_;
  Eigen::VectorXd kappa_;
  Eigen::VectorXd g_;
  bool closed_ = false;
};

/// J_mod(w) = (1/pi) g . Im[(H~ - w)^-1] . g
double eval_model_sd(const ModeModel& m, double omega);

/// Eigenvalues of H~, sorted by real part. All imaginary parts are <= 0.
std::vector<cplx> model_resonances(const ModeModel& m);

/// Wraps an analytic or tabulated form as a SpectralFn.
SpectralFn as_function(LorentzianParams p);
SpectralFn as_function(SingleModeOhmicParams p);
SpectralFn as_function(TabulatedSD t);
SpectralFn as_function(ModeModel m);

}  // namespace usc
