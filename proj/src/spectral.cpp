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

#include "usc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace usc {

std::string_view to_string(EnergyUnit u) { return u == EnergyUnit::meV ? "meV" : "eV"; }

EnergyUnit parse_energy_unit(std::string_view s) {
  if (s == "meV") return EnergyUnit::meV;
  if (s == "eV") return EnergyUnit::eV;
  throw InputError("unknown energy unit '" + std::string(s) + "' (expected meV or eV)");
}

void LorentzianParams::validate() const {
  if (!(kappa > 0.0)) throw InputError("lorentzian: kappa must be > 0");
  if (!(g >= 0.0)) throw InputError("lorentzian: g must be >= 0");
  if (!std::isfinite(omega_c)) throw InputError("lorentzian: omega_c must be finite");
}

void SingleModeOhmicParams::validate() const {
  if (!(kappa > 0.0)) throw InputError("single_mode_ohmic: kappa must be > 0");
  if (!(g >= 0.0)) throw InputError("single_mode_ohmic: g must be >= 0");
  if (!(omega_c > 0.0)) throw InputError("single_mode_ohmic: omega_c must be > 0");
}

double eval_lorentzian(const LorentzianParams& p, double omega) {
  const double d = p.omega_c - omega;
  return p.g * p.g / kPi * (0.5 * p.kappa) / (d * d + 0.25 * p.kappa * p.kappa);
}

double eval_single_mode_ohmic(const SingleModeOhmicParams& p, double omega) {
  if (omega <= 0.0) return 0.0;
  const double d = p.omega_c * p.omega_c - omega * omega;
  const double k = p.kappa * omega;
  return 2.0 * p.g * p.g / kPi * p.kappa * p.omega_c * omega / (d * d + k * k);
}

TabulatedSD::TabulatedSD(std::vector<double> omega, std::vector<double> j)
    : omega_(std::move(omega)), j_(std::move(j)) {
  if (omega_.empty()) throw InputError("tabulated spectral density: empty table");
  if (omega_.size() != j_.size()) throw InputError("tabulated spectral density: column length mismatch");
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    if (!std::isfinite(omega_[i]) || !std::isfinite(j_[i]))
      throw InputError("tabulated spectral density: non-finite sample at row " + std::to_string(i + 1));
    if (j_[i] < 0.0)
      throw InputError("tabulated spectral density: negative j at row " + std::to_string(i + 1));
    if (i > 0 && !(omega_[i] > omega_[i - 1]))
      throw InputError("tabulated spectral density: omega not strictly increasing at row " +
                       std::to_string(i + 1));
  }
}

double TabulatedSD::operator()(double omega) const {
  if (omega <= 0.0 || omega < omega_.front() || omega > omega_.back()) return 0.0;
  if (omega_.size() == 1) return j_.front();
  auto it = std::upper_bound(omega_.begin(), omega_.end(), omega);
  if (it == omega_.end()) return j_.back();
  const std::size_t hi = static_cast<std::size_t>(it - omega_.begin());
  const std::size_t lo = hi - 1;
  const double s = (omega - omega_[lo]) / (omega_[hi] - omega_[lo]);
  return (1.0 - s) * j_[lo] + s * j_[hi];
}

double eval_tabulated(const TabulatedSD& t, double omega) { return t(omega); }

ModeModel::ModeModel(Eigen::MatrixXd omega_mat, Eigen::VectorXd kappa, Eigen::VectorXd g)
    : omega_mat_(std::move(omega_mat)), kappa_(std::move(kappa)), g_(std::move(g)) {
  const auto n = g_.size();
  if (n < 1) throw InputError("mode model: at least one mode required");
  if (omega_mat_.rows() != n || omega_mat_.cols() != n || kappa_.size() != n)
    throw InputError("mode model: inconsistent dimensions");
  if (!omega_mat_.allFinite() || !kappa_.allFinite() || !g_.allFinite())
    throw InputError("mode model: non-finite parameter");
  const double scale = std::max(1.0, omega_mat_.cwiseAbs().maxCoeff());
  if ((omega_mat_ - omega_mat_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InputError("mode model: omega_mat must be symmetric");
  omega_mat_ = 0.5 * (omega_mat_ + omega_mat_.transpose()).eval();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(kappa_[i] > 0.0)) throw InputError("mode model: all kappa_i must be > 0");
}

ModeModel ModeModel::closed(Eigen::VectorXd omega, Eigen::VectorXd g) {
  if (omega.size() < 1 || omega.size() != g.size())
    throw InputError("closed mode model: inconsistent dimensions");
  ModeModel m;
  m.omega_mat_ = omega.asDiagonal();
  m.kappa_ = Eigen::VectorXd::Zero(omega.size());
  m.g_ = std::move(g);
  m.closed_ = true;
  return m;
}

Eigen::MatrixXcd ModeModel::effective_hamiltonian() const {
  Eigen::MatrixXcd h = omega_mat_.cast<cplx>();
  for (Eigen::Index i = 0; i < kappa_.size(); ++i) h(i, i) -= cplx(0.0, 0.5 * kappa_[i]);
  return h;
}

ModeModel ModeModel::with_scaled_couplings(double factor) const {
  ModeModel m = *this;
  m.g_ *= factor;
  return m;
}

ModeModel ModeModel::canonical() const {
  ModeModel m = *this;
  const auto n = g_.size();
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s[i] = g_[i] < 0.0 ? -1.0 : 1.0;
  m.g_ = g_.cwiseAbs();
  m.omega_mat_ = s.asDiagonal() * omega_mat_ * s.asDiagonal();
  return m;
}

double eval_model_sd(const ModeModel& m, double omega) {
  if (m.is_closed()) throw InputError("eval_model_sd: closed (lossless) model has no pointwise spectral density");
  Eigen::MatrixXcd a = m.effective_hamiltonian();
  a.diagonal().array() -= omega;
  const Eigen::VectorXcd gc = m.g().cast<cplx>();
  const Eigen::VectorXcd u = a.partialPivLu().solve(gc);
  return gc.dot(u).imag() / kPi;  // g real: conj(g).u == g.u
}

std::vector<cplx> model_resonances(const ModeModel& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.effective_hamiltonian(), false);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return ev;
}

SpectralFn as_function(LorentzianParams p) {
  p.validate();
  return [p](double w) { return eval_lorentzian(p, w); };
}

SpectralFn as_function(SingleModeOhmicParams p) {
  p.validate();
  return [p](double w) { return eval_single_mode_ohmic(p, w); };
}

SpectralFn as_function(TabulatedSD t) {
  return [t = std::move(t)](double w) { return t(w); };
}

SpectralFn as_function(ModeModel m) {
  return [m = std::move(m)](double w) { return eval_model_sd(m, w); };
}

}  // namespace usc
