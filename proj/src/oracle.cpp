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

#include "usc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace usc {

namespace {

using CSparse = Eigen::SparseMatrix<cplx, Eigen::RowMajor, std::int64_t>;

}  // namespace

void DiscretizationSpec::validate() const {
  if (!(omega_min < omega_max)) throw InputError("discretization: omega_min must be < omega_max");
  if (n_points < 2) throw InputError("discretization: n_points must be >= 2");
}

double DiscretizationSpec::recurrence_time() const { return 2.0 * kPi / spacing(); }

ModeModel discretize(const SpectralFn& target, const DiscretizationSpec& d) {
  d.validate();
  const double dw = d.spacing();
  Eigen::VectorXd w(d.n_points), g(d.n_points);
  for (int k = 0; k < d.n_points; ++k) {
    w[k] = d.omega_min + (k + 0.5) * dw;
    const double j = target(w[k]);
    if (!std::isfinite(j) || j < 0.0)
      throw InputError("discretize: spectral density is negative or non-finite at omega=" + std::to_string(w[k]));
    g[k] = std::sqrt(j * dw);
  }
  return ModeModel::closed(std::move(w), std::move(g));
}

OracleResult exact_propagate(const ModeModel& model, const EmitterSpec& e, BasisSpec basis,
                             std::span<const double> times, double recurrence_time, const Tolerances& tol) {
  if (times.empty()) throw InputError("exact_propagate: empty time grid");
  e.validate();
  basis.n_modes = model.n_modes();
  basis.parity = e.initial_state == InitialState::excited ? Parity::odd : Parity::even;
  const Basis b(basis);
  const SparseOp h = build_hamiltonian(model, e, b);
  const CSparse mih = (cplx(0.0, -1.0) * h.cast<cplx>()).eval();

  const auto dim = static_cast<Eigen::Index>(b.size());
  ode::Vector psi0 = ode::Vector::Zero(dim);
  psi0[static_cast<Eigen::Index>(b.vacuum_index(e.initial_state == InitialState::excited))] = 1.0;

  const std::size_t nt = times.size();
  const int nm = model.n_modes();
  OracleResult res;
  res.dimension = b.size();
  Trajectory& tr = res.trajectory;
  tr.oracle = true;
  tr.recurrence_time = recurrence_time;
  tr.recurrence_warning = times.back() > recurrence_time;
  tr.times.assign(times.begin(), times.end());
  tr.emitter_population.resize(nt);
  tr.mode_populations = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nt), nm);
  tr.bath_photons.assign(nt, 0.0);
  tr.purity.resize(nt);
  tr.trace_defect.resize(nt);

  auto observer = [&](std::size_t k, double, const ode::Vector& psi) {
    double pe = 0.0, norm = 0.0;
    auto row = tr.mode_populations.row(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double p = std::norm(psi[static_cast<Eigen::Index>(i)]);
      norm += p;
      if (b.excited(i)) pe += p;
      for (auto m : b.photons(i)) row[m] += p;
    }
    tr.emitter_population[k] = pe;
    tr.purity[k] = norm * norm;
    tr.trace_defect[k] = std::abs(norm - 1.0);
    return true;
  };
  auto rhs = [&](double, const ode::Vector& y, ode::Vector& dy) { dy.noalias() = mih * y; };

  ode::Options opt;
  opt.rtol = tol.rtol;
  opt.atol = tol.atol;
  auto r = ode::integrate(rhs, std::move(psi0), times.front(), times, observer, opt);
  res.stats = r.stats;
  return res;
}

OracleConvergence oracle_convergence(const SpectralFn& target, const DiscretizationSpec& d, const EmitterSpec& e,
                                     const BasisSpec& basis, std::span<const double> times, const Tolerances& tol) {
  OracleConvergence out;
  const auto base = exact_propagate(discretize(target, d), e, basis, times, d.recurrence_time(), tol);

  DiscretizationSpec fine = d;
  fine.n_points *= 2;
  const auto refined = exact_propagate(discretize(target, fine), e, basis, times, fine.recurrence_time(), tol);
  out.window_end = 0.8 * d.recurrence_time();
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] <= out.window_end)
      out.points_delta = std::max(out.points_delta, std::abs(base.trajectory.emitter_population[k] -
                                                             refined.trajectory.emitter_population[k]));

  BasisSpec more = basis;
  more.max_total_excitations += 2;
  const auto deeper = exact_propagate(discretize(target, d), e, more, times, d.recurrence_time(), tol);
  for (std::size_t k = 0; k < times.size(); ++k)
    out.excitation_delta = std::max(out.excitation_delta, std::abs(base.trajectory.emitter_population[k] -
                                                                   deeper.trajectory.emitter_population[k]));
  return out;
}

}  // namespace usc
