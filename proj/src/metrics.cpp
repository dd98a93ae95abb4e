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

#include "usc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace usc {

double interpolate(std::span<const double> x, std::span<const double> y, double at) {
  if (x.empty() || x.size() != y.size()) throw InputError("interpolate: empty or mismatched samples");
  if (at <= x.front()) return y.front();
  if (at >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const auto k = static_cast<std::size_t>(it - x.begin());
  const double s = (at - x[k - 1]) / (x[k] - x[k - 1]);
  return (1.0 - s) * y[k - 1] + s * y[k];
}

ErrorReport relative_error(const Trajectory& a, const Trajectory& b, double floor) {
  if (!(floor > 0.0)) throw InputError("relative_error: floor must be > 0");
  if (a.size() == 0 || b.size() == 0) throw InputError("relative_error: empty trajectory");
  const double lo = a.times.front(), hi = a.times.back();
  const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  if (b.times.back() < lo - slack || b.times.front() > hi + slack)
    throw InputError("relative_error: trajectories have disjoint time ranges");

  ErrorReport rep;
  rep.normalization_floor = floor;
  const bool same = a.times == b.times;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double t = b.times[k];
    if (t < lo - slack || t > hi + slack) continue;
    const double pa = same ? a.emitter_population[k] : interpolate(a.times, a.emitter_population, t);
    const double pb = b.emitter_population[k];
    const double e = std::abs(pa - pb) / std::max(pb, floor);
    rep.times.push_back(t);
    rep.rel_error_t.push_back(e);
    rep.max_rel_error = std::max(rep.max_rel_error, e);
    rep.avg_rel_error += e;
  }
  rep.avg_rel_error /= static_cast<double>(rep.rel_error_t.size());
  return rep;
}

double late_slope(std::span<const double> t, std::span<const double> y, double fraction) {
  if (t.size() != y.size() || t.size() < 2) throw InputError("late_slope: need at least two samples");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InputError("late_slope: fraction must be in (0, 1]");
  const auto n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(t.size()))));
  const std::size_t k0 = t.size() - n;
  double mt = 0.0, my = 0.0;
  for (std::size_t k = k0; k < t.size(); ++k) {
    mt += t[k];
    my += y[k];
  }
  mt /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = k0; k < t.size(); ++k) {
    sxy += (t[k] - mt) * (y[k] - my);
    sxx += (t[k] - mt) * (t[k] - mt);
  }
  return sxy / sxx;
}

double exponential_rate(std::span<const double> t, std::span<const double> p, double t_lo, double t_hi) {
  std::vector<double> x, y;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] >= t_lo && t[k] <= t_hi && p[k] > 0.0) {
      x.push_back(t[k]);
      y.push_back(std::log(p[k]));
    }
  if (x.size() < 2) throw InputError("exponential_rate: fewer than two usable samples in the window");
  return -late_slope(x, y, 1.0);
}

std::vector<SweepCell> threshold_sweep(const SpectralFn& target, const Trajectory& oracle,
                                       const std::vector<int>& n_modes_list, const std::vector<double>& thresholds,
                                       const FitConfig& base, const SweepDynamics& dyn) {
  std::vector<SweepCell> cells;
  for (int n : n_modes_list)
    for (double thr : thresholds) {
      SweepCell c;
      c.n_modes = n;
      c.threshold = thr;
      try {
        FitConfig cfg = base;
        cfg.n_modes = n;
        cfg.neg_threshold = thr;
        const FitResult fit = fit_model(target, cfg);
        c.pos_residual = fit.pos_residual;
        c.neg_violation = fit.neg_violation;
        if (!fit.converged) c.status = "not_converged";
        BasisSpec basis;
        basis.n_modes = n;
        basis.max_total_excitations = dyn.max_total_excitations;
        basis.dimension_cap = dyn.dimension_cap;
        const auto run = simulate(fit.model, dyn.emitter, basis, oracle.times, dyn.tol);
        const auto err = relative_error(run.trajectory, oracle, dyn.floor);
        c.avg_rel_error = err.avg_rel_error;
        c.max_rel_error = err.max_rel_error;
      } catch (const std::exception& ex) {
        c.avg_rel_error = c.max_rel_error = std::numeric_limits<double>::quiet_NaN();
        c.status = std::string("error: ") + ex.what();
      }
      cells.push_back(std::move(c));
    }
  return cells;
}

}  // namespace usc
