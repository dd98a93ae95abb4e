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

#include "usc/commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "usc/config.hpp"
#include "usc/dynamics.hpp"
#include "usc/fit.hpp"
#include "usc/io.hpp"
#include "usc/metrics.hpp"
#include "usc/oracle.hpp"
#include "usc/svg.hpp"

namespace usc::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <class F>
int guarded(std::ostream& err, F&& f) {
  try {
    return f();
  } catch (const ResourceCapError& e) {
    err << "error: " << e.what() << "\n";
    return kResourceCap;
  } catch (const ode::IntegrationError& e) {
    err << "error: " << e.what() << " (last good time " << e.last_good_time() << ")\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

RunConfig load(const Options& o) {
  RunConfig c = load_run_config(o.config);
  if (o.out) c.outputs = *o.out;
  if (o.seed) c.fit.rng_seed = *o.seed;
  return c;
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

std::string unit_label(const RunConfig& c) { return std::string(to_string(c.units)); }

void plot_trajectory(const fs::path& path, const Trajectory& tr, const std::string& title, const RunConfig& c) {
  svg::Plot p;
  p.title = title;
  p.x_label = "t [hbar/" + unit_label(c) + "]";
  p.y_label = "population";
  p.series.push_back({"P_e", tr.times, tr.emitter_population, false});
  p.series.push_back({"P_bath", tr.times, tr.bath_photons, false});
  p.series.push_back({"P_bath + sum n_i", tr.times, tr.total_photons(), false});
  if (tr.recurrence_time) p.vlines.push_back(0.8 * *tr.recurrence_time);
  svg::write(path, p);
}

ModelDocument load_model(const Options& o, const RunConfig& c) {
  const fs::path path = o.model ? *o.model : c.outputs / "model.json";
  ModelDocument doc = read_model_json(path);
  if (doc.units != c.units)
    throw InputError(path.string() + ": model units " + std::string(to_string(doc.units)) + " differ from config units " +
                     unit_label(c));
  if (doc.model.n_modes() != c.fit.n_modes)
    throw InputError(path.string() + ": model has " + std::to_string(doc.model.n_modes()) +
                     " modes, config fit.n_modes is " + std::to_string(c.fit.n_modes));
  return doc;
}

const OracleConfig& need_oracle(const RunConfig& c) {
  if (!c.oracle) throw InputError("config has no 'oracle' section");
  return *c.oracle;
}

OracleResult run_oracle(const RunConfig& c, const SpectralFn& target, const std::vector<double>& times,
                        std::ostream& log) {
  const OracleConfig& oc = need_oracle(c);
  const ModeModel bath = discretize(target, oc.discretization);
  BasisSpec b;
  b.n_modes = oc.discretization.n_points;
  b.max_total_excitations = oc.max_total_excitations;
  b.dimension_cap = c.basis.dimension_cap;
  const double t_rec = oc.discretization.recurrence_time();
  log << "oracle: " << oc.discretization.n_points << " bath modes, N_exc " << oc.max_total_excitations
      << ", recurrence time " << t_rec << "\n";
  OracleResult r = exact_propagate(bath, c.emitter, b, times, t_rec, c.dynamics.tol);
  log << "oracle: dimension " << r.dimension << ", " << r.stats.accepted << " steps\n";
  if (times.back() > 0.8 * t_rec)
    log << "warning: t_max " << times.back() << " exceeds 0.8 T_rec = " << 0.8 * t_rec
        << "; comparisons past that point are not trustworthy\n";
  return r;
}

}  // namespace

int cmd_fit(const Options& o, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = load(o);
    const SpectralFn target = c.target_function();
    log << "fit: N=" << c.fit.n_modes << ", threshold " << c.fit.neg_threshold << " " << unit_label(c) << ", "
        << c.fit.n_restarts << " restarts\n";
    const FitResult r = fit_model(target, c.fit);
    const FitReport rep = fit_report(r, target, c.fit);

    write_model_json(c.outputs / "model.json", r.model, c.units, &r);
    write_fit_report_csv(c.outputs / "fit_report.csv", rep);
    write_resonances_csv(c.outputs / "resonances.csv", rep.resonances);
    if (c.plots) {
      svg::Plot p;
      p.title = "spectral density fit";
      p.x_label = "omega [" + unit_label(c) + "]";
      p.y_label = "J [" + unit_label(c) + "]";
      p.log_y = true;
      svg::Series tgt{"target", {}, {}, false}, mod{"model", {}, {}, false}, neg{"model (w<0, |w|)", {}, {}, false};
      for (const auto& row : rep.rows) {
        if (row.negative) {
          neg.x.push_back(row.omega);
          neg.y.push_back(row.model);
        } else {
          tgt.x.push_back(row.omega);
          tgt.y.push_back(row.target);
          mod.x.push_back(row.omega);
          mod.y.push_back(row.model);
        }
      }
      p.series = {tgt, mod, neg};
      for (const auto& z : rep.resonances) p.vlines.push_back(z.real());
      svg::write(c.outputs / "fit.svg", p);
    }

    log << "fit: restart " << r.restart_index << ", objective " << r.objective << ", pos_residual " << r.pos_residual
        << ", max J(w<0) " << r.max_negative << ", neg_violation " << r.neg_violation
        << (r.converged ? "" : ", NOT converged") << "\n";
    log << "wrote " << (c.outputs / "model.json").string() << "\n";
    return r.converged && r.neg_violation == 0.0 ? kOk : kNotConverged;
  });
}

int cmd_simulate(const Options& o, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = load(o);
    const ModelDocument doc = load_model(o, c);
    const auto times = c.dynamics.grid();
    BasisSpec b = c.basis;
    b.n_modes = doc.model.n_modes();

    const PropagationResult run = simulate(doc.model, c.emitter, b, times, c.dynamics.tol);
    write_trajectory_csv(c.outputs / "trajectory.csv", run.trajectory, c.units);
    if (c.plots) plot_trajectory(c.outputs / "trajectory.svg", run.trajectory, "Lindblad dynamics", c);
    log << "simulate: dimension " << run.final_state.rho.rows() << ", " << run.stats.accepted << " steps, final P_e "
        << run.trajectory.emitter_population.back() << "\n";

    json summary = {{"dimension", run.final_state.rho.rows()},
                    {"steps", run.stats.accepted},
                    {"final_emitter_population", run.trajectory.emitter_population.back()},
                    {"final_total_photons", run.trajectory.total_photons().back()}};
    int status = kOk;

    if (c.dynamics.truncation_tolerance > 0.0) {
      const TruncationCheck tc =
          truncation_convergence(doc.model, c.emitter, b, times, c.dynamics.truncation_tolerance, c.dynamics.tol);
      summary["truncation"] = {{"max_total_excitations", tc.max_total_excitations},
                               {"delta", tc.delta},
                               {"tolerance", c.dynamics.truncation_tolerance},
                               {"accepted", tc.accepted}};
      log << "simulate: N_exc " << tc.max_total_excitations << " -> " << tc.max_total_excitations + 1
          << " changes P_e by " << tc.delta << (tc.accepted ? "" : " (above tolerance)") << "\n";
      if (!tc.accepted) status = kNotConverged;
    }

    if (c.dynamics.steady_state_horizon > 0.0) {
      BasisSpec full = b;
      full.parity = Parity::both;
      const Basis basis(full);
      const OpenSystem sys = make_open_system(doc.model, c.emitter, basis);
      const SteadyStateResult ss = steady_state(initial_state(basis, c.emitter), sys, c.dynamics.steady_state_horizon,
                                                c.dynamics.stationarity_tol, c.dynamics.tol);
      const double ov = overlap(ss.state, lowest_excitation_eigenstate(sys.hamiltonian, basis));
      summary["steady_state"] = {{"impurity", 1.0 - ss.state.purity()},
                                 {"overlap_lowest_excitation_eigenstate", ov},
                                 {"residual", ss.residual},
                                 {"time", ss.time},
                                 {"converged", ss.converged}};
      log << "steady state: 1 - Tr rho^2 = " << 1.0 - ss.state.purity() << ", overlap " << ov << ", residual "
          << ss.residual << (ss.converged ? "" : " (horizon reached)") << "\n";
      if (!ss.converged) status = kNotConverged;
    }

    write_json(c.outputs / "simulate.json", summary);
    log << "wrote " << (c.outputs / "trajectory.csv").string() << "\n";
    return status;
  });
}

int cmd_oracle(const Options& o, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = load(o);
    const SpectralFn target = c.target_function();
    const auto times = c.dynamics.grid();
    const OracleResult r = run_oracle(c, target, times, log);
    write_trajectory_csv(c.outputs / "oracle.csv", r.trajectory, c.units);
    if (c.plots) plot_trajectory(c.outputs / "oracle.svg", r.trajectory, "discretized-bath reference", c);

    if (c.oracle->convergence_check) {
      BasisSpec b;
      b.n_modes = c.oracle->discretization.n_points;
      b.max_total_excitations = c.oracle->max_total_excitations;
      b.dimension_cap = c.basis.dimension_cap;
      const OracleConvergence cv =
          oracle_convergence(target, c.oracle->discretization, c.emitter, b, times, c.dynamics.tol);
      write_json(c.outputs / "oracle_convergence.json", {{"n_points", c.oracle->discretization.n_points},
                                                         {"points_delta", cv.points_delta},
                                                         {"points_window_end", cv.window_end},
                                                         {"max_total_excitations", c.oracle->max_total_excitations},
                                                         {"excitation_delta", cv.excitation_delta},
                                                         {"accepted", cv.points_delta < 1e-3}});
      log << "oracle: doubling n_points changes P_e by " << cv.points_delta << " (t <= " << cv.window_end
          << "), raising N_exc by " << cv.excitation_delta << "\n";
      if (!(cv.points_delta < 1e-3)) {
        log << "warning: oracle not converged in n_points\n";
        return static_cast<int>(kNotConverged);
      }
    }
    log << "wrote " << (c.outputs / "oracle.csv").string() << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_compare(const Options& o, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (o.inputs.size() != 2) throw InputError("compare needs two trajectory files: <a> <reference>");
    double floor = 1e-3;
    fs::path out = "out";
    bool plots = true;
    if (!o.config.empty()) {
      const RunConfig c = load(o);
      floor = c.error_floor;
      out = c.outputs;
      plots = c.plots;
    }
    if (o.out) out = *o.out;
    if (o.floor) floor = *o.floor;
    if (!(floor > 0.0)) throw InputError("floor must be > 0");

    const Trajectory a = read_trajectory_csv(o.inputs[0]);
    const Trajectory b = read_trajectory_csv(o.inputs[1]);
    const ErrorReport rep = relative_error(a, b, floor);
    write_error_csv(out / "error.csv", rep);
    if (plots) {
      svg::Plot p;
      p.title = "relative error of P_e";
      p.x_label = "t";
      p.y_label = "relative error";
      p.log_y = true;
      p.series.push_back({"eps(t)", rep.times, rep.rel_error_t, false});
      svg::write(out / "error.svg", p);
    }
    if (b.recurrence_time && rep.times.back() > 0.8 * *b.recurrence_time)
      log << "warning: comparison extends past 0.8 T_rec of the reference\n";
    log << "compare: avg " << rep.avg_rel_error << ", max " << rep.max_rel_error << " (floor " << floor << ")\n";
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const Options& o, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = load(o);
    if (!c.sweep) throw InputError(o.config.string() + ": config has no 'sweep' section");
    const SpectralFn target = c.target_function();

    Trajectory oracle;
    if (o.reference) {
      oracle = read_trajectory_csv(*o.reference);
    } else {
      oracle = run_oracle(c, target, c.dynamics.grid(), log).trajectory;
      write_trajectory_csv(c.outputs / "oracle.csv", oracle, c.units);
    }

    SweepDynamics dyn;
    dyn.emitter = c.emitter;
    dyn.max_total_excitations = c.basis.max_total_excitations;
    dyn.dimension_cap = c.basis.dimension_cap;
    dyn.tol = c.dynamics.tol;
    dyn.floor = c.error_floor;
    const auto cells = threshold_sweep(target, oracle, c.sweep->n_modes, c.sweep->thresholds, c.fit, dyn);
    write_sweep_csv(c.outputs / "sweep.csv", cells);

    if (c.plots) {
      svg::Plot p;
      p.title = "average relative error vs threshold";
      p.x_label = "log10 threshold [" + unit_label(c) + "]";
      p.y_label = "avg relative error";
      p.log_y = true;
      for (int n : c.sweep->n_modes) {
        svg::Series s{"N=" + std::to_string(n), {}, {}, false};
        for (const auto& cell : cells)
          if (cell.n_modes == n) {
            s.x.push_back(std::log10(cell.threshold));
            s.y.push_back(cell.avg_rel_error);
          }
        p.series.push_back(s);
      }
      svg::write(c.outputs / "sweep.svg", p);
    }
    int failed = 0;
    for (const auto& cell : cells) {
      log << "sweep: N=" << cell.n_modes << " thr=" << cell.threshold << " avg " << cell.avg_rel_error << " max "
          << cell.max_rel_error << " [" << cell.status << "]\n";
      failed += cell.status == "ok" ? 0 : 1;
    }
    log << "wrote " << (c.outputs / "sweep.csv").string() << "\n";
    return failed == 0 ? static_cast<int>(kOk) : static_cast<int>(kNotConverged);
  });
}

}  // namespace usc::cli
