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

// Run configuration for the command-line tool. The JSON layout is published
// in configs/run_config.schema.json; load_run_config checks it field by field
// and reports the offending JSON path.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "usc/dynamics.hpp"
#include "usc/fit.hpp"
#include "usc/oracle.hpp"
#include "usc/spectral.hpp"

namespace usc {

struct TabulatedTarget {
  std::filesystem::path path;  // resolved against the config file's directory
};

using TargetSpec = std::variant<LorentzianParams, SingleModeOhmicParams, TabulatedTarget>;

/// Frequency grids for the fit, before they are expanded into FitConfig.
struct FitGrids {
  double pos_lo = 0.0;
  double pos_hi = 1.0;
  int pos_points = 2000;
  bool suppress_negative = true;
  double neg_near = 0.0;  // 0: 1e-3 omega_e
  double neg_edge = 0.0;  // 0: pos_hi
  int neg_points = 400;
};

struct DynamicsConfig {
  double t_max = 100.0;
  int n_outputs = 501;
  Tolerances tol;
  double truncation_tolerance = 0.0;  // > 0: run the N_exc+1 check
  double steady_state_horizon = 0.0;  // > 0: also compute the steady state
  double stationarity_tol = 1e-6;

  std::vector<double> grid() const;
};

struct OracleConfig {
  DiscretizationSpec discretization;
  int max_total_excitations = 3;
  bool convergence_check = false;
};

struct SweepConfig {
  std::vector<int> n_modes;
  std::vector<double> thresholds;
};

struct RunConfig {
  EnergyUnit units = EnergyUnit::meV;
  TargetSpec target = SingleModeOhmicParams{};
  EmitterSpec emitter;
  FitGrids grids;
  FitConfig fit;  // grids filled by load_run_config
  BasisSpec basis;
  DynamicsConfig dynamics;
  std::optional<OracleConfig> oracle;
  std::optional<SweepConfig> sweep;
  double error_floor = 1e-3;
  std::filesystem::path outputs = "out";
  bool plots = true;

  /// Evaluator for the configured target. Reads tabulated files.
  SpectralFn target_function() const;
};

/// Parses and validates a config document. `base_dir` anchors relative paths.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                           const std::string& source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace usc
