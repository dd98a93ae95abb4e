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

// File formats: tabulated spectral densities, model JSON documents and the
// CSV outputs of the command-line tool. Numbers are written with 17
// significant digits so every file reads back bit-exactly.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "usc/dynamics.hpp"
#include "usc/fit.hpp"
#include "usc/metrics.hpp"
#include "usc/spectral.hpp"

namespace usc {

/// Parses "omega,j" rows. A header line and '#' comments are allowed. Errors
/// carry "<source>:<line>:" prefixes.
TabulatedSD parse_tabulated_csv(std::istream& in, const std::string& source = "<input>");
TabulatedSD read_tabulated_csv(const std::filesystem::path& path);

struct ModelDocument {
  ModeModel model;
  EnergyUnit units = EnergyUnit::meV;
};

std::string model_to_json(const ModeModel& m, EnergyUnit units, const FitResult* fit = nullptr);
ModelDocument model_from_json(const std::string& text, const std::string& source = "<input>");
void write_model_json(const std::filesystem::path& path, const ModeModel& m, EnergyUnit units,
                      const FitResult* fit = nullptr);
ModelDocument read_model_json(const std::filesystem::path& path);

/// "t,P_e,P_bath,purity,trace_defect,n_1..n_N,t_fs" preceded by '#' metadata
/// lines; the first one carries a timestamp.
void write_trajectory_csv(std::ostream& out, const Trajectory& tr, EnergyUnit units);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr, EnergyUnit units);
Trajectory parse_trajectory_csv(std::istream& in, const std::string& source = "<input>");
Trajectory read_trajectory_csv(const std::filesystem::path& path);

void write_fit_report_csv(const std::filesystem::path& path, const FitReport& rep);
void write_resonances_csv(const std::filesystem::path& path, const std::vector<cplx>& res);

void write_error_csv(std::ostream& out, const ErrorReport& rep);
void write_error_csv(const std::filesystem::path& path, const ErrorReport& rep);

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepCell>& cells);
std::vector<SweepCell> parse_sweep_csv(std::istream& in, const std::string& source = "<input>");

/// Current UTC time, ISO 8601.
std::string timestamp();

}  // namespace usc
