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

// Subcommands of the usc-lindblad tool. Each returns a process exit status
// and never throws.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace usc::cli {

enum Exit : int { kOk = 0, kInputError = 1, kNotConverged = 2, kResourceCap = 3 };

struct Options {
  std::filesystem::path config;
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> floor;                     // compare
  std::optional<std::filesystem::path> reference;  // sweep: reuse an oracle trajectory
  std::vector<std::filesystem::path> inputs;       // compare: trajectory a, reference b
};

/// model.json, fit_report.csv, resonances.csv, fit.svg.
/// 0 iff the fit converged with no negative-frequency violation, else 2.
int cmd_fit(const Options& o, std::ostream& log, std::ostream& err);

/// trajectory.csv, trajectory.svg, simulate.json. 3 when the basis exceeds
/// its cap, 2 when a requested truncation or stationarity check fails.
int cmd_simulate(const Options& o, std::ostream& log, std::ostream& err);

/// oracle.csv, oracle.svg and, if requested, oracle_convergence.json.
int cmd_oracle(const Options& o, std::ostream& log, std::ostream& err);

/// error.csv, error.svg for inputs[0] against the reference inputs[1].
int cmd_compare(const Options& o, std::ostream& log, std::ostream& err);

/// sweep.csv, sweep.svg (plus oracle.csv unless a reference is given).
int cmd_sweep(const Options& o, std::ostream& log, std::ostream& err);

}  // namespace usc::cli
