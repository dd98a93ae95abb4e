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

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace usc {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Malformed or inconsistent user input (bad config, bad table, invalid parameters).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested computation would exceed a configured resource cap.
class ResourceCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands with incompatible dimensions.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Energy unit shared by every frequency, rate and spectral-density value in a run.
/// Times are measured in hbar / unit.
enum class EnergyUnit { meV, eV };

/// hbar in (unit * fs).
constexpr double hbar_unit_fs(EnergyUnit u) {
  return u == EnergyUnit::meV ? 658.2119569 : 0.6582119569;
}

/// Converts a time in hbar/unit to femtoseconds.
constexpr double to_femtoseconds(double t, EnergyUnit u) { return t * hbar_unit_fs(u); }

std::string_view to_string(EnergyUnit u);
EnergyUnit parse_energy_unit(std::string_view s);

}  // namespace usc
