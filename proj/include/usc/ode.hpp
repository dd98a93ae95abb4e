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

// Dormand-Prince 5(4) embedded Runge-Kutta pair with step-size control and
// the 4th-order continuous extension, on complex state vectors.

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace usc::ode {

using Vector = Eigen::VectorXcd;

/// dy = f(t, y). `dy` is pre-sized to y.size().
using Rhs = std::function<void(double t, const Vector& y, Vector& dy)>;

/// Called at each requested output time with the interpolated state.
/// Returning false stops the integration after this output.
using Observer = std::function<bool(std::size_t index, double t, const Vector& y)>;

struct Options {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 0.0;  // 0: automatic
  double h_max = std::numeric_limits<double>::infinity();
  double h_min_relative = 1e-13;  // underflow threshold relative to max(|t|, 1)
  std::size_t max_steps = 50'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

struct Result {
  Vector y;          // state at `t`
  double t = 0.0;    // last output time reached
  bool stopped = false;
  Stats stats;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}
  double last_good_time() const { return last_good_time_; }

 private:
  double last_good_time_;
};

/// Integrates y' = f(t, y) from t0 through the non-decreasing output times
/// `t_out` (all >= t0). Output states come from the dense interpolant, so the
/// internal step sequence does not depend on the output grid.
Result integrate(const Rhs& f, Vector y0, double t0, std::span<const double> t_out, const Observer& observer,
                 const Options& opt = {});

}  // namespace usc::ode
