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

// Shared helpers for the unit tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "usc/spectral.hpp"

namespace test {

inline usc::ModeModel random_model(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> diag(0.1, 2.0), off(-0.2, 0.2), kap(0.02, 0.5), cpl(0.0, 0.4);
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i) {
    w(i, i) = diag(rng);
    for (int j = 0; j < i; ++j) w(i, j) = w(j, i) = off(rng);
  }
  Eigen::VectorXd k(n), g(n);
  for (int i = 0; i < n; ++i) {
    k(i) = kap(rng);
    g(i) = cpl(rng);
  }
  return usc::ModeModel(w, k, g);
}

// Adaptive Simpson, absolute tolerance.
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol) return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  // split into panels so narrow peaks are not stepped over by the first estimate
  const int panels = 400;
  double s = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double x0 = a + (b - a) * k / panels, x1 = a + (b - a) * (k + 1) / panels;
    const double f0 = f(x0), f1 = f(x1), fm = f(0.5 * (x0 + x1));
    s += simpson(f, x0, x1, f0, fm, f1, (x1 - x0) / 6 * (f0 + 4 * fm + f1), tol / panels, 40);
  }
  return s;
}

/// |integral of J_mod - sum g_i^2| / sum g_i^2, quadrature on [-W, W] plus the tail.
inline double sum_rule_defect(const usc::ModeModel& m) {
  double span = 0.0, kmax = 0.0;
  for (const auto& z : usc::model_resonances(m)) span = std::max(span, std::abs(z.real()));
  for (int i = 0; i < m.n_modes(); ++i) kmax = std::max(kmax, m.kappa()(i));
  const double big = 50.0 * (span + kmax);
  const double g2 = m.g().squaredNorm();
  const double inner = integrate([&](double w) { return usc::eval_model_sd(m, w); }, -big, big, 1e-9 * g2);
  // J ~ (1/pi) sum g_i^2 kappa_i / 2 / w^2 beyond the window
  double tail = 0.0;
  for (int i = 0; i < m.n_modes(); ++i) tail += m.g()(i) * m.g()(i) * m.kappa()(i);
  tail /= usc::kPi * big;
  return std::abs(inner + tail - g2) / g2;
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("usc_lindblad_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace test
