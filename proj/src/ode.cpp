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

#include "usc/ode.hpp"

#include <algorithm>
#include <cmath>

namespace usc::ode {

namespace {

// Dormand & Prince (1980) coefficients; dense output from Hairer's DOPRI5.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// |z| without the overflow guard of hypot; state entries are O(1)
inline double modulus(std::complex<double> z) { return std::sqrt(z.real() * z.real() + z.imag() * z.imag()); }

double scaled_rms(const Vector& v, const Vector& y, const Options& opt) {
  if (v.size() == 0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double sk = opt.atol + opt.rtol * modulus(y[i]);
    s += std::norm(v[i]) / (sk * sk);
  }
  return std::sqrt(s / static_cast<double>(v.size()));
}

double initial_step(const Rhs& f, double t0, const Vector& y0, const Vector& f0, const Options& opt, Stats& st) {
  const double dn0 = scaled_rms(y0, y0, opt);
  const double dn1 = scaled_rms(f0, y0, opt);
  double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
  h0 = std::min(h0, opt.h_max);
  Vector y1 = y0 + h0 * f0;
  Vector f1(y0.size());
  f(t0 + h0, y1, f1);
  ++st.rhs_evaluations;
  const double dn2 = scaled_rms(f1 - f0, y0, opt) / h0;
  const double m = std::max(dn1, dn2);
  const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, opt.h_max});
}

}  // namespace

Result integrate(const Rhs& f, Vector y0, double t0, std::span<const double> t_out, const Observer& observer,
                 const Options& opt) {
  for (std::size_t i = 0; i < t_out.size(); ++i) {
    if (t_out[i] < t0 || (i > 0 && t_out[i] < t_out[i - 1]))
      throw std::invalid_argument("integrate: output times must be non-decreasing and >= t0");
  }

  Result res;
  const Eigen::Index n = y0.size();
  Vector y = std::move(y0);
  Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  Vector r2(n), r3(n), r4(n), r5(n), yout(n);

  double t = t0;
  std::size_t oi = 0;
  res.t = t0;

  while (oi < t_out.size() && t_out[oi] == t0) {
    res.t = t0;
    if (observer && !observer(oi++, t0, y)) {
      res.y = y;
      res.stopped = true;
      return res;
    }
  }
  if (oi == t_out.size()) {
    res.y = y;
    return res;
  }

  f(t, y, k1);
  ++res.stats.rhs_evaluations;
  double h = opt.h_init > 0.0 ? std::min(opt.h_init, opt.h_max) : initial_step(f, t, y, k1, opt, res.stats);
  bool last_rejected = false;
  std::size_t steps = 0;

  while (oi < t_out.size()) {
    if (++steps > opt.max_steps) throw IntegrationError("integrate: maximum number of steps exceeded", t);
    h = std::min(h, opt.h_max);
    if (h < opt.h_min_relative * std::max(std::abs(t), 1.0))
      throw IntegrationError("integrate: step size underflow at t=" + std::to_string(t), t);

    ytmp = y + (h * a21) * k1;
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f(t + h, ynew, k7);
    res.stats.rhs_evaluations += 6;

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sk = opt.atol + opt.rtol * std::max(modulus(y[i]), modulus(ynew[i]));
      en += std::norm(err[i]) / (sk * sk);
    }
    en = n > 0 ? std::sqrt(en / static_cast<double>(n)) : 0.0;

    if (!std::isfinite(en)) {
      h *= 0.2;
      ++res.stats.rejected;
      last_rejected = true;
      continue;
    }

    if (en <= 1.0) {
      ++res.stats.accepted;
      const double t_new = t + h;
      if (t_out[oi] <= t_new) {
        r2 = ynew - y;
        r3 = h * k1 - r2;
        r4 = r2 - h * k7 - r3;
        r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (oi < t_out.size() && t_out[oi] <= t_new) {
          const double th = (t_out[oi] - t) / h;
          const double th1 = 1.0 - th;
          yout = y + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
          res.t = t_out[oi];
          if (observer && !observer(oi, t_out[oi], yout)) {
            res.y = yout;
            res.stopped = true;
            return res;
          }
          ++oi;
        }
      }
      t = t_new;
      y.swap(ynew);
      k1.swap(k7);
      const double fac_max = last_rejected ? 1.0 : 5.0;
      const double fac = en == 0.0 ? fac_max : std::clamp(0.9 * std::pow(en, -0.2), 0.2, fac_max);
      h *= fac;
      last_rejected = false;
    } else {
      ++res.stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
    }
  }
  res.y = yout;
  return res;
}

}  // namespace usc::ode
