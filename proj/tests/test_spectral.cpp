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

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <doctest.h>

#include "support.hpp"
#include "usc/spectral.hpp"

using namespace usc;

namespace {

const LorentzianParams kLor{0.58, 0.25, 0.1};
const SingleModeOhmicParams kSm{0.58, 0.25, 0.1};

// Characteristic polynomial coefficients by Faddeev-LeVerrier, monic, highest first.
std::vector<cplx> char_poly(const Eigen::MatrixXcd& a) {
  const auto n = a.rows();
  std::vector<cplx> c(static_cast<std::size_t>(n + 1));
  c[0] = 1.0;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(k - 1)] * id;
    c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

std::vector<cplx> durand_kerner(const std::vector<cplx>& c) {
  const std::size_t n = c.size() - 1;
  std::vector<cplx> z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = std::pow(cplx(0.4, 0.9), static_cast<double>(k));
  const auto p = [&](cplx x) {
    cplx s = 0.0;
    for (const auto& ck : c) s = s * x + ck;
    return s;
  };
  for (int it = 0; it < 2000; ++it) {
    double move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx den = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) den *= z[i] - z[j];
      const cplx dz = p(z[i]) / den;
      z[i] -= dz;
      move = std::max(move, std::abs(dz));
    }
    if (move < 1e-15) break;
  }
  return z;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("lorentzian peak, half width and zero coupling") {
    const double peak = 2 * 0.25 * 0.25 / (kPi * 0.1);
    CHECK(eval_lorentzian(kLor, 0.58) == doctest::Approx(peak).epsilon(1e-14));
    CHECK(peak == doctest::Approx(0.39789).epsilon(1e-5));
    CHECK(eval_lorentzian(kLor, 0.58 + 0.05) == doctest::Approx(peak / 2).epsilon(1e-13));
    CHECK(eval_lorentzian({0.58, 0.0, 0.1}, 0.3) == 0.0);
    CHECK(eval_lorentzian(kLor, -2.0) > 0.0);
  }

  TEST_CASE("single-mode ohmic: cutoff, peak and linear onset") {
    CHECK(eval_single_mode_ohmic(kSm, -1.0) == 0.0);
    CHECK(eval_single_mode_ohmic(kSm, 0.0) == 0.0);
    CHECK(eval_single_mode_ohmic(kSm, 0.58) == doctest::Approx(2 * 0.25 * 0.25 / (kPi * 0.1)).epsilon(1e-14));
    const double a = eval_single_mode_ohmic(kSm, 1e-6), b = eval_single_mode_ohmic(kSm, 2e-6);
    CHECK(b / a == doctest::Approx(2.0).epsilon(1e-9));
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(LorentzianParams({0.5, 0.1, 0.0}).validate(), InputError);
    CHECK_THROWS_AS(LorentzianParams({0.5, -0.1, 0.1}).validate(), InputError);
    CHECK_THROWS_AS(SingleModeOhmicParams({-0.5, 0.1, 0.1}).validate(), InputError);
    CHECK_NOTHROW(kSm.validate());
  }

  TEST_CASE("tabulated interpolation and support") {
    const TabulatedSD t({1.0, 2.0}, {0.5, 1.0});
    CHECK(eval_tabulated(t, 1.5) == doctest::Approx(0.75));
    CHECK(eval_tabulated(t, -0.3) == 0.0);
    CHECK(eval_tabulated(t, 3.0) == 0.0);
    CHECK(eval_tabulated(t, 2.0) == 1.0);
    CHECK_THROWS_AS(TabulatedSD({}, {}), InputError);
    CHECK_THROWS_AS(TabulatedSD({1.0, 1.0}, {0.1, 0.2}), InputError);
    CHECK_THROWS_AS(TabulatedSD({1.0, 2.0}, {0.1, -0.2}), InputError);
    // samples at w <= 0 never leak into the result
    const TabulatedSD s({-1.0, 1.0}, {1.0, 1.0});
    CHECK(s(-0.5) == 0.0);
    CHECK(s(0.5) == doctest::Approx(1.0));
  }

  TEST_CASE("one mode reproduces the lorentzian") {
    const ModeModel m(Eigen::MatrixXd::Constant(1, 1, 0.58), Eigen::VectorXd::Constant(1, 0.1),
                      Eigen::VectorXd::Constant(1, 0.25));
    const double peak = eval_lorentzian(kLor, 0.58);
    double worst = 0.0;
    for (int k = 0; k <= 20000; ++k) {
      const double w = -5.0 + 10.0 * k / 20000;
      worst = std::max(worst, std::abs(eval_model_sd(m, w) - eval_lorentzian(kLor, w)));
    }
    CHECK(worst < 1e-12 * peak);
  }

  TEST_CASE("zero couplings give zero") {
    std::mt19937_64 rng(3);
    ModeModel m = test::random_model(rng, 4);
    m = m.with_scaled_couplings(0.0);
    for (double w : {-3.0, -0.1, 0.0, 0.4, 2.0}) CHECK(eval_model_sd(m, w) == 0.0);
  }

  TEST_CASE("J_mod is non-negative on random models") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> freq(-4.0, 4.0);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const int n = 1 + k % 6;
      const ModeModel m = test::random_model(rng, n);
      for (int s = 0; s < 4; ++s) worst = std::min(worst, eval_model_sd(m, freq(rng)));
      // resonance frequencies are where cancellation would show up first
      for (const auto& z : model_resonances(m)) worst = std::min(worst, eval_model_sd(m, z.real()));
    }
    CHECK(worst >= -1e-12);
  }

  TEST_CASE("sum rule: integral of J_mod equals sum of g_i^2") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 6; ++trial) CHECK(test::sum_rule_defect(test::random_model(rng, 1 + trial)) < 1e-4);
  }

  TEST_CASE("resonances") {
    SUBCASE("single mode") {
      const ModeModel m(Eigen::MatrixXd::Constant(1, 1, 0.58), Eigen::VectorXd::Constant(1, 0.1),
                        Eigen::VectorXd::Constant(1, 0.25));
      const auto r = model_resonances(m);
      REQUIRE(r.size() == 1);
      CHECK(r[0].real() == doctest::Approx(0.58));
      CHECK(r[0].imag() == doctest::Approx(-0.05));
    }
    SUBCASE("decoupled pair") {
      Eigen::MatrixXd w(2, 2);
      w << 0.3, 0.0, 0.0, 1.1;
      const ModeModel m(w, Eigen::Vector2d(0.2, 0.04), Eigen::Vector2d(0.1, 0.1));
      auto r = model_resonances(m);
      std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
      CHECK(std::abs(r[0] - cplx(0.3, -0.1)) < 1e-14);
      CHECK(std::abs(r[1] - cplx(1.1, -0.02)) < 1e-14);
    }
    SUBCASE("random models against characteristic-polynomial roots") {
      std::mt19937_64 rng(21);
      for (int trial = 0; trial < 20; ++trial) {
        const ModeModel m = test::random_model(rng, 4);
        const auto eig = model_resonances(m);
        const auto roots = durand_kerner(char_poly(m.effective_hamiltonian()));
        for (const auto& z : eig) {
          CHECK(z.imag() <= 1e-14);
          double best = 1e300;
          for (const auto& r : roots) best = std::min(best, std::abs(z - r));
          CHECK(best < 1e-8);
        }
      }
    }
  }

  TEST_CASE("ohmic and antisymmetrized lorentzian share support and tail exponent") {
    const auto anti = [](double w) { return w > 0 ? eval_lorentzian(kLor, w) - eval_lorentzian(kLor, -w) : 0.0; };
    for (double w : {-2.0, -0.5, 0.0}) {
      CHECK(eval_single_mode_ohmic(kSm, w) == 0.0);
      CHECK(anti(w) == 0.0);
    }
    const auto slope = [](auto f) { return std::log(f(2e3) / f(1e3)) / std::log(2.0); };
    const double s_sm = slope([](double w) { return eval_single_mode_ohmic(kSm, w); });
    const double s_an = slope(anti);
    CHECK(s_sm == doctest::Approx(s_an).epsilon(1e-3));
    CHECK(s_sm == doctest::Approx(-3.0).epsilon(1e-3));
  }
}
