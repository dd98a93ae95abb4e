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
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>
#include <doctest.h>

#include "support.hpp"
#include "usc/fock.hpp"

using namespace usc;

namespace {

Eigen::MatrixXd dense(const SparseOp& a) { return Eigen::MatrixXd(a); }

// Brute force: all occupation vectors with entries <= n_exc.
std::size_t brute_count(int n_modes, int n_exc) {
  std::size_t count = 0;
  std::vector<int> occ(static_cast<std::size_t>(n_modes), 0);
  while (true) {
    int s = 0;
    for (int v : occ) s += v;
    if (s <= n_exc) ++count;       // ground
    if (s + 1 <= n_exc) ++count;   // excited
    int k = 0;
    while (k < n_modes && ++occ[static_cast<std::size_t>(k)] > n_exc) occ[static_cast<std::size_t>(k++)] = 0;
    if (k == n_modes) break;
  }
  return count;
}

}  // namespace

TEST_SUITE("fock") {
  TEST_CASE("small bases in enumeration order") {
    const Basis b({1, 1});
    REQUIRE(b.size() == 3);
    CHECK(b.state(0) == FockState{false, {0}});
    CHECK(b.state(1) == FockState{true, {0}});
    CHECK(b.state(2) == FockState{false, {1}});
    CHECK(Basis({2, 1}).size() == 4);
  }

  TEST_CASE("state count matches brute-force enumeration") {
    CHECK(basis_count({10, 3}) == brute_count(10, 3));
    CHECK(Basis({10, 3}).size() == brute_count(10, 3));
    CHECK(Basis({3, 5}).size() == brute_count(3, 5));
    CHECK(Basis({1, 7}).size() == brute_count(1, 7));
  }

  TEST_CASE("parity sectors partition the basis") {
    for (int n_exc : {1, 2, 3, 4}) {
      const BasisSpec all{4, n_exc};
      BasisSpec odd = all, even = all;
      odd.parity = Parity::odd;
      even.parity = Parity::even;
      const Basis bo(odd), be(even);
      CHECK(bo.size() + be.size() == Basis(all).size());
      for (std::size_t i = 0; i < bo.size(); ++i) CHECK(bo.total_excitations(i) % 2 == 1);
      for (std::size_t i = 0; i < be.size(); ++i) CHECK(be.total_excitations(i) % 2 == 0);
    }
  }

  TEST_CASE("index -> state -> index is the identity") {
    const Basis b({4, 4});
    std::set<std::vector<int>> seen;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const FockState s = b.state(i);
      CHECK(s.total_excitations() <= 4);
      const auto back = b.index_of(s);
      REQUIRE(back.has_value());
      CHECK(*back == i);
      auto key = s.occupations;
      key.push_back(s.excited ? 1 : 0);
      CHECK(seen.insert(key).second);
    }
    CHECK_FALSE(b.index_of(FockState{true, {2, 2, 0, 0}}).has_value());
  }

  TEST_CASE("dimension cap and invalid specs") {
    BasisSpec s{20, 4};
    s.dimension_cap = 1000;
    CHECK_THROWS_AS(Basis{s}, ResourceCapError);
    CHECK_THROWS_AS(Basis(BasisSpec{0, 2}), InputError);
    CHECK_THROWS_AS(Basis(BasisSpec{2, 0}), InputError);
  }

  TEST_CASE("annihilation operators") {
    const Basis b({3, 4});
    const std::size_t vac = b.vacuum_index(false);
    for (int i = 0; i < 3; ++i) {
      const Eigen::MatrixXd a = dense(annihilation(b, i));
      CHECK(a.col(static_cast<Eigen::Index>(vac)).norm() == 0.0);
      // lowers the total excitation number by exactly one
      for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
          if (a(r, c) != 0.0)
            CHECK(b.total_excitations(static_cast<std::size_t>(r)) + 1 ==
                  b.total_excitations(static_cast<std::size_t>(c)));
    }
  }

  TEST_CASE("commutators on interior states") {
    const Basis b({3, 4});
    const auto dim = static_cast<Eigen::Index>(b.size());
    std::vector<Eigen::MatrixXd> a;
    for (int i = 0; i < 3; ++i) a.push_back(dense(annihilation(b, i)));
    for (Eigen::Index c = 0; c < dim; ++c) {
      if (b.total_excitations(static_cast<std::size_t>(c)) >= 4) continue;  // boundary shell
      Eigen::VectorXd e = Eigen::VectorXd::Unit(dim, c);
      for (int i = 0; i < 3; ++i) {
        const Eigen::VectorXd comm = a[i] * (a[i].transpose() * e) - a[i].transpose() * (a[i] * e);
        CHECK((comm - e).norm() < 1e-14);
        for (int j = 0; j < 3; ++j) {
          if (i == j) continue;
          const Eigen::VectorXd x = a[i] * (a[j].transpose() * e) - a[j].transpose() * (a[i] * e);
          CHECK(x.norm() < 1e-14);
        }
      }
    }
    // on the boundary shell the truncation breaks [a, a^+] = 1
    const std::size_t top = *b.index_of(FockState{false, {4, 0, 0}});
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(dim, static_cast<Eigen::Index>(top));
    const Eigen::VectorXd comm = a[0] * (a[0].transpose() * e) - a[0].transpose() * (a[0] * e);
    CHECK((comm - e).norm() > 0.5);
  }

  TEST_CASE("hamiltonian") {
    SUBCASE("hermitian with counter-rotating terms") {
      std::mt19937_64 rng(2);
      const ModeModel m = test::random_model(rng, 3);
      const Basis b({3, 4});
      const Eigen::MatrixXd h = dense(build_hamiltonian(m, {0.7}, b));
      CHECK((h - h.transpose()).norm() == 0.0);
      // sigma_x (a^+ + a) connects |e;0> to |g;1_i>, and |g;0> to |e;1_i>
      const auto e0 = static_cast<Eigen::Index>(b.vacuum_index(true));
      const auto g0 = static_cast<Eigen::Index>(b.vacuum_index(false));
      const auto e1 = static_cast<Eigen::Index>(*b.index_of(FockState{true, {1, 0, 0}}));
      const auto g1 = static_cast<Eigen::Index>(*b.index_of(FockState{false, {1, 0, 0}}));
      CHECK(h(e0, g1) == doctest::Approx(m.g()(0)));
      CHECK(h(g0, e1) == doctest::Approx(m.g()(0)));
    }
    SUBCASE("uncoupled spectrum") {
      Eigen::MatrixXd w(2, 2);
      w << 0.4, 0.0, 0.0, 0.9;
      const ModeModel m(w, Eigen::Vector2d(0.1, 0.1), Eigen::Vector2d::Zero());
      const Basis b({2, 3});
      const Eigen::MatrixXd h = dense(build_hamiltonian(m, {0.6}, b));
      CHECK((h - Eigen::MatrixXd(h.diagonal().asDiagonal())).norm() == 0.0);
      for (std::size_t i = 0; i < b.size(); ++i) {
        const double expect = (b.excited(i) ? 0.3 : -0.3) + 0.4 * b.occupation(i, 0) + 0.9 * b.occupation(i, 1);
        CHECK(h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) == doctest::Approx(expect));
      }
    }
    SUBCASE("ultrastrong ground state is dressed below -omega_e/2") {
      const ModeModel m(Eigen::MatrixXd::Constant(1, 1, 0.58), Eigen::VectorXd::Constant(1, 0.1),
                        Eigen::VectorXd::Constant(1, 0.25));
      const Basis b({1, 8});
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(build_hamiltonian(m, {0.58}, b)));
      CHECK(es.eigenvalues()(0) < -0.29 - 1e-3);
    }
    SUBCASE("dimension mismatch") {
      std::mt19937_64 rng(2);
      const ModeModel m = test::random_model(rng, 3);
      CHECK_THROWS_AS(build_hamiltonian(m, {0.7}, Basis({2, 2})), DimensionError);
      CHECK_THROWS_AS(build_jump_operators(m, Basis({2, 2})), DimensionError);
    }
  }

  TEST_CASE("jump operators carry the mode decay rates") {
    std::mt19937_64 rng(8);
    const ModeModel m = test::random_model(rng, 3);
    const Basis b({3, 2});
    const auto jumps = build_jump_operators(m, b);
    REQUIRE(jumps.size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(jumps[static_cast<std::size_t>(i)].rate == m.kappa()(i));
      CHECK((dense(jumps[static_cast<std::size_t>(i)].op) - dense(annihilation(b, i))).norm() == 0.0);
    }
  }
}
