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

#include "usc/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace usc {

namespace {

using Triplet = Eigen::Triplet<double, std::int64_t>;

bool shell_allowed(Parity p, int k) {
  switch (p) {
    case Parity::both: return true;
    case Parity::even: return k % 2 == 0;
    case Parity::odd: return k % 2 == 1;
  }
  return true;
}

// Multisets of size k over n symbols: C(n+k-1, k). Saturates at max size_t.
std::size_t multiset_count(std::size_t n, std::size_t k) {
  if (k == 0) return 1;
  if (n == 0) return 0;
  long double c = 1.0L;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<long double>(n + i - 1) / static_cast<long double>(i);
  if (c >= static_cast<long double>(std::numeric_limits<std::size_t>::max()) / 2) return std::numeric_limits<std::size_t>::max() / 2;
  return static_cast<std::size_t>(std::llround(c));
}

// Calls f(span) for every sorted multiset of size k over [0, n), lexicographically.
template <class F>
void for_each_multiset(int n, int k, F&& f) {
  std::vector<std::uint16_t> cur(static_cast<std::size_t>(k), 0);
  if (k == 0) {
    f(std::span<const std::uint16_t>(cur));
    return;
  }
  while (true) {
    f(std::span<const std::uint16_t>(cur));
    int pos = k - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == n - 1) --pos;
    if (pos < 0) return;
    const std::uint16_t v = static_cast<std::uint16_t>(cur[static_cast<std::size_t>(pos)] + 1);
    for (int i = pos; i < k; ++i) cur[static_cast<std::size_t>(i)] = v;
  }
}

int count_of(std::span<const std::uint16_t> ph, int mode) {
  const auto r = std::equal_range(ph.begin(), ph.end(), static_cast<std::uint16_t>(mode));
  return static_cast<int>(r.second - r.first);
}

void insert_sorted(std::vector<std::uint16_t>& v, int mode) {
  const auto m = static_cast<std::uint16_t>(mode);
  v.insert(std::upper_bound(v.begin(), v.end(), m), m);
}

bool erase_one(std::vector<std::uint16_t>& v, int mode) {
  auto it = std::lower_bound(v.begin(), v.end(), static_cast<std::uint16_t>(mode));
  if (it == v.end() || *it != mode) return false;
  v.erase(it);
  return true;
}

SparseOp from_triplets(std::size_t dim, const std::vector<Triplet>& t) {
  SparseOp op(static_cast<std::int64_t>(dim), static_cast<std::int64_t>(dim));
  op.setFromTriplets(t.begin(), t.end());
  op.makeCompressed();
  return op;
}

SparseOp diagonal_op(const Eigen::VectorXd& d) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] != 0.0) t.emplace_back(i, i, d[i]);
  return from_triplets(static_cast<std::size_t>(d.size()), t);
}

void check_mode(const Basis& b, int mode) {
  if (mode < 0 || mode >= b.n_modes()) throw DimensionError("mode index out of range");
}

}  // namespace

void EmitterSpec::validate() const {
  if (!(omega_e > 0.0)) throw InputError("emitter: omega_e must be > 0");
}

void BasisSpec::validate() const {
  if (n_modes < 1) throw InputError("basis: n_modes must be >= 1");
  if (n_modes > std::numeric_limits<std::uint16_t>::max()) throw InputError("basis: too many modes");
  if (max_total_excitations < 1) throw InputError("basis: max_total_excitations must be >= 1");
}

std::size_t basis_count(const BasisSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(spec.n_modes);
  std::size_t total = 0;
  for (int k = 0; k <= spec.max_total_excitations; ++k) {
    if (!shell_allowed(spec.parity, k)) continue;
    const std::size_t ground = multiset_count(n, static_cast<std::size_t>(k));
    const std::size_t excited = k >= 1 ? multiset_count(n, static_cast<std::size_t>(k - 1)) : 0;
    total += ground + excited;
    if (total > std::numeric_limits<std::size_t>::max() / 4) return std::numeric_limits<std::size_t>::max() / 4;
  }
  return total;
}

int FockState::total_excitations() const {
  int s = excited ? 1 : 0;
  for (int o : occupations) s += o;
  return s;
}

Basis::Basis(const BasisSpec& spec) : spec_(spec) {
  const std::size_t count = basis_count(spec);
  if (count > spec.dimension_cap)
    throw ResourceCapError("basis dimension " + std::to_string(count) + " exceeds cap " +
                           std::to_string(spec.dimension_cap) + " (n_modes=" + std::to_string(spec.n_modes) +
                           ", max_total_excitations=" + std::to_string(spec.max_total_excitations) + ")");
  excited_.reserve(count);
  offset_.reserve(count + 1);
  lookup_.reserve(count);
  for (int k = 0; k <= spec.max_total_excitations; ++k) {
    if (!shell_allowed(spec.parity, k)) continue;
    if (k >= 1) for_each_multiset(spec.n_modes, k - 1, [&](auto ph) { push(true, ph); });
    for_each_multiset(spec.n_modes, k, [&](auto ph) { push(false, ph); });
  }
}

void Basis::push(bool excited, std::span<const std::uint16_t> photons) {
  lookup_.emplace(key(excited, photons), excited_.size());
  excited_.push_back(excited ? 1 : 0);
  photons_.insert(photons_.end(), photons.begin(), photons.end());
  offset_.push_back(photons_.size());
}

std::string Basis::key(bool excited, std::span<const std::uint16_t> photons) {
  std::string k;
  k.reserve(1 + 2 * photons.size());
  k.push_back(excited ? 'e' : 'g');
  for (auto p : photons) {
    k.push_back(static_cast<char>(p & 0xff));
    k.push_back(static_cast<char>(p >> 8));
  }
  return k;
}

std::span<const std::uint16_t> Basis::photons(std::size_t idx) const {
  return {photons_.data() + offset_[idx], offset_[idx + 1] - offset_[idx]};
}

int Basis::occupation(std::size_t idx, int mode) const { return count_of(photons(idx), mode); }

FockState Basis::state(std::size_t idx) const {
  FockState s;
  s.excited = excited(idx);
  s.occupations.assign(static_cast<std::size_t>(spec_.n_modes), 0);
  for (auto p : photons(idx)) ++s.occupations[p];
  return s;
}

std::optional<std::size_t> Basis::find(bool excited, std::span<const std::uint16_t> sorted_photons) const {
  auto it = lookup_.find(key(excited, sorted_photons));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Basis::index_of(const FockState& s) const {
  if (static_cast<int>(s.occupations.size()) != spec_.n_modes) return std::nullopt;
  std::vector<std::uint16_t> ph;
  for (int m = 0; m < spec_.n_modes; ++m) {
    if (s.occupations[static_cast<std::size_t>(m)] < 0) return std::nullopt;
    ph.insert(ph.end(), static_cast<std::size_t>(s.occupations[static_cast<std::size_t>(m)]), static_cast<std::uint16_t>(m));
  }
  return find(s.excited, ph);
}

std::size_t Basis::vacuum_index(bool excited) const {
  auto idx = find(excited, {});
  if (!idx) throw InputError(std::string("basis does not contain |") + (excited ? "e" : "g") + ";vac>");
  return *idx;
}

SparseOp annihilation(const Basis& b, int mode) {
  check_mode(b, mode);
  if (b.spec().parity != Parity::both)
    throw InputError("annihilation operators change parity; use a basis with parity=both");
  std::vector<Triplet> t;
  std::vector<std::uint16_t> buf;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const auto ph = b.photons(j);
    const int n = count_of(ph, mode);
    if (n == 0) continue;
    buf.assign(ph.begin(), ph.end());
    erase_one(buf, mode);
    if (auto i = b.find(b.excited(j), buf))
      t.emplace_back(static_cast<std::int64_t>(*i), static_cast<std::int64_t>(j), std::sqrt(double(n)));
  }
  return from_triplets(b.size(), t);
}

Eigen::VectorXd number_diagonal(const Basis& b, int mode) {
  check_mode(b, mode);
  Eigen::VectorXd d(static_cast<Eigen::Index>(b.size()));
  for (std::size_t j = 0; j < b.size(); ++j) d[static_cast<Eigen::Index>(j)] = b.occupation(j, mode);
  return d;
}

Eigen::VectorXd emitter_population_diagonal(const Basis& b) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(b.size()));
  for (std::size_t j = 0; j < b.size(); ++j) d[static_cast<Eigen::Index>(j)] = b.excited(j) ? 1.0 : 0.0;
  return d;
}

Eigen::VectorXd excitation_diagonal(const Basis& b) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(b.size()));
  for (std::size_t j = 0; j < b.size(); ++j) d[static_cast<Eigen::Index>(j)] = b.total_excitations(j);
  return d;
}

SparseOp number_operator(const Basis& b, int mode) { return diagonal_op(number_diagonal(b, mode)); }

SparseOp sigma_z(const Basis& b) {
  return diagonal_op((2.0 * emitter_population_diagonal(b)).array() - 1.0);
}

namespace {

// <flip(j)|op|j> for the emitter-only operators; `up`/`down` select which flips are kept.
SparseOp emitter_flip(const Basis& b, bool up, bool down) {
  std::vector<Triplet> t;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const bool ex = b.excited(j);
    if ((ex && !down) || (!ex && !up)) continue;
    if (auto i = b.find(!ex, b.photons(j)))
      t.emplace_back(static_cast<std::int64_t>(*i), static_cast<std::int64_t>(j), 1.0);
  }
  return from_triplets(b.size(), t);
}

}  // namespace

SparseOp sigma_x(const Basis& b) { return emitter_flip(b, true, true); }
SparseOp sigma_plus(const Basis& b) { return emitter_flip(b, true, false); }
SparseOp sigma_minus(const Basis& b) { return emitter_flip(b, false, true); }

SparseOp build_hamiltonian(const ModeModel& m, const EmitterSpec& e, const Basis& b) {
  if (m.n_modes() != b.n_modes())
    throw DimensionError("build_hamiltonian: model has " + std::to_string(m.n_modes()) + " modes, basis has " +
                         std::to_string(b.n_modes()));
  e.validate();
  const int n = m.n_modes();
  const auto& w = m.omega_mat();
  const auto& g = m.g();

  std::vector<Triplet> t;
  std::vector<std::uint16_t> buf;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const auto col = static_cast<std::int64_t>(j);
    const bool ex = b.excited(j);
    const auto ph = b.photons(j);

    double diag = ex ? 0.5 * e.omega_e : -0.5 * e.omega_e;
    for (auto p : ph) diag += w(p, p);
    t.emplace_back(col, col, diag);

    // hopping w_ij a_i^+ a_j, i != j
    for (std::size_t q = 0; q < ph.size(); ++q) {
      if (q > 0 && ph[q] == ph[q - 1]) continue;
      const int jm = ph[q];
      const int nj = count_of(ph, jm);
      for (int im = 0; im < n; ++im) {
        if (im == jm || w(im, jm) == 0.0) continue;
        buf.assign(ph.begin(), ph.end());
        erase_one(buf, jm);
        const int ni = count_of(buf, im);
        insert_sorted(buf, im);
        if (auto i = b.find(ex, buf))
          t.emplace_back(static_cast<std::int64_t>(*i), col, w(im, jm) * std::sqrt(double(nj) * double(ni + 1)));
      }
    }

    // g_i (a_i^+ + a_i) s_x
    for (int im = 0; im < n; ++im) {
      if (g[im] == 0.0) continue;
      const int ni = count_of(ph, im);
      buf.assign(ph.begin(), ph.end());
      insert_sorted(buf, im);
      if (auto i = b.find(!ex, buf))
        t.emplace_back(static_cast<std::int64_t>(*i), col, g[im] * std::sqrt(double(ni + 1)));
      if (ni > 0) {
        buf.assign(ph.begin(), ph.end());
        erase_one(buf, im);
        if (auto i = b.find(!ex, buf))
          t.emplace_back(static_cast<std::int64_t>(*i), col, g[im] * std::sqrt(double(ni)));
      }
    }
  }
  return from_triplets(b.size(), t);
}

std::vector<JumpOperator> build_jump_operators(const ModeModel& m, const Basis& b) {
  if (m.n_modes() != b.n_modes())
    throw DimensionError("build_jump_operators: model has " + std::to_string(m.n_modes()) + " modes, basis has " +
                         std::to_string(b.n_modes()));
  std::vector<JumpOperator> jumps;
  jumps.reserve(static_cast<std::size_t>(m.n_modes()));
  for (int i = 0; i < m.n_modes(); ++i) jumps.push_back({annihilation(b, i), m.kappa()[i]});
  return jumps;
}

}  // namespace usc
