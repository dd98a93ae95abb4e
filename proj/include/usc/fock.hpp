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

// Two-level emitter (x) N bosonic modes under a global excitation cutoff
//
//   sum_i n_i + [emitter excited] <= max_total_excitations.
//
// Basis order: shells of increasing total excitation k; inside a shell the
// states with an excited emitter come first, then the ground-state ones; inside
// each group the photon configurations are ordered lexicographically by their
// sorted multiset of mode indices. For N=1, k<=1 this gives |g;0>, |e;0>, |g;1>.
//
// All operators of the model are real in this basis and are stored as real
// sparse matrices.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>

#include "usc/spectral.hpp"

namespace usc {

using SparseOp = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t>;

enum class InitialState { excited, ground };

struct EmitterSpec {
  double omega_e = 1.0;
  InitialState initial_state = InitialState::excited;

  void validate() const;
};

/// Restriction to one eigenspace of the parity (-1)^(total excitations).
/// The Hamiltonian conserves parity; the jump operators do not, so open-system
/// propagation needs `both`.
enum class Parity { both, even, odd };

struct BasisSpec {
  int n_modes = 1;
  int max_total_excitations = 3;
  std::size_t dimension_cap = 200000;
  Parity parity = Parity::both;

  void validate() const;
};

/// Number of basis states for `spec`, computed combinatorially.
std::size_t basis_count(const BasisSpec& spec);

struct FockState {
  bool excited = false;
  std::vector<int> occupations;  // one entry per mode

  int total_excitations() const;
  bool operator==(const FockState&) const = default;
};

class Basis {
 public:
  explicit Basis(const BasisSpec& spec);

  const BasisSpec& spec() const { return spec_; }
  std::size_t size() const { return excited_.size(); }
  int n_modes() const { return spec_.n_modes; }

  bool excited(std::size_t idx) const { return excited_[idx] != 0; }
  /// Sorted mode indices of the photons in state `idx` (one entry per quantum).
  std::span<const std::uint16_t> photons(std::size_t idx) const;
  int photon_count(std::size_t idx) const { return static_cast<int>(offset_[idx + 1] - offset_[idx]); }
  int total_excitations(std::size_t idx) const { return photon_count(idx) + (excited(idx) ? 1 : 0); }
  int occupation(std::size_t idx, int mode) const;

  FockState state(std::size_t idx) const;
  std::optional<std::size_t> index_of(const FockState& s) const;
  /// Lookup by sorted photon multiset.
  std::optional<std::size_t> find(bool excited, std::span<const std::uint16_t> sorted_photons) const;

  /// Index of |e;0...0> or |g;0...0>; throws if the state is outside the basis.
  std::size_t vacuum_index(bool excited) const;

 private:
  static std::string key(bool excited, std::span<const std::uint16_t> photons);
  void push(bool excited, std::span<const std::uint16_t> photons);

  BasisSpec spec_;
  std::vector<std::uint8_t> excited_;
  std::vector<std::size_t> offset_{0};
  std::vector<std::uint16_t> photons_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

SparseOp annihilation(const Basis& b, int mode);
SparseOp number_operator(const Basis& b, int mode);
SparseOp sigma_z(const Basis& b);
SparseOp sigma_x(const Basis& b);
SparseOp sigma_plus(const Basis& b);
SparseOp sigma_minus(const Basis& b);
/// Diagonal of (sigma_z + 1)/2, i.e. 1 on states with an excited emitter.
Eigen::VectorXd emitter_population_diagonal(const Basis& b);
/// Diagonal of n_mode.
Eigen::VectorXd number_diagonal(const Basis& b, int mode);
/// Diagonal of sum_i n_i + [excited].
Eigen::VectorXd excitation_diagonal(const Basis& b);

/// H = (w_e/2) s_z + sum_ij w_ij a_i^+ a_j + sum_i g_i (a_i^+ + a_i) s_x,
/// assembled directly in the truncated basis. Matrix elements leading out of
/// the basis are dropped.
SparseOp build_hamiltonian(const ModeModel& m, const EmitterSpec& e, const Basis& b);

struct JumpOperator {
  SparseOp op;
  double rate = 0.0;
};

/// (a_i, kappa_i) for every mode.
std::vector<JumpOperator> build_jump_operators(const ModeModel& m, const Basis& b);

}  // namespace usc
