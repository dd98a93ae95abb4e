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

#include "usc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace usc {

namespace {

using CSparse = Eigen::SparseMatrix<cplx, Eigen::RowMajor, std::int64_t>;
using MatMap = Eigen::Map<Eigen::MatrixXcd>;
using ConstMatMap = Eigen::Map<const Eigen::MatrixXcd>;

constexpr cplx kI{0.0, 1.0};

// rho is propagated as a set of diagonal blocks. When rho0 commutes with the
// parity (-1)^(total excitations) the blocks are the two parity sectors: H
// keeps each sector and a rho a^+ swaps them, so off-diagonal blocks stay zero.
// Otherwise a single block spanning the whole space is used.
//
// Per block, with rho and H Hermitian and H real:
//   -i[H, rho] = i (Y - Y^+),  Y = rho H,
// and Y is one real dense x sparse product on the interleaved (Re, Im) view.
class LindbladKernel {
 public:
  LindbladKernel(const OpenSystem& sys, const Eigen::MatrixXcd& rho0) : dim_(static_cast<Eigen::Index>(sys.dimension())) {
    for (const auto& j : sys.jumps)
      if (j.op.rows() != dim_ || j.op.cols() != dim_) throw DimensionError("jump operator dimension mismatch");

    Eigen::VectorXd exc = sys.emitter_diag;
    for (const auto& n : sys.number_diag) exc += n;
    std::vector<int> sector(static_cast<std::size_t>(dim_));
    for (Eigen::Index i = 0; i < dim_; ++i) sector[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(exc[i])) & 1;
    bool split = true;
    for (Eigen::Index c = 0; c < dim_ && split; ++c)
      for (Eigen::Index r = 0; r < dim_; ++r)
        if (sector[static_cast<std::size_t>(r)] != sector[static_cast<std::size_t>(c)] && rho0(r, c) != cplx(0.0)) {
          split = false;
          break;
        }
    const int nb = split ? 2 : 1;
    blocks_.resize(static_cast<std::size_t>(nb));
    local_.assign(static_cast<std::size_t>(dim_), 0);
    block_of_.assign(static_cast<std::size_t>(dim_), 0);
    for (Eigen::Index i = 0; i < dim_; ++i) {
      const int bk = split ? sector[static_cast<std::size_t>(i)] : 0;
      auto& blk = blocks_[static_cast<std::size_t>(bk)];
      block_of_[static_cast<std::size_t>(i)] = bk;
      local_[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(blk.idx.size());
      blk.idx.push_back(i);
    }
    Eigen::Index off = 0;
    for (auto& blk : blocks_) {
      blk.offset = off;
      blk.n = static_cast<Eigen::Index>(blk.idx.size());
      off += blk.n * blk.n;
      blk.k = Eigen::VectorXd::Zero(blk.n);
      std::vector<Eigen::Triplet<double>> trip;
      for (Eigen::Index li = 0; li < blk.n; ++li)
        for (SparseOp::InnerIterator it(sys.hamiltonian, blk.idx[static_cast<std::size_t>(li)]); it; ++it) {
          if (block_of_[static_cast<std::size_t>(it.col())] != block_of_[static_cast<std::size_t>(blk.idx[static_cast<std::size_t>(li)])])
            throw InputError("Hamiltonian couples different parity sectors");
          trip.emplace_back(li, local_[static_cast<std::size_t>(it.col())], it.value());
        }
      blk.h.resize(blk.n, blk.n);
      blk.h.setFromTriplets(trip.begin(), trip.end());
      blk.y.resize(2 * blk.n, blk.n);
    }
    size_ = off;

    // a single-mode annihilator has at most one entry per row, so a rho a^+ is
    // a weighted gather: (a rho a^+)_ik = w_i w_k rho_{s_i s_k}
    for (const auto& j : sys.jumps) {
      std::vector<Gather> per_block(blocks_.size());
      for (Eigen::Index r = 0; r < j.op.outerSize(); ++r) {
        int count = 0;
        for (SparseOp::InnerIterator it(j.op, r); it; ++it) {
          auto& blk = blocks_[static_cast<std::size_t>(block_of_[static_cast<std::size_t>(it.col())])];
          blk.k[local_[static_cast<std::size_t>(it.col())]] += j.rate * it.value() * it.value();
          auto& g = per_block[static_cast<std::size_t>(block_of_[static_cast<std::size_t>(r)])];
          g.src_block = block_of_[static_cast<std::size_t>(it.col())];
          g.rows.push_back(local_[static_cast<std::size_t>(r)]);
          g.source.push_back(local_[static_cast<std::size_t>(it.col())]);
          g.weight.push_back(std::sqrt(j.rate) * it.value());
          ++count;
        }
        if (count > 1) throw InputError("jump operator is not a single-mode annihilator");
      }
      for (std::size_t bk = 0; bk < per_block.size(); ++bk)
        if (!per_block[bk].rows.empty()) blocks_[bk].gathers.push_back(std::move(per_block[bk]));
    }
  }

  Eigen::Index size() const { return size_; }

  ode::Vector pack(const Eigen::MatrixXcd& rho) const {
    ode::Vector y(size_);
    for (const auto& blk : blocks_) {
      MatMap m(y.data() + blk.offset, blk.n, blk.n);
      for (Eigen::Index c = 0; c < blk.n; ++c)
        for (Eigen::Index r = 0; r < blk.n; ++r)
          m(r, c) = rho(blk.idx[static_cast<std::size_t>(r)], blk.idx[static_cast<std::size_t>(c)]);
    }
    return y;
  }

  void unpack(const ode::Vector& y, Eigen::MatrixXcd& rho) const {
    rho.setZero(dim_, dim_);
    for (const auto& blk : blocks_) {
      ConstMatMap m(y.data() + blk.offset, blk.n, blk.n);
      for (Eigen::Index c = 0; c < blk.n; ++c)
        for (Eigen::Index r = 0; r < blk.n; ++r)
          rho(blk.idx[static_cast<std::size_t>(r)], blk.idx[static_cast<std::size_t>(c)]) = m(r, c);
    }
  }

  void operator()(const ode::Vector& y, ode::Vector& dy) {
    dy.resize(size_);
    for (auto& blk : blocks_) {
      const auto n = blk.n;
      const Eigen::Map<const Eigen::MatrixXd> re(reinterpret_cast<const double*>(y.data() + blk.offset), 2 * n, n);
      blk.y.noalias() = re * blk.h;
      const Eigen::Map<const Eigen::MatrixXcd> yc(reinterpret_cast<const cplx*>(blk.y.data()), n, n);
      ConstMatMap rho(y.data() + blk.offset, n, n);
      MatMap out(dy.data() + blk.offset, n, n);
      for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r) {
          const cplx a = yc(r, c), b = yc(c, r), p = rho(r, c);
          const double damp = 0.5 * (blk.k[r] + blk.k[c]);
          out(r, c) = cplx(-(a.imag() + b.imag()) - damp * p.real(), (a.real() - b.real()) - damp * p.imag());
        }
    }
    for (auto& blk : blocks_) {
      MatMap out(dy.data() + blk.offset, blk.n, blk.n);
      for (const auto& g : blk.gathers) {
        const auto& sb = blocks_[static_cast<std::size_t>(g.src_block)];
        ConstMatMap src(y.data() + sb.offset, sb.n, sb.n);
        const std::size_t m = g.rows.size();
        for (std::size_t c = 0; c < m; ++c) {
          const cplx* s = src.col(g.source[c]).data();
          cplx* d = out.col(g.rows[c]).data();
          const double wc = g.weight[c];
          for (std::size_t r = 0; r < m; ++r) d[g.rows[r]] += (wc * g.weight[r]) * s[g.source[r]];
        }
      }
    }
  }

  /// Full-matrix right-hand side, for diagnostics.
  Eigen::MatrixXcd full(const Eigen::MatrixXcd& rho) {
    ode::Vector dy;
    (*this)(pack(rho), dy);
    Eigen::MatrixXcd out;
    unpack(dy, out);
    return out;
  }

 private:
  struct Gather {
    int src_block = 0;
    std::vector<Eigen::Index> rows, source;
    std::vector<double> weight;
  };
  struct Block {
    std::vector<Eigen::Index> idx;
    Eigen::Index n = 0, offset = 0;
    Eigen::SparseMatrix<double> h;  // column-major for dense x sparse
    Eigen::VectorXd k;              // diag of sum kappa a^+ a
    Eigen::MatrixXd y;
    std::vector<Gather> gathers;
  };

  Eigen::Index dim_, size_ = 0;
  std::vector<Block> blocks_;
  std::vector<Eigen::Index> local_;
  std::vector<int> block_of_;
};

struct Observables {
  double pe = 0.0;
  Eigen::VectorXd n;
  double purity = 0.0;
  double trace_defect = 0.0;
};

Observables observe(const Eigen::MatrixXcd& rho, const OpenSystem& sys) {
  Observables o;
  const Eigen::VectorXd diag = rho.diagonal().real();
  o.pe = sys.emitter_diag.dot(diag);
  o.n.resize(static_cast<Eigen::Index>(sys.number_diag.size()));
  for (std::size_t i = 0; i < sys.number_diag.size(); ++i) o.n[static_cast<Eigen::Index>(i)] = sys.number_diag[i].dot(diag);
  o.purity = rho.squaredNorm();
  o.trace_defect = std::abs(rho.trace() - 1.0);
  return o;
}

}  // namespace

QuantumState QuantumState::pure(const Eigen::VectorXcd& psi) { return {psi * psi.adjoint()}; }

double QuantumState::purity() const { return (rho * rho).trace().real(); }

double QuantumState::hermiticity_defect() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double QuantumState::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void QuantumState::validate(double tol) const {
  if (rho.rows() != rho.cols()) throw InputError("density matrix is not square");
  if (std::abs(trace() - 1.0) > tol) throw InputError("density matrix trace differs from 1");
  if (hermiticity_defect() > tol) throw InputError("density matrix is not Hermitian");
  if (min_eigenvalue() < -tol) throw InputError("density matrix has a negative eigenvalue");
}

std::vector<double> Trajectory::total_photons() const {
  std::vector<double> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k)
    out[k] = bath_photons[k] + mode_populations.row(static_cast<Eigen::Index>(k)).sum();
  return out;
}

OpenSystem make_open_system(const ModeModel& m, const EmitterSpec& e, const Basis& b) {
  OpenSystem sys;
  sys.hamiltonian = build_hamiltonian(m, e, b);
  if (!m.is_closed()) sys.jumps = build_jump_operators(m, b);
  sys.emitter_diag = emitter_population_diagonal(b);
  for (int i = 0; i < b.n_modes(); ++i) sys.number_diag.push_back(number_diagonal(b, i));
  return sys;
}

QuantumState initial_state(const Basis& b, const EmitterSpec& e) {
  const std::size_t idx = b.vacuum_index(e.initial_state == InitialState::excited);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(b.size()), static_cast<Eigen::Index>(b.size()));
  rho(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)) = 1.0;
  return {rho};
}

Eigen::MatrixXcd lindblad_rhs(const QuantumState& state, const SparseOp& h, std::span<const JumpOperator> jumps) {
  const Eigen::MatrixXcd& rho = state.rho;
  if (rho.rows() != h.rows() || rho.cols() != h.cols()) throw DimensionError("lindblad_rhs: dimension mismatch");
  const CSparse hc = h.cast<cplx>();
  Eigen::MatrixXcd out = -kI * (hc * rho - rho * hc);
  for (const auto& j : jumps) {
    if (j.op.rows() != rho.rows()) throw DimensionError("lindblad_rhs: jump operator dimension mismatch");
    const CSparse a = j.op.cast<cplx>();
    const CSparse ad = a.adjoint();
    const CSparse ada = ad * a;
    out += j.rate * (a * rho * ad - 0.5 * (ada * rho + rho * ada));
  }
  return out;
}

double trace_norm(const Eigen::MatrixXcd& a) {
  const Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

PropagationResult propagate(const QuantumState& rho0, const OpenSystem& sys, std::span<const double> times,
                            const Tolerances& tol) {
  const auto d = static_cast<Eigen::Index>(sys.dimension());
  if (rho0.rho.rows() != d || rho0.rho.cols() != d) throw DimensionError("propagate: initial state dimension mismatch");
  if (times.empty()) throw InputError("propagate: empty time grid");

  LindbladKernel kernel(sys, rho0.rho);
  const std::size_t nt = times.size();
  const auto nm = static_cast<Eigen::Index>(sys.number_diag.size());

  PropagationResult res;
  Trajectory& tr = res.trajectory;
  tr.times.assign(times.begin(), times.end());
  tr.emitter_population.resize(nt);
  tr.mode_populations.resize(static_cast<Eigen::Index>(nt), nm);
  tr.bath_photons.resize(nt);
  tr.purity.resize(nt);
  tr.trace_defect.resize(nt);

  Eigen::VectorXd rates(nm);
  for (Eigen::Index i = 0; i < nm; ++i)
    rates[i] = i < static_cast<Eigen::Index>(sys.jumps.size()) ? sys.jumps[static_cast<std::size_t>(i)].rate : 0.0;

  Eigen::MatrixXcd rho(d, d);
  double prev_flux = 0.0;
  auto observer = [&](std::size_t k, double, const ode::Vector& y) {
    kernel.unpack(y, rho);
    rho = (0.5 * (rho + rho.adjoint())).eval();
    const Observables o = observe(rho, sys);
    tr.emitter_population[k] = o.pe;
    tr.mode_populations.row(static_cast<Eigen::Index>(k)) = o.n.transpose();
    tr.purity[k] = o.purity;
    tr.trace_defect[k] = o.trace_defect;
    const double flux = rates.dot(o.n);
    tr.bath_photons[k] = k == 0 ? 0.0 : tr.bath_photons[k - 1] + 0.5 * (times[k] - times[k - 1]) * (prev_flux + flux);
    prev_flux = flux;
    return true;
  };

  auto rhs = [&](double, const ode::Vector& y, ode::Vector& dy) { kernel(y, dy); };

  ode::Options opt;
  opt.rtol = tol.rtol;
  opt.atol = tol.atol;
  auto r = ode::integrate(rhs, kernel.pack(rho0.rho), times.front(), times, observer, opt);
  res.final_state.rho = rho;
  res.stats = r.stats;
  return res;
}

PropagationResult simulate(const ModeModel& m, const EmitterSpec& e, const BasisSpec& basis,
                           std::span<const double> times, const Tolerances& tol) {
  e.validate();
  if (m.n_modes() != basis.n_modes)
    throw DimensionError("simulate: model has " + std::to_string(m.n_modes()) + " modes, basis " +
                         std::to_string(basis.n_modes));
  BasisSpec spec = basis;
  spec.parity = Parity::both;
  const Basis b(spec);
  const OpenSystem sys = make_open_system(m, e, b);
  return propagate(initial_state(b, e), sys, times, tol);
}

TruncationCheck truncation_convergence(const ModeModel& m, const EmitterSpec& e, const BasisSpec& basis,
                                       std::span<const double> times, double tolerance, const Tolerances& tol) {
  TruncationCheck out;
  out.max_total_excitations = basis.max_total_excitations;
  const auto a = simulate(m, e, basis, times, tol);
  BasisSpec more = basis;
  ++more.max_total_excitations;
  const auto b = simulate(m, e, more, times, tol);
  for (std::size_t k = 0; k < times.size(); ++k)
    out.delta = std::max(out.delta, std::abs(a.trajectory.emitter_population[k] - b.trajectory.emitter_population[k]));
  out.accepted = out.delta < tolerance;
  return out;
}

SteadyStateResult steady_state(const QuantumState& rho0, const OpenSystem& sys, double horizon,
                               double stationarity_tol, const Tolerances& tol) {
  const auto d = static_cast<Eigen::Index>(sys.dimension());
  if (rho0.rho.rows() != d) throw DimensionError("steady_state: initial state dimension mismatch");
  if (!(horizon > 0.0)) throw InputError("steady_state: horizon must be > 0");

  LindbladKernel kernel(sys, rho0.rho);
  constexpr std::size_t kChecks = 400;
  std::vector<double> checks(kChecks + 1);
  for (std::size_t k = 0; k <= kChecks; ++k) checks[k] = horizon * static_cast<double>(k) / kChecks;

  SteadyStateResult res;
  Eigen::MatrixXcd rho(d, d), drho(d, d);
  auto observer = [&](std::size_t, double t, const ode::Vector& y) {
    kernel.unpack(y, rho);
    rho = (0.5 * (rho + rho.adjoint())).eval();
    drho = kernel.full(rho);
    res.residual = trace_norm(drho);
    res.time = t;
    res.converged = res.residual < stationarity_tol;
    return !res.converged;
  };
  auto rhs = [&](double, const ode::Vector& y, ode::Vector& dy) { kernel(y, dy); };
  ode::Options opt;
  opt.rtol = tol.rtol;
  opt.atol = tol.atol;
  ode::integrate(rhs, kernel.pack(rho0.rho), 0.0, checks, observer, opt);
  res.state.rho = rho;
  return res;
}

Eigen::VectorXd lowest_excitation_eigenstate(const SparseOp& h, const Basis& b) {
  if (static_cast<std::size_t>(h.rows()) != b.size()) throw DimensionError("lowest_excitation_eigenstate: dimension mismatch");
  const Eigen::MatrixXd dense = Eigen::MatrixXd(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  const Eigen::VectorXd exc = excitation_diagonal(b);
  Eigen::Index best = 0;
  double best_n = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < es.eigenvectors().cols(); ++k) {
    const double n = es.eigenvectors().col(k).cwiseAbs2().dot(exc);
    if (n < best_n - 1e-12) {
      best_n = n;
      best = k;
    }
  }
  return es.eigenvectors().col(best);
}

double overlap(const QuantumState& rho, const Eigen::VectorXd& psi) {
  const Eigen::VectorXcd p = psi.cast<cplx>();
  return std::abs(p.dot(rho.rho * p));
}

}  // namespace usc
