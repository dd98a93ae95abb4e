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

#include "usc/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>

namespace usc {

namespace {

std::vector<double> sample(const SpectralFn& f, const std::vector<double>& grid, const char* which) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    v[k] = f(grid[k]);
    if (!std::isfinite(v[k]) || v[k] < 0.0)
      throw InputError(std::string("fit: target is negative or non-finite on the ") + which +
                       " grid at omega=" + std::to_string(grid[k]));
  }
  return v;
}

// Solves (T - w) x = b in place for upper Hessenberg T, partial pivoting
// between adjacent rows.
void hessenberg_solve(Eigen::MatrixXcd& t, Eigen::VectorXcd& b) {
  const Eigen::Index n = t.rows();
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (std::abs(t(k + 1, k)) > std::abs(t(k, k))) {
      t.row(k).segment(k, n - k).swap(t.row(k + 1).segment(k, n - k));
      std::swap(b[k], b[k + 1]);
    }
    if (t(k + 1, k) == cplx(0.0)) continue;
    const cplx l = t(k + 1, k) / t(k, k);
    t.row(k + 1).segment(k + 1, n - k - 1) -= l * t.row(k).segment(k + 1, n - k - 1);
    b[k + 1] -= l * b[k];
  }
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    cplx s = b[k];
    for (Eigen::Index j = k + 1; j < n; ++j) s -= t(k, j) * b[j];
    b[k] = s / t(k, k);
  }
}

// u(w) = (H~ - w)^-1 g for every w on the grid. H~ = Q T Q^+ is reduced to
// Hessenberg form once so each frequency costs O(N^2).
void resolvent_columns(const ModeModel& m, const std::vector<double>& grid, Eigen::MatrixXcd& u) {
  const int n = m.n_modes();
  const Eigen::HessenbergDecomposition<Eigen::MatrixXcd> hd(m.effective_hamiltonian());
  const Eigen::MatrixXcd q = hd.matrixQ();
  const Eigen::MatrixXcd h = hd.matrixH();
  const Eigen::VectorXcd qg = q.adjoint() * m.g().cast<cplx>();
  u.resize(n, static_cast<Eigen::Index>(grid.size()));
  Eigen::MatrixXcd t(n, n);
  Eigen::VectorXcd x(n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    t = h;
    t.diagonal().array() -= grid[k];
    x = qg;
    hessenberg_solve(t, x);
    u.col(static_cast<Eigen::Index>(k)).noalias() = q * x;
  }
}

double max_negative(const ModeModel& m, const std::vector<double>& grid) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double w : grid) mx = std::max(mx, eval_model_sd(m, w));
  return mx;
}

}  // namespace

void FitConfig::validate() const {
  if (n_modes < 1) throw InputError("fit: n_modes must be >= 1");
  if (!(neg_threshold > 0.0)) throw InputError("fit: neg_threshold must be > 0");
  if (pos_grid.empty()) throw InputError("fit: pos_grid is empty");
  for (double w : pos_grid)
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("fit: pos_grid must lie at omega > 0");
  for (double w : neg_grid)
    if (!(w < 0.0) || !std::isfinite(w)) throw InputError("fit: neg_grid must lie at omega < 0");
  if (max_iterations < 1) throw InputError("fit: max_iterations must be >= 1");
  if (n_restarts < 1) throw InputError("fit: n_restarts must be >= 1");
  if (penalty_schedule.empty()) throw InputError("fit: penalty_schedule is empty");
  for (std::size_t k = 0; k < penalty_schedule.size(); ++k) {
    if (!(penalty_schedule[k] >= 0.0)) throw InputError("fit: penalty weights must be >= 0");
    if (k > 0 && penalty_schedule[k] < penalty_schedule[k - 1])
      throw InputError("fit: penalty_schedule must be non-decreasing");
  }
  if (!(penalty_margin > 0.0 && penalty_margin <= 1.0)) throw InputError("fit: penalty_margin must be in (0, 1]");
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  if (n < 1 || !(hi > lo)) throw InputError("uniform_grid: need n >= 1 and hi > lo");
  std::vector<double> g(static_cast<std::size_t>(n));
  if (n == 1) {
    g[0] = 0.5 * (lo + hi);
    return g;
  }
  const double a = lo > 0.0 ? lo : (lo == 0.0 ? hi / n : lo);
  for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = a + (hi - a) * k / (n - 1);
  return g;
}

std::vector<double> negative_log_grid(double near, double edge, int n) {
  if (n < 2 || !(near > 0.0) || !(edge > near)) throw InputError("negative_log_grid: need n >= 2 and 0 < near < edge");
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log(near), b = std::log(edge);
  for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(n - 1 - k)] = -std::exp(a + (b - a) * k / (n - 1));
  return g;
}

std::vector<double> refine_grid(const std::vector<double>& grid) {
  std::vector<double> out;
  if (grid.empty()) return out;
  out.reserve(2 * grid.size() - 1);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double a = grid[k], b = grid[k + 1];
    out.push_back(a);
    if (a * b > 0.0)
      out.push_back(std::copysign(std::sqrt(a * b), a));
    else
      out.push_back(0.5 * (a + b));
  }
  out.push_back(grid.back());
  return out;
}

// ---------------------------------------------------------------- objective

FitObjective::FitObjective(const SpectralFn& target, const FitConfig& cfg)
    : n_(cfg.n_modes), thr_(cfg.neg_threshold), margin_(cfg.penalty_margin), pos_(cfg.pos_grid), neg_(cfg.neg_grid) {
  const auto jt = sample(target, pos_, "positive");
  sample(target, neg_, "negative");
  target_pos_ = Eigen::Map<const Eigen::VectorXd>(jt.data(), static_cast<Eigen::Index>(jt.size()));
  const double jmax = target_pos_.maxCoeff();
  eps_ = jmax > 0.0 ? 1e-3 * jmax : 1.0;
  const double span = std::max(pos_.back() - pos_.front(), std::abs(pos_.back()));
  kappa_hi_ = 10.0 * span;
}

int FitObjective::n_params() const { return n_ * (n_ + 1) / 2 + 2 * n_; }

Eigen::VectorXd FitObjective::encode(const ModeModel& m) const {
  if (m.n_modes() != n_) throw DimensionError("fit: model has " + std::to_string(m.n_modes()) + " modes, expected " +
                                              std::to_string(n_));
  Eigen::VectorXd p(n_params());
  int k = 0;
  for (int i = 0; i < n_; ++i) p[k++] = m.omega_mat()(i, i);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) p[k++] = m.omega_mat()(i, j);
  for (int i = 0; i < n_; ++i) {
    // starting values outside the range are pulled just inside
    const double c = std::clamp(m.kappa()[i] / kappa_hi_, 1e-300, 1.0 - 1e-9);
    p[k++] = std::log(c / (1.0 - c));
  }
  for (int i = 0; i < n_; ++i) p[k++] = m.g()[i];
  return p;
}

ModeModel FitObjective::decode(const Eigen::VectorXd& p) const {
  Eigen::MatrixXd w(n_, n_);
  Eigen::VectorXd kappa(n_), g(n_);
  int k = 0;
  for (int i = 0; i < n_; ++i) w(i, i) = p[k++];
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) w(i, j) = w(j, i) = p[k++];
  for (int i = 0; i < n_; ++i) kappa[i] = kappa_hi_ / (1.0 + std::exp(-p[k++]));
  for (int i = 0; i < n_; ++i) g[i] = p[k++];
  return ModeModel(std::move(w), std::move(kappa), std::move(g));
}

void FitObjective::operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
  const auto npos = static_cast<Eigen::Index>(pos_.size());
  const auto nneg = static_cast<Eigen::Index>(neg_.size());
  r.setZero(npos + nneg);
  if (jac) jac->setZero(npos + nneg, n_params());

  std::optional<ModeModel> m;
  try {
    m.emplace(decode(p));
  } catch (const InputError&) {
    r.setConstant(std::numeric_limits<double>::infinity());
    return;
  }
  const Eigen::VectorXd& kappa = m->kappa();

  const double sp = 1.0 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(npos, 1)));
  const double sn = nneg > 0 ? std::sqrt(lambda_ / static_cast<double>(nneg)) / eps_ : 0.0;

  Eigen::MatrixXcd u;
  auto fill = [&](const std::vector<double>& grid, Eigen::Index row0, bool negative) {
    resolvent_columns(*m, grid, u);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto row = row0 + static_cast<Eigen::Index>(k);
      const auto uk = u.col(static_cast<Eigen::Index>(k));
      const double j = m->g().dot(uk.imag()) / kPi;
      double scale;
      if (negative) {
        const double excess = j - margin_ * thr_;
        if (excess <= 0.0) continue;
        scale = sn;
        r[row] = sn * excess;
      } else {
        const double jt = target_pos_[static_cast<Eigen::Index>(k)];
        scale = sp / (jt + eps_);
        r[row] = scale * (j - jt);
      }
      if (!jac) continue;
      auto jr = jac->row(row);
      int c = 0;
      for (int i = 0; i < n_; ++i) jr[c++] = -scale * (uk[i] * uk[i]).imag() / kPi;
      for (int i = 0; i < n_; ++i)
        for (int l = i + 1; l < n_; ++l) jr[c++] = -scale * 2.0 * (uk[i] * uk[l]).imag() / kPi;
      // dkappa/ds = kappa (hi - kappa) / hi
      for (int i = 0; i < n_; ++i)
        jr[c++] = scale * kappa[i] * (1.0 - kappa[i] / kappa_hi_) * (uk[i] * uk[i]).real() / (2.0 * kPi);
      for (int i = 0; i < n_; ++i) jr[c++] = scale * 2.0 * uk[i].imag() / kPi;
    }
  };
  fill(pos_, 0, false);
  if (nneg > 0 && lambda_ > 0.0) fill(neg_, npos, true);
}

double FitObjective::pos_residual(const ModeModel& m) const {
  double s = 0.0;
  for (std::size_t k = 0; k < pos_.size(); ++k) {
    const double jt = target_pos_[static_cast<Eigen::Index>(k)];
    const double e = (eval_model_sd(m, pos_[k]) - jt) / (jt + eps_);
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(pos_.size()));
}

// ---------------------------------------------------------------- init

ModeModel initialize_model(const SpectralFn& target, const FitConfig& cfg, int restart_index) {
  cfg.validate();
  const int n = cfg.n_modes;
  const auto& grid = cfg.pos_grid;
  const auto jt = sample(target, grid, "positive");
  const std::size_t np = grid.size();
  const double lo = grid.front(), hi = grid.back();
  const double span = std::max(hi - lo, std::abs(hi));
  const double jmax = *std::max_element(jt.begin(), jt.end());

  std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed), static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                    static_cast<std::uint32_t>(restart_index), 0x5eedu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  struct Peak {
    double height;
    std::size_t at;
  };
  std::vector<Peak> peaks;
  if (jmax > 0.0) {
    for (std::size_t k = 0; k < np; ++k) {
      const bool left = k == 0 || jt[k] > jt[k - 1];
      const bool right = k + 1 == np || jt[k] >= jt[k + 1];
      if (left && right && jt[k] > 1e-3 * jmax) peaks.push_back({jt[k], k});
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
  }

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd kappa(n), g(n);
  const int n_peaks = std::min<int>(n, static_cast<int>(peaks.size()));
  for (int i = 0; i < n_peaks; ++i) {
    const std::size_t at = peaks[static_cast<std::size_t>(i)].at;
    const double h = jt[at];
    std::size_t a = at, b = at;
    while (a > 0 && jt[a] > 0.5 * h) --a;
    while (b + 1 < np && jt[b] > 0.5 * h) ++b;
    const double width = std::max(grid[b] - grid[a], 2.0 * (hi - lo) / static_cast<double>(np));
    w(i, i) = grid[at];
    kappa[i] = width;
    // a Lorentzian of width kappa and height h has g^2 = pi kappa h / 2
    g[i] = std::sqrt(kPi * width * h / 2.0);
  }
  const int rest = n - n_peaks;
  // leftover modes go on a log ladder toward the low edge, each as wide as its position
  for (int q = 0; q < rest; ++q) {
    const int i = n_peaks + q;
    const double at = lo * std::pow(hi / lo, (q + 0.5) / rest);
    w(i, i) = at;
    kappa[i] = at;
    const double h = target(at);
    g[i] = std::sqrt(kPi * at * std::max(h, 0.0) / 2.0);
  }
  // restart 0 keeps the picked peaks as they are
  if (restart_index > 0)
    for (int i = 0; i < n; ++i) {
      w(i, i) += 0.02 * span * unit(rng);
      kappa[i] *= std::exp(0.3 * unit(rng));
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = 0.05 * span * unit(rng);
  if (jmax == 0.0) g.setZero();
  return ModeModel(std::move(w), std::move(kappa), std::move(g));
}

// ---------------------------------------------------------------- driver

FitResult fit_single(const SpectralFn& target, const FitConfig& cfg, const ModeModel& start, int restart_index) {
  cfg.validate();
  FitObjective obj(target, cfg);
  Eigen::VectorXd p = obj.encode(start);
  FitResult res;
  res.restart_index = restart_index;
  bool last_ok = false;

  LeastSquaresOptions opt;
  opt.max_iterations = cfg.max_iterations;
  opt.stall_window = cfg.stall_window;
  opt.stall_tol = cfg.stall_tol;
  const ResidualFn f = [&obj](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* j) { obj(x, r, j); };
  const std::vector<double> verify = refine_grid(cfg.neg_grid);
  const std::vector<double> schedule = cfg.neg_grid.empty() ? std::vector<double>{0.0} : cfg.penalty_schedule;
  for (double lambda : schedule) {
    obj.set_penalty(lambda);
    auto lm = levenberg_marquardt(f, p, opt);
    res.stage_starts.push_back(res.objective_history.size());
    res.objective_history.insert(res.objective_history.end(), lm.objective_history.begin(),
                                 lm.objective_history.end());
    res.iterations += lm.iterations;
    p = lm.params;
    res.objective = lm.objective;
    last_ok = lm.converged;
    if (lambda > 0.0 && max_negative(obj.decode(p), verify) <= cfg.neg_threshold) break;
  }
  res.converged = last_ok;
  res.model = obj.decode(p).canonical();
  res.pos_residual = obj.pos_residual(res.model);
  if (!cfg.neg_grid.empty()) {
    res.max_negative = max_negative(res.model, verify);
    res.neg_violation = std::max(0.0, res.max_negative - cfg.neg_threshold);
  }
  return res;
}

FitResult fit_model(const SpectralFn& target, const FitConfig& cfg) {
  cfg.validate();
  { const FitObjective check(target, cfg); }  // validates the target on both grids before spawning work

  const int nr = cfg.n_restarts;
  std::vector<std::optional<FitResult>> results(static_cast<std::size_t>(nr));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nr));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < nr; i = next++) {
      try {
        results[static_cast<std::size_t>(i)] = fit_single(target, cfg, initialize_model(target, cfg, i), i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  int nt = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nt = std::min(nt, nr);
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  }

  const FitResult* best = nullptr;
  for (int i = 0; i < nr; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    if (!r) continue;
    if (!best || r->objective < best->objective) best = &*r;
  }
  if (!best) std::rethrow_exception(errors.front());
  return *best;
}

FitReport fit_report(const FitResult& r, const SpectralFn& target, const FitConfig& cfg) {
  FitReport rep;
  rep.pos_residual = r.pos_residual;
  rep.neg_violation = r.neg_violation;
  rep.neg_threshold = cfg.neg_threshold;
  rep.resonances = model_resonances(r.model);
  const FitObjective obj(target, cfg);
  const double eps = obj.floor();
  for (double w : refine_grid(cfg.neg_grid)) {
    const double jm = eval_model_sd(r.model, w);
    rep.rows.push_back({w, target(w), jm, jm - cfg.neg_threshold, true});
  }
  for (double w : cfg.pos_grid) {
    const double jt = target(w), jm = eval_model_sd(r.model, w);
    rep.rows.push_back({w, jt, jm, (jm - jt) / (jt + eps), false});
  }
  return rep;
}

}  // namespace usc
