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

#include "usc/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <type_traits>
#include <variant>

#include <json.hpp>

#include "usc/io.hpp"

namespace usc {

namespace {

using nlohmann::json;

// A JSON object plus its path, for diagnostics.
class Node {
 public:
  Node(const json& j, std::string path, std::string source) : j_(j), path_(std::move(path)), src_(std::move(source)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what) const { throw InputError(src_ + ": " + path_ + ": " + what); }

  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [k, v] : j_.items()) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) fail("unknown field '" + k + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  Node child(const char* key) const {
    if (!has(key)) fail("missing field '" + std::string(key) + "'");
    return Node(j_.at(key), path_ + "." + key, src_);
  }

  double number(const char* key) const {
    if (!has(key)) fail("missing field '" + std::string(key) + "'");
    const auto& v = j_.at(key);
    if (!v.is_number()) fail("field '" + std::string(key) + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail("field '" + std::string(key) + "' must be finite");
    return x;
  }
  double number(const char* key, double dflt) const { return has(key) ? number(key) : dflt; }

  long long integer(const char* key, long long dflt) const {
    if (!has(key)) return dflt;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) fail("field '" + std::string(key) + "' must be an integer");
    return v.get<long long>();
  }

  bool boolean(const char* key, bool dflt) const {
    if (!has(key)) return dflt;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) fail("field '" + std::string(key) + "' must be true or false");
    return v.get<bool>();
  }

  std::string string(const char* key) const {
    if (!has(key)) fail("missing field '" + std::string(key) + "'");
    const auto& v = j_.at(key);
    if (!v.is_string()) fail("field '" + std::string(key) + "' must be a string");
    return v.get<std::string>();
  }
  std::string string(const char* key, const std::string& dflt) const { return has(key) ? string(key) : dflt; }

  std::vector<double> numbers(const char* key) const {
    if (!has(key)) fail("missing field '" + std::string(key) + "'");
    const auto& v = j_.at(key);
    if (!v.is_array()) fail("field '" + std::string(key) + "' must be an array");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail("field '" + std::string(key) + "' has a non-numeric entry");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const char* key) const {
    if (!has(key)) fail("missing field '" + std::string(key) + "'");
    const auto& v = j_.at(key);
    if (!v.is_array()) fail("field '" + std::string(key) + "' must be an array");
    std::vector<int> out;
    for (const auto& x : v) {
      if (!x.is_number_integer()) fail("field '" + std::string(key) + "' has a non-integer entry");
      out.push_back(x.get<int>());
    }
    return out;
  }

  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::string src_;
};

// Rewraps a validate() failure with the JSON path.
template <class F>
void checked(const Node& n, F&& f) {
  try {
    f();
  } catch (const InputError& e) {
    n.fail(e.what());
  } catch (const std::invalid_argument& e) {
    n.fail(e.what());
  }
}

TargetSpec parse_target(const Node& n, const std::filesystem::path& base_dir) {
  const std::string type = n.string("type");
  if (type == "lorentzian" || type == "single_mode_ohmic") {
    n.allow({"type", "omega_c", "g", "kappa"});
    const double wc = n.number("omega_c"), g = n.number("g"), k = n.number("kappa");
    if (type == "lorentzian") {
      LorentzianParams p{wc, g, k};
      checked(n, [&] { p.validate(); });
      return p;
    }
    SingleModeOhmicParams p{wc, g, k};
    checked(n, [&] { p.validate(); });
    return p;
  }
  if (type == "tabulated") {
    n.allow({"type", "path"});
    std::filesystem::path p = n.string("path");
    if (p.is_relative()) p = base_dir / p;
    return TabulatedTarget{p};
  }
  n.fail("unknown target type '" + type + "' (lorentzian | single_mode_ohmic | tabulated)");
}

}  // namespace

std::vector<double> DynamicsConfig::grid() const {
  std::vector<double> t(static_cast<std::size_t>(n_outputs));
  for (int k = 0; k < n_outputs; ++k) t[static_cast<std::size_t>(k)] = t_max * k / (n_outputs - 1);
  return t;
}

SpectralFn RunConfig::target_function() const {
  return std::visit(
      [](const auto& t) -> SpectralFn {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, TabulatedTarget>) {
          return as_function(read_tabulated_csv(t.path));
        } else {
          return as_function(t);
        }
      },
      target);
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
  const Node root(doc, "$", source);
  root.allow({"$schema", "$comment", "description", "units", "target", "emitter", "fit", "basis", "dynamics", "oracle", "sweep",
              "compare", "outputs", "plots"});

  RunConfig c;
  try {
    c.units = parse_energy_unit(root.string("units"));
  } catch (const InputError& e) {
    root.fail(e.what());
  }
  c.target = parse_target(root.child("target"), base_dir);

  {
    const Node n = root.child("emitter");
    n.allow({"omega_e", "initial_state"});
    c.emitter.omega_e = n.number("omega_e");
    const std::string s = n.string("initial_state", "excited");
    if (s == "excited") {
      c.emitter.initial_state = InitialState::excited;
    } else if (s == "ground") {
      c.emitter.initial_state = InitialState::ground;
    } else {
      n.fail("initial_state must be 'excited' or 'ground'");
    }
    checked(n, [&] { c.emitter.validate(); });
  }

  {
    const Node n = root.child("fit");
    n.allow({"n_modes", "neg_threshold", "pos_window", "pos_points", "suppress_negative", "neg_near", "neg_edge",
             "neg_points", "max_iterations", "n_restarts", "rng_seed", "penalty_schedule", "penalty_margin",
             "stall_window", "stall_tol", "threads"});
    FitConfig& f = c.fit;
    FitGrids& g = c.grids;
    f.n_modes = static_cast<int>(n.integer("n_modes", 1));
    f.neg_threshold = n.number("neg_threshold", f.neg_threshold);
    const auto win = n.numbers("pos_window");
    if (win.size() != 2 || !(win[0] >= 0.0) || !(win[1] > win[0])) n.fail("pos_window must be [lo, hi] with 0 <= lo < hi");
    g.pos_lo = win[0];
    g.pos_hi = win[1];
    g.pos_points = static_cast<int>(n.integer("pos_points", g.pos_points));
    g.suppress_negative = n.boolean("suppress_negative", true);
    g.neg_near = n.number("neg_near", 1e-3 * c.emitter.omega_e);
    g.neg_edge = n.number("neg_edge", g.pos_hi);
    g.neg_points = static_cast<int>(n.integer("neg_points", g.neg_points));
    if (g.pos_points < 2) n.fail("pos_points must be >= 2");
    if (g.suppress_negative && (g.neg_points < 2 || !(g.neg_near > 0.0) || !(g.neg_edge > g.neg_near)))
      n.fail("negative grid needs neg_points >= 2 and 0 < neg_near < neg_edge");
    f.max_iterations = static_cast<int>(n.integer("max_iterations", f.max_iterations));
    f.n_restarts = static_cast<int>(n.integer("n_restarts", f.n_restarts));
    const long long seed = n.integer("rng_seed", static_cast<long long>(f.rng_seed));
    if (seed < 0) n.fail("rng_seed must be >= 0");
    f.rng_seed = static_cast<std::uint64_t>(seed);
    if (n.has("penalty_schedule")) f.penalty_schedule = n.numbers("penalty_schedule");
    f.penalty_margin = n.number("penalty_margin", f.penalty_margin);
    f.stall_window = static_cast<int>(n.integer("stall_window", f.stall_window));
    f.stall_tol = n.number("stall_tol", f.stall_tol);
    f.threads = static_cast<int>(n.integer("threads", f.threads));
    f.pos_grid = uniform_grid(g.pos_lo, g.pos_hi, g.pos_points);
    if (g.suppress_negative) f.neg_grid = negative_log_grid(g.neg_near, g.neg_edge, g.neg_points);
    checked(n, [&] { f.validate(); });
  }

  {
    const Node n = root.child("basis");
    n.allow({"max_total_excitations", "dimension_cap"});
    c.basis.n_modes = c.fit.n_modes;
    c.basis.max_total_excitations = static_cast<int>(n.integer("max_total_excitations", 3));
    const long long cap = n.integer("dimension_cap", 200000);
    if (cap < 1) n.fail("dimension_cap must be >= 1");
    c.basis.dimension_cap = static_cast<std::size_t>(cap);
    checked(n, [&] { c.basis.validate(); });
  }

  {
    const Node n = root.child("dynamics");
    n.allow({"t_max", "n_outputs", "rtol", "atol", "truncation_tolerance", "steady_state_horizon", "stationarity_tol"});
    DynamicsConfig& d = c.dynamics;
    d.t_max = n.number("t_max");
    d.n_outputs = static_cast<int>(n.integer("n_outputs", d.n_outputs));
    d.tol.rtol = n.number("rtol", d.tol.rtol);
    d.tol.atol = n.number("atol", d.tol.atol);
    d.truncation_tolerance = n.number("truncation_tolerance", 0.0);
    d.steady_state_horizon = n.number("steady_state_horizon", 0.0);
    d.stationarity_tol = n.number("stationarity_tol", d.stationarity_tol);
    if (!(d.t_max > 0.0)) n.fail("t_max must be > 0");
    if (d.n_outputs < 2) n.fail("n_outputs must be >= 2");
    if (!(d.tol.rtol > 0.0) || !(d.tol.atol > 0.0)) n.fail("rtol and atol must be > 0");
    if (d.truncation_tolerance < 0.0 || d.steady_state_horizon < 0.0 || !(d.stationarity_tol > 0.0))
      n.fail("truncation_tolerance and steady_state_horizon must be >= 0, stationarity_tol > 0");
  }

  if (root.has("oracle")) {
    const Node n = root.child("oracle");
    n.allow({"omega_min", "omega_max", "n_points", "max_total_excitations", "convergence_check"});
    OracleConfig o;
    o.discretization.omega_min = n.number("omega_min");
    o.discretization.omega_max = n.number("omega_max");
    o.discretization.n_points = static_cast<int>(n.integer("n_points", 400));
    o.max_total_excitations = static_cast<int>(n.integer("max_total_excitations", c.basis.max_total_excitations));
    o.convergence_check = n.boolean("convergence_check", false);
    if (o.max_total_excitations < 1) n.fail("max_total_excitations must be >= 1");
    checked(n, [&] { o.discretization.validate(); });
    c.oracle = o;
  }

  if (root.has("sweep")) {
    const Node n = root.child("sweep");
    n.allow({"n_modes", "thresholds"});
    SweepConfig s;
    s.n_modes = n.integers("n_modes");
    s.thresholds = n.numbers("thresholds");
    if (s.n_modes.empty() || s.thresholds.empty()) n.fail("n_modes and thresholds must be non-empty");
    for (int m : s.n_modes)
      if (m < 1) n.fail("n_modes entries must be >= 1");
    for (double t : s.thresholds)
      if (!(t > 0.0)) n.fail("thresholds must be > 0");
    c.sweep = s;
  }

  if (root.has("compare")) {
    const Node n = root.child("compare");
    n.allow({"floor"});
    c.error_floor = n.number("floor");
    if (!(c.error_floor > 0.0)) n.fail("floor must be > 0");
  }

  c.outputs = root.string("outputs", "out");
  if (root.has("plots")) c.plots = root.boolean("plots", true);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path(), path.string());
}

}  // namespace usc
