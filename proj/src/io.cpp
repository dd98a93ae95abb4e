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

#include "usc/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace usc {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t a = 0;
  while (true) {
    const auto b = line.find(',', a);
    out.push_back(trim(line.substr(a, b == std::string_view::npos ? std::string_view::npos : b - a)));
    if (b == std::string_view::npos) break;
    a = b + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& v) {
  if (s.empty()) return false;
  const std::string tmp(s);
  char* end = nullptr;
  v = std::strtod(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size();
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw InputError(source + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> as_vector(const json& j, const char* key, const std::string& source) {
  if (!j.contains(key) || !j[key].is_array()) throw InputError(source + ": model field '" + key + "' missing or not an array");
  std::vector<double> v;
  for (const auto& x : j[key]) {
    if (!x.is_number()) throw InputError(source + ": model field '" + key + "' has a non-numeric entry");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------- tabulated SD

TabulatedSD parse_tabulated_csv(std::istream& in, const std::string& source) {
  std::vector<double> w, j;
  std::string line;
  std::size_t lineno = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = split(t);
    if (!seen_row) {
      seen_row = true;
      if (f.size() == 2 && f[0] == "omega" && f[1] == "j") continue;
    }
    if (f.size() != 2) fail(source, lineno, "expected 2 columns (omega,j), found " + std::to_string(f.size()));
    double a, b;
    if (!parse_double(f[0], a)) fail(source, lineno, "cannot parse omega '" + std::string(f[0]) + "'");
    if (!parse_double(f[1], b)) fail(source, lineno, "cannot parse j '" + std::string(f[1]) + "'");
    if (!std::isfinite(a) || !std::isfinite(b)) fail(source, lineno, "non-finite value");
    if (b < 0.0) fail(source, lineno, "negative spectral density " + std::string(f[1]));
    if (!w.empty() && !(a > w.back())) fail(source, lineno, "omega not strictly increasing");
    w.push_back(a);
    j.push_back(b);
  }
  if (w.empty()) throw InputError(source + ": no samples");
  return TabulatedSD(std::move(w), std::move(j));
}

TabulatedSD read_tabulated_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_tabulated_csv(in, path.string());
}

// ---------------------------------------------------------------- model JSON

std::string model_to_json(const ModeModel& m, EnergyUnit units, const FitResult* fit) {
  json j;
  const int n = m.n_modes();
  j["n_modes"] = n;
  std::vector<double> w;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) w.push_back(m.omega_mat()(r, c));
  j["omega_mat"] = w;
  j["kappa"] = std::vector<double>(m.kappa().data(), m.kappa().data() + n);
  j["g"] = std::vector<double>(m.g().data(), m.g().data() + n);
  j["units"] = std::string(to_string(units));
  if (fit) {
    j["fit"] = {{"pos_residual", fit->pos_residual},
                {"neg_violation", fit->neg_violation},
                {"max_negative", fit->max_negative},
                {"converged", fit->converged},
                {"objective", fit->objective},
                {"restart_index", fit->restart_index}};
  }
  return j.dump(2) + "\n";
}

ModelDocument model_from_json(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
  if (!j.is_object()) throw InputError(source + ": model document must be a JSON object");
  if (!j.contains("n_modes") || !j["n_modes"].is_number_integer())
    throw InputError(source + ": model field 'n_modes' missing or not an integer");
  const int n = j["n_modes"].get<int>();
  if (n < 1) throw InputError(source + ": n_modes must be >= 1");
  const auto w = as_vector(j, "omega_mat", source);
  const auto k = as_vector(j, "kappa", source);
  const auto g = as_vector(j, "g", source);
  const auto nn = static_cast<std::size_t>(n);
  if (w.size() != nn * nn || k.size() != nn || g.size() != nn)
    throw DimensionError(source + ": array lengths inconsistent with n_modes=" + std::to_string(n));
  ModelDocument doc;
  if (j.contains("units")) {
    if (!j["units"].is_string()) throw InputError(source + ": 'units' must be a string");
    doc.units = parse_energy_unit(j["units"].get<std::string>());
  }
  Eigen::MatrixXd om(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) om(r, c) = w[static_cast<std::size_t>(r * n + c)];
  doc.model = ModeModel(std::move(om), Eigen::Map<const Eigen::VectorXd>(k.data(), n),
                        Eigen::Map<const Eigen::VectorXd>(g.data(), n));
  return doc;
}

void write_model_json(const std::filesystem::path& path, const ModeModel& m, EnergyUnit units, const FitResult* fit) {
  auto out = open_out(path);
  out << model_to_json(m, units, fit);
}

ModelDocument read_model_json(const std::filesystem::path& path) { return model_from_json(slurp(path), path.string()); }

// ---------------------------------------------------------------- trajectories

void write_trajectory_csv(std::ostream& out, const Trajectory& tr, EnergyUnit units) {
  out << "# generated " << timestamp() << "\n";
  out << "# units=" << to_string(units) << "\n";
  if (tr.oracle) out << "# oracle=true\n";
  if (tr.recurrence_time) out << "# recurrence_time=" << num(*tr.recurrence_time) << "\n";
  if (tr.recurrence_warning) out << "# recurrence_warning=true\n";
  out << "t,P_e,P_bath,purity,trace_defect";
  for (int i = 0; i < tr.n_modes(); ++i) out << ",n_" << (i + 1);
  out << ",t_fs\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    out << num(tr.times[k]) << ',' << num(tr.emitter_population[k]) << ',' << num(tr.bath_photons[k]) << ','
        << num(tr.purity[k]) << ',' << num(tr.trace_defect[k]);
    for (int i = 0; i < tr.n_modes(); ++i) out << ',' << num(tr.mode_populations(static_cast<Eigen::Index>(k), i));
    out << ',' << num(to_femtoseconds(tr.times[k], units)) << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr, EnergyUnit units) {
  auto out = open_out(path);
  write_trajectory_csv(out, tr, units);
}

Trajectory parse_trajectory_csv(std::istream& in, const std::string& source) {
  Trajectory tr;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto body = trim(t.substr(1));
      if (body == "oracle=true") tr.oracle = true;
      if (body == "recurrence_warning=true") tr.recurrence_warning = true;
      if (body.starts_with("recurrence_time=")) {
        double v;
        if (!parse_double(body.substr(16), v)) fail(source, lineno, "bad recurrence_time");
        tr.recurrence_time = v;
      }
      continue;
    }
    const auto f = split(t);
    if (header.empty()) {
      for (auto s : f) header.emplace_back(s);
      if (header.size() < 6 || header[0] != "t" || header[1] != "P_e" || header[2] != "P_bath" ||
          header[3] != "purity" || header[4] != "trace_defect" || header.back() != "t_fs")
        fail(source, lineno, "unexpected trajectory header");
      continue;
    }
    if (f.size() != header.size())
      fail(source, lineno, "expected " + std::to_string(header.size()) + " columns, found " + std::to_string(f.size()));
    std::vector<double> r(f.size());
    for (std::size_t c = 0; c < f.size(); ++c)
      if (!parse_double(f[c], r[c])) fail(source, lineno, "cannot parse '" + std::string(f[c]) + "'");
    rows.push_back(std::move(r));
    row_lines.push_back(lineno);
  }
  if (header.empty()) throw InputError(source + ": missing trajectory header");
  const auto nm = static_cast<Eigen::Index>(header.size() - 6);
  tr.mode_populations.resize(static_cast<Eigen::Index>(rows.size()), nm);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (k > 0 && !(r[0] > tr.times.back())) fail(source, row_lines[k], "time column not strictly increasing");
    tr.times.push_back(r[0]);
    tr.emitter_population.push_back(r[1]);
    tr.bath_photons.push_back(r[2]);
    tr.purity.push_back(r[3]);
    tr.trace_defect.push_back(r[4]);
    for (Eigen::Index i = 0; i < nm; ++i) tr.mode_populations(static_cast<Eigen::Index>(k), i) = r[5 + i];
  }
  return tr;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_trajectory_csv(in, path.string());
}

// ---------------------------------------------------------------- reports

void write_fit_report_csv(const std::filesystem::path& path, const FitReport& rep) {
  auto out = open_out(path);
  out << "# generated " << timestamp() << "\n";
  out << "# pos_residual=" << num(rep.pos_residual) << "\n";
  out << "# neg_violation=" << num(rep.neg_violation) << "\n";
  out << "# neg_threshold=" << num(rep.neg_threshold) << "\n";
  out << "region,omega,target,model,residual\n";
  for (const auto& r : rep.rows)
    out << (r.negative ? "neg" : "pos") << ',' << num(r.omega) << ',' << num(r.target) << ',' << num(r.model) << ','
        << num(r.residual) << '\n';
}

void write_resonances_csv(const std::filesystem::path& path, const std::vector<cplx>& res) {
  auto out = open_out(path);
  out << "# generated " << timestamp() << "\n";
  out << "re,im\n";
  for (const auto& z : res) out << num(z.real()) << ',' << num(z.imag()) << '\n';
}

void write_error_csv(std::ostream& out, const ErrorReport& rep) {
  out << "# generated " << timestamp() << "\n";
  out << "# avg_rel_error=" << num(rep.avg_rel_error) << "\n";
  out << "# max_rel_error=" << num(rep.max_rel_error) << "\n";
  out << "# normalization_floor=" << num(rep.normalization_floor) << "\n";
  out << "t,rel_error\n";
  for (std::size_t k = 0; k < rep.rel_error_t.size(); ++k)
    out << num(rep.times[k]) << ',' << num(rep.rel_error_t[k]) << '\n';
}

void write_error_csv(const std::filesystem::path& path, const ErrorReport& rep) {
  auto out = open_out(path);
  write_error_csv(out, rep);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "# generated " << timestamp() << "\n";
  out << "n_modes,threshold,avg_rel_error,max_rel_error,pos_residual,neg_violation,status\n";
  for (const auto& c : cells) {
    std::string status = c.status;
    for (auto& ch : status)
      if (ch == ',' || ch == '\n') ch = ';';
    out << c.n_modes << ',' << num(c.threshold) << ',' << num(c.avg_rel_error) << ',' << num(c.max_rel_error) << ','
        << num(c.pos_residual) << ',' << num(c.neg_violation) << ',' << status << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepCell>& cells) {
  auto out = open_out(path);
  write_sweep_csv(out, cells);
}

std::vector<SweepCell> parse_sweep_csv(std::istream& in, const std::string& source) {
  std::vector<SweepCell> cells;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = split(t);
    if (!header) {
      if (f.size() != 7 || f[0] != "n_modes") fail(source, lineno, "unexpected sweep header");
      header = true;
      continue;
    }
    if (f.size() != 7) fail(source, lineno, "expected 7 columns");
    SweepCell c;
    double v[5];
    int n = 0;
    if (std::from_chars(f[0].data(), f[0].data() + f[0].size(), n).ec != std::errc())
      fail(source, lineno, "cannot parse n_modes");
    for (int k = 0; k < 5; ++k)
      if (!parse_double(f[static_cast<std::size_t>(k + 1)], v[k])) fail(source, lineno, "cannot parse number");
    c.n_modes = n;
    c.threshold = v[0];
    c.avg_rel_error = v[1];
    c.max_rel_error = v[2];
    c.pos_residual = v[3];
    c.neg_violation = v[4];
    c.status = std::string(f[6]);
    cells.push_back(std::move(c));
  }
  return cells;
}

}  // namespace usc
