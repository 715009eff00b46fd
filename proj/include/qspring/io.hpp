// Copyright 2026 The qspring Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file io.hpp
 * @brief JSON configuration and reports, CSV tables.
 *
 * Configuration files carry frequencies in Hz under `*_hz` keys; they are
 * converted to rad/s here and nowhere else. The single exception is
 * membrane.kappa_th_hz, a plain heat-link rate (k_B kappa_th in W/K) that is
 * stored as given. Emitted numbers are rounded to 12 significant digits and
 * objects are key-sorted, so identical runs produce identical bytes.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "qspring/constants.hpp"
#include "qspring/error.hpp"
#include "qspring/fock.hpp"
#include "qspring/gaussian.hpp"
#include "qspring/model.hpp"
#include "qspring/physics.hpp"
#include "qspring/scenarios.hpp"

namespace qspring::io {

using json = nlohmann::json;

/// Rounds to 12 significant digits; non-finite values become null.
inline json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

inline json matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(num(m(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline json vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
  return out;
}

inline json vector(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// SystemParams <-> JSON

/// `rounded` = false keeps full precision (used when overrides are re-parsed).
inline json params_to_json(const SystemParams& p, bool rounded = true) {
  auto num = [rounded](double v) -> json { return rounded ? io::num(v) : json(v); };
  auto opt_num = [&](const std::optional<double>& v) { return v ? num(*v) : json(nullptr); };
  json j;
  j["atom"] = {{"mass_kg", num(p.atom.mass_kg)},
               {"gamma_hz", num(rad_s_to_hz(p.atom.gamma_rad_s))},
               {"lambda1_m", num(p.atom.lambda1_m)},
               {"lambda2_m", num(p.atom.lambda2_m)},
               {"delta_hz", num(rad_s_to_hz(p.atom.delta_rad_s))},
               {"vacuum_rabi_hz", num(rad_s_to_hz(p.atom.vacuum_rabi_rad_s))}};
  j["cavity"] = {{"length_m", num(p.cavity.length_m)},
                 {"finesse", num(p.cavity.finesse)},
                 {"waist_m", num(p.cavity.waist_m)},
                 {"detuning_hz", num(rad_s_to_hz(p.cavity.detuning_rad_s))},
                 {"mode_index_offset", p.cavity.mode_index_offset}};
  j["membrane"] = {{"mass_kg", num(p.membrane.mass_kg)},
                   {"omega_m_hz", num(rad_s_to_hz(p.membrane.omega_m_rad_s))},
                   {"quality", num(p.membrane.quality)},
                   {"reflectivity", num(p.membrane.reflectivity)},
                   {"temperature_K", opt_num(p.membrane.temperature_K)},
                   {"kappa_th_hz", num(p.membrane.kappa_th_hz)},
                   {"side_m", num(p.membrane.side_m)},
                   {"thickness_m", num(p.membrane.thickness_m)}};
  j["drive"] = {{"circulating_power_W", opt_num(p.drive.circulating_power_W)},
                {"alpha", opt_num(p.drive.alpha)}};
  return j;
}

namespace detail {

inline const std::map<std::string, std::vector<std::string>>& param_fields() {
  static const std::map<std::string, std::vector<std::string>> f{
      {"atom", {"mass_kg", "gamma_hz", "lambda1_m", "lambda2_m", "delta_hz", "vacuum_rabi_hz"}},
      {"cavity", {"length_m", "finesse", "waist_m", "detuning_hz", "mode_index_offset"}},
      {"membrane",
       {"mass_kg", "omega_m_hz", "quality", "reflectivity", "temperature_K", "kappa_th_hz", "side_m", "thickness_m"}},
      {"drive", {"circulating_power_W", "alpha"}}};
  return f;
}

inline bool nullable(const std::string& path) {
  return path == "membrane.temperature_K" || path == "drive.circulating_power_W" || path == "drive.alpha";
}

inline void check_keys(const json& j) {
  if (!j.is_object()) throw DomainError("params", "configuration must be a JSON object");
  const auto& fields = param_fields();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto sec = fields.find(it.key());
    if (sec == fields.end()) throw DomainError(it.key(), "unknown section");
    if (!it->is_object()) throw DomainError(it.key(), "section must be an object");
    for (auto f = it->begin(); f != it->end(); ++f) {
      const std::string path = it.key() + "." + f.key();
      if (std::find(sec->second.begin(), sec->second.end(), f.key()) == sec->second.end())
        throw DomainError(path, "unknown field");
      if (f->is_null() && nullable(path)) continue;
      if (!f->is_number()) throw DomainError(path, "must be a number");
    }
  }
  for (const auto& [sec, names] : fields)
    for (const auto& n : names) {
      const std::string path = sec + "." + n;
      if (!nullable(path) && !(j.contains(sec) && j[sec].contains(n))) throw DomainError(path, "missing field");
    }
}

inline std::optional<double> opt(const json& sec, const char* key) {
  if (!sec.contains(key) || sec[key].is_null()) return std::nullopt;
  return sec[key].get<double>();
}

}  // namespace detail

inline SystemParams params_from_json(const json& j) {
  detail::check_keys(j);
  SystemParams p;
  const auto& a = j["atom"];
  p.atom.mass_kg = a["mass_kg"].get<double>();
  p.atom.gamma_rad_s = hz_to_rad_s(a["gamma_hz"].get<double>());
  p.atom.lambda1_m = a["lambda1_m"].get<double>();
  p.atom.lambda2_m = a["lambda2_m"].get<double>();
  p.atom.delta_rad_s = hz_to_rad_s(a["delta_hz"].get<double>());
  p.atom.vacuum_rabi_rad_s = hz_to_rad_s(a["vacuum_rabi_hz"].get<double>());
  const auto& c = j["cavity"];
  p.cavity.length_m = c["length_m"].get<double>();
  p.cavity.finesse = c["finesse"].get<double>();
  p.cavity.waist_m = c["waist_m"].get<double>();
  p.cavity.detuning_rad_s = hz_to_rad_s(c["detuning_hz"].get<double>());
  const double q = c["mode_index_offset"].get<double>();
  if (q != std::floor(q)) throw DomainError("cavity.mode_index_offset", "must be an integer");
  p.cavity.mode_index_offset = static_cast<int>(q);
  const auto& m = j["membrane"];
  p.membrane.mass_kg = m["mass_kg"].get<double>();
  p.membrane.omega_m_rad_s = hz_to_rad_s(m["omega_m_hz"].get<double>());
  p.membrane.quality = m["quality"].get<double>();
  p.membrane.reflectivity = m["reflectivity"].get<double>();
  p.membrane.temperature_K = detail::opt(m, "temperature_K");
  p.membrane.kappa_th_hz = m["kappa_th_hz"].get<double>();
  p.membrane.side_m = m["side_m"].get<double>();
  p.membrane.thickness_m = m["thickness_m"].get<double>();
  const json d = j.contains("drive") ? j["drive"] : json::object();
  p.drive.circulating_power_W = detail::opt(d, "circulating_power_W");
  p.drive.alpha = detail::opt(d, "alpha");
  validate(p);
  return p;
}

/**
 * Applies a dotted `section.field=value` override to a params JSON. Setting
 * one drive quantity clears the other; `null` unsets optional fields.
 */
inline void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw DomainError(assignment, "override must look like section.field=value");
  const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  const auto dot = path.find('.');
  if (dot == std::string::npos) throw DomainError(path, "override key must be section.field");
  const std::string sec = path.substr(0, dot), field = path.substr(dot + 1);
  const auto& fields = detail::param_fields();
  const auto s = fields.find(sec);
  if (s == fields.end()) throw DomainError(path, "unknown section");
  if (std::find(s->second.begin(), s->second.end(), field) == s->second.end())
    throw DomainError(path, "unknown field");
  json v;
  try {
    v = json::parse(text);
  } catch (const json::parse_error&) {
    throw DomainError(path, "value '" + text + "' is not a number");
  }
  if (!(v.is_number() || (v.is_null() && detail::nullable(path))))
    throw DomainError(path, "value '" + text + "' is not a number");
  j[sec][field] = v;
  if (sec == "drive" && !v.is_null()) j["drive"][field == "alpha" ? "circulating_power_W" : "alpha"] = nullptr;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError(path, std::string("invalid JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports

inline json site_json(const LatticeSite& s) {
  return {{"x_at_m", num(s.x_at_m)},       {"theta", num(s.theta)},          {"xi", num(s.xi)},
          {"curvature_per_m2", num(s.curvature)}, {"site_index", s.site_index}};
}

inline json rates_json(const DerivedRates& d) {
  return {{"kappa_rad_s", num(d.kappa_rad_s)},
          {"cooperativity", num(d.cooperativity)},
          {"cooperativity_geometric", num(d.cooperativity_geometric)},
          {"U0_rad_s", num(d.U0_rad_s)},
          {"eta", num(d.eta)},
          {"l_at_m", num(d.l_at_m)},
          {"l_m_m", num(d.l_m_m)},
          {"alpha", num(d.alpha)},
          {"omega_1_rad_s", num(d.omega_1_rad_s)},
          {"omega_at_rad_s", num(d.omega_at_rad_s)},
          {"g_atc_rad_s", num(d.g_atc_rad_s)},
          {"g_mc_rad_s", num(d.g_mc_rad_s)},
          {"f1", num(d.f1)},
          {"f2", num(d.f2)},
          {"x_m_m", num(d.x_m_m)},
          {"G_rad_s", num(d.G_rad_s)},
          {"G_over_2pi_hz", num(rad_s_to_hz(d.G_rad_s))},
          {"gamma_c_plus_rad_s", num(d.gamma_c_plus)},
          {"gamma_c_minus_rad_s", num(d.gamma_c_minus)},
          {"phi_rad", num(d.phi)},
          {"gamma_at_rad_s", num(d.gamma_at)},
          {"gamma_m_natural_rad_s", num(d.gamma_m_natural)},
          {"temperature_K", num(d.temperature_K)},
          {"n_bar", num(d.n_bar)},
          {"Gamma_m_rad_s", num(d.Gamma_m)},
          {"P_c_W", num(d.P_c_W)},
          {"P_c_resonant_W", num(d.P_c_resonant_W)},
          {"P_a_W", num(d.P_a_W)},
          {"delta_T_K", num(d.delta_T_K)}};
}

inline json conditions_json(const ConditionReport& r) {
  json c = json::object();
  for (const auto& k : r.conditions)
    c[k.name] = {{"ratio", num(k.ratio)},
                 {"threshold", num(k.threshold)},
                 {"pass", k.pass},
                 {"level", to_string(k.level)},
                 {"relation", k.relation}};
  return c;
}

inline json thresholds_json(const Thresholds& t) {
  return {{"strong", num(t.strong)},
          {"marginal", num(t.marginal)},
          {"balance_strong", num(t.balance_strong)},
          {"balance_marginal", num(t.balance_marginal)}};
}

inline json ledger_json(const LedgerResult& L) {
  json j;
  j["kind"] = "ledger";
  j["resolved_params"] = params_to_json(L.params);
  j["site"] = site_json(L.site);
  j["waves"] = {{"k1_per_m", num(L.waves.k1)}, {"k2_per_m", num(L.waves.k2)},
                {"delta_k_per_m", num(L.waves.delta_k)}, {"q", L.waves.q}};
  j["membrane_position"] = {{"x_m_m", num(L.membrane.x_m)}, {"f1", num(L.membrane.f1)}, {"f2", num(L.membrane.f2)}};
  j["rates"] = rates_json(L.rates);
  j["conditions"] = conditions_json(L.report);
  j["thresholds"] = thresholds_json(L.report.thresholds);
  j["regime"] = L.report.regime;
  j["effective_model"] = {{"max_re_eig_rad_s", num(L.effective_max_re_eig)}, {"stable", L.effective_max_re_eig < 0}};
  json a = json::object();
  for (const auto& x : L.annotations) {
    json e = {{"value", num(x.value)}, {"unit", x.unit}};
    e["reference"] = x.reference ? num(*x.reference) : json(nullptr);
    if (!x.note.empty()) e["note"] = x.note;
    a[x.name] = std::move(e);
  }
  j["reference_comparison"] = std::move(a);
  return j;
}

inline json transfer_config_json(const TransferConfig& c) {
  return {{"G", num(c.G)},
          {"omega_over_G", num(c.omega_over_G)},
          {"gamma_over_G", num(c.gamma_over_G)},
          {"phi", num(c.phi)},
          {"squeeze_db", num(c.squeeze_db)},
          {"n_bar", num(c.n_bar)},
          {"bath_n_bar", opt_num(c.bath_n_bar)},
          {"membrane_loss", c.membrane_loss == MembraneLoss::gamma_m_nbar ? "gamma_m_nbar" : "channel_total"},
          {"t_max_G", num(c.t_max_G)},
          {"samples", c.samples}};
}

inline json transfer_json(const TransferResult& r) {
  json j;
  j["kind"] = "transfer";
  j["config"] = transfer_config_json(r.config);
  j["rates"] = {{"G", num(r.rates.G)},
                {"omega_at", num(r.rates.omega_at)},
                {"omega_m", num(r.rates.omega_m)},
                {"gamma_c_plus", num(r.rates.gamma_c_plus)},
                {"gamma_c_minus", num(r.rates.gamma_c_minus)},
                {"phi", num(r.rates.phi)},
                {"gamma_at", num(r.rates.gamma_at)},
                {"gamma_m", num(r.rates.gamma_m)},
                {"n_bar", num(r.rates.n_bar)}};
  j["times_G"] = vector(r.times);
  j["membrane_squeezing_db"] = vector(r.membrane_squeezing_db);
  j["membrane_squeezing_raw_db"] = vector(r.membrane_squeezing_raw_db);
  j["atom_squeezing_db"] = vector(r.atom_squeezing_db);
  j["rotation_optimized"] = r.rotation_optimized;
  j["max_transferred_db"] = num(r.max_transferred_db);
  j["t_at_max_G"] = num(r.t_at_max);
  j["max_transferred_raw_db"] = num(r.max_transferred_raw_db);
  j["swap_fidelity_at_half_pi"] = num(r.swap_fidelity_at_half_pi);
  j["swap_fidelity_raw_at_half_pi"] = num(r.swap_fidelity_raw_at_half_pi);
  j["swap_rotation_at_half_pi_rad"] = num(r.swap_rotation_at_half_pi);
  j["min_uncertainty_eigenvalue"] = num(r.min_uncertainty_eigenvalue);
  j["det_drift"] = num(r.det_drift);
  j["dt"] = num(r.dt);
  return j;
}

inline json adiabatic_json(const std::vector<AdiabaticRow>& rows, const AdiabaticConfig& c) {
  json j;
  j["kind"] = "adiabatic";
  j["config"] = {{"delta", num(c.delta)},
                 {"coupling_scale", num(c.coupling_scale)},
                 {"kappa_over_delta", num(c.kappa_over_delta)},
                 {"omega_over_delta", num(c.omega_over_delta)},
                 {"squeeze_db", num(c.squeeze_db)},
                 {"n_bar", num(c.n_bar)},
                 {"gamma_at", num(c.gamma_at)},
                 {"gamma_m", num(c.gamma_m)},
                 {"bath_n_bar", num(c.bath_n_bar)},
                 {"window_G", num(c.window_G)},
                 {"samples", c.samples}};
  json r = json::array();
  for (const auto& x : rows) {
    json e = {{"ratio", num(x.ratio)},
              {"G", num(x.G)},
              {"discrepancy", num(x.discrepancy)},
              {"abs_discrepancy", num(x.abs_discrepancy)},
              {"full_max_re_eig", num(x.full_max_re_eig)},
              {"min_uncertainty_eigenvalue", num(x.min_uncertainty_eigenvalue)},
              {"ok", x.ok}};
    if (!x.ok) e["error"] = x.error;
    r.push_back(std::move(e));
  }
  j["rows"] = std::move(r);
  return j;
}

inline json oracle_json(const OracleResult& r) {
  json j;
  j["kind"] = "oracle";
  j["config"] = {{"G", num(r.config.G)},
                 {"omega_over_G", num(r.config.omega_over_G)},
                 {"gamma_over_G", num(r.config.gamma_over_G)},
                 {"phi", num(r.config.phi)},
                 {"squeeze_db", num(r.config.squeeze_db)},
                 {"n_bar", num(r.config.n_bar)},
                 {"dims", r.config.dims},
                 {"t_max_G", num(r.config.t_max_G)},
                 {"samples", r.config.samples},
                 {"dt", num(r.config.dt)}};
  j["times_G"] = vector(r.times);
  j["discrepancy"] = vector(r.discrepancy);
  j["max_discrepancy"] = num(r.max_discrepancy);
  j["min_uncertainty_eigenvalue"] = num(r.min_uncertainty_eigenvalue);
  j["min_rho_eigenvalue"] = num(r.min_rho_eigenvalue);
  j["max_hermiticity"] = num(r.max_hermiticity);
  j["max_trace_error"] = num(r.max_trace_error);
  j["max_renorm_rate"] = num(r.max_renorm_rate);
  j["max_tail"] = vector(r.max_tail);
  j["truncation_valid"] = r.truncation_valid;
  return j;
}

// ---------------------------------------------------------------------------
// Models

inline json model_to_json(const QuadraticModel& m) {
  json j;
  j["kind"] = "model";
  j["mode_labels"] = m.mode_labels;
  j["H_matrix"] = matrix(m.hamiltonian);
  json jumps = json::array();
  for (const auto& k : m.jumps)
    jumps.push_back({{"coeff_re", vector(Eigen::VectorXd(k.coeff.real()))},
                     {"coeff_im", vector(Eigen::VectorXd(k.coeff.imag()))},
                     {"rate", num(k.rate)}});
  j["jumps"] = std::move(jumps);
  j["drift"] = matrix(m.drift);
  j["diffusion"] = matrix(m.diffusion);
  return j;
}

/// Rebuilds a model from labels, H_matrix and jumps; drift/diffusion are regenerated.
inline QuadraticModel model_from_json(const json& j) {
  try {
    const auto labels = j.at("mode_labels").get<std::vector<std::string>>();
    const auto n = static_cast<Eigen::Index>(2 * labels.size());
    Eigen::MatrixXd H(n, n);
    const auto& h = j.at("H_matrix");
    if (static_cast<Eigen::Index>(h.size()) != n) throw DomainError("H_matrix", "wrong number of rows");
    for (Eigen::Index r = 0; r < n; ++r) {
      if (static_cast<Eigen::Index>(h[r].size()) != n) throw DomainError("H_matrix", "wrong number of columns");
      for (Eigen::Index c = 0; c < n; ++c) H(r, c) = h[r][c].get<double>();
    }
    std::vector<Jump> jumps;
    for (const auto& k : j.at("jumps")) {
      Jump jp;
      const auto re = k.at("coeff_re").get<std::vector<double>>();
      const auto im = k.at("coeff_im").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(re.size()) != n || im.size() != re.size())
        throw DomainError("jumps", "coefficient vector has wrong length");
      jp.coeff.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) jp.coeff(i) = cplx(re[i], im[i]);
      jp.rate = k.at("rate").get<double>();
      jumps.push_back(std::move(jp));
    }
    return make_model(labels, H, std::move(jumps));
  } catch (const json::exception& e) {
    throw DomainError("model", std::string("malformed model JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV

inline std::vector<std::string> trajectory_header(const std::vector<std::string>& labels) {
  std::vector<std::string> h{"time"};
  std::vector<std::string> q;
  for (const auto& l : labels) {
    q.push_back(l + "_X");
    q.push_back(l + "_P");
  }
  for (const auto& n : q) h.push_back("mean_" + n);
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t k = i; k < q.size(); ++k) h.push_back("cov_" + q[i] + "__" + q[k]);
  return h;
}

inline std::string join(const std::vector<std::string>& v, char sep = ',') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += v[i];
  }
  return s;
}

inline void trajectory_row(std::ostream& os, double t, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  os << fmt(t);
  for (Eigen::Index i = 0; i < mean.size(); ++i) os << ',' << fmt(mean(i));
  for (Eigen::Index i = 0; i < cov.rows(); ++i)
    for (Eigen::Index k = i; k < cov.cols(); ++k) os << ',' << fmt(cov(i, k));
  os << '\n';
}

inline std::string trajectory_csv(const Trajectory& t, const std::vector<std::string>& labels) {
  std::ostringstream os;
  os << join(trajectory_header(labels)) << '\n';
  for (std::size_t i = 0; i < t.times.size(); ++i) trajectory_row(os, t.times[i], t.states[i].mean, t.states[i].cov);
  return os.str();
}

inline std::string trajectory_csv(const FockTrajectory& t, const std::vector<std::string>& labels) {
  std::ostringstream os;
  os << join(trajectory_header(labels)) << '\n';
  for (const auto& s : t.samples) trajectory_row(os, s.t, s.mean, s.cov);
  return os.str();
}

struct ParsedTrajectory {
  std::vector<std::string> mode_labels;
  std::vector<double> times;
  std::vector<GaussianState> states;
};

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline ParsedTrajectory parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DomainError("csv", "empty input");
  const auto header = split(line);
  if (header.empty() || header[0] != "time") throw DomainError("csv", "first column must be 'time'");
  ParsedTrajectory p;
  std::size_t col = 1;
  while (col + 1 < header.size() && header[col].rfind("mean_", 0) == 0) {
    const std::string x = header[col].substr(5), y = header[col + 1].substr(5);
    if (x.size() < 2 || x.substr(x.size() - 2) != "_X" || y != x.substr(0, x.size() - 2) + "_P")
      throw DomainError("csv", "malformed mean columns near '" + header[col] + "'");
    p.mode_labels.push_back(x.substr(0, x.size() - 2));
    col += 2;
  }
  if (header != trajectory_header(p.mode_labels)) throw DomainError("csv", "header does not follow the trajectory schema");
  const auto n = static_cast<Eigen::Index>(2 * p.mode_labels.size());
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != header.size()) throw DomainError("csv", "row " + std::to_string(row) + " has the wrong field count");
    auto val = [&](std::size_t i) {
      char* end = nullptr;
      const double v = std::strtod(f[i].c_str(), &end);
      if (end == f[i].c_str()) throw DomainError("csv", "row " + std::to_string(row) + ": not a number");
      return v;
    };
    p.times.push_back(val(0));
    GaussianState s{Eigen::VectorXd(n), Eigen::MatrixXd(n, n), p.mode_labels};
    std::size_t c = 1;
    for (Eigen::Index i = 0; i < n; ++i) s.mean(i) = val(c++);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = i; k < n; ++k) s.cov(i, k) = s.cov(k, i) = val(c++);
    p.states.push_back(std::move(s));
  }
  return p;
}

inline std::string wigner_csv(const WignerGrid& w) {
  std::ostringstream os;
  os << "x,p,W\n";
  for (int i = 0; i < w.grid.nx; ++i)
    for (int j = 0; j < w.grid.np; ++j)
      os << fmt(w.grid.x(i)) << ',' << fmt(w.grid.p(j)) << ',' << fmt(w.values(i, j)) << '\n';
  return os.str();
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "gamma_over_G,squeeze_db,max_transferred_db,t_at_max_G,max_transferred_raw_db,swap_fidelity_at_half_pi\n";
  for (const auto& r : rows)
    os << fmt(r.gamma_over_G) << ',' << fmt(r.squeeze_db) << ',' << fmt(r.max_transferred_db) << ','
       << fmt(r.t_at_max) << ',' << fmt(r.max_transferred_raw_db) << ',' << fmt(r.swap_fidelity_at_half_pi) << '\n';
  return os.str();
}

inline std::string transfer_csv(const TransferResult& r) {
  std::ostringstream os;
  os << "time_G,membrane_squeezing_db,membrane_squeezing_raw_db,atom_squeezing_db\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    os << fmt(r.times[i]) << ',' << fmt(r.membrane_squeezing_db[i]) << ',' << fmt(r.membrane_squeezing_raw_db[i])
       << ',' << fmt(r.atom_squeezing_db[i]) << '\n';
  return os.str();
}

inline std::string adiabatic_csv(const std::vector<AdiabaticRow>& rows) {
  std::ostringstream os;
  os << "ratio,G,discrepancy,abs_discrepancy,ok\n";
  for (const auto& r : rows)
    os << fmt(r.ratio) << ',' << fmt(r.G) << ',' << fmt(r.discrepancy) << ',' << fmt(r.abs_discrepancy) << ','
       << (r.ok ? 1 : 0) << '\n';
  return os.str();
}

/// Writes `text` to `path`, or to `fallback` when path is empty or "-".
inline void emit(const std::string& text, const std::string& path, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace qspring::io
