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
 * @file scenarios.hpp
 * @brief End-to-end runs: the example parameter ledger, the squeezed-state
 * swap and its loss sweep, the adiabatic-elimination check and the
 * Gaussian-vs-Fock oracle comparison.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "qspring/constants.hpp"
#include "qspring/error.hpp"
#include "qspring/fock.hpp"
#include "qspring/gaussian.hpp"
#include "qspring/model.hpp"
#include "qspring/physics.hpp"

namespace qspring {

// ---------------------------------------------------------------------------
// Parameter ledger

/// A computed quantity next to the value printed for the example, if any.
struct Annotation {
  std::string name;
  double value = 0;
  std::optional<double> reference;
  std::string unit;
  std::string note;
};

struct LedgerOptions {
  int site_index = 0;      // 0: best-quality well over every envelope node inside the cavity
  bool resonant = false;   // re-solve alpha so that omega_at = omega_m
  DeriveOptions derive;
  Thresholds thresholds;
};

struct LedgerResult {
  SystemParams params;
  CavityWaves waves;
  LatticeSite site;
  MembranePosition membrane;
  DerivedRates rates;
  ConditionReport report;
  double mass_ratio = 0;
  double thermal_lhs = 0;
  double balance_lhs = 0;
  double effective_max_re_eig = 0;  // of the effective model built from these rates, rad/s
  std::vector<Annotation> annotations;
};

inline LatticeSite best_lattice_site(const CavityWaves& w, double length_m) {
  const int n_max = std::max(1, static_cast<int>(std::floor(w.delta_k * length_m / constants::pi + 1e-9)));
  std::optional<LatticeSite> best;
  for (int n = 1; n <= n_max; ++n) {
    const auto wells = lattice_wells(w.k, w.delta_k, n);
    for (const auto& s : wells)
      if (s.x_at_m > 0 && s.x_at_m < length_m &&
          (!best || lattice::site_quality(s) > lattice::site_quality(*best)))
        best = s;
  }
  if (!best) throw DomainError("site_index", "no trapping well inside the cavity");
  return *best;
}

inline EffectiveRates effective_rates(const DerivedRates& d, double omega_m) {
  return {d.G_rad_s, d.omega_at_rad_s, omega_m, d.gamma_c_plus, d.gamma_c_minus, d.phi,
          d.gamma_at, d.gamma_m_natural, d.n_bar};
}

inline FullModelParams full_model_params(const SystemParams& p, const DerivedRates& d) {
  return {d.omega_at_rad_s, p.membrane.omega_m_rad_s, p.cavity.detuning_rad_s, d.kappa_rad_s,
          d.g_atc_rad_s,    d.g_mc_rad_s,             d.gamma_at,              d.gamma_m_natural,
          d.n_bar};
}

inline LedgerResult run_ledger(const SystemParams& params, const LedgerOptions& opt = {}) {
  validate(params);
  LedgerResult out;
  out.params = params;
  out.waves = cavity_waves(params);
  out.site = opt.site_index > 0 ? solve_lattice_site(out.waves.k, out.waves.delta_k, opt.site_index)
                                : best_lattice_site(out.waves, params.cavity.length_m);
  detail::require(out.site.x_at_m > 0 && out.site.x_at_m < params.cavity.length_m, "site_index",
                  "well lies outside the cavity");
  out.membrane = choose_membrane_position(params.membrane.reflectivity, out.waves.k1, out.waves.k2,
                                          membrane_search_window(out.waves.k1, out.waves.k2));
  if (opt.resonant) {
    out.params.drive.circulating_power_W.reset();
    out.params.drive.alpha = resonant_alpha(params, out.site);
  }
  out.rates = derive_rates(out.params, out.site, out.membrane.x_m, opt.derive);
  out.report = check_conditions(out.params, out.rates, opt.thresholds);
  out.mass_ratio = params.atom.mass_kg / params.membrane.mass_kg;
  out.thermal_lhs = thermal_lhs(out.params, out.rates.omega_1_rad_s);
  out.balance_lhs = balance_lhs(out.params, out.rates.cooperativity);
  out.effective_max_re_eig =
      max_real_eigenvalue(build_effective_model(effective_rates(out.rates, params.membrane.omega_m_rad_s)).drift);

  const auto& d = out.rates;
  const auto& p = out.params;
  auto add = [&](std::string name, double v, std::optional<double> reference, std::string unit, std::string note = {}) {
    out.annotations.push_back({std::move(name), v, reference, std::move(unit), std::move(note)});
  };
  const double G = std::abs(d.G_rad_s);
  add("delta_over_kappa", p.cavity.detuning_rad_s / d.kappa_rad_s, 18.0, "1");
  add("cooperativity", d.cooperativity, 140.0, "1");
  add("cooperativity_geometric", d.cooperativity_geometric, 140.0, "1", "3 lambda1^2 F / (pi^3 w0^2)");
  add("kappa_over_2pi", rad_s_to_hz(d.kappa_rad_s), std::nullopt, "Hz");
  add("mass_ratio", out.mass_ratio, 6e-13, "1");
  add("thermal_lhs", out.thermal_lhs, 45.0, "1");
  add("P_c", d.P_c_W, 850e-6, "W");
  add("P_c_resonant", d.P_c_resonant_W, std::nullopt, "W", "power that tunes omega_at onto omega_m");
  add("delta_T", d.delta_T_K, 2.5, "K", "reference value is an upper bound");
  add("G_over_2pi", rad_s_to_hz(G), 45e3, "Hz",
      "printed parameters do not fix the lattice geometry; see theta, xi, curvature");
  add("G_gap_factor", G / hz_to_rad_s(45e3), 1.0, "1", "computed G over the printed value");
  for (auto [n, r] : {std::pair{"gamma_c_plus_over_G", d.gamma_c_plus}, {"gamma_c_minus_over_G", d.gamma_c_minus},
                      {"gamma_at_over_G", d.gamma_at}, {"Gamma_m_over_G", d.Gamma_m}})
    add(n, G > 0 ? r / G : INFINITY, 0.1, "1");
  add("omega_at_over_omega_m", d.omega_at_rad_s / p.membrane.omega_m_rad_s, 1.0, "1");
  add("theta", out.site.theta, 1.0, "1", "geometry factor");
  add("xi", out.site.xi, 1.0, "1", "geometry factor");
  add("curvature_over_k1sq", out.site.curvature / (out.waves.k1 * out.waves.k1), std::nullopt, "1",
      "trap curvature; 2 would be a bare sin^2 lattice");
  add("eta", d.eta, std::nullopt, "1", "Lamb-Dicke parameter");
  add("f1", d.f1, 2.0 * p.membrane.reflectivity, "1");
  add("f2", d.f2, 2.0 * p.membrane.reflectivity, "1");
  add("mode_offset_q", out.waves.q, std::nullopt, "1");
  add("delta_over_gamma", std::abs(p.atom.delta_rad_s) / p.atom.gamma_rad_s, 450.0, "1");
  add("balance_lhs", out.balance_lhs, 1.0, "1", "should be of order one");
  add("thermal_link_scaling", thermal_link_scaling(p.membrane.thickness_m, 200e-9, p.membrane.side_m, 5e-3, 2.5e-3,
                                                   p.cavity.waist_m),
      0.1, "1");
  add("effective_max_re_eig", out.effective_max_re_eig, std::nullopt, "rad/s",
      out.effective_max_re_eig < 0 ? "effective model stable" : "effective model unstable");
  return out;
}

inline LedgerResult run_example_ledger() { return run_ledger(paper_preset()); }

// ---------------------------------------------------------------------------
// Squeezed-state swap

enum class MembraneLoss {
  gamma_m_nbar,   // gamma_m n_bar = Gamma with n_bar the bath occupation
  channel_total,  // gamma_m (2 n_bar + 1) = Gamma
};

struct TransferConfig {
  double G = 1.0;
  double omega_over_G = 50.0;
  double gamma_over_G = 0.0;   // common rate for Gamma_c+-, Gamma_at and Gamma_m
  double phi = constants::pi / 4;
  double squeeze_db = 9.0;     // initial atom, X squeezed
  double n_bar = 5.0;          // initial membrane occupation
  std::optional<double> bath_n_bar;  // unset: bath in equilibrium with the initial membrane state
  MembraneLoss membrane_loss = MembraneLoss::gamma_m_nbar;
  double t_max_G = constants::pi;    // G t window, >= pi
  int samples = 401;
};

struct TransferResult {
  TransferConfig config;
  std::vector<double> times;          // G t
  std::vector<double> membrane_squeezing_db;      // rotation optimised
  std::vector<double> membrane_squeezing_raw_db;  // input squeezing axis, no rotation
  std::vector<double> atom_squeezing_db;
  bool rotation_optimized = true;
  double max_transferred_db = 0;
  double t_at_max = 0;
  double max_transferred_raw_db = 0;
  double swap_fidelity_at_half_pi = 0;       // best over a final passive rotation
  double swap_fidelity_raw_at_half_pi = 0;
  double swap_rotation_at_half_pi = 0;       // rad
  double min_uncertainty_eigenvalue = 0;
  double det_drift = 0;                      // max |det sigma(t) / det sigma(0) - 1|
  double dt = 0;
  EffectiveRates rates;
  Trajectory trajectory;
};

inline EffectiveRates transfer_rates(const TransferConfig& c) {
  detail::require_positive(c.G, "G");
  detail::require(c.gamma_over_G >= 0, "gamma_over_G", "must be non-negative");
  const double w = c.omega_over_G * c.G, gam = c.gamma_over_G * c.G;
  const double nb = c.bath_n_bar.value_or(c.n_bar);
  detail::require(nb >= 0, "bath_n_bar", "must be non-negative");
  double gamma_m = 0;
  if (c.membrane_loss == MembraneLoss::gamma_m_nbar)
    gamma_m = nb > 0 ? gam / nb : gam;
  else
    gamma_m = gam / (2.0 * nb + 1.0);
  return {c.G, w, w, gam, gam, c.phi, gam, gamma_m, nb};
}

inline GaussianState transfer_initial_state(const TransferConfig& c) {
  return state::product({state::squeezed(c.squeeze_db, 0.0, labels::atom), state::thermal(c.n_bar, labels::membrane)});
}

/// max over a final rotation of F(rotate(target, angle), reference)
inline std::pair<double, double> best_rotation_fidelity(const GaussianState& target, int mode,
                                                        const GaussianState& reference, int ref_mode) {
  auto f = [&](double a) { return -fidelity(rotate(target, mode, a), reference, mode, ref_mode); };
  double best_a = 0, best = f(0.0);
  const int n = 180;
  for (int i = 1; i < n; ++i) {
    const double a = constants::pi * i / n;
    const double v = f(a);
    if (v < best) {
      best = v;
      best_a = a;
    }
  }
  const double h = constants::pi / n;
  auto [a, v] = boost::math::tools::brent_find_minima(f, best_a - h, best_a + h, 50);
  if (v > best) {
    a = best_a;
    v = best;
  }
  return {-v, std::remainder(a, constants::pi)};
}

inline TransferResult transfer_experiment(const TransferConfig& c, const EvolveOptions& eo = {}) {
  detail::require(c.t_max_G >= constants::pi - 1e-12, "t_max", "window must cover G t in [0, pi]");
  detail::require(c.samples >= 3, "samples", "need at least three samples");
  TransferResult r;
  r.config = c;
  r.rates = transfer_rates(c);
  const auto model = build_effective_model(r.rates);
  const auto init = transfer_initial_state(c);
  r.trajectory = evolve(model, init, c.t_max_G / c.G, c.samples, eo);
  r.dt = r.trajectory.dt;
  r.min_uncertainty_eigenvalue = r.trajectory.min_uncertainty_eigenvalue;
  const double det0 = init.cov.determinant();
  r.max_transferred_db = -INFINITY;
  r.max_transferred_raw_db = -INFINITY;
  for (std::size_t i = 0; i < r.trajectory.states.size(); ++i) {
    const auto& s = r.trajectory.states[i];
    const double gt = r.trajectory.times[i] * c.G;
    r.times.push_back(gt);
    r.membrane_squeezing_db.push_back(squeezing_db(s, 1));
    r.membrane_squeezing_raw_db.push_back(quadrature_squeezing_db(s, 1, 0.0));
    r.atom_squeezing_db.push_back(squeezing_db(s, 0));
    if (r.membrane_squeezing_db.back() > r.max_transferred_db) {
      r.max_transferred_db = r.membrane_squeezing_db.back();
      r.t_at_max = gt;
    }
    r.max_transferred_raw_db = std::max(r.max_transferred_raw_db, r.membrane_squeezing_raw_db.back());
    r.det_drift = std::max(r.det_drift, std::abs(s.cov.determinant() / det0 - 1.0));
  }

  // state at G t = pi / 2, from the grid when it lands there exactly
  GaussianState half;
  const double t_half = constants::pi / 2 / c.G;
  const double spacing = c.t_max_G / (c.samples - 1);
  const double idx = (constants::pi / 2) / spacing;
  if (std::abs(idx - std::round(idx)) < 1e-9) {
    half = r.trajectory.states[static_cast<std::size_t>(std::lround(idx))];
  } else {
    half = evolve(model, init, t_half, 2, eo).states.back();
  }
  r.swap_fidelity_raw_at_half_pi = fidelity(half, init, 1, 0);
  std::tie(r.swap_fidelity_at_half_pi, r.swap_rotation_at_half_pi) = best_rotation_fidelity(half, 1, init, 0);
  return r;
}

/// Wigner panels: atom and membrane at t = 0 and at G t = pi / 2.
struct SwapPanels {
  GaussianState initial;
  GaussianState exchanged;
  WignerGrid atom_initial, membrane_initial, atom_exchanged, membrane_exchanged;
};

inline SwapPanels swap_panels(const TransferConfig& c, const PhaseGrid& grid, const EvolveOptions& eo = {}) {
  SwapPanels out;
  out.initial = transfer_initial_state(c);
  const auto model = build_effective_model(transfer_rates(c));
  out.exchanged = evolve(model, out.initial, constants::pi / 2 / c.G, 2, eo).states.back();
  out.atom_initial = wigner(out.initial, 0, grid);
  out.membrane_initial = wigner(out.initial, 1, grid);
  out.atom_exchanged = wigner(out.exchanged, 0, grid);
  out.membrane_exchanged = wigner(out.exchanged, 1, grid);
  return out;
}

// ---------------------------------------------------------------------------
// Loss sweep

struct SweepRow {
  double gamma_over_G = 0;
  double squeeze_db = 0;
  double max_transferred_db = 0;
  double t_at_max = 0;
  double max_transferred_raw_db = 0;
  double swap_fidelity_at_half_pi = 0;
  double min_uncertainty_eigenvalue = 0;
};

inline std::vector<double> default_sweep_gammas() {
  std::vector<double> g;
  for (int i = 0; i < 26; ++i) g.push_back(0.5 * i / 25.0);
  return g;
}

/// Thread count for sweeps: QSPRING_THREADS if set, else hardware concurrency.
inline unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QSPRING_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  return n;
}

/// Rows are ordered (squeeze_db major, gamma minor) regardless of scheduling.
inline std::vector<SweepRow> transfer_sweep(const std::vector<double>& gamma_over_G,
                                            const std::vector<double>& squeeze_db,
                                            const TransferConfig& base = {}, unsigned threads = 0,
                                            const EvolveOptions& eo = {}) {
  for (double g : gamma_over_G) detail::require(g >= 0, "gamma_over_G", "must be non-negative");
  const std::size_t n = gamma_over_G.size() * squeeze_db.size();
  std::vector<SweepRow> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        TransferConfig c = base;
        c.squeeze_db = squeeze_db[i / gamma_over_G.size()];
        c.gamma_over_G = gamma_over_G[i % gamma_over_G.size()];
        const auto r = transfer_experiment(c, eo);
        rows[i] = {c.gamma_over_G,          c.squeeze_db, r.max_transferred_db, r.t_at_max, r.max_transferred_raw_db,
                   r.swap_fidelity_at_half_pi, r.min_uncertainty_eigenvalue};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = sweep_threads();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, n)));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

// ---------------------------------------------------------------------------
// Adiabatic elimination

struct AdiabaticConfig {
  double delta = 1.0;              // Delta; g_atc = g_mc = coupling_scale * Delta / ratio
  double coupling_scale = 1.0;     // 0 switches the couplings off (window still set by the nominal G)
  double kappa_over_delta = 0.05;
  double omega_over_delta = 0.01;  // omega_at = omega_m
  double squeeze_db = 3.0;
  double n_bar = 1.0;              // initial membrane occupation
  double gamma_at = 0.0;
  double gamma_m = 0.0;
  double bath_n_bar = 0.0;
  double window_G = constants::pi / 2;  // one swap: G t in [0, pi / 2]
  int samples = 101;
};

struct AdiabaticRow {
  double ratio = 0;           // Delta / g
  double G = 0;
  double discrepancy = 0;     // max_t max|sigma_full - sigma_eff| / max_t max|sigma_eff|
  double abs_discrepancy = 0;
  double full_max_re_eig = 0;
  double min_uncertainty_eigenvalue = 0;
  bool ok = true;
  std::string error;
};

inline AdiabaticRow adiabatic_row(double ratio, const AdiabaticConfig& c) {
  AdiabaticRow row;
  row.ratio = ratio;
  try {
    detail::require(ratio >= 10, "ratio", "Delta / g must be at least 10");
    detail::require_positive(c.delta, "delta");
    const double Delta = c.delta, g_nominal = Delta / ratio, g = c.coupling_scale * g_nominal;
    const double w = c.omega_over_delta * Delta, kappa = c.kappa_over_delta * Delta;
    FullModelParams fp{w, w, Delta, kappa, g, g, c.gamma_at, c.gamma_m, c.bath_n_bar};
    const auto full = build_full_model(fp);
    row.full_max_re_eig = max_real_eigenvalue(full.drift);
    const double G = effective_coupling_G(g, g, Delta, w, kappa);
    const auto dec = cavity_decoherence(g, g, Delta, w, kappa);
    row.G = G;
    const auto eff = build_effective_model(
        {mediated_coupling_sign * G, w, w, dec.gamma_c_plus, dec.gamma_c_minus, dec.phi, c.gamma_at, c.gamma_m,
         c.bath_n_bar});

    const auto am = state::product({state::squeezed(c.squeeze_db, 0.0, labels::atom),
                                    state::thermal(c.n_bar, labels::membrane)});
    const auto init_full = state::product({am, state::vacuum(labels::cav1), state::vacuum(labels::cav2)});
    const double G_nominal = std::abs(effective_coupling_G(g_nominal, g_nominal, Delta, w, kappa));
    const double t_final = c.window_G / G_nominal;
    const auto tf = evolve(full, init_full, t_final, c.samples);
    EvolveOptions fixed;
    fixed.initial_dt = tf.dt;
    fixed.fixed_step = true;
    const auto te = evolve(eff, am, t_final, c.samples, fixed);
    double worst = 0, ref = 0;
    row.min_uncertainty_eigenvalue = std::min(tf.min_uncertainty_eigenvalue, te.min_uncertainty_eigenvalue);
    for (int i = 0; i < c.samples; ++i) {
      const Eigen::MatrixXd red = tf.states[i].cov.topLeftCorner(4, 4);
      worst = std::max(worst, (red - te.states[i].cov).cwiseAbs().maxCoeff());
      ref = std::max(ref, te.states[i].cov.cwiseAbs().maxCoeff());
    }
    row.abs_discrepancy = worst;
    row.discrepancy = worst / ref;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

inline std::vector<AdiabaticRow> adiabatic_check(const std::vector<double>& ratios, const AdiabaticConfig& c = {}) {
  std::vector<AdiabaticRow> rows;
  for (double r : ratios) rows.push_back(adiabatic_row(r, c));
  return rows;
}

// ---------------------------------------------------------------------------
// Gaussian engine versus truncated Fock space

struct OracleConfig {
  double G = 1.0;
  double omega_over_G = 20.0;
  double gamma_over_G = 0.1;
  double phi = constants::pi / 4;
  double squeeze_db = 3.0;
  double n_bar = 1.0;
  std::vector<int> dims{12, 16};
  double t_max_G = constants::pi;
  int samples = 41;
  double dt = 1e-3;  // Fock RK4 step in units of 1/G
};

struct OracleResult {
  OracleConfig config;
  std::vector<double> times;  // G t
  std::vector<double> discrepancy;  // max-abs over mean and covariance, per sample
  double max_discrepancy = 0;
  double min_uncertainty_eigenvalue = 0;
  double min_rho_eigenvalue = 0;
  double max_hermiticity = 0;
  double max_trace_error = 0;
  double max_renorm_rate = 0;
  std::vector<double> max_tail;  // per mode, over the trajectory
  bool truncation_valid = true;
  double fock_seconds = 0;
  Trajectory gaussian;
  FockTrajectory fock;
};

/// Both engines start from the same truncated state: the Gaussian moments are
/// read back from the Fock density matrix.
inline OracleResult oracle_equivalence(const OracleConfig& c) {
  OracleResult r;
  r.config = c;
  TransferConfig tc;
  tc.G = c.G;
  tc.omega_over_G = c.omega_over_G;
  tc.gamma_over_G = c.gamma_over_G;
  tc.phi = c.phi;
  tc.squeeze_db = c.squeeze_db;
  tc.n_bar = c.n_bar;
  const auto model = build_effective_model(transfer_rates(tc));
  const auto g0 = transfer_initial_state(tc);
  const auto rho0 = from_gaussian(g0, c.dims);
  const auto [mu0, cov0] = covariance_of(rho0);
  const GaussianState seeded{mu0, cov0, g0.mode_labels};

  const double t_final = c.t_max_G / c.G;
  FockEvolveOptions fo;
  fo.dt = c.dt / c.G;
  const auto t0 = std::chrono::steady_clock::now();
  r.fock = evolve_rho(model, rho0, t_final, c.samples, fo);
  r.fock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.gaussian = evolve(model, seeded, t_final, c.samples);

  r.min_uncertainty_eigenvalue = r.gaussian.min_uncertainty_eigenvalue;
  r.min_rho_eigenvalue = INFINITY;
  r.max_tail.assign(c.dims.size(), 0.0);
  r.truncation_valid = r.fock.truncation_valid;
  r.max_renorm_rate = r.fock.max_renorm_rate;
  for (int i = 0; i < c.samples; ++i) {
    const auto& fs = r.fock.samples[i];
    const auto& gs = r.gaussian.states[i];
    const double d = std::max((fs.cov - gs.cov).cwiseAbs().maxCoeff(), (fs.mean - gs.mean).cwiseAbs().maxCoeff());
    r.times.push_back(fs.t * c.G);
    r.discrepancy.push_back(d);
    r.max_discrepancy = std::max(r.max_discrepancy, d);
    r.min_rho_eigenvalue = std::min(r.min_rho_eigenvalue, fs.min_eigenvalue);
    r.max_hermiticity = std::max(r.max_hermiticity, fs.hermiticity);
    r.max_trace_error = std::max(r.max_trace_error, fs.trace_error);
    for (std::size_t m = 0; m < fs.tail.size(); ++m) r.max_tail[m] = std::max(r.max_tail[m], fs.tail[m]);
  }
  return r;
}

}  // namespace qspring
