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
 * @file physics.hpp
 * @brief Raw SI parameters of the atom / two-mode cavity / membrane setup,
 *        lattice and membrane geometry, and every derived rate.
 *
 * All frequencies are angular (rad/s) inside this header. Conversion from
 * cyclic Hz happens only at the configuration boundary (see io.hpp).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "qspring/constants.hpp"
#include "qspring/error.hpp"

namespace qspring {

struct AtomParams {
  double mass_kg = 0;
  double gamma_rad_s = 0;        // excited-state amplitude decay (half width)
  double lambda1_m = 0;          // drive 1 wavelength
  double lambda2_m = 0;          // drive 2 wavelength (nominal, see cavity_waves)
  double delta_rad_s = 0;        // detuning from atomic resonance, < 0
  double vacuum_rabi_rad_s = 0;  // Omega_0
};

struct CavityParams {
  double length_m = 0;
  double finesse = 0;
  double waist_m = 0;
  double detuning_rad_s = 0;  // |Delta| of the two symmetric laser detunings
  int mode_index_offset = 0;  // q with delta_k = q pi / L; 0 picks q from lambda2
};

struct MembraneParams {
  double mass_kg = 0;
  double omega_m_rad_s = 0;
  double quality = 0;
  double reflectivity = 0;  // amplitude reflectivity r
  /// Bath temperature. Unset means the absorption-heating floor T = Delta T.
  std::optional<double> temperature_K;
  double kappa_th_hz = 0;  // thermal link, plain rate: k_B * kappa_th is in W/K
  double side_m = 0;
  double thickness_m = 0;
};

/// Exactly one of the two must be set.
struct DriveParams {
  std::optional<double> circulating_power_W;
  std::optional<double> alpha;  // per-mode intracavity amplitude
};

struct SystemParams {
  AtomParams atom;
  CavityParams cavity;
  MembraneParams membrane;
  DriveParams drive;
};

inline void validate(const SystemParams& p) {
  using detail::require;
  using detail::require_positive;
  require_positive(p.atom.mass_kg, "atom.mass_kg");
  require_positive(p.atom.gamma_rad_s, "atom.gamma");
  require_positive(p.atom.lambda1_m, "atom.lambda1_m");
  require_positive(p.atom.lambda2_m, "atom.lambda2_m");
  require_positive(p.atom.vacuum_rabi_rad_s, "atom.vacuum_rabi");
  require(p.atom.delta_rad_s < 0.0, "atom.delta",
          "atomic detuning must be negative (red detuned lattice)");
  require_positive(p.cavity.length_m, "cavity.length_m");
  require_positive(p.cavity.finesse, "cavity.finesse");
  require_positive(p.cavity.waist_m, "cavity.waist_m");
  require_positive(p.cavity.detuning_rad_s, "cavity.detuning");
  require(p.cavity.mode_index_offset >= 0, "cavity.mode_index_offset", "must be >= 0");
  require_positive(p.membrane.mass_kg, "membrane.mass_kg");
  require_positive(p.membrane.omega_m_rad_s, "membrane.omega_m");
  require_positive(p.membrane.quality, "membrane.quality");
  require(p.membrane.reflectivity > 0.0 && p.membrane.reflectivity < 1.0,
          "membrane.reflectivity", "amplitude reflectivity must lie in (0, 1)");
  if (p.membrane.temperature_K)
    require(*p.membrane.temperature_K >= 0.0, "membrane.temperature_K", "must be >= 0");
  require_positive(p.membrane.kappa_th_hz, "membrane.kappa_th_hz");
  require_positive(p.membrane.side_m, "membrane.side_m");
  require_positive(p.membrane.thickness_m, "membrane.thickness_m");
  const bool has_power = p.drive.circulating_power_W.has_value();
  const bool has_alpha = p.drive.alpha.has_value();
  require(has_power != has_alpha, "drive",
          "exactly one of circulating_power_W / alpha must be set");
  if (has_power) require_positive(*p.drive.circulating_power_W, "drive.circulating_power_W");
  if (has_alpha) require_positive(*p.drive.alpha, "drive.alpha");
}

// ---------------------------------------------------------------------------
// Cavity

/// kappa = pi c / (2 F L), C = Omega_0^2 / (kappa gamma).
inline std::pair<double, double> kappa_and_cooperativity(double finesse, double length_m,
                                                         double vacuum_rabi_rad_s,
                                                         double gamma_rad_s) {
  detail::require_positive(finesse, "cavity.finesse");
  detail::require_positive(length_m, "cavity.length_m");
  detail::require_positive(vacuum_rabi_rad_s, "atom.vacuum_rabi");
  detail::require_positive(gamma_rad_s, "atom.gamma");
  const double kappa = constants::pi * constants::c / (2.0 * finesse * length_m);
  return {kappa, vacuum_rabi_rad_s * vacuum_rabi_rad_s / (kappa * gamma_rad_s)};
}

inline std::pair<double, double> kappa_and_cooperativity(const SystemParams& p) {
  return kappa_and_cooperativity(p.cavity.finesse, p.cavity.length_m, p.atom.vacuum_rabi_rad_s,
                                 p.atom.gamma_rad_s);
}

/// Mode-matched single-atom cooperativity 3 lambda^2 F / (pi^3 w0^2).
inline double geometric_cooperativity(double lambda_m, double finesse, double waist_m) {
  return 3.0 * lambda_m * lambda_m * finesse /
         (constants::pi * constants::pi * constants::pi * waist_m * waist_m);
}

/// Wave numbers of the two driven modes. Both must be resonances of the
/// same cavity, so k2 = k1 - q pi / L.
struct CavityWaves {
  double k1 = 0, k2 = 0;
  double k = 0;        // k1 + k2
  double delta_k = 0;  // k1 - k2
  int q = 0;
};

inline CavityWaves cavity_waves(const SystemParams& p) {
  const double L = p.cavity.length_m;
  CavityWaves w;
  w.k1 = constants::two_pi / p.atom.lambda1_m;
  w.q = p.cavity.mode_index_offset;
  if (w.q == 0) {
    const double k2_nominal = constants::two_pi / p.atom.lambda2_m;
    w.q = static_cast<int>(std::lround((w.k1 - k2_nominal) * L / constants::pi));
  }
  if (w.q < 1)
    throw DomainError("cavity.mode_index_offset",
                      "lambda2 must be longer than lambda1 by at least one free spectral range");
  w.delta_k = w.q * constants::pi / L;
  w.k2 = w.k1 - w.delta_k;
  if (!(w.k2 > 0)) throw DomainError("cavity.mode_index_offset", "mode offset exceeds k1");
  w.k = w.k1 + w.k2;
  return w;
}

// ---------------------------------------------------------------------------
// Atom lattice: u(x) = sin^2(k1 x) + sin^2(k2 x) = 1 - cos(k x) cos(dk x)

struct LatticeSite {
  double x_at_m = 0;
  double theta = 0;      // |u1'(x)| / k1
  double xi = 0;         // k1^2 u(x) / u1'(x)^2
  double curvature = 0;  // -u''(x) in 1/m^2; > 0 at an intensity maximum
  int site_index = 0;
};

namespace lattice {

inline double u(double k, double dk, double x) { return 1.0 - std::cos(k * x) * std::cos(dk * x); }

inline double du(double k, double dk, double x) {
  return k * std::sin(k * x) * std::cos(dk * x) + dk * std::cos(k * x) * std::sin(dk * x);
}

inline double d2u(double k, double dk, double x) {
  return (k * k + dk * dk) * std::cos(k * x) * std::cos(dk * x) -
         2.0 * k * dk * std::sin(k * x) * std::sin(dk * x);
}

/// Residual of the extremum condition k tan(kx) + dk tan(dk x).
inline double extremum_residual(double k, double dk, double x) {
  return k * std::tan(k * x) + dk * std::tan(dk * x);
}

inline LatticeSite make_site(double k, double dk, double x, int site_index) {
  const double k1 = 0.5 * (k + dk);
  LatticeSite s;
  s.x_at_m = x;
  s.theta = std::abs(std::sin(2.0 * k1 * x));
  s.xi = s.theta > 0 ? u(k, dk, x) / (s.theta * s.theta) : INFINITY;
  s.curvature = -d2u(k, dk, x);
  s.site_index = site_index;
  return s;
}

/// Geometric figure of merit: both theta and 1/xi should approach one.
inline double site_quality(const LatticeSite& s) { return std::min(s.theta, 1.0 / s.xi); }

}  // namespace lattice

/**
 * Every trapping well (intensity maximum, which traps for red atomic detuning)
 * in the envelope half period dk x in [(n-1) pi, n pi]. That interval is
 * centred on the envelope node dk x = (n - 1/2) pi where the two lattices
 * have nearly maximal and opposite slopes.
 */
inline std::vector<LatticeSite> lattice_wells(double k, double delta_k, int site_index) {
  detail::require_positive(k, "k");
  detail::require_positive(delta_k, "delta_k");
  detail::require(delta_k < k, "delta_k", "must be smaller than k");
  detail::require(site_index >= 1, "site_index", "must be >= 1");

  const double x_lo = (site_index - 1) * constants::pi / delta_k;
  const double x_hi = site_index * constants::pi / delta_k;
  // u' oscillates with period 2 pi / k; sixteen samples per half period
  // bracket every zero.
  const double step = constants::pi / (16.0 * k);
  const auto n_steps = static_cast<long long>(std::ceil((x_hi - x_lo) / step));
  auto f = [&](double x) { return lattice::du(k, delta_k, x); };

  std::vector<LatticeSite> wells;
  double xa = x_lo + 1e-9 * step;
  double fa = f(xa);
  for (long long i = 1; i <= n_steps; ++i) {
    const double xb = std::min(x_lo + i * step, x_hi - 1e-9 * step);
    const double fb = f(xb);
    if ((fa < 0) != (fb < 0)) {
      std::uintmax_t iters = 200;
      auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12 * std::abs(a + b) * 0.5; };
      auto [r0, r1] = boost::math::tools::toms748_solve(f, xa, xb, fa, fb, tol, iters);
      const double x = 0.5 * (r0 + r1);
      if (lattice::d2u(k, delta_k, x) < 0) wells.push_back(lattice::make_site(k, delta_k, x, site_index));
    }
    xa = xb;
    fa = fb;
  }
  return wells;
}

/// Best-quality trapping well of the n-th envelope half period.
inline LatticeSite solve_lattice_site(double k, double delta_k, int site_index) {
  const auto wells = lattice_wells(k, delta_k, site_index);
  if (wells.empty()) throw DomainError("site_index", "no trapping well in the requested envelope period");
  return *std::max_element(wells.begin(), wells.end(), [](const auto& a, const auto& b) {
    return lattice::site_quality(a) < lattice::site_quality(b);
  });
}

// ---------------------------------------------------------------------------
// Membrane in the standing waves

inline double membrane_factor(double r, double k, double x_m) {
  const double c = std::cos(2.0 * k * x_m);
  return 2.0 * r * std::sin(2.0 * k * x_m) / std::sqrt(1.0 - r * r * c * c);
}

inline std::pair<double, double> membrane_geometry(double r, double k1, double k2, double x_m) {
  detail::require(r > 0.0 && r < 1.0, "membrane.reflectivity", "must lie in (0, 1)");
  return {membrane_factor(r, k1, x_m), membrane_factor(r, k2, x_m)};
}

struct MembranePosition {
  double x_m = 0;
  double f1 = 0;
  double f2 = 0;
};

/// Position in [0, window] maximising min(f1, f2): dense scan, then Brent.
inline MembranePosition choose_membrane_position(double r, double k1, double k2, double window_m) {
  detail::require(r > 0.0 && r < 1.0, "membrane.reflectivity", "must lie in (0, 1)");
  detail::require_positive(k1, "k1");
  detail::require_positive(k2, "k2");
  const double period = constants::pi / std::min(k1, k2);
  detail::require(window_m >= period, "search_window", "must span at least one optical period");

  auto objective = [&](double x) {
    const auto [f1, f2] = membrane_geometry(r, k1, k2, x);
    return -std::min(f1, f2);
  };
  const double step = constants::pi / (256.0 * std::max(k1, k2));
  const auto n = static_cast<long long>(std::ceil(window_m / step));
  std::vector<double> v(n + 1);
  for (long long i = 0; i <= n; ++i) v[i] = objective(std::min(i * step, window_m));
  // Each scan-local optimum is polished. The maximum of min(f1, f2) is a
  // smooth peak of f1 or f2, or a crossing f1 = f2.
  auto f1_neg = [&](double x) { return -membrane_factor(r, k1, x); };
  auto f2_neg = [&](double x) { return -membrane_factor(r, k2, x); };
  auto gap = [&](double x) { return membrane_factor(r, k1, x) - membrane_factor(r, k2, x); };
  double x_opt = 0, v_opt = v[0];
  auto consider = [&](double x) {
    const double val = objective(x);
    if (val < v_opt) x_opt = x, v_opt = val;
  };
  for (long long i = 0; i <= n; ++i) {
    if ((i > 0 && v[i] > v[i - 1]) || (i < n && v[i] > v[i + 1])) continue;
    const double xi = std::min(i * step, window_m);
    const double lo = std::max(0.0, xi - step), hi = std::min(window_m, xi + step);
    consider(xi);
    consider(boost::math::tools::brent_find_minima(f1_neg, lo, hi, 50).first);
    consider(boost::math::tools::brent_find_minima(f2_neg, lo, hi, 50).first);
    if (gap(lo) * gap(hi) < 0) {
      boost::uintmax_t it = 100;
      const auto root = boost::math::tools::toms748_solve(gap, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
      consider(0.5 * (root.first + root.second));
    }
  }
  const auto [f1, f2] = membrane_geometry(r, k1, k2, x_opt);
  return {x_opt, f1, f2};
}

/// Default window: one beat period of the two standing waves.
inline double membrane_search_window(double k1, double k2) {
  const double beat = std::abs(k1 - k2);
  return beat > 0 ? constants::pi / beat : constants::pi / k1;
}

// ---------------------------------------------------------------------------
// Mediated coupling and cavity-induced decoherence

inline double effective_coupling_G(double g_atc, double g_mc, double detuning, double omega_m,
                                   double kappa) {
  detail::require_positive(kappa, "kappa");
  const double dp = detuning + omega_m, dm = detuning - omega_m;
  const double gg = 2.0 * g_atc * g_mc;
  return gg * dp / (kappa * kappa + dp * dp) + gg * dm / (kappa * kappa + dm * dm);
}

struct CavityDecoherence {
  double gamma_c_plus = 0;
  double gamma_c_minus = 0;
  double phi = 0;  // tan(phi) = g_atc / g_mc
};

inline CavityDecoherence cavity_decoherence(double g_atc, double g_mc, double detuning,
                                            double omega_m, double kappa) {
  detail::require_positive(kappa, "kappa");
  const double s = 2.0 * kappa * (g_atc * g_atc + g_mc * g_mc);
  const double dp = detuning + omega_m, dm = detuning - omega_m;
  return {s / (kappa * kappa + dp * dp), s / (kappa * kappa + dm * dm),
          std::atan2(std::abs(g_atc), std::abs(g_mc))};
}

// ---------------------------------------------------------------------------
// Derived rates

struct DerivedRates {
  double kappa_rad_s = 0;
  double cooperativity = 0;
  double cooperativity_geometric = 0;
  double U0_rad_s = 0;  // signed, < 0
  double eta = 0;
  double l_at_m = 0;
  double l_m_m = 0;
  double alpha = 0;
  double omega_1_rad_s = 0;
  double omega_at_rad_s = 0;
  double g_atc_rad_s = 0;
  double g_mc_rad_s = 0;
  double f1 = 0, f2 = 0;
  double x_m_m = 0;
  double G_rad_s = 0;
  double gamma_c_plus = 0;
  double gamma_c_minus = 0;
  double phi = 0;
  double gamma_at = 0;
  double gamma_m_natural = 0;
  double temperature_K = 0;
  double n_bar = 0;
  double Gamma_m = 0;
  double P_c_W = 0;
  double P_a_W = 0;
  double delta_T_K = 0;
  /// Circulating power that would put omega_at exactly on omega_m at this site.
  double P_c_resonant_W = 0;
};

struct DeriveOptions {
  /// Exact Bose occupation 1/(exp(hbar w / k T) - 1) instead of k T / hbar w.
  bool bose_occupation = false;
};

/// Per-mode amplitude from the overall circulating power P_c = hbar w1 c alpha^2 / L.
inline double alpha_from_power(double P_c, double omega_1, double length_m) {
  return std::sqrt(P_c * length_m / (constants::hbar * omega_1 * constants::c));
}

inline double power_from_alpha(double alpha, double omega_1, double length_m) {
  return constants::hbar * omega_1 * constants::c * alpha * alpha / length_m;
}

/// Per-mode amplitude for which the trap frequency equals omega_m.
inline double resonant_alpha(const SystemParams& p, const LatticeSite& site) {
  detail::require_positive(site.curvature, "site.curvature");
  const double U0 = std::abs(p.atom.vacuum_rabi_rad_s * p.atom.vacuum_rabi_rad_s / p.atom.delta_rad_s);
  const double w = p.membrane.omega_m_rad_s;
  return std::sqrt(p.atom.mass_kg * w * w / (constants::hbar * U0 * site.curvature));
}

inline DerivedRates derive_rates(const SystemParams& p, const LatticeSite& site, double x_m,
                                 const DeriveOptions& opt = {}) {
  using constants::hbar;
  using constants::k_B;
  validate(p);
  detail::require(site.curvature > 0, "site.curvature",
                  "trap curvature must be positive (imaginary trap frequency otherwise)");
  DerivedRates d;
  const auto waves = cavity_waves(p);
  const double L = p.cavity.length_m;
  std::tie(d.kappa_rad_s, d.cooperativity) = kappa_and_cooperativity(p);
  d.cooperativity_geometric = geometric_cooperativity(p.atom.lambda1_m, p.cavity.finesse, p.cavity.waist_m);
  d.omega_1_rad_s = constants::two_pi * constants::c / p.atom.lambda1_m;

  const double M = p.membrane.mass_kg, m = p.atom.mass_kg, wm = p.membrane.omega_m_rad_s;
  const double Om0 = p.atom.vacuum_rabi_rad_s;
  d.l_m_m = std::sqrt(hbar / (2.0 * M * wm));
  d.U0_rad_s = Om0 * Om0 / p.atom.delta_rad_s;
  const double U0 = std::abs(d.U0_rad_s);

  if (p.drive.alpha) {
    d.alpha = *p.drive.alpha;
    d.P_c_W = power_from_alpha(d.alpha, d.omega_1_rad_s, L);
  } else {
    d.P_c_W = *p.drive.circulating_power_W;
    d.alpha = alpha_from_power(d.P_c_W, d.omega_1_rad_s, L);
  }
  detail::require(d.alpha > 0, "drive.alpha", "intracavity amplitude must be non-zero");

  d.omega_at_rad_s = std::sqrt(hbar * U0 * d.alpha * d.alpha * site.curvature / m);
  d.l_at_m = std::sqrt(hbar / (2.0 * m * d.omega_at_rad_s));
  d.eta = waves.k1 * d.l_at_m;
  d.g_atc_rad_s = U0 * d.alpha * d.eta * site.theta;

  const auto [f1, f2] = membrane_geometry(p.membrane.reflectivity, waves.k1, waves.k2, x_m);
  d.f1 = f1;
  d.f2 = f2;
  d.x_m_m = x_m;
  d.g_mc_rad_s = d.l_m_m / L * d.omega_1_rad_s * std::abs(f1) * d.alpha;

  const double Delta = p.cavity.detuning_rad_s;
  d.G_rad_s = effective_coupling_G(d.g_atc_rad_s, d.g_mc_rad_s, Delta, wm, d.kappa_rad_s);
  const auto dec = cavity_decoherence(d.g_atc_rad_s, d.g_mc_rad_s, Delta, wm, d.kappa_rad_s);
  d.gamma_c_plus = dec.gamma_c_plus;
  d.gamma_c_minus = dec.gamma_c_minus;
  d.phi = dec.phi;

  d.gamma_at = p.atom.gamma_rad_s * d.g_atc_rad_s * d.g_atc_rad_s / (Om0 * Om0) * site.xi;

  d.P_a_W = constants::two_pi / p.cavity.finesse * d.P_c_W;
  d.delta_T_K = d.P_a_W / (k_B * p.membrane.kappa_th_hz);
  d.gamma_m_natural = wm / p.membrane.quality;
  d.temperature_K = p.membrane.temperature_K.value_or(d.delta_T_K);
  if (d.temperature_K == 0.0)
    d.n_bar = 0.0;
  else if (opt.bose_occupation)
    d.n_bar = 1.0 / std::expm1(hbar * wm / (k_B * d.temperature_K));
  else
    d.n_bar = k_B * d.temperature_K / (hbar * wm);
  d.Gamma_m = d.gamma_m_natural * d.n_bar;

  d.P_c_resonant_W = power_from_alpha(resonant_alpha(p, site), d.omega_1_rad_s, L);
  return d;
}

// ---------------------------------------------------------------------------
// Strong-coupling conditions

struct Thresholds {
  double strong = 10.0;
  double marginal = 5.0;
  /// balance is "close to one": passes within this factor of unity
  double balance_strong = 2.0;
  double balance_marginal = 5.0;
};

enum class Level { fail, marginal, strong };

inline const char* to_string(Level l) {
  switch (l) {
    case Level::strong: return "strong";
    case Level::marginal: return "marginal";
    default: return "fail";
  }
}

struct Condition {
  std::string name;
  std::string relation;  // human-readable statement of what is compared
  double ratio = 0;
  double threshold = 0;  // pass when ratio >= threshold (balance: deviation factor <= threshold)
  bool pass = false;
  Level level = Level::fail;
};

struct ConditionReport {
  std::vector<Condition> conditions;
  Thresholds thresholds;
  /// "strong" / "marginal" / "weak" from the four coherent-vs-decoherence ratios.
  std::string regime;

  const Condition& at(const std::string& name) const {
    for (const auto& c : conditions)
      if (c.name == name) return c;
    throw std::out_of_range("no condition named " + name);
  }
};

/// Left-hand side of the balanced-coupling condition g_atc ~ g_mc.
inline double balance_lhs(const SystemParams& p, double cooperativity) {
  return 4.0 * p.membrane.reflectivity / constants::pi * std::abs(p.atom.delta_rad_s) /
         p.atom.gamma_rad_s * p.cavity.finesse / cooperativity *
         std::sqrt(p.atom.mass_kg / p.membrane.mass_kg);
}

/// Left-hand side of the thermal condition, to be compared against Delta / kappa.
inline double thermal_lhs(const SystemParams& p, double omega_1) {
  const double r = p.membrane.reflectivity, F = p.cavity.finesse;
  const double gamma_m = p.membrane.omega_m_rad_s / p.membrane.quality;
  return 8.0 * r * r / (constants::pi * constants::pi) * (p.membrane.kappa_th_hz / gamma_m) *
         (constants::hbar * omega_1 / (p.membrane.mass_kg * constants::c * constants::c)) * F * F;
}

inline ConditionReport check_conditions(const SystemParams& p, const DerivedRates& d,
                                        const Thresholds& th = {}) {
  ConditionReport rep;
  rep.thresholds = th;
  auto add = [&](std::string name, std::string rel, double ratio) {
    Condition c{std::move(name), std::move(rel), ratio, th.marginal, false, Level::fail};
    c.level = ratio >= th.strong ? Level::strong : ratio >= th.marginal ? Level::marginal : Level::fail;
    c.pass = c.level != Level::fail;
    rep.conditions.push_back(std::move(c));
  };
  const double Delta = p.cavity.detuning_rad_s;
  add("delta_over_kappa", "Delta / kappa >> 1", Delta / d.kappa_rad_s);
  add("delta_over_omega_m", "Delta / omega_m >> 1", Delta / p.membrane.omega_m_rad_s);
  {
    const double b = balance_lhs(p, d.cooperativity);
    const double dev = std::max(b, 1.0 / b);
    Condition c{"balance", "(4r/pi)(delta/gamma)(F/C)sqrt(m/M) ~ 1", b, th.balance_marginal, false,
                Level::fail};
    c.level = dev <= th.balance_strong ? Level::strong
              : dev <= th.balance_marginal ? Level::marginal
                                           : Level::fail;
    c.pass = c.level != Level::fail;
    rep.conditions.push_back(std::move(c));
  }
  add("coop_margin", "4 kappa C / Delta >> 1", 4.0 * d.kappa_rad_s * d.cooperativity / Delta);
  add("thermal_margin", "thermal LHS / (Delta / kappa) >> 1",
      thermal_lhs(p, d.omega_1_rad_s) / (Delta / d.kappa_rad_s));
  const double G = std::abs(d.G_rad_s);
  auto ratio = [&](double rate) { return rate > 0 ? G / rate : INFINITY; };
  add("G_over_gamma_c_plus", "G / Gamma_c+ >> 1", ratio(d.gamma_c_plus));
  add("G_over_gamma_c_minus", "G / Gamma_c- >> 1", ratio(d.gamma_c_minus));
  add("G_over_gamma_at", "G / Gamma_at >> 1", ratio(d.gamma_at));
  add("G_over_gamma_m", "G / Gamma_m >> 1", ratio(d.Gamma_m));

  Level worst = Level::strong;
  for (const char* n : {"G_over_gamma_c_plus", "G_over_gamma_c_minus", "G_over_gamma_at", "G_over_gamma_m"})
    worst = std::min(worst, rep.at(n).level);
  rep.regime = worst == Level::strong ? "strong" : worst == Level::marginal ? "marginal" : "weak";
  return rep;
}

// ---------------------------------------------------------------------------

/// Laplace-equation scaling of the membrane thermal link from a reference
/// membrane (d', l', heated area l1') to a new one (d, l, heated by a beam of waist w0).
inline double thermal_link_scaling(double d, double d_ref, double l, double l_ref, double l1_ref,
                                   double w0) {
  for (auto [v, n] : {std::pair{d, "d"}, {d_ref, "d_ref"}, {l, "l"}, {l_ref, "l_ref"},
                      {l1_ref, "l1_ref"}, {w0, "w0"}})
    detail::require_positive(v, n);
  detail::require(l_ref / l1_ref > 1.0, "l1_ref", "logarithm argument l_ref / l1_ref must exceed 1");
  detail::require(l / (2.0 * w0) > 1.0, "l", "logarithm argument l / (2 w0) must exceed 1");
  return d / d_ref * std::log(l_ref / l1_ref) / std::log(l / (2.0 * w0));
}

/// Single Cs atom, 0.4 ng SiN membrane, 50 um micro-cavity.
inline SystemParams paper_preset() {
  SystemParams p;
  const double gamma = hz_to_rad_s(2.61e6);
  p.atom.mass_kg = 2.207e-25;
  p.atom.gamma_rad_s = gamma;
  p.atom.lambda1_m = 852.35e-9;  // Cs D2
  p.atom.lambda2_m = 894.59e-9;  // Cs D1
  p.atom.delta_rad_s = -450.0 * gamma;

  p.cavity.length_m = 50e-6;
  p.cavity.finesse = 2e5;
  p.cavity.waist_m = 10e-6;
  p.cavity.mode_index_offset = 0;
  const double kappa = constants::pi * constants::c / (2.0 * p.cavity.finesse * p.cavity.length_m);
  p.cavity.detuning_rad_s = 18.0 * kappa;
  p.atom.vacuum_rabi_rad_s = std::sqrt(140.0 * kappa * gamma);

  p.membrane.mass_kg = 0.4e-12;
  p.membrane.omega_m_rad_s = hz_to_rad_s(1.3e6);
  p.membrane.quality = 1e7;
  p.membrane.reflectivity = 0.45;
  p.membrane.temperature_K.reset();
  p.membrane.kappa_th_hz = 10e-9 / constants::k_B;
  p.membrane.side_m = 100e-6;
  p.membrane.thickness_m = 50e-9;

  p.drive.circulating_power_W = 850e-6;
  return p;
}

}  // namespace qspring
