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
 * @file cli.hpp
 * @brief `qspring` command-line front end. Exit codes: 0 success, 1 domain or
 * runtime error, 2 usage error.
 */

#pragma once

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qspring/io.hpp"
#include "qspring/scenarios.hpp"

namespace qspring::cli {

using io::json;

struct Common {
  std::string preset;
  std::string params_file;
  std::vector<std::string> overrides;
  std::string output;
  std::string format;
};

namespace detail {

inline void add_common(CLI::App* sub, Common& c, const std::string& default_format,
                       const std::vector<std::string>& formats) {
  auto* pre = sub->add_option("--preset", c.preset, "Named parameter preset (paper)")
                  ->check(CLI::IsMember({"paper"}));
  auto* par = sub->add_option("--params", c.params_file, "JSON parameter file (frequencies in Hz, *_hz keys)")
                  ->check(CLI::ExistingFile);
  pre->excludes(par);
  sub->add_option("--set", c.overrides, "Override a parameter: section.field=value (repeatable)");
  sub->add_option("--output,-o", c.output, "Output file (default: stdout)");
  c.format = default_format;
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember(formats));
}

/// Preset or file, then overrides. Also returns the resolved params JSON.
inline SystemParams resolve_params(const Common& c, json& resolved) {
  SystemParams p;
  if (!c.params_file.empty()) {
    json j = io::read_json_file(c.params_file);
    for (const auto& o : c.overrides) io::apply_override(j, o);
    p = io::params_from_json(j);
  } else {
    p = paper_preset();
    if (!c.overrides.empty()) {
      json j = io::params_to_json(p, false);
      for (const auto& o : c.overrides) io::apply_override(j, o);
      p = io::params_from_json(j);
    }
  }
  resolved = {{"source", c.params_file.empty() ? "preset:paper" : c.params_file},
              {"overrides", c.overrides},
              {"params", io::params_to_json(p)}};
  return p;
}

inline std::string ledger_text(const LedgerResult& L) {
  std::ostringstream os;
  os << "Condition ledger (regime: " << L.report.regime << ")\n";
  os << std::left << std::setw(24) << "condition" << std::setw(16) << "ratio" << std::setw(12) << "threshold"
     << "level\n";
  for (const auto& c : L.report.conditions)
    os << std::left << std::setw(24) << c.name << std::setw(16) << io::fmt(c.ratio) << std::setw(12)
       << io::fmt(c.threshold) << to_string(c.level) << "\n";
  os << "\nComputed vs printed values\n";
  for (const auto& a : L.annotations) {
    os << "  " << std::left << std::setw(26) << a.name << std::setw(18) << io::fmt(a.value);
    if (a.reference) os << "ref " << std::setw(16) << io::fmt(*a.reference);
    if (!a.note.empty()) os << "  " << a.note;
    os << "\n";
  }
  os << "\ngeometry: theta = " << io::fmt(L.site.theta) << ", xi = " << io::fmt(L.site.xi)
     << ", curvature / k1^2 = " << io::fmt(L.site.curvature / (L.waves.k1 * L.waves.k1))
     << ", q = " << L.waves.q << ", f1 = " << io::fmt(L.rates.f1) << ", f2 = " << io::fmt(L.rates.f2) << "\n";
  return os.str();
}

inline std::vector<int> parse_dims(const std::string& s) {
  std::vector<int> d;
  for (const auto& f : io::split(s)) {
    char* end = nullptr;
    const long v = std::strtol(f.c_str(), &end, 10);
    if (end == f.c_str() || *end != '\0') throw DomainError("dims", "expected comma-separated integers");
    d.push_back(static_cast<int>(v));
  }
  return d;
}

}  // namespace detail

/**
 * Parses `args` (without the program name), runs the command and writes the
 * result to `out` or the --output file. Diagnostics go to `err`.
 */
inline int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cavity-mediated atom-membrane coupling toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // check / derive
  Common cc, dc;
  int site_index = 0;
  bool resonant = false, bose = false;
  double th_strong = 10.0, th_marginal = 5.0;
  auto* check = app.add_subcommand("check", "Evaluate the strong-coupling condition ledger");
  detail::add_common(check, cc, "text", {"text", "json"});
  auto* derive = app.add_subcommand("derive", "Derive every rate and geometry factor");
  detail::add_common(derive, dc, "json", {"json"});
  for (auto* s : {check, derive}) {
    s->add_option("--site-index", site_index, "Envelope half period of the lattice well (0: best well)")
        ->check(CLI::NonNegativeNumber);
    s->add_flag("--resonant", resonant, "Re-solve alpha so that omega_at = omega_m");
    s->add_flag("--bose", bose, "Exact Bose occupation instead of k_B T / hbar omega_m");
    s->add_option("--strong", th_strong, "Ratio threshold for 'strong'");
    s->add_option("--marginal", th_marginal, "Ratio threshold for 'marginal' (pass)");
  }

  // evolve
  Common ec;
  std::string model_kind = "effective", model_json, dump_model, dims_text = "12,16";
  double squeeze_db = 0.0, nbar = 0.0, t_final = 0.0, gamma_over_g = 0.1, omega_over_g = 20.0, fock_dt = 1e-3;
  int samples = 201;
  bool natural = false;
  auto* evolve_cmd = app.add_subcommand("evolve", "Integrate a model from a product initial state");
  detail::add_common(evolve_cmd, ec, "csv", {"csv", "json"});
  evolve_cmd->add_option("--model", model_kind, "effective | full | fock-oracle")
      ->check(CLI::IsMember({"effective", "full", "fock-oracle"}));
  evolve_cmd->add_option("--model-json", model_json, "Integrate this model JSON instead of building one")
      ->check(CLI::ExistingFile);
  evolve_cmd->add_option("--dump-model", dump_model, "Also write the model as JSON to this path");
  evolve_cmd->add_flag("--natural", natural, "Measure time in 1/omega_m (all rates divided by omega_m)");
  evolve_cmd->add_flag("--resonant", resonant, "Re-solve alpha so that omega_at = omega_m");
  evolve_cmd->add_option("--squeeze-db", squeeze_db, "Initial atom squeezing in dB")->check(CLI::NonNegativeNumber);
  evolve_cmd->add_option("--nbar", nbar, "Initial membrane occupation")->check(CLI::NonNegativeNumber);
  evolve_cmd->add_option("--t-final", t_final,
                         "Final time (s, 1/omega_m with --natural, G t for fock-oracle; default one swap)")
      ->check(CLI::NonNegativeNumber);
  evolve_cmd->add_option("--samples", samples, "Number of emitted samples")->check(CLI::Range(2, 1000000));
  evolve_cmd->add_option("--gamma-over-g", gamma_over_g, "fock-oracle: common loss rate over G")
      ->check(CLI::NonNegativeNumber);
  evolve_cmd->add_option("--omega-over-g", omega_over_g, "fock-oracle: omega_at = omega_m over G")
      ->check(CLI::PositiveNumber);
  evolve_cmd->add_option("--dims", dims_text, "fock-oracle: Fock truncation per mode, e.g. 12,16");
  evolve_cmd->add_option("--dt", fock_dt, "fock-oracle: RK4 step in 1/G")->check(CLI::PositiveNumber);

  // transfer
  Common tc_common;
  TransferConfig tcfg;
  std::string membrane_loss = "gamma_m_nbar";
  double bath_nbar = -1.0;
  auto* transfer = app.add_subcommand("transfer", "Squeezed-state swap in the effective model");
  detail::add_common(transfer, tc_common, "json", {"json", "csv"});
  transfer->add_option("--squeeze-db", tcfg.squeeze_db, "Initial atom squeezing in dB")->check(CLI::NonNegativeNumber);
  transfer->add_option("--nbar", tcfg.n_bar, "Initial membrane occupation")->check(CLI::NonNegativeNumber);
  transfer->add_option("--gamma-over-g", tcfg.gamma_over_G, "Common loss rate Gamma / G")->check(CLI::NonNegativeNumber);
  transfer->add_option("--omega-over-g", tcfg.omega_over_G, "omega_at = omega_m over G")->check(CLI::PositiveNumber);
  transfer->add_option("--phi", tcfg.phi, "Mixing angle of the cavity channels (rad)");
  transfer->add_option("--bath-nbar", bath_nbar, "Membrane bath occupation (default: initial nbar)");
  transfer->add_option("--membrane-loss", membrane_loss, "gamma_m_nbar | channel_total")
      ->check(CLI::IsMember({"gamma_m_nbar", "channel_total"}));
  transfer->add_option("--t-max", tcfg.t_max_G, "Window end in G t (>= pi)")->check(CLI::PositiveNumber);
  transfer->add_option("--samples", tcfg.samples, "Number of samples")->check(CLI::Range(3, 1000000));

  // sweep
  Common sc;
  std::vector<double> gammas, dbs{3.0, 6.0, 9.0};
  unsigned threads = 0;
  TransferConfig sweep_base;
  auto* sweep = app.add_subcommand("sweep", "Transferred squeezing versus loss rate");
  detail::add_common(sweep, sc, "csv", {"csv", "json"});
  sweep->add_option("--gammas", gammas, "Gamma / G values (default 26 points in [0, 0.5])")->delimiter(',');
  sweep->add_option("--squeeze-db", dbs, "Initial squeezing values in dB")->delimiter(',');
  sweep->add_option("--nbar", sweep_base.n_bar, "Initial membrane occupation")->check(CLI::NonNegativeNumber);
  sweep->add_option("--omega-over-g", sweep_base.omega_over_G, "omega over G")->check(CLI::PositiveNumber);
  sweep->add_option("--samples", sweep_base.samples, "Samples per run")->check(CLI::Range(3, 1000000));
  sweep->add_option("--threads", threads, "Worker threads (default: QSPRING_THREADS or all cores)");

  // adiabatic
  Common ac;
  AdiabaticConfig acfg;
  std::vector<double> ratios{30.0, 100.0, 300.0};
  auto* adiabatic = app.add_subcommand("adiabatic", "Full four-mode versus effective two-mode dynamics");
  detail::add_common(adiabatic, ac, "json", {"json", "csv"});
  adiabatic->add_option("--ratios", ratios, "Delta / g values")->delimiter(',');
  adiabatic->add_option("--kappa-over-delta", acfg.kappa_over_delta, "kappa / Delta")->check(CLI::PositiveNumber);
  adiabatic->add_option("--omega-over-delta", acfg.omega_over_delta, "omega / Delta")->check(CLI::PositiveNumber);
  adiabatic->add_option("--squeeze-db", acfg.squeeze_db, "Initial atom squeezing in dB")->check(CLI::NonNegativeNumber);
  adiabatic->add_option("--nbar", acfg.n_bar, "Initial membrane occupation")->check(CLI::NonNegativeNumber);
  adiabatic->add_option("--window", acfg.window_G, "Window end in G t")->check(CLI::PositiveNumber);
  adiabatic->add_option("--samples", acfg.samples, "Samples per run")->check(CLI::Range(2, 1000000));

  // wigner
  Common wc;
  TransferConfig wcfg;
  std::string panel = "membrane-exchanged";
  double range = 6.0;
  int points = 121;
  auto* wig = app.add_subcommand("wigner", "Wigner grids of the swap (t = 0 and G t = pi/2)");
  detail::add_common(wig, wc, "csv", {"csv"});
  wig->add_option("--panel", panel, "atom-initial | membrane-initial | atom-exchanged | membrane-exchanged")
      ->check(CLI::IsMember({"atom-initial", "membrane-initial", "atom-exchanged", "membrane-exchanged"}));
  wig->add_option("--squeeze-db", wcfg.squeeze_db, "Initial atom squeezing in dB")->check(CLI::NonNegativeNumber);
  wig->add_option("--nbar", wcfg.n_bar, "Initial membrane occupation")->check(CLI::NonNegativeNumber);
  wig->add_option("--gamma-over-g", wcfg.gamma_over_G, "Common loss rate Gamma / G")->check(CLI::NonNegativeNumber);
  wig->add_option("--omega-over-g", wcfg.omega_over_G, "omega over G")->check(CLI::PositiveNumber);
  wig->add_option("--range", range, "Grid half width in x and p")->check(CLI::PositiveNumber);
  wig->add_option("--points", points, "Grid points per axis")->check(CLI::Range(2, 4001));

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    for (auto* s : app.get_subcommands())
      if (s->parsed()) {
        err << "run '" << s->get_name() << " --help' for the list of flags\n";
        return 2;
      }
    err << "run '--help' for the list of commands\n";
    return 2;
  }

  try {
    if (check->parsed() || derive->parsed()) {
      const Common& c = check->parsed() ? cc : dc;
      json resolved;
      const auto p = detail::resolve_params(c, resolved);
      LedgerOptions lo;
      lo.site_index = site_index;
      lo.resonant = resonant;
      lo.derive.bose_occupation = bose;
      lo.thresholds.strong = th_strong;
      lo.thresholds.marginal = th_marginal;
      const auto L = run_ledger(p, lo);
      if (c.format == "text") {
        io::emit(detail::ledger_text(L), c.output, out);
      } else {
        json j = io::ledger_json(L);
        resolved["command"] = check->parsed() ? "check" : "derive";
        resolved["site_index"] = site_index;
        resolved["resonant"] = resonant;
        resolved["bose"] = bose;
        j["resolved_config"] = resolved;
        io::emit(io::dump(j), c.output, out);
      }
      return 0;
    }

    if (evolve_cmd->parsed()) {
      json resolved;
      const auto p = detail::resolve_params(ec, resolved);
      resolved["command"] = "evolve";
      resolved["model"] = model_kind;
      resolved["squeeze_db"] = io::num(squeeze_db);
      resolved["nbar"] = io::num(nbar);
      resolved["samples"] = samples;

      if (model_kind == "fock-oracle") {
        OracleConfig oc;
        oc.squeeze_db = squeeze_db;
        oc.n_bar = nbar;
        oc.gamma_over_G = gamma_over_g;
        oc.omega_over_G = omega_over_g;
        oc.dims = detail::parse_dims(dims_text);
        oc.samples = samples;
        oc.dt = fock_dt;
        if (t_final > 0) oc.t_max_G = t_final;
        if (!model_json.empty()) throw DomainError("model-json", "fock-oracle builds its own effective model");
        const auto r = oracle_equivalence(oc);
        if (ec.format == "csv") {
          io::emit(io::trajectory_csv(r.fock, {labels::atom, labels::membrane}), ec.output, out);
        } else {
          json j = io::oracle_json(r);
          resolved["dims"] = oc.dims;
          resolved["dt"] = io::num(oc.dt);
          j["resolved_config"] = resolved;
          io::emit(io::dump(j), ec.output, out);
        }
        return 0;
      }

      QuadraticModel model;
      double swap_time = 0;
      if (!model_json.empty()) {
        model = io::model_from_json(io::read_json_file(model_json));
        resolved["model_json"] = model_json;
      } else {
        LedgerOptions lo;
        lo.resonant = resonant;
        const auto L = run_ledger(p, lo);
        const double wm = L.params.membrane.omega_m_rad_s;
        if (model_kind == "effective") model = build_effective_model(effective_rates(L.rates, wm));
        else model = build_full_model(full_model_params(L.params, L.rates));
        swap_time = constants::pi / 2 / std::abs(L.rates.G_rad_s);
        if (natural) {
          model = make_dimensionless(model, wm);
          swap_time *= wm;
        }
      }
      resolved["natural"] = natural;
      resolved["resonant"] = resonant;
      std::vector<GaussianState> parts;
      for (int m = 0; m < model.modes(); ++m) {
        const auto& l = model.mode_labels[m];
        if (m == 0) parts.push_back(state::squeezed(squeeze_db, 0.0, l));
        else if (m == 1) parts.push_back(state::thermal(nbar, l));
        else parts.push_back(state::vacuum(l));
      }
      const auto init = state::product(parts);
      double tf = t_final;
      if (tf <= 0) tf = swap_time;
      if (!(tf > 0)) throw DomainError("t-final", "must be given for a model read from JSON");
      resolved["t_final"] = io::num(tf);
      if (!dump_model.empty()) io::emit(io::dump(io::model_to_json(model)), dump_model, out);
      const auto tr = evolve(model, init, tf, samples);
      if (ec.format == "csv") {
        io::emit(io::trajectory_csv(tr, model.mode_labels), ec.output, out);
      } else {
        json j;
        j["kind"] = "evolve";
        j["model"] = io::model_to_json(model);
        j["times"] = io::vector(tr.times);
        j["final_mean"] = io::vector(tr.states.back().mean);
        j["final_cov"] = io::matrix(tr.states.back().cov);
        j["dt"] = io::num(tr.dt);
        j["min_uncertainty_eigenvalue"] = io::num(tr.min_uncertainty_eigenvalue);
        j["max_re_eig"] = io::num(max_real_eigenvalue(model.drift));
        j["resolved_config"] = resolved;
        io::emit(io::dump(j), ec.output, out);
      }
      return 0;
    }

    if (transfer->parsed()) {
      json resolved;
      detail::resolve_params(tc_common, resolved);
      if (bath_nbar >= 0) tcfg.bath_n_bar = bath_nbar;
      tcfg.membrane_loss = membrane_loss == "channel_total" ? MembraneLoss::channel_total : MembraneLoss::gamma_m_nbar;
      const auto r = transfer_experiment(tcfg);
      if (tc_common.format == "csv") {
        io::emit(io::transfer_csv(r), tc_common.output, out);
      } else {
        json j = io::transfer_json(r);
        resolved["command"] = "transfer";
        resolved["transfer"] = io::transfer_config_json(tcfg);
        j["resolved_config"] = resolved;
        io::emit(io::dump(j), tc_common.output, out);
      }
      return 0;
    }

    if (sweep->parsed()) {
      json resolved;
      detail::resolve_params(sc, resolved);
      if (gammas.empty()) gammas = default_sweep_gammas();
      const auto rows = transfer_sweep(gammas, dbs, sweep_base, threads);
      if (sc.format == "csv") {
        io::emit(io::sweep_csv(rows), sc.output, out);
      } else {
        json j;
        j["kind"] = "sweep";
        json r = json::array();
        for (const auto& x : rows)
          r.push_back({{"gamma_over_G", io::num(x.gamma_over_G)},
                       {"squeeze_db", io::num(x.squeeze_db)},
                       {"max_transferred_db", io::num(x.max_transferred_db)},
                       {"t_at_max_G", io::num(x.t_at_max)},
                       {"max_transferred_raw_db", io::num(x.max_transferred_raw_db)},
                       {"swap_fidelity_at_half_pi", io::num(x.swap_fidelity_at_half_pi)}});
        j["rows"] = std::move(r);
        resolved["command"] = "sweep";
        resolved["base"] = io::transfer_config_json(sweep_base);
        resolved["gammas"] = io::vector(gammas);
        resolved["squeeze_db"] = io::vector(dbs);
        j["resolved_config"] = resolved;
        io::emit(io::dump(j), sc.output, out);
      }
      return 0;
    }

    if (adiabatic->parsed()) {
      json resolved;
      detail::resolve_params(ac, resolved);
      const auto rows = adiabatic_check(ratios, acfg);
      if (ac.format == "csv") {
        io::emit(io::adiabatic_csv(rows), ac.output, out);
      } else {
        json j = io::adiabatic_json(rows, acfg);
        resolved["command"] = "adiabatic";
        resolved["ratios"] = io::vector(ratios);
        j["resolved_config"] = resolved;
        io::emit(io::dump(j), ac.output, out);
      }
      return 0;
    }

    if (wig->parsed()) {
      json resolved;
      detail::resolve_params(wc, resolved);
      const PhaseGrid g{-range, range, points, -range, range, points};
      const auto panels = swap_panels(wcfg, g);
      const WignerGrid& w = panel == "atom-initial"       ? panels.atom_initial
                            : panel == "membrane-initial" ? panels.membrane_initial
                            : panel == "atom-exchanged"   ? panels.atom_exchanged
                                                          : panels.membrane_exchanged;
      io::emit(io::wigner_csv(w), wc.output, out);
      return 0;
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const InstabilityError& e) {
    err << "instability: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace qspring::cli
