#include "cqed/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include "cqed/errors.hpp"
#include "cqed/experiments.hpp"
#include "cqed/sweep_io.hpp"

namespace cqed {

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string models;
  bool quiet = false;
};

struct Loaded {
  ExperimentConfig cfg;
  std::string path;
  std::string sha256;
};

Loaded load(const Common& c) {
  Loaded l;
  if (c.config.empty()) {
    l.cfg.system = table_s1_params();
    l.path = "";
    l.sha256 = sha256_hex(serialize_config(l.cfg));
  } else {
    std::ifstream in(c.config, std::ios::binary);
    if (!in) throw InputError("cannot open config file '" + c.config + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    l.cfg = load_config(bytes);
    l.path = c.config;
    l.sha256 = sha256_hex(bytes);
  }
  if (!c.models.empty()) {
    std::vector<std::string> names;
    std::stringstream ss(c.models);
    for (std::string m; std::getline(ss, m, ',');) {
      if (m != "late" && m != "late_no_h2" && m != "early")
        throw ValidationError("--models", "unknown model '" + m + "' (late, late_no_h2, early)");
      names.push_back(m);
    }
    if (names.empty()) throw ValidationError("--models", "no models given");
    l.cfg.experiment.models = names;
  }
  return l;
}

void set_axis(ExperimentConfig& cfg, const std::string& name, const std::string& spec) {
  if (spec.empty()) return;
  auto values = parse_values(spec);
  for (auto& a : cfg.experiment.axes)
    if (a.name == name) {
      a.values = std::move(values);
      return;
    }
  cfg.experiment.axes.push_back({name, std::move(values)});
}

void set_tone(ExperimentConfig& cfg, Mode m, std::optional<double> eps, std::optional<double> det) {
  if (!eps && !det) return;
  for (auto& d : cfg.drives)
    if (d.target == m) {
      if (eps) d.epsilon = *eps;
      if (det) d.detuning = *det;
      return;
    }
  cfg.drives.push_back({m, eps.value_or(0.0), det.value_or(0.0), 0.0});
}

Progress progress_printer(const Common& c, const std::string& name, std::ostream& err) {
  if (c.quiet) return {};
  return [name, &err](std::size_t done, std::size_t total) {
    err << "[" << name << "] row " << done << "/" << total << "\n" << std::flush;
  };
}

std::string joined(const std::vector<std::string>& args) {
  std::string s;
  for (const auto& a : args) {
    if (!s.empty()) s += ' ';
    s += a;
  }
  return s;
}

nlohmann::json manifest(const std::vector<std::string>& args, const Loaded& l, const std::string& started,
                        const std::vector<std::string>& outputs) {
  return {{"command", joined(args)},
          {"config_path", l.path},
          {"config_sha256", l.sha256},
          {"tool_version", CQEDSIM_VERSION},
          {"started_utc", started},
          {"finished_utc", utc_timestamp()},
          {"outputs", outputs}};
}

void emit_sweep(const SweepResult& r, const Common& c, const Loaded& l, const std::vector<std::string>& args,
                const std::string& started, std::ostream& out, std::ostream& err) {
  const std::string side = sidecar_path(c.out);
  write_sweep_csv(r, c.out);
  write_file_atomic(side, sweep_sidecar(r, manifest(args, l, started, {c.out, side})).dump(2) + "\n");
  const auto failed = r.metadata.value("failed_cells", std::size_t{0});
  if (failed > 0) err << "warning: " << failed << " of " << r.cell_count() << " cells failed; see the error column\n";
  out << "wrote " << c.out << " and " << side << "\n";
}

void emit_json(const nlohmann::json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (!path.empty()) write_file_atomic(path, text);
  out << text;
}

void add_common(CLI::App* sub, Common& c, bool with_models, const std::string& default_out) {
  sub->add_option("--config", c.config, "JSON config file (default: built-in device constants)");
  if (!default_out.empty()) {
    c.out = default_out;
    sub->add_option("--out", c.out, "output CSV path (a .meta.json sidecar is written next to it)")
        ->capture_default_str();
  }
  if (with_models) sub->add_option("--models", c.models, "comma list of late, late_no_h2, early");
  sub->add_flag("--quiet", c.quiet, "no progress lines");
}

} // namespace

std::vector<double> parse_values(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ValidationError("values", "not a number: '" + s + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("values", "range must be start:stop:count");
    const double count = number(parts[2]);
    if (count < 1 || count != std::floor(count)) throw ValidationError("values", "count must be a positive integer");
    return linspace(number(parts[0]), number(parts[1]), static_cast<int>(count));
  }
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  if (out.empty()) throw ValidationError("values", "no values given");
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-tone driven transmon-cavity simulator", "cqedsim"};
  app.set_version_flag("--version", std::string(CQEDSIM_VERSION));
  app.require_subcommand(1);

  Common c;

  auto* amp = app.add_subcommand("stark-amp", "Stark shifts vs drive amplitude on one mode");
  add_common(amp, c, true, "stark.csv");
  std::string target = "qubit", eps_range;
  std::optional<double> amp_det;
  amp->add_option("--target", target, "driven mode")->check(CLI::IsMember({"qubit", "cavity"}))->capture_default_str();
  amp->add_option("--eps", eps_range, "amplitudes in MHz, start:stop:count or a comma list");
  amp->add_option("--detuning", amp_det, "detuning of the swept tone, MHz");

  auto* det = app.add_subcommand("stark-detuning", "qubit Stark shift vs qubit drive detuning");
  add_common(det, c, true, "stark_detuning.csv");
  std::optional<double> det_eps;
  std::string det_range;
  det->add_option("--eps-q", det_eps, "qubit drive amplitude, MHz");
  det->add_option("--delta", det_range, "qubit detunings in MHz, start:stop:count or a comma list");

  auto* chev = app.add_subcommand("chevron", "qubit population map over the two drive amplitudes");
  add_common(chev, c, true, "chevron.csv");
  std::string chev_q, chev_c;
  std::optional<double> chev_delta, chev_tau;
  std::optional<int> chev_photon;
  chev->add_option("--eps-q", chev_q, "qubit amplitudes, MHz");
  chev->add_option("--eps-c", chev_c, "cavity amplitudes, MHz");
  chev->add_option("--delta", chev_delta, "detuning magnitude D: qubit tone at -D, cavity tone at D - (n+1) chi, MHz");
  chev->add_option("--photon", chev_photon, "initial cavity photon number n")->check(CLI::NonNegativeNumber);
  chev->add_option("--tau", chev_tau, "gate time, us");

  auto* bs = app.add_subcommand("beamsplit", "qubit population map over time and cavity tone offset");
  add_common(bs, c, true, "beamsplit.csv");
  std::string bs_tau, bs_dw;
  std::optional<double> bs_nu;
  bs->add_option("--tau", bs_tau, "times, us");
  bs->add_option("--delta-omega", bs_dw, "cavity tone offsets around the calibrated center, MHz");
  bs->add_option("--nu-corr", bs_nu, "fixed center offset, MHz (skips calibration)");

  auto* cal = app.add_subcommand("calibrate", "find the beam-splitting cavity tone offset");
  add_common(cal, c, true, "");
  std::string cal_out;
  double window = 0.0;
  cal->add_option("--window", window, "time window for the peak-transfer metric, us (default: last tau)");
  cal->add_option("--out", cal_out, "also write the JSON report here");

  auto* val = app.add_subcommand("validate", "compare late, early and oracle qubit Stark shifts");
  add_common(val, c, false, "");
  double v_eps = 7.63, v_delta = -20.0, v_duration = 2.0, v_tol = 0.05;
  std::string val_out;
  val->add_option("--eps-q", v_eps, "qubit drive amplitude, MHz")->capture_default_str();
  val->add_option("--delta-q", v_delta, "qubit drive detuning, MHz")->capture_default_str();
  val->add_option("--duration", v_duration, "oracle propagation time, us")->capture_default_str();
  val->add_option("--tolerance", v_tol, "relative late-vs-oracle tolerance")->capture_default_str();
  val->add_option("--out", val_out, "also write the JSON report here");

  auto* dump = app.add_subcommand("dump-terms", "print the Hamiltonian terms of one model");
  add_common(dump, c, false, "");
  std::string d_model = "late", d_frame = "mode";
  dump->add_option("--model", d_model, "late, late_no_h2, early or oracle")->capture_default_str();
  dump->add_option("--frame", d_frame, "mode or drive")->check(CLI::IsMember({"mode", "drive"}))->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << CQEDSIM_VERSION << "\n";
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return exit_usage;
  }

  const std::string started = utc_timestamp();
  try {
    Loaded l = load(c);
    auto& cfg = l.cfg;

    if (amp->parsed()) {
      const Mode m = parse_mode(target);
      set_tone(cfg, m, std::nullopt, amp_det);
      set_axis(cfg, "epsilon_MHz", eps_range);
      emit_sweep(run_stark_amplitude_sweep(cfg, m, progress_printer(c, "stark-amp", err)), c, l, args, started, out, err);
    } else if (det->parsed()) {
      set_tone(cfg, Mode::qubit, det_eps, std::nullopt);
      set_axis(cfg, "detuning_MHz", det_range);
      emit_sweep(run_stark_detuning_sweep(cfg, progress_printer(c, "stark-detuning", err)), c, l, args, started, out, err);
    } else if (chev->parsed()) {
      if (chev_delta) set_tone(cfg, Mode::qubit, std::nullopt, -*chev_delta);
      if (chev_photon) cfg.experiment.photon_index = *chev_photon;
      if (chev_tau) cfg.experiment.gate_time_us = *chev_tau;
      if (!(cfg.experiment.gate_time_us > 0.0)) throw ValidationError("--tau", "gate time must be > 0");
      set_axis(cfg, "epsilon_q_MHz", chev_q);
      set_axis(cfg, "epsilon_c_MHz", chev_c);
      emit_sweep(run_tms_chevron(cfg, progress_printer(c, "chevron", err)), c, l, args, started, out, err);
    } else if (bs->parsed()) {
      if (bs_nu) cfg.experiment.nu_corr_MHz = *bs_nu;
      set_axis(cfg, "tau_us", bs_tau);
      set_axis(cfg, "delta_omega_MHz", bs_dw);
      emit_sweep(run_beamsplit_map(cfg, progress_printer(c, "beamsplit", err)), c, l, args, started, out, err);
    } else if (cal->parsed()) {
      const auto r = calibrate_nu_corr(cfg, window);
      nlohmann::json j = {{"nu_corr_MHz", r.nu_corr_MHz},
                          {"peak_transfer", r.peak_transfer},
                          {"evaluations", r.evaluations},
                          {"reference_nu_corr_MHz", reference_nu_corr_MHz}};
      j["manifest"] = manifest(args, l, started, cal_out.empty() ? std::vector<std::string>{} : std::vector{cal_out});
      emit_json(j, cal_out, out);
    } else if (val->parsed()) {
      if (!(v_tol > 0.0)) throw ValidationError("--tolerance", "must be > 0");
      const auto r = compare_with_oracle(cfg, v_eps, v_delta, v_duration);
      nlohmann::json j = {{"epsilon_q_MHz", r.epsilon_q_MHz},
                          {"detuning_q_MHz", r.detuning_q_MHz},
                          {"qubit_shift_MHz",
                           {{"late", r.late_MHz}, {"late_no_h2", r.late_no_h2_MHz}, {"early", r.early_MHz},
                            {"oracle", r.oracle_MHz}}},
                          {"oracle_driven_MHz", r.oracle_driven_MHz},
                          {"oracle_undriven_MHz", r.oracle_undriven_MHz},
                          {"oracle_fit_residual_rad", r.fit_residual},
                          {"oracle_steps", r.oracle_steps},
                          {"relative_gap_late_oracle", r.relative_gap()},
                          {"tolerance", v_tol},
                          {"late_within_tolerance", r.relative_gap() <= v_tol},
                          {"early_sign_differs", r.early_MHz * r.oracle_MHz < 0.0},
                          {"hilbert", {{"n_q", cfg.hilbert.n_q}, {"n_c", cfg.hilbert.n_c}}},
                          {"runtime_s", r.runtime_s}};
      j["manifest"] = manifest(args, l, started, val_out.empty() ? std::vector<std::string>{} : std::vector{val_out});
      emit_json(j, val_out, out);
    } else if (dump->parsed()) {
      const Model m = parse_model(d_model);
      const auto params = cfg.params();
      const auto tones = cfg.tones();
      auto spec = build_model(m, params, tones, Frequency::from_MHz(cfg.experiment.early_rwa_cutoff_MHz).rad());
      if (d_frame == "drive") {
        const auto [dq, dc] = tone_detunings(tones);
        spec = to_drive_frame(spec, dq, dc, false);
      }
      out << "# model " << to_string(m) << ", " << d_frame << " frame, " << spec.terms.size() << " terms\n";
      out << dump_terms(spec);
    }
    return exit_ok;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numeric;
  }
}

} // namespace cqed
