#pragma once

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sheathlab/sheathlab.hpp"

namespace sheathlab {

/// Command-line front end. Exit codes: 0 success, 2 configuration error,
/// 3 solver error, 4 acceptance-check failure (with --check).
inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"sheathlab - plasma sheath boundary layers and the quasineutral limit"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string config_path;
  app.add_option("--config", config_path, "INI-style config file");
  app.add_option("--out", cfg.out_dir, "output directory");

  // profile
  auto* prof_cmd = app.add_subcommand("profile", "tabulate the leading sheath profile");
  double p_Ti = 1.0, p_u3 = -2.0, p_n0 = 1.0, p_phi0 = 0.1, p_zmax = 0.0, p_dz = 0.01;
  prof_cmd->add_option("--Ti", p_Ti, "ion temperature");
  prof_cmd->add_option("--u3", p_u3, "velocity trace (supersonic, negative)");
  prof_cmd->add_option("--n0", p_n0, "density trace");
  prof_cmd->add_option("--phi0", p_phi0, "potential boundary value Phi0(0)");
  prof_cmd->add_option("--zmax", p_zmax, "profile extent (default 40/gamma)");
  prof_cmd->add_option("--dz", p_dz, "profile step");

  // solve / limit
  auto* solve_cmd = app.add_subcommand("solve", "run the eps > 0 Euler-Poisson solver");
  auto* limit_cmd = app.add_subcommand("limit", "run the quasineutral limit solver");

  // converge
  auto* conv_cmd = app.add_subcommand("converge", "eps-sweep convergence experiment");
  std::string conv_regime = "supersonic";
  bool conv_check = false;
  conv_cmd->add_option("--regime", conv_regime, "supersonic or intermediate");
  conv_cmd->add_flag("--check", conv_check, "exit 4 unless the fitted rates pass");

  // stability
  auto* stab_cmd = app.add_subcommand("stability", "Sylvester-minor certificates at a trace");
  double s_n = 1.0, s_u3 = -2.0, s_Ti = 1.0, s_ef = 1.0, s_mu = 0.0;
  stab_cmd->add_option("--n", s_n, "density trace");
  stab_cmd->add_option("--u3", s_u3, "velocity trace");
  stab_cmd->add_option("--Ti", s_Ti, "ion temperature");
  stab_cmd->add_option("--ef", s_ef, "electron factor e^{-phi_a}(1+h)");
  stab_cmd->add_option("--mu", s_mu, "identity shift mu");

  // classify
  auto* class_cmd = app.add_subcommand("classify", "regime classification table");
  bool class_json = false;
  class_cmd->add_flag("--json", class_json, "emit JSON instead of text");

  // residual
  auto* res_cmd = app.add_subcommand("residual", "residual ladder of the expansion");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) apply_config(cfg, parse_config_file(config_path));
    std::filesystem::create_directories(cfg.out_dir);
    const std::string out = cfg.out_dir + "/";

    if (prof_cmd->parsed()) {
      const LayerContext ctx(p_n0, p_u3, p_Ti, p_phi0);
      const double gamma = decay_rate(p_Ti, p_u3);
      const double zmax = (p_zmax > 0.0) ? p_zmax : 40.0 / (std::sqrt(p_n0) * gamma);
      SheathProfile prof = build_layer_fields(ctx, solve_phi0(ctx, zmax, 1e-9, p_dz));
      write_profile_csv(out + "profile.csv", prof);
      nlohmann::json j{{"gamma_formula", prof.gamma_formula},
                       {"gamma_prefactored", prof.tail_rate},
                       {"measured_decay_rate", prof.measured_decay_rate},
                       {"phi0_boundary_value", p_phi0},
                       {"z_max", zmax}};
      write_text_file(out + "profile_report.json", j.dump(2) + "\n");
      return 0;
    }

    if (solve_cmd->parsed() || limit_cmd->parsed()) {
      auto bg = make_background(cfg);
      const double T = cfg.params.final_time;
      if (solve_cmd->parsed()) {
        const double gamma_pre = std::sqrt(bg->n(0.0, 0.0)) *
                                 decay_rate(cfg.params.ion_temperature, bg->u3(0.0, 0.0));
        Grid1D grid = build_grid(cfg.domain_L, cfg.params.epsilon, std::min(cfg.params.gamma0, gamma_pre),
                                 cfg.bulk_dx, cfg.params.epsilon / cfg.fine_dx_divisor,
                                 cfg.zone_factor);
        ExpansionBuilder builder(cfg.params, bg, cfg.params.expansion_order, cfg.layer_dz,
                                 45.0 / gamma_pre, 1e-4 * T);
        PlasmaState init = builder.at(0.0).to_state(grid);
        const RunResult rr = run_ep(grid, init, cfg.params, cfg.solver, T);
        write_snapshot_csv(out + "snapshot.csv", grid, rr.state);
      } else {
        Grid1D grid = uniform_grid(cfg.domain_L, cfg.bulk_dx);
        PlasmaState init;
        init.n.resize(grid.size());
        init.u1.assign(grid.size(), 0.0);
        init.u2.assign(grid.size(), 0.0);
        init.u3.resize(grid.size());
        init.phi.assign(grid.size(), 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          init.n[i] = bg->n(0.0, grid.cell_centers[i]);
          init.u3[i] = bg->u3(0.0, grid.cell_centers[i]);
        }
        const RunResult rr = run_limit(grid, init, cfg.params, cfg.regime, cfg.solver, T);
        write_snapshot_csv(out + "snapshot.csv", grid, rr.state);
      }
      return 0;
    }

    if (conv_cmd->parsed()) {
      RateReport rep;
      bool pass = true;
      if (conv_regime == "supersonic") {
        rep = converge_supersonic(cfg);
        pass = rep.slope_L2_n.slope >= 0.35 && rep.slope_L2_n.slope <= 0.65 &&
               rep.slope_Linf_corrected.slope > 0.0;
      } else if (conv_regime == "intermediate") {
        // Intermediate defaults unless the config already set them.
        if (config_path.empty()) {
          cfg.params.w_ref = -1.25;
          cfg.params.phi_c = 0.0;
          cfg.bump = BumpSpec{-0.05, 0.3, 0.08};
        }
        rep = converge_intermediate(cfg);
        pass = rep.slope_L2_n.slope >= 0.8 && rep.slope_L2_n.slope <= 1.2 &&
               rep.slope_Linf_corrected.slope > 0.5;
      } else {
        throw ConfigError("converge: unknown regime " + conv_regime);
      }
      write_rates_csv(out + "rates.csv", rep);
      write_text_file(out + "report.json", rate_report_json(rep).dump(2) + "\n");
      if (conv_check && !pass) return 4;
      return 0;
    }

    if (stab_cmd->parsed()) {
      const TraceState trace{s_n, s_u3, s_Ti, s_ef};
      write_text_file(out + "stability.json", stability_report(trace, s_mu).dump(2) + "\n");
      return 0;
    }

    if (class_cmd->parsed()) {
      if (class_json)
        write_text_file(out + "classification.json", classify_report().dump(2) + "\n");
      else
        std::cout << classify_report_text();
      return 0;
    }

    if (res_cmd->parsed()) {
      const ResidualLadderReport rep = residual_ladder(cfg);
      write_text_file(out + "residual.json", residual_ladder_json(rep).dump(2) + "\n");
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace sheathlab
