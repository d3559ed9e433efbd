// Command-line front end: simulate / gen-data / train / evaluate / calibrate /
// compare over the named scenario presets.  Exit codes: 0 success, 2 usage,
// 3 numerical failure, 4 I/O.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>

#include <CLI11.hpp>

#include "arzlab/calibration.hpp"
#include "arzlab/controllers.hpp"
#include "arzlab/dataset.hpp"
#include "arzlab/metrics.hpp"
#include "arzlab/operator_controllers.hpp"
#include "arzlab/presets.hpp"
#include "arzlab/svg.hpp"

namespace fs = std::filesystem;
using namespace arzlab;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct ControllerBundle {
  std::unique_ptr<Controller> ctl;
  double setup_seconds = 0;  // one-off kernel solve / model load + inference
};

ControllerBundle make_controller(const std::string& name, const Scenario& sc,
                                 const std::string& model_path) {
  ControllerBundle b;
  const double t0 = now_seconds();
  const auto& cfg = sc.cfg;
  if (name == "open_loop") {
    b.ctl = std::make_unique<OpenLoopController>();
  } else if (name == "pi") {
    b.ctl = std::make_unique<PIController>();
  } else if (name == "backstepping" || name == "backstepping_transformed") {
    const KernelField kf =
        solve_kernels(cfg.eq, cfg.tau, cfg.grid.length, 101);
    const auto assembly = name == "backstepping"
                              ? BacksteppingAssembly::Original
                              : BacksteppingAssembly::Transformed;
    b.ctl = std::make_unique<BacksteppingController>(kf, cfg.eq, assembly, name);
  } else if (name == "no_kernel" || name == "pino_kernel") {
    if (model_path.empty()) throw DomainError(name + " needs --model");
    const DeepOperatorModel m = load_model(model_path);
    b.ctl = std::make_unique<NoKernelController>(m, cfg.eq, cfg.tau,
                                                 cfg.grid.length, 101,
                                                 BacksteppingAssembly::Original,
                                                 name);
  } else if (name == "pinn_kernel") {
    if (model_path.empty()) throw DomainError(name + " needs --model");
    const PinnModel m = load_pinn_model(model_path);
    b.ctl = std::make_unique<PinnKernelController>(m, cfg.eq, cfg.tau,
                                                   cfg.grid.length, 101);
  } else if (name == "no_control_law") {
    if (model_path.empty()) throw DomainError(name + " needs --model");
    b.ctl = std::make_unique<NoControlLawController>(load_model(model_path));
  } else {
    throw DomainError("unknown controller '" + name + "'");
  }
  b.setup_seconds = now_seconds() - t0;
  return b;
}

EvaluationReport evaluate_run(const std::string& name, const Scenario& sc,
                              const ControllerBundle& b,
                              const ScenarioResult& res,
                              const ScenarioResult* baseline) {
  EvaluationReport rep;
  rep.controller = name;
  const auto dev = deviation_series(res);
  rep.initial_deviation = dev.front();
  rep.final_deviation = dev.back();
  rep.decay = decay_fit(res.t, dev);
  rep.indices = performance_indices(res);
  if (baseline) rep.errors = state_errors(res, *baseline);
  rep.setup_seconds = b.setup_seconds;
  rep.wall_seconds = res.wall_time;
  const TrafficState ic = sc.initial();
  rep.eval_seconds = timing_bench(*b.ctl, ic, sc.cfg.eq);
  return rep;
}

void echo_config(const CLI::App& app, const std::string& out_dir) {
  std::FILE* f = fs::exists(out_dir)
                     ? std::fopen((fs::path(out_dir) / "config.txt").c_str(), "wb")
                     : nullptr;
  if (!f) return;
  const std::string cfg = app.config_to_str(true, false);
  std::fwrite(cfg.data(), 1, cfg.size(), f);
  std::fclose(f);
}

void write_loss_curves(const std::string& path, const TrainReport& rep) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write " + path);
  std::fprintf(f, "epoch,train_loss,test_loss,physics_loss\n");
  for (size_t e = 0; e < rep.train_loss.size(); ++e) {
    std::fprintf(f, "%zu,%.17g,%.17g,%.17g\n", e + 1, rep.train_loss[e],
                 rep.test_loss[e],
                 e < rep.physics_loss.size() ? rep.physics_loss[e] : 0.0);
  }
  std::fclose(f);
}

void print_warnings(const ScenarioResult& res) {
  for (const auto& w : res.warnings) {
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary-stabilization laboratory for congested freeway traffic"};
  app.set_config("--config", "", "key=value config file; flags override it");
  app.require_subcommand(1);

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "closed-loop run of one preset");
  std::string sim_preset = "paper_4_1", sim_ctl = "backstepping";
  std::string sim_model, sim_out = "out";
  int sim_cells = 3200;
  double sim_horizon = -1;
  bool sim_svg = false;
  sim->add_option("--preset", sim_preset, "scenario preset")->capture_default_str();
  sim->add_option("--controller", sim_ctl,
                  "open_loop|backstepping|backstepping_transformed|pi|no_kernel|"
                  "pino_kernel|pinn_kernel|no_control_law")
      ->capture_default_str();
  sim->add_option("--model", sim_model, "trained model file for learned controllers");
  sim->add_option("--out", sim_out, "output directory")->capture_default_str();
  sim->add_option("--n-cells", sim_cells, "simulation cells")->capture_default_str();
  sim->add_option("--horizon", sim_horizon, "override horizon [s]");
  sim->add_flag("--svg", sim_svg, "emit rho/v heatmaps");

  // ---- gen-data ----
  auto* gen = app.add_subcommand("gen-data", "generate a training corpus");
  std::string gen_kind = "kernel", gen_preset = "paper_4_1", gen_out = "data";
  int gen_n = 1000, gen_grid = 101, gen_cells = 400, gen_jobs = 1;
  double gen_rho_lo = 90, gen_rho_hi = 130;
  uint64_t gen_seed = 1;
  bool gen_uniform_l2 = false;
  gen->add_option("--kind", gen_kind, "kernel|control")->capture_default_str();
  gen->add_option("--preset", gen_preset, "diagram family source preset")
      ->capture_default_str();
  gen->add_option("--n", gen_n, "samples to draw")->capture_default_str();
  gen->add_option("--out", gen_out, "output directory")->capture_default_str();
  gen->add_option("--seed", gen_seed, "sampling seed")->capture_default_str();
  gen->add_option("--grid-n", gen_grid, "kernel nodes per edge")->capture_default_str();
  gen->add_option("--n-cells", gen_cells, "simulation cells (control kind)")
      ->capture_default_str();
  gen->add_option("--rho-lo", gen_rho_lo, "rho* lower bound [veh/km]")
      ->capture_default_str();
  gen->add_option("--rho-hi", gen_rho_hi, "rho* upper bound [veh/km]")
      ->capture_default_str();
  gen->add_flag("--uniform-lambda2", gen_uniform_l2,
                "sample the wave speed uniformly instead of rho*");
  gen->add_option("--jobs", gen_jobs, "worker threads")->capture_default_str();

  // ---- train ----
  auto* trn = app.add_subcommand("train", "fit an operator or surrogate model");
  std::string trn_kind = "no", trn_data, trn_out = "model.bin";
  std::string trn_preset = "paper_4_1";
  int trn_epochs = 1000, trn_batch = 20;
  double trn_lr = 1e-4, trn_lambda2 = 72.0;
  uint64_t trn_seed = 1;
  trn->add_option("--kind", trn_kind, "no|pino|pinn|control_law")->capture_default_str();
  trn->add_option("--data", trn_data, "dataset manifest.jsonl")->required();
  trn->add_option("--out", trn_out, "model output file")->capture_default_str();
  trn->add_option("--preset", trn_preset, "physics family source preset")
      ->capture_default_str();
  trn->add_option("--epochs", trn_epochs)->capture_default_str();
  trn->add_option("--batch", trn_batch)->capture_default_str();
  trn->add_option("--lr", trn_lr)->capture_default_str();
  trn->add_option("--seed", trn_seed)->capture_default_str();
  trn->add_option("--lambda2", trn_lambda2,
                  "training instance wave speed [km/h] (pinn kind)")
      ->capture_default_str();

  // ---- evaluate ----
  auto* ev = app.add_subcommand("evaluate",
                                "run one controller against the exact-kernel baseline");
  std::string ev_preset = "paper_4_1", ev_ctl = "no_kernel", ev_model, ev_out = "out";
  int ev_cells = 3200;
  ev->add_option("--preset", ev_preset)->capture_default_str();
  ev->add_option("--controller", ev_ctl)->capture_default_str();
  ev->add_option("--model", ev_model, "trained model file");
  ev->add_option("--out", ev_out, "output directory")->capture_default_str();
  ev->add_option("--n-cells", ev_cells)->capture_default_str();

  // ---- calibrate ----
  auto* cal = app.add_subcommand("calibrate", "fit the three-parameter diagram");
  std::string cal_data, cal_out = "calibrated_fd.txt";
  double cal_rho_m = 0, cal_lanes = 6, cal_veh_len = 5, cal_safety = 1.5;
  cal->add_option("--data", cal_data, "aggregated grid CSV")->required();
  cal->add_option("--out", cal_out, "config snippet output")->capture_default_str();
  cal->add_option("--rho-max", cal_rho_m, "max density [veh/km]; 0 = from geometry")
      ->capture_default_str();
  cal->add_option("--lanes", cal_lanes)->capture_default_str();
  cal->add_option("--vehicle-length", cal_veh_len, "[m]")->capture_default_str();
  cal->add_option("--safety", cal_safety, "safety factor")->capture_default_str();

  // ---- compare ----
  auto* cmp = app.add_subcommand("compare",
                                 "all configured controllers on one preset");
  std::string cmp_preset = "paper_4_1", cmp_out = "out";
  std::string cmp_no, cmp_pino, cmp_pinn, cmp_ulaw;
  int cmp_cells = 3200;
  cmp->add_option("--preset", cmp_preset)->capture_default_str();
  cmp->add_option("--out", cmp_out, "output directory")->capture_default_str();
  cmp->add_option("--model-no", cmp_no, "kernel operator model");
  cmp->add_option("--model-pino", cmp_pino, "physics-trained operator model");
  cmp->add_option("--model-pinn", cmp_pinn, "single-instance kernel model");
  cmp->add_option("--model-ulaw", cmp_ulaw, "control-trajectory operator model");
  cmp->add_option("--n-cells", cmp_cells)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sim)) {
      Scenario sc = make_preset(sim_preset, sim_cells);
      if (sim_horizon > 0) sc.cfg.horizon = sim_horizon;
      fs::create_directories(sim_out);
      echo_config(app, sim_out);
      ControllerBundle b = make_controller(sim_ctl, sc, sim_model);
      const ScenarioResult res = run_closed_loop(sc.initial(), sc.cfg, *b.ctl);
      print_warnings(res);
      res.write_csv((fs::path(sim_out) / "trajectory.csv").string());
      write_reports_csv((fs::path(sim_out) / "report.csv").string(),
                        {evaluate_run(sim_ctl, sc, b, res, nullptr)});
      if (sim_svg) {
        write_heatmap_svg((fs::path(sim_out) / "rho.svg").string(), res, "rho");
        write_heatmap_svg((fs::path(sim_out) / "v.svg").string(), res, "v");
      }
      const auto dev = deviation_series(res);
      std::printf("%s on %s: deviation %.4g -> %.4g (ratio %.3g), %d steps, %.2f s\n",
                  sim_ctl.c_str(), sim_preset.c_str(), dev.front(), dev.back(),
                  dev.back() / dev.front(), res.n_steps, res.wall_time);
    } else if (app.got_subcommand(gen)) {
      const Scenario sc = make_preset(gen_preset, 100);
      if (gen_kind == "kernel") {
        KernelGenConfig c;
        c.n_samples = gen_n;
        c.rho_lo = gen_rho_lo / 1000.0;
        c.rho_hi = gen_rho_hi / 1000.0;
        c.grid_n = gen_grid;
        c.length = sc.cfg.grid.length;
        c.tau = sc.cfg.tau;
        c.uniform_lambda2 = gen_uniform_l2;
        c.seed = gen_seed;
        c.jobs = gen_jobs;
        const DatasetManifest m = gen_kernel_dataset(*sc.cfg.fd, c, gen_out);
        std::printf("kernel corpus: %zu samples (%d train / %d test) in %s\n",
                    m.samples.size(), m.n_train(), m.n_test(), gen_out.c_str());
      } else if (gen_kind == "control") {
        ControlGenConfig c;
        c.n_samples = gen_n;
        c.rho_lo = gen_rho_lo / 1000.0;
        c.rho_hi = gen_rho_hi / 1000.0;
        c.grid_n = gen_grid;
        c.n_cells = gen_cells;
        c.length = sc.cfg.grid.length;
        c.horizon = sc.cfg.horizon;
        c.tau = sc.cfg.tau;
        c.ic = sc.ic;
        c.seed = gen_seed;
        c.jobs = gen_jobs;
        const DatasetManifest m = gen_control_dataset(*sc.cfg.fd, c, gen_out);
        std::printf("control corpus: %zu samples (%d train / %d test) in %s\n",
                    m.samples.size(), m.n_train(), m.n_test(), gen_out.c_str());
      } else {
        throw DomainError("unknown data kind '" + gen_kind + "'");
      }
    } else if (app.got_subcommand(trn)) {
      const DatasetManifest man = DatasetManifest::read(trn_data);
      TrainConfig cfg;
      cfg.epochs = trn_epochs;
      cfg.batch = trn_batch;
      cfg.lr = trn_lr;
      cfg.seed = trn_seed;
      const Scenario sc = make_preset(trn_preset, 100);
      TrainReport rep;
      if (trn_kind == "control_law") {
        const OperatorDataset ds = load_control_dataset(man);
        save_model(train_control_law(ds, cfg, &rep), trn_out);
      } else if (trn_kind == "no") {
        const OperatorDataset ds = load_kernel_dataset(man);
        save_model(train_no(ds, cfg, &rep), trn_out);
      } else {
        const auto* gfd = dynamic_cast<const GreenshieldsFD*>(sc.cfg.fd.get());
        if (!gfd || gfd->gamma() != 1.0) {
          throw DomainError(
              "physics-aware training needs the linear-speed diagram family");
        }
        const PhysicsSpec phys = greenshields_family_physics(
            gfd->v_free(), gfd->rho_max(), sc.cfg.tau, sc.cfg.grid.length);
        if (trn_kind == "pino") {
          const OperatorDataset ds = load_kernel_dataset(man);
          save_model(train_pino(ds, phys, cfg, &rep), trn_out);
        } else if (trn_kind == "pinn") {
          OperatorDataset ds = load_kernel_dataset(man);
          // keep only the sample closest to the requested wave speed
          const double target = trn_lambda2 / 3.6;
          int best = 0;
          for (size_t i = 1; i < ds.u.size(); ++i) {
            if (std::abs(ds.u[i] - target) < std::abs(ds.u[best] - target)) {
              best = static_cast<int>(i);
            }
          }
          OperatorDataset one;
          one.Y = ds.Y;
          one.u = {ds.u[best]};
          one.targets = {ds.targets[best]};
          one.train_idx = {0};
          save_model(train_pinn(one, phys, cfg, &rep), trn_out);
        } else {
          throw DomainError("unknown training kind '" + trn_kind + "'");
        }
      }
      write_loss_curves(trn_out + ".losses.csv", rep);
      std::printf("%s model -> %s (final test loss %.6g)\n", trn_kind.c_str(),
                  trn_out.c_str(), rep.final_test);
    } else if (app.got_subcommand(ev)) {
      const Scenario sc = make_preset(ev_preset, ev_cells);
      fs::create_directories(ev_out);
      echo_config(app, ev_out);
      ControllerBundle base = make_controller("backstepping", sc, "");
      const ScenarioResult res_base = run_closed_loop(sc.initial(), sc.cfg, *base.ctl);
      ControllerBundle b = make_controller(ev_ctl, sc, ev_model);
      const ScenarioResult res = run_closed_loop(sc.initial(), sc.cfg, *b.ctl);
      print_warnings(res);
      std::vector<EvaluationReport> rows;
      rows.push_back(evaluate_run("backstepping", sc, base, res_base, nullptr));
      rows.push_back(evaluate_run(ev_ctl, sc, b, res, &res_base));
      write_reports_csv((fs::path(ev_out) / "report.csv").string(), rows);
      std::printf("%s vs backstepping on %s: mse_rho %.4g, mse_v %.4g\n",
                  ev_ctl.c_str(), ev_preset.c_str(), rows[1].errors.mse_rho,
                  rows[1].errors.mse_v);
    } else if (app.got_subcommand(cal)) {
      const double rho_m = cal_rho_m > 0
                               ? cal_rho_m / 1000.0
                               : rho_max_from_geometry(cal_lanes, cal_veh_len,
                                                       cal_safety);
      const AggregatedGrid grid = ingest_grid_csv(cal_data, rho_m);
      const FitResult fit = fit_three_param(grid, rho_m);
      std::FILE* f = std::fopen(cal_out.c_str(), "wb");
      if (!f) throw IoError("cannot write " + cal_out);
      std::fprintf(f,
                   "fd=three_param\nzeta_veh_h=%.10g\nkappa=%.10g\np=%.10g\n"
                   "rho_max_veh_km=%.10g\nfit_rmse_veh_h=%.6g\n",
                   fit.zeta * 3600.0, fit.kappa, fit.p, rho_m * 1000.0,
                   fit.rmse * 3600.0);
      std::fclose(f);
      std::printf("calibrated: zeta=%.4f veh/h kappa=%.4f p=%.4f (rmse %.3g veh/h)\n",
                  fit.zeta * 3600.0, fit.kappa, fit.p, fit.rmse * 3600.0);
    } else if (app.got_subcommand(cmp)) {
      const Scenario sc = make_preset(cmp_preset, cmp_cells);
      fs::create_directories(cmp_out);
      echo_config(app, cmp_out);
      std::vector<std::pair<std::string, std::string>> plan{
          {"backstepping", ""}, {"open_loop", ""}, {"pi", ""}};
      if (!cmp_no.empty()) plan.emplace_back("no_kernel", cmp_no);
      if (!cmp_pino.empty()) plan.emplace_back("pino_kernel", cmp_pino);
      if (!cmp_pinn.empty()) plan.emplace_back("pinn_kernel", cmp_pinn);
      if (!cmp_ulaw.empty()) plan.emplace_back("no_control_law", cmp_ulaw);

      std::vector<EvaluationReport> rows;
      ScenarioResult baseline;
      double base_cost = 0;
      for (const auto& [name, model] : plan) {
        // one bad model must not sink the whole comparison table
        ControllerBundle b;
        try {
          b = make_controller(name, sc, model);
        } catch (const std::runtime_error& e) {
          std::fprintf(stderr, "%s: skipped (%s)\n", name.c_str(), e.what());
          continue;
        }
        const ScenarioResult res = run_closed_loop(sc.initial(), sc.cfg, *b.ctl);
        print_warnings(res);
        if (name == "backstepping") baseline = res;
        rows.push_back(evaluate_run(name, sc, b,  res,
                                    name == "backstepping" || baseline.t.empty()
                                        ? nullptr
                                        : &baseline));
        const auto& r = rows.back();
        const double amortized =
            r.eval_seconds + r.setup_seconds / std::max(1, res.n_steps);
        if (name == "backstepping") base_cost = amortized;
        std::printf("%-16s mse_rho %.4g  mse_v %.4g  cost/eval %.3g s (%.3gx)\n",
                    name.c_str(), r.errors.mse_rho, r.errors.mse_v, amortized,
                    base_cost > 0 ? base_cost / amortized : 0.0);
      }
      write_reports_csv((fs::path(cmp_out) / "compare.csv").string(), rows);
    }
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const ModelError& e) {
    std::fprintf(stderr, "model error: %s\n", e.what());
    return 3;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 4;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const RegimeError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
