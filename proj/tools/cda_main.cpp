#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cda/cavity.hpp"
#include "cda/config.hpp"
#include "cda/verify.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

cda::SolverOptions solver_options(const cda::RunConfig& cfg) {
  cda::SolverOptions s;
  s.backend = cfg.solver_backend == "gmres" ? cda::SolverOptions::Backend::gmres
                                            : cda::SolverOptions::Backend::lu;
  s.tol = cfg.solver_tol;
  return s;
}

cda::StudyOptions study_options(const cda::RunConfig& cfg) {
  cda::StudyOptions opts;
  opts.pair = cfg.pair == "scott_vogelius" ? cda::MixedPair::scott_vogelius
                                           : cda::MixedPair::taylor_hood;
  opts.solver = solver_options(cfg);
  return opts;
}

std::filesystem::path prepare_out(const cda::RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  cda::write_manifest(cfg, (dir / "manifest.cfg").string(), kVersion);
  return dir;
}

int run_convergence(const cda::RunConfig& cfg, bool check) {
  const auto dir = prepare_out(cfg);
  std::vector<double> h_list;
  for (int i = 0; i < cfg.h_levels; ++i) h_list.push_back(cfg.h_max / (1 << i));
  cda::StudyOptions opts = study_options(cfg);
  if (cfg.H > 0) {
    // fixed H across the sweep: express as a per-h ratio at the coarsest level
    opts.H_over_h = cfg.H / h_list.front();
    std::fprintf(stderr, "note: fixed H=%g applies relative to the coarsest mesh\n", cfg.H);
  }
  const auto table = cda::convergence_study(h_list, cfg.effective_dt(), cfg.mu1, cfg.mu2,
                                            cfg.mu3, cfg.t_final, opts);
  cda::write_rate_csv(table, (dir / "rates.csv").string());
  std::printf("wrote %s (%zu rows)\n", (dir / "rates.csv").c_str(), table.rows.size());

  if (!table.complete) {
    std::fprintf(stderr, "convergence: a run diverged; table is partial\n");
    return 1;
  }
  if (check) {
    bool ok = true;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
      const auto& r = table.rows[i];
      if (r.h > 0.25 + 1e-12) continue;  // pre-asymptotic rows are informational
      for (double rate : {r.rate_u, r.rate_T, r.rate_S})
        if (!(rate >= 2.6 && rate <= 3.4)) {
          std::fprintf(stderr, "check failed: rate %.3f at h=%g outside [2.6, 3.4]\n",
                       rate, r.h);
          ok = false;
        }
    }
    std::printf("convergence check: %s\n", ok ? "pass" : "FAIL");
    if (!ok) return 1;
  }
  return 0;
}

int run_decay(const cda::RunConfig& cfg, bool check) {
  const auto dir = prepare_out(cfg);
  cda::StudyOptions opts = study_options(cfg);
  if (cfg.H > 0) opts.H_over_h = cfg.H / cfg.decay_h;
  const auto curves = cda::decay_study(cfg.decay_h, cfg.effective_dt(), cfg.decay_mu,
                                       cfg.t_final, opts);
  cda::write_decay_csv(curves, (dir / "decay.csv").string());
  std::printf("wrote %s (%zu curves)\n", (dir / "decay.csv").c_str(), curves.size());
  for (const auto& c : curves)
    std::printf("mu=(%g,%g,%g): lambda_u=%.4g lambda_T=%.4g lambda_S=%.4g\n", c.mu1,
                c.mu2, c.mu3, c.lambda_u, c.lambda_T, c.lambda_S);

  if (check) {
    bool ok = true;
    double prev_lambda = -1.0;
    for (const auto& c : curves) {
      for (const auto* e : {&c.err_u, &c.err_T, &c.err_S})
        if (!cda::decays_monotonically(c.time, *e)) {
          std::fprintf(stderr, "check failed: mu=%g curve not eventually monotone\n", c.mu1);
          ok = false;
        }
      if (c.lambda_u < prev_lambda) {
        std::fprintf(stderr, "check failed: lambda_u decreased at mu=%g\n", c.mu1);
        ok = false;
      }
      prev_lambda = c.lambda_u;
    }
    std::printf("decay check: %s\n", ok ? "pass" : "FAIL");
    if (!ok) return 1;
  }
  return 0;
}

int run_cavity(const cda::RunConfig& cfg, bool check) {
  const auto dir = prepare_out(cfg);
  cda::CavityConfig cc;
  cc.Pr = cfg.cavity_Pr;
  cc.Ra = cfg.cavity_Ra;
  cc.Le = cfg.cavity_Le;
  cc.N = cfg.cavity_N;
  cc.dt = cfg.effective_dt();
  cc.steps_per_phase = cfg.cavity_steps;
  cc.n = cfg.cavity_n;
  cc.H = cfg.H > 0 ? cfg.H : 4.0 / cfg.cavity_n;
  cc.inv_Da = cfg.cavity_inv_Da;
  cc.wall_left_T = cfg.cavity_wall_left_T;
  cc.wall_right_T = cfg.cavity_wall_right_T;
  cc.wall_left_S = cfg.cavity_wall_left_S;
  cc.wall_right_S = cfg.cavity_wall_right_S;
  cc.solver = solver_options(cfg);

  cda::CavityProblem prob(cc);
  std::printf("cavity DNS: 2 x %d steps at dt=%g\n", cc.steps_per_phase, cc.dt);
  const auto dns = cda::run_dns(prob);
  cda::save_stream(dns.stream, (dir / "observations.bin").string());
  cda::write_trajectory_csv(dns.trajectory, (dir / "dns_trajectory.csv").string());
  cda::export_fields(dns.final_state, prob.velocity_space(), prob.scalar_space(),
                     (dir / "dns_final.vtk").string());

  std::printf("twin run: mu=(%g,%g,%g)\n", cfg.mu1, cfg.mu2, cfg.mu3);
  const auto twin =
      cda::run_twin(prob, cfg.mu1, cfg.mu2, cfg.mu3, dns.stream, dns.phase1_end);
  cda::write_twin_csv(twin, (dir / "twin.csv").string());
  cda::export_fields(twin.cda_final, prob.velocity_space(), prob.scalar_space(),
                     (dir / "cda_final.vtk").string());

  if (check) {
    bool ok = true;
    const std::vector<std::pair<const char*, const std::vector<double>*>> curves = {
        {"u", &twin.diff_u}, {"T", &twin.diff_T}, {"S", &twin.diff_S}};
    for (const auto& [name, d] : curves) {
      const double drop = d->back() / d->front();
      std::printf("diff_%s: %.3e -> %.3e (x%.1e)\n", name, d->front(), d->back(), drop);
      if (!(drop <= 1e-2)) {
        std::fprintf(stderr, "check failed: diff_%s dropped only %.2e\n", name, drop);
        ok = false;
      }
    }
    std::printf("cavity check: %s\n", ok ? "pass" : "FAIL");
    if (!ok) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous data assimilation experiments for double-diffusive convection"};
  app.require_subcommand(1);

  std::string config_path, out_dir, solver;
  double mu1 = 0, mu2 = 0, mu3 = 0, H = 0, dt = 0, hmax = 0;
  bool check = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file");
    sub->add_flag("--check", check, "validate results and set the exit code");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--mu1", mu1, "velocity nudging parameter");
    sub->add_option("--mu2", mu2, "temperature nudging parameter");
    sub->add_option("--mu3", mu3, "concentration nudging parameter");
    sub->add_option("--H", H, "observation cell size");
    sub->add_option("--dt", dt, "time step");
    sub->add_option("--hmax", hmax, "coarsest mesh size");
    sub->add_option("--solver", solver, "linear solver backend (lu or gmres)")
        ->check(CLI::IsMember({"lu", "gmres"}));
    return sub;
  };

  auto* conv = add_common(app.add_subcommand("convergence", "spatial convergence table"));
  auto* decay = add_common(app.add_subcommand("decay", "error decay for a range of mu"));
  auto* cavity = add_common(app.add_subcommand("cavity", "DNS plus nudged twin cavity run"));

  CLI11_PARSE(app, argc, argv);

  try {
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) kv = cda::read_config_file(config_path);
    cda::RunConfig cfg = cda::parse_config(kv);

    CLI::App* sub = app.get_subcommands().front();
    cfg.experiment = sub->get_name();
    if (sub->count("--out")) cfg.out_dir = out_dir;
    if (sub->count("--mu1")) cfg.mu1 = mu1;
    if (sub->count("--mu2")) cfg.mu2 = mu2;
    if (sub->count("--mu3")) cfg.mu3 = mu3;
    if (sub->count("--H")) cfg.H = H;
    if (sub->count("--dt")) {
      cfg.dt = dt;
      cfg.dt_set = true;
    }
    if (sub->count("--hmax")) {
      cfg.h_max = hmax;
      cfg.decay_h = hmax;
    }
    if (sub->count("--solver")) cfg.solver_backend = solver;
    cda::validate_config(cfg);

    if (sub == conv) return run_convergence(cfg, check);
    if (sub == decay) return run_decay(cfg, check);
    if (sub == cavity) return run_cavity(cfg, check);
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
