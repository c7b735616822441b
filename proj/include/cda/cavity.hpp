#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cda/assemble.hpp"
#include "cda/observe.hpp"
#include "cda/stepper.hpp"
#include "cda/vtk.hpp"

namespace cda {

// Double-diffusive cavity: [0,1]x[0,2], no-slip walls, hot/salty left wall,
// cold/fresh right wall, insulated top and bottom.
struct CavityConfig {
  double Pr = 1.0;
  double Ra = 1e3;
  double Le = 2.0;
  double N = 0.8;  // buoyancy ratio
  double dt = 0.02;
  int steps_per_phase = 4000;
  int n = 16;          // mesh cells per unit length
  double H = 0.25;     // observation cell size
  double inv_Da = 0.0;
  double wall_left_T = 1.0, wall_right_T = 0.0;
  double wall_left_S = 1.0, wall_right_S = 0.0;
  SolverOptions solver;

  void validate() const {
    if (!(Pr > 0) || !(Ra > 0) || !(Le > 0))
      throw std::invalid_argument("CavityConfig: Pr, Ra, Le must be positive");
    if (!(dt > 0) || steps_per_phase < 0 || n < 1 || !(H > 0))
      throw std::invalid_argument("CavityConfig: invalid discretization settings");
    if (inv_Da < 0) throw std::invalid_argument("CavityConfig: inv_Da must be nonnegative");
  }
};

// Unit length/diffusivity scaling of the Boussinesq system: nu = Pr, kappa = 1,
// Dc = 1/Le, buoyancy Ra*Pr*(T + N*S) pointing upward.
inline PhysicalParams map_nondimensional(const CavityConfig& cfg) {
  cfg.validate();
  PhysicalParams p;
  p.nu = cfg.Pr;
  p.kappa = 1.0;
  p.Dc = 1.0 / cfg.Le;
  p.beta_T = cfg.Ra * cfg.Pr;
  p.beta_C = cfg.N * cfg.Ra * cfg.Pr;
  p.gravity = Vec2(0.0, 1.0);
  p.inv_Da = cfg.inv_Da;
  return p;
}

// Mesh, spaces, and observation operators for one cavity configuration; all
// runs of a twin experiment share this fixed geometry.
class CavityProblem {
 public:
  explicit CavityProblem(const CavityConfig& cfg)
      : cfg_(cfg),
        mesh_(build_structured({0.0, 0.0, 1.0, 2.0}, cfg.n)),
        vel_(build_space(mesh_, 2, 2)),
        pres_(build_space(mesh_, 1, 1)),
        scal_(build_space(mesh_, 2, 1)),
        obs_u_(build_observation_operator(vel_, cfg.H)),
        obs_s_(build_observation_operator(scal_, cfg.H)) {}

  CavityProblem(const CavityProblem&) = delete;
  CavityProblem& operator=(const CavityProblem&) = delete;

  const CavityConfig& config() const { return cfg_; }
  const TriMesh& mesh() const { return mesh_; }
  const FESpace& velocity_space() const { return vel_; }
  const FESpace& pressure_space() const { return pres_; }
  const FESpace& scalar_space() const { return scal_; }
  const ObservationOperator& obs_u() const { return obs_u_; }
  const ObservationOperator& obs_s() const { return obs_s_; }

  BoundaryConditions boundary() const {
    BoundaryConditions bc;
    bc.velocity_tags = {kLeft, kRight, kBottom, kTop};
    bc.temperature_tags = {kLeft, kRight};
    bc.concentration_tags = {kLeft, kRight};
    const double TL = cfg_.wall_left_T, TR = cfg_.wall_right_T;
    const double SL = cfg_.wall_left_S, SR = cfg_.wall_right_S;
    bc.temperature = [TL, TR](const Vec2& x, double) { return x.x() < 0.5 ? TL : TR; };
    bc.concentration = [SL, SR](const Vec2& x, double) { return x.x() < 0.5 ? SL : SR; };
    return bc;
  }

  CdaStepper make_stepper(double mu1, double mu2, double mu3) const {
    StepperConfig sc;
    sc.dt = cfg_.dt;
    sc.mu1 = mu1;
    sc.mu2 = mu2;
    sc.mu3 = mu3;
    sc.params = map_nondimensional(cfg_);
    sc.solver = cfg_.solver;
    return CdaStepper(vel_, pres_, scal_, &obs_u_, &obs_s_, sc, boundary(), Forcing{});
  }

 private:
  CavityConfig cfg_;
  TriMesh mesh_;
  FESpace vel_, pres_, scal_;
  ObservationOperator obs_u_, obs_s_;
};

struct DnsResult {
  State phase1_end;   // spun-up state the twin window starts from
  State final_state;  // end of the observed window
  ObservationStream stream;
  TrajectorySummary trajectory;
};

// Two phases of steps_per_phase each, from zero initial data, mu = 0. The
// second phase records the coarse projections of every step into the stream.
inline DnsResult run_dns(const CavityProblem& prob) {
  const CavityConfig& cfg = prob.config();
  CdaStepper stepper = prob.make_stepper(0.0, 0.0, 0.0);

  DnsResult out;
  out.stream.H = cfg.H;
  out.stream.dt = cfg.dt;
  out.stream.grid = prob.obs_u().grid;

  State s = zero_state(prob.velocity_space(), prob.pressure_space(), prob.scalar_space());
  out.trajectory = stepper.run(s, cfg.steps_per_phase, ObservationSource{});
  out.phase1_end = s;

  out.stream.levels.reserve(cfg.steps_per_phase);
  auto recorder = [&](int, const State& state) {
    CoarseData d;
    d.u = observe(prob.obs_u(), state.u);
    d.T = observe(prob.obs_s(), state.T);
    d.S = observe(prob.obs_s(), state.S);
    out.stream.levels.push_back(std::move(d));
  };
  TrajectorySummary phase2 = stepper.run(s, cfg.steps_per_phase, ObservationSource{},
                                         nullptr, recorder);
  // splice, dropping phase 2's duplicate of the phase-1 endpoint
  for (std::size_t i = 1; i < phase2.records.size(); ++i) {
    phase2.records[i].step += cfg.steps_per_phase;
    out.trajectory.records.push_back(phase2.records[i]);
  }
  out.final_state = s;
  return out;
}

struct TwinRunResult {
  double mu1 = 0, mu2 = 0, mu3 = 0;
  std::vector<double> time;
  std::vector<double> diff_u, diff_T, diff_S;  // L2 distance to DNS per step
  State cda_final, dns_final;
};

// CDA twin nudged by the DNS stream, run in lockstep with a mu = 0 replay of
// the DNS (deterministic, so the replay reproduces the recorded phase) to
// measure fine-grid differences without storing the DNS trajectory.
inline TwinRunResult run_twin(const CavityProblem& prob, double mu1, double mu2, double mu3,
                              const ObservationStream& stream, const State& dns_start) {
  const CavityConfig& cfg = prob.config();
  if (stream.n_levels() < cfg.steps_per_phase)
    throw std::invalid_argument("run_twin: stream does not cover the twin window");
  if (std::abs(stream.dt - cfg.dt) > 1e-14)
    throw std::invalid_argument("run_twin: stream dt mismatch");

  CdaStepper cda = prob.make_stepper(mu1, mu2, mu3);
  CdaStepper dns = prob.make_stepper(0.0, 0.0, 0.0);
  const SpMat& Mu = cda.velocity_mass();
  const SpMat& Ms = cda.scalar_mass();

  TwinRunResult out;
  out.mu1 = mu1;
  out.mu2 = mu2;
  out.mu3 = mu3;

  State sc = zero_state(prob.velocity_space(), prob.pressure_space(), prob.scalar_space());
  sc.time = dns_start.time;
  State sd = dns_start;

  auto push_diff = [&](const State& a, const State& b) {
    const VecX du = a.u - b.u, dT = a.T - b.T, dS = a.S - b.S;
    out.time.push_back(a.time);
    out.diff_u.push_back(std::sqrt(du.dot(Mu * du)));
    out.diff_T.push_back(std::sqrt(dT.dot(Ms * dT)));
    out.diff_S.push_back(std::sqrt(dS.dot(Ms * dS)));
  };
  push_diff(sc, sd);

  const auto source = stream_source(stream);
  for (int n = 0; n < cfg.steps_per_phase; ++n) {
    const CoarseData obs = source(n, sc.time + cfg.dt);
    sc = cda.advance(sc, obs);
    sd = dns.advance(sd, CoarseData{});
    push_diff(sc, sd);
  }
  out.cda_final = sc;
  out.dns_final = sd;
  return out;
}

inline void write_twin_csv(const TwinRunResult& twin, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_twin_csv: cannot open " + path);
  os << "time,diff_u,diff_T,diff_S\n" << std::setprecision(10);
  for (std::size_t i = 0; i < twin.time.size(); ++i)
    os << twin.time[i] << ',' << twin.diff_u[i] << ',' << twin.diff_T[i] << ','
       << twin.diff_S[i] << '\n';
}

// VTK snapshot: velocity, T, S, and the stream function of the velocity.
inline void export_fields(const State& s, const FESpace& vel, const FESpace& scal,
                          const std::string& path) {
  const VecX psi = stream_function(vel, s.u, scal);
  write_vtk(path, *vel.mesh,
            {vertex_field("velocity", vel, s.u), vertex_field("T", scal, s.T),
             vertex_field("S", scal, s.S), vertex_field("psi", scal, psi)});
}

}  // namespace cda
