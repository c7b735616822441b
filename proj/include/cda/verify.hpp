#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cda/manufactured.hpp"
#include "cda/norms.hpp"
#include "cda/observe.hpp"
#include "cda/stepper.hpp"

namespace cda {

enum class MixedPair { taylor_hood, scott_vogelius };

struct StudyOptions {
  MixedPair pair = MixedPair::taylor_hood;
  double H_over_h = 4.0;  // coarse observation size relative to h
  SolverOptions solver;
};

// The manufactured test problem on the unit square: spaces, observation
// operators, and the stepper ingredients (exact Dirichlet data, closed-form
// forcing, exact reference). Members hold pointers at each other, so the
// object is fixed in place once built.
class ManufacturedProblem {
 public:
  ManufacturedProblem(int n, double H, MixedPair pair = MixedPair::taylor_hood)
      : mesh_(pair == MixedPair::scott_vogelius
                  ? barycentric_refine(build_structured({0.0, 0.0, 1.0, 1.0}, n))
                  : build_structured({0.0, 0.0, 1.0, 1.0}, n)),
        vel_(build_space(mesh_, 2, 2)),
        pres_(pair == MixedPair::scott_vogelius
                  ? build_space(mesh_, 1, 1, Continuity::discontinuous)
                  : build_space(mesh_, 1, 1)),
        scal_(build_space(mesh_, 2, 1)),
        obs_u_(build_observation_operator(vel_, H)),
        obs_s_(build_observation_operator(scal_, H)),
        h_(1.0 / n) {}

  ManufacturedProblem(const ManufacturedProblem&) = delete;
  ManufacturedProblem& operator=(const ManufacturedProblem&) = delete;

  const TriMesh& mesh() const { return mesh_; }
  const FESpace& velocity_space() const { return vel_; }
  const FESpace& pressure_space() const { return pres_; }
  const FESpace& scalar_space() const { return scal_; }
  const ObservationOperator& obs_u() const { return obs_u_; }
  const ObservationOperator& obs_s() const { return obs_s_; }
  const ManufacturedSolution& solution() const { return ms_; }
  double h() const { return h_; }

  BoundaryConditions boundary() const {
    BoundaryConditions bc;
    bc.velocity_tags = {kLeft, kRight, kBottom, kTop};
    bc.temperature_tags = bc.velocity_tags;
    bc.concentration_tags = bc.velocity_tags;
    bc.velocity = [this](const Vec2& x, double t) { return ms_.velocity(x, t); };
    bc.temperature = [this](const Vec2& x, double t) { return ms_.temperature(x, t); };
    bc.concentration = [this](const Vec2& x, double t) { return ms_.concentration(x, t); };
    return bc;
  }

  Forcing forcing() const {
    Forcing f;
    f.F = [this](const Vec2& x, double t) { return ms_.velocity_forcing(x, t); };
    f.G = [this](const Vec2& x, double t) { return ms_.temperature_forcing(x, t); };
    f.Phi = [this](const Vec2& x, double t) { return ms_.concentration_forcing(x, t); };
    return f;
  }

  ExactReference reference() const {
    ExactReference r;
    r.u = [this](const Vec2& x, double t) { return ms_.velocity(x, t); };
    r.T = [this](const Vec2& x, double t) { return ms_.temperature(x, t); };
    r.S = [this](const Vec2& x, double t) { return ms_.concentration(x, t); };
    return r;
  }

  ObservationSource source() const {
    return manufactured_source(
        obs_u_, obs_s_, [this](const Vec2& x, double t) { return ms_.velocity(x, t); },
        [this](const Vec2& x, double t) { return ms_.temperature(x, t); },
        [this](const Vec2& x, double t) { return ms_.concentration(x, t); });
  }

 private:
  TriMesh mesh_;
  FESpace vel_, pres_, scal_;
  ObservationOperator obs_u_, obs_s_;
  ManufacturedSolution ms_;
  double h_;
};

// Runs the manufactured problem from zero initial data and returns the
// trajectory (per-step L2 errors attached).
inline TrajectorySummary run_manufactured(const ManufacturedProblem& prob, double dt,
                                          double mu1, double mu2, double mu3,
                                          double t_final,
                                          const SolverOptions& solver = {}) {
  StepperConfig cfg;
  cfg.dt = dt;
  cfg.mu1 = mu1;
  cfg.mu2 = mu2;
  cfg.mu3 = mu3;
  cfg.params = prob.solution().params;
  cfg.solver = solver;
  CdaStepper stepper(prob.velocity_space(), prob.pressure_space(), prob.scalar_space(),
                     &prob.obs_u(), &prob.obs_s(), cfg, prob.boundary(), prob.forcing());
  const auto ref = prob.reference();
  const int horizon = static_cast<int>(std::llround(t_final / dt));
  State s = zero_state(prob.velocity_space(), prob.pressure_space(), prob.scalar_space());
  return stepper.run(s, horizon, prob.source(), &ref);
}

struct RateRow {
  double h = 0.0;
  double err_u = 0.0, rate_u = 0.0;
  double err_T = 0.0, rate_T = 0.0;
  double err_S = 0.0, rate_S = 0.0;
};

struct RateTable {
  std::vector<RateRow> rows;
  bool complete = true;  // false when a run diverged and the table is partial
};

inline void write_rate_csv(const RateTable& table, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_rate_csv: cannot open " + path);
  os << "h,err_u,rate_u,err_T,rate_T,err_S,rate_S\n" << std::setprecision(10);
  for (const auto& r : table.rows) {
    os << r.h << ',' << r.err_u << ',';
    if (std::isfinite(r.rate_u)) os << r.rate_u;
    os << ',' << r.err_T << ',';
    if (std::isfinite(r.rate_T)) os << r.rate_T;
    os << ',' << r.err_S << ',';
    if (std::isfinite(r.rate_S)) os << r.rate_S;
    os << '\n';
  }
}

// Final-time L2 errors and log2 rates across a halving sequence of mesh sizes.
inline RateTable convergence_study(const std::vector<double>& h_list, double dt,
                                   double mu1, double mu2, double mu3, double t_final,
                                   const StudyOptions& opts = {}) {
  if (h_list.empty()) throw std::invalid_argument("convergence_study: empty h list");
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (std::abs(h_list[i] - 0.5 * h_list[i - 1]) > 1e-12 * h_list[i - 1])
      throw std::invalid_argument("convergence_study: h list must halve");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  RateTable table;
  for (double h : h_list) {
    const int n = static_cast<int>(std::llround(1.0 / h));
    ManufacturedProblem prob(n, opts.H_over_h * h, opts.pair);
    RateRow row;
    row.h = h;
    row.rate_u = row.rate_T = row.rate_S = nan;
    try {
      const auto traj = run_manufactured(prob, dt, mu1, mu2, mu3, t_final, opts.solver);
      const auto& last = traj.records.back();
      row.err_u = last.err_u;
      row.err_T = last.err_T;
      row.err_S = last.err_S;
    } catch (const std::exception&) {
      table.complete = false;
      table.rows.push_back(row);
      break;
    }
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      row.rate_u = std::log2(prev.err_u / row.err_u);
      row.rate_T = std::log2(prev.err_T / row.err_T);
      row.rate_S = std::log2(prev.err_S / row.err_S);
    }
    table.rows.push_back(row);
  }
  return table;
}

// Least-squares exponential rate of e(t) over [t0, t1]. Samples that have
// reached the saturation floor (3x the curve minimum) are excluded; when the
// curve saturates before t0, the fit falls back to the active decay segment.
inline double fit_lambda(const std::vector<double>& time, const std::vector<double>& err,
                         double t0, double t1) {
  if (time.size() != err.size() || time.size() < 2)
    throw std::invalid_argument("fit_lambda: need matching time/error samples");
  double floor = std::numeric_limits<double>::infinity();
  for (double e : err)
    if (e > 0) floor = std::min(floor, e);
  if (!std::isfinite(floor)) return 0.0;
  const double cutoff = 3.0 * floor;

  auto collect = [&](double a, double b) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < time.size(); ++i)
      if (time[i] >= a && time[i] <= b && err[i] > cutoff)
        pts.emplace_back(time[i], std::log(err[i]));
    return pts;
  };

  auto pts = collect(t0, t1);
  if (pts.size() < 5) pts = collect(time.front() + 0.01 * (time.back() - time.front()),
                                    time.back());
  if (pts.size() < 2) return 0.0;

  double st = 0, se = 0, stt = 0, ste = 0;
  for (const auto& [t, le] : pts) {
    st += t;
    se += le;
    stt += t * t;
    ste += t * le;
  }
  const double m = static_cast<double>(pts.size());
  const double denom = m * stt - st * st;
  if (denom == 0) return 0.0;
  return -(m * ste - st * se) / denom;
}

// True when, past `after_frac` of the horizon, the curve is nonincreasing up
// to `slack` until it reaches its saturation floor. Near the floor the error
// tracks the discretization error of the exact solution (which may grow) and
// cancellation dips recover, so excursions below `floor_factor` times the
// global minimum do not count against monotonicity; genuine re-divergence
// climbs far past that band and still fails.
inline bool decays_monotonically(const std::vector<double>& time,
                                 const std::vector<double>& err,
                                 double after_frac = 0.1, double slack = 1.05,
                                 double floor_factor = 5.0) {
  if (time.size() != err.size() || time.empty()) return false;
  double gmin = std::numeric_limits<double>::infinity();
  for (double e : err)
    if (e > 0) gmin = std::min(gmin, e);
  if (!std::isfinite(gmin)) gmin = 0.0;
  const double t_cut = time.front() + after_frac * (time.back() - time.front());
  double run_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < time.size(); ++i) {
    if (time[i] < t_cut) continue;
    if (err[i] > std::max(floor_factor * gmin, slack * run_min + 1e-14)) return false;
    run_min = std::min(run_min, err[i]);
  }
  return true;
}

struct DecayCurve {
  double mu1 = 0, mu2 = 0, mu3 = 0;
  std::vector<double> time;
  std::vector<double> err_u, err_T, err_S;
  double lambda_u = 0, lambda_T = 0, lambda_S = 0;
};

inline DecayCurve decay_from_trajectory(const TrajectorySummary& traj, double mu1,
                                        double mu2, double mu3) {
  DecayCurve c;
  c.mu1 = mu1;
  c.mu2 = mu2;
  c.mu3 = mu3;
  for (const auto& r : traj.records) {
    c.time.push_back(r.time);
    c.err_u.push_back(r.err_u);
    c.err_T.push_back(r.err_T);
    c.err_S.push_back(r.err_S);
  }
  const double t_final = c.time.back();
  c.lambda_u = fit_lambda(c.time, c.err_u, 0.2 * t_final, 0.8 * t_final);
  c.lambda_T = fit_lambda(c.time, c.err_T, 0.2 * t_final, 0.8 * t_final);
  c.lambda_S = fit_lambda(c.time, c.err_S, 0.2 * t_final, 0.8 * t_final);
  return c;
}

// One error-vs-time curve per mu triple (mu, mu, mu), each from zero initial
// data on the same mesh.
inline std::vector<DecayCurve> decay_study(double h, double dt,
                                           const std::vector<double>& mu_list,
                                           double t_final, const StudyOptions& opts = {}) {
  const int n = static_cast<int>(std::llround(1.0 / h));
  ManufacturedProblem prob(n, opts.H_over_h * h, opts.pair);
  std::vector<DecayCurve> curves;
  for (double mu : mu_list) {
    const auto traj = run_manufactured(prob, dt, mu, mu, mu, t_final, opts.solver);
    curves.push_back(decay_from_trajectory(traj, mu, mu, mu));
  }
  return curves;
}

inline void write_decay_csv(const std::vector<DecayCurve>& curves, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_decay_csv: cannot open " + path);
  os << "mu1,mu2,mu3,time,err_u,err_T,err_S\n" << std::setprecision(10);
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.time.size(); ++i)
      os << c.mu1 << ',' << c.mu2 << ',' << c.mu3 << ',' << c.time[i] << ','
         << c.err_u[i] << ',' << c.err_T[i] << ',' << c.err_S[i] << '\n';
}

// Long-time stability constants of the discrete scheme on a rectangle
// (first Dirichlet eigenvalue gives the Poincare-Friedrichs constant).
inline double poincare_constant(const Rect& domain) {
  const double w = domain.width(), h = domain.height();
  return 1.0 / (std::numbers::pi * std::sqrt(1.0 / (w * w) + 1.0 / (h * h)));
}

struct StabilityBounds {
  double C_PF = 0.0;
  double lambda_u = 0.0, lambda_T = 0.0, lambda_S = 0.0;
  double K_T = 0.0, K_S = 0.0;  // long-time caps on ||T||^2, ||S||^2 (zero initial data)
};

// sup_*_l2: L-infinity-in-time L2 norms of the observed solution; g_sup_l2,
// phi_sup_l2: same for the scalar forcings, converted to H^{-1} bounds via
// ||f||_{-1} <= C_PF ||f||.
inline StabilityBounds stability_bounds(const Rect& domain, const PhysicalParams& p,
                                        double dt, double mu2, double mu3,
                                        double sup_T_l2, double sup_S_l2,
                                        double g_sup_l2, double phi_sup_l2) {
  StabilityBounds b;
  b.C_PF = poincare_constant(domain);
  const double c2 = b.C_PF * b.C_PF;
  b.lambda_u = std::min(p.nu * dt / (4.0 * c2) + p.inv_Da * dt / 4.0, 1.0);
  b.lambda_T = std::min(p.kappa * dt / (4.0 * c2), 1.0);
  b.lambda_S = std::min(p.Dc * dt / (4.0 * c2), 1.0);
  const double hminus1_G = b.C_PF * g_sup_l2;
  const double hminus1_Phi = b.C_PF * phi_sup_l2;
  b.K_T = std::max(4.0 * mu2 * c2 / p.kappa, mu2 * dt) * sup_T_l2 * sup_T_l2 +
          std::max(4.0 * c2 / (p.kappa * p.kappa), dt / p.kappa) * hminus1_G * hminus1_G;
  b.K_S = std::max(4.0 * mu3 * c2 / p.Dc, mu3 * dt) * sup_S_l2 * sup_S_l2 +
          std::max(4.0 * c2 / (p.Dc * p.Dc), dt / p.Dc) * hminus1_Phi * hminus1_Phi;
  return b;
}

// Initial-data contribution (1+lambda)^{-(n+1)} E0 of the stability lemma.
inline double decayed_initial(double initial_sq, double lambda, int n) {
  return std::pow(1.0 + lambda, -(n + 1)) * initial_sq;
}

}  // namespace cda
