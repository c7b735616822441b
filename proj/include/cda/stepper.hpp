#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cda/assemble.hpp"
#include "cda/linalg.hpp"
#include "cda/norms.hpp"
#include "cda/observe.hpp"
#include "cda/space.hpp"

namespace cda {

struct State {
  VecX u, p, T, S;
  double time = 0.0;
};

inline State zero_state(const FESpace& vel, const FESpace& pres, const FESpace& scal) {
  State s;
  s.u = VecX::Zero(vel.n_dofs());
  s.p = VecX::Zero(pres.n_dofs());
  s.T = VecX::Zero(scal.n_dofs());
  s.S = VecX::Zero(scal.n_dofs());
  return s;
}

struct StepperConfig {
  double dt = 1e-3;
  double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0;
  PhysicalParams params;
  SolverOptions solver;

  void validate() const {
    if (!(dt > 0)) throw std::invalid_argument("StepperConfig: dt must be positive");
    if (mu1 < 0 || mu2 < 0 || mu3 < 0)
      throw std::invalid_argument("StepperConfig: nudging parameters must be nonnegative");
    params.validate();
  }
};

// Dirichlet boundary data, evaluated at t^{n+1}. Tags select the constrained
// parts of the boundary; absent value functions mean zero data. Untagged
// boundary parts are natural (zero-flux).
struct BoundaryConditions {
  std::vector<int> velocity_tags;
  std::vector<int> temperature_tags;
  std::vector<int> concentration_tags;
  std::function<Vec2(const Vec2&, double)> velocity;
  std::function<double(const Vec2&, double)> temperature;
  std::function<double(const Vec2&, double)> concentration;
};

struct Forcing {
  std::function<Vec2(const Vec2&, double)> F;
  std::function<double(const Vec2&, double)> G;
  std::function<double(const Vec2&, double)> Phi;
};

struct ExactReference {
  std::function<Vec2(const Vec2&, double)> u;
  std::function<double(const Vec2&, double)> T;
  std::function<double(const Vec2&, double)> S;
};

struct StepRecord {
  int step = 0;
  double time = 0.0;
  double norm_u = 0.0, norm_T = 0.0, norm_S = 0.0;
  double err_u = 0.0, err_T = 0.0, err_S = 0.0;  // 0 when no reference attached
  double div_residual = 0.0;
};

struct TrajectorySummary {
  std::vector<StepRecord> records;
};

inline void write_trajectory_csv(const TrajectorySummary& traj, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
  os << "step,time,norm_u,norm_T,norm_S,err_u,err_T,err_S,div_residual\n";
  os << std::setprecision(16);
  for (const auto& r : traj.records)
    os << r.step << ',' << r.time << ',' << r.norm_u << ',' << r.norm_T << ','
       << r.norm_S << ',' << r.err_u << ',' << r.err_T << ',' << r.err_S << ','
       << r.div_residual << '\n';
}

// Backward-Euler CDA stepper: per step a linearized velocity-pressure saddle
// solve with lagged convection and buoyancy, then temperature, then
// concentration, each convected by the new velocity. Nudging terms mu_i
// (I_H(.), I_H(.)) sit implicitly on the left-hand side. Rather than forming
// mu P^T W P (dense within each coarse cell), each nudged system is bordered
// with the residual z = P x - d:
//   [ A       mu P^T W ] [x]   [b]
//   [ P       -I       ] [z] = [d]
// which eliminates to (A + mu P^T W P) x = b + mu P^T W d.
class CdaStepper {
 public:
  CdaStepper(const FESpace& vel, const FESpace& pres, const FESpace& scal,
             const ObservationOperator* obs_u, const ObservationOperator* obs_s,
             StepperConfig cfg, BoundaryConditions bc, Forcing forcing)
      : vel_(vel), pres_(pres), scal_(scal), obs_u_(obs_u), obs_s_(obs_s),
        cfg_(std::move(cfg)), bc_(std::move(bc)), forcing_(std::move(forcing)) {
    cfg_.validate();
    if (cfg_.mu1 > 0 && !obs_u_)
      throw std::invalid_argument("CdaStepper: mu1 > 0 requires a velocity observation operator");
    if ((cfg_.mu2 > 0 || cfg_.mu3 > 0) && !obs_s_)
      throw std::invalid_argument("CdaStepper: mu2/mu3 > 0 requires a scalar observation operator");

    const PhysicalParams& pp = cfg_.params;
    Mu_ = assemble_mass(vel_);
    Au_ = assemble_stiffness(vel_, pp.nu);
    B_ = assemble_divergence(vel_, pres_);
    Mp_ = assemble_mass(pres_);
    Ms_ = assemble_mass(scal_);
    AT_ = assemble_stiffness(scal_, pp.kappa);
    AS_ = assemble_stiffness(scal_, pp.Dc);

    n_u_ = vel_.n_dofs();
    n_p_ = pres_.n_dofs();
    n_s_ = scal_.n_dofs();
    n_zu_ = (cfg_.mu1 > 0) ? static_cast<int>(obs_u_->P.rows()) : 0;
    n_zT_ = (cfg_.mu2 > 0) ? static_cast<int>(obs_s_->P.rows()) : 0;
    n_zS_ = (cfg_.mu3 > 0) ? static_cast<int>(obs_s_->P.rows()) : 0;

    u_dirichlet_ = bc_.velocity_tags.empty() ? std::vector<int>{}
                                             : dirichlet_dofs(vel_, bc_.velocity_tags);
    T_dirichlet_ = bc_.temperature_tags.empty() ? std::vector<int>{}
                                                : dirichlet_dofs(scal_, bc_.temperature_tags);
    S_dirichlet_ = bc_.concentration_tags.empty()
                       ? std::vector<int>{}
                       : dirichlet_dofs(scal_, bc_.concentration_tags);
    u_mask_.assign(n_u_, false);
    for (int d : u_dirichlet_) u_mask_[d] = true;
    T_mask_.assign(n_s_, false);
    for (int d : T_dirichlet_) T_mask_[d] = true;
    S_mask_.assign(n_s_, false);
    for (int d : S_dirichlet_) S_mask_[d] = true;

    area_ = vel_.mesh->total_area();
    ones_p_ = VecX::Ones(n_p_);

    build_velocity_base();
    build_scalar_base(AT_, cfg_.mu2, n_zT_, T_mask_, T_dirichlet_, base_T_);
    build_scalar_base(AS_, cfg_.mu3, n_zS_, S_mask_, S_dirichlet_, base_S_);
  }

  const FESpace& velocity_space() const { return vel_; }
  const FESpace& pressure_space() const { return pres_; }
  const FESpace& scalar_space() const { return scal_; }
  const StepperConfig& config() const { return cfg_; }
  const SpMat& divergence_matrix() const { return B_; }
  const SpMat& velocity_mass() const { return Mu_; }
  const SpMat& scalar_mass() const { return Ms_; }

  // One step t^n -> t^{n+1}. `obs` must hold data at t^{n+1}; unused blocks
  // may be empty when the corresponding mu is zero.
  State advance(const State& s, const CoarseData& obs) {
    const double t1 = s.time + cfg_.dt;
    State out;
    out.time = t1;

    // (a) velocity-pressure
    {
      conv_scratch_.clear();
      convection_skew_triplets(vel_, vel_, s.u, default_quadrature(), conv_scratch_);
      trips_.assign(base_vel_.begin(), base_vel_.end());
      for (const auto& tr : conv_scratch_)
        if (!u_mask_[tr.row()]) trips_.push_back(tr);

      const int N = n_u_ + n_p_ + n_zu_;
      SpMat A(N, N);
      A.setFromTriplets(trips_.begin(), trips_.end());

      VecX b = VecX::Zero(N);
      b.head(n_u_) = Mu_ * s.u / cfg_.dt +
                     assemble_buoyancy_rhs(vel_, scal_, s.T, s.S, cfg_.params);
      if (forcing_.F) b.head(n_u_) += assemble_load(vel_, forcing_.F, t1);
      for (int d : u_dirichlet_) {
        const Vec2 g = bc_.velocity ? bc_.velocity(vel_.node_coords[d / 2], t1)
                                    : Vec2(0.0, 0.0);
        b[d] = g[d % 2];
      }
      if (n_zu_ > 0) {
        if (obs.u.size() != n_zu_)
          throw std::invalid_argument("advance: velocity observation size mismatch");
        b.tail(n_zu_) = obs.u;
      }

      const VecX x = solve_system(vel_solver_, A, b, "velocity stage");
      out.u = x.head(n_u_);
      out.p = x.segment(n_u_, n_p_);
      const double mean = ones_p_.dot(Mp_ * out.p) / area_;
      out.p.array() -= mean;
    }

    // (b) temperature, (c) concentration, both convected by the new velocity
    conv_scratch_.clear();
    convection_skew_triplets(scal_, vel_, out.u, default_quadrature(), conv_scratch_);
    out.T = scalar_stage(base_T_, n_zT_, T_mask_, T_dirichlet_, Ms_, s.T, forcing_.G,
                         bc_.temperature, obs.T, cfg_.mu2, t1, T_solver_,
                         "temperature stage");
    out.S = scalar_stage(base_S_, n_zS_, S_mask_, S_dirichlet_, Ms_, s.S, forcing_.Phi,
                         bc_.concentration, obs.S, cfg_.mu3, t1, S_solver_,
                         "concentration stage");
    return out;
  }

  // Advances `s` in place over `horizon` steps; per-step norms (and errors,
  // when a reference is attached) land in the returned summary.
  TrajectorySummary run(State& s, int horizon, const ObservationSource& source,
                        const ExactReference* ref = nullptr,
                        const std::function<void(int, const State&)>& on_step = {}) {
    TrajectorySummary traj;
    traj.records.push_back(record(0, s, ref));
    for (int n = 0; n < horizon; ++n) {
      CoarseData obs;
      if (n_zu_ > 0 || n_zT_ > 0 || n_zS_ > 0) obs = source(n, s.time + cfg_.dt);
      s = advance(s, obs);
      traj.records.push_back(record(n + 1, s, ref));
      if (on_step) on_step(n + 1, s);
    }
    return traj;
  }

  StepRecord record(int step, const State& s, const ExactReference* ref) const {
    StepRecord r;
    r.step = step;
    r.time = s.time;
    r.norm_u = std::sqrt(s.u.dot(Mu_ * s.u));
    r.norm_T = std::sqrt(s.T.dot(Ms_ * s.T));
    r.norm_S = std::sqrt(s.S.dot(Ms_ * s.S));
    if (!std::isfinite(r.norm_u) || !std::isfinite(r.norm_T) || !std::isfinite(r.norm_S))
      throw std::runtime_error("run: non-finite norm at step " + std::to_string(step));
    if (ref) {
      r.err_u = l2_error(vel_, s.u, ref->u, s.time);
      r.err_T = l2_error(scal_, s.T, ref->T, s.time);
      r.err_S = l2_error(scal_, s.S, ref->S, s.time);
    }
    VecX div = B_ * s.u;
    div[0] = 0.0;  // pinned pressure row carries the BC compatibility defect
    r.div_residual = div.norm();
    return r;
  }

 private:
  void build_velocity_base() {
    base_vel_.clear();
    const double mdiag = 1.0 / cfg_.dt + cfg_.params.inv_Da;
    append_filtered(Mu_, base_vel_, u_mask_, 0, 0, mdiag);
    append_filtered(Au_, base_vel_, u_mask_, 0, 0, 1.0);
    // -B^T in the momentum rows, B in the constraint rows (pressure DOF 0
    // pinned to zero to fix the constant mode).
    for (int k = 0; k < B_.outerSize(); ++k)
      for (SpMat::InnerIterator it(B_, k); it; ++it) {
        const int ip = static_cast<int>(it.row());
        const int iu = static_cast<int>(it.col());
        if (!u_mask_[iu]) base_vel_.emplace_back(iu, n_u_ + ip, -it.value());
        if (ip != 0) base_vel_.emplace_back(n_u_ + ip, iu, it.value());
      }
    base_vel_.emplace_back(n_u_, n_u_, 1.0);
    if (n_zu_ > 0) append_border(*obs_u_, cfg_.mu1, vel_.arity, n_u_ + n_p_, u_mask_, base_vel_);
    for (int d : u_dirichlet_) base_vel_.emplace_back(d, d, 1.0);
  }

  void build_scalar_base(const SpMat& Astiff, double mu, int n_z,
                         const std::vector<bool>& mask, const std::vector<int>& dir,
                         std::vector<Triplet>& out) {
    out.clear();
    append_filtered(Ms_, out, mask, 0, 0, 1.0 / cfg_.dt);
    append_filtered(Astiff, out, mask, 0, 0, 1.0);
    if (n_z > 0) append_border(*obs_s_, mu, scal_.arity, n_s_, mask, out);
    for (int d : dir) out.emplace_back(d, d, 1.0);
  }

  static void append_filtered(const SpMat& M, std::vector<Triplet>& out,
                              const std::vector<bool>& mask, int row_off, int col_off,
                              double scale) {
    for (int k = 0; k < M.outerSize(); ++k)
      for (SpMat::InnerIterator it(M, k); it; ++it)
        if (!mask[it.row()])
          out.emplace_back(static_cast<int>(it.row()) + row_off,
                           static_cast<int>(it.col()) + col_off, scale * it.value());
  }

  // Border blocks: [.., mu P^T W; P, -I] with z starting at `z_off`.
  static void append_border(const ObservationOperator& op, double mu, int arity,
                            int z_off, const std::vector<bool>& mask,
                            std::vector<Triplet>& out) {
    for (int k = 0; k < op.P.outerSize(); ++k)
      for (SpMat::InnerIterator it(op.P, k); it; ++it) {
        const int r = static_cast<int>(it.row());
        const int j = static_cast<int>(it.col());
        const double w = op.cell_measures[r / arity];
        if (!mask[j]) out.emplace_back(j, z_off + r, mu * w * it.value());
        out.emplace_back(z_off + r, j, it.value());
      }
    for (int r = 0; r < op.P.rows(); ++r) out.emplace_back(z_off + r, z_off + r, -1.0);
  }

  VecX scalar_stage(const std::vector<Triplet>& base, int n_z,
                    const std::vector<bool>& mask, const std::vector<int>& dir,
                    const SpMat& M, const VecX& prev,
                    const std::function<double(const Vec2&, double)>& load,
                    const std::function<double(const Vec2&, double)>& bcval,
                    const VecX& obs, double mu, double t1, DirectSolver& cached,
                    const char* stage) {
    trips_.assign(base.begin(), base.end());
    for (const auto& tr : conv_scratch_)
      if (!mask[tr.row()]) trips_.push_back(tr);

    const int N = n_s_ + n_z;
    SpMat A(N, N);
    A.setFromTriplets(trips_.begin(), trips_.end());

    VecX b = VecX::Zero(N);
    b.head(n_s_) = M * prev / cfg_.dt;
    if (load) b.head(n_s_) += assemble_load(scal_, load, t1);
    for (int d : dir) b[d] = bcval ? bcval(scal_.node_coords[d], t1) : 0.0;
    if (n_z > 0) {
      if (obs.size() != n_z)
        throw std::invalid_argument(std::string("advance: observation size mismatch in ") + stage);
      b.tail(n_z) = obs;
    }
    const VecX x = solve_system(cached, A, b, stage);
    return x.head(n_s_);
  }

  VecX solve_system(DirectSolver& cached, const SpMat& A, const VecX& b, const char* stage) {
    VecX x;
    try {
      if (cfg_.solver.backend == SolverOptions::Backend::lu) {
        cached.factorize(A);
        x = cached.solve(b);
        x += cached.solve(b - A * x);  // one refinement pass
      } else {
        x = cda::solve(A, b, cfg_.solver);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string(stage) + ": " + e.what());
    }
    if (!x.allFinite())
      throw std::runtime_error(std::string(stage) + ": non-finite solution (diverged)");
    const double rel = relative_residual(A, x, b);
    if (rel > std::max(cfg_.solver.tol, 1e-10))
      throw std::runtime_error(std::string(stage) + ": residual " + std::to_string(rel) +
                               " exceeds tolerance");
    return x;
  }

  const FESpace& vel_;
  const FESpace& pres_;
  const FESpace& scal_;
  const ObservationOperator* obs_u_;
  const ObservationOperator* obs_s_;
  StepperConfig cfg_;
  BoundaryConditions bc_;
  Forcing forcing_;

  SpMat Mu_, Au_, B_, Mp_, Ms_, AT_, AS_;
  int n_u_ = 0, n_p_ = 0, n_s_ = 0, n_zu_ = 0, n_zT_ = 0, n_zS_ = 0;
  std::vector<int> u_dirichlet_, T_dirichlet_, S_dirichlet_;
  std::vector<bool> u_mask_, T_mask_, S_mask_;
  std::vector<Triplet> base_vel_, base_T_, base_S_;
  std::vector<Triplet> trips_, conv_scratch_;
  DirectSolver vel_solver_, T_solver_, S_solver_;
  double area_ = 0.0;
  VecX ones_p_;
};

}  // namespace cda
