#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cda/manufactured.hpp"
#include "oracles.hpp"

using namespace cda;

// The forcing terms are hand-derived from the closed-form fields. Recompute
// every PDE residual with finite differences at scattered points.
TEST_CASE("forcings satisfy the PDEs to finite-difference accuracy") {
  const ManufacturedSolution ms;
  const auto& p = ms.params;
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> dist(0.05, 0.95);

  auto u1 = [&](const Vec2& x, double t) { return ms.velocity(x, t).x(); };
  auto u2 = [&](const Vec2& x, double t) { return ms.velocity(x, t).y(); };
  auto pr = [&](const Vec2& x, double t) { return ms.pressure(x, t); };
  auto Tf = [&](const Vec2& x, double t) { return ms.temperature(x, t); };
  auto Sf = [&](const Vec2& x, double t) { return ms.concentration(x, t); };

  for (int k = 0; k < 20; ++k) {
    const Vec2 x(dist(gen), dist(gen));
    const double t = dist(gen);
    const Vec2 u = ms.velocity(x, t);
    const double T = ms.temperature(x, t);
    const double S = ms.concentration(x, t);

    const Vec2 grad_u1(oracle::fd_dx(u1, x, t), oracle::fd_dy(u1, x, t));
    const Vec2 grad_u2(oracle::fd_dx(u2, x, t), oracle::fd_dy(u2, x, t));
    const Vec2 momentum(
        oracle::fd_dt(u1, x, t) + u.dot(grad_u1) - p.nu * oracle::fd_laplace(u1, x, t) +
            p.inv_Da * u.x() + oracle::fd_dx(pr, x, t) -
            (p.beta_T * T + p.beta_C * S) * p.gravity.x(),
        oracle::fd_dt(u2, x, t) + u.dot(grad_u2) - p.nu * oracle::fd_laplace(u2, x, t) +
            p.inv_Da * u.y() + oracle::fd_dy(pr, x, t) -
            (p.beta_T * T + p.beta_C * S) * p.gravity.y());
    CHECK((momentum - ms.velocity_forcing(x, t)).norm() < 1e-6);

    const Vec2 grad_T(oracle::fd_dx(Tf, x, t), oracle::fd_dy(Tf, x, t));
    const double heat = oracle::fd_dt(Tf, x, t) + u.dot(grad_T) -
                        p.kappa * oracle::fd_laplace(Tf, x, t);
    CHECK(heat == Catch::Approx(ms.temperature_forcing(x, t)).margin(1e-6));

    const Vec2 grad_S(oracle::fd_dx(Sf, x, t), oracle::fd_dy(Sf, x, t));
    const double solute = oracle::fd_dt(Sf, x, t) + u.dot(grad_S) -
                          p.Dc * oracle::fd_laplace(Sf, x, t);
    CHECK(solute == Catch::Approx(ms.concentration_forcing(x, t)).margin(1e-6));
  }
}

TEST_CASE("velocity field is divergence free") {
  const ManufacturedSolution ms;
  auto u1 = [&](const Vec2& x, double t) { return ms.velocity(x, t).x(); };
  auto u2 = [&](const Vec2& x, double t) { return ms.velocity(x, t).y(); };
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> dist(0.05, 0.95);
  for (int k = 0; k < 10; ++k) {
    const Vec2 x(dist(gen), dist(gen));
    const double div = oracle::fd_dx(u1, x, 0.4) + oracle::fd_dy(u2, x, 0.4);
    CHECK(std::abs(div) < 1e-9);
  }
}

TEST_CASE("fields carry their separable time factors") {
  const ManufacturedSolution ms;
  const Vec2 x(0.3, 0.7);
  CHECK(ms.velocity(x, 1.0).x() ==
        Catch::Approx(std::exp(1.0) * ms.velocity(x, 0.0).x()).epsilon(1e-13));
  CHECK(ms.temperature(x, 1.0) ==
        Catch::Approx(std::exp(-1.0) * ms.temperature(x, 0.0)).epsilon(1e-13));
  CHECK(ms.concentration(x, 1.0) ==
        Catch::Approx(std::exp(-1.0) * ms.concentration(x, 0.0)).epsilon(1e-13));
  CHECK(ms.pressure(x, 1.0) == Catch::Approx(2.0 * ms.pressure(x, 0.0)).epsilon(1e-13));
}

TEST_CASE("pressure has zero mean over the unit square") {
  // (x - y)(1 + t) integrates to zero by symmetry
  const ManufacturedSolution ms;
  double integral = 0.0;
  const int n = 200;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      integral += ms.pressure(Vec2((i + 0.5) / n, (j + 0.5) / n), 0.7) / (n * n);
  CHECK(std::abs(integral) < 1e-12);
}
