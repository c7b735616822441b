// Minimal library usage: nudge a zero-initialized run toward the manufactured
// reference and watch the error contract.
#include <cstdio>

#include "cda/verify.hpp"

int main() {
  const int n = 16;            // mesh subdivisions per unit length
  const double H = 4.0 / n;    // observation cell size
  cda::ManufacturedProblem prob(n, H);

  cda::StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.mu1 = cfg.mu2 = cfg.mu3 = 100.0;
  cfg.params = prob.solution().params;
  cda::CdaStepper stepper(prob.velocity_space(), prob.pressure_space(),
                          prob.scalar_space(), &prob.obs_u(), &prob.obs_s(), cfg,
                          prob.boundary(), prob.forcing());

  const auto ref = prob.reference();
  cda::State s = cda::zero_state(prob.velocity_space(), prob.pressure_space(),
                                 prob.scalar_space());
  const auto summary = stepper.run(s, 200, prob.source(), &ref);

  std::printf("%8s %12s %12s %12s\n", "t", "err_u", "err_T", "err_S");
  for (std::size_t i = 0; i < summary.records.size(); i += 50) {
    const auto& r = summary.records[i];
    std::printf("%8.3f %12.4e %12.4e %12.4e\n", r.time, r.err_u, r.err_T, r.err_S);
  }
  return 0;
}
