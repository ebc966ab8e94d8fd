// Minimal library use: calibrate on a synthetic walk, then run PVIC on the
// same stream and print the torque at a few gait percentages.

#include <cstdio>

#include "gaitphase/control.hpp"
#include "gaitphase/defaults.hpp"
#include "gaitphase/phase.hpp"
#include "gaitphase/plant.hpp"
#include "gaitphase/signals.hpp"

int main() {
  using namespace gaitphase;
  plant::GaitSynthParams params;
  params.stride_count = 11;
  const auto gait = plant::synth_gait(params);

  const auto strides =
      signals::segment_strides(signals::condition_stream(gait.frames));
  const auto cal = phase::calibrate_cpc(strides);

  control::ControllerConfig cfg;
  cfg.kind = control::ControllerKind::kPvic;
  cfg.profile = defaults::pvic_profile();
  cfg.phase_cal = cal;
  cfg.phase_map = phase::build_phase_map(strides, cal);
  control::Controller controller(cfg);

  std::printf("x0=%.3f deg  y0=%.3f deg/s  k=%.4f s\n", cal.x0, cal.y0, cal.k);
  double next = 5.0;
  double prev = 100.0;
  for (const auto& frame : gait.frames) {
    const auto cmd = controller.step(frame);
    const bool crossed = prev < next && cmd.s_est >= next;
    prev = cmd.s_est;
    if (frame.t >= gait.heel_strike_t[5] && crossed && next < 100.0) {
      std::printf("s=%5.1f%%  theta_eq=%6.2f  K=%.3f  tau=%7.3f Nm/kg\n",
                  cmd.s_est, cmd.theta_eq, cmd.stiffness, cmd.tau_total);
      next += 10.0;
    }
  }
  return 0;
}
