#pragma once

namespace tdho {

/// Point of phase space (q, p = dq/dt) at time t.
struct PhaseState {
  double t = 0.0;
  double q = 0.0;
  double p = 0.0;
};

/// Angle (unwrapped, radians) and action at time t.
struct AngleActionState {
  double t = 0.0;
  double psi = 0.0;
  double I = 0.0;
};

}  // namespace tdho
