#pragma once

#include <array>
#include <vector>

#include "laxmono/models.hpp"
#include "laxmono/monodromy.hpp"

namespace laxmono {

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  /// NaN where lambda-tilde is at infinity.
  std::vector<ReducedPoint> reduced;
};

struct ReturnData {
  double T = 0.0;
  double theta = 0.0;
  double theta_im_defect = 0.0;
  /// |lambda(T) - lambda(0)|
  double closure = 0.0;
  Trajectory traj;
};

/// Dormand-Prince 5(4) with dense output; t_max < 0 integrates backwards.
/// Throws ToleranceFailure if the step size collapses.
Trajectory integrate(const Model& m, const PhaseState& s0, double t_max, double tol = 1e-10);

/// First time the reduced point returns to its initial value.
/// Throws NoReturn after 1e4 * t_char.
ReturnData first_return(const Model& m, const PhaseState& s0, double tol = 1e-10);

/// Theta over the first-return orbit through seed_state(h, k).
ReturnData rotation_number(const Model& m, double h, double k, double tol = 1e-10);

struct RotationSample {
  double s;
  EMValue at;
  double theta;
};

struct DeltaRotation {
  double delta = 0.0;
  LoopSpec traversed;
  std::vector<RotationSample> samples;
  /// Theta continued along the loop.
  std::vector<double> unwrapped;
};

/// Theta on the loop (after the orientation correction of genericity_check),
/// continued modulo 2 pi. Throws UnwrapFailure after 10 refinement levels.
DeltaRotation delta_rotation_loop(const Model& m, const LoopSpec& loop, double tol = 1e-10);

/// Winding number of the closed reduced path around each point.
std::array<double, 4> winding_numbers(const Trajectory& traj, const RootSet& roots);

struct QuasiTransit {
  double theta = 0.0;
  double theta_im = 0.0;
  double t_entry = 0.0;
  double t_exit = 0.0;
  Trajectory traj;
};

/// Relative rotation of the ball transit on the fiber h + i k = rho e^{i phi}.
/// Throws DegenerateFiber on h = 0, k < 0.
QuasiTransit quasi_transit(double rho, double phi, double R, double tol = 1e-11);
double quasi_relative_rotation(double rho, double phi, double R);
double quasi_delta_rotation(double rho, double eps, double R);

}  // namespace laxmono
