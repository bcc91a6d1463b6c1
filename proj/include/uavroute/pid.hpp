#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "uavroute/astar.hpp"
#include "uavroute/disturbance.hpp"
#include "uavroute/quadrotor.hpp"

namespace uavroute {

/// PD gains of the decoupled position and attitude loops. All four matrices
/// must be symmetric positive definite.
struct PidGains {
  Eigen::Matrix3d kp = 4.0 * Eigen::Matrix3d::Identity();
  Eigen::Matrix3d kd = 4.0 * Eigen::Matrix3d::Identity();
  Eigen::Matrix3d kp_att = 100.0 * Eigen::Matrix3d::Identity();
  Eigen::Matrix3d kd_att = 20.0 * Eigen::Matrix3d::Identity();
  double max_tilt = 0.7853981633974483;  // rad

  void validate() const;
};

struct ControlOutput {
  InputVector u = InputVector::Zero();
  bool saturated = false;
};

/// One step of the cascaded controller.
///
/// Position loop: p'' = p''_c + Kd (v_c - v) + Kp (p_c - p). The commanded
/// acceleration plus gravity and drag compensation (using `wind_estimate`)
/// gives a desired world force; its projection on the current body z axis is
/// the thrust and its direction sets roll/pitch with yaw held at zero. The
/// attitude loop has the same PD structure and yields the moments. The result
/// is clamped into the realizable input set.
ControlOutput control_step(const UavState& x, const UavState& reference, const Eigen::Vector3d& reference_acc,
                           const WindVector& wind_estimate, const PidGains& gains, const CraftParams& params);

/// Squeezes `u` into the set the four rotors can produce: thrust first, then
/// yaw moment, then roll/pitch moments are scaled down.
ControlOutput clamp_to_realizable(const InputVector& u, const CraftParams& params);

struct Prediction {
  std::vector<InputVector> inputs;  // U_v^a, one per step
  std::vector<UavState> states;     // predicted x, inputs.size() + 1 entries
  bool saturated = false;
};

using WindSchedule = std::function<WindVector(std::size_t step)>;

/// Closed-loop prediction along `reference` with the wind given per step.
Prediction predict_along(const std::vector<UavState>& reference, const UavState& x0, const WindSchedule& wind,
                         const PidGains& gains, const CraftParams& params, double t_s);

Prediction predict_inputs(const DesirablePath& path, const UavState& x0, const WindVector& d_frozen,
                          const PidGains& gains, const CraftParams& params, double t_s);

struct EnergyTriple {
  EnergyJ predicted;
  EnergyJ max;
  EnergyJ min;
};

/// Predicted energy under the frozen wind, plus the same path flown under the
/// per-step wind (within |d| <= d_cap) that demands the most and the least
/// thrust from the reference motion.
EnergyTriple predict_energy_triple(const DesirablePath& path, const UavState& x0, const WindVector& d_now,
                                   double d_cap, const PidGains& gains, const CraftParams& params, double t_s);

/// Wind in the disk |d| <= d_cap maximizing (worst) or minimizing the thrust
/// needed to follow a reference moving at `v_ref` with acceleration `a_ref`.
WindVector extremal_wind(const Eigen::Vector3d& v_ref, const Eigen::Vector3d& a_ref, double d_cap,
                         const CraftParams& params, bool worst);

void write_prediction_csv(std::ostream& out, const Prediction& prediction, double t_s);

}  // namespace uavroute
