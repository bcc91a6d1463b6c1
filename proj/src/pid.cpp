#include "uavroute/pid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace uavroute {

namespace {

bool symmetric_positive_definite(const Eigen::Matrix3d& m) {
  if (!m.isApprox(m.transpose(), 1e-12)) return false;
  Eigen::LLT<Eigen::Matrix3d> llt(m);
  return llt.info() == Eigen::Success;
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * M_PI); }

// Largest s in [0, 1] with feasible(s), given feasible(0). Feasibility is an
// intersection of half-spaces in s, so the feasible set is an interval.
template <typename F>
double largest_feasible_scale(F&& feasible) {
  if (feasible(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

void PidGains::validate() const {
  if (!symmetric_positive_definite(kp) || !symmetric_positive_definite(kd) ||
      !symmetric_positive_definite(kp_att) || !symmetric_positive_definite(kd_att)) {
    throw std::invalid_argument("PID gain matrices must be symmetric positive definite");
  }
  if (!(max_tilt > 0.0 && max_tilt < M_PI / 2)) throw std::invalid_argument("max_tilt must be in (0, pi/2)");
}

ControlOutput clamp_to_realizable(const InputVector& u, const CraftParams& params) {
  ControlOutput out{u, false};
  if (realizable<double>(u, params)) return out;
  out.saturated = true;
  out.u[0] = std::clamp(u[0], 0.0, params.max_thrust());
  if (realizable<double>(out.u, params)) return out;

  InputVector trial = out.u;
  const double yaw_scale = largest_feasible_scale([&](double s) {
    trial[3] = s * u[3];
    return realizable<double>(trial, params);
  });
  trial[3] = yaw_scale * u[3];
  if (yaw_scale > 0.0 || realizable<double>(trial, params)) {
    out.u = trial;
    return out;
  }
  trial[3] = 0.0;
  const double tilt_scale = largest_feasible_scale([&](double s) {
    trial[1] = s * u[1];
    trial[2] = s * u[2];
    return realizable<double>(trial, params);
  });
  trial[1] = tilt_scale * u[1];
  trial[2] = tilt_scale * u[2];
  out.u = trial;
  return out;
}

ControlOutput control_step(const UavState& x, const UavState& reference, const Eigen::Vector3d& reference_acc,
                           const WindVector& wind_estimate, const PidGains& gains, const CraftParams& params) {
  const Eigen::Vector3d acc_cmd =
      reference_acc + gains.kd * (reference.v - x.v) + gains.kp * (reference.p - x.p);
  Eigen::Vector3d force = params.mass_kg * acc_cmd;
  force.z() += params.weight();
  force -= drag_force<double>(x.v, wind_estimate, params);

  const Eigen::Matrix3d rot = body_to_world<double>(x.theta);
  const double thrust = force.dot(rot.col(2));

  Eigen::Vector3d theta_des = Eigen::Vector3d::Zero();
  const double fn = force.norm();
  if (fn > 1e-12) {
    const Eigen::Vector3d n = force / fn;
    theta_des.x() = std::clamp(std::asin(std::clamp(-n.y(), -1.0, 1.0)), -gains.max_tilt, gains.max_tilt);
    theta_des.y() = std::clamp(std::atan2(n.x(), n.z()), -gains.max_tilt, gains.max_tilt);
  }
  Eigen::Vector3d att_err = theta_des - x.theta;
  att_err.z() = wrap_angle(att_err.z());
  const Eigen::Vector3d ang_acc = gains.kp_att * att_err - gains.kd_att * x.omega;
  const Eigen::Vector3d inertia = params.inertia_diagonal();
  const Eigen::Vector3d moments = inertia.cwiseProduct(ang_acc) + x.omega.cross(inertia.cwiseProduct(x.omega));

  InputVector u;
  u << thrust, moments;
  return clamp_to_realizable(u, params);
}

Prediction predict_along(const std::vector<UavState>& reference, const UavState& x0, const WindSchedule& wind,
                         const PidGains& gains, const CraftParams& params, double t_s) {
  Prediction out;
  out.states.push_back(x0);
  if (reference.size() < 2) return out;
  const std::size_t steps = reference.size() - 1;
  out.inputs.reserve(steps);
  out.states.reserve(steps + 1);
  UavState x = x0;
  for (std::size_t k = 0; k < steps; ++k) {
    const UavState& ref = reference[k + 1];
    const Eigen::Vector3d ff = (reference[k + 1].v - reference[k].v) / t_s;
    const WindVector w = wind(k);
    const ControlOutput c = control_step(x, ref, ff, w, gains, params);
    out.saturated = out.saturated || c.saturated;
    out.inputs.push_back(c.u);
    x = step_dynamics<double>(x, c.u, w, params, t_s);
    out.states.push_back(x);
  }
  return out;
}

Prediction predict_inputs(const DesirablePath& path, const UavState& x0, const WindVector& d_frozen,
                          const PidGains& gains, const CraftParams& params, double t_s) {
  return predict_along(path.states, x0, [&](std::size_t) { return d_frozen; }, gains, params, t_s);
}

WindVector extremal_wind(const Eigen::Vector3d& v_ref, const Eigen::Vector3d& a_ref, double d_cap,
                         const CraftParams& params, bool worst) {
  if (!(d_cap > 0.0)) return WindVector::Zero();
  Eigen::Vector3d f0 = params.mass_kg * a_ref;
  f0.z() += params.weight();
  const double k = params.drag_factor();
  auto thrust_sq = [&](const WindVector& d) {
    const Eigen::Vector3d w = v_ref - wind3<double>(d);
    return (f0 + k * w.norm() * w).squaredNorm();
  };

  std::vector<WindVector> candidates;
  constexpr int kSamples = 32;
  for (int i = 0; i < kSamples; ++i) {
    const double ang = 2.0 * M_PI * i / kSamples;
    candidates.emplace_back(d_cap * std::cos(ang), d_cap * std::sin(ang));
  }
  const Eigen::Vector2d vh = v_ref.head<2>();
  const Eigen::Vector2d fh = f0.head<2>();
  if (vh.norm() > 1e-9) candidates.push_back(-d_cap * vh.normalized());
  if (fh.norm() > 1e-12) candidates.push_back(-d_cap * fh.normalized());
  if (!worst) {
    if (vh.norm() <= d_cap) candidates.push_back(vh);
    // Relative airspeed whose drag cancels the horizontal demand.
    if (fh.norm() > 1e-12) {
      const Eigen::Vector2d w = -fh.normalized() * std::sqrt(fh.norm() / k);
      const Eigen::Vector2d d = vh - w;
      if (d.norm() <= d_cap) candidates.push_back(d);
    }
  }
  WindVector best = candidates.front();
  double best_val = thrust_sq(best);
  for (const WindVector& d : candidates) {
    const double val = thrust_sq(d);
    if (worst ? val > best_val : val < best_val) {
      best = d;
      best_val = val;
    }
  }
  return best;
}

namespace {

Prediction predict_extremal(const std::vector<UavState>& reference, const UavState& x0, double d_cap,
                            const PidGains& gains, const CraftParams& params, double t_s, bool worst) {
  std::vector<WindVector> schedule(reference.size() > 1 ? reference.size() - 1 : 0);
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const Eigen::Vector3d a = (reference[k + 1].v - reference[k].v) / t_s;
    schedule[k] = extremal_wind(reference[k + 1].v, a, d_cap, params, worst);
  }
  return predict_along(reference, x0, [&](std::size_t k) { return schedule[k]; }, gains, params, t_s);
}

}  // namespace

EnergyTriple predict_energy_triple(const DesirablePath& path, const UavState& x0, const WindVector& d_now,
                                   double d_cap, const PidGains& gains, const CraftParams& params, double t_s) {
  auto energy_of = [&](const Prediction& p) {
    return piecewise_energy<double>(std::span<const InputVector>(p.inputs), params, t_s);
  };
  EnergyTriple triple;
  triple.predicted = energy_of(predict_inputs(path, x0, d_now, gains, params, t_s));
  if (d_cap <= 0.0 && d_now.isZero(0.0)) {
    triple.max = triple.min = triple.predicted;
    return triple;
  }
  triple.max = energy_of(predict_extremal(path.states, x0, d_cap, gains, params, t_s, true));
  triple.min = energy_of(predict_extremal(path.states, x0, d_cap, gains, params, t_s, false));
  return triple;
}

void write_prediction_csv(std::ostream& out, const Prediction& prediction, double t_s) {
  out << "t,F,Mx,My,Mz,x,y,z,vx,vy,vz\n";
  for (std::size_t k = 0; k < prediction.inputs.size(); ++k) {
    const auto& u = prediction.inputs[k];
    const auto& s = prediction.states[k + 1];
    out << static_cast<double>(k) * t_s << ',' << u[0] << ',' << u[1] << ',' << u[2] << ',' << u[3] << ','
        << s.p.x() << ',' << s.p.y() << ',' << s.p.z() << ',' << s.v.x() << ',' << s.v.y() << ',' << s.v.z()
        << '\n';
  }
}

}  // namespace uavroute
