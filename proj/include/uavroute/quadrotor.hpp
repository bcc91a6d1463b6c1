#pragma once

// Quadrotor model: mixer, rigid-body dynamics, and traveling-energy formulas.
// Everything here is templated on the scalar type so the model can be
// evaluated in double for simulation and in long double for reference checks.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "uavroute/types.hpp"

namespace uavroute {

class SaturationError : public std::out_of_range {
 public:
  SaturationError(int rotor, const std::string& what) : std::out_of_range(what), rotor_(rotor) {}
  int rotor() const { return rotor_; }

 private:
  int rotor_;
};

class UnrealizableInputError : public std::domain_error {
 public:
  UnrealizableInputError(int rotor, const std::string& what, std::optional<TimeIndex> k = std::nullopt)
      : std::domain_error(what), rotor_(rotor), time_index_(k) {}
  int rotor() const { return rotor_; }
  std::optional<TimeIndex> time_index() const { return time_index_; }

 private:
  int rotor_;
  std::optional<TimeIndex> time_index_;
};

class CannotLiftError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

// [F Mx My Mz]: net thrust (N) and body moments (N m).
template <typename Scalar>
using BasicInputVector = Eigen::Matrix<Scalar, 4, 1>;
// Rotor angular speeds, rad/s.
template <typename Scalar>
using BasicRotorSpeeds = Eigen::Matrix<Scalar, 4, 1>;

/// Craft constants. Defaults model a 0.18 kg quadrotor with 8.6 cm arms; the
/// rotor and drag constants are typical small-quadrotor values.
template <typename Scalar>
struct BasicCraftParams {
  Scalar mass_kg = Scalar(0.18);
  Scalar arm_m = Scalar(0.086);
  Scalar kappa_f = Scalar(6.11e-8);
  Scalar kappa_m = Scalar(1.5e-9);
  Scalar omega_max = Scalar(7800);
  Scalar drag_coeff = Scalar(1.0);
  Scalar air_density = Scalar(1.225);
  Scalar ref_area_m2 = Scalar(0.01);
  Scalar gravity = Scalar(9.81);

  Scalar weight() const { return mass_kg * gravity; }
  Scalar max_thrust() const { return 4 * kappa_f * omega_max * omega_max; }
  // 1/2 C_d rho R
  Scalar drag_factor() const { return Scalar(0.5) * drag_coeff * air_density * ref_area_m2; }
  Scalar max_power() const { return 4 * kappa_m * omega_max * omega_max * omega_max; }

  // Point-mass arms: m/4 at each rotor. Rotors 1,3 sit on the x axis, 2,4 on y.
  Vec3<Scalar> inertia_diagonal() const {
    const Scalar ml2 = mass_kg * arm_m * arm_m;
    return {ml2 / 2, ml2 / 2, ml2};
  }

  void validate() const {
    if (!(mass_kg > 0 && arm_m > 0 && kappa_f > 0 && kappa_m > 0 && omega_max > 0 && drag_coeff > 0 &&
          air_density > 0 && ref_area_m2 > 0 && gravity > 0)) {
      throw std::invalid_argument("craft parameters must be strictly positive");
    }
  }
};

/// x = [p v Theta Omega]; Theta = (roll, pitch, yaw), Omega = body rates.
template <typename Scalar>
struct BasicUavState {
  Vec3<Scalar> p = Vec3<Scalar>::Zero();
  Vec3<Scalar> v = Vec3<Scalar>::Zero();
  Vec3<Scalar> theta = Vec3<Scalar>::Zero();
  Vec3<Scalar> omega = Vec3<Scalar>::Zero();

  static BasicUavState at_rest(const Vec2<Scalar>& xy, Scalar z = Scalar(0)) {
    BasicUavState s;
    s.p << xy.x(), xy.y(), z;
    return s;
  }
  Vec2<Scalar> xy() const { return p.template head<2>(); }
  Vec2<Scalar> ground_velocity() const { return v.template head<2>(); }
};

/// Energy in joules, or the distinguished INFEASIBLE value.
template <typename Scalar>
class BasicEnergy {
 public:
  constexpr BasicEnergy() = default;
  constexpr explicit BasicEnergy(Scalar joules) : joules_(joules) {}
  static constexpr BasicEnergy infeasible() {
    BasicEnergy e;
    e.feasible_ = false;
    e.joules_ = std::numeric_limits<Scalar>::infinity();
    return e;
  }

  constexpr bool feasible() const { return feasible_; }
  // +inf when infeasible, so comparisons treat it as an absent edge.
  constexpr Scalar joules() const { return joules_; }

  friend constexpr BasicEnergy operator+(BasicEnergy a, BasicEnergy b) {
    if (!a.feasible_ || !b.feasible_) return infeasible();
    return BasicEnergy(a.joules_ + b.joules_);
  }
  friend constexpr bool operator<(BasicEnergy a, BasicEnergy b) { return a.joules_ < b.joules_; }
  friend constexpr bool operator<=(BasicEnergy a, BasicEnergy b) { return a.joules_ <= b.joules_; }
  friend constexpr bool operator==(BasicEnergy a, BasicEnergy b) {
    return a.feasible_ == b.feasible_ && (!a.feasible_ || a.joules_ == b.joules_);
  }

 private:
  Scalar joules_ = Scalar(0);
  bool feasible_ = true;
};

using CraftParams = BasicCraftParams<double>;
using UavState = BasicUavState<double>;
using InputVector = BasicInputVector<double>;
using RotorSpeeds = BasicRotorSpeeds<double>;
using EnergyJ = BasicEnergy<double>;

/// The 4x4 matrix mapping squared rotor speeds to [F Mx My Mz].
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> mixer_matrix(const BasicCraftParams<Scalar>& c) {
  const Scalar kf = c.kappa_f, km = c.kappa_m, lkf = c.arm_m * c.kappa_f;
  Eigen::Matrix<Scalar, 4, 4> m;
  // clang-format off
  m <<   kf,   kf,  kf,   kf,
          0,  lkf,   0, -lkf,
       -lkf,    0, lkf,    0,
         km,  -km,  km,  -km;
  // clang-format on
  return m;
}

template <typename Scalar>
BasicInputVector<Scalar> mixer(const BasicRotorSpeeds<Scalar>& omega, const BasicCraftParams<Scalar>& c) {
  for (int i = 0; i < 4; ++i) {
    if (!(omega[i] >= 0) || omega[i] > c.omega_max * (1 + Scalar(1e-12))) {
      throw SaturationError(i, "rotor " + std::to_string(i + 1) + " speed outside [0, omega_max]");
    }
  }
  return mixer_matrix(c) * omega.cwiseAbs2();
}

/// Squared rotor speeds solving the mixer equation, without range checks.
template <typename Scalar>
BasicInputVector<Scalar> squared_rotor_speeds(const BasicInputVector<Scalar>& u,
                                              const BasicCraftParams<Scalar>& c) {
  const Scalar a = u[0] / c.kappa_f;                // s1+s2+s3+s4
  const Scalar b = u[1] / (c.arm_m * c.kappa_f);    // s2-s4
  const Scalar cc = u[2] / (c.arm_m * c.kappa_f);   // s3-s1
  const Scalar d = u[3] / c.kappa_m;                // s1-s2+s3-s4
  const Scalar odd = (a + d) / 2;                   // s1+s3
  const Scalar even = (a - d) / 2;                  // s2+s4
  BasicInputVector<Scalar> s;
  s << (odd - cc) / 2, (even + b) / 2, (odd + cc) / 2, (even - b) / 2;
  return s;
}

template <typename Scalar>
bool realizable(const BasicInputVector<Scalar>& u, const BasicCraftParams<Scalar>& c) {
  const auto s = squared_rotor_speeds(u, c);
  const Scalar hi = c.omega_max * c.omega_max;
  const Scalar tol = hi * Scalar(1e-12);
  return (s.array() >= -tol).all() && (s.array() <= hi + tol).all();
}

template <typename Scalar>
BasicRotorSpeeds<Scalar> mixer_inverse(const BasicInputVector<Scalar>& u, const BasicCraftParams<Scalar>& c) {
  const auto s = squared_rotor_speeds(u, c);
  const Scalar hi = c.omega_max * c.omega_max;
  const Scalar tol = hi * Scalar(1e-12);
  BasicRotorSpeeds<Scalar> omega;
  for (int i = 0; i < 4; ++i) {
    if (!(s[i] >= -tol) || s[i] > hi + tol) {
      throw UnrealizableInputError(i, "input needs rotor " + std::to_string(i + 1) + " outside [0, omega_max]");
    }
    using std::sqrt;
    omega[i] = sqrt(std::max(s[i], Scalar(0)));
  }
  return omega;
}

/// P = kappa_m * sum(omega_i^3).
template <typename Scalar>
Scalar rotor_power(const BasicRotorSpeeds<Scalar>& omega, const BasicCraftParams<Scalar>& c) {
  return c.kappa_m * omega.array().cube().sum();
}

/// Body-to-world rotation for ZYX (yaw-pitch-roll) Euler angles.
template <typename Scalar>
Mat3<Scalar> body_to_world(const Vec3<Scalar>& theta) {
  using std::cos;
  using std::sin;
  const Scalar cr = cos(theta.x()), sr = sin(theta.x());
  const Scalar cp = cos(theta.y()), sp = sin(theta.y());
  const Scalar cy = cos(theta.z()), sy = sin(theta.z());
  Mat3<Scalar> r;
  // clang-format off
  r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
       sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
           -sp,                cp * sr,                cp * cr;
  // clang-format on
  return r;
}

template <typename Scalar>
Vec3<Scalar> wind3(const Vec2<Scalar>& d) {
  return {d.x(), d.y(), Scalar(0)};
}

/// Aerodynamic drag on the airframe for a given relative air velocity.
template <typename Scalar>
Vec3<Scalar> drag_force(const Vec3<Scalar>& v, const Vec2<Scalar>& d, const BasicCraftParams<Scalar>& c) {
  const Vec3<Scalar> rel = v - wind3(d);
  return -c.drag_factor() * rel.norm() * rel;
}

/// One explicit-Euler step of the rigid-body quadrotor under wind `d`.
template <typename Scalar>
BasicUavState<Scalar> step_dynamics(const BasicUavState<Scalar>& x, const BasicInputVector<Scalar>& u,
                                    const Vec2<Scalar>& d, const BasicCraftParams<Scalar>& c, Scalar t_s) {
  using std::abs;
  using std::cos;
  using std::sin;
  using std::tan;
  const Scalar half_pi = Scalar(1.5707963267948966);
  if (!(t_s > 0)) throw std::invalid_argument("sampling period must be positive");
  if (!(abs(x.theta.y()) < half_pi)) throw SingularityError("pitch at +-pi/2");

  const Mat3<Scalar> rot = body_to_world(x.theta);
  const Vec3<Scalar> thrust = rot.col(2) * u[0];
  Vec3<Scalar> acc = (thrust + drag_force(x.v, d, c)) / c.mass_kg;
  acc.z() -= c.gravity;

  const Scalar cr = cos(x.theta.x()), sr = sin(x.theta.x());
  const Scalar cp = cos(x.theta.y()), tp = tan(x.theta.y());
  const Vec3<Scalar>& w = x.omega;
  const Vec3<Scalar> euler_rate{w.x() + sr * tp * w.y() + cr * tp * w.z(), cr * w.y() - sr * w.z(),
                                (sr * w.y() + cr * w.z()) / cp};

  const Vec3<Scalar> inertia = c.inertia_diagonal();
  const Vec3<Scalar> moments = u.template tail<3>();
  const Vec3<Scalar> gyro = w.cross(inertia.cwiseProduct(w));
  const Vec3<Scalar> omega_dot = (moments - gyro).cwiseQuotient(inertia);

  BasicUavState<Scalar> next;
  next.p = x.p + x.v * t_s;
  next.v = x.v + acc * t_s;
  next.theta = x.theta + euler_rate * t_s;
  next.omega = x.omega + omega_dot * t_s;
  if (!(abs(next.theta.y()) < half_pi)) throw SingularityError("pitch left (-pi/2, pi/2)");
  return next;
}

/// Airspeed reached at full thrust in steady level flight.
template <typename Scalar>
Scalar max_relative_speed(const BasicCraftParams<Scalar>& c) {
  using std::sqrt;
  const Scalar fmax = c.max_thrust();
  const Scalar fg = c.weight();
  if (fmax < fg) throw CannotLiftError("maximum thrust below weight");
  return sqrt(sqrt(fmax * fmax - fg * fg) / c.drag_factor());
}

/// Ground speed along `travel_dir` when flying at `airspeed` in wind `d` and
/// holding course. Empty when the crosswind exceeds the airspeed or the
/// headwind leaves no forward progress.
template <typename Scalar>
std::optional<Scalar> ground_speed(Scalar airspeed, const Vec2<Scalar>& d, const Vec2<Scalar>& travel_dir) {
  using std::abs;
  using std::sqrt;
  const Vec2<Scalar> dir = travel_dir.normalized();
  const Scalar along = d.dot(dir);                                    // |d| cos(theta)
  const Scalar across = abs(d.x() * dir.y() - d.y() * dir.x());       // |d| sin(theta)
  const Scalar radicand = airspeed * airspeed - across * across;
  if (!(radicand > 0)) return std::nullopt;
  const Scalar v = sqrt(radicand) + along;
  if (!(v > 0)) return std::nullopt;
  return v;
}

/// Energy to fly from p_i to p_j at full power in steady wind `d`.
template <typename Scalar>
BasicEnergy<Scalar> travel_energy(const Vec2<Scalar>& p_i, const Vec2<Scalar>& p_j, const Vec2<Scalar>& d,
                                  const BasicCraftParams<Scalar>& c) {
  const Vec2<Scalar> delta = p_j - p_i;
  const Scalar dist = delta.norm();
  if (dist == 0) return BasicEnergy<Scalar>(Scalar(0));
  const Scalar v_r = max_relative_speed(c);
  const auto v_a = ground_speed(v_r, d, delta);
  if (!v_a) return BasicEnergy<Scalar>::infeasible();
  return BasicEnergy<Scalar>(c.max_power() * dist / *v_a);
}

/// Sum of rotor power over a sequence of inputs held for t_s each.
template <typename Scalar>
BasicEnergy<Scalar> piecewise_energy(std::span<const BasicInputVector<Scalar>> inputs,
                                     const BasicCraftParams<Scalar>& c, Scalar t_s) {
  Scalar total = 0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    try {
      total += rotor_power(mixer_inverse(inputs[k], c), c) * t_s;
    } catch (const UnrealizableInputError& e) {
      throw UnrealizableInputError(e.rotor(), std::string(e.what()) + " at step " + std::to_string(k),
                                   static_cast<TimeIndex>(k));
    }
  }
  return BasicEnergy<Scalar>(total);
}

}  // namespace uavroute
