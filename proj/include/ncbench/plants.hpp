#pragma once

#include <cmath>
#include <deque>
#include <utility>
#include <vector>

#include "ncbench/errors.hpp"

namespace ncbench {

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * M_PI);
  if (a > M_PI) a -= 2.0 * M_PI;
  if (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

// ---------------------------------------------------------------------------
// Cartpole
// ---------------------------------------------------------------------------

// theta = 0 is upright, wrapped to (-pi, pi]. Units are SI throughout.
struct CartpoleState {
  double x = 0.0;      // cart position [m]
  double v = 0.0;      // cart velocity [m/s]
  double theta = 0.0;  // pole angle [rad], 0 = upright
  double omega = 0.0;  // pole angular velocity [rad/s]
};

// The cart is acceleration-controlled: the normalized command u in [-1, 1]
// maps to a cart acceleration u * u_max. The pole is modeled as a uniform rod
// pivoted at the cart, so the effective pendulum length is 2/3 of the rod.
struct CartpoleParams {
  double pole_length = 0.395;   // full rod length [m]
  double pole_mass = 0.087;     // [kg]
  double cart_mass = 0.230;     // [kg]
  double pole_damping = 0.03;   // angular velocity damping [1/s]
  double cart_damping = 0.0;    // cart velocity damping [1/s]
  double track_length = 0.44;   // usable travel, cart position in +-track/2 [m]
  double u_max = 20.0;          // max commanded cart acceleration [m/s^2]

  double effective_length() const { return 2.0 * pole_length / 3.0; }
  void validate() const;
};

struct CartpoleDeriv {
  double dx, dv, dtheta, domega;
};

// Cartpole ODE with cart acceleration u * u_max; u must be in [-1, 1].
CartpoleDeriv cartpole_derivative(const CartpoleState& s, double u,
                                  const CartpoleParams& p);

// Semi-implicit Euler: velocities update from the current derivatives, then
// positions advance with the updated velocities. Control is zero-order held
// over the whole step; theta is wrapped after each substep.
CartpoleState cartpole_step(const CartpoleState& s, double u, double dt,
                            int substeps, const CartpoleParams& p);

// Kinetic + potential energy; potential is zero with the pole hanging.
double cartpole_energy(const CartpoleState& s, const CartpoleParams& p);

// ---------------------------------------------------------------------------
// Single-track car
// ---------------------------------------------------------------------------

struct CarState {
  double x = 0.0;        // [m]
  double y = 0.0;        // [m]
  double yaw = 0.0;      // heading [rad], wrapped to (-pi, pi]
  double v_x = 0.0;      // longitudinal speed [m/s]
  double omega_z = 0.0;  // yaw rate [rad/s] (kinematic, derived from v_x, theta_s)
  double theta_s = 0.0;  // steering angle [rad]
  double beta = 0.0;     // slip angle [rad] (kinematic, derived from theta_s)
};

struct CarCommand {
  double u_vel = 0.0;    // desired longitudinal speed [m/s]
  double u_theta = 0.0;  // desired steering angle [rad]
};

// Kinematic single-track model with first-order servo and drivetrain lag.
// Steering and speed track their commands through rate/acceleration limits;
// the slip angle is computed kinematically from the steering geometry.
struct CarParams {
  double wheelbase = 0.324;        // [m]
  double lr = 0.17145;             // rear axle to reference point [m]
  double steer_limit = 0.4189;     // |theta_s| bound [rad]
  double steer_rate_limit = 3.2;   // [rad/s]
  double steer_tau = 0.10;         // servo first-order time constant [s]
  double accel_limit = 7.0;        // [m/s^2]
  double vel_tau = 0.25;           // drivetrain first-order time constant [s]
  double v_max = 8.0;              // command clamp [m/s]

  void validate() const;
};

struct CarDeriv {
  double dx, dy, dyaw, dv_x, dtheta_s;
};

CarDeriv car_derivative(const CarState& s, const CarCommand& cmd,
                        const CarParams& p);

// Same semi-implicit scheme as the cartpole: v_x and theta_s first, then the
// pose with the updated values. omega_z and beta are refreshed after stepping.
CarState car_step(const CarState& s, const CarCommand& cmd, double dt,
                  int substeps, const CarParams& p);

double car_slip_angle(double theta_s, const CarParams& p);
double car_yaw_rate(double v_x, double theta_s, const CarParams& p);

// ---------------------------------------------------------------------------
// Actuation delay
// ---------------------------------------------------------------------------

// FIFO queue of pending commands; a command issued at time t becomes the
// active command exactly `delay` seconds later. delay == 0 is a passthrough.
template <class T>
class DelayLine {
 public:
  DelayLine() = default;
  DelayLine(double delay, T initial) : delay_(delay), current_(std::move(initial)) {
    if (delay_ < 0.0) throw ConfigError("DelayLine: negative delay");
  }

  void push(double t_issue, T u) {
    if (delay_ <= 0.0) {
      current_ = std::move(u);
    } else {
      pending_.emplace_back(t_issue + delay_, std::move(u));
    }
  }

  // Active command at time t; consumes due entries in FIFO order.
  const T& at(double t) {
    while (!pending_.empty() && pending_.front().first <= t + 1e-12) {
      current_ = std::move(pending_.front().second);
      pending_.pop_front();
    }
    return current_;
  }

  double delay() const { return delay_; }

 private:
  double delay_ = 0.0;
  T current_{};
  std::deque<std::pair<double, T>> pending_;
};

// ---------------------------------------------------------------------------
// Cartpole sensing
// ---------------------------------------------------------------------------

struct SensorModel {
  double position_quantum = 11880.0;  // counts per meter
  double angle_quantum = 4096.0;      // counts per revolution
  double velocity_window_s = 0.010;   // velocity estimated over this window
  int median_window = 1;              // odd sample count for the angle median

  void validate() const;
};

// Stateless feature quantization matching the sensor resolution: positions
// snap to their count grids, velocity-like components to the resolution a
// windowed difference of quantized positions can deliver.
CartpoleState observe(const CartpoleState& s, const SensorModel& m);

// Closed-loop sensor simulation. Push the true state every plant substep;
// observed() returns quantized positions plus velocities differenced over the
// configured window (which adds the expected window/2 estimation delay).
class CartpoleSensor {
 public:
  explicit CartpoleSensor(const SensorModel& m);

  void reset();
  void push(double t, const CartpoleState& s);
  CartpoleState observed() const;

 private:
  struct Sample {
    double t, x_q, theta_q;
  };
  SensorModel model_;
  std::deque<Sample> history_;
  std::deque<double> raw_angles_;
};

}  // namespace ncbench
