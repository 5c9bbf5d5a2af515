#include "ncbench/plants.hpp"

#include <algorithm>
#include <cmath>

namespace ncbench {

namespace {

bool finite(const CartpoleState& s) {
  return std::isfinite(s.x) && std::isfinite(s.v) && std::isfinite(s.theta) &&
         std::isfinite(s.omega);
}

bool finite(const CarState& s) {
  return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.yaw) &&
         std::isfinite(s.v_x) && std::isfinite(s.theta_s);
}

constexpr double kGravity = 9.81;

double quantize_to(double value, double quantum) {
  if (quantum <= 0.0) return value;
  return std::nearbyint(value * quantum) / quantum;
}

}  // namespace

void CartpoleParams::validate() const {
  if (pole_length <= 0 || pole_mass <= 0 || cart_mass <= 0 || track_length <= 0)
    throw ConfigError("cartpole params: masses and lengths must be positive");
  if (u_max <= 0) throw ConfigError("cartpole params: u_max must be positive");
}

CartpoleDeriv cartpole_derivative(const CartpoleState& s, double u,
                                  const CartpoleParams& p) {
  if (!finite(s)) throw NumericError("cartpole_derivative: non-finite state");
  const double a = u * p.u_max;
  const double l = p.effective_length();
  CartpoleDeriv d;
  d.dx = s.v;
  d.dv = a - p.cart_damping * s.v;
  d.dtheta = s.omega;
  d.domega = (kGravity * std::sin(s.theta) - a * std::cos(s.theta)) / l -
             p.pole_damping * s.omega;
  return d;
}

CartpoleState cartpole_step(const CartpoleState& s, double u, double dt,
                            int substeps, const CartpoleParams& p) {
  if (dt <= 0.0 || substeps < 1)
    throw ConfigError("cartpole_step: dt must be positive, substeps >= 1");
  const double h = dt / substeps;
  CartpoleState cur = s;
  for (int i = 0; i < substeps; ++i) {
    const CartpoleDeriv d = cartpole_derivative(cur, u, p);
    cur.omega += h * d.domega;
    cur.v += h * d.dv;
    cur.theta = wrap_angle(cur.theta + h * cur.omega);
    cur.x += h * cur.v;
  }
  if (!finite(cur)) throw NumericError("cartpole_step: state diverged");
  return cur;
}

double cartpole_energy(const CartpoleState& s, const CartpoleParams& p) {
  const double L = p.pole_length;
  const double inertia = p.pole_mass * L * L / 3.0;  // uniform rod about the pivot
  const double kinetic =
      0.5 * inertia * s.omega * s.omega + 0.5 * p.cart_mass * s.v * s.v;
  const double potential =
      p.pole_mass * kGravity * (L / 2.0) * (1.0 + std::cos(s.theta));
  return kinetic + potential;
}

void CarParams::validate() const {
  if (wheelbase <= 0 || lr <= 0 || lr >= wheelbase)
    throw ConfigError("car params: need 0 < lr < wheelbase");
  if (steer_limit <= 0 || steer_rate_limit <= 0 || steer_tau <= 0 ||
      accel_limit <= 0 || vel_tau <= 0 || v_max <= 0)
    throw ConfigError("car params: limits and time constants must be positive");
}

double car_slip_angle(double theta_s, const CarParams& p) {
  return std::atan(p.lr * std::tan(theta_s) / p.wheelbase);
}

double car_yaw_rate(double v_x, double theta_s, const CarParams& p) {
  return v_x * std::tan(theta_s) / p.wheelbase;
}

CarDeriv car_derivative(const CarState& s, const CarCommand& cmd,
                        const CarParams& p) {
  if (!finite(s)) throw NumericError("car_derivative: non-finite state");
  const double u_theta = std::clamp(cmd.u_theta, -p.steer_limit, p.steer_limit);
  const double u_vel = std::clamp(cmd.u_vel, 0.0, p.v_max);
  CarDeriv d;
  d.dtheta_s = std::clamp((u_theta - s.theta_s) / p.steer_tau,
                          -p.steer_rate_limit, p.steer_rate_limit);
  d.dv_x = std::clamp((u_vel - s.v_x) / p.vel_tau, -p.accel_limit, p.accel_limit);
  d.dyaw = car_yaw_rate(s.v_x, s.theta_s, p);
  d.dx = s.v_x * std::cos(s.yaw);
  d.dy = s.v_x * std::sin(s.yaw);
  return d;
}

CarState car_step(const CarState& s, const CarCommand& cmd, double dt,
                  int substeps, const CarParams& p) {
  if (dt <= 0.0 || substeps < 1)
    throw ConfigError("car_step: dt must be positive, substeps >= 1");
  const double h = dt / substeps;
  CarState cur = s;
  for (int i = 0; i < substeps; ++i) {
    const CarDeriv d = car_derivative(cur, cmd, p);
    cur.v_x += h * d.dv_x;
    cur.theta_s = std::clamp(cur.theta_s + h * d.dtheta_s, -p.steer_limit,
                             p.steer_limit);
    cur.yaw = wrap_angle(cur.yaw + h * car_yaw_rate(cur.v_x, cur.theta_s, p));
    cur.x += h * cur.v_x * std::cos(cur.yaw);
    cur.y += h * cur.v_x * std::sin(cur.yaw);
  }
  cur.omega_z = car_yaw_rate(cur.v_x, cur.theta_s, p);
  cur.beta = car_slip_angle(cur.theta_s, p);
  if (!finite(cur)) throw NumericError("car_step: state diverged");
  return cur;
}

void SensorModel::validate() const {
  if (position_quantum <= 0 || angle_quantum <= 0)
    throw ConfigError("sensor model: quanta must be positive");
  if (velocity_window_s <= 0)
    throw ConfigError("sensor model: velocity window must be positive");
  if (median_window < 1 || median_window % 2 == 0)
    throw ConfigError("sensor model: median window must be odd and >= 1");
}

CartpoleState observe(const CartpoleState& s, const SensorModel& m) {
  const double angle_counts_per_rad = m.angle_quantum / (2.0 * M_PI);
  CartpoleState o;
  o.x = quantize_to(s.x, m.position_quantum);
  o.theta = wrap_angle(quantize_to(s.theta, angle_counts_per_rad));
  // A windowed difference of quantized positions resolves velocity in steps
  // of one count per window.
  o.v = quantize_to(s.v, m.position_quantum * m.velocity_window_s);
  o.omega = quantize_to(s.omega, angle_counts_per_rad * m.velocity_window_s);
  return o;
}

CartpoleSensor::CartpoleSensor(const SensorModel& m) : model_(m) {
  model_.validate();
}

void CartpoleSensor::reset() {
  history_.clear();
  raw_angles_.clear();
}

void CartpoleSensor::push(double t, const CartpoleState& s) {
  const double angle_counts_per_rad = model_.angle_quantum / (2.0 * M_PI);
  raw_angles_.push_back(quantize_to(s.theta, angle_counts_per_rad));
  while (static_cast<int>(raw_angles_.size()) > model_.median_window)
    raw_angles_.pop_front();

  // Median over recent angle samples, unwrapped around the newest one.
  const double ref = raw_angles_.back();
  std::vector<double> win(raw_angles_.begin(), raw_angles_.end());
  for (double& a : win) a = ref + wrap_angle(a - ref);
  std::nth_element(win.begin(), win.begin() + win.size() / 2, win.end());
  const double theta_med = wrap_angle(win[win.size() / 2]);

  history_.push_back({t, quantize_to(s.x, model_.position_quantum), theta_med});
  const double keep_from = t - 2.0 * model_.velocity_window_s;
  while (history_.size() > 2 && history_.front().t < keep_from)
    history_.pop_front();
}

CartpoleState CartpoleSensor::observed() const {
  if (history_.empty()) return {};
  const Sample& now = history_.back();
  CartpoleState o;
  o.x = now.x_q;
  o.theta = now.theta_q;
  // Oldest sample within the averaging window (fall back to what exists).
  const double t_from = now.t - model_.velocity_window_s;
  const Sample* past = &history_.front();
  for (const auto& smp : history_) {
    if (smp.t >= t_from - 1e-12) {
      past = &smp;
      break;
    }
  }
  const double dt = now.t - past->t;
  if (dt > 0.0) {
    o.v = (now.x_q - past->x_q) / dt;
    o.omega = wrap_angle(now.theta_q - past->theta_q) / dt;
  }
  return o;
}

}  // namespace ncbench
