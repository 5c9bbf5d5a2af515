#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "ncbench/errors.hpp"
#include "ncbench/plants.hpp"

namespace ncbench {

struct Waypoint {
  double x = 0.0;  // [m]
  double y = 0.0;  // [m]
  double v = 0.0;  // suggested longitudinal speed [m/s]
};

inline constexpr int kWindowSize = 20;
inline constexpr double kWindowArc = 8.0;  // meters of raceline ahead

// Closest-point query result on the raceline polyline.
struct RacelineProjection {
  double s = 0.0;      // arc-length coordinate of the closest point [m]
  double d = 0.0;      // perpendicular distance [m]
  double px = 0.0;     // closest point
  double py = 0.0;
  double tx = 1.0;     // unit tangent at the closest point
  double ty = 0.0;
  double v = 0.0;      // suggested speed interpolated at s
  double dv_ds = 0.0;  // suggested-speed slope along the segment
};

// Ordered closed loop of waypoints with cumulative arc length. Immutable
// after construction; all queries are pure.
class Raceline {
 public:
  static Raceline from_points(std::vector<Waypoint> pts);
  static Raceline from_csv(const std::filesystem::path& path);
  void to_csv(const std::filesystem::path& path) const;

  int size() const { return static_cast<int>(pts_.size()); }
  double length() const { return total_; }
  const std::vector<Waypoint>& points() const { return pts_; }
  double cumulative(int i) const { return cum_[i]; }

  double wrap_s(double s) const;
  Waypoint point_at(double s) const;  // position + interpolated speed
  void tangent_at(double s, double* tx, double* ty) const;

  RacelineProjection nearest(double x, double y) const;
  // Same query restricted to segments within +-window meters of arc around
  // s_hint; falls back to the global search if the hinted window loses track.
  RacelineProjection nearest_hinted(double x, double y, double s_hint,
                                    double window = 5.0) const;

 private:
  RacelineProjection project_range(double x, double y, int seg_begin,
                                   int seg_count) const;

  std::vector<Waypoint> pts_;
  std::vector<double> cum_;   // arc length at each waypoint, cum_[0] = 0
  std::vector<double> len_;   // per-segment length, segment i: pts_[i] -> pts_[i+1 mod n]
  double total_ = 0.0;
};

struct WindowPoint {
  double x = 0.0;  // body frame: car at origin, heading along +x
  double y = 0.0;
  double v = 0.0;  // suggested speed, already multiplied by the speed factor
};

// The next kWindowSize points of the raceline resampled at fixed arc spacing
// (kWindowArc / kWindowSize), expressed in the car body frame. The anchor
// pose records the transform used so predicted world positions can be taken
// into the same frame.
struct WaypointWindow {
  std::array<WindowPoint, kWindowSize> pts{};
  double spacing = kWindowArc / kWindowSize;
  double anchor_x = 0.0;
  double anchor_y = 0.0;
  double anchor_yaw = 0.0;
  double anchor_s = 0.0;  // car progress at window creation
  double speed_factor = 1.0;
};

WaypointWindow make_window(const Raceline& line, const CarState& car, double F);
// Variant reusing a known progress coordinate (avoids the global search).
WaypointWindow make_window_at(const Raceline& line, const CarState& car,
                              double F, double s_car);

// Turns a monotone (modulo wraparound) progress signal into lap times. A
// regression of more than `backward_tolerance` meters without wrapping flags
// the lap in progress as invalid; invalid laps are counted but not timed.
class LapTimer {
 public:
  explicit LapTimer(double loop_length, double backward_tolerance = 0.5);

  void feed(double t, double s);
  const std::vector<double>& laps() const { return laps_; }
  int invalid_laps() const { return invalid_; }

 private:
  double total_;
  double tol_;
  bool have_prev_ = false;
  double prev_t_ = 0.0;
  double prev_s_ = 0.0;
  bool have_crossing_ = false;
  double last_crossing_t_ = 0.0;
  bool current_valid_ = true;
  std::vector<double> laps_;
  int invalid_ = 0;
};

}  // namespace ncbench
