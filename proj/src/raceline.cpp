#include "ncbench/raceline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ncbench/io.hpp"

namespace ncbench {

Raceline Raceline::from_points(std::vector<Waypoint> pts) {
  // Drop an explicit duplicate closing point.
  if (pts.size() >= 2) {
    const auto& a = pts.front();
    const auto& b = pts.back();
    if (std::hypot(a.x - b.x, a.y - b.y) < 1e-9) pts.pop_back();
  }
  if (pts.size() < 3) throw ConfigError("raceline needs at least 3 waypoints");

  Raceline line;
  line.pts_ = std::move(pts);
  const int n = line.size();
  line.cum_.resize(n);
  line.len_.resize(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (line.pts_[i].v < 0.0)
      throw ConfigError("raceline: suggested speeds must be non-negative");
    line.cum_[i] = s;
    const auto& a = line.pts_[i];
    const auto& b = line.pts_[(i + 1) % n];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (len <= 0.0) throw ConfigError("raceline: zero-length segment");
    line.len_[i] = len;
    s += len;
  }
  line.total_ = s;
  return line;
}

Raceline Raceline::from_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string header;
  if (!std::getline(in, header)) throw IoError("empty raceline file: " + path.string());
  std::vector<Waypoint> pts;
  std::string row;
  int lineno = 1;
  while (std::getline(in, row)) {
    ++lineno;
    if (row.empty() || row[0] == '#') continue;
    const auto cols = split_csv(row);
    if (cols.size() < 3)
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": expected x,y,v_x");
    pts.push_back({parse_double(cols[0]), parse_double(cols[1]), parse_double(cols[2])});
  }
  return from_points(std::move(pts));
}

void Raceline::to_csv(const std::filesystem::path& path) const {
  std::string out = "x,y,v_x\n";
  for (const auto& p : pts_) {
    out += format_double(p.x) + "," + format_double(p.y) + "," + format_double(p.v) + "\n";
  }
  write_file(path, out);
}

double Raceline::wrap_s(double s) const {
  s = std::fmod(s, total_);
  if (s < 0.0) s += total_;
  return s;
}

Waypoint Raceline::point_at(double s) const {
  s = wrap_s(s);
  const int n = size();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  const int i = static_cast<int>(it - cum_.begin()) - 1;
  const double t = (s - cum_[i]) / len_[i];
  const auto& a = pts_[i];
  const auto& b = pts_[(i + 1) % n];
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.v + t * (b.v - a.v)};
}

void Raceline::tangent_at(double s, double* tx, double* ty) const {
  s = wrap_s(s);
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  const int i = static_cast<int>(it - cum_.begin()) - 1;
  const auto& a = pts_[i];
  const auto& b = pts_[(i + 1) % size()];
  *tx = (b.x - a.x) / len_[i];
  *ty = (b.y - a.y) / len_[i];
}

RacelineProjection Raceline::project_range(double x, double y, int seg_begin,
                                           int seg_count) const {
  const int n = size();
  RacelineProjection best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < seg_count; ++k) {
    const int i = ((seg_begin + k) % n + n) % n;
    const auto& a = pts_[i];
    const auto& b = pts_[(i + 1) % n];
    const double ex = b.x - a.x;
    const double ey = b.y - a.y;
    const double L2 = ex * ex + ey * ey;
    double t = ((x - a.x) * ex + (y - a.y) * ey) / L2;
    t = std::clamp(t, 0.0, 1.0);
    const double cx = a.x + t * ex;
    const double cy = a.y + t * ey;
    const double dx = x - cx;
    const double dy = y - cy;
    const double d2 = dx * dx + dy * dy;
    const double s_here = cum_[i] + t * len_[i];
    // Strict improvement keeps the smaller-s candidate on exact ties.
    const bool better =
        d2 < best_d2 - 1e-15 ||
        (std::abs(d2 - best_d2) <= 1e-15 && s_here < best.s);
    if (better) {
      best_d2 = d2;
      best.s = s_here;
      best.d = std::sqrt(d2);
      best.px = cx;
      best.py = cy;
      best.tx = ex / len_[i];
      best.ty = ey / len_[i];
      best.dv_ds = (pts_[(i + 1) % n].v - a.v) / len_[i];
      best.v = a.v + t * (pts_[(i + 1) % n].v - a.v);
    }
  }
  return best;
}

RacelineProjection Raceline::nearest(double x, double y) const {
  return project_range(x, y, 0, size());
}

RacelineProjection Raceline::nearest_hinted(double x, double y, double s_hint,
                                            double window) const {
  const int n = size();
  const double s0 = wrap_s(s_hint);
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s0);
  const int center = static_cast<int>(it - cum_.begin()) - 1;
  const double avg_len = total_ / n;
  const int half = std::min(n / 2, static_cast<int>(window / avg_len) + 2);
  auto local = project_range(x, y, center - half, std::min(n, 2 * half + 1));
  if (local.d > window * 0.9) return nearest(x, y);  // lost the hint
  return local;
}

namespace {

WindowPoint to_body_frame(double wx, double wy, const CarState& car) {
  const double dx = wx - car.x;
  const double dy = wy - car.y;
  const double c = std::cos(car.yaw);
  const double s = std::sin(car.yaw);
  return {c * dx + s * dy, -s * dx + c * dy, 0.0};
}

}  // namespace

WaypointWindow make_window_at(const Raceline& line, const CarState& car,
                              double F, double s_car) {
  if (F <= 0.0) throw ConfigError("window: speed factor must be positive");
  if (line.size() < kWindowSize)
    throw ConfigError("raceline has fewer than " + std::to_string(kWindowSize) +
                      " waypoints");
  WaypointWindow w;
  w.anchor_x = car.x;
  w.anchor_y = car.y;
  w.anchor_yaw = car.yaw;
  w.anchor_s = line.wrap_s(s_car);
  w.speed_factor = F;
  for (int i = 0; i < kWindowSize; ++i) {
    const double s = s_car + (i + 1) * w.spacing;
    const Waypoint p = line.point_at(s);
    WindowPoint wp = to_body_frame(p.x, p.y, car);
    wp.v = p.v * F;
    w.pts[i] = wp;
  }
  return w;
}

WaypointWindow make_window(const Raceline& line, const CarState& car, double F) {
  const auto proj = line.nearest(car.x, car.y);
  return make_window_at(line, car, F, proj.s);
}

LapTimer::LapTimer(double loop_length, double backward_tolerance)
    : total_(loop_length), tol_(backward_tolerance) {
  if (loop_length <= 0.0) throw ConfigError("LapTimer: loop length must be positive");
}

void LapTimer::feed(double t, double s) {
  if (!have_prev_) {
    have_prev_ = true;
    prev_t_ = t;
    prev_s_ = s;
    return;
  }
  const double ds = s - prev_s_;
  if (ds < -total_ / 2.0) {
    // Wrapped past the start line; interpolate the crossing instant.
    const double before = total_ - prev_s_;
    const double after = s;
    const double frac = (before + after) > 0.0 ? before / (before + after) : 1.0;
    const double t_cross = prev_t_ + frac * (t - prev_t_);
    if (have_crossing_) {
      if (current_valid_) {
        laps_.push_back(t_cross - last_crossing_t_);
      } else {
        ++invalid_;
      }
    }
    have_crossing_ = true;
    last_crossing_t_ = t_cross;
    current_valid_ = true;
  } else if (ds < -tol_) {
    current_valid_ = false;  // car moving backwards along the line
  }
  prev_t_ = t;
  prev_s_ = s;
}

}  // namespace ncbench
