#include "xtcp/geometry/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "xtcp/error.hpp"

namespace xtcp {

double distance(Point2D a, Point2D b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool Obstacle::valid() const {
  return std::isfinite(min_corner.x) && std::isfinite(min_corner.y) &&
         std::isfinite(max_corner.x) && std::isfinite(max_corner.y) &&
         min_corner.x < max_corner.x && min_corner.y < max_corner.y;
}

bool Obstacle::contains(Point2D p) const {
  return p.x >= min_corner.x && p.x <= max_corner.x && p.y >= min_corner.y &&
         p.y <= max_corner.y;
}

bool Obstacle::overlaps(const Obstacle& o) const {
  return min_corner.x <= o.max_corner.x && o.min_corner.x <= max_corner.x &&
         min_corner.y <= o.max_corner.y && o.min_corner.y <= max_corner.y;
}

Trajectory Trajectory::make(Point2D start, Point2D heading, double speed, SimTime start_time) {
  const double norm = std::hypot(heading.x, heading.y);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ConfigError("trajectory.heading must be a non-zero finite vector");
  }
  if (!(speed >= 0.0) || !std::isfinite(speed)) {
    throw ConfigError("trajectory.speed must be finite and >= 0, got " + std::to_string(speed));
  }
  if (!std::isfinite(start.x) || !std::isfinite(start.y)) {
    throw ConfigError("trajectory.start must be finite");
  }
  return Trajectory{start, {heading.x / norm, heading.y / norm}, speed, start_time};
}

Point2D position_at(const Trajectory& traj, SimTime t) {
  if (t < traj.start_time) {
    throw ConfigError("position_at: t=" + std::to_string(t.ns()) +
                      "ns precedes trajectory start");
  }
  const double travelled = traj.speed * (t - traj.start_time).seconds();
  return {traj.start.x + traj.heading.x * travelled, traj.start.y + traj.heading.y * travelled};
}

namespace {

// Parametric slab clip of p(s) = a + s*(b - a) against one rectangle.
// Returns true when the clipped interval intersects the open range (0, 1).
bool segment_hits_box(Point2D a, Point2D b, const Obstacle& box) {
  double s_enter = -std::numeric_limits<double>::infinity();
  double s_exit = std::numeric_limits<double>::infinity();
  const double origin[2] = {a.x, a.y};
  const double dir[2] = {b.x - a.x, b.y - a.y};
  const double lo[2] = {box.min_corner.x, box.min_corner.y};
  const double hi[2] = {box.max_corner.x, box.max_corner.y};
  for (int axis = 0; axis < 2; ++axis) {
    if (dir[axis] == 0.0) {
      if (origin[axis] < lo[axis] || origin[axis] > hi[axis]) return false;
      continue;
    }
    double s0 = (lo[axis] - origin[axis]) / dir[axis];
    double s1 = (hi[axis] - origin[axis]) / dir[axis];
    if (s0 > s1) std::swap(s0, s1);
    s_enter = std::max(s_enter, s0);
    s_exit = std::min(s_exit, s1);
    if (s_enter > s_exit) return false;
  }
  return s_exit > 0.0 && s_enter < 1.0;
}

}  // namespace

bool is_los(Point2D ue, Point2D enb, std::span<const Obstacle> obstacles) {
  return std::none_of(obstacles.begin(), obstacles.end(),
                      [&](const Obstacle& o) { return segment_hits_box(ue, enb, o); });
}

std::vector<Obstacle> generate_obstacles(RngStream& rng, const Area& area, std::size_t count,
                                         SizeRange sizes, std::span<const Obstacle> keep_out) {
  if (!(sizes.min_size > 0.0) || sizes.max_size < sizes.min_size) {
    throw ConfigError("obstacle size range must satisfy 0 < min_size <= max_size");
  }
  if (sizes.max_size > area.width || sizes.max_size > area.height) {
    throw ConfigError("obstacle max_size exceeds the deployment area");
  }
  constexpr int kMaxRejections = 10'000;
  std::vector<Obstacle> placed;
  placed.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    int rejections = 0;
    for (;;) {
      const double w = rng.uniform(sizes.min_size, sizes.max_size);
      const double h = rng.uniform(sizes.min_size, sizes.max_size);
      const double x = rng.uniform(0.0, area.width - w);
      const double y = rng.uniform(0.0, area.height - h);
      const Obstacle candidate{{x, y}, {x + w, y + h}};
      auto hits = [&](const Obstacle& o) { return o.overlaps(candidate); };
      const bool clash = std::any_of(placed.begin(), placed.end(), hits) ||
                         std::any_of(keep_out.begin(), keep_out.end(), hits);
      if (!clash) {
        placed.push_back(candidate);
        break;
      }
      if (++rejections >= kMaxRejections) {
        throw ConfigError("generate_obstacles: area too dense, could not place obstacle " +
                          std::to_string(i + 1) + " of " + std::to_string(count));
      }
    }
  }
  return placed;
}

}  // namespace xtcp
