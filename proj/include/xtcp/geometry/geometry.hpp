#pragma once

#include <span>
#include <vector>

#include "xtcp/sim/rng.hpp"
#include "xtcp/sim/sim_time.hpp"

namespace xtcp {

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2D&) const = default;
};

double distance(Point2D a, Point2D b);

/// Axis-aligned rectangle, closed on all sides.
struct Obstacle {
  Point2D min_corner;
  Point2D max_corner;

  bool operator==(const Obstacle&) const = default;

  bool valid() const;
  bool contains(Point2D p) const;
  /// True when the two rectangles share interior area or a boundary.
  bool overlaps(const Obstacle& other) const;
};

/// Deployment area with its lower-left corner at the origin.
struct Area {
  double width = 0.0;
  double height = 0.0;
};

/// Straight-line motion at constant speed.
struct Trajectory {
  Point2D start;
  Point2D heading{1.0, 0.0};  // unit vector
  double speed = 0.0;         // m/s
  SimTime start_time;

  /// Normalizes `heading`; throws ConfigError for a zero heading, a
  /// negative or non-finite speed.
  static Trajectory make(Point2D start, Point2D heading, double speed,
                         SimTime start_time = SimTime::zero());
};

/// Throws ConfigError if `t` precedes the trajectory start.
Point2D position_at(const Trajectory& traj, SimTime t);

/// Line-of-sight test between UE and eNB: true iff the open segment between
/// them intersects none of the obstacles (slab method).
bool is_los(Point2D ue, Point2D enb, std::span<const Obstacle> obstacles);

struct SizeRange {
  double min_size = 5.0;
  double max_size = 20.0;
};

/// Places `count` pairwise non-overlapping rectangles inside `area` by
/// rejection sampling, also avoiding the `keep_out` rectangles (fixed
/// obstacles, walkways). Throws ConfigError after 10,000 rejections for one
/// obstacle.
std::vector<Obstacle> generate_obstacles(RngStream& rng, const Area& area, std::size_t count,
                                         SizeRange sizes, std::span<const Obstacle> keep_out = {});

}  // namespace xtcp
