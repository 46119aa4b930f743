#pragma once

#include <cstdint>
#include <vector>

namespace locauth::sim {

inline constexpr double kDefaultRangeM = 10.0;

struct Point2D {
  double x_m = 0.0;
  double y_m = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

double distance(const Point2D& a, const Point2D& b);

struct Waypoint {
  std::int64_t t_us = 0;
  Point2D pos;
};

/// Ordered waypoints with strictly increasing times.
using Trace = std::vector<Waypoint>;

/// Throws std::invalid_argument on an empty trace or non-increasing times.
void validate_trace(const Trace& trace);

/// Piecewise-linear position, clamped to the first/last waypoint outside the trace.
Point2D position_at(const Trace& trace, std::int64_t t_us);

/// Inclusive: a point exactly `range_m` away is in range.
bool in_range(const Point2D& beacon, double range_m, const Point2D& p);

}  // namespace locauth::sim
