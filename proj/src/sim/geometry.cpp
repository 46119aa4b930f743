#include "locauth/sim/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace locauth::sim {

double distance(const Point2D& a, const Point2D& b) {
  return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

void validate_trace(const Trace& trace) {
  if (trace.empty()) throw std::invalid_argument("trace has no waypoints");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!std::isfinite(trace[i].pos.x_m) || !std::isfinite(trace[i].pos.y_m)) {
      throw std::invalid_argument("trace waypoint is not finite");
    }
    if (i > 0 && trace[i].t_us <= trace[i - 1].t_us) {
      throw std::invalid_argument("trace times must be strictly increasing");
    }
  }
}

Point2D position_at(const Trace& trace, std::int64_t t_us) {
  if (trace.empty()) throw std::invalid_argument("position_at: empty trace");
  if (t_us <= trace.front().t_us) return trace.front().pos;
  if (t_us >= trace.back().t_us) return trace.back().pos;
  std::size_t i = 1;
  while (trace[i].t_us < t_us) ++i;
  const auto& a = trace[i - 1];
  const auto& b = trace[i];
  const double f = static_cast<double>(t_us - a.t_us) / static_cast<double>(b.t_us - a.t_us);
  return {a.pos.x_m + f * (b.pos.x_m - a.pos.x_m), a.pos.y_m + f * (b.pos.y_m - a.pos.y_m)};
}

bool in_range(const Point2D& beacon, double range_m, const Point2D& p) {
  return distance(beacon, p) <= range_m;
}

}  // namespace locauth::sim
