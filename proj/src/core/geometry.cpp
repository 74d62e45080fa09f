#include "homegcl/core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace homegcl {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double point_segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, a);
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, Point{a.x + t * dx, a.y + t * dy});
}

double point_polyline_distance(Point p, std::span<const Point> line) {
  if (line.empty()) return std::numeric_limits<double>::infinity();
  if (line.size() == 1) return distance(p, line[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    best = std::min(best, point_segment_distance(p, line[i], line[i + 1]));
  }
  return best;
}

double polyline_length(std::span<const Point> line) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) total += distance(line[i], line[i + 1]);
  return total;
}

Point arc_length_midpoint(std::span<const Point> line) {
  if (line.empty()) throw std::invalid_argument("arc_length_midpoint: empty polyline");
  const double half = 0.5 * polyline_length(line);
  double walked = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const double step = distance(line[i], line[i + 1]);
    if (step > 0.0 && walked + step >= half) {
      const double t = (half - walked) / step;
      return Point{line[i].x + t * (line[i + 1].x - line[i].x),
                   line[i].y + t * (line[i + 1].y - line[i].y)};
    }
    walked += step;
  }
  return line.front();
}

double signed_area(std::span<const Point> ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    twice += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
  }
  return 0.5 * twice;
}

Point ring_centroid(std::span<const Point> ring) {
  const double a = signed_area(ring);
  if (a == 0.0) {
    // Degenerate ring: fall back to the vertex average.
    Point c;
    const std::size_t n = ring.size() > 1 ? ring.size() - 1 : ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      c.x += ring[i].x;
      c.y += ring[i].y;
    }
    c.x /= static_cast<double>(n);
    c.y /= static_cast<double>(n);
    return c;
  }
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const double cross = ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
    cx += (ring[i].x + ring[i + 1].x) * cross;
    cy += (ring[i].y + ring[i + 1].y) * cross;
  }
  return Point{cx / (6.0 * a), cy / (6.0 * a)};
}

bool point_in_ring(Point p, std::span<const Point> ring, double tol) {
  if (ring.size() < 4) return false;
  if (point_ring_boundary_distance(p, ring) <= tol) return true;
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 2; i + 1 < ring.size(); j = i++) {
    const Point a = ring[i];
    const Point b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double point_ring_boundary_distance(Point p, std::span<const Point> ring) {
  return point_polyline_distance(p, ring);
}

bool ring_is_closed(std::span<const Point> ring) {
  return ring.size() >= 2 && ring.front() == ring.back();
}

namespace {

double orient(Point a, Point b, Point c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) {
    return true;
  }
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

bool ring_is_simple(std::span<const Point> ring) {
  if (!ring_is_closed(ring) || ring.size() < 4) return false;
  const std::size_t n = ring.size() - 1;  // number of edges
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1])) return false;
    }
  }
  return true;
}

Point Equirectangular::project(double lon, double lat) const {
  constexpr double kEarthRadius = 6371008.8;
  constexpr double kDeg = std::numbers::pi / 180.0;
  return Point{kEarthRadius * (lon - lon0) * kDeg * std::cos(lat0 * kDeg),
               kEarthRadius * (lat - lat0) * kDeg};
}

bool nearly_equal_distance(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace homegcl
