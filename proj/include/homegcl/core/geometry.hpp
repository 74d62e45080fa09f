#pragma once

#include <span>
#include <vector>

namespace homegcl {

// Planar coordinates in meters.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

using Polyline = std::vector<Point>;
// Closed ring: the first point is repeated as the last.
using Ring = std::vector<Point>;

double distance(Point a, Point b);

double point_segment_distance(Point p, Point a, Point b);

double point_polyline_distance(Point p, std::span<const Point> line);

double polyline_length(std::span<const Point> line);

// Point halfway along the polyline by arc length.
Point arc_length_midpoint(std::span<const Point> line);

// Shoelace signed area of a closed ring; positive for counter-clockwise.
double signed_area(std::span<const Point> ring);

// Area centroid of a closed ring.
Point ring_centroid(std::span<const Point> ring);

// True when p lies inside the ring or on its boundary (within tol meters).
bool point_in_ring(Point p, std::span<const Point> ring, double tol = 1e-9);

// Distance from p to the nearest edge of the ring.
double point_ring_boundary_distance(Point p, std::span<const Point> ring);

bool ring_is_closed(std::span<const Point> ring);

// True when no two non-adjacent ring edges intersect.
bool ring_is_simple(std::span<const Point> ring);

// Local equirectangular projection of (lon, lat) degrees to meters around an
// origin.
struct Equirectangular {
  double lon0 = 0.0;
  double lat0 = 0.0;

  Point project(double lon, double lat) const;
};

// Two distances are treated as equal when they differ by less than this.
// Used by every nearest-entity search so ties resolve to the lowest id.
bool nearly_equal_distance(double a, double b);

}  // namespace homegcl
