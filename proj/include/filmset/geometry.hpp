#pragma once

// Planar geometry helpers used by the floorplan and layout stages.
//
// Everything is templated on the scalar type and works on Eigen fixed-size
// vectors; the rest of the library instantiates them with double.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace filmset {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Box2 = Eigen::AlignedBox2d;
using Box3 = Eigen::AlignedBox3d;
using Triangle = std::array<std::uint32_t, 3>;

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

namespace geometry {

template <typename Scalar>
constexpr Scalar kEpsilon = Scalar(1e-9);

template <typename Scalar>
Scalar cross(const Point2<Scalar>& a, const Point2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Left-hand perpendicular (rotated +90 degrees).
template <typename Scalar>
Point2<Scalar> perp(const Point2<Scalar>& v) {
  return {-v.y(), v.x()};
}

template <typename Scalar>
Point2<Scalar> rotate(const Point2<Scalar>& v, Scalar angle) {
  const Scalar c = std::cos(angle);
  const Scalar s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

/// Wraps an angle into (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar angle) {
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  angle = std::fmod(angle, two_pi);
  if (angle <= -std::numbers::pi_v<Scalar>) {
    angle += two_pi;
  } else if (angle > std::numbers::pi_v<Scalar>) {
    angle -= two_pi;
  }
  return angle;
}

template <typename Scalar>
Scalar signed_area(std::span<const Point2<Scalar>> polygon) {
  Scalar area = 0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    area += cross<Scalar>(polygon[i], polygon[(i + 1) % n]);
  }
  return area / Scalar(2);
}

/// Area centroid of a simple polygon (falls back to the vertex mean for
/// degenerate input).
template <typename Scalar>
Point2<Scalar> centroid(std::span<const Point2<Scalar>> polygon) {
  const Scalar area = signed_area(polygon);
  const std::size_t n = polygon.size();
  if (std::abs(area) < kEpsilon<Scalar>) {
    Point2<Scalar> mean = Point2<Scalar>::Zero();
    for (const auto& p : polygon) {
      mean += p;
    }
    return n ? Point2<Scalar>(mean / Scalar(n)) : mean;
  }
  Point2<Scalar> c = Point2<Scalar>::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % n];
    c += (a + b) * cross<Scalar>(a, b);
  }
  return c / (Scalar(6) * area);
}

template <typename Scalar>
Eigen::AlignedBox<Scalar, 2> bounds(std::span<const Point2<Scalar>> polygon) {
  Eigen::AlignedBox<Scalar, 2> box;
  for (const auto& p : polygon) {
    box.extend(p);
  }
  return box;
}

/// Even-odd point-in-polygon test. Points on the boundary may go either way.
template <typename Scalar>
bool point_in_polygon(const Point2<Scalar>& p, std::span<const Point2<Scalar>> polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const Scalar x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) {
        inside = !inside;
      }
    }
  }
  return inside;
}

template <typename Scalar>
Scalar point_segment_distance(const Point2<Scalar>& p, const Point2<Scalar>& a,
                              const Point2<Scalar>& b) {
  const Point2<Scalar> ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  Scalar t = len2 > 0 ? (p - a).dot(ab) / len2 : Scalar(0);
  t = std::clamp(t, Scalar(0), Scalar(1));
  return (a + t * ab - p).norm();
}

/// True when closed segments [a,b] and [c,d] share at least one point.
template <typename Scalar>
bool segments_intersect(const Point2<Scalar>& a, const Point2<Scalar>& b,
                        const Point2<Scalar>& c, const Point2<Scalar>& d) {
  const Scalar eps = kEpsilon<Scalar>;
  const Scalar d1 = cross<Scalar>(b - a, c - a);
  const Scalar d2 = cross<Scalar>(b - a, d - a);
  const Scalar d3 = cross<Scalar>(d - c, a - c);
  const Scalar d4 = cross<Scalar>(d - c, b - c);
  if (((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
      ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))) {
    return true;
  }
  const auto on_segment = [eps](const Point2<Scalar>& p, const Point2<Scalar>& q,
                                const Point2<Scalar>& r) {
    return point_segment_distance<Scalar>(r, p, q) <= eps;
  };
  return on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) ||
         on_segment(c, d, b);
}

/// A closed polyline is simple when no two non-adjacent edges touch.
template <typename Scalar>
bool is_simple(std::span<const Point2<Scalar>> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) {
    return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % n];
    if ((b - a).norm() <= kEpsilon<Scalar>) {
      return false;
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        continue;
      }
      if (segments_intersect<Scalar>(a, b, polygon[j], polygon[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

/// Circle through a chord and its sagitta point.
template <typename Scalar>
struct ArcCircle {
  Point2<Scalar> center;
  Scalar radius;
  Scalar start_angle;
  Scalar sweep; ///< signed, |sweep| < pi
};

/// The sagitta `h` is measured toward the right-hand side of start->end.
template <typename Scalar>
ArcCircle<Scalar> arc_circle(const Point2<Scalar>& start, const Point2<Scalar>& end, Scalar h) {
  const Point2<Scalar> chord = end - start;
  const Scalar c = chord.norm();
  const Point2<Scalar> right = -perp<Scalar>(chord / c);
  const Point2<Scalar> mid = (start + end) / Scalar(2);
  const Point2<Scalar> sagitta_point = mid + h * right;
  const Scalar radius = (c * c / Scalar(4) + h * h) / (Scalar(2) * std::abs(h));
  const Scalar sign = h > 0 ? Scalar(1) : Scalar(-1);
  const Point2<Scalar> center = sagitta_point - sign * radius * right;
  const Scalar a0 = std::atan2(start.y() - center.y(), start.x() - center.x());
  const Scalar a1 = std::atan2(end.y() - center.y(), end.x() - center.x());
  return {center, radius, a0, wrap_angle(a1 - a0)};
}

/// Discretizes the arc into `segments` chords; returns segments + 1 points
/// including both endpoints (which are copied exactly).
template <typename Scalar>
std::vector<Point2<Scalar>> arc_points(const Point2<Scalar>& start, const Point2<Scalar>& end,
                                       Scalar h, int segments) {
  std::vector<Point2<Scalar>> points;
  points.reserve(static_cast<std::size_t>(segments) + 1);
  points.push_back(start);
  const auto circle = arc_circle(start, end, h);
  for (int k = 1; k < segments; ++k) {
    const Scalar angle = circle.start_angle + circle.sweep * Scalar(k) / Scalar(segments);
    points.emplace_back(circle.center.x() + circle.radius * std::cos(angle),
                        circle.center.y() + circle.radius * std::sin(angle));
  }
  points.push_back(end);
  return points;
}

/// Ear-clipping triangulation of a simple polygon in either winding.
/// Output triangles are counter-clockwise and index into `polygon`.
/// Returns nullopt when no ear can be found (non-simple input).
template <typename Scalar>
std::optional<std::vector<Triangle>> triangulate(std::span<const Point2<Scalar>> polygon) {
  const Scalar eps = kEpsilon<Scalar>;
  std::vector<std::uint32_t> ring;
  ring.reserve(polygon.size());
  for (std::uint32_t i = 0; i < polygon.size(); ++i) {
    ring.push_back(i);
  }
  if (signed_area(polygon) < 0) {
    std::reverse(ring.begin(), ring.end());
  }
  const auto at = [&](std::size_t k) -> const Point2<Scalar>& { return polygon[ring[k]]; };

  // Collinear vertices make zero-area ears; drop them up front.
  for (std::size_t k = 0; ring.size() > 3 && k < ring.size();) {
    const std::size_t n = ring.size();
    const auto& a = at((k + n - 1) % n);
    const auto& b = at(k);
    const auto& c = at((k + 1) % n);
    if (std::abs(cross<Scalar>(b - a, c - b)) <= eps * ((b - a).norm() + (c - b).norm())) {
      ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(k));
      k = 0;
    } else {
      ++k;
    }
  }

  std::vector<Triangle> triangles;
  while (ring.size() > 3) {
    const std::size_t n = ring.size();
    bool clipped = false;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t ip = (k + n - 1) % n;
      const std::size_t in = (k + 1) % n;
      const auto& a = at(ip);
      const auto& b = at(k);
      const auto& c = at(in);
      if (cross<Scalar>(b - a, c - b) <= eps) {
        continue; // reflex or flat
      }
      bool contains_other = false;
      for (std::size_t m = 0; m < n && !contains_other; ++m) {
        if (m == ip || m == k || m == in) {
          continue;
        }
        const auto& p = at(m);
        if (p == a || p == b || p == c) {
          continue;
        }
        const Scalar w0 = cross<Scalar>(b - a, p - a);
        const Scalar w1 = cross<Scalar>(c - b, p - b);
        const Scalar w2 = cross<Scalar>(a - c, p - c);
        contains_other = w0 >= -eps && w1 >= -eps && w2 >= -eps;
      }
      if (contains_other) {
        continue;
      }
      triangles.push_back({ring[ip], ring[k], ring[in]});
      ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(k));
      clipped = true;
      break;
    }
    if (!clipped) {
      return std::nullopt;
    }
  }
  if (ring.size() == 3) {
    triangles.push_back({ring[0], ring[1], ring[2]});
  }
  return triangles;
}

} // namespace geometry
} // namespace filmset
