#pragma once

// Reference implementations the tests compare the library against. None of
// these call into filmset beyond plain data types.

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct M4 {
  double m[4][4]{};

  static M4 identity() {
    M4 r;
    for (int i = 0; i < 4; ++i) {
      r.m[i][i] = 1.0;
    }
    return r;
  }
  static M4 translation(double x, double y, double z) {
    M4 r = identity();
    r.m[0][3] = x;
    r.m[1][3] = y;
    r.m[2][3] = z;
    return r;
  }
  static M4 rot_z(double a) {
    M4 r = identity();
    r.m[0][0] = std::cos(a);
    r.m[0][1] = -std::sin(a);
    r.m[1][0] = std::sin(a);
    r.m[1][1] = std::cos(a);
    return r;
  }
  static M4 scale(double x, double y, double z) {
    M4 r;
    r.m[0][0] = x;
    r.m[1][1] = y;
    r.m[2][2] = z;
    r.m[3][3] = 1.0;
    return r;
  }
  M4 operator*(const M4& o) const {
    M4 r;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) {
          r.m[i][j] += m[i][k] * o.m[k][j];
        }
      }
    }
    return r;
  }
  std::array<double, 3> apply(double x, double y, double z) const {
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
      out[i] = m[i][0] * x + m[i][1] * y + m[i][2] * z + m[i][3];
    }
    return out;
  }
};

struct Rect {
  double x0, y0, x1, y1;
};

/// Grid points (cell centers, step `h`) that fall strictly inside two or
/// more rectangles.
inline std::size_t sampled_overlap(const std::vector<Rect>& rects, double h = 0.05) {
  if (rects.empty()) {
    return 0;
  }
  double x0 = rects[0].x0, y0 = rects[0].y0, x1 = rects[0].x1, y1 = rects[0].y1;
  for (const auto& r : rects) {
    x0 = std::min(x0, r.x0);
    y0 = std::min(y0, r.y0);
    x1 = std::max(x1, r.x1);
    y1 = std::max(y1, r.y1);
  }
  std::size_t hits = 0;
  const auto nx = static_cast<long>(std::ceil((x1 - x0) / h));
  const auto ny = static_cast<long>(std::ceil((y1 - y0) / h));
  for (long a = 0; a < nx; ++a) {
    const double x = x0 + (a + 0.5) * h;
    for (long b = 0; b < ny; ++b) {
      const double y = y0 + (b + 0.5) * h;
      int inside = 0;
      for (const auto& r : rects) {
        inside += (x > r.x0 && x < r.x1 && y > r.y0 && y < r.y1) ? 1 : 0;
      }
      hits += inside > 1 ? 1 : 0;
    }
  }
  return hits;
}

/// xy bounds of a w x d box centered at (cx, cy) and turned by yaw.
inline Rect rotated_footprint(double cx, double cy, double w, double d, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  Rect r{1e300, 1e300, -1e300, -1e300};
  for (const double a : {-0.5, 0.5}) {
    for (const double b : {-0.5, 0.5}) {
      const double x = cx + c * a * w - s * b * d;
      const double y = cy + s * a * w + c * b * d;
      r.x0 = std::min(r.x0, x);
      r.y0 = std::min(r.y0, y);
      r.x1 = std::max(r.x1, x);
      r.y1 = std::max(r.y1, y);
    }
  }
  return r;
}

inline bool rects_overlap(const Rect& a, const Rect& b, double tol) {
  return std::min(a.x1, b.x1) - std::max(a.x0, b.x0) > tol &&
         std::min(a.y1, b.y1) - std::max(a.y0, b.y0) > tol;
}

using P2 = std::array<double, 2>;

inline double seg_dist(const P2& p, const P2& a, const P2& b) {
  const double vx = b[0] - a[0], vy = b[1] - a[1];
  const double l2 = vx * vx + vy * vy;
  double t = l2 > 0 ? ((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(a[0] + t * vx - p[0], a[1] + t * vy - p[1]);
}

/// Winding-number containment; points within `tol` of the boundary count
/// as inside.
inline bool inside_polygon(const P2& p, const std::vector<P2>& poly, double tol = 1e-9) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (seg_dist(p, poly[i], poly[(i + 1) % n]) <= tol) {
      return true;
    }
  }
  int wn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const P2& a = poly[i];
    const P2& b = poly[(i + 1) % n];
    const double side = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
    if (a[1] <= p[1]) {
      if (b[1] > p[1] && side > 0) {
        ++wn;
      }
    } else if (b[1] <= p[1] && side < 0) {
      --wn;
    }
  }
  return wn != 0;
}

/// Closed and consistently oriented: every directed edge appears once and
/// its reverse appears once.
template <typename Faces>
bool closed_manifold(const Faces& faces) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
  for (const auto& f : faces) {
    for (int k = 0; k < 3; ++k) {
      ++directed[{f[k], f[(k + 1) % 3]}];
    }
  }
  for (const auto& [edge, count] : directed) {
    if (count != 1) {
      return false;
    }
    const auto rev = directed.find({edge.second, edge.first});
    if (rev == directed.end() || rev->second != 1) {
      return false;
    }
  }
  return true;
}

using P3 = std::array<double, 3>;

/// Moller-Trumbore; true when the segment o + t*d, t in [0, 1] crosses the
/// triangle.
inline bool segment_hits_triangle(const P3& o, const P3& d, const P3& a, const P3& b, const P3& c) {
  const auto sub = [](const P3& u, const P3& v) { return P3{u[0] - v[0], u[1] - v[1], u[2] - v[2]}; };
  const auto crs = [](const P3& u, const P3& v) {
    return P3{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  };
  const auto dot = [](const P3& u, const P3& v) { return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]; };
  const P3 e1 = sub(b, a), e2 = sub(c, a);
  const P3 p = crs(d, e2);
  const double det = dot(e1, p);
  if (std::abs(det) < 1e-14) {
    return false;
  }
  const P3 t = sub(o, a);
  const double u = dot(t, p) / det;
  if (u < 0 || u > 1) {
    return false;
  }
  const P3 q = crs(t, e1);
  const double v = dot(d, q) / det;
  if (v < 0 || u + v > 1) {
    return false;
  }
  const double s = dot(e2, q) / det;
  return s >= 0 && s <= 1;
}

struct RankedHit {
  std::string id;
  double score;
};

/// Cosine of every candidate against the query (norms computed here),
/// ordered by score then id. Scores equal at 1e-9 are ties.
inline std::vector<RankedHit> brute_force_rank(const std::vector<double>& query,
                                               const std::vector<std::pair<std::string, std::vector<double>>>& candidates) {
  const auto norm = [](const std::vector<double>& v) {
    double s = 0;
    for (const double x : v) {
      s += x * x;
    }
    return std::sqrt(s);
  };
  const double qn = norm(query);
  std::vector<RankedHit> out;
  for (const auto& [id, v] : candidates) {
    double dot = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      dot += v[i] * query[i];
    }
    out.push_back({id, dot / (norm(v) * qn)});
  }
  std::sort(out.begin(), out.end(), [](const RankedHit& a, const RankedHit& b) {
    const auto ka = std::llround(a.score * 1e9);
    const auto kb = std::llround(b.score * 1e9);
    return ka != kb ? ka > kb : a.id < b.id;
  });
  return out;
}

struct ObjStats {
  std::size_t vertices = 0;
  std::size_t texcoords = 0;
  std::size_t faces = 0;
  std::vector<std::string> groups;
  std::vector<std::string> materials;
  bool indices_valid = true;
  std::string error;
};

/// Standalone Wavefront reader: v, vt, vn, f (v, v/vt, v//vn, v/vt/vn,
/// negative indices), g, usemtl, mtllib, comments.
inline ObjStats parse_obj(const std::string& text) {
  ObjStats st;
  std::vector<std::array<long, 2>> refs;
  std::size_t normals = 0;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') {
      continue;
    }
    if (tag == "v" || tag == "vt" || tag == "vn") {
      double x;
      int n = 0;
      while (ls >> x) {
        ++n;
      }
      if (n < (tag == "vt" ? 2 : 3)) {
        st.error = "short record at line " + std::to_string(lineno);
        st.indices_valid = false;
      }
      (tag == "v" ? st.vertices : tag == "vt" ? st.texcoords : normals)++;
    } else if (tag == "f") {
      std::string corner;
      int n = 0;
      while (ls >> corner) {
        ++n;
        const auto slash = corner.find('/');
        const long v = std::stol(corner.substr(0, slash));
        const long resolved_v = v < 0 ? static_cast<long>(st.vertices) + 1 + v : v;
        long resolved_t = 1;
        if (slash != std::string::npos && slash + 1 < corner.size() && corner[slash + 1] != '/') {
          const long t = std::stol(corner.substr(slash + 1));
          resolved_t = t < 0 ? static_cast<long>(st.texcoords) + 1 + t : t;
          if (resolved_t < 1 || resolved_t > static_cast<long>(st.texcoords)) {
            st.indices_valid = false;
          }
        }
        if (resolved_v < 1 || resolved_v > static_cast<long>(st.vertices)) {
          st.indices_valid = false;
        }
        refs.push_back({resolved_v, resolved_t});
      }
      if (n < 3) {
        st.indices_valid = false;
        st.error = "face with fewer than 3 corners at line " + std::to_string(lineno);
      }
      ++st.faces;
    } else if (tag == "g" || tag == "o") {
      std::string name;
      ls >> name;
      st.groups.push_back(name);
    } else if (tag == "usemtl") {
      std::string name;
      ls >> name;
      st.materials.push_back(name);
    } else if (tag != "mtllib" && tag != "s") {
      st.error = "unknown record '" + tag + "' at line " + std::to_string(lineno);
      st.indices_valid = false;
    }
  }
  return st;
}

/// Empty string when `text` is well-formed XML, else the parser message.
inline std::string xml_error(const std::string& text) {
  try {
    std::istringstream in(text);
    boost::property_tree::ptree tree;
    boost::property_tree::read_xml(in, tree);
    return {};
  } catch (const std::exception& e) {
    return e.what();
  }
}

inline boost::property_tree::ptree read_xml(const std::string& text) {
  std::istringstream in(text);
  boost::property_tree::ptree tree;
  boost::property_tree::read_xml(in, tree);
  return tree;
}

} // namespace oracle
