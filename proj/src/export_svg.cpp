#include "filmset/export.hpp"

#include <cmath>
#include <cstdio>

namespace filmset {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") {
    s = "0.000";
  }
  return s;
}

std::string escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default: out += c;
    }
  }
  return out;
}

constexpr double kDoubleLeafWidth = 1.5;

class Canvas {
public:
  explicit Canvas(const Box2& extent) : extent_(extent) {}

  double x(double wx) const { return (wx - extent_.min().x()) * kDrawingScale; }
  double y(double wy) const { return (extent_.max().y() - wy) * kDrawingScale; }
  double width() const { return extent_.sizes().x() * kDrawingScale; }
  double height() const { return extent_.sizes().y() * kDrawingScale; }

  void line(const Vec2& a, const Vec2& b, std::string_view cls) {
    body_ += "<line class=\"" + std::string(cls) + "\" x1=\"" + fmt(x(a.x())) + "\" y1=\"" +
             fmt(y(a.y())) + "\" x2=\"" + fmt(x(b.x())) + "\" y2=\"" + fmt(y(b.y())) + "\"/>\n";
  }
  void polyline(const std::vector<Vec2>& pts, std::string_view cls) {
    body_ += "<polyline class=\"" + std::string(cls) + "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      body_ += (i ? " " : "") + fmt(x(pts[i].x())) + "," + fmt(y(pts[i].y()));
    }
    body_ += "\"/>\n";
  }
  void circle(const Vec2& c, double r, std::string_view cls) {
    body_ += "<circle class=\"" + std::string(cls) + "\" cx=\"" + fmt(x(c.x())) + "\" cy=\"" +
             fmt(y(c.y())) + "\" r=\"" + fmt(r * kDrawingScale) + "\"/>\n";
  }
  void rect(const Box2& b, std::string_view cls) {
    body_ += "<rect class=\"" + std::string(cls) + "\" x=\"" + fmt(x(b.min().x())) + "\" y=\"" +
             fmt(y(b.max().y())) + "\" width=\"" + fmt(b.sizes().x() * kDrawingScale) +
             "\" height=\"" + fmt(b.sizes().y() * kDrawingScale) + "\"/>\n";
  }
  void arc(const Vec2& from, const Vec2& to, double r, bool sweep, std::string_view cls) {
    body_ += "<path class=\"" + std::string(cls) + "\" d=\"M " + fmt(x(from.x())) + " " +
             fmt(y(from.y())) + " A " + fmt(r * kDrawingScale) + " " + fmt(r * kDrawingScale) +
             " 0 0 " + (sweep ? "1" : "0") + " " + fmt(x(to.x())) + " " + fmt(y(to.y())) +
             "\"/>\n";
  }
  void text(const Vec2& at, std::string_view content, std::string_view cls) {
    body_ += "<text class=\"" + std::string(cls) + "\" x=\"" + fmt(x(at.x())) + "\" y=\"" +
             fmt(y(at.y())) + "\">" + escape(content) + "</text>\n";
  }
  void raw(const std::string& s) { body_ += s; }
  const std::string& body() const { return body_; }

private:
  Box2 extent_;
  std::string body_;
};

Vec2 inward_of(const WallSegment& s) {
  return inward_normal(s.owners.front().side);
}

std::pair<double, double> band_of(const WallSet& walls, const WallSegment& s) {
  if (s.classification == EdgeClass::external) {
    return {-walls.thickness, 0.0};
  }
  return {-walls.thickness / 2, walls.thickness / 2};
}

void draw_segment(Canvas& canvas, const WallSet& walls, const WallSegment& s) {
  const Vec2 dir = s.direction();
  const Vec2 n = inward_of(s);
  const auto [w0, w1] = band_of(walls, s);
  const bool external = s.classification == EdgeClass::external;

  std::vector<WallHole> holes = s.holes;
  std::sort(holes.begin(), holes.end(),
            [](const WallHole& a, const WallHole& b) { return a.s0 < b.s0; });

  for (const double w : {w0, w1}) {
    const bool outer_line = external && w == w0;
    double from = outer_line ? -s.extend_start : 0.0;
    const double to = outer_line ? s.length() + s.extend_end : s.length();
    for (const auto& h : holes) {
      if (h.s0 > from) {
        canvas.line(s.start + from * dir + w * n, s.start + h.s0 * dir + w * n, "wall");
      }
      from = std::max(from, h.s1);
    }
    if (to > from) {
      canvas.line(s.start + from * dir + w * n, s.start + to * dir + w * n, "wall");
    }
  }
  for (const auto& h : holes) {
    for (const double sj : {h.s0, h.s1}) {
      canvas.line(s.start + sj * dir + w0 * n, s.start + sj * dir + w1 * n, "jamb");
    }
  }
}

void draw_arc(Canvas& canvas, const WallSet& walls, const ArcWall& arc) {
  const auto circle = geometry::arc_circle<double>(arc.start, arc.end, arc.h_chord);
  std::vector<Vec2> outer;
  for (const auto& p : arc.points) {
    const Vec2 radial = (p - circle.center).normalized();
    outer.push_back(p + walls.thickness * (arc.h_chord > 0 ? radial : Vec2(-radial)));
  }
  canvas.polyline(arc.points, "wall arc");
  canvas.polyline(outer, "wall arc");
}

void draw_opening(Canvas& canvas, const OpeningMark& m, double depth) {
  if (m.kind == OpeningKind::window) {
    canvas.line(m.hinge, m.strike, "window");
    canvas.line(m.hinge - depth * m.into, m.strike - depth * m.into, "window");
    const Vec2 mid = -0.5 * depth * m.into;
    canvas.line(m.hinge + mid, m.strike + mid, "glazing");
    return;
  }
  const double w = (m.strike - m.hinge).norm();
  const auto leaf = [&](const Vec2& hinge, const Vec2& strike) {
    const double r = (strike - hinge).norm();
    const Vec2 open = hinge + r * m.into;
    canvas.line(hinge, open, "door");
    canvas.arc(strike, open, r, geometry::cross<double>(strike - hinge, open - hinge) > 0, "swing");
  };
  if (w > kDoubleLeafWidth) {
    const Vec2 mid = (m.hinge + m.strike) / 2;
    leaf(m.hinge, mid);
    leaf(m.strike, mid);
  } else {
    leaf(m.hinge, m.strike);
  }
}

Box2 drawing_extent(const Drawing& d) {
  Box2 box;
  if (d.walls) {
    const double t = d.walls->thickness;
    for (const auto& s : d.walls->segments) {
      box.extend(s.start);
      box.extend(s.end);
    }
    for (const auto& a : d.walls->arcs) {
      for (const auto& p : a.points) {
        box.extend(p);
      }
    }
    if (!box.isEmpty()) {
      box.min().array() -= t;
      box.max().array() += t;
    }
  }
  if (d.grid) {
    const auto& g = *d.grid;
    box.extend(g.center(0, 0) - Vec2::Constant(g.column_radius));
    box.extend(g.center(g.rows - 1, g.cols - 1) + Vec2::Constant(g.column_radius));
  }
  for (const auto& p : d.placements) {
    box.extend(p.footprint());
  }
  if (box.isEmpty()) {
    box.extend(Vec2::Zero());
  }
  Box2 out;
  out.extend(Vec2(std::floor(box.min().x()) - 1.0, std::floor(box.min().y()) - 1.0));
  out.extend(Vec2(std::ceil(box.max().x()) + 1.0, std::ceil(box.max().y()) + 2.0));
  return out;
}

} // namespace

std::string export_svg(const Drawing& d) {
  const Box2 extent = drawing_extent(d);
  Canvas canvas(extent);

  canvas.raw("<g id=\"grid\">\n");
  for (double gx = extent.min().x(); gx <= extent.max().x() + 1e-9; gx += 1.0) {
    canvas.line({gx, extent.min().y()}, {gx, extent.max().y()}, "grid");
  }
  for (double gy = extent.min().y(); gy <= extent.max().y() + 1e-9; gy += 1.0) {
    canvas.line({extent.min().x(), gy}, {extent.max().x(), gy}, "grid");
  }
  canvas.raw("</g>\n");

  double depth = 0.2;
  if (d.walls) {
    depth = d.walls->thickness;
    canvas.raw("<g id=\"walls\">\n");
    for (const auto& s : d.walls->segments) {
      draw_segment(canvas, *d.walls, s);
    }
    for (const auto& a : d.walls->arcs) {
      draw_arc(canvas, *d.walls, a);
    }
    canvas.raw("</g>\n");
  }
  if (d.grid) {
    const auto& g = *d.grid;
    depth = g.beam_width;
    canvas.raw("<g id=\"frame\">\n");
    for (int i = 0; i < g.rows; ++i) {
      for (int j = 0; j + 1 < g.cols; ++j) {
        canvas.line(g.center(i, j), g.center(i, j + 1), "beam");
      }
    }
    for (int i = 0; i + 1 < g.rows; ++i) {
      for (int j = 0; j < g.cols; ++j) {
        canvas.line(g.center(i, j), g.center(i + 1, j), "beam");
      }
    }
    for (int i = 0; i < g.rows; ++i) {
      for (int j = 0; j < g.cols; ++j) {
        canvas.circle(g.center(i, j), g.column_radius, "column");
      }
    }
    canvas.raw("</g>\n");
  }

  canvas.raw("<g id=\"openings\">\n");
  for (const auto& m : d.openings) {
    draw_opening(canvas, m, depth);
  }
  canvas.raw("</g>\n");

  canvas.raw("<g id=\"objects\">\n");
  for (const auto& p : d.placements) {
    const Box2 fp = p.footprint();
    canvas.rect(fp, p.slot == Slot::wall ? "object wall-object" : "object");
    canvas.text(fp.center(), p.object, "label");
  }
  canvas.raw("</g>\n");

  canvas.raw("<g id=\"rooms\">\n");
  for (const auto& r : d.rooms) {
    canvas.text(r.position, r.function.empty() ? r.name : r.name + " " + r.function, "room");
  }
  canvas.raw("</g>\n");

  const Vec2 title_at(extent.min().x() + 0.5, extent.max().y() - 0.6);
  canvas.text(title_at, d.title, "title");
  canvas.text(title_at - Vec2(0, 0.5), "Scale 1:50, grid 1 m", "scale");

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         fmt(canvas.width()) + "mm\" height=\"" + fmt(canvas.height()) + "mm\" viewBox=\"0 0 " +
         fmt(canvas.width()) + " " + fmt(canvas.height()) + "\" data-scale=\"1:50\">\n";
  out += "<title>" + escape(d.title) + "</title>\n";
  out += "<style>\n"
         ".grid{stroke:#d8d8d8;stroke-width:0.2}\n"
         ".wall{stroke:#000;stroke-width:0.7;fill:none}\n"
         ".jamb{stroke:#000;stroke-width:0.5}\n"
         ".beam{stroke:#555;stroke-width:0.4;stroke-dasharray:3 2}\n"
         ".column{stroke:#000;stroke-width:0.6;fill:#bbb}\n"
         ".door,.swing{stroke:#000;stroke-width:0.35;fill:none}\n"
         ".window{stroke:#000;stroke-width:0.35}\n"
         ".glazing{stroke:#3a7bd5;stroke-width:0.35}\n"
         ".object{stroke:#a0522d;stroke-width:0.4;fill:none}\n"
         "text{font-family:sans-serif;font-size:4px;text-anchor:middle}\n"
         ".title{font-size:7px;text-anchor:start}\n"
         ".scale{font-size:4px;text-anchor:start}\n"
         "</style>\n";
  out += canvas.body();
  out += "</svg>\n";
  return out;
}

} // namespace filmset
