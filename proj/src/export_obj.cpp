#include "filmset/export.hpp"
#include "filmset/materials.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace filmset {

namespace {

std::string num(double v) {
  if (v == 0.0) {
    return "0";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Vec2 box_uv(const Vec3& p, const Vec3& normal) {
  const Vec3 a = normal.cwiseAbs();
  if (a.z() >= a.x() && a.z() >= a.y()) {
    return {p.x(), p.y()};
  }
  if (a.x() >= a.y()) {
    return {p.y(), p.z()};
  }
  return {p.x(), p.z()};
}

} // namespace

Vec3 material_color(std::string_view material_id) {
  const std::uint64_t h = fnv1a(material_id);
  Vec3 c;
  for (int k = 0; k < 3; ++k) {
    const auto byte = static_cast<double>((h >> (8 * k)) & 0xff);
    c[k] = 0.2 + 0.7 * byte / 255.0;
  }
  return c;
}

ObjExport export_obj(const SceneGraph& graph, std::string_view mtl_file_name,
                     const std::map<std::string, double>& uv_scales) {
  ObjExport out;
  out.obj = "# film set scene\n";
  out.obj += "mtllib " + std::string(mtl_file_name) + "\n";
  std::set<std::string> materials;
  std::size_t vertex_base = 1;
  std::size_t uv_base = 1;

  graph.visit([&](const SceneElement& e, const Eigen::Affine3d& parent) {
    if (e.mesh.empty()) {
      return;
    }
    const Mesh mesh = baked_mesh(e, parent);
    const std::string material = e.material_ref.value_or(std::string(kDefaultMaterial));
    materials.insert(material);
    const auto it = uv_scales.find(material);
    const double uv_scale = it == uv_scales.end() ? 1.0 : it->second;

    out.obj += "g " + e.attribute_id + "\n";
    out.obj += "usemtl " + material + "\n";
    for (const auto& v : mesh.vertices) {
      out.obj += "v " + num(v.x()) + " " + num(v.y()) + " " + num(v.z()) + "\n";
    }
    for (const auto& f : mesh.faces) {
      const Vec3& a = mesh.vertices[f[0]];
      const Vec3& b = mesh.vertices[f[1]];
      const Vec3& c = mesh.vertices[f[2]];
      const Vec3 n = (b - a).cross(c - a);
      for (const auto i : f) {
        const Vec2 uv = box_uv(mesh.vertices[i], n) * uv_scale;
        out.obj += "vt " + num(uv.x()) + " " + num(uv.y()) + "\n";
      }
    }
    for (std::size_t k = 0; k < mesh.faces.size(); ++k) {
      const auto& f = mesh.faces[k];
      out.obj += "f";
      for (int c = 0; c < 3; ++c) {
        out.obj += " " + std::to_string(vertex_base + f[c]) + "/" +
                   std::to_string(uv_base + 3 * k + c);
      }
      out.obj += "\n";
    }
    vertex_base += mesh.vertices.size();
    uv_base += 3 * mesh.faces.size();
  });

  out.mtl = "# film set materials\n";
  for (const auto& m : materials) {
    const Vec3 c = material_color(m);
    out.mtl += "\nnewmtl " + m + "\n";
    out.mtl += "Ka 0 0 0\n";
    out.mtl += "Kd " + num(c.x()) + " " + num(c.y()) + " " + num(c.z()) + "\n";
    out.mtl += "Ks 0 0 0\n";
    out.mtl += "d 1\n";
    out.mtl += "illum 1\n";
  }
  return out;
}

} // namespace filmset
