// SPDX-License-Identifier: Apache-2.0
#include "hrom/mesh.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

#include "hrom/assembly.hpp"
#include "hrom/error.hpp"

namespace hrom {

void RectDomain::validate() const {
  if (!(v_min > 0.0)) throw DomainError("domain: v_min must be positive");
  if (!(v_min < v_max)) throw DomainError("domain: v_min must be below v_max");
  if (!(x_min < x_max)) throw DomainError("domain: x_min must be below x_max");
}

bool RectDomain::contains(const Point& p, double tol) const {
  const double sv = tol * std::max(1.0, v_max - v_min);
  const double sx = tol * std::max(1.0, x_max - x_min);
  return p[0] >= v_min - sv && p[0] <= v_max + sv && p[1] >= x_min - sx && p[1] <= x_max + sx;
}

const char* to_string(BoundarySide side) {
  switch (side) {
    case BoundarySide::v_min: return "v_min";
    case BoundarySide::v_max: return "v_max";
    case BoundarySide::x_min: return "x_min";
    case BoundarySide::x_max: return "x_max";
    case BoundarySide::none: break;
  }
  return "none";
}

double Mesh::area(int element) const {
  const auto& t = triangles[element];
  const Point a = vertices[t[1]] - vertices[t[0]];
  const Point b = vertices[t[2]] - vertices[t[0]];
  return 0.5 * (a[0] * b[1] - a[1] * b[0]);
}

double Mesh::min_area() const {
  double m = std::numeric_limits<double>::infinity();
  for (int e = 0; e < num_elements(); ++e) m = std::min(m, area(e));
  return m;
}

Mesh build_structured_mesh(const RectDomain& domain, int cells_v, int cells_x) {
  domain.validate();
  if (cells_v < 1 || cells_x < 1) throw DomainError("mesh: need at least one cell per direction");

  Mesh mesh;
  mesh.domain = domain;
  mesh.cells_v = cells_v;
  mesh.cells_x = cells_x;

  const int nv = cells_v + 1;
  const int nx = cells_x + 1;
  mesh.vertices.reserve(static_cast<std::size_t>(nv) * nx);
  // Vertex (i, j) -> j * nv + i with i along v.
  for (int j = 0; j < nx; ++j) {
    const double x = (j == cells_x) ? domain.x_max
                                    : domain.x_min + (domain.x_max - domain.x_min) * j / cells_x;
    for (int i = 0; i < nv; ++i) {
      const double v = (i == cells_v) ? domain.v_max
                                      : domain.v_min + (domain.v_max - domain.v_min) * i / cells_v;
      mesh.vertices.emplace_back(v, x);
    }
  }
  auto vid = [nv](int i, int j) { return j * nv + i; };

  mesh.triangles.reserve(2 * static_cast<std::size_t>(cells_v) * cells_x);
  for (int j = 0; j < cells_x; ++j) {
    for (int i = 0; i < cells_v; ++i) {
      const int p00 = vid(i, j);
      const int p10 = vid(i + 1, j);
      const int p11 = vid(i + 1, j + 1);
      const int p01 = vid(i, j + 1);
      mesh.triangles.push_back({p00, p10, p11});
      mesh.triangles.push_back({p00, p11, p01});
    }
  }

  // Edge discovery in element order keeps edge numbering deterministic.
  std::map<std::pair<int, int>, int> lookup;
  mesh.triangle_edges.resize(mesh.triangles.size());
  for (int el = 0; el < mesh.num_elements(); ++el) {
    const auto& tri = mesh.triangles[el];
    for (int le = 0; le < 3; ++le) {
      const int a = tri[le];
      const int b = tri[(le + 1) % 3];
      const auto key = std::minmax(a, b);
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        Edge edge;
        edge.vertices = {a, b};
        edge.elements = {el, -1};
        edge.local_index = {le, -1};
        const Point t = mesh.vertices[b] - mesh.vertices[a];
        edge.length = t.norm();
        // Counterclockwise triangle: outward normal is the tangent rotated clockwise.
        edge.normal = Point(t[1], -t[0]) / edge.length;
        lookup.emplace(key, mesh.num_edges());
        mesh.triangle_edges[el][le] = mesh.num_edges();
        mesh.edges.push_back(edge);
      } else {
        Edge& edge = mesh.edges[it->second];
        if (edge.elements[1] >= 0) throw StructuralError("mesh: edge shared by more than two elements");
        edge.elements[1] = el;
        edge.local_index[1] = le;
        mesh.triangle_edges[el][le] = it->second;
      }
    }
  }

  const double tol = 1e-12;
  for (Edge& edge : mesh.edges) {
    if (!edge.is_boundary()) continue;
    const Point m = edge.midpoint(mesh.vertices);
    const double sv = tol * (domain.v_max - domain.v_min);
    const double sx = tol * (domain.x_max - domain.x_min);
    if (std::abs(m[0] - domain.v_min) < sv) edge.side = BoundarySide::v_min;
    else if (std::abs(m[0] - domain.v_max) < sv) edge.side = BoundarySide::v_max;
    else if (std::abs(m[1] - domain.x_min) < sx) edge.side = BoundarySide::x_min;
    else if (std::abs(m[1] - domain.x_max) < sx) edge.side = BoundarySide::x_max;
    else throw StructuralError("mesh: boundary edge not on the rectangle boundary");
    edge.edge_class = EdgeClass::dirichlet;
  }
  return mesh;
}

Mesh classify_edges(const Mesh& mesh, const CoefficientField& field, const BcLayout& layout) {
  Mesh out = mesh;
  for (Edge& edge : out.edges) {
    const Point m = edge.midpoint(out.vertices);
    const double bn = field.convection ? field.convection(m).dot(edge.normal) : 0.0;
    if (edge.is_boundary()) {
      edge.edge_class = layout[static_cast<int>(edge.side)] == BcKind::dirichlet
                            ? EdgeClass::dirichlet
                            : EdgeClass::neumann;
      edge.inflow = {bn < 0.0, false};
    } else {
      edge.edge_class = EdgeClass::interior;
      // The neighbour sees the opposite normal.
      edge.inflow = {bn < 0.0, bn > 0.0};
    }
  }
  return out;
}

}  // namespace hrom
