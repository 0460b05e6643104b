// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace hrom {

class CoefficientField;

/// Coordinates are ordered (v, x): variance first, log-moneyness second.
using Point = Eigen::Vector2d;

/// Axis-aligned localization of the unbounded pricing domain.
struct RectDomain {
  double v_min = 0.0;
  double v_max = 1.0;
  double x_min = 0.0;
  double x_max = 1.0;

  /// Throws DomainError unless 0 < v_min < v_max and x_min < x_max.
  void validate() const;
  bool contains(const Point& p, double tol = 1e-12) const;
};

enum class BoundarySide { v_min = 0, v_max = 1, x_min = 2, x_max = 3, none = 4 };
enum class BcKind { dirichlet, neumann };
enum class EdgeClass { interior, dirichlet, neumann };

/// Boundary condition type on each rectangle side, indexed by BoundarySide.
using BcLayout = std::array<BcKind, 4>;

inline constexpr BcLayout kAllDirichlet = {BcKind::dirichlet, BcKind::dirichlet,
                                           BcKind::dirichlet, BcKind::dirichlet};

const char* to_string(BoundarySide side);

struct Edge {
  std::array<int, 2> vertices{};
  // elements[0] owns the normal; elements[1] == -1 on the boundary.
  std::array<int, 2> elements{-1, -1};
  // Local edge index (0..2) inside each adjacent triangle.
  std::array<int, 2> local_index{-1, -1};
  Point normal = Point::Zero();  // unit, outward from elements[0]
  double length = 0.0;
  BoundarySide side = BoundarySide::none;
  EdgeClass edge_class = EdgeClass::interior;
  // inflow[s] is true iff b . n_K < 0 at the midpoint, seen from elements[s].
  std::array<bool, 2> inflow{false, false};

  bool is_boundary() const { return elements[1] < 0; }
  Point midpoint(const std::vector<Point>& verts) const {
    return 0.5 * (verts[vertices[0]] + verts[vertices[1]]);
  }
};

/// Conforming triangulation with edge connectivity.
///
/// Triangles are stored counterclockwise in the (v, x) plane. Local edge i of a
/// triangle joins local vertices i and (i + 1) % 3.
struct Mesh {
  RectDomain domain;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> triangle_edges;
  int cells_v = 0;
  int cells_x = 0;

  int num_elements() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  double area(int element) const;
  double min_area() const;
};

/// Tensor grid of N_v x N_x cells, each split along the lower-left to
/// upper-right diagonal. All boundary edges start tagged Dirichlet with no
/// inflow flags, which matches classify_edges() with b = 0 and kAllDirichlet.
Mesh build_structured_mesh(const RectDomain& domain, int cells_v, int cells_x);

/// Copy of `mesh` with boundary tags from `layout` and midpoint inflow flags
/// computed from the convection field.
Mesh classify_edges(const Mesh& mesh, const CoefficientField& field, const BcLayout& layout);

}  // namespace hrom
