// SPDX-License-Identifier: Apache-2.0
#include "hrom/assembly.hpp"

#include <cmath>
#include <exception>
#include <string>
#include <vector>

#include "assembly_detail.hpp"
#include "hrom/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hrom {

CoefficientField CoefficientField::constant(double a, const Eigen::Vector2d& beta, double r) {
  CoefficientField f;
  f.diffusion = [a](const Point&) -> Eigen::Matrix2d { return a * Eigen::Matrix2d::Identity(); };
  f.convection = [beta](const Point&) -> Eigen::Vector2d { return beta; };
  f.reaction = r;
  return f;
}

Eigen::VectorXd AssembledSystem::load_at(double t) const {
  if (zero_load || !load) return Eigen::VectorXd::Zero(size());
  return load(t);
}

namespace {

double lambda_max(const Eigen::Matrix2d& a) {
  const double half_tr = 0.5 * (a(0, 0) + a(1, 1));
  const double half_diff = 0.5 * (a(0, 0) - a(1, 1));
  return half_tr + std::sqrt(half_diff * half_diff + a(0, 1) * a(0, 1));
}

void check_diffusion(const Eigen::Matrix2d& a, const Point& z) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (std::abs(a(0, 1) - a(1, 0)) > 1e-12 * std::max(scale, 1.0))
    throw DomainError("diffusion matrix is not symmetric");
  const double half_tr = 0.5 * (a(0, 0) + a(1, 1));
  const double half_diff = 0.5 * (a(0, 0) - a(1, 1));
  const double lmin = half_tr - std::sqrt(half_diff * half_diff + a(0, 1) * a(0, 1));
  if (lmin < -1e-13 * std::max(scale, 1.0))
    throw DomainError("diffusion matrix is indefinite at (" + std::to_string(z[0]) + ", " +
                      std::to_string(z[1]) + ")");
}

// Trace of the local basis of `element` at physical point z.
struct Trace {
  Eigen::VectorXd values;
  Eigen::MatrixX2d grads;
};

Trace trace(const DGSpace& space, int element, const Point& z) {
  const ElementMap& map = space.element_map(element);
  const Eigen::Vector2d ref = map.to_reference(z);
  return {space.basis().values(ref), space.basis().gradients(ref) * map.inv_jacobian};
}

Point edge_point(const Mesh& mesh, const Edge& edge, double s) {
  const Point& a = mesh.vertices[edge.vertices[0]];
  const Point& b = mesh.vertices[edge.vertices[1]];
  return a + s * (b - a);
}

Eigen::Matrix2d diffusion_at(const CoefficientField& field, const Point& z) {
  return field.diffusion ? field.diffusion(z) : Eigen::Matrix2d::Zero();
}

Eigen::Vector2d convection_at(const CoefficientField& field, const Point& z) {
  return field.convection ? field.convection(z) : Eigen::Vector2d::Zero();
}

}  // namespace

namespace local {

Eigen::MatrixXd mass_block(const DGSpace& space, int element) {
  const int nk = space.local_dofs();
  const double det = space.element_map(element).det;
  const auto& rule = space.element_rule();
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(nk, nk);
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const Eigen::VectorXd phi = space.ref_values().row(q).transpose();
    block.noalias() += (rule.weights[q] * det) * phi * phi.transpose();
  }
  // (w phi_i) phi_j and (w phi_j) phi_i round differently; mirror the upper triangle.
  block.triangularView<Eigen::StrictlyLower>() = block.transpose();
  return block;
}

Eigen::MatrixXd volume_block(const DGSpace& space, const CoefficientField& field, int element) {
  const int nk = space.local_dofs();
  const ElementMap& map = space.element_map(element);
  const auto& rule = space.element_rule();
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(nk, nk);
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const Point z = map.to_physical(rule.points[q]);
    const Eigen::Matrix2d a = diffusion_at(field, z);
    check_diffusion(a, z);
    const Eigen::Vector2d b = convection_at(field, z);
    const Eigen::VectorXd phi = space.ref_values().row(q).transpose();
    const Eigen::MatrixX2d grad = space.ref_gradients()[q] * map.inv_jacobian;
    const double w = rule.weights[q] * map.det;
    block.noalias() += w * (grad * a * grad.transpose());
    block.noalias() += w * phi * (grad * b).transpose();
    block.noalias() += (w * field.reaction) * phi * phi.transpose();
  }
  return block;
}

double edge_penalty(const DGSpace& space, const CoefficientField& field, int edge_index,
                    double penalty_constant) {
  const Mesh& mesh = space.mesh();
  const Edge& edge = mesh.edges[edge_index];
  const auto& rule = space.edge_rule();
  Eigen::Matrix2d mean = Eigen::Matrix2d::Zero();
  for (std::size_t q = 0; q < rule.weights.size(); ++q)
    mean += rule.weights[q] * diffusion_at(field, edge_point(mesh, edge, rule.points[q]));
  const int k = space.degree();
  return penalty_constant * k * (k + 1) * lambda_max(mean);
}

Eigen::MatrixXd edge_block(const DGSpace& space, const CoefficientField& field, int edge_index,
                           double penalty_constant) {
  const Mesh& mesh = space.mesh();
  const Edge& edge = mesh.edges[edge_index];
  const int nk = space.local_dofs();
  const auto& rule = space.edge_rule();
  const Point& n = edge.normal;

  if (edge.edge_class == EdgeClass::neumann) return {};

  const double sigma_h = edge_penalty(space, field, edge_index, penalty_constant) / edge.length;

  if (edge.edge_class == EdgeClass::dirichlet) {
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(nk, nk);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Point z = edge_point(mesh, edge, rule.points[q]);
      const double w = rule.weights[q] * edge.length;
      const Trace tr = trace(space, edge.elements[0], z);
      const Eigen::VectorXd flux = tr.grads * (diffusion_at(field, z) * n);
      block.noalias() += (w * sigma_h) * tr.values * tr.values.transpose();
      block.noalias() -= w * flux * tr.values.transpose();
      block.noalias() -= w * tr.values * flux.transpose();
      if (edge.inflow[0]) {
        const double bn = convection_at(field, z).dot(n);
        block.noalias() -= (w * bn) * tr.values * tr.values.transpose();
      }
    }
    return block;
  }

  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * nk, 2 * nk);
  Eigen::VectorXd jump(2 * nk);
  Eigen::VectorXd avg_flux(2 * nk);
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const Point z = edge_point(mesh, edge, rule.points[q]);
    const double w = rule.weights[q] * edge.length;
    const Trace t0 = trace(space, edge.elements[0], z);
    const Trace t1 = trace(space, edge.elements[1], z);
    const Eigen::Vector2d an = diffusion_at(field, z) * n;
    // [w] = (w_0 - w_1) n, so only the scalar coefficient along n is stored.
    jump << t0.values, -t1.values;
    avg_flux << 0.5 * (t0.grads * an), 0.5 * (t1.grads * an);
    block.noalias() += (w * sigma_h) * jump * jump.transpose();
    block.noalias() -= w * avg_flux * jump.transpose();
    block.noalias() -= w * jump * avg_flux.transpose();

    const double bn = convection_at(field, z).dot(n);
    if (edge.inflow[0]) {
      // b.n_K (u_out - u_in) w_in on the side of elements[0].
      block.topRightCorner(nk, nk).noalias() += (w * bn) * t0.values * t1.values.transpose();
      block.topLeftCorner(nk, nk).noalias() -= (w * bn) * t0.values * t0.values.transpose();
    }
    if (edge.inflow[1]) {
      const double bn1 = -bn;
      block.bottomLeftCorner(nk, nk).noalias() += (w * bn1) * t1.values * t0.values.transpose();
      block.bottomRightCorner(nk, nk).noalias() -= (w * bn1) * t1.values * t1.values.transpose();
    }
  }
  return block;
}

}  // namespace local

namespace detail {

void push_block(std::vector<Eigen::Triplet<double>>& trips, const Eigen::MatrixXd& block,
                int row0, int col0) {
  for (Eigen::Index j = 0; j < block.cols(); ++j)
    for (Eigen::Index i = 0; i < block.rows(); ++i)
      trips.emplace_back(row0 + static_cast<int>(i), col0 + static_cast<int>(j), block(i, j));
}

void push_edge_block(std::vector<Eigen::Triplet<double>>& trips, const DGSpace& space,
                     const Edge& edge, const Eigen::MatrixXd& block) {
  if (block.size() == 0) return;
  const int nk = space.local_dofs();
  if (block.rows() == nk) {
    push_block(trips, block, space.dof(edge.elements[0], 0), space.dof(edge.elements[0], 0));
    return;
  }
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      push_block(trips, block.block(s * nk, t * nk, nk, nk), space.dof(edge.elements[s], 0),
                 space.dof(edge.elements[t], 0));
}

void check_penalty(double c) {
  if (!(c > 0.0)) throw ConfigError("penalty constant must be positive");
}

}  // namespace detail

SparseMatrix assemble_mass(const DGSpace& space) {
  const int ne = space.num_elements();
  std::vector<Eigen::MatrixXd> blocks(ne);
#pragma omp parallel for schedule(static)
  for (int el = 0; el < ne; ++el) blocks[el] = local::mass_block(space, el);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(ne) * space.local_dofs() * space.local_dofs());
  for (int el = 0; el < ne; ++el)
    detail::push_block(trips, blocks[el], space.dof(el, 0), space.dof(el, 0));
  SparseMatrix m(space.total_dofs(), space.total_dofs());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

SparseMatrix assemble_stiffness(const DGSpace& space, const CoefficientField& field,
                                const AssemblyOptions& opts) {
  detail::check_penalty(opts.penalty_constant);
  const int ne = space.num_elements();
  const int nedges = space.mesh().num_edges();
  std::vector<Eigen::MatrixXd> vblocks(ne);
  std::vector<Eigen::MatrixXd> eblocks(nedges);

  // Exceptions must not escape an OpenMP region; capture the first one.
  std::exception_ptr failure;
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int el = 0; el < ne; ++el) {
      try {
        vblocks[el] = local::volume_block(space, field, el);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
#pragma omp for schedule(static)
    for (int e = 0; e < nedges; ++e) {
      try {
        eblocks[e] = local::edge_block(space, field, e, opts.penalty_constant);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  const int nk = space.local_dofs();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(ne) * nk * nk * 7);
  for (int el = 0; el < ne; ++el)
    detail::push_block(trips, vblocks[el], space.dof(el, 0), space.dof(el, 0));
  for (int e = 0; e < nedges; ++e)
    detail::push_edge_block(trips, space, space.mesh().edges[e], eblocks[e]);
  SparseMatrix a(space.total_dofs(), space.total_dofs());
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

Eigen::VectorXd assemble_load(const DGSpace& space, const CoefficientField& field,
                              const BoundaryData& bc, const AssemblyOptions& opts) {
  detail::check_penalty(opts.penalty_constant);
  const Mesh& mesh = space.mesh();
  const auto& rule = space.edge_rule();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.total_dofs());
  // Boundary edges only; too few to be worth threading.
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edges[e];
    if (!edge.is_boundary()) continue;
    const int el = edge.elements[0];
    auto seg = load.segment(space.dof(el, 0), space.local_dofs());
    if (edge.edge_class == EdgeClass::neumann) {
      if (!bc.neumann) continue;
      for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const Point z = edge_point(mesh, edge, rule.points[q]);
        const double w = rule.weights[q] * edge.length;
        const double un = bc.neumann(edge.side, z);
        if (un == 0.0) continue;
        seg += (w * un) * trace(space, el, z).values;
      }
      continue;
    }
    if (!bc.dirichlet) continue;
    const double sigma_h = local::edge_penalty(space, field, e, opts.penalty_constant) / edge.length;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Point z = edge_point(mesh, edge, rule.points[q]);
      const double w = rule.weights[q] * edge.length;
      const double ud = bc.dirichlet(edge.side, z);
      if (ud == 0.0) continue;
      const Trace tr = trace(space, el, z);
      const Eigen::VectorXd flux = tr.grads * (diffusion_at(field, z) * edge.normal);
      seg += (w * ud) * (sigma_h * tr.values - flux);
      if (edge.inflow[0]) {
        const double bn = convection_at(field, z).dot(edge.normal);
        seg -= (w * bn * ud) * tr.values;
      }
    }
  }
  return load;
}

namespace detail {

Eigen::VectorXd source_segment(const DGSpace& space, const ScalarField& f, int el) {
  const ElementMap& map = space.element_map(el);
  const auto& rule = space.element_rule();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.local_dofs());
  for (std::size_t q = 0; q < rule.weights.size(); ++q) {
    const double fz = f(map.to_physical(rule.points[q]));
    rhs += (rule.weights[q] * map.det * fz) * space.ref_values().row(q).transpose();
  }
  return rhs;
}

Eigen::VectorXd projection_segment(const DGSpace& space, const ScalarField& f, int el) {
  return local::mass_block(space, el).llt().solve(source_segment(space, f, el));
}

}  // namespace detail

Eigen::VectorXd assemble_source(const DGSpace& space, const ScalarField& f) {
  const int nk = space.local_dofs();
  Eigen::VectorXd rhs(space.total_dofs());
#pragma omp parallel for schedule(static)
  for (int el = 0; el < space.num_elements(); ++el)
    rhs.segment(el * nk, nk) = detail::source_segment(space, f, el);
  return rhs;
}

Eigen::VectorXd l2_project(const DGSpace& space, const ScalarField& f) {
  const int nk = space.local_dofs();
  Eigen::VectorXd u(space.total_dofs());
#pragma omp parallel for schedule(static)
  for (int el = 0; el < space.num_elements(); ++el)
    u.segment(el * nk, nk) = detail::projection_segment(space, f, el);
  return u;
}

double l2_error_squared(const DGSpace& space, const Eigen::Ref<const Eigen::VectorXd>& coeffs,
                        const ScalarField& f) {
  if (coeffs.size() != space.total_dofs())
    throw StructuralError("l2_error: coefficient vector has wrong length");
  // Finer rule than assembly so the error of smooth non-polynomial f is resolved.
  const TriangleRule rule = triangle_rule(2 * space.degree() + 4);
  const int nk = space.local_dofs();
  std::vector<Eigen::VectorXd> phis;
  for (const auto& p : rule.points) phis.push_back(space.basis().values(p));
  std::vector<double> per_element(space.num_elements());
#pragma omp parallel for schedule(static)
  for (int el = 0; el < space.num_elements(); ++el) {
    const ElementMap& map = space.element_map(el);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const double uh = phis[q].dot(coeffs.segment(el * nk, nk));
      const double d = uh - f(map.to_physical(rule.points[q]));
      s += rule.weights[q] * map.det * d * d;
    }
    per_element[el] = s;
  }
  double total = 0.0;
  for (double s : per_element) total += s;
  return total;
}

}  // namespace hrom
