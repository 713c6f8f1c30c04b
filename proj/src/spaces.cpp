#include "goalfem/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/LU>

#include "goalfem/errors.hpp"

namespace goalfem {

Space1D::Space1D(Mesh1D mesh, int degree, BoundaryCondition bc)
    : mesh_(std::make_shared<Mesh1D>(std::move(mesh))), bc_(bc) {
  if (degree != 1) {
    throw ConfigError("Space1D: only piecewise-linear (degree 1) is available in 1D");
  }
  int nodes = static_cast<int>(mesh_->nodes.size());
  switch (bc) {
    case BoundaryCondition::none: dof_count_ = nodes; break;
    case BoundaryCondition::left_dirichlet: dof_count_ = nodes - 1; break;
    case BoundaryCondition::full_dirichlet: dof_count_ = nodes - 2; break;
  }
  if (dof_count_ < 1) throw ConfigError("Space1D: no degrees of freedom left");
}

int Space1D::dof(int e, int k) const {
  int node = e + k;
  int last = static_cast<int>(mesh_->nodes.size()) - 1;
  switch (bc_) {
    case BoundaryCondition::none: return node;
    case BoundaryCondition::left_dirichlet: return node - 1;
    case BoundaryCondition::full_dirichlet:
      return (node == last) ? -1 : node - 1;
  }
  return -1;
}

double Space1D::dof_node(int j) const {
  int offset = (bc_ == BoundaryCondition::none) ? 0 : 1;
  return mesh_->nodes[j + offset];
}

BasisEval Space1D::eval_basis(int e, const Eigen::VectorXd& local_points) const {
  if (e < 0 || e >= mesh_->element_count()) throw ConfigError("eval_basis: element id out of range");
  int np = static_cast<int>(local_points.size());
  BasisEval out;
  out.values.resize(2, np);
  out.grad[0].resize(2, np);
  double inv_h = 1.0 / mesh_->element_length(e);
  for (int q = 0; q < np; ++q) {
    double t = local_points[q];
    out.values(0, q) = 1.0 - t;
    out.values(1, q) = t;
    out.grad[0](0, q) = -inv_h;
    out.grad[0](1, q) = inv_h;
  }
  return out;
}

double Space1D::value(const Eigen::VectorXd& coeffs, double x) const {
  int e = mesh_->locate(x);
  double t = (x - mesh_->nodes[e]) / mesh_->element_length(e);
  double v = 0.0;
  for (int k = 0; k < 2; ++k) {
    int j = dof(e, k);
    if (j >= 0) v += coeffs[j] * (k == 0 ? 1.0 - t : t);
  }
  return v;
}

double Space1D::derivative(const Eigen::VectorXd& coeffs, double x) const {
  int e = mesh_->locate(x);
  double inv_h = 1.0 / mesh_->element_length(e);
  double d = 0.0;
  for (int k = 0; k < 2; ++k) {
    int j = dof(e, k);
    if (j >= 0) d += coeffs[j] * (k == 0 ? -inv_h : inv_h);
  }
  return d;
}

namespace {

// P1/P2 shape functions on the reference triangle in barycentric form
// l = (1-xi-eta, xi, eta).
void shape_tri(int degree, double xi, double eta, double* val, Eigen::Vector2d* gref) {
  double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  const Eigen::Vector2d d0(-1, -1), d1(1, 0), d2(0, 1);
  if (degree == 1) {
    val[0] = l0; val[1] = l1; val[2] = l2;
    gref[0] = d0; gref[1] = d1; gref[2] = d2;
    return;
  }
  val[0] = l0 * (2 * l0 - 1);
  val[1] = l1 * (2 * l1 - 1);
  val[2] = l2 * (2 * l2 - 1);
  val[3] = 4 * l0 * l1;
  val[4] = 4 * l1 * l2;
  val[5] = 4 * l2 * l0;
  gref[0] = (4 * l0 - 1) * d0;
  gref[1] = (4 * l1 - 1) * d1;
  gref[2] = (4 * l2 - 1) * d2;
  gref[3] = 4 * (l1 * d0 + l0 * d1);
  gref[4] = 4 * (l2 * d1 + l1 * d2);
  gref[5] = 4 * (l0 * d2 + l2 * d0);
}

}  // namespace

Space2D::Space2D(Mesh2D mesh, int degree, BoundaryCondition bc)
    : mesh_(std::make_shared<Mesh2D>(std::move(mesh))), degree_(degree), bc_(bc) {
  if (degree != 1 && degree != 2) throw ConfigError("Space2D: degree must be 1 or 2");
  if (bc == BoundaryCondition::left_dirichlet) {
    throw ConfigError("Space2D: left_dirichlet applies to 1D meshes only");
  }
  const Mesh2D& m = *mesh_;
  int nv = static_cast<int>(m.vertices.size());
  int nt = m.triangle_count();

  // Edge table; an edge incident to exactly one triangle lies on the boundary.
  std::map<std::pair<int, int>, int> edge_id;
  std::vector<int> edge_count;
  std::vector<std::pair<int, int>> edges;
  auto edge_of = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = edge_id.find(key);
    if (it != edge_id.end()) return it->second;
    int id = static_cast<int>(edges.size());
    edge_id.emplace(key, id);
    edges.push_back(key);
    edge_count.push_back(0);
    return id;
  };
  std::vector<std::array<int, 3>> tri_edges(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = m.triangles[t];
    tri_edges[t] = {edge_of(tri[0], tri[1]), edge_of(tri[1], tri[2]), edge_of(tri[2], tri[0])};
    for (int k = 0; k < 3; ++k) edge_count[tri_edges[t][k]]++;
  }

  std::vector<bool> vertex_constrained(nv, false);
  std::vector<bool> edge_constrained(edges.size(), false);
  if (bc == BoundaryCondition::full_dirichlet) {
    for (int v : m.boundary_vertices) vertex_constrained[v] = true;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (edge_count[e] == 1) edge_constrained[e] = true;
    }
  }

  // Lexicographic dof numbering by node coordinate (x major, y minor) keeps
  // assembled matrices stable for golden files.
  struct Entity {
    Eigen::Vector2d p;
    bool is_vertex;
    int id;
  };
  std::vector<Entity> ents;
  for (int v = 0; v < nv; ++v) {
    if (!vertex_constrained[v]) ents.push_back({m.vertices[v], true, v});
  }
  if (degree == 2) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (!edge_constrained[e]) {
        Eigen::Vector2d mid = 0.5 * (m.vertices[edges[e].first] + m.vertices[edges[e].second]);
        ents.push_back({mid, false, static_cast<int>(e)});
      }
    }
  }
  std::sort(ents.begin(), ents.end(), [](const Entity& a, const Entity& b) {
    if (a.p.x() != b.p.x()) return a.p.x() < b.p.x();
    if (a.p.y() != b.p.y()) return a.p.y() < b.p.y();
    return a.is_vertex && !b.is_vertex;
  });

  std::vector<int> vertex_dof(nv, -1);
  std::vector<int> edge_dof(edges.size(), -1);
  dof_points_.reserve(ents.size());
  for (const auto& ent : ents) {
    int j = static_cast<int>(dof_points_.size());
    dof_points_.push_back(ent.p);
    if (ent.is_vertex) vertex_dof[ent.id] = j;
    else edge_dof[ent.id] = j;
  }
  dof_count_ = static_cast<int>(dof_points_.size());
  if (dof_count_ < 1) throw ConfigError("Space2D: no degrees of freedom left");

  element_dofs_.resize(nt);
  inv_jt_.resize(nt);
  det_j_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = m.triangles[t];
    for (int k = 0; k < 3; ++k) element_dofs_[t][k] = vertex_dof[tri[k]];
    for (int k = 3; k < 6; ++k) {
      element_dofs_[t][k] = (degree == 2) ? edge_dof[tri_edges[t][k - 3]] : -1;
    }
    Eigen::Matrix2d jac;
    jac.col(0) = m.vertices[tri[1]] - m.vertices[tri[0]];
    jac.col(1) = m.vertices[tri[2]] - m.vertices[tri[0]];
    det_j_[t] = jac.determinant();
    if (det_j_[t] <= 0) throw ConfigError("Space2D: triangle with non-positive area");
    inv_jt_[t] = jac.inverse().transpose();
  }
}

BasisEval Space2D::eval_basis(int t, const Eigen::MatrixXd& local_points) const {
  if (t < 0 || t >= mesh_->triangle_count()) throw ConfigError("eval_basis: element id out of range");
  int np = static_cast<int>(local_points.rows());
  int nloc = dofs_per_element();
  BasisEval out;
  out.values.resize(nloc, np);
  out.grad[0].resize(nloc, np);
  out.grad[1].resize(nloc, np);
  double val[6];
  Eigen::Vector2d gref[6];
  for (int q = 0; q < np; ++q) {
    shape_tri(degree_, local_points(q, 0), local_points(q, 1), val, gref);
    for (int k = 0; k < nloc; ++k) {
      Eigen::Vector2d g = inv_jt_[t] * gref[k];
      out.values(k, q) = val[k];
      out.grad[0](k, q) = g.x();
      out.grad[1](k, q) = g.y();
    }
  }
  return out;
}

std::pair<int, Eigen::Vector2d> Space2D::locate(const Eigen::Vector2d& x) const {
  const double eps = 1e-12;
  const Mesh2D& m = *mesh_;
  for (int t = 0; t < m.triangle_count(); ++t) {
    Eigen::Vector2d ref = inv_jt_[t].transpose() * (x - m.vertices[m.triangles[t][0]]);
    if (ref.x() >= -eps && ref.y() >= -eps && ref.x() + ref.y() <= 1.0 + eps) {
      return {t, ref};
    }
  }
  throw ConfigError("locate: point outside the mesh");
}

double Space2D::value(const Eigen::VectorXd& coeffs, const Eigen::Vector2d& x) const {
  auto [t, ref] = locate(x);
  double val[6];
  Eigen::Vector2d gref[6];
  shape_tri(degree_, ref.x(), ref.y(), val, gref);
  double v = 0.0;
  for (int k = 0; k < dofs_per_element(); ++k) {
    int j = dof(t, k);
    if (j >= 0) v += coeffs[j] * val[k];
  }
  return v;
}

Eigen::Vector2d Space2D::to_physical(int t, const Eigen::Vector2d& ref) const {
  const auto& tri = mesh_->triangles[t];
  const auto& v = mesh_->vertices;
  return v[tri[0]] + ref.x() * (v[tri[1]] - v[tri[0]]) + ref.y() * (v[tri[2]] - v[tri[0]]);
}

}  // namespace goalfem
