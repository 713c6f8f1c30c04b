#include "goalfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "goalfem/csv.hpp"
#include "goalfem/errors.hpp"

namespace goalfem {

namespace {

// Fixed quadrature orders: the weight is smooth but non-polynomial, so both
// contexts use a deliberately high rule (see the corresponding rationale in
// the tests on polynomial exactness).
constexpr int kGauss1dPoints = 5;       // exact to degree 9
constexpr int kTriangleOrder = 6;       // 12-point symmetric rule

const QuadratureRule& rule_1d() {
  static const QuadratureRule rule = gauss_legendre_01(kGauss1dPoints);
  return rule;
}

const QuadratureRule& rule_tri() {
  static const QuadratureRule rule = quadrature_rule(ElementKind::triangle, kTriangleOrder);
  return rule;
}

}  // namespace

GramOperator::GramOperator(const Space1D& test, FormKind form) {
  dim_ = 1;
  ncomp_ = 1;
  nloc_ = test.dofs_per_element();
  const QuadratureRule& rule = rule_1d();
  points_per_element_ = rule.size();
  const Mesh1D& mesh = test.mesh();
  int nel = mesh.element_count();
  int np = nel * points_per_element_;
  bool gradients = gradient_inner_product(form);

  dofs_.resize(nloc_, nel);
  points_.resize(1, np);
  quad_weights_.resize(np);
  stack_.resize(nloc_, np);
  dof_count_ = test.dof_count();

  for (int e = 0; e < nel; ++e) {
    double x0 = mesh.nodes[e];
    double h = mesh.element_length(e);
    for (int k = 0; k < nloc_; ++k) dofs_(k, e) = test.dof(e, k);
    BasisEval basis = test.eval_basis(e, rule.points.col(0));
    for (int q = 0; q < points_per_element_; ++q) {
      int gq = e * points_per_element_ + q;
      points_(0, gq) = x0 + h * rule.points(q, 0);
      quad_weights_[gq] = h * rule.weights[q];
      for (int k = 0; k < nloc_; ++k) {
        stack_(k, gq) = gradients ? basis.grad[0](k, q) : basis.values(k, q);
      }
    }
  }
}

GramOperator::GramOperator(const Space2D& test, FormKind form) {
  if (!gradient_inner_product(form)) {
    throw ConfigError("GramOperator: 2D problems use the gradient inner product");
  }
  dim_ = 2;
  ncomp_ = 2;
  nloc_ = test.dofs_per_element();
  const QuadratureRule& rule = rule_tri();
  points_per_element_ = rule.size();
  const Mesh2D& mesh = test.mesh();
  int nel = mesh.triangle_count();
  int np = nel * points_per_element_;

  dofs_.resize(nloc_, nel);
  points_.resize(2, np);
  quad_weights_.resize(np);
  stack_.resize(nloc_, np * 2);
  dof_count_ = test.dof_count();

  for (int e = 0; e < nel; ++e) {
    for (int k = 0; k < nloc_; ++k) dofs_(k, e) = test.dof(e, k);
    BasisEval basis = test.eval_basis(e, rule.points);
    double det = test.jacobian_det(e);
    for (int q = 0; q < points_per_element_; ++q) {
      int gq = e * points_per_element_ + q;
      Eigen::Vector2d x = test.to_physical(e, rule.points.row(q).transpose());
      points_(0, gq) = x.x();
      points_(1, gq) = x.y();
      quad_weights_[gq] = det * rule.weights[q];  // weights carry the 1/2 reference area
      for (int k = 0; k < nloc_; ++k) {
        stack_(k, 2 * gq) = basis.grad[0](k, q);
        stack_(k, 2 * gq + 1) = basis.grad[1](k, q);
      }
    }
  }
}

Eigen::VectorXd GramOperator::eval_weight(const WeightNet& net) const {
  int np = quad_point_count();
  Eigen::VectorXd w(np);
  for (int q = 0; q < np; ++q) w[q] = net.weight(points_.col(q).data());
  return w;
}

Eigen::VectorXd GramOperator::eval_weight(const std::function<double(const double*)>& fn) const {
  int np = quad_point_count();
  Eigen::VectorXd w(np);
  for (int q = 0; q < np; ++q) w[q] = fn(points_.col(q).data());
  return w;
}

Eigen::MatrixXd GramOperator::assemble(const Eigen::VectorXd& omega_at_points) const {
  int nel = static_cast<int>(dofs_.cols());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dof_count_, dof_count_);
  Eigen::MatrixXd local(nloc_, nloc_);
  for (int e = 0; e < nel; ++e) {
    local.setZero();
    for (int q = 0; q < points_per_element_; ++q) {
      int gq = e * points_per_element_ + q;
      double c = quad_weights_[gq] * omega_at_points[gq];
      for (int comp = 0; comp < ncomp_; ++comp) {
        auto col = stack_.col(gq * ncomp_ + comp);
        local.noalias() += c * col * col.transpose();
      }
    }
    for (int kr = 0; kr < nloc_; ++kr) {
      int i = dofs_(kr, e);
      if (i < 0) continue;
      for (int kc = 0; kc < nloc_; ++kc) {
        int j = dofs_(kc, e);
        if (j >= 0) A(i, j) += local(kr, kc);
      }
    }
  }
  return A;
}

Eigen::VectorXd GramOperator::pairing(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  int nel = static_cast<int>(dofs_.cols());
  Eigen::VectorXd out(quad_point_count());
  Eigen::VectorXd aloc(nloc_), bloc(nloc_);
  for (int e = 0; e < nel; ++e) {
    for (int k = 0; k < nloc_; ++k) {
      int j = dofs_(k, e);
      aloc[k] = j >= 0 ? a[j] : 0.0;
      bloc[k] = j >= 0 ? b[j] : 0.0;
    }
    for (int q = 0; q < points_per_element_; ++q) {
      int gq = e * points_per_element_ + q;
      double v = 0.0;
      for (int comp = 0; comp < ncomp_; ++comp) {
        auto col = stack_.col(gq * ncomp_ + comp);
        v += aloc.dot(col) * bloc.dot(col);
      }
      out[gq] = v;
    }
  }
  return out;
}

Eigen::MatrixXd assemble_gram(const Space1D& test, const WeightNet& net, const ProblemDefinition& problem) {
  if (problem.dim() != 1 || net.input_dim != 1) throw ConfigError("assemble_gram: dimension mismatch");
  GramOperator op(test, problem.form);
  return op.assemble(op.eval_weight(net));
}

Eigen::MatrixXd assemble_gram(const Space2D& test, const WeightNet& net, const ProblemDefinition& problem) {
  if (problem.dim() != 2 || net.input_dim != 2) throw ConfigError("assemble_gram: dimension mismatch");
  GramOperator op(test, problem.form);
  return op.assemble(op.eval_weight(net));
}

namespace {

// Breakpoints of the overlay partition: union of both node sets.
std::vector<double> overlay_breaks(const Mesh1D& a, const Mesh1D& b) {
  std::vector<double> pts;
  pts.reserve(a.nodes.size() + b.nodes.size());
  pts.insert(pts.end(), a.nodes.begin(), a.nodes.end());
  pts.insert(pts.end(), b.nodes.begin(), b.nodes.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double x, double y) { return std::abs(x - y) < 1e-14; }),
            pts.end());
  return pts;
}

}  // namespace

Eigen::MatrixXd assemble_bilinear(const Space1D& trial, const Space1D& test,
                                  const ProblemDefinition& problem) {
  const Mesh1D& mt = trial.mesh();
  const Mesh1D& mv = test.mesh();
  if (std::abs(mt.a() - mv.a()) > 1e-14 || std::abs(mt.b() - mv.b()) > 1e-14) {
    throw ConfigError("assemble_bilinear: trial and test meshes cover different domains");
  }
  bool test_gradient = problem.form == FormKind::diffusion_1d;
  const QuadratureRule& rule = rule_1d();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(test.dof_count(), trial.dof_count());

  // Integrate on the overlay partition so both factors are polynomial on
  // every segment regardless of nesting.
  std::vector<double> breaks = overlay_breaks(mt, mv);
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    double x0 = breaks[s], x1 = breaks[s + 1];
    double len = x1 - x0;
    if (len < 1e-15) continue;
    double mid = 0.5 * (x0 + x1);
    int et = mt.locate(mid);
    int ev = mv.locate(mid);
    double ht = mt.element_length(et);
    double hv = mv.element_length(ev);
    for (int q = 0; q < rule.size(); ++q) {
      double x = x0 + len * rule.points(q, 0);
      double w = len * rule.weights[q];
      double tv = (x - mv.nodes[ev]) / hv;
      double trial_d[2] = {-1.0 / ht, 1.0 / ht};
      double test_val[2] = {1.0 - tv, tv};
      double test_d[2] = {-1.0 / hv, 1.0 / hv};
      for (int kv = 0; kv < 2; ++kv) {
        int i = test.dof(ev, kv);
        if (i < 0) continue;
        double tv_factor = test_gradient ? test_d[kv] : test_val[kv];
        for (int kt = 0; kt < 2; ++kt) {
          int j = trial.dof(et, kt);
          if (j < 0) continue;
          B(i, j) += w * trial_d[kt] * tv_factor;
        }
      }
    }
  }
  return B;
}

namespace {

using Polygon = std::vector<Eigen::Vector2d>;

double polygon_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

// Sutherland-Hodgman clip of a polygon against the CCW triangle (a,b,c).
Polygon clip_to_triangle(Polygon poly, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                         const Eigen::Vector2d& c) {
  const Eigen::Vector2d tri[3] = {a, b, c};
  const double eps = 1e-13;
  for (int edge = 0; edge < 3 && !poly.empty(); ++edge) {
    const Eigen::Vector2d& p0 = tri[edge];
    const Eigen::Vector2d& p1 = tri[(edge + 1) % 3];
    Eigen::Vector2d dir = p1 - p0;
    auto side = [&](const Eigen::Vector2d& p) {
      return dir.x() * (p.y() - p0.y()) - dir.y() * (p.x() - p0.x());
    };
    Polygon next;
    next.reserve(poly.size() + 2);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Eigen::Vector2d& cur = poly[i];
      const Eigen::Vector2d& prv = poly[(i + poly.size() - 1) % poly.size()];
      double sc = side(cur), sp = side(prv);
      bool in_cur = sc >= -eps, in_prv = sp >= -eps;
      if (in_cur != in_prv) {
        double t = sp / (sp - sc);
        next.push_back(prv + t * (cur - prv));
      }
      if (in_cur) next.push_back(cur);
    }
    poly = std::move(next);
  }
  return poly;
}

}  // namespace

Eigen::MatrixXd assemble_bilinear(const Space2D& trial, const Space2D& test,
                                  const ProblemDefinition& problem) {
  if (problem.form != FormKind::diffusion_2d) {
    throw ConfigError("assemble_bilinear: 2D meshes pair with the 2D diffusion form");
  }
  const Mesh2D& mt = trial.mesh();
  const Mesh2D& mv = test.mesh();
  const QuadratureRule rule = quadrature_rule(ElementKind::triangle, 2);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(test.dof_count(), trial.dof_count());

  // Precompute trial bounding boxes for pair pruning.
  int ntc = mt.triangle_count();
  std::vector<Eigen::Vector2d> lo(ntc), hi(ntc);
  for (int tc = 0; tc < ntc; ++tc) {
    const auto& tri = mt.triangles[tc];
    lo[tc] = mt.vertices[tri[0]].cwiseMin(mt.vertices[tri[1]]).cwiseMin(mt.vertices[tri[2]]);
    hi[tc] = mt.vertices[tri[0]].cwiseMax(mt.vertices[tri[1]]).cwiseMax(mt.vertices[tri[2]]);
  }

  Eigen::MatrixXd ref_pt(1, 2);
  for (int tf = 0; tf < mv.triangle_count(); ++tf) {
    const auto& ftri = mv.triangles[tf];
    Polygon fine = {mv.vertices[ftri[0]], mv.vertices[ftri[1]], mv.vertices[ftri[2]]};
    Eigen::Vector2d flo = fine[0].cwiseMin(fine[1]).cwiseMin(fine[2]);
    Eigen::Vector2d fhi = fine[0].cwiseMax(fine[1]).cwiseMax(fine[2]);
    for (int tc = 0; tc < ntc; ++tc) {
      if ((flo.array() > hi[tc].array() + 1e-13).any() ||
          (fhi.array() < lo[tc].array() - 1e-13).any()) {
        continue;
      }
      const auto& ctri = mt.triangles[tc];
      Polygon region = clip_to_triangle(fine, mt.vertices[ctri[0]], mt.vertices[ctri[1]],
                                        mt.vertices[ctri[2]]);
      if (region.size() < 3 || polygon_area(region) < 1e-14) continue;
      for (std::size_t fan = 1; fan + 1 < region.size(); ++fan) {
        const Eigen::Vector2d& p0 = region[0];
        const Eigen::Vector2d& p1 = region[fan];
        const Eigen::Vector2d& p2 = region[fan + 1];
        double det = (p1 - p0).x() * (p2 - p0).y() - (p2 - p0).x() * (p1 - p0).y();
        if (det <= 1e-15) continue;
        for (int q = 0; q < rule.size(); ++q) {
          Eigen::Vector2d x = p0 + rule.points(q, 0) * (p1 - p0) + rule.points(q, 1) * (p2 - p0);
          double w = det * rule.weights[q];
          Eigen::Vector2d rc = trial.inv_jacobian_t(tc).transpose() * (x - mt.vertices[ctri[0]]);
          ref_pt(0, 0) = rc.x();
          ref_pt(0, 1) = rc.y();
          BasisEval bt = trial.eval_basis(tc, ref_pt);
          Eigen::Vector2d rf = test.inv_jacobian_t(tf).transpose() * (x - mv.vertices[ftri[0]]);
          ref_pt(0, 0) = rf.x();
          ref_pt(0, 1) = rf.y();
          BasisEval bv = test.eval_basis(tf, ref_pt);
          for (int kv = 0; kv < test.dofs_per_element(); ++kv) {
            int i = test.dof(tf, kv);
            if (i < 0) continue;
            for (int kt = 0; kt < trial.dofs_per_element(); ++kt) {
              int j = trial.dof(tc, kt);
              if (j < 0) continue;
              B(i, j) += w * (bt.grad[0](kt, 0) * bv.grad[0](kv, 0) +
                              bt.grad[1](kt, 0) * bv.grad[1](kv, 0));
            }
          }
        }
      }
    }
  }
  return B;
}

Eigen::VectorXd assemble_load(const Space1D& test, const ProblemDefinition& problem, double lambda) {
  if (!problem.lambda_in_domain(lambda)) throw ConfigError("assemble_load: lambda outside the parameter domain");
  const Mesh1D& mesh = test.mesh();
  Eigen::VectorXd L = Eigen::VectorXd::Zero(test.dof_count());

  if (problem.load.kind == LoadFamily::Kind::dirac_1d) {
    int e = mesh.locate(lambda);
    double t = (lambda - mesh.nodes[e]) / mesh.element_length(e);
    double val[2] = {1.0 - t, t};
    for (int k = 0; k < 2; ++k) {
      int i = test.dof(e, k);
      if (i >= 0) L[i] += val[k];
    }
    return L;
  }
  if (problem.load.kind != LoadFamily::Kind::function_1d) {
    throw ConfigError("assemble_load: load family does not match a 1D test space");
  }

  std::vector<double> kinks = problem.load.kinks ? problem.load.kinks(lambda) : std::vector<double>{};
  const QuadratureRule& rule = rule_1d();
  for (int e = 0; e < mesh.element_count(); ++e) {
    double x0 = mesh.nodes[e], x1 = mesh.nodes[e + 1];
    double h = x1 - x0;
    std::vector<double> pieces = {x0};
    for (double k : kinks) {
      if (k > x0 + 1e-14 && k < x1 - 1e-14) pieces.push_back(k);
    }
    pieces.push_back(x1);
    std::sort(pieces.begin(), pieces.end());
    for (std::size_t s = 0; s + 1 < pieces.size(); ++s) {
      double len = pieces[s + 1] - pieces[s];
      for (int q = 0; q < rule.size(); ++q) {
        double x = pieces[s] + len * rule.points(q, 0);
        double w = len * rule.weights[q];
        double t = (x - x0) / h;
        double f = problem.load.f1(lambda, x);
        double val[2] = {1.0 - t, t};
        for (int k = 0; k < 2; ++k) {
          int i = test.dof(e, k);
          if (i >= 0) L[i] += w * f * val[k];
        }
      }
    }
  }
  return L;
}

Eigen::VectorXd assemble_load(const Space2D& test, const ProblemDefinition& problem, double lambda) {
  if (!problem.lambda_in_domain(lambda)) throw ConfigError("assemble_load: lambda outside the parameter domain");
  if (problem.load.kind != LoadFamily::Kind::function_2d) {
    throw ConfigError("assemble_load: load family does not match a 2D test space");
  }
  const QuadratureRule& rule = rule_tri();
  Eigen::VectorXd L = Eigen::VectorXd::Zero(test.dof_count());
  // Shape values at the reference points are shared by all triangles.
  BasisEval basis = test.eval_basis(0, rule.points);
  for (int t = 0; t < test.mesh().triangle_count(); ++t) {
    double det = test.jacobian_det(t);
    for (int q = 0; q < rule.size(); ++q) {
      Eigen::Vector2d x = test.to_physical(t, rule.points.row(q).transpose());
      double w = det * rule.weights[q] * problem.load.f2(lambda, x.x(), x.y());
      for (int k = 0; k < test.dofs_per_element(); ++k) {
        int i = test.dof(t, k);
        if (i >= 0) L[i] += w * basis.values(k, q);
      }
    }
  }
  return L;
}

Eigen::VectorXd assemble_qoi(const Space1D& trial, const QoiSpec& qoi) {
  if (qoi.kind != QoiSpec::Kind::point_value) {
    throw ConfigError("assemble_qoi: 1D quantities of interest are point values");
  }
  const Mesh1D& mesh = trial.mesh();
  if (qoi.x0 < mesh.a() || qoi.x0 > mesh.b()) throw ConfigError("assemble_qoi: point outside the domain");
  Eigen::VectorXd Q = Eigen::VectorXd::Zero(trial.dof_count());
  int e = mesh.locate(qoi.x0);
  double t = (qoi.x0 - mesh.nodes[e]) / mesh.element_length(e);
  double val[2] = {1.0 - t, t};
  for (int k = 0; k < 2; ++k) {
    int j = trial.dof(e, k);
    if (j >= 0) Q[j] += val[k];
  }
  return Q;
}

Eigen::VectorXd assemble_qoi(const Space2D& trial, const QoiSpec& qoi) {
  if (qoi.kind != QoiSpec::Kind::subdomain_average) {
    throw ConfigError("assemble_qoi: 2D quantities of interest are subdomain averages");
  }
  if (qoi.rect_lo[0] < 0 || qoi.rect_lo[1] < 0 || qoi.rect_hi[0] > 1 || qoi.rect_hi[1] > 1 ||
      qoi.rect_lo[0] >= qoi.rect_hi[0] || qoi.rect_lo[1] >= qoi.rect_hi[1]) {
    throw ConfigError("assemble_qoi: averaging window is not inside the domain");
  }
  // Tensor Gauss directly on the window; trial values found by point
  // location. Weights of the [0,1] rule sum to 1, so this is the average.
  const QuadratureRule& g = rule_1d();
  Eigen::VectorXd Q = Eigen::VectorXd::Zero(trial.dof_count());
  Eigen::MatrixXd ref_pt(1, 2);
  for (int qx = 0; qx < g.size(); ++qx) {
    for (int qy = 0; qy < g.size(); ++qy) {
      Eigen::Vector2d x(qoi.rect_lo[0] + (qoi.rect_hi[0] - qoi.rect_lo[0]) * g.points(qx, 0),
                        qoi.rect_lo[1] + (qoi.rect_hi[1] - qoi.rect_lo[1]) * g.points(qy, 0));
      double w = g.weights[qx] * g.weights[qy];
      auto [t, ref] = trial.locate(x);
      ref_pt(0, 0) = ref.x();
      ref_pt(0, 1) = ref.y();
      BasisEval basis = trial.eval_basis(t, ref_pt);
      for (int k = 0; k < trial.dofs_per_element(); ++k) {
        int j = trial.dof(t, k);
        if (j >= 0) Q[j] += w * basis.values(k, 0);
      }
    }
  }
  return Q;
}

namespace {

template <typename Space>
AssembledSystem assemble_system_impl(const Space& trial, const Space& test, const WeightNet& net,
                                     const ProblemDefinition& problem) {
  if (problem.qois.empty()) throw ConfigError("assemble_system: no quantity of interest given");
  AssembledSystem sys;
  sys.A = assemble_gram(test, net, problem);
  sys.B = assemble_bilinear(trial, test, problem);
  sys.m = static_cast<int>(sys.A.rows());
  sys.n = static_cast<int>(sys.B.cols());
  sys.Q.resize(sys.n, problem.qois.size());
  for (std::size_t k = 0; k < problem.qois.size(); ++k) {
    sys.Q.col(k) = assemble_qoi(trial, problem.qois[k]);
  }
  return sys;
}

}  // namespace

AssembledSystem assemble_system(const Space1D& trial, const Space1D& test, const WeightNet& net,
                                const ProblemDefinition& problem) {
  return assemble_system_impl(trial, test, net, problem);
}

AssembledSystem assemble_system(const Space2D& trial, const Space2D& test, const WeightNet& net,
                                const ProblemDefinition& problem) {
  return assemble_system_impl(trial, test, net, problem);
}

void write_matrix_csv(const Eigen::MatrixXd& mat, const std::string& path) {
  CsvWriter csv(path);
  std::vector<std::string> row(mat.cols());
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) row[j] = format_g17(mat(i, j));
    csv.row(row);
  }
}

}  // namespace goalfem
