#pragma once

#include <array>
#include <functional>
#include <vector>

namespace goalfem {

/// The three variational problems treated here. The form fixes the weighted
/// test-space inner product that goes with it:
///   diffusion_1d:  b(u,v) = int u'v',        (v1,v2) = int w v1'v2'
///   advection_1d:  b(u,v) = int u'v,         (v1,v2) = int w v1 v2
///   diffusion_2d:  b(u,v) = int grad u.grad v, (v1,v2) = int w grad v1.grad v2
enum class FormKind { diffusion_1d, advection_1d, diffusion_2d };

inline int form_dim(FormKind f) { return f == FormKind::diffusion_2d ? 2 : 1; }

/// Whether the weighted inner product pairs gradients (H1-type) or values.
inline bool gradient_inner_product(FormKind f) { return f != FormKind::advection_1d; }

struct QoiSpec {
  enum class Kind { point_value, subdomain_average };
  Kind kind = Kind::point_value;
  double x0 = 0.0;                       // point_value (1D)
  std::array<double, 2> rect_lo{0, 0};   // subdomain_average (2D)
  std::array<double, 2> rect_hi{0, 0};
};

/// Right-hand-side family. Dirac loads are point evaluations; 1D function
/// loads may declare kink locations so integration stays exact.
struct LoadFamily {
  enum class Kind { dirac_1d, function_1d, function_2d };
  Kind kind = Kind::dirac_1d;
  std::function<double(double lambda, double x)> f1;
  std::function<double(double lambda, double x, double y)> f2;
  std::function<std::vector<double>(double lambda)> kinks;
};

struct ProblemDefinition {
  FormKind form = FormKind::diffusion_1d;
  LoadFamily load;
  std::vector<QoiSpec> qois;
  std::array<double, 2> lambda_domain{0.0, 1.0};
  // Exact solutions, when the problem has a closed form (else unset).
  std::function<double(double lambda, double x)> exact_1d;
  std::function<double(double lambda, double x, double y)> exact_2d;

  int dim() const { return form_dim(form); }
  bool lambda_in_domain(double lambda) const {
    return lambda >= lambda_domain[0] && lambda <= lambda_domain[1];
  }
};

ProblemDefinition make_diffusion_1d_problem(std::vector<QoiSpec> qois);
ProblemDefinition make_advection_1d_problem(std::vector<QoiSpec> qois);
ProblemDefinition make_diffusion_2d_problem(std::vector<QoiSpec> qois);

}  // namespace goalfem
