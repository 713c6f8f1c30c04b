#include "goalfem/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "goalfem/errors.hpp"

namespace goalfem {

namespace {

// Legendre P_n and its derivative at x via the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = (n == 0) ? 1.0 : p1;
  dp = (n == 0) ? 0.0 : n * (x * p1 - p0) / (x * x - 1.0);
}

// Symmetric triangle rule groups given in barycentric coordinates; weights
// are normalized to sum to 1 and later scaled by the reference area 1/2.
struct BarycentricGroup {
  double l1, l2, l3;
  double weight;
  bool six_fold;  // permute all 6 orders instead of the 3 cyclic ones
};

QuadratureRule triangle_from_groups(const BarycentricGroup* groups, int count, int order) {
  int np = 0;
  for (int g = 0; g < count; ++g) {
    bool center = groups[g].l1 == groups[g].l2 && groups[g].l2 == groups[g].l3;
    np += center ? 1 : (groups[g].six_fold ? 6 : 3);
  }
  QuadratureRule rule;
  rule.points.resize(np, 2);
  rule.weights.resize(np);
  rule.order = order;
  int row = 0;
  auto push = [&](double /*l1*/, double l2, double l3, double w) {
    // reference triangle (0,0),(1,0),(0,1): point = l2*v1 + l3*v2
    rule.points(row, 0) = l2;
    rule.points(row, 1) = l3;
    rule.weights[row] = 0.5 * w;
    ++row;
  };
  for (int g = 0; g < count; ++g) {
    double a = groups[g].l1, b = groups[g].l2, c = groups[g].l3, w = groups[g].weight;
    if (a == b && b == c) {
      push(a, b, c, w);
    } else if (!groups[g].six_fold) {
      push(a, b, c, w);
      push(c, a, b, w);
      push(b, c, a, w);
    } else {
      push(a, b, c, w);
      push(a, c, b, w);
      push(b, a, c, w);
      push(b, c, a, w);
      push(c, a, b, w);
      push(c, b, a, w);
    }
  }
  return rule;
}

QuadratureRule triangle_rule(int order) {
  if (order <= 1) {
    const BarycentricGroup g[] = {{1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0, false}};
    return triangle_from_groups(g, 1, 1);
  }
  if (order <= 2) {
    const BarycentricGroup g[] = {{2.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3, false}};
    return triangle_from_groups(g, 1, 2);
  }
  if (order <= 4) {
    const BarycentricGroup g[] = {
        {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011, false},
        {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322, false},
    };
    return triangle_from_groups(g, 2, 4);
  }
  if (order <= 5) {
    const BarycentricGroup g[] = {
        {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225, false},
        {0.059715871789770, 0.470142064105115, 0.470142064105115, 0.132394152788506, false},
        {0.797426985353087, 0.101286507323456, 0.101286507323456, 0.125939180544827, false},
    };
    return triangle_from_groups(g, 3, 5);
  }
  if (order <= 6) {
    const BarycentricGroup g[] = {
        {0.501426509658179, 0.249286745170910, 0.249286745170910, 0.116786275726379, false},
        {0.873821971016996, 0.063089014491502, 0.063089014491502, 0.050844906370207, false},
        {0.053145049844817, 0.310352451033784, 0.636502499121399, 0.082851075618374, true},
    };
    return triangle_from_groups(g, 3, 6);
  }
  throw ConfigError("triangle quadrature: orders above 6 are not available");
}

}  // namespace

QuadratureRule gauss_legendre_01(int n) {
  if (n < 1 || n > 30) throw ConfigError("gauss_legendre_01: point count out of range");
  QuadratureRule rule;
  rule.points.resize(n, 1);
  rule.weights.resize(n);
  rule.order = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    // Newton from the Chebyshev-like initial guess; converges quadratically.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0, dp = 0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(n, x, p, dp);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points(n - 1 - i, 0) = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

QuadratureRule quadrature_rule(ElementKind kind, int order) {
  if (order < 1) throw ConfigError("quadrature_rule: order must be positive");
  if (kind == ElementKind::interval) return gauss_legendre_01((order + 2) / 2);
  return triangle_rule(order);
}

}  // namespace goalfem
