#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace holobar {

enum class QuadScheme { gauss_legendre_ordered, uniform_ordered };

/* Discretization of the time simplices and the series truncation.  Gauss-
 * Legendre nodes feed the ordered-substitution map Delta_k <- [0,1]^k; the
 * panel count drives the product-integral evaluation of exponential series
 * (holonomy factorizes over time subdivision, so panels are exact). */
struct QuadratureSpec {
  QuadScheme scheme = QuadScheme::gauss_legendre_ordered;
  int nodes = 16;        // per axis
  int k_max = 6;         // simplex arity cap (per panel for series)
  int panels = 8;        // time subdivision for series evaluation
  double tail_tol = 1e-12;

  /* per-arity node schedule for the series evaluation: high arities carry
   * O((S h)^j / j!) and need only low-order rules */
  int nodes_for(int arity) const {
    if (arity <= 2) return nodes;
    if (arity == 3) return std::max(4, nodes / 2);
    if (arity == 4) return std::max(4, nodes / 3);
    return std::max(3, nodes / 4);
  }
};

/* Gauss-Legendre nodes/weights on [0,1], Newton on Legendre polynomials. */
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      double dp = n * (t * p0 - p1) / (t * t - 1.0);
      double dt = p0 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = 0.0;
    for (int j = 0; j < n; ++j) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
    }
    double dp = n * (t * p0 - p1) / (t * t - 1.0);
    x[i] = 0.5 * (1.0 - t);  // map [-1,1] -> [0,1], ascending
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

inline void quad_nodes(QuadScheme scheme, int nodes, std::vector<double>& x,
                       std::vector<double>& w) {
  if (scheme == QuadScheme::gauss_legendre_ordered) {
    gauss_legendre(nodes, x, w);
  } else {
    x.assign(nodes, 0.0);
    w.assign(nodes, 1.0 / nodes);
    for (int i = 0; i < nodes; ++i) x[i] = (i + 0.5) / nodes;  // open midpoints
  }
}

/* Iterate the ordered simplex a <= t_1 <= ... <= t_k <= b through the
 * substitution t_j = a + (b-a) prod_{i>=j} s_i, Jacobian (b-a)^k prod s_i^{i-1}.
 * Calls f(t, weight) at every tensor node. */
inline void simplex_quadrature_n(int k, double a, double b, QuadScheme scheme, int nodes,
                                 const std::function<void(const std::vector<double>&, double)>& f) {
  if (k == 0) {
    std::vector<double> t;
    f(t, 1.0);
    return;
  }
  std::vector<double> x, w;
  quad_nodes(scheme, nodes, x, w);
  const int n = nodes;
  std::vector<int> idx(k, 0);
  std::vector<double> t(k);
  const double len = b - a;
  while (true) {
    double weight = 1.0;
    double prod = 1.0;
    for (int j = k - 1; j >= 0; --j) {
      prod *= x[idx[j]];
      t[j] = a + len * prod;
      weight *= w[idx[j]];
    }
    // Jacobian: len^k * prod_j x_j^{j-1} with j the 1-based axis position
    double jac = 1.0;
    for (int j = 1; j < k; ++j) {
      double xv = x[idx[j]];
      double p = 1.0;
      for (int e = 0; e < j; ++e) p *= xv;
      jac *= p;
    }
    for (int e = 0; e < k; ++e) jac *= len;
    f(t, weight * jac);
    int j = 0;
    for (; j < k; ++j) {
      if (++idx[j] < n) break;
      idx[j] = 0;
    }
    if (j == k) break;
  }
}

inline void simplex_quadrature(int k, double a, double b, const QuadratureSpec& q,
                               const std::function<void(const std::vector<double>&, double)>& f) {
  simplex_quadrature_n(k, a, b, q.scheme, q.nodes, f);
}

}  // namespace holobar
