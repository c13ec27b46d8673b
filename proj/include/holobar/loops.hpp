#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace holobar {

/* Value of a plot evaluation: the point and its first derivatives. */
struct LoopJet {
  std::vector<double> x;                    // point in R^n
  std::vector<double> dtheta;               // dx/dtheta
  std::vector<std::vector<double>> du;      // dx/du_j, j < m
};

/* Smooth family [0,1]^m x S^1 -> R^n with first derivatives.  Built-in
 * constructors are analytic (Fourier) or plateau-reparametrized; callback
 * families carry caller-supplied derivatives (never finite-differenced
 * silently). */
struct LoopFamily {
  int m = 0;  // parameter dimension
  int n = 1;  // ambient dimension
  bool based = false;
  double collar = 1.0 / 16.0;  // theta-collar width for based loops
  std::vector<double> basepoint;
  std::function<LoopJet(std::span<const double>, double)> eval;

  LoopJet operator()(std::span<const double> u, double theta) const { return eval(u, theta); }
};

/* C-infinity step: 0 on t<=0, 1 on t>=1. */
inline double smooth_step(double t) {
  auto sigma = [](double s) { return s <= 0.0 ? 0.0 : std::exp(-1.0 / s); };
  double a = sigma(t), b = sigma(1.0 - t);
  return a / (a + b);
}
inline double smooth_step_deriv(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  auto sigma = [](double s) { return s <= 0.0 ? 0.0 : std::exp(-1.0 / s); };
  auto dsigma = [&](double s) { return s <= 0.0 ? 0.0 : std::exp(-1.0 / s) / (s * s); };
  double a = sigma(t), b = sigma(1.0 - t);
  double da = dsigma(t), db = -dsigma(1.0 - t);
  double s = a + b;
  return (da * s - a * (da + db)) / (s * s);
}

/* Plateau reparametrization: 0 on [0,delta], 1 on [1-delta,1]. */
inline double plateau(double theta, double delta) {
  return smooth_step((theta - delta) / (1.0 - 2.0 * delta));
}
inline double plateau_deriv(double theta, double delta) {
  return smooth_step_deriv((theta - delta) / (1.0 - 2.0 * delta)) / (1.0 - 2.0 * delta);
}

/* Truncated Fourier loop family: coordinates
 *   x_c(u,theta) = a0_c(u) + sum_h ac_{c,h}(u) cos(2 pi h theta)
 *                          + as_{c,h}(u) sin(2 pi h theta),
 * with coefficients affine in u (enough for every scenario here). */
struct FourierSpec {
  struct Coef {
    double c0 = 0;
    std::vector<double> cu;  // linear coefficients in u
    double at(std::span<const double> u) const {
      double v = c0;
      for (std::size_t j = 0; j < cu.size() && j < u.size(); ++j) v += cu[j] * u[j];
      return v;
    }
    double du(int j) const { return j < static_cast<int>(cu.size()) ? cu[j] : 0.0; }
  };
  struct Harmonic {
    int h = 1;
    Coef cosc, sinc;
  };
  struct Coordinate {
    Coef center;
    std::vector<Harmonic> harmonics;
  };
  std::vector<Coordinate> coords;
  int m = 0;
};

inline LoopFamily fourier_family(const FourierSpec& spec) {
  LoopFamily f;
  f.m = spec.m;
  f.n = static_cast<int>(spec.coords.size());
  f.eval = [spec](std::span<const double> u, double theta) {
    const double tau = 2.0 * std::numbers::pi;
    LoopJet jet;
    const int n = static_cast<int>(spec.coords.size());
    jet.x.assign(n, 0.0);
    jet.dtheta.assign(n, 0.0);
    jet.du.assign(spec.m, std::vector<double>(n, 0.0));
    for (int c = 0; c < n; ++c) {
      const auto& coord = spec.coords[c];
      jet.x[c] = coord.center.at(u);
      for (int j = 0; j < spec.m; ++j) jet.du[j][c] = coord.center.du(j);
      for (const auto& harm : coord.harmonics) {
        double ct = std::cos(tau * harm.h * theta), st = std::sin(tau * harm.h * theta);
        jet.x[c] += harm.cosc.at(u) * ct + harm.sinc.at(u) * st;
        jet.dtheta[c] +=
            tau * harm.h * (-harm.cosc.at(u) * st + harm.sinc.at(u) * ct);
        for (int j = 0; j < spec.m; ++j)
          jet.du[j][c] += harm.cosc.du(j) * ct + harm.sinc.du(j) * st;
      }
    }
    return jet;
  };
  return f;
}

/* Based version: reparametrize by the plateau so the loop is constant on the
 * collars; requires x(u, 0) independent of theta-side mismatch (the Fourier
 * loop is periodic by construction). */
inline LoopFamily based_family(LoopFamily inner, double delta = 1.0 / 16.0) {
  LoopFamily f = inner;
  f.based = true;
  f.collar = delta;
  LoopFamily base = inner;
  f.eval = [base, delta](std::span<const double> u, double theta) {
    double p = plateau(theta, delta);
    double dp = plateau_deriv(theta, delta);
    LoopJet jet = base.eval(u, p);
    for (double& v : jet.dtheta) v *= dp;
    return jet;
  };
  {
    std::vector<double> origin(inner.m, 0.0);
    f.basepoint = inner.eval(origin, 0.0).x;
  }
  return f;
}

inline LoopFamily constant_loop(std::vector<double> point, int m = 0) {
  LoopFamily f;
  f.m = m;
  f.n = static_cast<int>(point.size());
  f.based = true;
  f.basepoint = point;
  f.eval = [point, m](std::span<const double>, double) {
    LoopJet jet;
    jet.x = point;
    jet.dtheta.assign(point.size(), 0.0);
    jet.du.assign(m, std::vector<double>(point.size(), 0.0));
    return jet;
  };
  return f;
}

/* theta |-> 1 - theta; involution, flips the theta derivative. */
inline LoopFamily loop_reverse(const LoopFamily& f) {
  LoopFamily r = f;
  LoopFamily base = f;
  r.eval = [base](std::span<const double> u, double theta) {
    LoopJet jet = base.eval(u, 1.0 - theta);
    for (double& v : jet.dtheta) v = -v;
    return jet;
  };
  return r;
}

enum class ConcatMode { halfspeed, moore };

/* Concatenation gamma(2t)/gamma'(2t-1).  Checks the endpoint match at the
 * shared parameter origin; based collars keep the splice smooth. */
inline LoopFamily loop_concat(const LoopFamily& f, const LoopFamily& g,
                              ConcatMode mode = ConcatMode::halfspeed,
                              double tol = 1e-12) {
  if (f.m != g.m || f.n != g.n)
    throw std::invalid_argument("loop_concat: incompatible families");
  if (mode == ConcatMode::halfspeed && (!f.based || !g.based))
    throw std::invalid_argument("loop_concat: halfspeed mode needs based collars");
  {
    std::vector<double> origin(f.m, 0.0);
    LoopJet a = f.eval(origin, 1.0), b = g.eval(origin, 0.0);
    for (int c = 0; c < f.n; ++c)
      if (std::abs(a.x[c] - b.x[c]) > tol)
        throw std::invalid_argument("loop_concat: endpoint mismatch");
  }
  LoopFamily out = f;
  LoopFamily lf = f, lg = g;
  out.collar = std::min(f.collar, g.collar) / 2.0;
  out.eval = [lf, lg](std::span<const double> u, double theta) {
    if (theta <= 0.5) {
      LoopJet jet = lf.eval(u, 2.0 * theta);
      for (double& v : jet.dtheta) v *= 2.0;
      return jet;
    }
    LoopJet jet = lg.eval(u, 2.0 * theta - 1.0);
    for (double& v : jet.dtheta) v *= 2.0;
    return jet;
  };
  (void)mode;
  return out;
}

/* ---- based Moore loops ---- */

/* Smooth map Delta_k -> (Moore loops): gamma(t, s) for s in [0, l(t)],
 * constant near s = 0 and s >= l(t) - eps.  Ordered-tuple simplex model:
 * 0 <= t_1 <= ... <= t_k <= 1. */
struct MooreLoopSimplex {
  int k = 0;  // simplex dimension
  int n = 1;
  std::vector<double> basepoint;
  /* length and its t-gradient */
  std::function<double(std::span<const double>)> length;
  std::function<std::vector<double>(std::span<const double>)> length_grad;
  /* jet of (t, s) |-> gamma_t(s); du holds the t_i derivatives */
  std::function<LoopJet(std::span<const double>, double)> eval;
};

/* View a Moore simplex as a based loop family over Delta_k via
 * q(gamma, l)(theta) = gamma(l theta). */
inline LoopFamily q_reparametrized(const MooreLoopSimplex& s) {
  LoopFamily f;
  f.m = s.k;
  f.n = s.n;
  f.based = true;
  f.basepoint = s.basepoint;
  MooreLoopSimplex ms = s;
  f.eval = [ms](std::span<const double> t, double theta) {
    double l = ms.length(t);
    std::vector<double> lg = ms.length_grad(t);
    LoopJet jet = ms.eval(t, l * theta);
    // d/dtheta = l * gamma_s ; d/dt_i += theta l_i gamma_s
    LoopJet out;
    out.x = jet.x;
    out.dtheta.assign(ms.n, 0.0);
    out.du.assign(ms.k, std::vector<double>(ms.n, 0.0));
    for (int c = 0; c < ms.n; ++c) out.dtheta[c] = l * jet.dtheta[c];
    for (int i = 0; i < ms.k; ++i)
      for (int c = 0; c < ms.n; ++c)
        out.du[i][c] = jet.du[i][c] + theta * lg[i] * jet.dtheta[c];
    return out;
  };
  return f;
}

/* Moore concatenation (gamma * gamma', l + l'). */
inline MooreLoopSimplex moore_concat(const MooreLoopSimplex& a, const MooreLoopSimplex& b) {
  if (a.k != b.k || a.n != b.n)
    throw std::invalid_argument("moore_concat: mismatched simplices");
  MooreLoopSimplex out;
  out.k = a.k;
  out.n = a.n;
  out.basepoint = a.basepoint;
  MooreLoopSimplex ma = a, mb = b;
  out.length = [ma, mb](std::span<const double> t) { return ma.length(t) + mb.length(t); };
  out.length_grad = [ma, mb](std::span<const double> t) {
    std::vector<double> g = ma.length_grad(t), h = mb.length_grad(t);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += h[i];
    return g;
  };
  out.eval = [ma, mb](std::span<const double> t, double s) {
    double la = ma.length(t);
    if (s <= la) return ma.eval(t, s);
    LoopJet jet = mb.eval(t, s - la);
    // d/dt_i of gamma'(s - la(t)) adds -la_i * gamma'_s
    std::vector<double> lg = ma.length_grad(t);
    for (int i = 0; i < ma.k; ++i)
      for (int c = 0; c < ma.n; ++c) jet.du[i][c] -= lg[i] * jet.dtheta[c];
    return jet;
  };
  return out;
}

/* Moore simplex built from a based loop family over the simplex parameters
 * (unit length, already collared). */
inline MooreLoopSimplex moore_from_based(const LoopFamily& f, double length = 1.0) {
  if (!f.based) throw std::invalid_argument("moore_from_based: family must be based");
  MooreLoopSimplex s;
  s.k = f.m;
  s.n = f.n;
  s.basepoint = f.basepoint;
  double l0 = length;
  LoopFamily lf = f;
  s.length = [l0](std::span<const double>) { return l0; };
  s.length_grad = [lf, l0](std::span<const double>) {
    return std::vector<double>(lf.m, 0.0);
  };
  s.eval = [lf, l0](std::span<const double> t, double sv) {
    double theta = std::min(std::max(sv / l0, 0.0), 1.0);
    LoopJet jet = lf.eval(t, theta);
    for (double& v : jet.dtheta) v /= l0;
    return jet;
  };
  return s;
}

/* Face maps of the ordered-coordinate simplex Delta_k = {0<=t_1<=..<=t_k<=1}:
 * delta_0 prepends 0, delta_k appends 1, and the middle delta_j duplicates
 * the j-th coordinate (barycentric s_j = 0). */
inline std::vector<double> simplex_face(std::span<const double> t, int j, int k) {
  std::vector<double> res;
  res.reserve(k);
  if (j == 0) {
    res.push_back(0.0);
    for (int i = 0; i + 1 < k; ++i) res.push_back(t[i]);
  } else if (j == k) {
    for (int i = 0; i + 1 < k; ++i) res.push_back(t[i]);
    res.push_back(1.0);
  } else {
    for (int i = 0; i + 1 < k; ++i) {
      res.push_back(t[i]);
      if (i == j - 1) res.push_back(t[i]);
    }
  }
  return res;
}

/* which face-parameter index each input slot s reads; -1 for constants */
inline std::vector<int> face_source_map(int j, int k) {
  std::vector<int> map(k, -1);
  for (int s = 0; s < k; ++s) {
    if (j == 0) {
      map[s] = (s == 0) ? -1 : s - 1;
    } else if (j == k) {
      map[s] = (s == k - 1) ? -1 : s;
    } else {
      if (s < j)
        map[s] = s;
      else if (s == j)
        map[s] = j - 1;
      else
        map[s] = s - 1;
    }
  }
  return map;
}

inline MooreLoopSimplex moore_face(const MooreLoopSimplex& s, int j) {
  MooreLoopSimplex out;
  out.k = s.k - 1;
  out.n = s.n;
  out.basepoint = s.basepoint;
  MooreLoopSimplex ms = s;
  int face = j;
  out.length = [ms, face](std::span<const double> t) {
    auto tt = simplex_face(t, face, ms.k);
    return ms.length(tt);
  };
  out.length_grad = [ms, face](std::span<const double> t) {
    auto tt = simplex_face(t, face, ms.k);
    std::vector<double> g = ms.length_grad(tt);
    std::vector<int> src = face_source_map(face, ms.k);
    std::vector<double> out_g(ms.k - 1, 0.0);
    for (int sidx = 0; sidx < ms.k; ++sidx)
      if (src[sidx] >= 0) out_g[src[sidx]] += g[sidx];
    return out_g;
  };
  out.eval = [ms, face](std::span<const double> t, double sv) {
    auto tt = simplex_face(t, face, ms.k);
    LoopJet jet = ms.eval(tt, sv);
    std::vector<int> src = face_source_map(face, ms.k);
    std::vector<std::vector<double>> du(ms.k - 1, std::vector<double>(ms.n, 0.0));
    for (int sidx = 0; sidx < ms.k; ++sidx)
      if (src[sidx] >= 0)
        for (int c = 0; c < ms.n; ++c) du[src[sidx]][c] += jet.du[sidx][c];
    jet.du = std::move(du);
    return jet;
  };
  return out;
}

}  // namespace holobar
