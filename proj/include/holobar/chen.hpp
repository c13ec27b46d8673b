#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "holobar/bar.hpp"
#include "holobar/grassmann.hpp"
#include "holobar/loops.hpp"
#include "holobar/polyform.hpp"
#include "holobar/quadrature.hpp"

namespace holobar {

/* Generator layout: dt bits 0..dt_slots-1, tangent placeholders above. */
struct GenLayout {
  int dt_slots = 0;
  int n_theta = 0;
  std::uint32_t dt_bit(int i) const { return 1u << i; }
  std::uint32_t theta_bit(int j) const { return 1u << (dt_slots + j); }
  std::uint32_t theta_full() const {
    return ((n_theta ? ((1u << n_theta) - 1) : 0u)) << dt_slots;
  }
};

/* One point of a plot with everything a letter evaluation needs. */
struct PlotPoint {
  std::vector<double> x;
  std::vector<double> dt_dir;                 // dx/dtheta (times used as loop time)
  std::vector<std::vector<double>> theta_dir; // dx/du . v_j per placeholder
};

inline PlotPoint plot_point(const LoopFamily& f, std::span<const double> u, double theta,
                            const std::vector<std::vector<double>>& vectors) {
  LoopJet jet = f.eval(u, theta);
  PlotPoint p;
  p.x = jet.x;
  p.dt_dir = jet.dtheta;
  p.theta_dir.assign(vectors.size(), std::vector<double>(f.n, 0.0));
  for (std::size_t j = 0; j < vectors.size(); ++j)
    for (int c = 0; c < f.n; ++c)
      for (int a = 0; a < f.m; ++a) p.theta_dir[j][c] += jet.du[a][c] * vectors[j][a];
  return p;
}

/* Evaluate a matrix-valued polynomial form at a plot point as an element of
 * the Grassmann evaluation algebra.  use_dt < 0 means no dt direction (the
 * base-point slot); tau tags the letter with a segment. */
inline SuperElem eval_form(const FormsAlgebra& M, const PolyForm& alpha,
                           const SuperContext& ctx, const GenLayout& gl,
                           const PlotPoint& pt, int use_dt, int hi = 0, int lo = 0) {
  SuperElem out;
  /* Grassmann coordinates of dX_c = dt * dt_dir[c] + sum_j theta_j dir_j[c] */
  const int n = M.n;
  double denv = 1.0;
  if (M.den) denv = M.den->eval(pt.x);
  for (auto& [key, c] : alpha.terms) {
    double scalar = to_double(c) * key.mono.eval(pt.x);
    if (key.den_exp > 0) {
      if (std::abs(denv) < 1e-300)
        throw std::runtime_error("quadrature point hits a denominator zero");
      for (int e = 0; e < key.den_exp; ++e) scalar /= denv;
    }
    if (scalar == 0.0) continue;
    /* multiply out the dx factors in ascending coordinate order */
    std::map<std::uint32_t, double> gval;
    gval[0u] = 1.0;
    bool dead = false;
    for (int v = 0; v < n && !dead; ++v) {
      if (!(key.dxmask & (1u << v))) continue;
      std::map<std::uint32_t, double> next;
      for (auto& [mask, coeff] : gval) {
        if (use_dt >= 0 && pt.dt_dir[v] != 0.0) {
          std::uint32_t b = gl.dt_bit(use_dt);
          if (!(mask & b)) {
            int s = grassmann_merge_sign(mask, b);
            next[mask | b] += coeff * pt.dt_dir[v] * s;
          }
        }
        for (int j = 0; j < gl.n_theta; ++j) {
          double comp = pt.theta_dir[j][v];
          if (comp == 0.0) continue;
          std::uint32_t b = gl.theta_bit(j);
          if (mask & b) continue;
          int s = grassmann_merge_sign(mask, b);
          next[mask | b] += coeff * comp * s;
        }
      }
      gval = std::move(next);
      if (gval.empty()) dead = true;
    }
    if (dead) continue;
    for (auto& [mask, coeff] : gval) {
      if (coeff == 0.0) continue;
      double val = scalar * coeff;
      DMat blk(ctx.fib->dim(key.block.p), ctx.fib->dim(key.block.q));
      if (blk.r == 0 || blk.c == 0) continue;
      blk.at(key.block.i, key.block.j) = val;
      out.add({mask, key.block.p, key.block.q, hi, lo}, blk);
    }
  }
  return out;
}

/* strip the full dt prefix (bits 0..j-1) off every term and rebase the
 * remaining (tangent) bits to start at 0, so values from different arities
 * share one layout; terms without the full prefix drop.  dt bits are the low
 * bits, so neither step reorders generators. */
inline SuperElem extract_dt(const SuperElem& x, int j) {
  std::uint32_t dtfull = (j == 0) ? 0u : ((1u << j) - 1u);
  SuperElem out;
  for (auto& [k, m] : x.terms) {
    if ((k.gmask & dtfull) != dtfull) continue;
    SuperElem::Key nk = k;
    nk.gmask = (k.gmask & ~dtfull) >> j;
    out.add(nk, m);
  }
  return out;
}

/* A time-dependent letter field: the integrand letters, already embedded in
 * End(W) (x) F_tau form.  Chen's fibre integration is strict: every letter
 * must contribute its own dt, so 0-form parts of letters never transport
 * (degenerate words are exactly the kernel).  The 0-form component of a
 * superconnection reaches the identities only through commutator terms. */
struct LetterField {
  const FormsAlgebra* M = nullptr;
  const LoopFamily* plot = nullptr;
  std::vector<double> u;
  std::vector<std::vector<double>> vectors;
  struct Piece {
    PolyForm pos_part;   // form-degree >= 1
    int hi = 0, lo = 0;  // tau segment (hi==lo: none)
  };
  std::vector<Piece> pieces;

  void add_piece(const PolyForm& form, int hi = 0, int lo = 0) {
    Piece p;
    p.hi = hi;
    p.lo = lo;
    for (auto& [k, c] : form.terms)
      if (popcount32(k.dxmask) >= 1) p.pos_part.add(k, c);
    pieces.push_back(std::move(p));
  }

  SuperElem eval(const SuperContext& ctx, const GenLayout& gl, double t, int dt_slot) const {
    PlotPoint pt = plot_point(*plot, u, t, vectors);
    SuperElem out;
    for (const Piece& p : pieces) {
      if (p.pos_part.zero()) continue;
      SuperElem e = eval_form(*M, p.pos_part, ctx, gl, pt, dt_slot, p.hi, p.lo);
      std::uint32_t bit = gl.dt_bit(dt_slot);
      for (auto& [k, m] : e.terms)
        if (k.gmask & bit) out.add(k, m);
    }
    return out;
  }
};

/* sum over j <= k_max of the ordered integrals of L(t_1)..L(t_j) over a time
 * panel, dt's integrated out.  The j = 0 term is the identity. */
inline SuperElem panel_transfer(const LetterField& L, const SuperContext& ctx,
                                const GenLayout& gl, double a, double b,
                                const QuadratureSpec& q) {
  SuperElem T = SuperElem::identity(ctx);
  for (int j = 1; j <= q.k_max; ++j) {
    SuperElem acc;
    simplex_quadrature_n(j, a, b, q.scheme, q.nodes_for(j),
                         [&](const std::vector<double>& t, double w) {
                           SuperElem prod = L.eval(ctx, gl, t[0], 0);
                           for (int i = 1; i < j; ++i)
                             prod = super_mul(ctx, prod, L.eval(ctx, gl, t[i], i));
                           prod *= w;
                           acc += prod;
                         });
    T += extract_dt(acc, j);
  }
  return T;
}

/* full series over [0,1] as an ordered product of panel transfers (holonomy
 * factorizes over time subdivision) plus a crude certified tail bound. */
struct SeriesResult {
  SuperElem value;
  double tail_bound = 0.0;
  double sup_norm = 0.0;
};

inline SeriesResult series_transfer(const LetterField& L, const SuperContext& ctx,
                                    const GenLayout& gl, const QuadratureSpec& q) {
  SeriesResult res;
  /* sup-norm of the letter field on a sample grid, for the tail estimate */
  double sup = 0.0;
  for (int s = 0; s <= 32; ++s) {
    SuperElem e = L.eval(ctx, gl, s / 32.0, 0);
    sup = std::max(sup, e.max_abs());
  }
  res.sup_norm = sup;
  SuperElem total = SuperElem::identity(ctx);
  double h = 1.0 / q.panels;
  for (int p = 0; p < q.panels; ++p) {
    SuperElem T = panel_transfer(L, ctx, gl, p * h, (p + 1) * h, q);
    total = super_mul(ctx, total, T);
  }
  res.value = total;
  /* per-panel tail: (sup*h)^{k_max+1}/(k_max+1)! * e^{sup*h}, summed */
  double x = sup * h;
  double term = 1.0;
  for (int i = 1; i <= q.k_max + 1; ++i) term *= x / i;
  res.tail_bound = q.panels * term * std::exp(x) * std::exp(sup);
  return res;
}

/* ---- public operations ---- */

struct HolonomyValue {
  SuperElem full;     // all form-degree components, tangent bits from 0
  double tail_bound;  // certified series tail
  double sup_norm;
  const GradedFibre* fib;

  /* component of form-degree = #vectors as a total-basis matrix */
  DMat component(int nvec) const {
    std::uint32_t mask = (nvec == 0) ? 0u : ((1u << nvec) - 1u);
    int total = fib->total();
    DMat out(total, total);
    for (auto& [k, m] : full.terms) {
      if (k.gmask != mask) continue;
      int ro = fib->offset(k.p), co = fib->offset(k.q);
      for (int i = 0; i < m.r; ++i)
        for (int j2 = 0; j2 < m.c; ++j2) out.at(ro + i, co + j2) += m.at(i, j2);
    }
    return out;
  }
};

/* hol(E) restricted to a plot: sigma_{End V}(1 ox e^alpha) evaluated at u on
 * the given tangent vectors. */
inline HolonomyValue holonomy(const FormsAlgebra& M, const SuperConnection& alpha,
                              const LoopFamily& f, std::span<const double> u,
                              const std::vector<std::vector<double>>& vectors,
                              const QuadratureSpec& q) {
  SuperContext ctx(M.fibre, 0, {});
  GenLayout gl{q.k_max, static_cast<int>(vectors.size())};
  LetterField L{&M, &f, {u.begin(), u.end()}, vectors, {}};
  L.add_piece(alpha.alpha);
  SeriesResult sr = series_transfer(L, ctx, gl, q);
  return {sr.value, sr.tail_bound, sr.sup_norm, &M.fibre};
}

/* de-suspension Koszul sign of (s A)^{ox k} = A^{ox k}:
 * (-1)^{sum_i (k-i)(|a_i|-1)}.  Part of the definition of sigma; without it
 * the shuffle-compatibility fails on mixed-degree words. */
inline double suspension_sign(std::span<const int> letter_degrees) {
  const int k = static_cast<int>(letter_degrees.size());
  long e = 0;
  for (int i = 1; i <= k; ++i) e += static_cast<long>(k - i) * (letter_degrees[i - 1] - 1);
  return (e % 2) ? -1.0 : 1.0;
}

/* f^* sigma(m ox a_1 ox .. ox a_k)(u; vectors): single-word iterated
 * integral by ordered-substitution tensor quadrature.  based = true drops
 * the gamma(1) module slot (the HC variant).  letter_degrees feeds the
 * de-suspension sign; defaults to all letters of total degree 1. */
inline SuperElem iterated_integral_word(const FormsAlgebra& M,
                                        const std::optional<PolyForm>& mslot,
                                        const std::vector<PolyForm>& letters,
                                        const LoopFamily& f, std::span<const double> u,
                                        const std::vector<std::vector<double>>& vectors,
                                        const QuadratureSpec& q,
                                        const std::vector<int>* letter_degrees = nullptr) {
  const int k = static_cast<int>(letters.size());
  SuperContext ctx(M.fibre, 0, {});
  GenLayout gl{k, static_cast<int>(vectors.size())};
  SuperElem acc;
  simplex_quadrature(k, 0.0, 1.0, q, [&](const std::vector<double>& t, double w) {
    SuperElem prod = SuperElem::identity(ctx);
    if (mslot) {
      PlotPoint base = plot_point(f, u, 1.0, vectors);
      prod = eval_form(M, *mslot, ctx, gl, base, -1);
    }
    for (int i = 0; i < k; ++i) {
      PlotPoint pt = plot_point(f, u, t[i], vectors);
      SuperElem letter = eval_form(M, letters[i], ctx, gl, pt, i);
      prod = (i == 0 && !mslot) ? letter : super_mul(ctx, prod, letter);
    }
    prod *= w;
    acc += prod;
  });
  SuperElem out = extract_dt(acc, k);
  if (letter_degrees) out *= suspension_sign(*letter_degrees);
  return out;
}

/* evaluate a whole bar chain over the forms backend; plot points are shared
 * across the words of each arity (the Fourier evaluations dominate). */
inline SuperElem sigma_eval(const FormsAlgebra& M, const BarChain<FormsAlgebra>& x,
                            bool based, const LoopFamily& f, std::span<const double> u,
                            const std::vector<std::vector<double>>& vectors,
                            const QuadratureSpec& q) {
  SuperElem acc;
  std::map<int, std::vector<std::pair<const typename BarChain<FormsAlgebra>::WordKey*,
                                      const PolyForm*>>>
      by_arity;
  for (auto& [key, m] : x.words)
    by_arity[static_cast<int>(key.letters.size())].push_back({&key, &m});
  PlotPoint base = plot_point(f, u, 1.0, vectors);
  for (auto& [k, words] : by_arity) {
    SuperContext ctx(M.fibre, 0, {});
    GenLayout gl{k, static_cast<int>(vectors.size())};
    SuperElem arity_acc;
    simplex_quadrature(k, 0.0, 1.0, q, [&](const std::vector<double>& t, double w) {
      std::vector<PlotPoint> pts;
      pts.reserve(k);
      for (int i = 0; i < k; ++i) pts.push_back(plot_point(f, u, t[i], vectors));
      for (auto& [key, m] : words) {
        SuperElem prod;
        bool first = true;
        if (!based) {
          prod = eval_form(M, *m, ctx, gl, base, -1);
          first = false;
        }
        for (int i = 0; i < k; ++i) {
          SuperElem letter = eval_form(M, key->letters[i], ctx, gl, pts[i], i);
          prod = first ? letter : super_mul(ctx, prod, letter);
          first = false;
        }
        prod *= w * (based ? to_double(M.aug(*m)) : 1.0) *
                suspension_sign(std::span<const int>(key->ldeg));
        arity_acc += prod;
      }
    });
    acc += extract_dt(arity_acc, k);
  }
  return acc;
}

/* ---- ODE oracle for the degree-0 part ---- */

/* Dormand-Prince 5(4) with adaptive steps on Y' = Y . A(t), Y(0) = I, fixed
 * so that abelian connections give exp of the line integral.  The 0-form
 * component of alpha enters as a plain insertion, the 1-form through the
 * loop velocity; higher components never reach the degree-0 transport. */
inline DMat ode_holonomy_oracle(const FormsAlgebra& M, const PolyForm& alpha1,
                                const LoopFamily& f, std::span<const double> u,
                                double local_tol = 1e-10) {
  const int total = M.fibre.total();
  auto A_of = [&](double t) {
    LoopJet jet = f.eval(u, t);
    DMat A(total, total);
    double denv = 1.0;
    if (M.den) denv = M.den->eval(jet.x);
    for (auto& [key, c] : alpha1.terms) {
      int fd = popcount32(key.dxmask);
      if (fd > 1) continue;
      double scalar = to_double(c) * key.mono.eval(jet.x);
      if (fd == 1) {
        int v = 0;
        while (!(key.dxmask & (1u << v))) ++v;
        scalar *= jet.dtheta[v];
      }
      for (int e = 0; e < key.den_exp; ++e) scalar /= denv;
      A.at(M.fibre.offset(key.block.p) + key.block.i,
           M.fibre.offset(key.block.q) + key.block.j) += scalar;
    }
    return A;
  };
  auto rhs = [&](double t, const DMat& y) { return dmat_mul(y, A_of(t)); };

  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  DMat y = DMat::identity(total);
  double t = 0.0, h = 1.0 / 64.0;
  int guard = 0;
  auto axpy = [&](DMat acc, double s, const DMat& k) {
    for (std::size_t i = 0; i < acc.a.size(); ++i) acc.a[i] += s * k.a[i];
    return acc;
  };
  while (t < 1.0) {
    if (++guard > 2000000) throw std::runtime_error("ode oracle: step underflow");
    if (t + h > 1.0) h = 1.0 - t;
    DMat k1 = rhs(t, y);
    DMat k2 = rhs(t + c2 * h, axpy(y, h * a21, k1));
    DMat k3 = rhs(t + c3 * h, axpy(axpy(y, h * a31, k1), h * a32, k2));
    DMat k4 = rhs(t + c4 * h, axpy(axpy(axpy(y, h * a41, k1), h * a42, k2), h * a43, k3));
    DMat k5 = rhs(t + c5 * h, axpy(axpy(axpy(axpy(y, h * a51, k1), h * a52, k2), h * a53, k3),
                                   h * a54, k4));
    DMat k6 =
        rhs(t + h, axpy(axpy(axpy(axpy(axpy(y, h * a61, k1), h * a62, k2), h * a63, k3),
                             h * a64, k4),
                        h * a65, k5));
    DMat ynew = axpy(axpy(axpy(axpy(axpy(y, h * b1, k1), h * b3, k3), h * b4, k4), h * b5, k5),
                     h * b6, k6);
    DMat k7 = rhs(t + h, ynew);
    DMat err(total, total);
    for (std::size_t i = 0; i < err.a.size(); ++i)
      err.a[i] = h * (e1 * k1.a[i] + e3 * k3.a[i] + e4 * k4.a[i] + e5 * k5.a[i] +
                      e6 * k6.a[i] + e7 * k7.a[i]);
    double emax = err.max_abs();
    if (emax <= local_tol || h < 1e-12) {
      t += h;
      y = std::move(ynew);
      if (emax > 0.0) h = std::min(1.0, h * std::min(4.0, 0.9 * std::pow(local_tol / emax, 0.2)));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(local_tol / emax, 0.2));
      if (h < 1e-13) throw std::runtime_error("ode oracle: step underflow near singularity");
    }
  }
  return y;
}

/* ---- flatness identity d hol + [pi^* alpha, hol] = 0 ---- */

/* residual evaluated on `vectors` (p of them): the exterior derivative uses
 * central differences in the plot parameters toward each vector. */
inline DMat flatness_residual(const FormsAlgebra& M, const SuperConnection& alpha,
                              const LoopFamily& f, std::span<const double> u,
                              const std::vector<std::vector<double>>& vectors,
                              const QuadratureSpec& q, double h) {
  const int p = static_cast<int>(vectors.size());
  const int total = M.fibre.total();
  DMat acc(total, total);
  /* d part */
  for (int j = 0; j < p; ++j) {
    std::vector<std::vector<double>> rest;
    for (int i = 0; i < p; ++i)
      if (i != j) rest.push_back(vectors[i]);
    std::vector<double> up(u.begin(), u.end()), um(u.begin(), u.end());
    for (int a = 0; a < f.m; ++a) {
      up[a] += h * vectors[j][a];
      um[a] -= h * vectors[j][a];
    }
    DMat plus = holonomy(M, alpha, f, up, rest, q).component(p - 1);
    DMat minus = holonomy(M, alpha, f, um, rest, q).component(p - 1);
    double sgn = (j % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < acc.a.size(); ++i)
      acc.a[i] += sgn * (plus.a[i] - minus.a[i]) / (2.0 * h);
  }
  /* commutator part: [pi^*alpha, hol] in the Grassmann algebra */
  {
    HolonomyValue H = holonomy(M, alpha, f, u, vectors, q);
    SuperContext ctx(M.fibre, 0, {});
    GenLayout flat{0, p};
    PlotPoint base = plot_point(f, u, 1.0, vectors);
    SuperElem a = eval_form(M, alpha.alpha, ctx, flat, base, -1);
    SuperElem left = super_mul(ctx, a, H.full);
    SuperElem right = super_mul(ctx, H.full, a);
    right *= -1.0;
    left += right;
    HolonomyValue C{left, 0, 0, &M.fibre};
    DMat com = C.component(p);
    for (std::size_t i = 0; i < acc.a.size(); ++i) acc.a[i] += com.a[i];
  }
  return acc;
}

/* ---- factorization and reversal ---- */

struct IdentityReport {
  double factorization = 0.0;
  double reversal = 0.0;
};

inline double dmat_diff(const DMat& a, const DMat& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::abs(a.a[i] - b.a[i]));
  return m;
}

inline IdentityReport holonomy_identity_checks(const FormsAlgebra& M,
                                               const SuperConnection& alpha,
                                               const LoopFamily& f, const LoopFamily& g,
                                               std::span<const double> u,
                                               const std::vector<std::vector<double>>& vectors,
                                               const QuadratureSpec& q) {
  IdentityReport rep;
  SuperContext ctx(M.fibre, 0, {});
  LoopFamily fg = loop_concat(f, g, ConcatMode::halfspeed);
  HolonomyValue hf = holonomy(M, alpha, f, u, vectors, q);
  HolonomyValue hg = holonomy(M, alpha, g, u, vectors, q);
  HolonomyValue hc = holonomy(M, alpha, fg, u, vectors, q);
  SuperElem wedge = super_mul(ctx, hf.full, hg.full);
  for (int p = 0; p <= static_cast<int>(vectors.size()); ++p) {
    HolonomyValue W{wedge, 0, 0, &M.fibre};
    rep.factorization = std::max(rep.factorization,
                                 dmat_diff(hc.component(p), W.component(p)));
  }
  LoopFamily rf = loop_reverse(f);
  HolonomyValue hr = holonomy(M, alpha, rf, u, vectors, q);
  SuperElem inv = super_mul(ctx, hf.full, hr.full);
  SuperElem id = SuperElem::identity(ctx);
  for (int p = 0; p <= static_cast<int>(vectors.size()); ++p) {
    HolonomyValue I1{inv, 0, 0, &M.fibre}, I2{id, 0, 0, &M.fibre};
    rep.reversal = std::max(rep.reversal, dmat_diff(I1.component(p), I2.component(p)));
  }
  return rep;
}

/* ---- the A-infinity components hol_r ---- */

/* data of a composable chain on one patch: objects V(0..r) with flat
 * connections alpha_i, morphism forms beta_i in Omega ox Hom(V(i-1),V(i)),
 * all embedded into one total bundle W = (+) V(i). */
struct HolUnderlineData {
  FormsAlgebra* W = nullptr;           // End(W)-valued forms context
  PolyForm gamma_alpha;                // sum of embedded alpha_i
  std::vector<PolyForm> betas;         // embedded beta_i, i = 1..r
  std::vector<int> beta_degree;        // total degree of beta_i
  /* object block positions inside W, per internal degree */
  std::vector<std::map<int, int>> object_offset;  // object -> degree -> offset
  std::vector<GradedFibre> object_fibre;
};

/* tau-tagged series; returns the extracted tau_r..tau_1 coefficient as the
 * theta-full component blocks Hom(V(0), V(r)). */
inline SuperElem hol_underline_full(const HolUnderlineData& D, const LoopFamily& f,
                                    std::span<const double> u,
                                    const std::vector<std::vector<double>>& vectors,
                                    const QuadratureSpec& q) {
  const int r = static_cast<int>(D.betas.size());
  std::vector<int> tau_deg(r);
  for (int i = 0; i < r; ++i) tau_deg[i] = 1 - D.beta_degree[i];
  SuperContext ctx(D.W->fibre, 0, tau_deg);
  GenLayout gl{q.k_max, static_cast<int>(vectors.size())};
  LetterField L{D.W, &f, {u.begin(), u.end()}, vectors, {}};
  L.add_piece(D.gamma_alpha);
  for (int i = 1; i <= r; ++i) L.add_piece(D.betas[i - 1], i, i - 1);
  SeriesResult sr = series_transfer(L, ctx, gl, q);
  /* keep only the tau_r..tau_1 segment */
  SuperElem out;
  for (auto& [k, m] : sr.value.terms)
    if (k.hi == r && k.lo == 0 && r > 0) out.add(k, m);
  if (r == 0) return sr.value;
  return out;
}

}  // namespace holobar
