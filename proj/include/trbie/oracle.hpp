#pragma once
/**
 * @file oracle.hpp
 * @brief Separable single-circle references: characteristic functions of
 * the fictitious and true resonance problems, a complex root finder with an
 * argument-principle completeness check, and the partial-wave solution of
 * plane-wave scattering by one circle.
 *
 * Circle of radius r0, exterior medium 1 (k1, S1), interior medium 2
 * (k2, S2), iota = 1 outgoing and 2 incoming interior kernel:
 *   fictitious (Mueller):  -S2 k1 H_n(k2 r0) J_n'(k1 r0) + S1 k2 H_n'(k2 r0) J_n(k1 r0)
 *   fictitious (PMCHWT):   the same with S1 and S2 exchanged
 *   true (free space):      S2 k2 J_n'(k2 r0) H_n(k1 r0) - S1 k1 H_n'(k1 r0) J_n(k2 r0)
 * The true determinant follows from continuity of u and S du/dr for
 * u = J_n(k2 r) inside and u = H^(1)_n(k1 r) outside.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "trbie/assembly.hpp"
#include "trbie/errors.hpp"
#include "trbie/rect.hpp"
#include "trbie/special.hpp"

namespace trbie {

enum class CharKind { fictitious_outgoing, fictitious_incoming, true_freespace };

struct CharSpec {
  int n = 0;
  double r0 = 1.0;
  Material exterior, interior;
  CharKind kind = CharKind::fictitious_outgoing;
  Formulation formulation = Formulation::mueller;  // selects the fictitious determinant
};

namespace detail {

// Z_n, Z_n', Z_n'' of a cylinder function; kind 0 = J, 1/2 = H^(1)/H^(2).
struct Cyl {
  cplx z, zp, zpp;
};

inline Cyl cylinder(int kind, int n, cplx x) {
  std::vector<cplx> seq;
  if (kind == 0) {
    seq = special::bessel_j_array(n + 1, x);
  } else if (kind == 1) {
    seq = special::hankel1_array(n + 1, x);
  } else {
    seq = special::hankel2_array(n + 1, x);
  }
  Cyl c;
  c.z = seq[n];
  c.zp = n == 0 ? -seq[1] : seq[n - 1] - (static_cast<double>(n) / x) * seq[n];
  // Bessel's equation: Z'' = -Z'/x - (1 - n^2/x^2) Z
  c.zpp = -c.zp / x - (1.0 - static_cast<double>(n) * n / (x * x)) * c.z;
  return c;
}

}  // namespace detail

/// Characteristic function and its omega-derivative.
inline std::pair<cplx, cplx> char_value_and_derivative(const CharSpec& spec, cplx omega) {
  if (omega == 0.0) throw DomainError("char_value: omega = 0");
  if (spec.n < 0) throw ConfigError("char_value: negative order");
  if (!(spec.r0 > 0.0)) throw ConfigError("char_value: radius must be positive");
  const double S1 = spec.exterior.shear, S2 = spec.interior.shear;
  const double c1 = std::sqrt(spec.exterior.rho / S1), c2 = std::sqrt(spec.interior.rho / S2);
  const double r0 = spec.r0;
  const cplx k1 = c1 * omega, k2 = c2 * omega;
  const cplx alpha = k1 * r0, beta = k2 * r0;
  if (spec.kind == CharKind::true_freespace) {
    const auto J = detail::cylinder(0, spec.n, beta);
    const auto H = detail::cylinder(1, spec.n, alpha);
    const cplx f = S2 * k2 * J.zp * H.z - S1 * k1 * H.zp * J.z;
    const cplx df = S2 * (c2 * J.zp * H.z + k2 * c2 * r0 * J.zpp * H.z + k2 * J.zp * c1 * r0 * H.zp) -
                    S1 * (c1 * H.zp * J.z + k1 * c1 * r0 * H.zpp * J.z + k1 * H.zp * c2 * r0 * J.zp);
    return {f, df};
  }
  const int iota = spec.kind == CharKind::fictitious_outgoing ? 1 : 2;
  const double P = spec.formulation == Formulation::mueller ? S2 : S1;
  const double Q = spec.formulation == Formulation::mueller ? S1 : S2;
  const auto J = detail::cylinder(0, spec.n, alpha);
  const auto H = detail::cylinder(iota, spec.n, beta);
  const cplx f = -P * k1 * H.z * J.zp + Q * k2 * H.zp * J.z;
  const cplx df = -P * (c1 * H.z * J.zp + k1 * c2 * r0 * H.zp * J.zp + k1 * H.z * c1 * r0 * J.zpp) +
                  Q * (c2 * H.zp * J.z + k2 * c2 * r0 * H.zpp * J.z + k2 * H.zp * c1 * r0 * J.zp);
  return {f, df};
}

inline cplx char_value(const CharSpec& spec, cplx omega) { return char_value_and_derivative(spec, omega).first; }

struct RootOptions {
  int grid = 60;
  double newton_tol = 1e-12;
  int max_steps = 50;
  double dedup_tol = 1e-8;
  int max_refinements = 2;  // grid doubles on a count mismatch
};

/// Winding number of f around the rectangle (counter-clockwise) with adaptive phase tracking.
template <class F>
int winding_number(const F& f, const Rect& region) {
  const cplx corners[5] = {{region.re_min, region.im_min},
                           {region.re_max, region.im_min},
                           {region.re_max, region.im_max},
                           {region.re_min, region.im_max},
                           {region.re_min, region.im_min}};
  double total = 0.0;
  struct Seg {
    cplx a, b;
    cplx fa, fb;
    int depth;
  };
  for (int side = 0; side < 4; ++side) {
    constexpr int base = 128;
    cplx prev = corners[side];
    cplx fprev = f(prev);
    for (int m = 1; m <= base; ++m) {
      const cplx next = corners[side] + (corners[side + 1] - corners[side]) * (static_cast<double>(m) / base);
      const cplx fnext = f(next);
      std::vector<Seg> stack{{prev, next, fprev, fnext, 0}};
      while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        if (s.fa == 0.0 || s.fb == 0.0) throw IncompleteRootsError("root on the contour of the argument-principle count");
        const double dphi = std::arg(s.fb / s.fa);
        const double ratio = std::abs(s.fb) / std::abs(s.fa);
        if ((std::abs(dphi) > std::numbers::pi / 6.0 || ratio > 4.0 || ratio < 0.25) && s.depth < 40) {
          const cplx mid = 0.5 * (s.a + s.b);
          const cplx fm = f(mid);
          // push the second half first so the first half is processed next
          stack.push_back({mid, s.b, fm, s.fb, s.depth + 1});
          stack.push_back({s.a, mid, s.fa, fm, s.depth + 1});
          continue;
        }
        total += dphi;
      }
      prev = next;
      fprev = fnext;
    }
  }
  const double w = total / (2.0 * std::numbers::pi);
  const double r = std::round(w);
  if (std::abs(w - r) > 0.05) throw IncompleteRootsError("argument-principle count is not an integer");
  return static_cast<int>(r);
}

namespace detail {

template <class FdF>
std::vector<cplx> newton_roots(const FdF& fdf, const Rect& region, const RootOptions& opt, int grid) {
  const double dx = region.width() / grid, dy = region.height() / grid;
  std::vector<double> mag(static_cast<std::size_t>(grid) * grid);
  auto node = [&](int a, int b) { return cplx(region.re_min + (a + 0.5) * dx, region.im_min + (b + 0.5) * dy); };
  for (int a = 0; a < grid; ++a)
    for (int b = 0; b < grid; ++b) mag[a * grid + b] = std::abs(fdf(node(a, b)).first);
  std::vector<cplx> roots;
  for (int a = 0; a < grid; ++a)
    for (int b = 0; b < grid; ++b) {
      const double v = mag[a * grid + b];
      bool minimum = true;
      for (int da = -1; da <= 1 && minimum; ++da)
        for (int db = -1; db <= 1; ++db) {
          if (da == 0 && db == 0) continue;
          const int aa = a + da, bb = b + db;
          if (aa < 0 || bb < 0 || aa >= grid || bb >= grid) continue;
          if (mag[aa * grid + bb] < v) {
            minimum = false;
            break;
          }
        }
      if (!minimum) continue;
      cplx z = node(a, b);
      bool converged = false;
      // seeds that wander far outside are abandoned; their root (if any) is found from another seed
      const Rect wide{region.re_min - region.width(), region.re_max + region.width(), region.im_min - region.height(),
                      region.im_max + region.height()};
      for (int it = 0; it < opt.max_steps; ++it) {
        if (!wide.contains(z)) break;
        std::pair<cplx, cplx> v;
        try {
          v = fdf(z);
        } catch (const Error&) {
          break;
        }
        const auto [f, df] = v;
        if (f == 0.0) {
          converged = true;
          break;
        }
        if (df == 0.0) break;
        const cplx step = f / df;
        z -= step;
        if (!special::detail::is_finite(z)) break;
        if (std::abs(step) <= opt.newton_tol * std::max(1.0, std::abs(z))) {
          converged = true;
          break;
        }
      }
      if (!converged || !region.contains(z)) continue;
      const bool dup = std::any_of(roots.begin(), roots.end(),
                                   [&](cplx r) { return std::abs(r - z) <= opt.dedup_tol * std::max(1.0, std::abs(z)); });
      if (!dup) roots.push_back(z);
    }
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return roots;
}

}  // namespace detail

/// Roots of the characteristic function inside `region`.
inline std::vector<cplx> find_roots(const CharSpec& spec, const Rect& region, const RootOptions& opt = {}) {
  region.validate();
  auto fdf = [&](cplx z) { return char_value_and_derivative(spec, z); };
  auto f = [&](cplx z) { return char_value_and_derivative(spec, z).first; };
  const int expected = winding_number(f, region);
  int grid = opt.grid;
  for (int attempt = 0; attempt <= opt.max_refinements; ++attempt, grid *= 2) {
    auto roots = detail::newton_roots(fdf, region, opt, grid);
    if (static_cast<int>(roots.size()) == expected) return roots;
  }
  throw IncompleteRootsError("Newton found a different number of roots than the argument principle (" +
                             std::to_string(expected) + ")");
}

/**
 * Plane wave exp(i k1 (cos a, sin a).x) scattered by a circle of radius r0
 * centred at the origin:
 *   outside  u = sum_m eps_m [i^m J_m(k1 r) + a_m H_m(k1 r)] cos(m (phi - a))
 *   inside   u = sum_m eps_m b_m J_m(k2 r) cos(m (phi - a))
 * with eps_0 = 1, eps_m = 2 (a_{-m} = (-1)^m a_m folds the negative orders).
 */
struct MieSolution {
  double r0 = 1.0, angle = 0.0, S1 = 1.0, S2 = 1.0;
  cplx k1, k2;
  std::vector<cplx> a, b;

  int nmax() const { return static_cast<int>(a.size()) - 1; }

  /// Boundary trace u(r0, phi).
  cplx trace_u(double phi) const {
    const auto J = special::bessel_j_array(nmax(), k2 * r0);
    cplx s = 0.0;
    for (int m = 0; m <= nmax(); ++m) s += (m == 0 ? 1.0 : 2.0) * b[m] * J[m] * std::cos(m * (phi - angle));
    return s;
  }

  /// Boundary flux q = S du/dr at (r0, phi).
  cplx trace_q(double phi) const {
    const auto J = special::bessel_j_array(nmax() + 1, k2 * r0);
    const auto Jp = special::derivative_from_sequence(J, k2 * r0);
    cplx s = 0.0;
    for (int m = 0; m <= nmax(); ++m) s += (m == 0 ? 1.0 : 2.0) * b[m] * Jp[m] * std::cos(m * (phi - angle));
    return S2 * k2 * s;
  }

  /// Far-field pattern: u_sca ~ sqrt(2/(pi k1 r)) exp(i (k1 r - pi/4)) F(phi).
  cplx far_field(double phi) const {
    cplx s = 0.0, mi = 1.0;
    for (int m = 0; m <= nmax(); ++m) {
      s += (m == 0 ? 1.0 : 2.0) * a[m] * mi * std::cos(m * (phi - angle));
      mi *= cplx(0.0, -1.0);
    }
    return s;
  }
};

inline MieSolution mie_forward_solution(double r0, const Material& exterior, const Material& interior, double omega,
                                        double angle = std::numbers::pi / 2.0) {
  if (!(r0 > 0.0)) throw ConfigError("mie: radius must be positive");
  if (!(omega > 0.0)) throw ConfigError("mie: omega must be real and positive");
  MieSolution sol;
  sol.r0 = r0;
  sol.angle = angle;
  sol.S1 = exterior.shear;
  sol.S2 = interior.shear;
  sol.k1 = exterior.wavenumber(omega);
  sol.k2 = interior.wavenumber(omega);
  const int nmax = static_cast<int>(std::ceil(std::abs(sol.k1) * r0)) + 20;
  const cplx x1 = sol.k1 * r0, x2 = sol.k2 * r0;
  const auto J1 = special::bessel_j_array(nmax + 1, x1);
  const auto H1 = special::hankel1_array(nmax + 1, x1);
  const auto J2 = special::bessel_j_array(nmax + 1, x2);
  const auto J1p = special::derivative_from_sequence(J1, x1);
  const auto H1p = special::derivative_from_sequence(H1, x1);
  const auto J2p = special::derivative_from_sequence(J2, x2);
  sol.a.resize(nmax + 1);
  sol.b.resize(nmax + 1);
  cplx im = 1.0;
  for (int m = 0; m <= nmax; ++m) {
    // a H(x1) - b J(x2) = -i^m J(x1)
    // a S1 k1 H'(x1) - b S2 k2 J'(x2) = -i^m S1 k1 J'(x1)
    const cplx m11 = H1[m], m12 = -J2[m];
    const cplx m21 = sol.S1 * sol.k1 * H1p[m], m22 = -sol.S2 * sol.k2 * J2p[m];
    const cplx r1 = -im * J1[m], r2 = -im * sol.S1 * sol.k1 * J1p[m];
    const cplx det = m11 * m22 - m12 * m21;
    sol.a[m] = (r1 * m22 - m12 * r2) / det;
    sol.b[m] = (m11 * r2 - m21 * r1) / det;
    im *= cplx(0.0, 1.0);
  }
  return sol;
}

}  // namespace trbie
