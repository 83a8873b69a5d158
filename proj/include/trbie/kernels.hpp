#pragma once
/**
 * @file kernels.hpp
 * @brief Free-space and Neumann-waveguide Green's functions with their
 * first normal derivatives and the mixed second normal derivative.
 *
 * Conventions: R = x - y, r = |R|, the Green's functions solve
 * (Laplacian + k^2) G = -delta, so every kernel behaves like
 * -(1/2pi) log r at the source.
 *
 * Waveguide (strip |x1| < 1/2, Neumann walls):
 *   G = sum_l f_l exp(-gamma_l d)/gamma_l cos(l pi (x1+1/2)) cos(l pi (y1+1/2)),
 * d = |x2 - y2|, f_0 = 1/2, f_l = 1. With the product-to-sum identity
 *   G = A0(d) + (F(d, th_m) + F(d, th_p)) / 2,
 *   F(d, th) = sum_{l>=1} exp(-gamma_l d)/gamma_l cos(l th),
 *   th_m = pi (x1 - y1), th_p = pi (x1 + y1 + 1).
 * For well separated cross-sections F is summed mode by mode. Otherwise
 * (d small, where the series loses its exponential decay) the large-l
 * expansion of each term in powers of t = 1/(l pi) is subtracted up to
 * order t^10 and added back in closed form through polylogarithms
 * Li_s(exp(-pi d + i th)); the remainder then decays like l^-9 even at d = 0.
 */

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "trbie/errors.hpp"
#include "trbie/geometry.hpp"
#include "trbie/special.hpp"

namespace trbie {

enum class KernelMode { outgoing, incoming };

/// Kernel and derivative values at one (x, y) pair.
struct KernelSample {
  cplx g;      // G
  cplx dny;    // dG/dn_y
  cplx dnx;    // dG/dn_x
  cplx hyper;  // d^2 G / dn_x dn_y
};

namespace detail {

inline double checked_distance(Vec2 x, Vec2 y) {
  const double r = norm(x - y);
  if (r == 0.0) throw SingularityError("kernel evaluated at coincident points");
  return r;
}

// Radial profile g(r), g'(r), g''(r) of the free-space kernel.
struct Radial {
  cplx g, g1, g2;
};

inline Radial radial_profile(cplx k, KernelMode mode, double r) {
  const cplx z = k * r;
  const bool out = mode == KernelMode::outgoing;
  const auto [h0, h1] = special::hankel01(out ? 1 : 2, z);
  const cplx c = out ? cplx(0.0, 0.25) : cplx(0.0, -0.25);
  return {c * h0, -c * k * h1, -c * k * k * (h0 - h1 / z)};
}

}  // namespace detail

/// (i/4) H0^(1)(k r) (outgoing) or -(i/4) H0^(2)(k r) (incoming).
inline cplx g2(Vec2 x, Vec2 y, cplx k, KernelMode mode) {
  const double r = detail::checked_distance(x, y);
  const bool out = mode == KernelMode::outgoing;
  const auto h = special::hankel01(out ? 1 : 2, k * r);
  return (out ? cplx(0.0, 0.25) : cplx(0.0, -0.25)) * h.first;
}

inline KernelSample freespace_sample(cplx k, KernelMode mode, Vec2 x, Vec2 y, Vec2 nx, Vec2 ny) {
  const Vec2 R = x - y;
  const double r = detail::checked_distance(x, y);
  const auto p = detail::radial_profile(k, mode, r);
  const double rnx = dot(R, nx) / r, rny = dot(R, ny) / r;
  KernelSample s;
  s.g = p.g;
  s.dnx = p.g1 * rnx;
  s.dny = -p.g1 * rny;
  s.hyper = -(p.g2 * rnx * rny + p.g1 * (dot(nx, ny) - rnx * rny) / r);
  return s;
}

inline cplx g2_grad_y_dot_n(Vec2 x, Vec2 y, Vec2 ny, cplx k, KernelMode mode) {
  return freespace_sample(k, mode, x, y, ny, ny).dny;
}

inline cplx g2_grad_x_dot_n(Vec2 x, Vec2 y, Vec2 nx, cplx k, KernelMode mode) {
  return freespace_sample(k, mode, x, y, nx, nx).dnx;
}

inline cplx g2_hyper(Vec2 x, Vec2 y, Vec2 nx, Vec2 ny, cplx k, KernelMode mode) {
  return freespace_sample(k, mode, x, y, nx, ny).hyper;
}

/// Waveguide Green's function and all first and mixed second derivatives.
struct WaveguideValue {
  cplx g;
  std::array<cplx, 2> grad_x;               // dG/dx1, dG/dx2
  std::array<cplx, 2> grad_y;               // dG/dy1, dG/dy2
  std::array<std::array<cplx, 2>, 2> hess;  // d^2 G / dx_i dy_j
  int modes = 0;                            // highest mode index summed explicitly
};

/**
 * Evaluator for the waveguide Green's function at a fixed wavenumber.
 * Construction caches the modal square roots; evaluation is thread-safe.
 */
class WaveguideGreen {
 public:
  static constexpr int kMaxModes = 10000;
  static constexpr int kOrder = 10;  // t^10 asymptotic subtraction
  // Below this separation the Kummer-accelerated path is used (|w| > 0.35).
  static constexpr double kKummerSeparation = 0.334;

  explicit WaveguideGreen(cplx k, double rel_tol = 1e-10) : k_(k), rel_tol_(rel_tol) {
    if (!special::detail::is_finite(k) || k == 0.0) throw DomainError("waveguide wavenumber must be finite and nonzero");
    if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be positive");
    const double pi = std::numbers::pi;
    l0_ = std::max(1, static_cast<int>(std::ceil(2.0 * std::abs(k) / pi)));
    const int cached = std::max(64, 2 * l0_ + 64);
    gamma_.resize(cached + 1);
    for (int l = 0; l <= cached; ++l) {
      gamma_[l] = special::gamma_l(l, k);
      if (l > 0 && std::abs(gamma_[l]) < 1e-8)
        throw BranchCutError("wavenumber within 1e-8 of the cutoff of mode " + std::to_string(l));
    }
    // 1 - sqrt(1-u) = sum b_m u^m,  (1-u)^(-1/2) = sum a_m u^m,  u = k^2 t^2
    std::array<double, kOrder + 3> a{}, b{};
    a[0] = 1.0;
    for (int m = 1; m < kOrder + 3; ++m) a[m] = a[m - 1] * (2.0 * m - 1.0) / (2.0 * m);
    for (int m = 1; m < kOrder + 3; ++m) b[m] = a[m] / (2.0 * m - 1.0);
    const cplx k2 = k * k;
    cplx kp = 1.0;
    for (int m = 0; m < kOrder + 3; ++m) {
      // delta(t) = (1 - s)/t has t^(2m-1) coefficient b_m k^(2m)
      if (m > 0 && 2 * m - 1 < kSeries) delta_[2 * m - 1] = b[m] * kp;
      if (2 * m < kSeries) inv_s_[2 * m] = a[m] * kp;
      if (2 * m < kSeries) s_[2 * m] = (m == 0 ? 1.0 : -b[m]) * kp;
      kp *= k2;
    }
  }

  cplx wavenumber() const { return k_; }

  cplx gamma(int l) const {
    if (l < static_cast<int>(gamma_.size())) return gamma_[l];
    return special::gamma_l(l, k_);
  }

  WaveguideValue eval(Vec2 x, Vec2 y) const {
    if (x.x == y.x && x.y == y.y) throw SingularityError("waveguide kernel evaluated at coincident points");
    const double pi = std::numbers::pi;
    const double diff = x.y - y.y;
    const double d = std::abs(diff);
    const double sigma = diff >= 0.0 ? 1.0 : -1.0;
    const double th_m = pi * (x.x - y.x);
    double th_p = pi * (x.x + y.x + 1.0);
    if (th_p > pi) th_p -= 2.0 * pi;

    Sums sm, sp;
    int modes;
    if (d >= kKummerSeparation) {
      modes = direct_sums(d, th_m, th_p, sm, sp);
    } else {
      modes = kummer_sums(d, th_m, th_p, sm, sp);
    }

    const cplx I(0.0, 1.0);
    const cplx e0 = std::exp(I * k_ * d);
    const cplx A0 = I / (2.0 * k_) * e0;
    const cplx A0d = -0.5 * e0;
    const cplx A0dd = -0.5 * I * k_ * e0;

    WaveguideValue v;
    v.modes = modes;
    v.g = A0 + 0.5 * (sm.f + sp.f);
    const cplx gd = A0d + 0.5 * (sm.fd + sp.fd);
    v.grad_x = {0.5 * pi * (sm.ft + sp.ft), sigma * gd};
    v.grad_y = {0.5 * pi * (-sm.ft + sp.ft), -sigma * gd};
    v.hess[0][0] = 0.5 * pi * pi * (-sm.ftt + sp.ftt);
    v.hess[0][1] = -sigma * 0.5 * pi * (sm.fdt + sp.fdt);
    v.hess[1][0] = sigma * 0.5 * pi * (-sm.fdt + sp.fdt);
    v.hess[1][1] = -(A0dd + 0.5 * (sm.fdd + sp.fdd));
    for (const cplx c : {v.g, v.grad_x[0], v.grad_x[1], v.hess[0][0], v.hess[0][1], v.hess[1][0], v.hess[1][1]})
      if (!special::detail::is_finite(c)) throw DomainError("waveguide kernel overflow");
    return v;
  }

  KernelSample sample(Vec2 x, Vec2 y, Vec2 nx, Vec2 ny) const {
    const auto v = eval(x, y);
    KernelSample s;
    s.g = v.g;
    s.dnx = v.grad_x[0] * nx.x + v.grad_x[1] * nx.y;
    s.dny = v.grad_y[0] * ny.x + v.grad_y[1] * ny.y;
    s.hyper = nx.x * (v.hess[0][0] * ny.x + v.hess[0][1] * ny.y) + nx.y * (v.hess[1][0] * ny.x + v.hess[1][1] * ny.y);
    return s;
  }

 private:
  static constexpr int kSeries = kOrder + 2;  // t^0 .. t^(kOrder+1)

  // F and its derivatives in d and theta at one angle (l >= 1 part).
  struct Sums {
    cplx f = 0.0, ft = 0.0, ftt = 0.0, fd = 0.0, fdt = 0.0, fdd = 0.0;
    Sums& operator+=(const Sums& o) {
      f += o.f;
      ft += o.ft;
      ftt += o.ftt;
      fd += o.fd;
      fdt += o.fdt;
      fdd += o.fdd;
      return *this;
    }
  };

  // One modal term: E = e/gamma, E' = -e, E'' = gamma e with e = exp(-gamma d),
  // accumulated with cos(l th) = c, sin(l th) = s.
  static void add_term(Sums& S, double l, cplx E, cplx Ed, cplx Edd, double c, double s) {
    S.f += E * c;
    S.ft -= l * E * s;
    S.ftt -= l * l * E * c;
    S.fd += Ed * c;
    S.fdt -= l * Ed * s;
    S.fdd += Edd * c;
  }

  // Largest increment in this step relative to the running scale of each sum.
  // Scales start at the size of the leading modal term of each sum, so a
  // quantity that vanishes by symmetry does not stall the stopping test.
  struct Tracker {
    std::array<double, 6> scale{1.0 / std::numbers::pi, 1.0, std::numbers::pi, 1.0, std::numbers::pi, std::numbers::pi};
    double worst(const Sums& before, const Sums& after) {
      const std::array<cplx, 6> b{before.f, before.ft, before.ftt, before.fd, before.fdt, before.fdd};
      const std::array<cplx, 6> a{after.f, after.ft, after.ftt, after.fd, after.fdt, after.fdd};
      double w = 0.0;
      for (int i = 0; i < 6; ++i) {
        const double inc = std::abs(a[i] - b[i]);
        scale[i] = std::max({scale[i], inc, std::abs(a[i])});
        if (scale[i] > 0.0) w = std::max(w, inc / scale[i]);
      }
      return w;
    }
  };

  int direct_sums(double d, double th_m, double th_p, Sums& sm, Sums& sp) const {
    const std::complex<double> rot_m = std::polar(1.0, th_m), rot_p = std::polar(1.0, th_p);
    std::complex<double> em = 1.0, ep = 1.0;
    Tracker tm, tp;
    int quiet = 0;
    for (int l = 1; l <= kMaxModes; ++l) {
      em *= rot_m;
      ep *= rot_p;
      const cplx g = gamma(l);
      const cplx e = std::exp(-g * d);
      const Sums bm = sm, bp = sp;
      add_term(sm, l, e / g, -e, g * e, em.real(), em.imag());
      add_term(sp, l, e / g, -e, g * e, ep.real(), ep.imag());
      const double w = std::max(tm.worst(bm, sm), tp.worst(bp, sp));
      // only trust the stopping test once the modes are evanescent
      if (l * std::numbers::pi > std::abs(k_.real()) && w < rel_tol_) {
        if (++quiet >= 3) return l;
      } else {
        quiet = 0;
      }
    }
    throw ConvergenceError("waveguide modal series did not converge within 10000 modes");
  }

  int kummer_sums(double d, double th_m, double th_p, Sums& sm, Sums& sp) const {
    const double pi = std::numbers::pi;
    // P(t) = exp(d delta(t)) as a truncated power series.
    std::array<cplx, kSeries> P{};
    P[0] = 1.0;
    for (int n = 1; n < kSeries; ++n) {
      cplx acc = 0.0;
      for (int j = 1; j <= n; ++j) acc += static_cast<double>(j) * d * delta_[j] * P[n - j];
      P[n] = acc / static_cast<double>(n);
    }
    // E e^{ad} = P t / s,  -E' e^{ad} = P,  E'' e^{ad} = P s / t
    std::array<cplx, kSeries> A{}, C{};  // A[j]: t^j;  C[j]: t^(j-1)
    for (int n = 0; n < kSeries; ++n)
      for (int j = 0; j <= n; ++j) {
        if (n + 1 < kSeries) A[n + 1] += P[j] * inv_s_[n - j];
        C[n] += P[j] * s_[n - j];
      }
    const double w = std::exp(-pi * d);

    // Closed-form sums over l >= 1 minus the explicit part l < l0.
    auto tail = [&](double th, Sums& S) {
      const cplx mu(-pi * d, th);
      const auto li = special::polylog_exp(kOrder, mu);
      // Z[s+1] = sum_{l >= l0} l^-s w^l e^{i l th}
      std::vector<cplx> Z(li.begin(), li.end());
      const cplx rot = std::polar(w, th);
      cplx wl = 1.0;
      for (int l = 1; l < l0_; ++l) {
        wl *= rot;
        double lp = l;  // l^-s starting at s = -1
        for (int s = -1; s <= kOrder; ++s) {
          Z[s + 1] -= lp * wl;
          lp /= l;
        }
      }
      double pj = 1.0;  // pi^-j for j >= 0
      for (int j = 0; j <= kOrder; ++j) {
        if (j >= 1) {
          S.f += A[j] * pj * Z[j + 1].real();
          S.ft -= A[j] * pj * Z[j].imag();
          S.ftt -= A[j] * pj * Z[j - 1].real();
        }
        S.fd -= P[j] * pj * Z[j + 1].real();
        S.fdt += P[j] * pj * Z[j].imag();
        pj /= pi;
      }
      // E'' has powers t^-1 .. t^kOrder: C[n] multiplies t^(n-1)
      double pm = pi;  // pi^-(n-1)
      for (int n = 0; n <= kOrder + 1; ++n) {
        S.fdd += C[n] * pm * Z[n].real();
        pm /= pi;
      }
    };
    tail(th_m, sm);
    tail(th_p, sp);

    // Explicit terms for 1 <= l < l0.
    for (int l = 1; l < l0_; ++l) {
      const cplx g = gamma(l);
      const cplx e = std::exp(-g * d);
      add_term(sm, l, e / g, -e, g * e, std::cos(l * th_m), std::sin(l * th_m));
      add_term(sp, l, e / g, -e, g * e, std::cos(l * th_p), std::sin(l * th_p));
    }

    // Remainder: exact term minus its truncated expansion, for l >= l0.
    // Both carry the factor exp(-l pi d); it is pulled out and
    // l pi - gamma_l = k^2 t / (1 + s) is formed without cancellation.
    // For l >= l0 we have |k t| <= 1/2 and gamma_l = l pi sqrt(1 - k^2 t^2).
    // Tracked on their own scale: near the source the closed-form part is
    // dominated by the 1/r^2 singularity, which must not loosen the test.
    const cplx k2 = k_ * k_;
    Sums rm, rp;
    Tracker tm, tp;
    int quiet = 0;
    for (int l = l0_; l <= kMaxModes; ++l) {
      const double a = l * pi, t = 1.0 / a;
      const cplx s = std::sqrt(1.0 - k2 * t * t);
      const cplx pex = std::exp(d * k2 * t / (1.0 + s));
      const double wl = std::exp(-a * d);
      cplx pa = 0.0, pb = 0.0, pc = 0.0;
      double tp_ = 1.0;
      for (int j = 0; j <= kOrder; ++j) {
        pa += A[j] * tp_;
        pb += P[j] * tp_;
        tp_ *= t;
      }
      double tq = 1.0 / t;
      for (int n = 0; n <= kOrder + 1; ++n) {
        pc += C[n] * tq;
        tq *= t;
      }
      const cplx E = wl * (pex * t / s - pa);
      const cplx Ed = -wl * (pex - pb);
      const cplx Edd = wl * (pex * s / t - pc);
      const Sums bm = rm, bp = rp;
      add_term(rm, l, E, Ed, Edd, std::cos(l * th_m), std::sin(l * th_m));
      add_term(rp, l, E, Ed, Edd, std::cos(l * th_p), std::sin(l * th_p));
      const double wst = std::max(tm.worst(bm, rm), tp.worst(bp, rp));
      if (wst < rel_tol_) {
        if (++quiet >= 3) {
          sm += rm;
          sp += rp;
          return l;
        }
      } else {
        quiet = 0;
      }
    }
    throw ConvergenceError("waveguide remainder series did not converge within 10000 modes");
  }

  cplx k_;
  double rel_tol_;
  int l0_ = 1;
  std::vector<cplx> gamma_;
  std::array<cplx, kSeries> delta_{}, inv_s_{}, s_{};
};

/// Pointwise waveguide kernels (each call rebuilds the per-k cache).
inline cplx g1_waveguide(Vec2 x, Vec2 y, cplx k, double rel_tol = 1e-10) {
  return WaveguideGreen(k, rel_tol).eval(x, y).g;
}

inline cplx g1_grad_y_dot_n(Vec2 x, Vec2 y, Vec2 ny, cplx k, double rel_tol = 1e-10) {
  return WaveguideGreen(k, rel_tol).sample(x, y, ny, ny).dny;
}

inline cplx g1_grad_x_dot_n(Vec2 x, Vec2 y, Vec2 nx, cplx k, double rel_tol = 1e-10) {
  return WaveguideGreen(k, rel_tol).sample(x, y, nx, nx).dnx;
}

inline cplx g1_hyper(Vec2 x, Vec2 y, Vec2 nx, Vec2 ny, cplx k, double rel_tol = 1e-10) {
  return WaveguideGreen(k, rel_tol).sample(x, y, nx, ny).hyper;
}

}  // namespace trbie
