#pragma once
/**
 * @file special.hpp
 * @brief Bessel/Hankel functions of integer order and complex argument,
 * the waveguide modal square root, and the polylogarithm family used by
 * the Kummer-accelerated waveguide kernel.
 *
 * Supported region: 0 <= n <= 60, 0 < |z| <= 200 (J also at z = 0).
 *
 * Evaluation strategy (all reduced to Im z >= 0 by Schwarz reflection):
 *  - J_n: ascending series for |z| <= 12, Miller backward recurrence
 *    normalized with exp(-iz) = J_0 + 2 sum (-i)^n J_n otherwise. The
 *    normalization sum has no cancellation in the upper half plane.
 *  - H^(1)_0, H^(1)_1: J + iY from the ascending series for |z| <= 2,
 *    Temme's continued fraction for K_0, K_1 at x = -iz otherwise. Higher
 *    orders by forward recurrence (H^(1) is dominant in n).
 *  - Y_n = i (J_n - H^(1)_n) for |z| > 2; forward recurrence from the
 *    series Y_0, Y_1 for |z| <= 2.
 * In the lower half plane J and Y come from conjugation and H^(1) = J + iY
 * has no cancellation because H^(1) is the growing solution there.
 */

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "trbie/errors.hpp"

namespace trbie {

using cplx = std::complex<double>;

namespace special {

inline constexpr int kMaxOrder = 60;
inline constexpr double kMaxArgument = 200.0;
inline constexpr double kJSeriesRadius = 12.0;
inline constexpr double kHankelSeriesRadius = 2.0;
/// Distance (in k) under which a wavenumber counts as lying on a branch cut.
inline constexpr double kBranchCutTolerance = 1e-12;

namespace detail {

inline constexpr double pi = std::numbers::pi;
inline constexpr double euler_gamma = std::numbers::egamma;
inline constexpr cplx I{0.0, 1.0};

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Signed zero in the imaginary part would flip the branch of log on the
// negative real axis; the principal branch (arg in (-pi, pi]) is wanted.
inline cplx canonical(cplx z) { return z.imag() == 0.0 ? cplx(z.real(), 0.0) : z; }

inline void check_argument(int n, cplx z, const char* who) {
  if (n < 0 || n > kMaxOrder)
    throw DomainError(std::string(who) + ": order " + std::to_string(n) + " outside [0, 60]");
  if (!is_finite(z)) throw DomainError(std::string(who) + ": non-finite argument");
  if (std::abs(z) > kMaxArgument) throw DomainError(std::string(who) + ": |z| > 200");
}

inline void check_result(cplx v, const char* who) {
  if (!is_finite(v)) throw DomainError(std::string(who) + ": result overflows double range");
}

inline cplx j_series(int n, cplx z) {
  cplx t = 1.0;
  const cplx half = 0.5 * z;
  for (int i = 1; i <= n; ++i) t *= half / static_cast<double>(i);
  if (t == 0.0) return 0.0;
  const cplx q = -0.25 * z * z;
  const double aq = std::abs(q);
  cplx sum = t;
  for (int k = 1; k < 1000; ++k) {
    t *= q / (static_cast<double>(k) * static_cast<double>(k + n));
    sum += t;
    if (static_cast<double>(k) * (k + n) > aq && std::abs(t) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// J_0..J_nmax by Miller's algorithm; requires Im z >= 0 and z != 0.
inline std::vector<cplx> j_miller(int nmax, cplx z) {
  const double az = std::abs(z);
  int start = std::max(nmax + 20, static_cast<int>(az + 20.0 + 9.0 * std::cbrt(az)));
  start += start % 2;
  std::vector<cplx> f(static_cast<std::size_t>(start) + 2, cplx(0.0));
  f[start] = 1e-30;
  const cplx two_over_z = 2.0 / z;
  for (int n = start; n >= 1; --n) {
    f[n - 1] = static_cast<double>(n) * two_over_z * f[n] - f[n + 1];
    if (std::abs(f[n - 1]) > 1e200) {
      for (int m = n - 1; m <= start; ++m) f[m] *= 1e-200;
    }
  }
  // exp(-iz) = J_0 + 2 sum_{n>=1} (-i)^n J_n
  cplx norm = f[0];
  cplx phase = 1.0;
  for (int n = 1; n <= start; ++n) {
    phase *= -I;
    norm += 2.0 * phase * f[n];
  }
  const cplx scale = std::exp(-I * z) / norm;
  std::vector<cplx> out(static_cast<std::size_t>(nmax) + 1);
  for (int n = 0; n <= nmax; ++n) out[n] = f[n] * scale;
  return out;
}

// J_0..J_nmax for Im z >= 0.
inline std::vector<cplx> j_upper(int nmax, cplx z) {
  if (std::abs(z) <= kJSeriesRadius) {
    std::vector<cplx> out(static_cast<std::size_t>(nmax) + 1);
    for (int n = 0; n <= nmax; ++n) out[n] = j_series(n, z);
    return out;
  }
  return j_miller(nmax, z);
}

// Y_0 and Y_1 from their ascending series (log branch principal).
inline std::pair<cplx, cplx> y01_series(cplx z, cplx j0, cplx j1) {
  const cplx q = 0.25 * z * z;
  const cplx lg = std::log(0.5 * z);
  // Y_0 = (2/pi)(log(z/2) + gamma) J_0 + (2/pi) sum_{k>=1} (-1)^{k+1} H_k q^k / (k!)^2
  cplx t = 1.0;
  double harmonic = 0.0;
  cplx s0 = 0.0;
  for (int k = 1; k < 200; ++k) {
    t *= -q / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    const cplx term = -harmonic * t;
    s0 += term;
    if (k * k > std::abs(q) && std::abs(term) <= 1e-17 * std::abs(s0)) break;
  }
  const cplx y0 = (2.0 / pi) * ((lg + euler_gamma) * j0 + s0);
  // Y_1 = (2/pi) log(z/2) J_1 - 2/(pi z)
  //       - (1/pi)(z/2) sum_{k>=0} [psi(k+1) + psi(k+2)] (-q)^k / (k!(k+1)!)
  cplx u = 1.0;
  double hk = 0.0;
  cplx s1 = 0.0;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) {
      u *= -q / (static_cast<double>(k) * (k + 1));
      hk += 1.0 / k;
    }
    const double psi_sum = -2.0 * euler_gamma + hk + (hk + 1.0 / (k + 1));
    const cplx term = psi_sum * u;
    s1 += term;
    if (k > 0 && k * (k + 1) > std::abs(q) && std::abs(term) <= 1e-17 * std::abs(s1)) break;
  }
  const cplx y1 = (2.0 / pi) * lg * j1 - 2.0 / (pi * z) - (0.5 / pi) * z * s1;
  return {y0, y1};
}

// K_0(x), K_1(x) by Temme's continued fraction (Steed's algorithm);
// Re x >= 0 and |x| > 2.
inline std::pair<cplx, cplx> k01_cf2(cplx x) {
  constexpr double eps = 1e-17;
  cplx b = 2.0 * (1.0 + x);
  cplx d = 1.0 / b;
  cplx h = d;
  cplx delh = d;
  cplx q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  cplx q = a1, c = a1;
  double a = -a1;
  cplx s = 1.0 + q * delh;
  int i = 1;
  for (; i < 20000; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const cplx qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const cplx dels = q * delh;
    s += dels;
    if (std::abs(dels) < eps * std::abs(s)) break;
  }
  if (i >= 20000) throw ConvergenceError("K0/K1 continued fraction did not converge");
  h = a1 * h;
  const cplx k0 = std::sqrt(pi / (2.0 * x)) * std::exp(-x) / s;
  const cplx k1 = k0 * (x + 0.5 - h) / x;
  return {k0, k1};
}

struct Upper01 {
  cplx j0, j1, y0, y1, h0, h1;
};

// All order-0/1 quantities for Im z >= 0, z != 0.
inline Upper01 upper01(cplx z) {
  Upper01 r{};
  const double az = std::abs(z);
  if (az <= kJSeriesRadius) {
    r.j0 = j_series(0, z);
    r.j1 = j_series(1, z);
  } else {
    const auto js = j_miller(1, z);
    r.j0 = js[0];
    r.j1 = js[1];
  }
  if (az <= kHankelSeriesRadius) {
    std::tie(r.y0, r.y1) = y01_series(z, r.j0, r.j1);
    r.h0 = r.j0 + I * r.y0;
    r.h1 = r.j1 + I * r.y1;
  } else {
    const auto [k0, k1] = k01_cf2(-I * z);
    r.h0 = (-2.0 * I / pi) * k0;
    r.h1 = (-2.0 / pi) * k1;
    r.y0 = I * (r.j0 - r.h0);
    r.y1 = I * (r.j1 - r.h1);
  }
  return r;
}

// Fused ascending series of H^(1)_0 and H^(1)_1 (principal log branch,
// valid in the whole cut plane). Cancellation grows like exp(2 Im z), so
// callers keep Im z small.
inline constexpr double kFusedSeriesRadius = 6.0;
inline constexpr double kFusedSeriesMaxImag = 1.5;

inline std::pair<cplx, cplx> h01_series(cplx z) {
  const cplx q = 0.25 * z * z;
  const double aq = std::abs(q);
  cplx t = 1.0;        // (-q)^k / (k!)^2
  double hk = 0.0;     // harmonic number H_k
  cplx sj0 = 1.0, sj1 = 1.0, sy0 = 0.0, sy1 = 1.0 - 2.0 * euler_gamma;
  for (int k = 1; k < 200; ++k) {
    t *= -q / (static_cast<double>(k) * k);
    const double inv = 1.0 / (k + 1);
    const double hk1 = hk + 1.0 / k;
    sj0 += t;
    sj1 += t * inv;
    sy0 -= hk1 * t;
    sy1 += (hk1 + hk1 + inv - 2.0 * euler_gamma) * t * inv;
    hk = hk1;
    if (k * k > aq && std::abs(t) <= 1e-17 * (std::abs(sj0) + std::abs(sy0) + 1.0)) break;
  }
  const cplx half = 0.5 * z;
  const cplx lg = std::log(half);
  const cplx j0 = sj0, j1 = half * sj1;
  const cplx y0 = (2.0 / pi) * ((lg + euler_gamma) * j0 + sy0);
  const cplx y1 = (2.0 / pi) * lg * j1 - 2.0 / (pi * z) - (1.0 / pi) * half * sy1;
  return {j0 + I * y0, j1 + I * y1};
}

// H^(1)_0, H^(1)_1 for Im z >= 0 without computing J (kernel fast path).
inline std::pair<cplx, cplx> upper_h01(cplx z) {
  if (std::abs(z) <= kHankelSeriesRadius) {
    const cplx j0 = j_series(0, z), j1 = j_series(1, z);
    const auto [y0, y1] = y01_series(z, j0, j1);
    return {j0 + I * y0, j1 + I * y1};
  }
  const auto [k0, k1] = k01_cf2(-I * z);
  return {(-2.0 * I / pi) * k0, (-2.0 / pi) * k1};
}

inline std::vector<cplx> forward_recurrence(cplx z0, cplx z1, int nmax, cplx z) {
  std::vector<cplx> out(static_cast<std::size_t>(nmax) + 1);
  out[0] = z0;
  if (nmax >= 1) out[1] = z1;
  const cplx two_over_z = 2.0 / z;
  for (int n = 1; n < nmax; ++n) out[n + 1] = static_cast<double>(n) * two_over_z * out[n] - out[n - 1];
  return out;
}

}  // namespace detail

/// J_0(z) .. J_nmax(z).
inline std::vector<cplx> bessel_j_array(int nmax, cplx z) {
  detail::check_argument(nmax, z, "bessel_j");
  z = detail::canonical(z);
  if (z.imag() < 0.0) {
    auto out = detail::j_upper(nmax, std::conj(z));
    for (auto& v : out) v = std::conj(v);
    return out;
  }
  return detail::j_upper(nmax, z);
}

inline cplx bessel_j(int n, cplx z) {
  detail::check_argument(n, z, "bessel_j");
  z = detail::canonical(z);
  if (std::abs(z) <= kJSeriesRadius) return detail::j_series(n, z);
  return bessel_j_array(n, z)[n];
}

/// H^(1)_0 .. H^(1)_nmax.
inline std::vector<cplx> bessel_y_array(int nmax, cplx z);

inline std::vector<cplx> hankel1_array(int nmax, cplx z) {
  detail::check_argument(nmax, z, "hankel1");
  z = detail::canonical(z);
  if (z == 0.0) throw SingularityError("hankel1: z = 0");
  std::vector<cplx> out;
  if (z.imag() >= 0.0) {
    const auto [h0, h1] = detail::upper_h01(z);
    out = detail::forward_recurrence(h0, h1, nmax, z);
  } else {
    // Forward recurrence would amplify the H^(2) component here.
    const auto js = bessel_j_array(nmax, z);
    out = bessel_y_array(nmax, z);
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = js[n] + detail::I * out[n];
  }
  for (const auto& v : out) detail::check_result(v, "hankel1");
  return out;
}

/// Y_0 .. Y_nmax.
inline std::vector<cplx> bessel_y_array(int nmax, cplx z) {
  detail::check_argument(nmax, z, "bessel_y");
  z = detail::canonical(z);
  if (z == 0.0) throw SingularityError("bessel_y: z = 0");
  const bool lower = z.imag() < 0.0;
  const cplx zu = lower ? std::conj(z) : z;
  std::vector<cplx> out;
  const auto u = detail::upper01(zu);
  if (std::abs(zu) <= kHankelSeriesRadius) {
    out = detail::forward_recurrence(u.y0, u.y1, nmax, zu);
  } else {
    const auto js = detail::j_upper(nmax, zu);
    const auto hs = detail::forward_recurrence(u.h0, u.h1, nmax, zu);
    out.resize(js.size());
    for (std::size_t n = 0; n < js.size(); ++n) out[n] = detail::I * (js[n] - hs[n]);
  }
  for (auto& v : out) {
    if (lower) v = std::conj(v);
    detail::check_result(v, "bessel_y");
  }
  return out;
}

/// H^(2)_0 .. H^(2)_nmax, via H^(2)(z) = conj(H^(1)(conj z)) off the negative real axis.
inline std::vector<cplx> hankel2_array(int nmax, cplx z) {
  detail::check_argument(nmax, z, "hankel2");
  z = detail::canonical(z);
  if (z == 0.0) throw SingularityError("hankel2: z = 0");
  if (z.imag() == 0.0 && z.real() < 0.0) {
    const auto js = bessel_j_array(nmax, z);
    auto hs = hankel1_array(nmax, z);
    for (std::size_t n = 0; n < hs.size(); ++n) hs[n] = 2.0 * js[n] - hs[n];
    return hs;
  }
  auto out = hankel1_array(nmax, std::conj(z));
  for (auto& v : out) v = std::conj(v);
  return out;
}

inline cplx bessel_y(int n, cplx z) { return bessel_y_array(n, z)[n]; }
inline cplx hankel1(int n, cplx z) { return hankel1_array(n, z)[n]; }
inline cplx hankel2(int n, cplx z) { return hankel2_array(n, z)[n]; }

/// Derivatives of a cylinder-function sequence: Z_0' = -Z_1,
/// Z_n' = Z_{n-1} - (n/z) Z_n. Input must hold orders 0..nmax+1.
inline std::vector<cplx> derivative_from_sequence(const std::vector<cplx>& seq, cplx z) {
  std::vector<cplx> d(seq.size() - 1);
  d[0] = -seq[1];
  for (std::size_t n = 1; n < d.size(); ++n) d[n] = seq[n - 1] - (static_cast<double>(n) / z) * seq[n];
  return d;
}

/// Order-0/1 Hankel pair, the kernel fast path. kind = 1 or 2.
inline std::pair<cplx, cplx> hankel01(int kind, cplx z) {
  detail::check_argument(1, z, "hankel01");
  z = detail::canonical(z);
  if (z == 0.0) throw SingularityError("hankel01: z = 0");
  if (kind == 2) {
    if (z.imag() == 0.0 && z.real() < 0.0) {
      const auto h = hankel2_array(1, z);
      return {h[0], h[1]};
    }
    const auto [a, b] = hankel01(1, std::conj(z));
    return {std::conj(a), std::conj(b)};
  }
  if (std::abs(z) <= detail::kFusedSeriesRadius && z.imag() <= detail::kFusedSeriesMaxImag)
    return detail::h01_series(z);
  if (z.imag() >= 0.0) return detail::upper_h01(z);
  const auto u = detail::upper01(std::conj(z));
  return {std::conj(u.j0) + detail::I * std::conj(u.y0), std::conj(u.j1) + detail::I * std::conj(u.y1)};
}

/**
 * Modal square root sqrt((l pi)^2 - k^2) on the branch analytic in the
 * plane cut along (+-l pi, +-l pi - i inf), positive for real k in
 * (-l pi, l pi) and tending to -ik as |k| grows in the upper half plane.
 * For l = 0 the cuts cancel and the result is -ik.
 */
inline cplx gamma_l(int l, cplx k) {
  if (l < 0) throw DomainError("gamma_l: negative mode index");
  if (!detail::is_finite(k)) throw DomainError("gamma_l: non-finite wavenumber");
  if (l == 0) return -detail::I * k;
  const double a = l * detail::pi;
  const double tol = kBranchCutTolerance * std::max(1.0, a);
  if (k.imag() <= tol && (std::abs(k.real() - a) <= tol || std::abs(k.real() + a) <= tol))
    throw BranchCutError("gamma_l: k = " + std::to_string(k.real()) + std::to_string(k.imag()) +
                         "i lies on the cut of mode " + std::to_string(l));
  // sqrt(a - k): cut where a - k is on the positive imaginary axis.
  // sqrt(a + k): cut where a + k is on the negative imaginary axis.
  static const cplx rot_m = std::polar(1.0, -detail::pi / 4.0);
  static const cplx rot_p = std::polar(1.0, detail::pi / 4.0);
  const cplx s1 = rot_m * std::sqrt(detail::I * (a - k));
  const cplx s2 = rot_p * std::sqrt(-detail::I * (a + k));
  return s1 * s2;
}

namespace detail {

inline double zeta_int(int n) {
  // n >= 2
  switch (n) {
    case 2: return pi * pi / 6.0;
    case 3: return 1.2020569031595942854;
    case 4: return pi * pi * pi * pi / 90.0;
    case 5: return 1.0369277551433699263;
    case 6: return std::pow(pi, 6) / 945.0;
    case 7: return 1.0083492773819228268;
    case 8: return std::pow(pi, 8) / 9450.0;
    default: break;
  }
  double s = 0.0;
  for (int j = 200; j >= 1; --j) s += std::pow(static_cast<double>(j), -n);
  return s;
}

inline constexpr int kPolylogMaxOrder = 12;
inline constexpr int kPolylogTerms = 90;

// coeff[s][k] = zeta(s - k) / k! for the expansion of Li_s(e^mu) about
// mu = 0 (k = s - 1 is the log term and stored as 0).
struct PolylogTable {
  std::array<std::array<double, kPolylogTerms>, kPolylogMaxOrder + 1> coeff{};
  std::array<double, kPolylogMaxOrder + 1> harmonic{};
  std::array<double, kPolylogMaxOrder + 1> inv_factorial{};

  PolylogTable() {
    double f = 1.0;
    for (int s = 0; s <= kPolylogMaxOrder; ++s) {
      if (s > 0) f *= s;
      inv_factorial[s] = 1.0 / f;
      harmonic[s] = s == 0 ? 0.0 : harmonic[s - 1] + 1.0 / s;
    }
    for (int s = 2; s <= kPolylogMaxOrder; ++s) {
      double kfact = 1.0;
      for (int k = 0; k < kPolylogTerms; ++k) {
        if (k > 0) kfact *= k;
        const int arg = s - k;
        double c = 0.0;
        if (arg >= 2) {
          c = zeta_int(arg) / kfact;
        } else if (arg == 1) {
          c = 0.0;
        } else if (arg == 0) {
          c = -0.5 / kfact;
        } else if ((-arg) % 2 == 0) {
          c = 0.0;  // trivial zeros
        } else {
          // arg = 1 - 2m:  zeta(1-2m)/k! = (-1)^m 2 zeta(2m) / ((2 pi)^{2m} prod_{i=0}^{s-1} (2m+i))
          const int m = (1 - arg) / 2;
          double denom = std::pow(2.0 * pi, 2 * m);
          for (int i = 0; i < s; ++i) denom *= (2 * m + i);
          c = (m % 2 == 0 ? 1.0 : -1.0) * 2.0 * zeta_int(2 * m) / denom;
        }
        coeff[s][k] = c;
      }
    }
  }
};

inline const PolylogTable& polylog_table() {
  static const PolylogTable table;
  return table;
}

// Complex expm1 without cancellation for small |mu|.
inline cplx expm1(cplx mu) {
  const double a = mu.real(), b = mu.imag();
  const double sb2 = std::sin(0.5 * b);
  const double re = std::expm1(a) * std::cos(b) - 2.0 * sb2 * sb2;
  const double im = std::exp(a) * std::sin(b);
  return {re, im};
}

}  // namespace detail

/**
 * Li_s(e^mu) for s = -1, 0, ..., smax (index s + 1 in the result).
 * Requires Re mu <= 0, |Im mu| <= pi, mu != 0, smax <= 12.
 */
inline std::vector<cplx> polylog_exp(int smax, cplx mu) {
  if (smax < 1 || smax > detail::kPolylogMaxOrder) throw DomainError("polylog_exp: order out of range");
  if (mu == 0.0) throw SingularityError("polylog_exp: mu = 0");
  std::vector<cplx> li(static_cast<std::size_t>(smax) + 2);
  const cplx em1 = detail::expm1(mu);  // w - 1
  const cplx w = 1.0 + em1;
  li[0] = w / (em1 * em1);       // Li_{-1}
  li[1] = -w / em1;              // Li_0
  li[2] = -std::log(-em1);       // Li_1
  if (smax < 2) return li;
  if (std::abs(w) < 0.35) {
    // Direct series; |w|^l decays at least like 0.35^l.
    cplx wl = 1.0;
    for (int l = 1; l < 200; ++l) {
      wl *= w;
      double ls = l * l;
      bool done = std::abs(wl) < 1e-18;
      for (int s = 2; s <= smax; ++s) {
        li[s + 1] += wl / ls;
        ls *= l;
      }
      if (done) break;
    }
    return li;
  }
  const auto& tab = detail::polylog_table();
  std::array<cplx, detail::kPolylogTerms> powers{};
  powers[0] = 1.0;
  for (int k = 1; k < detail::kPolylogTerms; ++k) powers[k] = powers[k - 1] * mu;
  const cplx log_neg_mu = std::log(-mu);
  const double amu = std::abs(mu);
  for (int s = 2; s <= smax; ++s) {
    cplx sum = powers[s - 1] * tab.inv_factorial[s - 1] * (tab.harmonic[s - 1] - log_neg_mu);
    double mag = amu;
    for (int k = 0; k < detail::kPolylogTerms; ++k) {
      const double c = tab.coeff[s][k];
      if (c != 0.0) sum += c * powers[k];
      if (k > s + 4) {
        mag = std::abs(c) * std::abs(powers[k]);
        if (mag < 1e-18 && c != 0.0) break;
      }
    }
    li[s + 1] = sum;
  }
  return li;
}

}  // namespace special
}  // namespace trbie
