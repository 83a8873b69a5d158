#pragma once
/**
 * @file assembly.hpp
 * @brief Collocation matrices of the Mueller and PMCHWT transmission BIEs.
 *
 * Unknowns are interleaved per panel: u_i at 2i, q_i at 2i+1, where u is
 * the trace and q = S du/dn the flux (n points into the exterior medium 1).
 * Per medium nu and panel pair (i, j) four integrals over panel j are
 * collocated at the midpoint x_i:
 *   S  = int G,   D = int dG/dn_y,   D' = int dG/dn_x,   H = f.p. int d2G/dn_x dn_y.
 * Mueller rows:
 *   (S1+S2)/2 u - (S1 D1 - S2 D2) u + (S_1 - S_2) q
 *   (S1+S2)/(2 S1 S2) q - (H1 - H2) u + (D'1/S1 - D'2/S2) q
 * PMCHWT rows:
 *   (D1 + D2) u - (S_1/S1 + S_2/S2) q
 *   (S1 H1 + S2 H2) u - (D'1 + D'2) q
 * (S1, S2 without underscore are shear moduli; S_nu are the single-layer blocks.)
 *
 * Self panels: the static singular part of each kernel, A/r^2 + B log r,
 * is integrated in closed form on the flat panel and the remainder by
 * Gauss-Legendre on both halves. The double-layer kernels vanish there.
 */

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

#include "trbie/errors.hpp"
#include "trbie/geometry.hpp"
#include "trbie/kernels.hpp"
#include "trbie/parallel.hpp"
#include "trbie/quadrature.hpp"
#include "trbie/special.hpp"

namespace trbie {

struct Material {
  double rho = 1.0;    // density
  double shear = 1.0;  // shear modulus
  cplx wavenumber(cplx omega) const { return omega * std::sqrt(rho / shear); }
};

enum class Formulation { mueller, pmchwt };
enum class DomainKind { freespace, waveguide };

struct ProblemSpec {
  BoundaryMesh mesh;
  Material exterior;  // medium 1
  Material interior;  // medium 2
  DomainKind domain = DomainKind::freespace;
  Formulation formulation = Formulation::mueller;
  KernelMode kernel_mode = KernelMode::outgoing;  // interior kernel only
  double g1_rel_tol = 1e-10;
};

inline void validate(const ProblemSpec& spec) {
  for (const Material* m : {&spec.exterior, &spec.interior})
    if (!(m->rho > 0.0) || !(m->shear > 0.0) || !std::isfinite(m->rho) || !std::isfinite(m->shear))
      throw ConfigError("material density and shear modulus must be positive");
  if (spec.mesh.size() == 0) throw ConfigError("empty boundary mesh");
  if (spec.domain == DomainKind::waveguide)
    for (const auto& p : spec.mesh.panels)
      if (std::abs(p.start.x) >= 0.5) throw ConfigError("mesh leaves the waveguide strip |x1| < 1/2");
}

/// Integrals of G, dG/dn_y, dG/dn_x, d2G/dn_x dn_y over one panel.
struct PanelIntegrals {
  cplx s = 0.0, d = 0.0, dp = 0.0, h = 0.0;
  PanelIntegrals& operator+=(const PanelIntegrals& o) {
    s += o.s;
    d += o.d;
    dp += o.dp;
    h += o.h;
    return *this;
  }
};

/// Closed form of int_{-h/2}^{h/2} log|s| ds.
inline double panel_log_integral(double h) { return h * (std::log(0.5 * h) - 1.0); }

/// Hadamard finite part of int_{-h/2}^{h/2} ds / s^2.
inline double panel_inverse_square_fp(double h) { return -4.0 / h; }

namespace detail {

/// Gauss rule with q points on panel p; sampler(y) returns a KernelSample.
template <class Sampler>
PanelIntegrals gauss_panel(const Sampler& sampler, const Panel& p, int q) {
  const auto& rule = gauss_legendre(q);
  PanelIntegrals acc;
  const double half = 0.5 * p.length;
  for (int n = 0; n < rule.size(); ++n) {
    const Vec2 y = p.mid + (half * rule.nodes[n]) * p.tangent;
    const KernelSample s = sampler(y);
    const double w = half * rule.weights[n];
    acc.s += w * s.g;
    acc.d += w * s.dny;
    acc.dp += w * s.dnx;
    acc.h += w * s.hyper;
  }
  return acc;
}

inline int near_order(const Panel& pi, const Panel& pj) {
  const double dist = norm(pi.mid - pj.mid);
  if (dist < 2.0 * pj.length) return 64;
  if (dist < 6.0 * pj.length) return 16;
  return 4;
}

// Free-space self panel with static-part extraction (the same static
// part holds for the outgoing and incoming kernels).
inline PanelIntegrals self_freespace(cplx k, KernelMode mode, const Panel& p) {
  constexpr double pi = std::numbers::pi;
  const double B = -1.0 / (2.0 * pi);
  const double A_h = 1.0 / (2.0 * pi);
  const cplx B_h = -k * k / (4.0 * pi);
  const auto& rule = gauss_legendre(16);
  const double h = p.length;
  PanelIntegrals acc;
  for (int side = -1; side <= 1; side += 2) {
    for (int n = 0; n < rule.size(); ++n) {
      const double r = 0.25 * h * (1.0 + rule.nodes[n]);
      const double w = 0.25 * h * rule.weights[n];
      const Vec2 y = p.mid + (side * r) * p.tangent;
      const KernelSample s = freespace_sample(k, mode, p.mid, y, p.normal, p.normal);
      const double lr = std::log(r);
      acc.s += w * (s.g - B * lr);
      acc.h += w * (s.hyper - A_h / (r * r) - B_h * lr);
    }
  }
  acc.s += B * panel_log_integral(h);
  acc.h += A_h * panel_inverse_square_fp(h) + B_h * panel_log_integral(h);
  return acc;
}

inline PanelIntegrals freespace_integrals(cplx k, KernelMode mode, const Panel& pi, const Panel& pj, bool self) {
  if (self) return self_freespace(k, mode, pj);
  auto sampler = [&](Vec2 y) { return freespace_sample(k, mode, pi.mid, y, pi.normal, pj.normal); };
  return gauss_panel(sampler, pj, near_order(pi, pj));
}

// exp(z) - 1 over z without cancellation at small |z|.
inline cplx phi1(cplx z) {
  if (std::abs(z) < 1e-8) return 1.0 + 0.5 * z;
  if (std::abs(z) < 1.0) return special::detail::expm1(z) / z;
  return (std::exp(z) - 1.0) / z;
}

/// Exact integrals over panel p of the waveguide mode source factor
/// phi(y) = cos(a (y1 + 1/2)) exp(sigma g (y2 - center)), a = l pi:
/// returns (int phi, int dphi/dn).
inline std::pair<cplx, cplx> modal_source_integrals(const Panel& p, double a, cplx g, double sigma, double center) {
  const cplx I(0.0, 1.0);
  const cplx e0p = I * a * (p.start.x + 0.5) + sigma * g * (p.start.y - center);
  const cplx alp = I * a * p.tangent.x + sigma * g * p.tangent.y;
  const cplx ip = std::exp(e0p) * p.length * phi1(alp * p.length);
  const cplx e0m = -I * a * (p.start.x + 0.5) + sigma * g * (p.start.y - center);
  const cplx alm = -I * a * p.tangent.x + sigma * g * p.tangent.y;
  const cplx im = std::exp(e0m) * p.length * phi1(alm * p.length);
  const cplx int_c = 0.5 * (ip + im);
  const cplx int_cp = 0.5 * I * a * (ip - im);  // integral of d/dy1 of the cosine factor
  return {int_c, p.normal.x * int_cp + p.normal.y * sigma * g * int_c};
}

}  // namespace detail

/**
 * Separable modal form of the waveguide kernel for panel pairs whose
 * cross-sections are at least `separation` apart. For x2 > y2 (sigma = +1)
 *   G = sum_l (f_l/gamma_l) [c_l(x1) e^{-gamma_l (x2-c_a)}] e^{-gamma_l (c_a-c_b)} [c_l(y1) e^{gamma_l (y2-c_b)}]
 * where c_a, c_b are the centres of the horizontal bands holding the
 * target and the source. Bands keep each factor bounded; the coupling
 * factor only decays because the target band is never below the source
 * band. Source factors are integrated exactly over the panel (exponentials
 * of a linear function of arclength). Only the first L modes matter
 * because every dropped term carries exp(-l pi separation).
 */
class WaveguideModalExpansion {
 public:
  WaveguideModalExpansion(const WaveguideGreen& G, const BoundaryMesh& mesh, double separation, double rel_tol)
      : separation_(separation), n_(mesh.size()) {
    constexpr double pi = std::numbers::pi;
    const cplx k = G.wavenumber();
    double lo = mesh.panels.front().mid.y, hi = lo;
    for (const auto& p : mesh.panels) {
      lo = std::min({lo, p.start.y, p.end.y});
      hi = std::max({hi, p.start.y, p.end.y});
    }
    // Mode count: dropped terms are below rel_tol (with derivative factors).
    int quiet = 0;
    int l = 1;
    for (; l < WaveguideGreen::kMaxModes; ++l) {
      const cplx g = G.gamma(l);
      const double a = l * pi;
      const double bound = std::exp(-g.real() * separation) * (1.0 + a * a);
      if (a > std::abs(k.real()) + 1.0 && bound < 1e-2 * rel_tol) {
        if (++quiet >= 3) break;
      } else {
        quiet = 0;
      }
    }
    L_ = l + 1;
    double rate = 0.0;
    for (int m = 0; m < L_; ++m) rate = std::max(rate, std::abs(G.gamma(m).real()));
    const double hmax = max_panel_length(mesh);
    // each band factor stays below exp(kMaxExponent)
    constexpr double kMaxExponent = 300.0;
    band_ = std::min(1.0, 2.0 * (kMaxExponent / std::max(rate, 1e-300) - hmax));
    available_ = band_ > 4.0 * hmax;
    if (!available_) return;
    lo_ = lo;
    const int nb = std::max(1, static_cast<int>(std::ceil((hi - lo) / band_)));
    band_of_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i)
      band_of_[i] = std::clamp(static_cast<int>((mesh.panels[i].mid.y - lo) / band_), 0, nb - 1);
    coupling_.assign(static_cast<std::size_t>(nb) * L_);
    for (int d = 0; d < nb; ++d)
      for (int m = 0; m < L_; ++m) coupling_.set(d * L_ + m, std::exp(-G.gamma(m) * (d * band_)));

    for (int s = 0; s < 2; ++s) {
      tpsi_[s].assign(n_ * L_);
      tdpsi_[s].assign(n_ * L_);
      sphi_[s].assign(n_ * L_);
      sdphi_[s].assign(n_ * L_);
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const Panel& p = mesh.panels[i];
      const double center = lo + (band_of_[i] + 0.5) * band_;
      for (int m = 0; m < L_; ++m) {
        const double a = m * pi;
        const cplx g = G.gamma(m);
        const double f = m == 0 ? 0.5 : 1.0;
        const cplx wgt = f / g;
        const double c = std::cos(a * (p.mid.x + 0.5));
        const double cp = -a * std::sin(a * (p.mid.x + 0.5));
        for (int s = 0; s < 2; ++s) {
          const double sigma = s == 0 ? 1.0 : -1.0;
          // target factor at the collocation point
          const cplx e = std::exp(-sigma * g * (p.mid.y - center));
          tpsi_[s].set(i * L_ + m, c * e);
          tdpsi_[s].set(i * L_ + m, (p.normal.x * cp - p.normal.y * sigma * g * c) * e);
          // exact panel integrals of the source factor
          const auto [int_phi, int_dphi] = detail::modal_source_integrals(p, a, g, sigma, center);
          sphi_[s].set(i * L_ + m, wgt * int_phi);
          sdphi_[s].set(i * L_ + m, wgt * int_dphi);
        }
      }
    }
  }

  bool available() const { return available_; }
  int modes() const { return L_; }
  double separation() const { return separation_; }

  /// +1 if panel j lies entirely below x_i by the separation, -1 if above, 0 otherwise.
  int side(const Panel& target, const Panel& source) const {
    if (!available_) return 0;
    const double lo = std::min(source.start.y, source.end.y), hi = std::max(source.start.y, source.end.y);
    if (target.mid.y - hi >= separation_) return 1;
    if (lo - target.mid.y >= separation_) return -1;
    return 0;
  }

  PanelIntegrals integrals(std::size_t i, std::size_t j, int sigma) const {
    const int s = sigma > 0 ? 0 : 1;
    const std::size_t L = static_cast<std::size_t>(L_);
    const double* tpr = &tpsi_[s].re[i * L];
    const double* tpi = &tpsi_[s].im[i * L];
    const double* tdr = &tdpsi_[s].re[i * L];
    const double* tdi = &tdpsi_[s].im[i * L];
    const double* spr = &sphi_[s].re[j * L];
    const double* spi = &sphi_[s].im[j * L];
    const double* sdr = &sdphi_[s].re[j * L];
    const double* sdi = &sdphi_[s].im[j * L];
    const std::size_t d = static_cast<std::size_t>(std::abs(band_of_[i] - band_of_[j]));
    const double* cr = &coupling_.re[d * L];
    const double* ci = &coupling_.im[d * L];
    double ssr = 0, ssi = 0, sdr_ = 0, sdi_ = 0, spr_ = 0, spi_ = 0, shr = 0, shi = 0;
    // split real arithmetic so the loop vectorizes
    for (std::size_t m = 0; m < L; ++m) {
      const double ar = tpr[m] * cr[m] - tpi[m] * ci[m], ai = tpr[m] * ci[m] + tpi[m] * cr[m];
      const double br = tdr[m] * cr[m] - tdi[m] * ci[m], bi = tdr[m] * ci[m] + tdi[m] * cr[m];
      ssr += ar * spr[m] - ai * spi[m];
      ssi += ar * spi[m] + ai * spr[m];
      sdr_ += ar * sdr[m] - ai * sdi[m];
      sdi_ += ar * sdi[m] + ai * sdr[m];
      spr_ += br * spr[m] - bi * spi[m];
      spi_ += br * spi[m] + bi * spr[m];
      shr += br * sdr[m] - bi * sdi[m];
      shi += br * sdi[m] + bi * sdr[m];
    }
    return {cplx(ssr, ssi), cplx(sdr_, sdi_), cplx(spr_, spi_), cplx(shr, shi)};
  }

 private:
  double separation_;
  std::size_t n_;
  double lo_ = 0.0, band_ = 0.0;
  int L_ = 0;
  bool available_ = false;
  std::vector<int> band_of_;
  // split real/imaginary storage
  struct Split {
    std::vector<double> re, im;
    void assign(std::size_t n) {
      re.assign(n, 0.0);
      im.assign(n, 0.0);
    }
    void set(std::size_t k, cplx v) {
      re[k] = v.real();
      im[k] = v.imag();
    }
  };
  Split coupling_;
  Split tpsi_[2], tdpsi_[2], sphi_[2], sdphi_[2];
};

/// Kernel integrals of one medium; hides free space versus waveguide.
class MediumIntegrator {
 public:
  /// Separation above which the modal form replaces pointwise evaluation.
  static constexpr double kModalSeparation = 0.1;

  MediumIntegrator(const BoundaryMesh& mesh, cplx k, KernelMode mode, bool waveguide, double rel_tol)
      : mesh_(mesh), k_(k), mode_(mode) {
    if (waveguide) {
      green_.emplace(k, rel_tol);
      modal_.emplace(*green_, mesh, kModalSeparation, rel_tol);
    }
  }

  PanelIntegrals operator()(std::size_t i, std::size_t j) const {
    const Panel& pi = mesh_.panels[i];
    const Panel& pj = mesh_.panels[j];
    if (!green_) return detail::freespace_integrals(k_, mode_, pi, pj, i == j);
    if (const int side = modal_->side(pi, pj); side != 0) return modal_->integrals(i, j, side);
    // Near pairs: free-space singular part plus the smooth remainder
    // G1 - (i/4) H0(k r), whose nearest singularities are wall images.
    PanelIntegrals acc = detail::freespace_integrals(k_, KernelMode::outgoing, pi, pj, i == j);
    const Vec2 img_r{1.0 - pj.mid.x, pj.mid.y}, img_l{-1.0 - pj.mid.x, pj.mid.y};
    const double img = std::min(norm(pi.mid - img_r), norm(pi.mid - img_l));
    const int q = img < 6.0 * pj.length ? 16 : 2;
    auto regular = [&](Vec2 y) {
      KernelSample a = green_->sample(pi.mid, y, pi.normal, pj.normal);
      const KernelSample b = freespace_sample(k_, KernelMode::outgoing, pi.mid, y, pi.normal, pj.normal);
      a.g -= b.g;
      a.dny -= b.dny;
      a.dnx -= b.dnx;
      a.hyper -= b.hyper;
      return a;
    };
    acc += detail::gauss_panel(regular, pj, q);
    return acc;
  }

  const WaveguideGreen* green() const { return green_ ? &*green_ : nullptr; }
  const WaveguideModalExpansion* modal() const { return modal_ ? &*modal_ : nullptr; }

 private:
  const BoundaryMesh& mesh_;
  cplx k_;
  KernelMode mode_;
  std::optional<WaveguideGreen> green_;
  std::optional<WaveguideModalExpansion> modal_;
};

/// Dense 2N x 2N system matrix A(omega).
inline Eigen::MatrixXcd assemble(const ProblemSpec& spec, cplx omega) {
  validate(spec);
  if (omega == 0.0) throw DomainError("assemble: omega = 0 is excluded");
  const std::size_t N = spec.mesh.size();
  const double S1 = spec.exterior.shear, S2 = spec.interior.shear;
  const cplx k1 = spec.exterior.wavenumber(omega), k2 = spec.interior.wavenumber(omega);
  const bool wg = spec.domain == DomainKind::waveguide;
  const MediumIntegrator med1(spec.mesh, k1, KernelMode::outgoing, wg, spec.g1_rel_tol);
  const MediumIntegrator med2(spec.mesh, k2, spec.kernel_mode, false, spec.g1_rel_tol);
  Eigen::MatrixXcd A(2 * N, 2 * N);
  const bool mueller = spec.formulation == Formulation::mueller;
  parallel_for(N, [&](std::size_t i) {
    for (std::size_t j = 0; j < N; ++j) {
      const PanelIntegrals I1 = med1(i, j);
      // each inclusion's interior field sees only its own boundary
      const bool same = spec.mesh.panels[i].scatterer == spec.mesh.panels[j].scatterer;
      const PanelIntegrals I2 = same ? med2(i, j) : PanelIntegrals{};
      const double diag = i == j ? 1.0 : 0.0;
      if (mueller) {
        A(2 * i, 2 * j) = diag * 0.5 * (S1 + S2) - (S1 * I1.d - S2 * I2.d);
        A(2 * i, 2 * j + 1) = I1.s - I2.s;
        A(2 * i + 1, 2 * j) = -(I1.h - I2.h);
        A(2 * i + 1, 2 * j + 1) = diag * (S1 + S2) / (2.0 * S1 * S2) + (I1.dp / S1 - I2.dp / S2);
      } else {
        A(2 * i, 2 * j) = I1.d + I2.d;
        A(2 * i, 2 * j + 1) = -(I1.s / S1 + I2.s / S2);
        A(2 * i + 1, 2 * j) = S1 * I1.h + S2 * I2.h;
        A(2 * i + 1, 2 * j + 1) = -(I1.dp + I2.dp);
      }
    }
  });
  return A;
}

/// Incident field in medium 1.
struct Incident {
  enum class Kind { waveguide_mode, plane_wave } kind = Kind::waveguide_mode;
  int mode = 0;                               // waveguide mode index l
  int direction = 1;                          // waveguide mode travels towards +x2 (1) or -x2 (-1)
  double angle = std::numbers::pi / 2.0;      // plane-wave direction (cos a, sin a)
};

/// Incident trace (u, q = S1 du/dn) at point x with normal n.
inline std::pair<cplx, cplx> incident_trace(const Incident& inc, cplx k1, double S1, Vec2 x, Vec2 n) {
  const cplx I(0.0, 1.0);
  if (inc.kind == Incident::Kind::plane_wave) {
    const Vec2 dir{std::cos(inc.angle), std::sin(inc.angle)};
    const cplx u = std::exp(I * k1 * dot(dir, x));
    return {u, S1 * I * k1 * dot(dir, n) * u};
  }
  const double a = inc.mode * std::numbers::pi;
  const cplx g = static_cast<double>(inc.direction) * special::gamma_l(inc.mode, k1);
  const cplx e = std::exp(-g * x.y);
  const double c = std::cos(a * (x.x + 0.5));
  const double cp = -a * std::sin(a * (x.x + 0.5));
  return {c * e, S1 * (n.x * cp - n.y * g * c) * e};
}

inline void check_incident(const ProblemSpec& spec, double omega, const Incident& inc) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("forward problems need a real positive omega");
  const bool wg = spec.domain == DomainKind::waveguide;
  if (wg && inc.kind != Incident::Kind::waveguide_mode) throw ConfigError("waveguide problems need a waveguide mode incident field");
  if (!wg && inc.kind != Incident::Kind::plane_wave) throw ConfigError("free-space problems need a plane-wave incident field");
  if (wg) {
    if (inc.mode < 0) throw ConfigError("incident mode index must be non-negative");
    if (inc.direction != 1 && inc.direction != -1) throw ConfigError("incident direction must be +1 or -1");
    const double k1 = spec.exterior.wavenumber(omega).real();
    if (inc.mode * std::numbers::pi >= k1) throw ConfigError("incident mode " + std::to_string(inc.mode) + " is evanescent");
  }
}

/// Incident traces at all collocation points, interleaved (u_i, q_i).
inline Eigen::VectorXcd incident_traces(const ProblemSpec& spec, double omega, const Incident& inc) {
  const cplx k1 = spec.exterior.wavenumber(omega);
  Eigen::VectorXcd t(2 * spec.mesh.size());
  for (std::size_t i = 0; i < spec.mesh.size(); ++i) {
    const auto& p = spec.mesh.panels[i];
    const auto [u, q] = incident_trace(inc, k1, spec.exterior.shear, p.mid, p.normal);
    t(2 * i) = u;
    t(2 * i + 1) = q;
  }
  return t;
}

/// Right-hand side whose solution is the total-field traces.
inline Eigen::VectorXcd assemble_rhs(const ProblemSpec& spec, double omega, const Incident& inc) {
  validate(spec);
  check_incident(spec, omega, inc);
  Eigen::VectorXcd rhs = incident_traces(spec, omega, inc);
  const double S1 = spec.exterior.shear;
  for (Eigen::Index i = 0; i < rhs.size(); i += 2) {
    if (spec.formulation == Formulation::mueller) {
      rhs(i) *= S1;
      rhs(i + 1) /= S1;
    } else {
      rhs(i) = -rhs(i);
      rhs(i + 1) = -rhs(i + 1);
    }
  }
  return rhs;
}

/// Debug dump: row-major little-endian complex128 pairs, no header.
inline void write_matrix_binary(const Eigen::MatrixXcd& A, std::ostream& os) {
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (Eigen::Index c = 0; c < A.cols(); ++c) {
      const double v[2] = {A(r, c).real(), A(r, c).imag()};
      os.write(reinterpret_cast<const char*>(v), sizeof v);
    }
}

}  // namespace trbie
