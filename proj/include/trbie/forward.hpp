#pragma once
/**
 * @file forward.hpp
 * @brief Inhomogeneous transmission problem at real omega, waveguide modal
 * coefficients of the scattered field and energy transmittance.
 *
 * With n pointing into medium 1, the scattered field there is
 *   u_s(x) = int [ u_s dG1/dn_y - G1 q_s / S1 ] ds_y.
 * Above the scatterers G1 reduces to sum_l (f_l/gamma_l) c_l(x1) c_l(y1)
 * exp(-gamma_l (x2 - y2)), so u_s ~ sum_l C+_l c_l(x1) exp(-gamma_l x2) with
 *   C+_l = (f_l/gamma_l) int [ u_s d/dn(c_l e^{gamma_l y2}) - c_l e^{gamma_l y2} q_s/S1 ] ds,
 * and symmetrically below with gamma_l -> -gamma_l. A propagating mode
 * A c_l e^{i beta_l x2} carries power |A|^2 beta_l / (2 f_l) per unit S1.
 */

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "trbie/assembly.hpp"
#include "trbie/errors.hpp"
#include "trbie/linalg.hpp"

namespace trbie {

struct DensityPair {
  Vector u, q;
};

inline DensityPair split_interleaved(const Vector& x) {
  const Eigen::Index n = x.size() / 2;
  DensityPair d{Vector(n), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    d.u(i) = x(2 * i);
    d.q(i) = x(2 * i + 1);
  }
  return d;
}

/// Distance of omega to the nearest waveguide cutoff l pi sqrt(S1/rho1), l >= 1.
inline double cutoff_distance(const Material& exterior, double omega) {
  const double unit = std::numbers::pi * std::sqrt(exterior.shear / exterior.rho);
  const double l = std::max(1.0, std::round(omega / unit));
  return std::abs(omega - l * unit);
}

/// Total-field traces for a real frequency.
inline DensityPair solve_forward(const ProblemSpec& spec, double omega, const Incident& inc) {
  check_incident(spec, omega, inc);
  if (spec.domain == DomainKind::waveguide && cutoff_distance(spec.exterior, omega) < 1e-6)
    throw ConfigError("omega is within 1e-6 of a waveguide cutoff");
  const Matrix A = assemble(spec, omega);
  const Vector b = assemble_rhs(spec, omega, inc);
  try {
    return split_interleaved(LU(A).solve(b));
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string("forward solve: ") + e.what() + " (omega may sit on a real resonance)");
  }
}

/// Scattered-field traces: total traces minus the incident ones.
inline DensityPair scattered_part(const ProblemSpec& spec, double omega, const Incident& inc, const DensityPair& total) {
  const Vector t = incident_traces(spec, omega, inc);
  DensityPair s = total;
  for (Eigen::Index i = 0; i < s.u.size(); ++i) {
    s.u(i) -= t(2 * i);
    s.q(i) -= t(2 * i + 1);
  }
  return s;
}

enum class Direction { plus, minus };

struct ModalCoefficients {
  Direction direction = Direction::plus;
  std::vector<cplx> coeffs;  // propagating modes l = 0 .. (l pi < k1)
};

inline int propagating_modes(double k1) {
  int n = 0;
  while (n * std::numbers::pi < k1) ++n;
  return n;
}

/// Coefficients of the scattered field (traces with the incident part removed).
inline ModalCoefficients modal_coefficients(const DensityPair& scattered, const ProblemSpec& spec, double omega,
                                            Direction direction) {
  if (spec.domain != DomainKind::waveguide) throw ConfigError("modal coefficients need a waveguide problem");
  const std::size_t N = spec.mesh.size();
  if (static_cast<std::size_t>(scattered.u.size()) != N || static_cast<std::size_t>(scattered.q.size()) != N)
    throw ConfigError("density length does not match the mesh");
  const double k1 = spec.exterior.wavenumber(omega).real();
  const double S1 = spec.exterior.shear;
  const double sigma = direction == Direction::plus ? 1.0 : -1.0;
  ModalCoefficients out;
  out.direction = direction;
  const int L = propagating_modes(k1);
  for (int l = 0; l < L; ++l) {
    const cplx g = special::gamma_l(l, k1);
    const double f = l == 0 ? 0.5 : 1.0;
    cplx acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const auto [phi, dphi] = detail::modal_source_integrals(spec.mesh.panels[j], l * std::numbers::pi, g, sigma, 0.0);
      acc += scattered.u(j) * dphi - phi * scattered.q(j) / S1;
    }
    out.coeffs.push_back(f / g * acc);
  }
  return out;
}

/// Power carried by amplitude-1 mode l relative to S1: beta_l / (2 f_l).
inline double mode_power(int l, double k1) {
  const double a = l * std::numbers::pi;
  const double beta = std::sqrt(std::max(0.0, k1 * k1 - a * a));
  return l == 0 ? beta : 0.5 * beta;
}

struct EnergyBalance {
  double T = 0.0, R = 0.0;
  double defect() const { return T + R - 1.0; }
};

/**
 * Transmittance and reflectance for a unit-amplitude propagating mode
 * incident from below (direction +1) or above (-1). The transmitted side
 * adds the incident mode to the scattered coefficients.
 */
inline EnergyBalance energy_balance(const ModalCoefficients& plus, const ModalCoefficients& minus, double k1,
                                    const Incident& inc) {
  const ModalCoefficients& trans = inc.direction > 0 ? plus : minus;
  const ModalCoefficients& refl = inc.direction > 0 ? minus : plus;
  const double p_inc = mode_power(inc.mode, k1);
  EnergyBalance e;
  for (std::size_t l = 0; l < trans.coeffs.size(); ++l) {
    const cplx a = trans.coeffs[l] + (static_cast<int>(l) == inc.mode ? 1.0 : 0.0);
    e.T += std::norm(a) * mode_power(static_cast<int>(l), k1) / p_inc;
  }
  for (std::size_t l = 0; l < refl.coeffs.size(); ++l)
    e.R += std::norm(refl.coeffs[l]) * mode_power(static_cast<int>(l), k1) / p_inc;
  for (double v : {e.T, e.R})
    if (!(v >= -1e-3 && v <= 1.0 + 1e-3))
      throw EnergyViolationError("transmittance/reflectance " + std::to_string(v) + " outside [0, 1]");
  return e;
}

inline double transmittance(const ModalCoefficients& plus, const ModalCoefficients& minus, double k1, const Incident& inc) {
  return energy_balance(plus, minus, k1, inc).T;
}

/// Full pipeline for one frequency of a waveguide scan.
inline EnergyBalance scan_point(const ProblemSpec& spec, double omega, const Incident& inc) {
  const DensityPair total = solve_forward(spec, omega, inc);
  const DensityPair sca = scattered_part(spec, omega, inc, total);
  const double k1 = spec.exterior.wavenumber(omega).real();
  return energy_balance(modal_coefficients(sca, spec, omega, Direction::plus),
                        modal_coefficients(sca, spec, omega, Direction::minus), k1, inc);
}

/// Scattered field at x in medium 1 from scattered-field traces (16-point Gauss per panel).
inline cplx scattered_field(const ProblemSpec& spec, double omega, const DensityPair& scattered, Vec2 x) {
  const cplx k1 = spec.exterior.wavenumber(omega);
  const double S1 = spec.exterior.shear;
  std::optional<WaveguideGreen> G;
  if (spec.domain == DomainKind::waveguide) G.emplace(k1, spec.g1_rel_tol);
  const auto& rule = gauss_legendre(16);
  cplx acc = 0.0;
  for (std::size_t j = 0; j < spec.mesh.size(); ++j) {
    const Panel& p = spec.mesh.panels[j];
    cplx sg = 0.0, sd = 0.0;
    for (int n = 0; n < rule.size(); ++n) {
      const Vec2 y = p.mid + (0.5 * p.length * rule.nodes[n]) * p.tangent;
      const KernelSample s = G ? G->sample(x, y, p.normal, p.normal) : freespace_sample(k1, KernelMode::outgoing, x, y, p.normal, p.normal);
      const double w = 0.5 * p.length * rule.weights[n];
      sg += w * s.g;
      sd += w * s.dny;
    }
    acc += scattered.u(j) * sd - sg * scattered.q(j) / S1;
  }
  return acc;
}

}  // namespace trbie
