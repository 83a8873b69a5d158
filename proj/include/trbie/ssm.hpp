#pragma once
/**
 * @file ssm.hpp
 * @brief Contour-integral (Sakurai-Sugiura, Hankel variant) solver for
 * nonlinear eigenproblems A(z) x = 0 inside a rectangle.
 *
 * Moments are taken in the shifted and scaled variable zeta = (z - c)/rho
 * (c, rho from the rectangle by default). Powers of z itself make the
 * Hankel matrices badly scaled once |z| is far from 1; the map is undone
 * on the eigenvalues, so nothing else changes.
 */

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "trbie/errors.hpp"
#include "trbie/kernels.hpp"
#include "trbie/linalg.hpp"
#include "trbie/parallel.hpp"
#include "trbie/quadrature.hpp"
#include "trbie/rect.hpp"
#include "trbie/rng.hpp"

namespace trbie {

using SystemFn = std::function<Matrix(cplx)>;

struct ContourSpec {
  Rect rect;
  int n_quad_per_side = 0;  // 0: 32 when the rectangle lies below Re z = pi, else 64

  int nodes_per_side() const {
    if (n_quad_per_side > 0) return n_quad_per_side;
    return rect.re_max <= std::numbers::pi ? 32 : 64;
  }
  void validate() const {
    rect.validate();
    if (n_quad_per_side < 0) throw ConfigError("n_quad_per_side must be positive");
  }
};

struct SsmParams {
  int L = 8;   // probe columns
  int m = 12;  // moments 0 .. 2m-1
  std::uint64_t seed = 1;
  double sv_threshold = 1e-10;
  double residual_threshold = 1e-6;
  double class_eps_rel = 1e-6;  // classification band, relative to the contour height
  // Moment variable (z - shift)/scale; unset means rectangle centre / half diagonal.
  std::optional<cplx> shift;
  std::optional<double> scale;

  void validate() const {
    if (L < 1 || m < 1) throw ConfigError("SSM needs L >= 1 and m >= 1");
    if (!(sv_threshold > 0.0) || !(residual_threshold > 0.0)) throw ConfigError("SSM thresholds must be positive");
    if (scale && !(*scale > 0.0)) throw ConfigError("SSM moment scale must be positive");
  }
};

/// Quadrature node z with weight w already containing dz / (2 pi i).
struct ContourNode {
  cplx z, w;
};

/// Gauss-Legendre nodes on each side, counter-clockwise from (re_min, im_min).
inline std::vector<ContourNode> contour_nodes(const ContourSpec& contour) {
  contour.validate();
  const Rect& r = contour.rect;
  const cplx corners[5] = {{r.re_min, r.im_min}, {r.re_max, r.im_min}, {r.re_max, r.im_max}, {r.re_min, r.im_max}, {r.re_min, r.im_min}};
  const auto& rule = gauss_legendre(contour.nodes_per_side());
  const cplx two_pi_i(0.0, 2.0 * std::numbers::pi);
  std::vector<ContourNode> nodes;
  for (int side = 0; side < 4; ++side) {
    const cplx a = corners[side], b = corners[side + 1];
    const cplx half = 0.5 * (b - a);
    for (int n = 0; n < rule.size(); ++n) nodes.push_back({a + half * (1.0 + rule.nodes[n]), half * rule.weights[n] / two_pi_i});
  }
  return nodes;
}

struct Moments {
  std::vector<Matrix> M;  // L x L, k = 0 .. 2m-1
  std::vector<Matrix> S;  // N x L, k = 0 .. m-1 (for eigenvector lifting)
  cplx shift;
  double scale = 1.0;
};

inline cplx moment_shift(const ContourSpec& c, const SsmParams& p) { return p.shift ? *p.shift : c.rect.center(); }
inline double moment_scale(const ContourSpec& c, const SsmParams& p) {
  return p.scale ? *p.scale : 0.5 * std::hypot(c.rect.width(), c.rect.height());
}

/// Probe matrices (stream 0 for Q, 1 for P).
inline std::pair<Matrix, Matrix> ssm_probes(Eigen::Index N, const SsmParams& p) {
  return {random_complex_matrix(N, p.L, p.seed, 1), random_complex_matrix(N, p.L, p.seed, 0)};
}

/**
 * M_k = P^H sum_j w_j zeta_j^k A(z_j)^{-1} Q. Nodes run in parallel; the
 * reduction is done afterwards in node order so results do not depend on
 * the thread count.
 */
inline Moments compute_moments(const SystemFn& A, const ContourSpec& contour, const SsmParams& params, Eigen::Index N) {
  params.validate();
  const auto nodes = contour_nodes(contour);
  const auto [P, Q] = ssm_probes(N, params);
  Moments out;
  out.shift = moment_shift(contour, params);
  out.scale = moment_scale(contour, params);
  std::vector<Matrix> Y(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t j) {
    const Matrix Aj = A(nodes[j].z);
    if (Aj.rows() != N || Aj.cols() != N) throw ConfigError("SSM system returned a matrix of the wrong size");
    try {
      Y[j] = LU(Aj).solve(Q);
    } catch (const SingularMatrixError&) {
      throw ContourHitsEigenvalueError("A(z) is singular at contour node z = " + std::to_string(nodes[j].z.real()) +
                                       (nodes[j].z.imag() < 0 ? "" : "+") + std::to_string(nodes[j].z.imag()) +
                                       "i; perturb the contour");
    }
  });
  const int K = 2 * params.m;
  out.M.assign(K, Matrix::Zero(params.L, params.L));
  out.S.assign(params.m, Matrix::Zero(N, params.L));
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const cplx zeta = (nodes[j].z - out.shift) / out.scale;
    const Matrix PY = P.adjoint() * Y[j];
    cplx wk = nodes[j].w;
    for (int k = 0; k < K; ++k) {
      out.M[k] += wk * PY;
      if (k < params.m) out.S[k] += wk * Y[j];
      wk *= zeta;
    }
  }
  return out;
}

struct Candidate {
  cplx lambda;
  Vector vector;  // unit 2-norm
};

struct Extraction {
  std::vector<Candidate> candidates;
  Eigen::VectorXd singular_values;  // of the Hankel matrix, descending
  int rank = 0;
};

/// Hankel matrices, SVD truncation, reduced eigenproblem, eigenvector lifting.
inline Extraction extract_eigen(const Moments& mom, const SsmParams& params) {
  const int m = params.m, L = params.L;
  if (static_cast<int>(mom.M.size()) != 2 * m) throw ConfigError("moment count does not match m");
  const int n = m * L;
  Matrix H(n, n), Hs(n, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      H.block(i * L, j * L, L, L) = mom.M[i + j];
      Hs.block(i * L, j * L, L, L) = mom.M[i + j + 1];
    }
  Extraction ex;
  const SVDResult sv = svd(H);
  ex.singular_values = sv.sigma;
  const double smax = sv.sigma.size() ? sv.sigma(0) : 0.0;
  int k = 0;
  while (k < sv.sigma.size() && smax > 0.0 && sv.sigma(k) >= params.sv_threshold * smax) ++k;
  // Everything below an absolute floor means the contour encloses nothing.
  if (!(smax > 1e-300)) k = 0;
  ex.rank = k;
  if (k == 0) return ex;
  const Matrix Uk = sv.U.leftCols(k), Vk = sv.V.leftCols(k);
  const Eigen::VectorXd sinv = sv.sigma.head(k).cwiseInverse();
  const Matrix B = Uk.adjoint() * Hs * Vk * sinv.asDiagonal();
  const EigResult er = eig_small(B);
  const Eigen::Index N = mom.S.front().rows();
  Matrix Scat(N, n);
  for (int i = 0; i < m; ++i) Scat.middleCols(i * L, L) = mom.S[i];
  const Matrix lift = Scat * Vk * sinv.asDiagonal();
  for (Eigen::Index i = 0; i < er.values.size(); ++i) {
    Candidate c;
    c.lambda = mom.shift + mom.scale * er.values(i);
    c.vector = lift * er.vectors.col(i);
    const double nv = c.vector.norm();
    if (nv > 0.0) c.vector /= nv;
    ex.candidates.push_back(std::move(c));
  }
  return ex;
}

enum class Classification { true_eig, fictitious, unknown };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::true_eig: return "true_eig";
    case Classification::fictitious: return "fictitious";
    default: return "unknown";
  }
}

struct EigenResult {
  cplx lambda;
  double residual = 0.0;  // ||A(lambda) v|| / ||v||
  bool inside_contour = false;
  Classification classification = Classification::unknown;
  Vector vector;
};

/// Smallest-singular-vector estimate by inverse iteration on one LU of A(lambda).
inline double inverse_iteration_residual(const Matrix& A, Vector& v, int steps = 3) {
  if (v.size() != A.rows() || !(v.norm() > 0.0)) v = Vector::Ones(A.rows());
  v /= v.norm();
  try {
    const LU lu(A);
    for (int s = 0; s < steps; ++s) {
      Vector w = lu.solve(v);
      const double nw = w.norm();
      if (!std::isfinite(nw) || nw == 0.0) break;
      v = w / nw;
    }
  } catch (const SingularMatrixError&) {
    // exactly singular at lambda: the start vector already is the best guess
  }
  return (A * v).norm();
}

inline std::vector<EigenResult> certify_and_classify(const std::vector<Candidate>& candidates, const SystemFn& A,
                                                     KernelMode mode, const ContourSpec& contour, const SsmParams& params) {
  std::vector<EigenResult> all(candidates.size());
  std::vector<char> keep(candidates.size(), 0);
  const double eps = params.class_eps_rel * contour.rect.height();
  parallel_for(candidates.size(), [&](std::size_t i) {
    EigenResult r;
    r.lambda = candidates[i].lambda;
    r.vector = candidates[i].vector;
    Matrix Al;
    try {
      Al = A(r.lambda);
    } catch (const Error&) {
      return;  // candidate where the operator is undefined (on a cut, etc.)
    }
    r.residual = inverse_iteration_residual(Al, r.vector);
    if (!(r.residual <= params.residual_threshold)) return;
    r.inside_contour = contour.rect.contains(r.lambda);
    if (mode == KernelMode::incoming)
      r.classification = r.lambda.imag() > eps ? Classification::fictitious : Classification::true_eig;
    all[i] = std::move(r);
    keep[i] = 1;
  });
  std::vector<EigenResult> out;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (keep[i]) out.push_back(std::move(all[i]));
  std::sort(out.begin(), out.end(), [](const EigenResult& a, const EigenResult& b) {
    return a.lambda.real() != b.lambda.real() ? a.lambda.real() < b.lambda.real() : a.lambda.imag() < b.lambda.imag();
  });
  return out;
}

/**
 * Rejects contours whose image under omega -> c1 omega (c1 = sqrt(rho1/S1))
 * comes within `margin` of a cut ray {Re k = +-l pi, Im k <= 0}, l >= 1.
 */
inline void validate_waveguide_contour(const Rect& r, double c1, double margin = 1e-3) {
  r.validate();
  const double x0 = c1 * r.re_min, x1 = c1 * r.re_max, y0 = c1 * r.im_min;
  const double reach = std::max(std::abs(x0), std::abs(x1));
  for (int l = 1; l * std::numbers::pi <= reach + margin + std::numbers::pi; ++l)
    for (int sgn = -1; sgn <= 1; sgn += 2) {
      const double a = sgn * l * std::numbers::pi;
      bool hit = x0 <= a && a <= x1 && y0 <= 0.0;
      if (!hit) {
        const double dx = std::max({x0 - a, a - x1, 0.0});
        const double dy = std::max(y0, 0.0);
        hit = std::hypot(dx, dy) < margin;
      }
      if (hit)
        throw ConfigError("contour touches the branch cut of waveguide mode " + std::to_string(l) +
                          " (omega = " + std::to_string(a / c1) + " - i t)");
    }
}

struct SsmOutcome {
  std::vector<EigenResult> eigenvalues;
  Extraction extraction;
  std::size_t n_nodes = 0;
};

inline SsmOutcome ssm_solve(const SystemFn& A, Eigen::Index N, const ContourSpec& contour, const SsmParams& params,
                            KernelMode mode) {
  SsmOutcome out;
  const Moments mom = compute_moments(A, contour, params, N);
  out.n_nodes = 4 * static_cast<std::size_t>(contour.nodes_per_side());
  out.extraction = extract_eigen(mom, params);
  out.eigenvalues = certify_and_classify(out.extraction.candidates, A, mode, contour, params);
  return out;
}

}  // namespace trbie
