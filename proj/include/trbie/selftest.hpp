#pragma once
/// Fast installation checks run by `trbie selftest` (a few seconds in total).

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "trbie/assembly.hpp"
#include "trbie/forward.hpp"
#include "trbie/kernels.hpp"
#include "trbie/oracle.hpp"
#include "trbie/rng.hpp"
#include "trbie/ssm.hpp"

namespace trbie {

struct SelfCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed() const { return std::isfinite(value) && value <= tolerance; }
};

namespace selftest_detail {

inline SelfCheck bessel_wronskian(std::uint64_t seed) {
  // J_{n+1} Y_n - J_n Y_{n+1} = 2 / (pi z)
  const CounterRng rng(seed, 101);
  double worst = 0.0;
  for (int s = 0; s < 200; ++s) {
    const cplx z(0.1 + 30.0 * rng.uniform(2 * s), -3.0 + 6.0 * rng.uniform(2 * s + 1));
    const auto J = special::bessel_j_array(21, z);
    const auto Y = special::bessel_y_array(21, z);
    for (int n = 0; n <= 20; ++n) {
      const cplx w = J[n + 1] * Y[n] - J[n] * Y[n + 1];
      const cplx ref = 2.0 / (std::numbers::pi * z);
      const double scale = std::max({std::abs(J[n + 1] * Y[n]), std::abs(J[n] * Y[n + 1]), std::abs(ref)});
      worst = std::max(worst, std::abs(w - ref) / scale);
    }
  }
  return {"bessel_wronskian_rel", worst, 1e-10};
}

inline SelfCheck ssm_diagonal(std::uint64_t seed) {
  // five roots inside the contour, two well outside
  const std::vector<cplx> roots = {{1.0, 0.2}, {1.5, -0.3}, {2.0, 0.0}, {2.5, 0.3}, {3.0, -0.1}, {6.5, 0.0}, {2.0, 3.5}};
  const Eigen::Index N = static_cast<Eigen::Index>(roots.size());
  const SystemFn A = [&](cplx z) {
    Matrix M = Matrix::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i) M(i, i) = z - roots[i];
    return M;
  };
  ContourSpec c;
  c.rect = {0.0, 4.0, -1.0, 1.0};
  c.n_quad_per_side = 16;
  SsmParams p;
  p.L = 2;
  p.m = 6;
  p.seed = seed;
  const auto out = ssm_solve(A, N, c, p, KernelMode::outgoing);
  double worst = out.eigenvalues.size() == 5 ? 0.0 : 1.0;
  for (int i = 0; i < 5; ++i) {
    double best = 1.0;
    for (const auto& e : out.eigenvalues) best = std::min(best, std::abs(e.lambda - roots[i]));
    worst = std::max(worst, best);
  }
  return {"ssm_diagonal_max_error", worst, 1e-10};
}

inline SelfCheck waveguide_reciprocity() {
  const WaveguideGreen G(cplx(5.5, 0.0));
  double worst = 0.0;
  const Vec2 pts[4] = {{0.1, 0.2}, {-0.3, -0.25}, {0.45, 1.3}, {-0.05, 0.21}};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      const cplx gxy = G.eval(pts[a], pts[b]).g, gyx = G.eval(pts[b], pts[a]).g;
      worst = std::max(worst, std::abs(gxy - gyx) / std::abs(gxy));
    }
  return {"waveguide_green_reciprocity_rel", worst, 1e-10};
}

inline SelfCheck mie_forward() {
  const Material ext{1.0, 1.0}, in{0.37, 0.2};
  const double r0 = 0.4, omega = 3.0;
  ProblemSpec spec;
  spec.exterior = ext;
  spec.interior = in;
  spec.mesh = mesh_circle({0.0, 0.0}, r0, 128);
  Incident inc;
  inc.kind = Incident::Kind::plane_wave;
  const DensityPair d = solve_forward(spec, omega, inc);
  const MieSolution mie = mie_forward_solution(r0, ext, in, omega, inc.angle);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < spec.mesh.size(); ++i) {
    const double phi = std::atan2(spec.mesh.panels[i].mid.y, spec.mesh.panels[i].mid.x);
    const cplx ref = mie.trace_u(phi);
    num += std::norm(d.u(static_cast<Eigen::Index>(i)) - ref);
    den += std::norm(ref);
  }
  return {"mie_forward_u_rel_l2_128_panels", std::sqrt(num / den), 1e-2};
}

}  // namespace selftest_detail

inline std::vector<SelfCheck> run_selftest(std::uint64_t seed) {
  return {selftest_detail::bessel_wronskian(seed), selftest_detail::ssm_diagonal(seed),
          selftest_detail::waveguide_reciprocity(), selftest_detail::mie_forward()};
}

}  // namespace trbie
