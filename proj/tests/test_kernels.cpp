#include <gtest/gtest.h>

#include <chrono>

#include "trbie/kernels.hpp"
#include "trbie/rng.hpp"

using namespace trbie;

namespace {

// Plain modal sum with f_0 = 1/2, f_l = 1 (2000 terms).
cplx naive_modal_sum(Vec2 x, Vec2 y, cplx k, int terms = 2000) {
  cplx s = 0.0;
  const double d = std::abs(x.y - y.y);
  for (int l = 0; l < terms; ++l) {
    const double a = l * std::numbers::pi;
    const cplx g = special::gamma_l(l, k);
    s += (l == 0 ? 0.5 : 1.0) / g * std::cos(a * (x.x + 0.5)) * std::cos(a * (y.x + 0.5)) * std::exp(-g * d);
  }
  return s;
}

Vec2 strip_point(const CounterRng& rng, std::uint64_t i) {
  return {-0.49 + 0.98 * rng.uniform(2 * i), -1.0 + 2.0 * rng.uniform(2 * i + 1)};
}

}  // namespace

TEST(FreeSpaceKernel, DerivativesMatchFiniteDifferences) {
  const cplx k(3.0, -0.4);
  const Vec2 x{0.3, 0.1}, y{-0.2, 0.25};
  const Vec2 nx{0.6, 0.8}, ny{-1.0, 0.0};
  const double h = 1e-5;
  for (auto mode : {KernelMode::outgoing, KernelMode::incoming}) {
    const auto s = freespace_sample(k, mode, x, y, nx, ny);
    EXPECT_LT(std::abs(s.g - g2(x, y, k, mode)), 1e-15);
    const cplx dny = (g2(x, y + h * ny, k, mode) - g2(x, y - h * ny, k, mode)) / (2 * h);
    const cplx dnx = (g2(x + h * nx, y, k, mode) - g2(x - h * nx, y, k, mode)) / (2 * h);
    EXPECT_LT(std::abs(s.dny - dny), 1e-8);
    EXPECT_LT(std::abs(s.dnx - dnx), 1e-8);
    const cplx hyp = (g2_grad_x_dot_n(x, y + h * ny, nx, k, mode) - g2_grad_x_dot_n(x, y - h * ny, nx, k, mode)) / (2 * h);
    EXPECT_LT(std::abs(s.hyper - hyp), 1e-7);
  }
}

TEST(FreeSpaceKernel, IncomingIsConjugateOfOutgoingForRealK) {
  const Vec2 x{0.1, 0.2}, y{0.7, -0.3};
  const cplx a = g2(x, y, 4.0, KernelMode::outgoing), b = g2(x, y, 4.0, KernelMode::incoming);
  EXPECT_LT(std::abs(b - std::conj(a)), 1e-15);
  // and in general G_in(conj k) = conj G_out(k)
  const cplx k(4.0, -0.7);
  EXPECT_LT(std::abs(g2(x, y, std::conj(k), KernelMode::incoming) - std::conj(g2(x, y, k, KernelMode::outgoing))), 1e-14);
  EXPECT_THROW(g2(x, x, k, KernelMode::outgoing), SingularityError);
}

TEST(FreeSpaceKernel, HelmholtzEquationByFiniteDifferences) {
  // -(Delta + k^2) G = 0 away from the source
  const cplx k(2.5, 0.3);
  const Vec2 x{0.4, 0.3}, y{0, 0};
  const double h = 1e-3;
  const auto G = [&](Vec2 p) { return g2(p, y, k, KernelMode::outgoing); };
  const cplx lap = (G({x.x + h, x.y}) + G({x.x - h, x.y}) + G({x.x, x.y + h}) + G({x.x, x.y - h}) - 4.0 * G(x)) / (h * h);
  EXPECT_LT(std::abs(lap + k * k * G(x)), 1e-5);
}

TEST(WaveguideKernel, ReciprocityWallNeumannAndNaiveSum) {
  const auto t0 = std::chrono::steady_clock::now();
  const CounterRng rng(21, 0);
  for (const cplx k : {cplx(2.0, 0.0), cplx(5.5, 0.0), cplx(6.0, -0.3), cplx(4.0, 0.5), cplx(9.7, 0.0)}) {
    const WaveguideGreen G(k);
    double worst_rec = 0.0, worst_wall = 0.0, worst_naive = 0.0;
    for (std::uint64_t i = 0; i < 200; ++i) {
      const Vec2 x = strip_point(rng, 2 * i), y = strip_point(rng, 2 * i + 1);
      const auto gxy = G.eval(x, y), gyx = G.eval(y, x);
      worst_rec = std::max(worst_rec, std::abs(gxy.g - gyx.g) / std::abs(gxy.g));
      // d/dx1 at the walls x1 = +-1/2
      for (double wall : {-0.5, 0.5}) {
        const auto w = G.eval({wall, x.y}, y);
        worst_wall = std::max(worst_wall, std::abs(w.grad_x[0]) / (std::abs(w.g) + std::abs(w.grad_x[1])));
      }
      // modal sum at |x2 - y2| = 0.5
      const Vec2 x5{x.x, y.y + (i % 2 ? 0.5 : -0.5)};
      const cplx ref = naive_modal_sum(x5, y, k);
      worst_naive = std::max(worst_naive, std::abs(G.eval(x5, y).g - ref) / std::abs(ref));
    }
    SCOPED_TRACE(testing::Message() << "k=" << k);
    EXPECT_LT(worst_rec, 1e-10);
    EXPECT_LT(worst_wall, 1e-10);
    EXPECT_LT(worst_naive, 1e-9);
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 30.0);
}

TEST(WaveguideKernel, KummerAndDirectPathsAgreeAtTheSwitch) {
  const WaveguideGreen G(cplx(5.0, -0.2));
  const double s = WaveguideGreen::kKummerSeparation;
  const Vec2 y{0.1, 0.0};
  const auto a = G.eval({-0.2, s - 1e-9}, y), b = G.eval({-0.2, s + 1e-9}, y);
  // first-order Taylor correction across the 2e-9 gap
  EXPECT_LT(std::abs(b.g - a.g - 2e-9 * a.grad_x[1]), 1e-12 * std::abs(a.g));
  EXPECT_LT(std::abs(b.grad_x[1] - a.grad_x[1]), 1e-7 * std::abs(a.grad_x[1]));
  EXPECT_GT(b.modes, a.modes);  // the two evaluations really took different paths
}

TEST(WaveguideKernel, SingularPartMatchesFreeSpaceNearSource) {
  // G1 - G0 is smooth: its value changes slowly as x -> y
  const cplx k(4.0, 0.0);
  const WaveguideGreen G(k);
  const Vec2 y{0.05, 0.0};
  auto diff = [&](double r) { return G.eval({y.x + r, y.y}, y).g - g2({y.x + r, y.y}, y, k, KernelMode::outgoing); };
  EXPECT_LT(std::abs(diff(1e-4) - diff(2e-4)), 1e-3);
  EXPECT_LT(std::abs(diff(1e-6) - diff(2e-6)), 1e-5);
}

TEST(WaveguideKernel, DerivativesMatchFiniteDifferences) {
  const WaveguideGreen G(cplx(5.2, -0.1));
  const Vec2 x{0.2, 0.15}, y{-0.3, -0.1};
  const double h = 1e-5;
  const auto v = G.eval(x, y);
  for (int c = 0; c < 2; ++c) {
    const Vec2 e = c == 0 ? Vec2{h, 0} : Vec2{0, h};
    const cplx gx = (G.eval(x + e, y).g - G.eval(x - e, y).g) / (2 * h);
    const cplx gy = (G.eval(x, y + e).g - G.eval(x, y - e).g) / (2 * h);
    EXPECT_LT(std::abs(v.grad_x[c] - gx), 1e-7);
    EXPECT_LT(std::abs(v.grad_y[c] - gy), 1e-7);
  }
  EXPECT_THROW(G.eval(x, x), SingularityError);
  EXPECT_THROW(WaveguideGreen(cplx(std::numbers::pi, 0.0)), BranchCutError);
}
