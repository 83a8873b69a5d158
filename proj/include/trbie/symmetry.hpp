#pragma once
/// Mirror symmetry x1 -> -x1 of a boundary mesh and parity of density vectors.

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "trbie/geometry.hpp"

namespace trbie {

/**
 * perm[i] = index of the panel whose midpoint is the mirror image of panel
 * i's midpoint, or nullopt when the mesh is not mirror symmetric.
 */
inline std::optional<std::vector<std::size_t>> mirror_permutation(const BoundaryMesh& mesh, double tol = 1e-9) {
  const std::size_t n = mesh.size();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 m{-mesh.panels[i].mid.x, mesh.panels[i].mid.y};
    const double scale = tol * std::max(1.0, mesh.panels[i].length);
    bool found = false;
    for (std::size_t j = 0; j < n && !found; ++j)
      if (norm(mesh.panels[j].mid - m) < scale) {
        perm[i] = j;
        found = true;
      }
    if (!found) return std::nullopt;
  }
  return perm;
}

/**
 * Parity of an interleaved (u, q) density: +1 when it is closer to its mirror
 * image than to minus its mirror image. u and S du/dn pick up the same sign
 * under reflection because the outward normal is mirrored with the boundary.
 */
inline int mirror_parity(const Eigen::VectorXcd& v, const std::vector<std::size_t>& perm) {
  double even = 0.0, odd = 0.0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (int c = 0; c < 2; ++c) {
      const auto a = v(2 * i + c), b = v(2 * perm[i] + c);
      even += std::norm(a - b);
      odd += std::norm(a + b);
    }
  return even <= odd ? 1 : -1;
}

}  // namespace trbie
