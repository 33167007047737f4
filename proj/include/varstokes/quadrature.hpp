#pragma once

#include <array>
#include <vector>

namespace varstokes {

/// Quadrature point in barycentric coordinates; weights sum to one, so the
/// caller multiplies by the simplex measure.
template <int N>
struct BaryPoint {
  std::array<double, N> lambda;
  double weight;
};

using TetRule = std::vector<BaryPoint<4>>;
using TriRule = std::vector<BaryPoint<3>>;

/// 14-point rule exact for polynomials of total degree 5 on tetrahedra
/// (all weights positive).
const TetRule& tet_rule_degree5();

/// 7-point rule exact for polynomials of total degree 5 on triangles.
const TriRule& tri_rule_degree5();

/// 25-point collapsed Gauss rule exact for total degree 8 on triangles.
const TriRule& tri_rule_degree8();

}  // namespace varstokes
