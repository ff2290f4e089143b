#pragma once

// Independent cross-checks for the LP machinery: a closed form for the
// binary case, random interior points, and brute-force vertex enumeration.

#include "pobounds/compile.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace pobounds {

// Bounds on P(Y_0 = 0, Y_1 = 1) for binary X, Y under exogeneity, given
// p1 = P(Y = 1 | X = 1) and p0 = P(Y = 1 | X = 0).
std::pair<double, double> tian_pearl_pns_bounds(double p1, double p0);

// n points from a hit-and-run walk inside the polytope, started from a
// relative-interior point. Throws ContradictionError when infeasible.
std::vector<std::vector<double>> random_feasible_points(const ConstraintSet& constraints, std::size_t n,
                                                        std::uint64_t seed);

inline constexpr std::size_t kVertexEnumerationLimit = 12;

// Basic feasible solutions by exhaustive basis enumeration. Throws SizeError
// above kVertexEnumerationLimit variables; returns an empty list when the
// system is infeasible.
std::vector<std::vector<double>> vertex_enumerate_small(const ConstraintSet& constraints);

}  // namespace pobounds
