#pragma once

#include <cstdint>

#include "msvis/view.hpp"

namespace msvis {

inline constexpr int kDefaultLayoutIterations = 300;
inline constexpr std::uint64_t kDefaultLayoutSeed = 1;
// Minimum Euclidean distance between any two laid-out nodes.
inline constexpr double kMinSeparation = 0.01;

// Seeded force-directed 3D layout, normalized into [-1, 1]^3.
//
// Springs pull along edges with a rest length of 1/dependency_count, every
// pair repels with an inverse-square force and a weak pull toward the origin
// keeps disconnected parts together. Integration uses a fixed step count with
// a linearly cooling displacement cap. A final pass pushes apart any pair
// closer than kMinSeparation.
//
// The result depends only on (view, seed, iterations): iteration order is
// fixed, the generator is std::mt19937_64 with a hand-rolled real mapping and
// no transcendental functions are used, so output is bitwise reproducible on
// IEEE-754 targets built without floating-point contraction.
//
// Throws EmptyView for a view without nodes.
LayoutResult Layout3d(const View& view, std::uint64_t seed,
                      int iterations = kDefaultLayoutIterations);

}  // namespace msvis
