#pragma once

#include <cstddef>

namespace mmc {

namespace tol {
inline constexpr double kTriangle = 1e-9;       // metric validation slack
inline constexpr double kAtomMerge = 1e-12;     // pushforward atom merge radius
inline constexpr double kBoundary = 1e-13;      // disk model boundary margin
inline constexpr double kRoundTrip = 1e-10;     // exp/log inverse pair
inline constexpr double kBarycenter = 1e-10;    // fixed point residual
inline constexpr double kMass = 1e-12;          // mass preservation
inline constexpr double kLipschitz = 1e-9;      // audit slack on d_Y <= L d_X
inline constexpr double kInvariant = 1e-9;      // inequality margin floor
}  // namespace tol

// Exact-mode enumeration limits shared by the observables and the families
// that feed them.
inline constexpr std::size_t kAlphaExactLimit = 20;
inline constexpr std::size_t kPartialDiamEnumLimit = 20;
inline constexpr std::size_t kSeparationExactLimit = 13;

}  // namespace mmc
