#pragma once

#include <numbers>

namespace cmm::constants {

// CODATA 2018 (exact in the SI since 2019).
inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kBoltzmann = 1.380649e-23;     // J / K
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Ordinary frequency (Hz, i.e. omega / 2pi) to angular frequency (rad/s).
constexpr double angular(double hertz) { return kTwoPi * hertz; }

/// Angular frequency (rad/s) back to ordinary frequency (Hz).
constexpr double hertz(double angular_rate) { return angular_rate / kTwoPi; }

}  // namespace cmm::constants
