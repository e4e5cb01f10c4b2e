#pragma once

// Unit conventions used throughout the library.
//
// Energies are in micro-electronvolts (ueV).  Internally hbar = 1, so time
// carries units of hbar/ueV; one internal time unit is ~0.658 ns.  Dynamics
// are usually reported on the dimensionless axis t * lambda_R / hbar, which
// makes curves for different Rashba couplings directly comparable (the
// precession frequency omega_R = 2 lambda_R / hbar then always reads 2).

namespace dirac::units {

// hbar in ueV * s; divide an internal time by nothing, multiply by this to
// get seconds.
inline constexpr double hbar_ueV_s = 6.582119569e-10;

// One internal time unit (hbar/ueV) expressed in nanoseconds.
inline constexpr double time_unit_ns = hbar_ueV_s * 1e9;

}  // namespace dirac::units
