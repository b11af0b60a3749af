#pragma once

namespace spindrops::tol {

// Shared numeric tolerance table.
inline constexpr double structural = 1e-12;  // algebraic identities on raw matrices
inline constexpr double basis = 1e-10;       // identities of the constructed basis
inline constexpr double simulation = 1e-9;   // end-to-end propagation checks
inline constexpr double zero_weight = 1e-12; // droplets below this weight are flagged zero
inline constexpr double rank = 1e-8;         // numerical rank / image extraction cutoff

} // namespace spindrops::tol
