#pragma once

#include <cstdint>
#include <string>

#include "phasegate/unitary.hpp"

namespace phasegate {

/// 2x2 Hadamard, (1/sqrt2) [[1,1],[1,-1]].
ComplexMatrix hadamard2();
/// 3x3 balanced tritter with omega = exp(+i 2 pi / 3); equals the 3-point
/// inverse DFT and is often written H3.
ComplexMatrix hadamard3();
/// N-point unitary DFT as a gate target.
ComplexMatrix dft_target(int n);
/// Diag(1, w, w^2, ...) with w = exp(i 2 pi / n).
ComplexMatrix clock_target(int n);
/// Haar-random unitary (QR of a complex Gaussian with phase-fixed R).
ComplexMatrix haar_random_unitary(int n, std::uint64_t seed);

/// Resolve a target by CLI name: identity | hadamard2 | hadamard3 | dft |
/// clock | random-haar. `n` sizes the parameterized families; `seed` feeds
/// random-haar.
ComplexMatrix target_by_name(const std::string& name, int n, std::uint64_t seed);

}  // namespace phasegate
