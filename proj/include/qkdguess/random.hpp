#pragma once

// Seeded, splittable random streams and the samplers used for Monte Carlo
// scatter data and optimizer restarts.

#include <cstdint>
#include <random>

#include "qkdguess/linalg.hpp"
#include "qkdguess/quantum_states.hpp"

namespace qkdguess {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// A mt19937_64 stream. Streams derived from the same master seed with
/// different indices are independent of each other and of evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Child stream `index` of this generator's (seed, stream) pair.
  Rng split(std::uint64_t index) const;

  double uniform();  // [0, 1)
  double normal();   // N(0, 1)
  double exponential();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// Haar-random element of SU(n): complex Ginibre matrix, Householder QR
/// with the phases of R's diagonal moved into Q, then the determinant
/// phase removed.
MatrixXc haar_unitary(int n, Rng& rng);

/// Uniform point of the 3-simplex via normalized exponentials.
BellSpectrum random_spectrum(Rng& rng);

}  // namespace qkdguess
