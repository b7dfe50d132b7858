#pragma once

// Two-qubit Bell-diagonal algebra: measurement kets, Bell vectors,
// correlation probabilities and per-basis error rates.

#include <array>
#include <span>

#include "qkdguess/linalg.hpp"

namespace qkdguess {

/// Tolerance on the [0, 1] bounds and unit sum of a Bell spectrum.
inline constexpr double kSpectrumTol = 1e-9;

/// Eigenvalues of a Bell-diagonal state in the order phi0..phi3.
class BellSpectrum {
 public:
  /// Throws Error(DomainError) when a value leaves [0, 1] or the sum leaves 1
  /// by more than kSpectrumTol. Values inside the tolerance band are clamped
  /// to [0, 1]; nothing is renormalized.
  explicit BellSpectrum(const std::array<double, 4>& lambda);

  static BellSpectrum ideal() { return BellSpectrum({1.0, 0.0, 0.0, 0.0}); }

  double operator[](std::size_t k) const { return lambda_[k]; }
  const std::array<double, 4>& values() const { return lambda_; }

  bool operator==(const BellSpectrum&) const = default;

 private:
  std::array<double, 4> lambda_;
};

/// Bloch-sphere direction. Alice measures along (theta, phi), Bob along
/// the mirrored (theta, -phi).
struct Direction {
  double theta = 0.0;
  double phi = 0.0;

  Direction mirrored() const { return {theta, -phi}; }
  bool finite() const;

  bool operator==(const Direction&) const = default;
};

enum class Sign { Plus, Minus };

/// |+n> = cos(t/2)|0> + sin(t/2)e^{i phi}|1>,
/// |-n> = sin(t/2)|0> - cos(t/2)e^{i phi}|1>.
Vector2c alice_ket(const Direction& dir, Sign sign);

/// alice_ket evaluated at (theta, -phi).
Vector2c bob_ket(const Direction& dir, Sign sign);

/// Bell vectors in computational order |00>,|01>,|10>,|11>:
/// phi0 = (|00>+|11>)/sqrt2, phi1 = (|00>-|11>)/sqrt2,
/// phi2 = (|01>+|10>)/sqrt2, phi3 = (|01>-|10>)/sqrt2.
/// Throws Error(InvalidArgument) for k outside 0..3.
Vector4c bell_state(int k);

/// The 4x4 matrix whose column k is bell_state(k).
Matrix4c bell_basis();

/// rho_AB = sum_k Lambda_k |phi_k><phi_k| in the computational basis.
Matrix4c bell_density(const BellSpectrum& spec);

/// Probability of equal outcomes along (dir, dir.mirrored()):
/// L0 + L1 cos^2 t + L2 sin^2 t cos^2 p + L3 sin^2 t sin^2 p.
double delta(const BellSpectrum& spec, const Direction& dir);

/// Joint probability of Alice getting `a` and Bob `b` in the basis chosen
/// with probability `weight`: (w/2) Delta for a == b, (w/2)(1 - Delta) otherwise.
double correlation(const BellSpectrum& spec, const Direction& dir, double weight, Sign a, Sign b);

/// 1 - delta.
double error_rate(const BellSpectrum& spec, const Direction& dir);

/// P_B = 1 - sum_i p_i eps_i. Throws Error(InvalidArgument) on size mismatch
/// or weights not summing to one.
double bob_guess_probability(const BellSpectrum& spec, std::span<const Direction> dirs,
                             std::span<const double> weights);

}  // namespace qkdguess
