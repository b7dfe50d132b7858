#pragma once

// Entropic security criterion: mutual information, Eve's conditional-state
// spectrum, Holevo quantity and the asymptotic secure key rate.

#include <optional>
#include <span>

#include "qkdguess/protocol.hpp"
#include "qkdguess/quantum_states.hpp"

namespace qkdguess {

/// h(x) in bits with 0 log 0 = 0. Throws Error(DomainError) outside [0, 1].
double binary_entropy(double x);

/// Shannon entropy in bits of a probability vector.
double shannon_entropy(std::span<const double> p);

struct MutualInformation {
  double i_ab = 0.0;                 // includes the basis-choice entropy H(p)
  double i_ab_basis_deducted = 0.0;  // 1 - sum_i p_i h(eps_i)
};

MutualInformation mutual_information(const ProtocolConfig& config, std::span<const double> eps);

struct ConditionalEigenvalues {
  double plus = 1.0;
  double minus = 0.0;
};

/// Eigenvalues [1 +- sqrt(xi + eta)]/2 of Eve's normalized state conditioned
/// on Alice's outcome along `dir` (identical for both outcomes).
ConditionalEigenvalues conditional_eigenvalues(const BellSpectrum& spec, const Direction& dir);

/// chi_AE = H(Lambda) - sum_i p_i h(lambda_i^+).
double holevo(const BellSpectrum& spec, const ProtocolConfig& config);

struct EntropyReport {
  double i_ab = 0.0;
  double i_ab_basis_deducted = 0.0;
  double chi_ae = 0.0;
  double rate = 0.0;    // max(margin, 0)
  double margin = 0.0;  // i_ab_basis_deducted - chi_ae before clamping
  std::optional<double> optimizing_lambda3;

  bool operator==(const EntropyReport&) const = default;
};

/// R = max{I_AB' - max chi_AE, 0}. For the four-state class chi is
/// maximized over Lambda_3 (65-point grid, then golden section to 1e-10).
EntropyReport secure_key_rate(const ProtocolConfig& config, std::span<const double> eps);

}  // namespace qkdguess
