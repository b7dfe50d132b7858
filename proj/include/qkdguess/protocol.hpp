#pragma once

// Protocol classes and the constraint systems that map observed error
// rates to admissible Bell spectra.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "qkdguess/quantum_states.hpp"

namespace qkdguess {

enum class ProtocolClass {
  FourState,  // t = 2, one free spectrum parameter
  SixState,   // t = 3, spectrum fixed by the three rates
  TwoTState,  // t > 3, rates beyond the third are implied by the first three
};

const char* to_string(ProtocolClass c);
ProtocolClass protocol_class_from_string(const std::string& s);

struct ProtocolConfig {
  std::vector<Direction> directions;
  std::vector<double> basis_probs;
  ProtocolClass protocol_class = ProtocolClass::FourState;

  int t() const { return static_cast<int>(directions.size()); }

  /// Throws Error(InvalidArgument) unless: t >= 2 and matches the class,
  /// direction 0 is the z axis, angles are finite, probabilities lie in
  /// [0, 1] and sum to 1 within kSpectrumTol.
  void validate() const;

  bool operator==(const ProtocolConfig&) const = default;
};

/// z and x axes, equal basis probabilities.
ProtocolConfig standard_bb84();
/// z, x and y axes, equal basis probabilities.
ProtocolConfig standard_sixstate();
/// Four-state protocol with n1 = (theta1, phi1) and equal basis probabilities.
ProtocolConfig four_state(double theta1, double phi1);

bool is_standard_bb84(const ProtocolConfig& config);
bool is_standard_sixstate(const ProtocolConfig& config);

double bob_guess_probability(const BellSpectrum& spec, const ProtocolConfig& config);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const { return lo > hi; }
  double width() const { return hi - lo; }
};

/// Bell spectra compatible with a set of error rates, written as affine
/// functions Lambda_k = offset_k + slope_k * Lambda_3 over an admissible
/// interval of Lambda_3. A fully determined spectrum has zero slopes and a
/// degenerate interval.
struct SpectrumFamily {
  std::array<double, 4> offset{};
  std::array<double, 4> slope{};
  Interval free_range;
  bool fixed = false;

  static SpectrumFamily single(const BellSpectrum& spec);

  /// Spectrum at the given Lambda_3. For a fixed family the argument is ignored.
  BellSpectrum at(double lambda3) const;
};

/// Four-state constraint system. Throws SingularDirection when
/// |sin theta1| < 1e-6 and InfeasibleRates when no Lambda_3 is admissible.
SpectrumFamily solve_protocol1(const ProtocolConfig& config, double eps0, double eps1);

/// Solves eps_i = 1 - Delta_i on the first three directions together with
/// sum Lambda = 1. Throws SingularDirection on a degenerate system and
/// InfeasibleRates when the solution is not a valid spectrum.
BellSpectrum solve_protocol2(const ProtocolConfig& config, const std::array<double, 3>& eps);

/// Error rate along direction k >= 3 implied by the first three rates.
/// Throws SingularDirection when a denominator of the coefficients is below 1e-9.
double derived_error_rate_protocol3(const ProtocolConfig& config, const std::array<double, 3>& eps012,
                                    int k);

/// Accepts one symmetric rate or one rate per basis; returns t rates.
std::vector<double> expand_error_rates(const ProtocolConfig& config, std::span<const double> eps);

/// Dispatches on the protocol class. For t > 3 the rates beyond the third
/// must agree with the derived rates to 1e-6, else InfeasibleRates.
SpectrumFamily resolve_spectra(const ProtocolConfig& config, std::span<const double> eps);

}  // namespace qkdguess
