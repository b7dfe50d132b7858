#include "qkdguess/keyrate.hpp"

#include <algorithm>
#include <cmath>

#include "qkdguess/error.hpp"
#include "qkdguess/optimize.hpp"

namespace qkdguess {

namespace {

constexpr int kLambda3Grid = 65;
constexpr double kLambda3Tol = 1e-10;
constexpr double kNegativeRateClamp = 1e-12;

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::DomainError, "binary entropy argument outside [0, 1]");
  return -plogp(x) - plogp(1.0 - x);
}

double shannon_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) h -= plogp(x);
  return h;
}

MutualInformation mutual_information(const ProtocolConfig& config, std::span<const double> eps) {
  config.validate();
  const auto rates = expand_error_rates(config, eps);
  double deducted = 1.0;
  for (std::size_t i = 0; i < rates.size(); ++i) deducted -= config.basis_probs[i] * binary_entropy(rates[i]);
  return {deducted + shannon_entropy(config.basis_probs), deducted};
}

ConditionalEigenvalues conditional_eigenvalues(const BellSpectrum& spec, const Direction& dir) {
  const double mu_p = spec[0] + spec[1];
  const double mu_m = spec[0] - spec[1];
  const double nu_p = spec[2] + spec[3];
  const double nu_m = spec[2] - spec[3];
  const double xi = std::pow(mu_p - nu_p, 2) * std::pow(std::cos(dir.theta), 2);
  const double eta = (mu_m * mu_m + nu_m * nu_m + 2.0 * mu_m * nu_m * std::cos(2.0 * dir.phi)) *
                     std::pow(std::sin(dir.theta), 2);
  const double r = std::min(1.0, std::sqrt(std::max(0.0, xi + eta)));
  return {(1.0 + r) / 2.0, (1.0 - r) / 2.0};
}

double holevo(const BellSpectrum& spec, const ProtocolConfig& config) {
  double chi = shannon_entropy(spec.values());
  for (int i = 0; i < config.t(); ++i)
    chi -= config.basis_probs[i] * binary_entropy(conditional_eigenvalues(spec, config.directions[i]).plus);
  return chi;
}

EntropyReport secure_key_rate(const ProtocolConfig& config, std::span<const double> eps) {
  const SpectrumFamily family = resolve_spectra(config, eps);
  const MutualInformation mi = mutual_information(config, eps);

  EntropyReport rep;
  rep.i_ab = mi.i_ab;
  rep.i_ab_basis_deducted = mi.i_ab_basis_deducted;
  if (family.fixed) {
    rep.chi_ae = holevo(family.at(0.0), config);
  } else {
    const auto chi = [&](double l3) { return holevo(family.at(l3), config); };
    const ScalarMax best =
        grid_then_golden_max(chi, family.free_range.lo, family.free_range.hi, kLambda3Grid, kLambda3Tol);
    rep.chi_ae = best.value;
    rep.optimizing_lambda3 = best.x;
  }
  rep.margin = rep.i_ab_basis_deducted - rep.chi_ae;
  double rate = rep.margin;
  if (rate < 0.0 && rate >= -kNegativeRateClamp) rate = 0.0;
  rep.rate = std::max(rate, 0.0);
  return rep;
}

}  // namespace qkdguess
