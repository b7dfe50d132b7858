#pragma once

// Critical error rates under the guessing and entropic criteria, the
// four-state table over phi1, and Monte Carlo P_B-versus-P_E scatter data.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qkdguess/guessing.hpp"
#include "qkdguess/protocol.hpp"
#include "qkdguess/random.hpp"

namespace qkdguess {

/// Sets the OpenMP thread count used by parallel kernels; n <= 0 keeps the default.
void set_default_threads(int n);

struct ScatterPoint {
  double p_b = 0.0;
  double p_e = 0.0;
  BellSpectrum spectrum = BellSpectrum::ideal();
  std::uint64_t unitary_hash = 0;
};

/// FNV-1a over the raw entries of a matrix.
std::uint64_t hash_matrix(const MatrixXc& m);

/// Sample i draws its spectrum and Haar V from stream (seed, i), so the
/// output does not depend on the execution mode or thread count.
std::vector<ScatterPoint> scatter(const ProtocolConfig& config, std::size_t samples, std::uint64_t seed,
                                  Execution execution = Execution::Parallel, int threads = 0);

/// Closed-form P_E* as a function of the average error rate for the
/// standard BB84 and six-state configurations, extended by 1 on (1/2, 1]
/// where random spectra can also land. Throws Error(InvalidArgument) for any
/// other configuration and Error(DomainError) outside [0, 1].
double pe_star_curve(const ProtocolConfig& config, double eps);

struct CriticalOptions {
  OptimizerOptions optimizer;
  /// Use the closed forms for standard BB84 / six-state instead of the optimizer.
  bool prefer_closed_form = true;
  double guessing_xtol = 1e-7;
  double entropy_xtol = 1e-10;
};

/// P_E* with all error rates set to eps.
double pe_star_symmetric(const ProtocolConfig& config, double eps, const CriticalOptions& options = {});

/// Root of 1 - eps - P_E*(eps) on [0, 1/2]. Throws Error(NoCrossing) when
/// the bracket has no sign change.
double critical_eps_guessing(const ProtocolConfig& config, const CriticalOptions& options = {});

/// Root of the unclamped key-rate margin on [0, 1/2].
double critical_eps_entropy(const ProtocolConfig& config, const CriticalOptions& options = {});

struct CriticalReport {
  double eps_cr = 0.0;
  double eps_tilde_cr = 0.0;
  double delta_eps = 0.0;  // eps_cr - eps_tilde_cr
  double pe_star_at_crossing = 0.0;

  bool operator==(const CriticalReport&) const = default;
};

CriticalReport critical_report(const ProtocolConfig& config, const CriticalOptions& options = {});

struct Table1Row {
  double phi1 = 0.0;
  CriticalReport report;
};

/// Four-state protocol with n1 = (pi/2, phi1) for each phi1. The guessing
/// crossing always uses the optimizer.
std::vector<Table1Row> table1_scan(std::span<const double> phi1_values, const CriticalOptions& options = {},
                                   Execution execution = Execution::Parallel);

/// Header `p_b,p_e`, 12 significant digits, LF line endings.
std::string format_scatter_csv(std::span<const ScatterPoint> points);

/// Header `phi1,eps_cr_pct,eps_tilde_cr_pct,delta_eps_pct,pe_star`;
/// percentages with two decimals, P_E* with four.
std::string format_table1_csv(std::span<const Table1Row> rows);

}  // namespace qkdguess
