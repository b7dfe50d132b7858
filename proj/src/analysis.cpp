#include "qkdguess/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

#include <omp.h>

#include "qkdguess/error.hpp"
#include "qkdguess/keyrate.hpp"
#include "qkdguess/optimize.hpp"

namespace qkdguess {

namespace {

constexpr double kUpperBracket = 0.5;
constexpr double kBracketStep = 0.05;

std::vector<double> symmetric_rates(const ProtocolConfig& config, double eps) {
  return std::vector<double>(static_cast<std::size_t>(config.t()), eps);
}

// Largest upper bracket <= 1/2 at which f is defined.
double feasible_upper(const std::function<double(double)>& f, double& f_hi) {
  for (double hi = kUpperBracket; hi > 0.0; hi -= kBracketStep) {
    try {
      f_hi = f(hi);
      return hi;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InfeasibleRates) throw;
    }
  }
  throw Error(ErrorKind::NoCrossing, "no feasible upper bracket");
}

double bracketed_root(const std::function<double(double)>& f, double xtol) {
  double f_hi = 0.0;
  const double hi = feasible_upper(f, f_hi);
  return bisect_root(f, 0.0, hi, xtol);
}

}  // namespace

void set_default_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

std::uint64_t hash_matrix(const MatrixXc& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double parts[2] = {m(i, j).real(), m(i, j).imag()};
      unsigned char bytes[sizeof(parts)];
      std::memcpy(bytes, parts, sizeof(parts));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
    }
  return h;
}

std::vector<ScatterPoint> scatter(const ProtocolConfig& config, std::size_t samples, std::uint64_t seed,
                                  Execution execution, int threads) {
  config.validate();
  std::vector<ScatterPoint> points(samples);
  const auto n = static_cast<long long>(samples);
  auto draw = [&](long long i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    ScatterPoint pt;
    pt.spectrum = random_spectrum(rng);
    const EveBasis v(haar_unitary(2 * config.t(), rng));
    pt.p_b = bob_guess_probability(pt.spectrum, config);
    pt.p_e = guessing_probability(pt.spectrum, config, v);
    pt.unitary_hash = hash_matrix(v.matrix());
    points[static_cast<std::size_t>(i)] = pt;
  };
  if (execution == Execution::Parallel) {
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (long long i = 0; i < n; ++i) draw(i);
  } else {
    for (long long i = 0; i < n; ++i) draw(i);
  }
  return points;
}

double pe_star_curve(const ProtocolConfig& config, double eps) {
  const bool bb84 = is_standard_bb84(config);
  if (!bb84 && !is_standard_sixstate(config))
    throw Error(ErrorKind::InvalidArgument, "no closed-form P_E* for this configuration");
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorKind::DomainError, "average error rate outside [0, 1]");
  if (eps > 0.5) return 1.0;
  return bb84 ? closed_form_pe_bb84(eps) : closed_form_pe_sixstate(eps);
}

double pe_star_symmetric(const ProtocolConfig& config, double eps, const CriticalOptions& options) {
  if (options.prefer_closed_form && (is_standard_bb84(config) || is_standard_sixstate(config)))
    return pe_star_curve(config, eps);
  const auto rates = symmetric_rates(config, eps);
  return maximize_guessing(config, rates, options.optimizer).p_e_star;
}

double critical_eps_guessing(const ProtocolConfig& config, const CriticalOptions& options) {
  config.validate();
  // Only the sign of the gap matters, so the optimizer may stop as soon as
  // it finds P_E >= 1 - eps.
  const auto gap = [&](double eps) {
    CriticalOptions probe = options;
    probe.optimizer.stop_above = 1.0 - eps;
    return 1.0 - eps - pe_star_symmetric(config, eps, probe);
  };
  return bracketed_root(gap, options.guessing_xtol);
}

double critical_eps_entropy(const ProtocolConfig& config, const CriticalOptions& options) {
  config.validate();
  const auto margin = [&](double eps) {
    const auto rates = symmetric_rates(config, eps);
    return secure_key_rate(config, rates).margin;
  };
  return bracketed_root(margin, options.entropy_xtol);
}

CriticalReport critical_report(const ProtocolConfig& config, const CriticalOptions& options) {
  CriticalReport rep;
  rep.eps_cr = critical_eps_guessing(config, options);
  rep.eps_tilde_cr = critical_eps_entropy(config, options);
  rep.delta_eps = rep.eps_cr - rep.eps_tilde_cr;
  rep.pe_star_at_crossing = pe_star_symmetric(config, rep.eps_cr, options);
  return rep;
}

std::vector<Table1Row> table1_scan(std::span<const double> phi1_values, const CriticalOptions& options,
                                   Execution execution) {
  CriticalOptions opts = options;
  opts.prefer_closed_form = false;
  std::vector<Table1Row> rows(phi1_values.size());
  const auto n = static_cast<long long>(phi1_values.size());
  auto column = [&](long long i) {
    const double phi1 = phi1_values[static_cast<std::size_t>(i)];
    rows[static_cast<std::size_t>(i)] = {phi1, critical_report(four_state(std::numbers::pi / 2.0, phi1), opts)};
  };
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) column(i);
  } else {
    for (long long i = 0; i < n; ++i) column(i);
  }
  return rows;
}

std::string format_scatter_csv(std::span<const ScatterPoint> points) {
  std::string out = "p_b,p_e\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", p.p_b, p.p_e);
    out += buf;
  }
  return out;
}

std::string format_table1_csv(std::span<const Table1Row> rows) {
  std::string out = "phi1,eps_cr_pct,eps_tilde_cr_pct,delta_eps_pct,pe_star\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.2f,%.2f,%.2f,%.4f\n", r.phi1, 100.0 * r.report.eps_cr,
                  100.0 * r.report.eps_tilde_cr, 100.0 * r.report.delta_eps, r.report.pe_star_at_crossing);
    out += buf;
  }
  return out;
}

}  // namespace qkdguess
