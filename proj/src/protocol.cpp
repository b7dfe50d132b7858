#include "qkdguess/protocol.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qkdguess/error.hpp"

namespace qkdguess {

namespace {

constexpr double kSingularSin = 1e-6;
constexpr double kSingularDenominator = 1e-9;
constexpr double kProtocol3Consistency = 1e-6;

void require_class(const ProtocolConfig& config, bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, std::string(what) + " given a " + to_string(config.protocol_class) + " config");
}

void check_rate(double eps) {
  if (!std::isfinite(eps) || eps < 0.0 || eps > 1.0) {
    std::ostringstream os;
    os << "error rate " << eps << " outside [0, 1]";
    throw Error(ErrorKind::InfeasibleRates, os.str());
  }
}

// Coefficients of Delta along `dir` as a linear form in Lambda.
std::array<double, 4> delta_row(const Direction& dir) {
  const double c2 = std::pow(std::cos(dir.theta), 2);
  const double s2 = std::pow(std::sin(dir.theta), 2);
  return {1.0, c2, s2 * std::pow(std::cos(dir.phi), 2), s2 * std::pow(std::sin(dir.phi), 2)};
}

bool near(double a, double b) { return std::abs(a - b) < 1e-12; }

}  // namespace

const char* to_string(ProtocolClass c) {
  switch (c) {
    case ProtocolClass::FourState: return "FourState";
    case ProtocolClass::SixState: return "SixState";
    case ProtocolClass::TwoTState: return "TwoTState";
  }
  return "Unknown";
}

ProtocolClass protocol_class_from_string(const std::string& s) {
  if (s == "FourState") return ProtocolClass::FourState;
  if (s == "SixState") return ProtocolClass::SixState;
  if (s == "TwoTState") return ProtocolClass::TwoTState;
  throw Error(ErrorKind::InvalidArgument, "unknown protocol class '" + s + "'");
}

void ProtocolConfig::validate() const {
  const int n = t();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "a protocol needs at least two bases");
  const bool class_ok = (protocol_class == ProtocolClass::FourState && n == 2) ||
                        (protocol_class == ProtocolClass::SixState && n == 3) ||
                        (protocol_class == ProtocolClass::TwoTState && n > 3);
  if (!class_ok) {
    std::ostringstream os;
    os << to_string(protocol_class) << " is incompatible with t = " << n;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  if (basis_probs.size() != directions.size())
    throw Error(ErrorKind::InvalidArgument, "basis_probs and directions differ in length");
  for (const auto& d : directions)
    if (!d.finite()) throw Error(ErrorKind::InvalidArgument, "non-finite direction angle");
  if (std::abs(directions[0].theta) > kSpectrumTol || std::abs(directions[0].phi) > kSpectrumTol)
    throw Error(ErrorKind::InvalidArgument, "direction 0 must be the z axis (theta = phi = 0)");
  double sum = 0.0;
  for (double p : basis_probs) {
    if (!std::isfinite(p) || p < -kSpectrumTol || p > 1.0 + kSpectrumTol)
      throw Error(ErrorKind::InvalidArgument, "basis probability outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSpectrumTol)
    throw Error(ErrorKind::InvalidArgument, "basis probabilities do not sum to 1");
}

ProtocolConfig standard_bb84() { return four_state(std::numbers::pi / 2.0, 0.0); }

ProtocolConfig standard_sixstate() {
  const double h = std::numbers::pi / 2.0;
  return {{{0.0, 0.0}, {h, 0.0}, {h, h}}, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, ProtocolClass::SixState};
}

ProtocolConfig four_state(double theta1, double phi1) {
  return {{{0.0, 0.0}, {theta1, phi1}}, {0.5, 0.5}, ProtocolClass::FourState};
}

bool is_standard_bb84(const ProtocolConfig& config) {
  const auto ref = standard_bb84();
  if (config.t() != 2 || config.protocol_class != ref.protocol_class) return false;
  for (int i = 0; i < 2; ++i) {
    if (!near(config.directions[i].theta, ref.directions[i].theta) ||
        !near(config.directions[i].phi, ref.directions[i].phi) ||
        !near(config.basis_probs[i], ref.basis_probs[i]))
      return false;
  }
  return true;
}

bool is_standard_sixstate(const ProtocolConfig& config) {
  const auto ref = standard_sixstate();
  if (config.t() != 3 || config.protocol_class != ref.protocol_class) return false;
  for (int i = 0; i < 3; ++i) {
    if (!near(config.directions[i].theta, ref.directions[i].theta) ||
        !near(config.directions[i].phi, ref.directions[i].phi) ||
        !near(config.basis_probs[i], ref.basis_probs[i]))
      return false;
  }
  return true;
}

double bob_guess_probability(const BellSpectrum& spec, const ProtocolConfig& config) {
  return bob_guess_probability(spec, config.directions, config.basis_probs);
}

SpectrumFamily SpectrumFamily::single(const BellSpectrum& spec) {
  SpectrumFamily f;
  f.offset = spec.values();
  f.free_range = {spec[3], spec[3]};
  f.fixed = true;
  return f;
}

BellSpectrum SpectrumFamily::at(double lambda3) const {
  if (fixed) return BellSpectrum(offset);
  std::array<double, 4> l{};
  for (int k = 0; k < 4; ++k) l[k] = offset[k] + slope[k] * lambda3;
  return BellSpectrum(l);
}

SpectrumFamily solve_protocol1(const ProtocolConfig& config, double eps0, double eps1) {
  require_class(config, config.protocol_class == ProtocolClass::FourState, "solve_protocol1");
  check_rate(eps0);
  check_rate(eps1);
  const Direction& n1 = config.directions.at(1);
  const double s = std::sin(n1.theta);
  if (std::abs(s) < kSingularSin)
    throw Error(ErrorKind::SingularDirection, "sin(theta1) vanishes; the four-state system is undefined");
  const double s2 = s * s;
  const double cot2 = std::pow(std::cos(n1.theta), 2) / s2;
  const double cphi2 = std::pow(std::cos(n1.phi), 2);

  SpectrumFamily f;
  f.offset[0] = 1.0 - (cphi2 - cot2) * eps0 - eps1 / s2;
  f.slope[0] = std::cos(2.0 * n1.phi);
  f.offset[1] = 1.0 - eps0 - f.offset[0];
  f.slope[1] = -f.slope[0];
  f.offset[2] = eps0;
  f.slope[2] = -1.0;
  f.offset[3] = 0.0;
  f.slope[3] = 1.0;

  // Intersect 0 <= offset + slope * x <= 1 over the four components.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    const double a = f.offset[k];
    const double b = f.slope[k];
    if (std::abs(b) < 1e-14) {
      if (a < -kSpectrumTol || a > 1.0 + kSpectrumTol) {
        lo = 1.0;
        hi = 0.0;
        break;
      }
      continue;
    }
    double x0 = (0.0 - a) / b;
    double x1 = (1.0 - a) / b;
    if (x0 > x1) std::swap(x0, x1);
    lo = std::max(lo, x0);
    hi = std::min(hi, x1);
  }
  if (lo > hi + kSpectrumTol) {
    std::ostringstream os;
    os << "no admissible spectrum for eps0 = " << eps0 << ", eps1 = " << eps1;
    throw Error(ErrorKind::InfeasibleRates, os.str());
  }
  if (lo > hi) lo = hi = 0.5 * (lo + hi);
  f.free_range = {lo, hi};
  return f;
}

BellSpectrum solve_protocol2(const ProtocolConfig& config, const std::array<double, 3>& eps) {
  require_class(config, config.t() >= 3, "solve_protocol2");
  for (double e : eps) check_rate(e);
  Eigen::Matrix4d a;
  Eigen::Vector4d b;
  a.row(0).setOnes();
  b(0) = 1.0;
  for (int i = 0; i < 3; ++i) {
    const auto r = delta_row(config.directions[i]);
    a.row(i + 1) << r[0], r[1], r[2], r[3];
    b(i + 1) = 1.0 - eps[i];
  }
  if (std::abs(a.determinant()) < kSingularDenominator)
    throw Error(ErrorKind::SingularDirection, "the first three directions do not determine the spectrum");
  const Eigen::Vector4d l = a.partialPivLu().solve(b);
  try {
    return BellSpectrum({l(0), l(1), l(2), l(3)});
  } catch (const Error&) {
    std::ostringstream os;
    os << "rates (" << eps[0] << ", " << eps[1] << ", " << eps[2] << ") imply an invalid spectrum ("
       << l(0) << ", " << l(1) << ", " << l(2) << ", " << l(3) << ")";
    throw Error(ErrorKind::InfeasibleRates, os.str());
  }
}

double derived_error_rate_protocol3(const ProtocolConfig& config, const std::array<double, 3>& eps012,
                                    int k) {
  if (k < 3 || k >= config.t()) throw Error(ErrorKind::InvalidArgument, "derived rate index must satisfy 3 <= k < t");
  const Direction& n1 = config.directions[1];
  const Direction& n2 = config.directions[2];
  const Direction& nk = config.directions[k];
  const double common = std::sin(n1.phi - n2.phi) * std::sin(n1.phi + n2.phi);
  const double den1 = std::pow(std::sin(n1.theta), 2) * common;
  const double den2 = std::pow(std::sin(n2.theta), 2) * common;
  if (std::abs(den1) < kSingularDenominator || std::abs(den2) < kSingularDenominator)
    throw Error(ErrorKind::SingularDirection, "directions 1 and 2 leave the derived-rate coefficients undefined");
  const double sk2 = std::pow(std::sin(nk.theta), 2);
  const double d1 = sk2 * std::sin(n2.phi - nk.phi) * std::sin(n2.phi + nk.phi) / den1;
  const double d2 = sk2 * std::sin(n1.phi - nk.phi) * std::sin(n1.phi + nk.phi) / den2;
  return (1.0 + d1 - d2) * eps012[0] - d1 * eps012[1] + d2 * eps012[2];
}

std::vector<double> expand_error_rates(const ProtocolConfig& config, std::span<const double> eps) {
  const auto t = static_cast<std::size_t>(config.t());
  std::vector<double> out;
  if (eps.size() == 1) {
    out.assign(t, eps[0]);
  } else if (eps.size() == t) {
    out.assign(eps.begin(), eps.end());
  } else {
    std::ostringstream os;
    os << "expected 1 or " << t << " error rates, got " << eps.size();
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  for (double e : out) check_rate(e);
  return out;
}

SpectrumFamily resolve_spectra(const ProtocolConfig& config, std::span<const double> eps) {
  config.validate();
  const auto rates = expand_error_rates(config, eps);
  switch (config.protocol_class) {
    case ProtocolClass::FourState:
      return solve_protocol1(config, rates[0], rates[1]);
    case ProtocolClass::SixState:
      return SpectrumFamily::single(solve_protocol2(config, {rates[0], rates[1], rates[2]}));
    case ProtocolClass::TwoTState: {
      const std::array<double, 3> first{rates[0], rates[1], rates[2]};
      for (int k = 3; k < config.t(); ++k) {
        const double implied = derived_error_rate_protocol3(config, first, k);
        if (std::abs(implied - rates[k]) > kProtocol3Consistency) {
          std::ostringstream os;
          os << "eps_" << k << " = " << rates[k] << " but the first three rates imply " << implied;
          throw Error(ErrorKind::InfeasibleRates, os.str());
        }
      }
      return SpectrumFamily::single(solve_protocol2(config, first));
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown protocol class");
}

}  // namespace qkdguess
