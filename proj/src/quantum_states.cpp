#include "qkdguess/quantum_states.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qkdguess/error.hpp"

namespace qkdguess {

BellSpectrum::BellSpectrum(const std::array<double, 4>& lambda) : lambda_(lambda) {
  double sum = 0.0;
  for (double& l : lambda_) {
    if (!std::isfinite(l) || l < -kSpectrumTol || l > 1.0 + kSpectrumTol) {
      std::ostringstream os;
      os << "Bell spectrum entry " << l << " outside [0, 1]";
      throw Error(ErrorKind::DomainError, os.str());
    }
    l = std::clamp(l, 0.0, 1.0);
    sum += l;
  }
  if (std::abs(sum - 1.0) > kSpectrumTol) {
    std::ostringstream os;
    os << "Bell spectrum sums to " << sum;
    throw Error(ErrorKind::DomainError, os.str());
  }
}

bool Direction::finite() const { return std::isfinite(theta) && std::isfinite(phi); }

Vector2c alice_ket(const Direction& dir, Sign sign) {
  const double c = std::cos(dir.theta / 2.0);
  const double s = std::sin(dir.theta / 2.0);
  const Complex phase = std::polar(1.0, dir.phi);
  Vector2c ket;
  if (sign == Sign::Plus) {
    ket << c, s * phase;
  } else {
    ket << s, -c * phase;
  }
  return ket;
}

Vector2c bob_ket(const Direction& dir, Sign sign) { return alice_ket(dir.mirrored(), sign); }

Vector4c bell_state(int k) {
  const double r = 1.0 / std::sqrt(2.0);
  Vector4c v;
  switch (k) {
    case 0: v << r, 0, 0, r; break;
    case 1: v << r, 0, 0, -r; break;
    case 2: v << 0, r, r, 0; break;
    case 3: v << 0, r, -r, 0; break;
    default: throw Error(ErrorKind::InvalidArgument, "Bell index must be in 0..3");
  }
  return v;
}

Matrix4c bell_basis() {
  Matrix4c b;
  for (int k = 0; k < 4; ++k) b.col(k) = bell_state(k);
  return b;
}

Matrix4c bell_density(const BellSpectrum& spec) {
  Matrix4c rho = Matrix4c::Zero();
  for (int k = 0; k < 4; ++k) {
    const Vector4c v = bell_state(k);
    rho += spec[k] * v * v.adjoint();
  }
  return rho;
}

double delta(const BellSpectrum& spec, const Direction& dir) {
  const double c2 = std::pow(std::cos(dir.theta), 2);
  const double s2 = std::pow(std::sin(dir.theta), 2);
  const double cp2 = std::pow(std::cos(dir.phi), 2);
  const double sp2 = std::pow(std::sin(dir.phi), 2);
  return spec[0] + spec[1] * c2 + spec[2] * s2 * cp2 + spec[3] * s2 * sp2;
}

double correlation(const BellSpectrum& spec, const Direction& dir, double weight, Sign a, Sign b) {
  const double d = delta(spec, dir);
  return weight / 2.0 * (a == b ? d : 1.0 - d);
}

double error_rate(const BellSpectrum& spec, const Direction& dir) { return 1.0 - delta(spec, dir); }

double bob_guess_probability(const BellSpectrum& spec, std::span<const Direction> dirs,
                             std::span<const double> weights) {
  if (dirs.size() != weights.size() || dirs.empty())
    throw Error(ErrorKind::InvalidArgument, "directions and basis probabilities differ in length");
  double wsum = 0.0;
  double p = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    wsum += weights[i];
    p += weights[i] * (1.0 - error_rate(spec, dirs[i]));
  }
  if (std::abs(wsum - 1.0) > kSpectrumTol)
    throw Error(ErrorKind::InvalidArgument, "basis probabilities do not sum to 1");
  return p;
}

}  // namespace qkdguess
