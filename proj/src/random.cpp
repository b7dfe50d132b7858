#include "qkdguess/random.hpp"

#include <cmath>

#include "qkdguess/error.hpp"

namespace qkdguess {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

Rng Rng::split(std::uint64_t index) const { return Rng(splitmix64(seed_ ^ splitmix64(stream_)), index); }

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

double Rng::exponential() { return std::exponential_distribution<double>(1.0)(engine_); }

MatrixXc haar_unitary(int n, Rng& rng) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "unitary dimension must be positive");
  MatrixXc z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      z(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  Eigen::HouseholderQR<MatrixXc> qr(z);
  MatrixXc q = qr.householderQ() * MatrixXc::Identity(n, n);
  const MatrixXc& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  const Complex det = q.determinant();
  q *= std::polar(1.0, -std::arg(det) / n);
  return q;
}

BellSpectrum random_spectrum(Rng& rng) {
  std::array<double, 4> l{};
  double sum = 0.0;
  for (double& x : l) {
    x = rng.exponential();
    sum += x;
  }
  for (double& x : l) x /= sum;
  return BellSpectrum(l);
}

}  // namespace qkdguess
