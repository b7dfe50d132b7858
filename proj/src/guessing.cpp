#include "qkdguess/guessing.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <sstream>

#include <omp.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "qkdguess/error.hpp"
#include "qkdguess/optimize.hpp"
#include "qkdguess/random.hpp"

namespace qkdguess {

namespace {

constexpr double kUnitarityTol = 1e-9;
constexpr double kRestartAgreement = 1e-4;

void require_eve_dimension(const EveBasis& v, const ProtocolConfig& config) {
  if (v.dimension() != 2 * config.t()) {
    std::ostringstream os;
    os << "Eve basis has dimension " << v.dimension() << " but the protocol needs " << 2 * config.t();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

MatrixXc special(MatrixXc u) {
  const Complex det = u.determinant();
  u *= std::polar(1.0, -std::arg(det) / static_cast<double>(u.rows()));
  return u;
}

// Traceless skew-Hermitian matrix from n^2 - 1 real coordinates.
MatrixXc su_generator(const Eigen::VectorXd& x, int n) {
  MatrixXc h = MatrixXc::Zero(n, n);
  int p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Complex z(x(p), x(p + 1));
      p += 2;
      h(i, j) = z;
      h(j, i) = -std::conj(z);
    }
  double last = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    h(i, i) = Complex(0.0, x(p));
    last -= x(p);
    ++p;
  }
  h(n - 1, n - 1) = Complex(0.0, last);
  return h;
}

using Isometry = GuessingKernel::Isometry;

struct Restart {
  double value = -1.0;
  Isometry isometry;
  bool converged = false;
};

Restart polar_ascent(const GuessingKernel& kernel, Isometry w, const OptimizerOptions& opt) {
  Restart r;
  Isometry grad;
  double prev = -1.0;
  const double stop = opt.stop_above.value_or(std::numeric_limits<double>::infinity());
  for (int it = 0; it < opt.max_evaluations; ++it) {
    const double cur = kernel.gradient(w, grad);
    if (cur > stop) {
      r.value = cur;
      r.isometry = std::move(w);
      return r;
    }
    if (cur - prev < opt.ascent_tol) {
      r.converged = true;
      break;
    }
    prev = cur;
    w = GuessingKernel::polar(grad);
  }
  // w is the last iterate, possibly one step past the last evaluation.
  r.value = kernel.evaluate(w);
  r.isometry = std::move(w);
  return r;
}

Restart simplex_search(const GuessingKernel& kernel, const MatrixXc& base, const OptimizerOptions& opt) {
  const auto n = static_cast<int>(base.rows());
  auto rotated = [&](const Eigen::VectorXd& x) -> Isometry {
    // V = V0 exp(H); the rotated vectors are the columns of conj(V).
    const MatrixXc v = base * su_generator(x, n).exp();
    return v.conjugate().leftCols(4);
  };
  SimplexOptions so;
  so.ftol = opt.ftol;
  so.xtol = opt.xtol;
  so.max_evaluations = opt.max_evaluations;
  const auto res = nelder_mead_max([&](const Eigen::VectorXd& x) { return kernel.evaluate(rotated(x)); },
                                   Eigen::VectorXd::Zero(n * n - 1), so);
  return {res.value, rotated(res.x), res.converged};
}

}  // namespace

EveBasis::EveBasis(MatrixXc v) : v_(std::move(v)) {
  if (v_.rows() != v_.cols() || v_.rows() == 0) throw Error(ErrorKind::InvalidArgument, "Eve basis must be a square matrix");
  if (unitarity_defect(v_) >= kUnitarityTol) throw Error(ErrorKind::InvalidArgument, "Eve basis is not unitary");
}

EveBasis EveBasis::from_rotated_vectors(const MatrixXc& rotated) { return EveBasis(rotated.conjugate()); }

EveBasis EveBasis::from_isometry(const MatrixXc& isometry) {
  const auto n = isometry.rows();
  const auto m = isometry.cols();
  if (m > n) throw Error(ErrorKind::DimensionMismatch, "isometry has more columns than rows");
  MatrixXc u(n, n);
  u.leftCols(m) = isometry;
  if (m < n) {
    Eigen::HouseholderQR<MatrixXc> qr(isometry);
    const MatrixXc q = qr.householderQ() * MatrixXc::Identity(n, n);
    u.rightCols(n - m) = q.rightCols(n - m);
    // phase of the last completed column sets det = 1
    u.col(n - 1) *= std::polar(1.0, -std::arg(u.determinant()));
    return from_rotated_vectors(u);
  }
  return from_rotated_vectors(special(u));
}

VectorXc Purification::amplitudes() const {
  VectorXc out(psi_.size());
  for (Eigen::Index i = 0; i < psi_.rows(); ++i)
    for (Eigen::Index e = 0; e < psi_.cols(); ++e) out(i * psi_.cols() + e) = psi_(i, e);
  return out;
}

Matrix4c Purification::reduced_ab() const { return psi_ * psi_.adjoint(); }

MatrixXc Purification::reduced_eve() const { return psi_.transpose() * psi_.conjugate(); }

MatrixXc Purification::eve_conditional(const Vector2c& alice) const {
  // chi(b, e) = sum_a conj(alice_a) psi((a, b), e)
  MatrixXc chi = std::conj(alice(0)) * psi_.topRows(2) + std::conj(alice(1)) * psi_.bottomRows(2);
  return chi.transpose() * chi.conjugate();
}

Purification build_purification(const BellSpectrum& spec, const EveBasis& v) {
  if (v.dimension() < 4) throw Error(ErrorKind::DimensionMismatch, "Eve needs at least four dimensions to purify a two-qubit state");
  const MatrixXc rotated = v.rotated_vectors();
  MatrixXc psi = MatrixXc::Zero(4, v.dimension());
  for (int k = 0; k < 4; ++k) psi += std::sqrt(spec[k]) * bell_state(k) * rotated.col(k).transpose();
  return Purification(std::move(psi));
}

double guessing_probability(const BellSpectrum& spec, const ProtocolConfig& config, const EveBasis& v) {
  require_eve_dimension(v, config);
  const Purification psi = build_purification(spec, v);
  double p = 0.0;
  for (int j = 0; j < config.t(); ++j) {
    for (int s = 0; s < 2; ++s) {
      const Vector2c a = alice_ket(config.directions[j], s == 0 ? Sign::Plus : Sign::Minus);
      const auto e = 2 * j + s;
      const Vector2c chi = std::conj(a(0)) * psi.matrix().col(e).head<2>() + std::conj(a(1)) * psi.matrix().col(e).tail<2>();
      p += chi.squaredNorm();
    }
  }
  return p;
}

GuessingKernel::GuessingKernel(const BellSpectrum& spec, const ProtocolConfig& config) {
  const Matrix4c bell = bell_basis();
  Eigen::Vector4d sq;
  for (int k = 0; k < 4; ++k) sq(k) = std::sqrt(spec[k]);
  const Eigen::Matrix4d scale = sq * sq.transpose();
  forms_.reserve(2 * config.t());
  for (int j = 0; j < config.t(); ++j) {
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      const Vector2c a = alice_ket(config.directions[j], s);
      Matrix4c proj = Matrix4c::Zero();
      const Matrix2c pa = a * a.adjoint();
      // (|a><a| (x) I_B) in |ab> ordering
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          for (int b = 0; b < 2; ++b) proj(2 * x + b, 2 * y + b) = pa(x, y);
      Matrix4c form = bell.adjoint() * proj * bell;
      form = form.cwiseProduct(scale.cast<Complex>());
      forms_.push_back(form);
    }
  }
}

double GuessingKernel::evaluate(const Isometry& w) const {
  double p = 0.0;
  for (int e = 0; e < outcomes(); ++e) {
    const Vector4c row = w.row(e).transpose();
    p += row.dot(forms_[e] * row).real();
  }
  return p;
}

double GuessingKernel::gradient(const Isometry& w, Isometry& grad) const {
  grad.resize(w.rows(), 4);
  double p = 0.0;
  for (int e = 0; e < outcomes(); ++e) {
    const Vector4c row = w.row(e).transpose();
    const Vector4c g = forms_[e] * row;
    p += row.dot(g).real();
    grad.row(e) = g.transpose();
  }
  return p;
}

GuessingKernel::Isometry GuessingKernel::polar(const Isometry& grad) {
  // G (G^dagger G)^{-1/2} when G has full column rank; SVD otherwise.
  const Matrix4c gram = grad.adjoint() * grad;
  Eigen::SelfAdjointEigenSolver<Matrix4c> eig(gram);
  const Eigen::Vector4d ev = eig.eigenvalues();
  if (ev.minCoeff() > 1e-4 * std::max(ev.maxCoeff(), 1e-300)) {
    const Eigen::Vector4d inv_sqrt = ev.cwiseSqrt().cwiseInverse();
    const Matrix4c root = eig.eigenvectors() * inv_sqrt.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
    return grad * root;
  }
  Eigen::JacobiSVD<MatrixXc> svd(grad, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

EveBasis known_optimal_v_bb84() {
  MatrixXc r(4, 4);
  const double h = 0.5;
  const double s = 1.0 / std::sqrt(2.0);
  // columns |0_V> .. |3_V>
  r << h, s, 0, h,
      -h, s, 0, -h,
      h, 0, s, -h,
      -h, 0, s, h;
  return EveBasis::from_rotated_vectors(r);
}

EveBasis known_optimal_v_sixstate() {
  MatrixXc r = MatrixXc::Zero(6, 6);
  const double a = 1.0 / std::sqrt(6.0);
  const double b = 1.0 / std::sqrt(2.0);
  const double c = 1.0 / (2.0 * std::sqrt(3.0));
  const double d = 1.0 / std::sqrt(3.0);
  r.col(0) << a, -a, a, a, kI * a, a;
  r.col(1) << b, b, 0, 0, 0, 0;
  r.col(2) << 0, 0, b, -b, 0, 0;
  r.col(3) << 0, 0, 0, 0, b, kI * b;
  r.col(4) << 0.5, -0.5, -0.5, -0.5, 0, 0;
  r.col(5) << -c, c, -c, -c, kI * d, d;
  return EveBasis::from_rotated_vectors(r);
}

double closed_form_pe_bb84(double eps) {
  if (!(eps >= 0.0 && eps <= 0.5)) throw Error(ErrorKind::DomainError, "closed form defined for eps in [0, 1/2]");
  if (eps >= 0.25) return 1.0;
  return std::min(1.0, 0.5 + std::sqrt(2.0 * eps * (1.0 - 2.0 * eps)));
}

double closed_form_pe_sixstate(double eps) {
  if (!(eps >= 0.0 && eps <= 0.5)) throw Error(ErrorKind::DomainError, "closed form defined for eps in [0, 1/2]");
  if (eps >= 1.0 / 3.0) return 1.0;
  return std::min(1.0, 0.5 + std::sqrt(3.0 * eps * (2.0 - 3.0 * eps) / 4.0));
}

GuessResult maximize_guessing_over_v(const BellSpectrum& spec, const ProtocolConfig& config,
                                     const OptimizerOptions& options) {
  config.validate();
  const int starts = std::max(options.starts, 1);
  const int n = 2 * config.t();
  const GuessingKernel kernel(spec, config);

  std::optional<EveBasis> known;
  if (options.seed_known_optimum) {
    if (is_standard_bb84(config)) known = known_optimal_v_bb84();
    if (is_standard_sixstate(config)) known = known_optimal_v_sixstate();
  }

  std::vector<Restart> restarts(starts);
  std::atomic<bool> stopped{false};
  auto run = [&](int r) {
    if (stopped.load(std::memory_order_relaxed)) return;
    MatrixXc base;
    if (r == 0 && known) {
      base = known->matrix();
    } else {
      Rng rng(options.seed, static_cast<std::uint64_t>(r));
      base = haar_unitary(n, rng);
    }
    restarts[r] = options.method == LocalMethod::PolarAscent
                      ? polar_ascent(kernel, base.conjugate().leftCols(4), options)
                      : simplex_search(kernel, base, options);
    if (options.stop_above && restarts[r].value > *options.stop_above) stopped = true;
  };

  if (options.execution == Execution::Parallel) {
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int r = 0; r < starts; ++r) run(r);
  } else {
    for (int r = 0; r < starts; ++r) run(r);
  }

  // First restart attaining the maximum wins. Restarts skipped after an
  // early stop keep value -1.
  int best = 0;
  for (int r = 1; r < starts; ++r)
    if (restarts[r].value > restarts[best].value) best = r;
  double runner_up = -1.0;
  for (int r = 0; r < starts; ++r)
    if (r != best) runner_up = std::max(runner_up, restarts[r].value);

  GuessResult result;
  result.p_e_star = restarts[best].value;
  result.best_v = EveBasis::from_isometry(restarts[best].isometry);
  result.spectrum = spec;
  result.starts_used = starts;
  result.converged = starts == 1 ? restarts[best].converged
                                 : restarts[best].value - runner_up <= kRestartAgreement;
  return result;
}

GuessResult maximize_guessing(const ProtocolConfig& config, std::span<const double> eps,
                              const OptimizerOptions& options) {
  const SpectrumFamily family = resolve_spectra(config, eps);
  if (family.fixed) return maximize_guessing_over_v(family.at(0.0), config, options);

  const Interval range = family.free_range;
  std::optional<GuessResult> witness;
  auto inner = [&](double lambda3) {
    if (witness) return witness->p_e_star;
    GuessResult r = maximize_guessing_over_v(family.at(lambda3), config, options);
    if (options.stop_above && r.p_e_star > *options.stop_above) {
      r.best_lambda3 = lambda3;
      witness = r;
    }
    return r.p_e_star;
  };
  const ScalarMax best = grid_then_golden_max(inner, range.lo, range.hi, options.lambda3_grid, options.lambda3_tol);
  if (witness) return *witness;

  GuessResult result = maximize_guessing_over_v(family.at(best.x), config, options);
  result.best_lambda3 = best.x;
  return result;
}

}  // namespace qkdguess
