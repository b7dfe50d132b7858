#pragma once

// Eve's guessing probability on the purification of a Bell-diagonal state
// and its maximization over her measurement basis and the free spectrum
// parameter.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qkdguess/linalg.hpp"
#include "qkdguess/protocol.hpp"
#include "qkdguess/quantum_states.hpp"

namespace qkdguess {

/// Unitary V fixing Eve's basis through |k_V> = (V^dagger)^T |k> = conj(V)|k>.
class EveBasis {
 public:
  /// Throws Error(InvalidArgument) if V is not square or ||V^dagger V - I||_max >= 1e-9.
  explicit EveBasis(MatrixXc v);

  static EveBasis identity(int n) { return EveBasis(MatrixXc::Identity(n, n)); }

  /// Builds V from the rotated vectors |k_V> given as columns (a unitary).
  static EveBasis from_rotated_vectors(const MatrixXc& rotated);

  /// Completes an n x m isometry (m <= n) whose columns are |0_V>..|m-1_V>
  /// to a special unitary. The completed columns are orthonormal to the given ones;
  /// for m == n the columns share one global phase instead.
  static EveBasis from_isometry(const MatrixXc& isometry);

  const MatrixXc& matrix() const { return v_; }
  int dimension() const { return static_cast<int>(v_.rows()); }

  /// Columns are |0_V>, |1_V>, ...
  MatrixXc rotated_vectors() const { return v_.conjugate(); }

  bool operator==(const EveBasis& other) const {
    return v_.rows() == other.v_.rows() && v_.cols() == other.v_.cols() && v_ == other.v_;
  }

 private:
  MatrixXc v_;
};

/// |psi>_ABE = sum_k sqrt(Lambda_k) |phi_k>_AB |k_V>_E, stored as a
/// 4 x dim_E matrix indexed (computational AB index, Eve index).
class Purification {
 public:
  Purification(MatrixXc amplitudes) : psi_(std::move(amplitudes)) {}

  const MatrixXc& matrix() const { return psi_; }
  /// Flattened amplitudes, AB index major.
  VectorXc amplitudes() const;
  int eve_dimension() const { return static_cast<int>(psi_.cols()); }

  double norm() const { return psi_.norm(); }
  Matrix4c reduced_ab() const;
  MatrixXc reduced_eve() const;

  /// Unnormalized Eve state after Alice projects onto `alice`.
  MatrixXc eve_conditional(const Vector2c& alice) const;

 private:
  MatrixXc psi_;
};

/// Throws Error(DimensionMismatch) when V has dimension below 4.
Purification build_purification(const BellSpectrum& spec, const EveBasis& v);

/// Probability that Eve's outcome 2j (2j+1) coincides with Alice finding
/// |+n_j> (|-n_j>), summed over the t bases. Throws Error(DimensionMismatch)
/// unless V is 2t x 2t.
double guessing_probability(const BellSpectrum& spec, const ProtocolConfig& config, const EveBasis& v);

/// P_E as a sum of 2t quadratic forms in the rows of the 2t x 4 isometry
/// W = (|0_V> .. |3_V>). Only these four columns of V enter P_E.
class GuessingKernel {
 public:
  GuessingKernel(const BellSpectrum& spec, const ProtocolConfig& config);

  using Isometry = Eigen::Matrix<Complex, Eigen::Dynamic, 4>;

  int outcomes() const { return static_cast<int>(forms_.size()); }
  double evaluate(const Isometry& isometry) const;

  /// Half the gradient of P_E at W (row e is M_e w_e); returns P_E(W).
  double gradient(const Isometry& isometry, Isometry& grad) const;

  /// Polar factor of G, the isometry maximizing Re tr(G^dagger W). Taking
  /// W <- polar(grad) never decreases P_E since P_E is convex in W.
  static Isometry polar(const Isometry& grad);

 private:
  std::vector<Matrix4c> forms_;
};

/// Bases attaining the closed forms below on the symmetric optimal states.
/// The six-state basis is completed to 6 x 6 with two auxiliary vectors.
EveBasis known_optimal_v_bb84();
EveBasis known_optimal_v_sixstate();

/// 1/2 + sqrt(2 eps (1 - 2 eps)), equal to 1 on [1/4, 1/2]. Throws
/// Error(DomainError) outside [0, 1/2].
double closed_form_pe_bb84(double eps);
/// 1/2 + sqrt(3 eps (2 - 3 eps) / 4), equal to 1 on [1/3, 1/2].
double closed_form_pe_sixstate(double eps);

enum class LocalMethod {
  PolarAscent,  // monotone polar-decomposition ascent on the Eve isometry
  NelderMead,   // simplex search over the (2t)^2 - 1 su(2t) coordinates
};

enum class Execution { Serial, Parallel };

struct OptimizerOptions {
  int starts = 32;
  std::uint64_t seed = 0;
  LocalMethod method = LocalMethod::PolarAscent;
  int max_evaluations = 20000;
  double ftol = 1e-8;
  double xtol = 1e-8;
  double ascent_tol = 1e-14;
  int lambda3_grid = 33;
  double lambda3_tol = 1e-7;
  /// Start restart 0 from the known optimal basis for standard configs.
  bool seed_known_optimum = true;
  Execution execution = Execution::Parallel;
  int threads = 0;  // 0 = OpenMP default
  /// When set, the search returns as soon as any P_E > stop_above is seen.
  /// The reported value is then only a witness that P_E* > stop_above.
  std::optional<double> stop_above;
};

struct GuessResult {
  double p_e_star = 0.0;
  EveBasis best_v = EveBasis::identity(4);
  std::optional<double> best_lambda3;
  BellSpectrum spectrum = BellSpectrum::ideal();
  int starts_used = 0;
  bool converged = false;

  bool operator==(const GuessResult&) const = default;
};

/// Multi-start maximization of P_E over V in SU(2t) for a fixed spectrum.
GuessResult maximize_guessing_over_v(const BellSpectrum& spec, const ProtocolConfig& config,
                                     const OptimizerOptions& options = {});

/// P_E* for the given error rates: maximization over V and, for the
/// four-state class, over Lambda_3 in the admissible interval (grid scan
/// followed by golden-section refinement).
GuessResult maximize_guessing(const ProtocolConfig& config, std::span<const double> eps,
                              const OptimizerOptions& options = {});

}  // namespace qkdguess
