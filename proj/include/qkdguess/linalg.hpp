#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qkdguess {

using Complex = std::complex<double>;
using Vector2c = Eigen::Vector2cd;
using Vector4c = Eigen::Vector4cd;
using VectorXc = Eigen::VectorXcd;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using MatrixXc = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// max |(V^dagger V - I)_ij|; zero for an exact unitary or isometry.
inline double unitarity_defect(const MatrixXc& v) {
  const MatrixXc gram = v.adjoint() * v;
  return (gram - MatrixXc::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace qkdguess
