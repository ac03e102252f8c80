#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace switchcert {

/// Spectral radii within this distance of 1 are not certified as Schur.
inline constexpr double kSchurTol = 1e-9;

/// Dense real matrix with finite entries. Row-major construction, value
/// semantics. Dimensions are expected to stay small (the certification
/// problems of interest live in d <= 10 or so).
class Matrix {
 public:
  Matrix() : data_(0, 0) {}

  Matrix(int rows, int cols) : data_(Eigen::MatrixXd::Zero(rows, cols)) {
    if (rows <= 0 || cols <= 0) {
      throw std::invalid_argument("Matrix: dimensions must be positive");
    }
  }

  Matrix(int rows, int cols, const std::vector<double>& row_major)
      : Matrix(rows, cols) {
    if (static_cast<int>(row_major.size()) != rows * cols) {
      throw std::invalid_argument("Matrix: entry count does not match shape");
    }
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        data_(r, c) = row_major[static_cast<size_t>(r) * cols + c];
      }
    }
    require_finite("Matrix");
  }

  explicit Matrix(Eigen::MatrixXd m) : data_(std::move(m)) {}

  static Matrix identity(int n) {
    if (n <= 0) throw std::invalid_argument("identity: order must be positive");
    return Matrix(Eigen::MatrixXd::Identity(n, n));
  }

  int rows() const { return static_cast<int>(data_.rows()); }
  int cols() const { return static_cast<int>(data_.cols()); }
  bool is_square() const { return rows() == cols() && rows() > 0; }

  double operator()(int r, int c) const { return data_(r, c); }
  double& operator()(int r, int c) { return data_(r, c); }

  const Eigen::MatrixXd& eigen() const { return data_; }

  std::vector<double> row_major() const {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(rows()) * cols());
    for (int r = 0; r < rows(); ++r) {
      for (int c = 0; c < cols(); ++c) out.push_back(data_(r, c));
    }
    return out;
  }

  bool is_finite() const { return data_.allFinite(); }

  void require_finite(const std::string& who) const {
    if (!is_finite()) {
      throw std::invalid_argument(who + ": non-finite entries");
    }
  }

  Matrix operator*(const Matrix& rhs) const {
    if (cols() != rhs.rows()) {
      throw std::invalid_argument("Matrix multiply: shape mismatch");
    }
    return Matrix(data_ * rhs.data_);
  }

  Matrix operator+(const Matrix& rhs) const {
    check_same_shape(rhs, "add");
    return Matrix(data_ + rhs.data_);
  }

  Matrix operator-(const Matrix& rhs) const {
    check_same_shape(rhs, "subtract");
    return Matrix(data_ - rhs.data_);
  }

  Matrix transpose() const { return Matrix(data_.transpose()); }

 private:
  void check_same_shape(const Matrix& rhs, const char* op) const {
    if (rows() != rhs.rows() || cols() != rhs.cols()) {
      throw std::invalid_argument(std::string("Matrix ") + op +
                                  ": shape mismatch");
    }
  }

  Eigen::MatrixXd data_;
};

/// Largest singular value, computed as sqrt of the top eigenvalue of AtA.
inline double spectral_norm(const Matrix& m) {
  m.require_finite("spectral_norm");
  const Eigen::MatrixXd& a = m.eigen();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("spectral_norm: eigensolver failed");
  }
  double top = es.eigenvalues().maxCoeff();
  return std::sqrt(std::max(top, 0.0));
}

/// All eigenvalues, sorted by descending modulus then descending real part
/// so reports are stable run to run.
inline std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  if (!m.is_square()) {
    throw std::invalid_argument("eigenvalues: matrix must be square");
  }
  m.require_finite("eigenvalues");
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.eigen());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalues: eigensolver failed");
  }
  std::vector<std::complex<double>> out;
  out.reserve(static_cast<size_t>(m.rows()));
  for (int k = 0; k < m.rows(); ++k) out.push_back(es.eigenvalues()(k));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return out;
}

inline double spectral_radius(const Matrix& m) {
  auto eigs = eigenvalues(m);
  double r = 0.0;
  for (const auto& e : eigs) r = std::max(r, std::abs(e));
  return r;
}

/// Schur stability with a guard band: |lambda|max < 1 - kSchurTol. Matrices
/// on the unit circle (e.g. the identity) are not Schur.
inline bool is_schur(const Matrix& m) {
  return spectral_radius(m) < 1.0 - kSchurTol;
}

/// k-fold product by repeated multiplication; k = 0 yields the identity.
inline Matrix matrix_power(const Matrix& m, long k) {
  if (!m.is_square()) {
    throw std::invalid_argument("matrix_power: matrix must be square");
  }
  if (k < 0) throw std::invalid_argument("matrix_power: negative exponent");
  Matrix acc = Matrix::identity(m.rows());
  for (long s = 0; s < k; ++s) acc = acc * m;
  return acc;
}

}  // namespace switchcert
