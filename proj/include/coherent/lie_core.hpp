#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "coherent/tolerances.hpp"

namespace coherent {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Spin quantum number stored as the integer 2j.
class Spin {
 public:
  /// Rejects 2j <= 0.
  static Spin from_twice(int twice_j);
  /// Rejects anything that is not a positive half-integer.
  static Spin from_double(double j);
  /// Accepts "1", "3/2", "0.5".
  static Spin parse(std::string_view text);

  int twice() const noexcept { return twice_; }
  double value() const noexcept { return 0.5 * twice_; }
  int dimension() const noexcept { return twice_ + 1; }
  std::string to_string() const;

  friend bool operator==(Spin, Spin) = default;

 private:
  explicit Spin(int twice) : twice_(twice) {}
  int twice_;
};

/// Real antisymmetric array f[a][b][c] with [T_a, T_b] = i f_abc T_c.
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

  int size() const noexcept { return n_; }
  double operator()(int a, int b, int c) const { return data_[index(a, b, c)]; }
  double& operator()(int a, int b, int c) { return data_[index(a, b, c)]; }

  /// M(a, b) = f_abc v_c.
  RealMatrix contract_last(const RealVector& v) const;

 private:
  std::size_t index(int a, int b, int c) const {
    return (static_cast<std::size_t>(a) * n_ + b) * n_ + c;
  }
  int n_ = 0;
  std::vector<double> data_;
};

/// Hermitian generators of a unitary irrep together with verified structure
/// constants. Only obtainable through build_spin_rep or validate_algebra.
class LieAlgebraRep {
 public:
  int algebra_dim() const noexcept { return static_cast<int>(generators_.size()); }
  int rep_dim() const noexcept { return dim_; }
  const std::vector<Matrix>& generators() const noexcept { return generators_; }
  const Matrix& generator(int a) const { return generators_.at(static_cast<std::size_t>(a)); }
  const StructureConstants& structure_constants() const noexcept { return f_; }
  const std::string& label() const noexcept { return label_; }

  /// Set when the generators satisfy su(2) relations with f = epsilon and a
  /// Casimir proportional to the identity, i.e. a spin-j irrep in some basis.
  std::optional<Spin> spin() const noexcept { return spin_; }
  bool is_su2() const noexcept { return spin_.has_value(); }

  /// v_a T_a.
  Matrix combine(const RealVector& v) const;

  /// Real coefficients w minimizing |X - w.T| in the trace inner product,
  /// with the max-abs reconstruction residual written to `residual`.
  RealVector project(const Matrix& x, double* residual = nullptr) const;

  /// Gram matrix G_ab = Re tr(T_a^dagger T_b).
  const RealMatrix& gram() const noexcept { return gram_; }

  /// Largest operator norm among the generators; sets the rank scale.
  double generator_scale() const noexcept { return scale_; }

  /// Largest |[T_a, T_b] - i f_abc T_c|_max seen during validation.
  double closure_residual() const noexcept { return closure_residual_; }

 private:
  friend LieAlgebraRep validate_algebra(std::vector<Matrix>, std::string, const Tolerances&);

  int dim_ = 0;
  std::vector<Matrix> generators_;
  StructureConstants f_;
  std::string label_;
  std::optional<Spin> spin_;
  RealMatrix gram_;
  Eigen::LDLT<RealMatrix> gram_solver_;
  double scale_ = 0.0;
  double closure_residual_ = 0.0;
};

/// A unitary matrix in a given representation.
class GroupElement {
 public:
  /// Throws NOT_UNITARY when |g^dagger g - I|_max exceeds tol.unitarity.
  GroupElement(Matrix matrix, std::string rep_label, const Tolerances& tol = {});

  static GroupElement identity(const LieAlgebraRep& rep);

  const Matrix& matrix() const noexcept { return matrix_; }
  const std::string& rep_label() const noexcept { return rep_label_; }

  GroupElement inverse() const;
  GroupElement operator*(const GroupElement& other) const;
  Vector operator*(const Vector& v) const { return matrix_ * v; }

 private:
  struct Unchecked {};
  GroupElement(Matrix matrix, std::string rep_label, Unchecked)
      : matrix_(std::move(matrix)), rep_label_(std::move(rep_label)) {}

  Matrix matrix_;
  std::string rep_label_;
};

struct QuadratureOrders {
  int n_beta = 1;
  int n_alpha = 1;
  int n_gamma = 1;

  friend bool operator==(const QuadratureOrders&, const QuadratureOrders&) = default;
};

/// Product rule for the normalized Haar measure of SU(2) in Euler angles
/// g = exp(-i alpha J3) exp(-i beta J2) exp(-i gamma J3).
struct HaarQuadrature {
  std::vector<GroupElement> nodes;
  std::vector<double> weights;
  std::vector<std::array<double, 3>> euler;  // (alpha, beta, gamma) per node
  QuadratureOrders orders;
};

/// Spin-j irrep in the basis m = j, j-1, ..., -j with generators (J1, J2, J3).
LieAlgebraRep build_spin_rep(Spin j);

/// Checks Hermiticity, closure, antisymmetry and the Jacobi identity, and
/// fills the structure constants by projecting [T_a, T_b]/i onto the span.
LieAlgebraRep validate_algebra(std::vector<Matrix> generators, std::string label,
                               const Tolerances& tol = {});

/// exp(-i theta_a T_a) by spectral decomposition.
GroupElement exp_element(const LieAlgebraRep& rep, const RealVector& theta);

/// w with g^{-1} (v.T) g = w.T.
RealVector conjugate_generator(const LieAlgebraRep& rep, const GroupElement& g,
                               const RealVector& v, const Tolerances& tol = {});

/// Smallest orders for which |g><g| is integrated exactly.
QuadratureOrders exactness_threshold(const LieAlgebraRep& rep);
bool meets_exactness(const LieAlgebraRep& rep, const QuadratureOrders& orders);

/// Gauss-Legendre in cos(beta), uniform in alpha over [0, 2pi) and in gamma
/// over [0, 4pi). Requires an su(2) rep.
HaarQuadrature haar_quadrature(const LieAlgebraRep& rep, const QuadratureOrders& orders);

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// exp(-i t H) for Hermitian H.
Matrix hermitian_exp(const Matrix& h, double t);

/// Hermitian Y with U = exp(i Y) and spectrum of Y in (-pi, pi].
Matrix unitary_log(const Matrix& u);

/// Max-abs entry.
double max_abs(const Matrix& m);

}  // namespace coherent
