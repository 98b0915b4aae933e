#include "coherent/lie_core.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "coherent/errors.hpp"

namespace coherent {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(ErrorCode code, const char* op, const std::string& msg) {
  throw Error(code, op, msg);
}

std::optional<double> parse_number(std::string_view s) {
  double out = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return out;
}

// Levi-Civita check plus Casimir proportional to j(j+1) identity.
std::optional<Spin> detect_su2(const std::vector<Matrix>& gens, const StructureConstants& f,
                               int dim, double tol) {
  if (gens.size() != 3 || dim < 2) return std::nullopt;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int c = 0; c < 3; ++c) {
        double eps = 0.0;
        if (a != b && b != c && a != c) eps = ((b - a + 3) % 3 == 1) ? 1.0 : -1.0;
        if (std::abs(f(a, b, c) - eps) > tol) return std::nullopt;
      }
    }
  }
  const double j = 0.5 * (dim - 1);
  Matrix casimir = gens[0] * gens[0] + gens[1] * gens[1] + gens[2] * gens[2];
  casimir.diagonal().array() -= j * (j + 1.0);
  if (max_abs(casimir) > tol * std::max(1.0, j * (j + 1.0))) return std::nullopt;
  return Spin::from_twice(dim - 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Spin

Spin Spin::from_twice(int twice_j) {
  if (twice_j <= 0) {
    fail(ErrorCode::InvalidArgument, "build_spin_rep",
         "spin must be a positive half-integer, got 2j = " + std::to_string(twice_j));
  }
  return Spin(twice_j);
}

Spin Spin::from_double(double j) {
  const double twice = 2.0 * j;
  if (!std::isfinite(j) || j <= 0.0 || std::abs(twice - std::round(twice)) > 1e-12) {
    std::ostringstream os;
    os << "spin must be a positive half-integer, got " << j;
    fail(ErrorCode::InvalidArgument, "build_spin_rep", os.str());
  }
  return Spin(static_cast<int>(std::lround(twice)));
}

Spin Spin::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (auto v = parse_number(text)) return from_double(*v);
  } else {
    auto num = parse_number(text.substr(0, slash));
    auto den = parse_number(text.substr(slash + 1));
    if (num && den && *den == 2.0) return from_double(*num / 2.0);
    if (num && den && *den == 1.0) return from_double(*num);
  }
  fail(ErrorCode::InvalidArgument, "build_spin_rep",
       "cannot parse spin '" + std::string(text) + "'");
}

std::string Spin::to_string() const {
  if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

// ---------------------------------------------------------------------------
// StructureConstants / LieAlgebraRep

RealMatrix StructureConstants::contract_last(const RealVector& v) const {
  RealMatrix m = RealMatrix::Zero(n_, n_);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c) m(a, b) += (*this)(a, b, c) * v(c);
  return m;
}

Matrix LieAlgebraRep::combine(const RealVector& v) const {
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int a = 0; a < algebra_dim(); ++a) out += v(a) * generators_[static_cast<std::size_t>(a)];
  return out;
}

RealVector LieAlgebraRep::project(const Matrix& x, double* residual) const {
  const int n = algebra_dim();
  RealVector rhs(n);
  for (int a = 0; a < n; ++a) {
    rhs(a) = generators_[static_cast<std::size_t>(a)].cwiseProduct(x.conjugate()).sum().real();
  }
  RealVector w = gram_solver_.solve(rhs);
  if (residual != nullptr) *residual = max_abs(x - combine(w));
  return w;
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

LieAlgebraRep validate_algebra(std::vector<Matrix> generators, std::string label,
                               const Tolerances& tol) {
  constexpr const char* op = "validate_algebra";
  if (generators.empty()) fail(ErrorCode::InvalidArgument, op, "no generators given");
  const auto dim = generators.front().rows();
  if (dim < 1) fail(ErrorCode::InvalidArgument, op, "empty generator matrix");
  for (std::size_t a = 0; a < generators.size(); ++a) {
    const Matrix& t = generators[a];
    if (t.rows() != dim || t.cols() != dim) {
      fail(ErrorCode::InvalidArgument, op,
           "generator " + std::to_string(a) + " is not " + std::to_string(dim) + "x" +
               std::to_string(dim));
    }
    if (!t.allFinite()) fail(ErrorCode::InvalidArgument, op, "non-finite entry in generator");
    const double herm = max_abs(t - t.adjoint());
    if (herm > tol.hermiticity) {
      std::ostringstream os;
      os << "generator " << a << " deviates from Hermitian by " << herm;
      fail(ErrorCode::HermiticityFailure, op, os.str());
    }
  }

  LieAlgebraRep rep;
  rep.dim_ = static_cast<int>(dim);
  rep.label_ = std::move(label);
  rep.generators_ = std::move(generators);
  const int n = rep.algebra_dim();

  rep.gram_.resize(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      rep.gram_(a, b) = rep.generators_[static_cast<std::size_t>(a)]
                            .conjugate()
                            .cwiseProduct(rep.generators_[static_cast<std::size_t>(b)])
                            .sum()
                            .real();
  Eigen::SelfAdjointEigenSolver<RealMatrix> gram_eig(rep.gram_);
  const double gmax = gram_eig.eigenvalues().maxCoeff();
  const double gmin = gram_eig.eigenvalues().minCoeff();
  if (!(gmax > 0.0) || gmin <= 1e-12 * gmax) {
    fail(ErrorCode::LinearDependence, op, "generators are linearly dependent");
  }
  rep.gram_solver_.compute(rep.gram_);

  for (const Matrix& t : rep.generators_) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(t, Eigen::EigenvaluesOnly);
    rep.scale_ = std::max(rep.scale_, es.eigenvalues().cwiseAbs().maxCoeff());
  }

  // f_abc from -i[T_a, T_b] = f_abc T_c, stored for a < b and mirrored.
  rep.f_ = StructureConstants(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const Matrix& ta = rep.generators_[static_cast<std::size_t>(a)];
      const Matrix& tb = rep.generators_[static_cast<std::size_t>(b)];
      const Matrix comm = Complex(0.0, -1.0) * (ta * tb - tb * ta);
      double residual = 0.0;
      const RealVector w = rep.project(comm, &residual);
      if (residual > tol.closure_failure) {
        std::ostringstream os;
        os << "[T_" << a << ", T_" << b << "] leaves the span (residual " << residual << ")";
        fail(ErrorCode::ClosureFailure, op, os.str());
      }
      rep.closure_residual_ = std::max(rep.closure_residual_, residual);
      for (int c = 0; c < n; ++c) {
        rep.f_(a, b, c) = w(c);
        rep.f_(b, a, c) = -w(c);
      }
    }
  }

  // Jacobi: f_abd f_dce + f_bcd f_dae + f_cad f_dbe = 0.
  const auto& f = rep.f_;
  double jacobi = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          double s = 0.0;
          for (int d = 0; d < n; ++d) {
            s += f(a, b, d) * f(d, c, e) + f(b, c, d) * f(d, a, e) + f(c, a, d) * f(d, b, e);
          }
          jacobi = std::max(jacobi, std::abs(s));
        }
  if (jacobi > tol.jacobi) {
    std::ostringstream os;
    os << "Jacobi identity violated by " << jacobi;
    fail(ErrorCode::JacobiFailure, op, os.str());
  }

  rep.spin_ = detect_su2(rep.generators_, rep.f_, rep.dim_, tol.closure_failure);
  return rep;
}

LieAlgebraRep build_spin_rep(Spin j) {
  const int d = j.dimension();
  const double jj = j.value();
  Matrix jz = Matrix::Zero(d, d);
  Matrix jp = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = jj - k;
    jz(k, k) = m;
    if (k > 0) jp(k - 1, k) = std::sqrt(jj * (jj + 1.0) - m * (m + 1.0));
  }
  const Matrix jm = jp.adjoint();
  Matrix jx = 0.5 * (jp + jm);
  Matrix jy = Complex(0.0, -0.5) * (jp - jm);
  return validate_algebra({std::move(jx), std::move(jy), std::move(jz)},
                          "su2-spin-" + j.to_string());
}

// ---------------------------------------------------------------------------
// Group elements

GroupElement::GroupElement(Matrix matrix, std::string rep_label, const Tolerances& tol)
    : matrix_(std::move(matrix)), rep_label_(std::move(rep_label)) {
  if (matrix_.rows() != matrix_.cols()) {
    fail(ErrorCode::InvalidArgument, "GroupElement", "matrix is not square");
  }
  const Matrix defect = matrix_.adjoint() * matrix_ - Matrix::Identity(matrix_.rows(), matrix_.cols());
  const double err = max_abs(defect);
  if (!(err <= tol.unitarity)) {
    std::ostringstream os;
    os << "|g^dagger g - I|_max = " << err;
    fail(ErrorCode::NotUnitary, "GroupElement", os.str());
  }
}

GroupElement GroupElement::identity(const LieAlgebraRep& rep) {
  return GroupElement(Matrix::Identity(rep.rep_dim(), rep.rep_dim()), rep.label(), Unchecked{});
}

GroupElement GroupElement::inverse() const {
  return GroupElement(matrix_.adjoint(), rep_label_, Unchecked{});
}

GroupElement GroupElement::operator*(const GroupElement& other) const {
  return GroupElement(matrix_ * other.matrix_, rep_label_, Unchecked{});
}

Matrix hermitian_exp(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const auto& v = es.eigenvectors();
  Vector phases(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    phases(k) = std::polar(1.0, -t * es.eigenvalues()(k));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

Matrix unitary_log(const Matrix& u) {
  Eigen::ComplexSchur<Matrix> schur(u);
  const Matrix& q = schur.matrixU();
  const Matrix& t = schur.matrixT();
  Vector angles(u.rows());
  for (Eigen::Index k = 0; k < u.rows(); ++k) angles(k) = std::arg(t(k, k));
  Matrix y = q * angles.asDiagonal() * q.adjoint();
  return 0.5 * (y + y.adjoint());
}

GroupElement exp_element(const LieAlgebraRep& rep, const RealVector& theta) {
  if (theta.size() != rep.algebra_dim()) {
    fail(ErrorCode::InvalidArgument, "exp_element",
         "theta has " + std::to_string(theta.size()) + " components, algebra has " +
             std::to_string(rep.algebra_dim()));
  }
  if (!theta.allFinite()) fail(ErrorCode::InvalidArgument, "exp_element", "theta not finite");
  return GroupElement(hermitian_exp(rep.combine(theta), 1.0), rep.label());
}

RealVector conjugate_generator(const LieAlgebraRep& rep, const GroupElement& g,
                               const RealVector& v, const Tolerances& tol) {
  if (v.size() != rep.algebra_dim()) {
    fail(ErrorCode::InvalidArgument, "conjugate_generator", "coefficient vector has wrong size");
  }
  const Matrix& m = g.matrix();
  const Matrix conj = m.adjoint() * rep.combine(v) * m;
  double residual = 0.0;
  RealVector w = rep.project(conj, &residual);
  if (residual > tol.projection_residual * std::max(1.0, max_abs(conj))) {
    std::ostringstream os;
    os << "conjugated generator leaves the algebra (residual " << residual << ")";
    fail(ErrorCode::ProjectionResidual, "conjugate_generator", os.str());
  }
  return w;
}

// ---------------------------------------------------------------------------
// Haar quadrature

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "gauss_legendre", "order must be >= 1");
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = weight;
    w[static_cast<std::size_t>(n - 1 - i)] = weight;
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
  return {x, w};
}

QuadratureOrders exactness_threshold(const LieAlgebraRep& rep) {
  if (!rep.is_su2()) {
    fail(ErrorCode::UnsupportedAlgebra, "haar_quadrature",
         "Euler-angle quadrature needs an su(2) irrep, got '" + rep.label() + "'");
  }
  const int twice = rep.spin()->twice();
  return {twice + 1, 2 * twice + 1, 2 * twice + 1};
}

bool meets_exactness(const LieAlgebraRep& rep, const QuadratureOrders& orders) {
  const auto need = exactness_threshold(rep);
  return orders.n_beta >= need.n_beta && orders.n_alpha >= need.n_alpha &&
         orders.n_gamma >= need.n_gamma;
}

HaarQuadrature haar_quadrature(const LieAlgebraRep& rep, const QuadratureOrders& orders) {
  constexpr const char* op = "haar_quadrature";
  exactness_threshold(rep);  // su(2) check
  if (orders.n_beta < 1 || orders.n_alpha < 1 || orders.n_gamma < 1) {
    fail(ErrorCode::InvalidArgument, op, "quadrature orders must be >= 1");
  }
  const Matrix& j2 = rep.generator(1);
  const Matrix& j3 = rep.generator(2);
  const auto [cos_nodes, cos_weights] = gauss_legendre(orders.n_beta);

  std::vector<Matrix> rot_alpha;
  std::vector<Matrix> rot_gamma;
  for (int k = 0; k < orders.n_alpha; ++k) {
    rot_alpha.push_back(hermitian_exp(j3, 2.0 * kPi * k / orders.n_alpha));
  }
  for (int k = 0; k < orders.n_gamma; ++k) {
    rot_gamma.push_back(hermitian_exp(j3, 4.0 * kPi * k / orders.n_gamma));
  }

  HaarQuadrature quad;
  quad.orders = orders;
  const std::size_t total = static_cast<std::size_t>(orders.n_beta) * orders.n_alpha * orders.n_gamma;
  quad.nodes.reserve(total);
  quad.weights.reserve(total);
  quad.euler.reserve(total);
  const double norm = 0.5 / (static_cast<double>(orders.n_alpha) * orders.n_gamma);
  for (int ib = 0; ib < orders.n_beta; ++ib) {
    const double beta = std::acos(cos_nodes[static_cast<std::size_t>(ib)]);
    const Matrix rot_beta = hermitian_exp(j2, beta);
    for (int ia = 0; ia < orders.n_alpha; ++ia) {
      const Matrix left = rot_alpha[static_cast<std::size_t>(ia)] * rot_beta;
      for (int ig = 0; ig < orders.n_gamma; ++ig) {
        quad.nodes.emplace_back(left * rot_gamma[static_cast<std::size_t>(ig)], rep.label());
        quad.weights.push_back(cos_weights[static_cast<std::size_t>(ib)] * norm);
        quad.euler.push_back({2.0 * kPi * ia / orders.n_alpha, beta, 4.0 * kPi * ig / orders.n_gamma});
      }
    }
  }
  return quad;
}

}  // namespace coherent
