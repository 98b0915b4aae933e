#include "coherent/coherent_family.hpp"

#include <cmath>
#include <sstream>

#include "coherent/errors.hpp"

namespace coherent {

namespace {

void check_size(const LieAlgebraRep& rep, const Vector& v, const char* op) {
  if (v.size() != rep.rep_dim()) {
    throw Error(ErrorCode::InvalidArgument, op,
                "vector has " + std::to_string(v.size()) + " amplitudes, representation has dimension " +
                    std::to_string(rep.rep_dim()));
  }
}

void require_normalized(const FiducialVector& psi, const Tolerances& tol, const char* op) {
  const double dev = std::abs(psi.amplitudes().norm() - 1.0);
  if (dev > tol.normalization) {
    std::ostringstream os;
    os << "state norm deviates from 1 by " << dev;
    throw Error(ErrorCode::Normalization, op, os.str());
  }
}

// Sign convention: the entry of largest magnitude is positive.
RealVector fix_sign(RealVector v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  if (v(idx) < 0.0) v = -v;
  return v;
}

}  // namespace

FiducialVector FiducialVector::make(const LieAlgebraRep& rep, Vector amplitudes, const Tolerances& tol) {
  check_size(rep, amplitudes, "FiducialVector");
  if (!amplitudes.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "FiducialVector", "amplitudes not finite");
  }
  const double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > tol.normalization) {
    std::ostringstream os;
    os << "state norm " << norm << " deviates from 1 by more than " << tol.normalization;
    throw Error(ErrorCode::Normalization, "FiducialVector", os.str());
  }
  amplitudes /= norm;
  return FiducialVector(std::move(amplitudes), rep.label());
}

FiducialVector FiducialVector::normalized(const LieAlgebraRep& rep, Vector amplitudes, double* deviation) {
  check_size(rep, amplitudes, "FiducialVector");
  const double norm = amplitudes.norm();
  if (!std::isfinite(norm) || norm == 0.0) {
    throw Error(ErrorCode::Normalization, "FiducialVector", "state has zero or non-finite norm");
  }
  if (deviation != nullptr) *deviation = std::abs(norm - 1.0);
  amplitudes /= norm;
  return FiducialVector(std::move(amplitudes), rep.label());
}

FiducialVector matsumoto_fiducial(const LieAlgebraRep& rep) {
  const bool spin_one = rep.spin() && rep.spin()->twice() == 2;
  if (!spin_one) {
    throw Error(ErrorCode::UnsupportedAlgebra, "matsumoto_fiducial", "needs the spin-1 representation");
  }
  Matrix diag = Matrix::Zero(3, 3);
  diag(0, 0) = 1.0;
  diag(2, 2) = -1.0;
  if (max_abs(rep.generator(2) - diag) > 1e-12) {
    throw Error(ErrorCode::UnsupportedAlgebra, "matsumoto_fiducial",
                "needs J3 = diag(1, 0, -1) in the standard basis");
  }
  Vector amps = Vector::Zero(3);
  amps(0) = std::sqrt(2.0 / 3.0);
  amps(2) = std::sqrt(1.0 / 3.0);
  return FiducialVector::normalized(rep, std::move(amps));
}

FiducialVector highest_weight_fiducial(const LieAlgebraRep& rep) {
  if (!rep.is_su2()) {
    throw Error(ErrorCode::UnsupportedAlgebra, "highest_weight_fiducial",
                "highest weight is defined here for su(2) irreps only");
  }
  const Matrix& j3 = rep.generator(2);
  const int d = rep.rep_dim();
  Matrix offdiag = j3;
  offdiag.diagonal().setZero();
  Vector amps = Vector::Zero(d);
  if (max_abs(offdiag) == 0.0) {
    Eigen::Index top = 0;
    j3.diagonal().real().maxCoeff(&top);
    amps(top) = 1.0;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(j3);
    amps = es.eigenvectors().col(d - 1);
    Eigen::Index big = 0;
    amps.cwiseAbs().maxCoeff(&big);
    amps *= std::polar(1.0, -std::arg(amps(big)));
  }
  return FiducialVector::normalized(rep, std::move(amps));
}

IsotropySubalgebra null_space(const RealMatrix& m, double scale, const Tolerances& tol,
                              const char* operation) {
  const auto n = m.cols();
  Eigen::JacobiSVD<RealMatrix> svd(m, Eigen::ComputeFullV);
  IsotropySubalgebra out;
  out.singular_values = svd.singularValues();
  const double sigma_max = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
  out.threshold = tol.rank_relative * std::max(sigma_max, scale);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < out.singular_values.size(); ++k) {
    const double s = out.singular_values(k);
    if (s > out.threshold / tol.rank_guard && s < out.threshold * tol.rank_guard) {
      std::ostringstream os;
      os << "singular value " << s << " lies within a factor " << tol.rank_guard
         << " of the rank threshold " << out.threshold;
      throw Error(ErrorCode::RankAmbiguous, operation, os.str());
    }
    if (s > out.threshold) ++rank;
  }
  const RealMatrix& v = svd.matrixV();
  for (Eigen::Index k = rank; k < n; ++k) out.basis.push_back(fix_sign(v.col(k)));
  return out;
}

MomentVector moment_map(const LieAlgebraRep& rep, const FiducialVector& psi, const Tolerances& tol) {
  constexpr const char* op = "moment_map";
  check_size(rep, psi.amplitudes(), op);
  require_normalized(psi, tol, op);
  const Vector& a = psi.amplitudes();
  MomentVector out{RealVector(rep.algebra_dim())};
  for (int k = 0; k < rep.algebra_dim(); ++k) {
    const Complex value = a.dot(rep.generator(k) * a);
    if (std::abs(value.imag()) > tol.moment_imaginary) {
      std::ostringstream os;
      os << "<psi|T_" << k << "|psi> has imaginary part " << value.imag();
      throw Error(ErrorCode::HermiticityFailure, op, os.str());
    }
    out.mu(k) = value.real();
  }
  return out;
}

IsotropySubalgebra isotropy_state(const LieAlgebraRep& rep, const FiducialVector& psi,
                                  const Tolerances& tol) {
  constexpr const char* op = "isotropy_state";
  check_size(rep, psi.amplitudes(), op);
  require_normalized(psi, tol, op);
  const Vector& a = psi.amplitudes();
  const int d = rep.rep_dim();
  const int n = rep.algebra_dim();
  // Columns (1 - |psi><psi|) T_a |psi>, realified.
  RealMatrix realified(2 * d, n);
  for (int k = 0; k < n; ++k) {
    Vector col = rep.generator(k) * a;
    col -= a.dot(col) * a;
    realified.col(k).head(d) = col.real();
    realified.col(k).tail(d) = col.imag();
  }
  return null_space(realified, rep.generator_scale(), tol, op);
}

IsotropySubalgebra isotropy_moment(const LieAlgebraRep& rep, const FiducialVector& psi,
                                   const Tolerances& tol) {
  const MomentVector mu = moment_map(rep, psi, tol);
  // Row b, column a: f_abc mu_c.
  const RealMatrix m = rep.structure_constants().contract_last(mu.mu).transpose();
  return null_space(m, rep.generator_scale(), tol, "isotropy_moment");
}

IsotropyReport classify_informative(const LieAlgebraRep& rep, const FiducialVector& psi,
                                    const Tolerances& tol) {
  IsotropyReport report;
  report.mu = moment_map(rep, psi, tol);
  report.subalg_state = isotropy_state(rep, psi, tol);
  report.subalg_moment = isotropy_moment(rep, psi, tol);

  double worst = 0.0;
  for (const RealVector& v : report.subalg_state.basis) {
    RealVector rest = v;
    for (const RealVector& u : report.subalg_moment.basis) rest -= u.dot(v) * u;
    worst = std::max(worst, rest.norm());
  }
  report.containment_ok = worst <= tol.containment;
  if (!report.containment_ok) {
    std::ostringstream os;
    os << "Lie(H_|0>) is not contained in Lie(H_0): residual " << worst;
    throw Error(ErrorCode::ContainmentViolation, "classify_informative", os.str());
  }
  report.informative = report.subalg_state.dim() == report.subalg_moment.dim();
  return report;
}

Vector coherent_state(const LieAlgebraRep& rep, const FiducialVector& psi, const GroupElement& g) {
  check_size(rep, psi.amplitudes(), "coherent_state");
  if (g.matrix().rows() != rep.rep_dim()) {
    throw Error(ErrorCode::InvalidArgument, "coherent_state", "group element has wrong dimension");
  }
  return g.matrix() * psi.amplitudes();
}

bool is_canonical(const MomentVector& mu, const Tolerances& tol) {
  if (mu.mu.size() != 3) return false;
  return mu.mu(0) * mu.mu(0) + mu.mu(1) * mu.mu(1) <= tol.canonical_perp_sq && mu.mu(2) >= 0.0;
}

Canonicalization canonicalize(const LieAlgebraRep& rep, const FiducialVector& psi,
                              const Tolerances& tol) {
  constexpr const char* op = "canonicalize";
  if (!rep.is_su2()) {
    throw Error(ErrorCode::UnsupportedAlgebra, op, "canonicalization is defined for su(2) irreps");
  }
  const MomentVector mu = moment_map(rep, psi, tol);
  const double norm = mu.mu.norm();
  if (norm <= tol.degenerate_moment) {
    std::ostringstream os;
    os << "|mu| = " << norm << ": the co-adjoint orbit is a point";
    throw Error(ErrorCode::DegenerateOrbit, op, os.str());
  }
  const RealVector unit = mu.mu / norm;
  // Rotating about unit x e_3 by the angle between them carries unit to e_3.
  RealVector axis(3);
  axis << unit(1), -unit(0), 0.0;
  const double s = axis.norm();
  const double angle = std::atan2(s, unit(2));
  RealVector theta = RealVector::Zero(3);
  if (s > 0.0) {
    theta = angle * axis / s;
  } else if (unit(2) < 0.0) {
    theta(0) = angle;
  }
  GroupElement g = exp_element(rep, theta);
  FiducialVector rotated = FiducialVector::normalized(rep, g.matrix() * psi.amplitudes());
  return Canonicalization{std::move(g), std::move(rotated), norm};
}

}  // namespace coherent
