#pragma once

#include <string>
#include <vector>

#include "coherent/lie_core.hpp"
#include "coherent/tolerances.hpp"

namespace coherent {

/// Unit vector |0> in the representation space.
class FiducialVector {
 public:
  /// Throws NORMALIZATION when |psi| deviates from 1 by more than
  /// tol.normalization; smaller deviations are divided out.
  static FiducialVector make(const LieAlgebraRep& rep, Vector amplitudes, const Tolerances& tol = {});

  /// Divides out any nonzero norm. `deviation` receives | |psi| - 1 |.
  static FiducialVector normalized(const LieAlgebraRep& rep, Vector amplitudes, double* deviation = nullptr);

  const Vector& amplitudes() const noexcept { return amplitudes_; }
  const std::string& rep_label() const noexcept { return rep_label_; }
  Eigen::Index size() const noexcept { return amplitudes_.size(); }

 private:
  FiducialVector(Vector amplitudes, std::string label)
      : amplitudes_(std::move(amplitudes)), rep_label_(std::move(label)) {}

  Vector amplitudes_;
  std::string rep_label_;
};

/// sqrt(2/3)|1,1> + sqrt(1/3)|1,-1> in spin 1.
FiducialVector matsumoto_fiducial(const LieAlgebraRep& rep);

/// Eigenvector of T_3 with the largest eigenvalue (|j,j> for spin reps).
FiducialVector highest_weight_fiducial(const LieAlgebraRep& rep);

/// mu_a = <0|T_a|0>, the moment functional f_0 as a coefficient vector.
struct MomentVector {
  RealVector mu;
};

/// Orthonormal basis of a subalgebra, in generator-coefficient space.
struct IsotropySubalgebra {
  std::vector<RealVector> basis;
  RealVector singular_values;  // of the defining map, descending
  double threshold = 0.0;      // singular values at or below are null

  int dim() const noexcept { return static_cast<int>(basis.size()); }
};

struct IsotropyReport {
  IsotropySubalgebra subalg_state;   // Lie(H_|0>)
  IsotropySubalgebra subalg_moment;  // Lie(H_0)
  bool containment_ok = false;
  bool informative = false;
  MomentVector mu;
};

/// Null space of `m` by SVD. Singular values at or below
/// rank_relative * max(sigma_max, scale) count as zero; any singular value
/// within a factor rank_guard of that threshold raises RANK_AMBIGUOUS.
IsotropySubalgebra null_space(const RealMatrix& m, double scale, const Tolerances& tol,
                              const char* operation);

MomentVector moment_map(const LieAlgebraRep& rep, const FiducialVector& psi, const Tolerances& tol = {});

/// Directions v whose generator v.T has psi as an eigenvector.
IsotropySubalgebra isotropy_state(const LieAlgebraRep& rep, const FiducialVector& psi,
                                  const Tolerances& tol = {});

/// Directions v with f_0([v.T, T_b]) = 0 for every b.
IsotropySubalgebra isotropy_moment(const LieAlgebraRep& rep, const FiducialVector& psi,
                                   const Tolerances& tol = {});

/// Both subalgebras, the containment check, and the verdict
/// informative = (dim Lie(H_|0>) == dim Lie(H_0)).
IsotropyReport classify_informative(const LieAlgebraRep& rep, const FiducialVector& psi,
                                    const Tolerances& tol = {});

/// |g> = g|0>. With exp(-i theta J3) this multiplies |j,m> by exp(-i m theta),
/// so a rotation written exp(+i theta J3) corresponds to exp_element(-theta e_3).
Vector coherent_state(const LieAlgebraRep& rep, const FiducialVector& psi, const GroupElement& g);

struct Canonicalization {
  GroupElement rotation;     // g with moment_map(g psi) along +e_3
  FiducialVector canonical;  // g psi
  double moment_norm = 0.0;
};

/// su(2) only. Geodesic rotation about mu x e_3; DEGENERATE_ORBIT when
/// |mu| <= tol.degenerate_moment.
Canonicalization canonicalize(const LieAlgebraRep& rep, const FiducialVector& psi,
                              const Tolerances& tol = {});

/// True when mu_1^2 + mu_2^2 <= tol.canonical_perp_sq and mu_3 >= 0.
bool is_canonical(const MomentVector& mu, const Tolerances& tol = {});

}  // namespace coherent
