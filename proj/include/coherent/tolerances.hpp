#pragma once

namespace coherent {

/// Every numerical threshold used by the library, in one place. Operations
/// take a `const Tolerances&` and default to `Tolerances{}`.
struct Tolerances {
  // lie-core
  double hermiticity = 1e-12;        // max-abs of T - T^dagger
  double closure_failure = 1e-8;     // projection residual that rejects a basis
  double jacobi = 1e-10;
  double unitarity = 1e-10;          // max-abs of g^dagger g - I
  double projection_residual = 1e-10;
  double weight_sum = 1e-12;

  // coherent-family
  double normalization = 1e-8;       // accepted deviation of |psi| from 1
  double moment_imaginary = 1e-12;
  double rank_relative = 1e-9;       // singular values below this * scale are null
  double rank_guard = 10.0;          // band (rank_tol / g, rank_tol * g) is ambiguous
  double containment = 1e-8;
  double canonical_perp_sq = 1e-16;  // mu_1^2 + mu_2^2 allowed in a canonical state

  // orbit-dynamics
  double chart_exclusion = 1e-3;     // polar cap half-angle, radians
  double degenerate_moment = 1e-12;  // |mu| at or below this has no section
  double berry_imaginary = 1e-8;     // per unit time step
  double max_section_jump = 0.5;     // radians between consecutive samples

  // path-integral
  double fd_step = 1e-6;
  double berry_fit = 1e-8;
  double dirac_gap = 1e-8;
  double kernel_overlap_floor = 1e-14;
};

}  // namespace coherent
