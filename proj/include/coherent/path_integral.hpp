#pragma once

#include <string>
#include <vector>

#include "coherent/coherent_family.hpp"
#include "coherent/lie_core.hpp"
#include "coherent/orbit_dynamics.hpp"
#include "coherent/tolerances.hpp"

namespace coherent {

struct IdentityCheckResult {
  Matrix b;                 // sum_i w_i |g_i psi><g_i psi|
  double constant = 0.0;    // tr(B) / d
  double deviation = 0.0;   // |B - constant I|_max
  QuadratureOrders orders;
  bool orders_exact = false;
  std::vector<std::string> warnings;
};

/// Quadrature of |g><g| over the Haar measure. Orders below the exactness
/// threshold only produce a warning.
IdentityCheckResult identity_resolution(const LieAlgebraRep& rep, const FiducialVector& psi,
                                        const HaarQuadrature& quad);

struct BerryProfile {
  std::vector<double> theta_grid;
  std::vector<double> a_phi;
  double coefficient = 0.0;   // least-squares c in A_phi = c (cos theta - 1)
  double fit_residual = 0.0;  // max |A_phi - c (cos theta - 1)|
};

/// Evenly spaced polar angles strictly inside (margin, pi - margin).
std::vector<double> default_theta_grid(int count = 33, double margin = 0.05);

/// A_phi(theta) = i<0|g^-1 d_phi g|0> at phi = 0 for the north-chart section,
/// by central differences with step tol.fd_step.
BerryProfile berry_connection(const LieAlgebraRep& rep, const FiducialVector& psi_canonical,
                              const std::vector<double>& theta_grid, const Tolerances& tol = {});

struct DiracVerdict {
  double coefficient = 0.0;
  double nearest_admissible = 0.0;  // nearest half-integer
  double gap = 0.0;
  bool admissible = false;
};

/// Canonicalizes psi, fits the monopole coefficient and tests it against the
/// integer / half-integer rule.
DiracVerdict dirac_check(const LieAlgebraRep& rep, const FiducialVector& psi, const Tolerances& tol = {});

enum class KernelMode { Exact, FirstOrder };

struct ConvergenceRecord {
  std::vector<int> slice_counts;
  std::vector<Complex> amplitudes;
  Complex exact_amplitude{};
  std::vector<double> errors;
  KernelMode kernel_mode = KernelMode::Exact;
  double total_time = 0.0;
  int grid_size = 0;
};

/// Upper bound on slices * (grid size)^2 kernel work, and on (grid size)^2
/// stored kernel entries.
inline constexpr double kMaxKernelWork = 4e8;
inline constexpr double kMaxKernelEntries = 16777216.0;  // 4096^2

/// <g_f psi| U_{N-1} P ... P U_0 |g_i psi> with P = d sum_x w_x |x><x| over the
/// quadrature states and U_s the slice kernel over [t0 + s T/N, t0 + (s+1) T/N].
Complex discrete_amplitude(const LieAlgebraRep& rep, const FiducialVector& psi,
                           const HamiltonianSchedule& schedule, const GroupElement& g_initial,
                           const GroupElement& g_final, int slices, const HaarQuadrature& quad,
                           KernelMode mode, const Tolerances& tol = {});

/// discrete_amplitude for each slice count, against the exact amplitude
/// <g_f psi|U(T)|g_i psi> with T the schedule length.
ConvergenceRecord discrete_propagator(const LieAlgebraRep& rep, const FiducialVector& psi,
                                      const HamiltonianSchedule& schedule, const GroupElement& g_initial,
                                      const GroupElement& g_final, const std::vector<int>& slice_counts,
                                      const HaarQuadrature& quad, KernelMode mode, const Tolerances& tol = {});

/// -slope of the least-squares line through (log N, log error).
double fitted_order(const std::vector<int>& slice_counts, const std::vector<double>& errors);

}  // namespace coherent
