#pragma once

#include <optional>
#include <vector>

#include "coherent/coherent_family.hpp"
#include "coherent/lie_core.hpp"
#include "coherent/tolerances.hpp"

namespace coherent {

/// Piecewise-constant H(t) = h_a T_a, with coefficients[k] active on
/// [breakpoints[k], breakpoints[k+1]).
class HamiltonianSchedule {
 public:
  static HamiltonianSchedule make(std::vector<double> breakpoints, std::vector<RealVector> coefficients);
  static HamiltonianSchedule constant(const RealVector& h, double t_end);

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<RealVector>& coefficients() const noexcept { return coefficients_; }
  double start() const noexcept { return breakpoints_.front(); }
  double end() const noexcept { return breakpoints_.back(); }
  int segments() const noexcept { return static_cast<int>(coefficients_.size()); }

  /// Segment index active at t; the final breakpoint belongs to the last segment.
  int segment_at(double t) const;
  const RealVector& coefficients_at(double t) const {
    return coefficients_[static_cast<std::size_t>(segment_at(t))];
  }

 private:
  std::vector<double> breakpoints_;
  std::vector<RealVector> coefficients_;
};

/// Grid from schedule start to t_final. Every breakpoint is a grid point and
/// each segment is cut into equal steps no longer than dt.
struct TimeGrid {
  std::vector<double> times;
  std::vector<int> segment;  // segment of step k (times[k] -> times[k+1])
};

TimeGrid make_time_grid(const HamiltonianSchedule& schedule, double t_final, double dt);

struct QuantumTrajectory {
  std::vector<double> times;
  std::vector<Vector> states;
};

/// psi_{k+1} = exp(-i H_k dt_k) psi_k. t_final defaults to the schedule end.
QuantumTrajectory propagate_quantum(const LieAlgebraRep& rep, const HamiltonianSchedule& schedule,
                                    const Vector& psi0, double dt,
                                    std::optional<double> t_final = std::nullopt,
                                    const Tolerances& tol = {});

struct MomentTrajectory {
  std::vector<double> times;
  std::vector<RealVector> mu;
};

/// RK4 for mu_a' = f_abc h_b mu_c (mu' = h x mu for su(2)).
MomentTrajectory flow_coadjoint(const LieAlgebraRep& rep, const HamiltonianSchedule& schedule,
                                const MomentVector& mu0, double dt,
                                std::optional<double> t_final = std::nullopt);

enum class Chart { North, South };

struct SectionChart {
  Chart id = Chart::North;
  double exclusion = 1e-3;  // polar cap half-angle excluded from the chart
};

struct SectionPoint {
  GroupElement g;
  double theta = 0.0;
  double phi = 0.0;
};

/// North: exp(-i phi J3) exp(-i theta J2) exp(+i phi J3), regular at theta = 0.
/// South: exp(-i phi J3) exp(-i theta J2) exp(-i phi J3), regular at theta = pi.
GroupElement section_element(const LieAlgebraRep& rep, double theta, double phi, Chart chart);

/// Representative for the orbit point mu. Requires |mu| > tol.degenerate_moment
/// and theta outside the chart's excluded cap.
SectionPoint section_su2(const LieAlgebraRep& rep, const MomentVector& mu, const SectionChart& chart,
                         const Tolerances& tol = {});

/// Accumulated S(t_k) = sum [i<0|g_mid^-1 (g_{k+1} - g_k)|0> - <0|g_mid^-1 H g_mid|0> dt_k]
/// with g_mid the geodesic midpoint of g_k and g_{k+1}.
std::vector<double> action_along_path(const LieAlgebraRep& rep, const HamiltonianSchedule& schedule,
                                      const FiducialVector& fiducial, const std::vector<GroupElement>& path,
                                      const std::vector<double>& times, const Tolerances& tol = {});

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Vector> psi;
  std::vector<RealVector> mu;
  std::vector<double> theta;
  std::vector<double> phi;
  std::vector<double> action;
  std::vector<double> fidelity;
  std::vector<double> phase_residual;
  Chart chart = Chart::North;

  double max_fidelity_deficit() const;
  double max_abs_phase_residual() const;
};

struct VanHoveOptions {
  std::optional<double> t_final;  // defaults to the schedule end
  double dt = 1e-3;
  double tilt_theta = 0.0;  // initial representative g(0) = section(tilt_theta, tilt_phi)
  double tilt_phi = 0.0;
  SectionChart chart{};
};

/// Runs the quantum state and the classical flow side by side from
/// psi(0) = g(0)|0> and compares psi(t) with exp(iS) g(t)|0>. The fiducial must
/// be canonical (moment along +e_3).
TrajectoryRecord van_hove_check(const LieAlgebraRep& rep, const FiducialVector& fiducial,
                                const HamiltonianSchedule& schedule, const VanHoveOptions& options,
                                const Tolerances& tol = {});

/// x wrapped to (-pi, pi].
double wrap_phase(double x);

}  // namespace coherent
