#include "coherent/orbit_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "coherent/errors.hpp"

namespace coherent {

namespace {

constexpr double kPi = std::numbers::pi;

void require_su2(const LieAlgebraRep& rep, const char* op) {
  if (!rep.is_su2()) {
    throw Error(ErrorCode::UnsupportedAlgebra, op, "needs an su(2) irrep, got '" + rep.label() + "'");
  }
}

std::string at_time(double t) {
  std::ostringstream os;
  os.precision(17);
  os << " at t = " << t;
  return os.str();
}

// A(a, c) = f_abc h_b, so that mu' = A mu.
RealMatrix flow_matrix(const StructureConstants& f, const RealVector& h) {
  const int n = f.size();
  RealMatrix a = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) a(i, c) += f(i, b, c) * h(b);
  return a;
}

}  // namespace

double wrap_phase(double x) {
  double r = std::remainder(x, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

// ---------------------------------------------------------------------------
// Schedules and grids

HamiltonianSchedule HamiltonianSchedule::make(std::vector<double> breakpoints,
                                              std::vector<RealVector> coefficients) {
  constexpr const char* op = "HamiltonianSchedule";
  if (breakpoints.size() < 2 || coefficients.size() + 1 != breakpoints.size()) {
    throw Error(ErrorCode::InvalidArgument, op, "need K+1 breakpoints for K coefficient vectors, K >= 1");
  }
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!std::isfinite(breakpoints[k]) || !std::isfinite(breakpoints[k + 1]) ||
        !(breakpoints[k] < breakpoints[k + 1])) {
      throw Error(ErrorCode::InvalidArgument, op, "breakpoints must be finite and strictly increasing");
    }
  }
  const auto n = coefficients.front().size();
  for (const auto& h : coefficients) {
    if (h.size() != n || !h.allFinite()) {
      throw Error(ErrorCode::InvalidArgument, op, "coefficients must be finite and of equal length");
    }
  }
  HamiltonianSchedule s;
  s.breakpoints_ = std::move(breakpoints);
  s.coefficients_ = std::move(coefficients);
  return s;
}

HamiltonianSchedule HamiltonianSchedule::constant(const RealVector& h, double t_end) {
  return make({0.0, t_end}, {h});
}

int HamiltonianSchedule::segment_at(double t) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const auto idx = static_cast<int>(it - breakpoints_.begin()) - 1;
  return std::clamp(idx, 0, segments() - 1);
}

TimeGrid make_time_grid(const HamiltonianSchedule& schedule, double t_final, double dt) {
  constexpr const char* op = "make_time_grid";
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::InvalidArgument, op, "dt must be positive and finite");
  }
  if (!(t_final > schedule.start())) {
    throw Error(ErrorCode::InvalidArgument, op, "t_final must lie after the schedule start");
  }
  if (t_final > schedule.end() * (1.0 + 1e-15) + 1e-300) {
    std::ostringstream os;
    os << "t_final = " << t_final << " exceeds the schedule end " << schedule.end();
    throw Error(ErrorCode::InvalidArgument, op, os.str());
  }
  TimeGrid grid;
  grid.times.push_back(schedule.start());
  const auto& bp = schedule.breakpoints();
  for (int seg = 0; seg < schedule.segments(); ++seg) {
    const double a = bp[static_cast<std::size_t>(seg)];
    if (a >= t_final) break;
    const double b = std::min(bp[static_cast<std::size_t>(seg) + 1], t_final);
    const double steps = std::max(1.0, std::ceil((b - a) / dt - 1e-9));
    const auto n = static_cast<long>(steps);
    for (long i = 1; i <= n; ++i) {
      grid.times.push_back(i == n ? b : a + (b - a) * static_cast<double>(i) / steps);
      grid.segment.push_back(seg);
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Propagation

QuantumTrajectory propagate_quantum(const LieAlgebraRep& rep, const HamiltonianSchedule& schedule,
                                    const Vector& psi0, double dt, std::optional<double> t_final,
                                    const Tolerances& tol) {
  constexpr const char* op = "propagate_quantum";
  if (psi0.size() != rep.rep_dim()) throw Error(ErrorCode::InvalidArgument, op, "psi0 has wrong dimension");
  if (schedule.coefficients().front().size() != rep.algebra_dim()) {
    throw Error(ErrorCode::InvalidArgument, op, "schedule coefficients do not match the algebra");
  }
  if (std::abs(psi0.norm() - 1.0) > tol.normalization) {
    throw Error(ErrorCode::Normalization, op, "psi0 is not normalized");
  }
  const TimeGrid grid = make_time_grid(schedule, t_final.value_or(schedule.end()), dt);

  QuantumTrajectory out;
  out.times = grid.times;
  out.states.reserve(grid.times.size());
  out.states.push_back(psi0);

  int cached_segment = -1;
  double cached_step = 0.0;
  Matrix step_op;
  for (std::size_t k = 0; k + 1 < grid.times.size(); ++k) {
    const int seg = grid.segment[k];
    const double h = grid.times[k + 1] - grid.times[k];
    if (seg != cached_segment || h != cached_step) {
      step_op = hermitian_exp(rep.combine(schedule.coefficients()[static_cast<std::size_t>(seg)]), h);
      cached_segment = seg;
      cached_step = h;
    }
    out.states.push_back(step_op * out.states.back());
  }
  return out;
}

MomentTrajectory flow_coadjoint(const LieAlgebraRep& rep, const HamiltonianSchedule& schedule,
                                const MomentVector& mu0, double dt, std::optional<double> t_final) {
  constexpr const char* op = "flow_coadjoint";
  if (mu0.mu.size() != rep.algebra_dim()) throw Error(ErrorCode::InvalidArgument, op, "mu0 has wrong size");
  if (schedule.coefficients().front().size() != rep.algebra_dim()) {
    throw Error(ErrorCode::InvalidArgument, op, "schedule coefficients do not match the algebra");
  }
  const TimeGrid grid = make_time_grid(schedule, t_final.value_or(schedule.end()), dt);

  MomentTrajectory out;
  out.times = grid.times;
  out.mu.reserve(grid.times.size());
  out.mu.push_back(mu0.mu);

  int cached_segment = -1;
  RealMatrix a;
  for (std::size_t k = 0; k + 1 < grid.times.size(); ++k) {
    const int seg = grid.segment[k];
    if (seg != cached_segment) {
      a = flow_matrix(rep.structure_constants(), schedule.coefficients()[static_cast<std::size_t>(seg)]);
      cached_segment = seg;
    }
    const double h = grid.times[k + 1] - grid.times[k];
    const RealVector& y = out.mu.back();
    const RealVector k1 = a * y;
    const RealVector k2 = a * (y + 0.5 * h * k1);
    const RealVector k3 = a * (y + 0.5 * h * k2);
    const RealVector k4 = a * (y + h * k3);
    out.mu.push_back(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Section

GroupElement section_element(const LieAlgebraRep& rep, double theta, double phi, Chart chart) {
  require_su2(rep, "section_element");
  const Matrix& j2 = rep.generator(1);
  const Matrix& j3 = rep.generator(2);
  const double right = chart == Chart::North ? -phi : phi;
  Matrix g = hermitian_exp(j3, phi) * hermitian_exp(j2, theta) * hermitian_exp(j3, right);
  return GroupElement(std::move(g), rep.label());
}

SectionPoint section_su2(const LieAlgebraRep& rep, const MomentVector& mu, const SectionChart& chart,
                         const Tolerances& tol) {
  constexpr const char* op = "section_su2";
  require_su2(rep, op);
  if (!(chart.exclusion > 0.0)) throw Error(ErrorCode::InvalidArgument, op, "chart exclusion must be > 0");
  const double norm = mu.mu.norm();
  if (norm <= tol.degenerate_moment) {
    std::ostringstream os;
    os << "|mu| = " << norm << ": the co-adjoint orbit is a point and has no section";
    throw Error(ErrorCode::DegenerateOrbit, op, os.str());
  }
  const double theta = std::acos(std::clamp(mu.mu(2) / norm, -1.0, 1.0));
  const double rho = std::hypot(mu.mu(0), mu.mu(1));
  const double phi = rho <= 1e-14 * norm ? 0.0 : std::atan2(mu.mu(1), mu.mu(0));
  const bool outside = chart.id == Chart::North ? theta > kPi - chart.exclusion : theta < chart.exclusion;
  if (outside) {
    std::ostringstream os;
    os << "polar angle " << theta << " lies in the excluded cap of the "
       << (chart.id == Chart::North ? "north" : "south") << " chart";
    throw Error(ErrorCode::ChartExit, op, os.str());
  }
  return SectionPoint{section_element(rep, theta, phi, chart.id), theta, phi};
}

// ---------------------------------------------------------------------------
// Action

std::vector<double> action_along_path(const LieAlgebraRep& rep, const HamiltonianSchedule& schedule,
                                      const FiducialVector& fiducial, const std::vector<GroupElement>& path,
                                      const std::vector<double>& times, const Tolerances& tol) {
  constexpr const char* op = "action_along_path";
  if (path.size() != times.size() || path.empty()) {
    throw Error(ErrorCode::InvalidArgument, op, "path and time grid must be non-empty and of equal length");
  }
  const Vector& zero = fiducial.amplitudes();
  std::vector<double> action(times.size(), 0.0);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double dt = times[k + 1] - times[k];
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, op, "times must increase");
    const Matrix& g0 = path[k].matrix();
    const Matrix& g1 = path[k + 1].matrix();

    const Matrix log_step = unitary_log(g0.adjoint() * g1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(log_step, Eigen::EigenvaluesOnly);
    const double jump = es.eigenvalues().cwiseAbs().maxCoeff();
    if (jump > tol.max_section_jump) {
      std::ostringstream os;
      os << "section jumps by " << jump << " rad between samples" << at_time(times[k]);
      throw Error(ErrorCode::NonsmoothPath, op, os.str());
    }
    const Matrix g_mid = g0 * hermitian_exp(log_step, -0.5);

    const Vector mid_zero = g_mid * zero;
    const Complex overlap = mid_zero.dot((g1 - g0) * zero);
    const Complex berry_increment = Complex(0.0, 1.0) * overlap;
    if (std::abs(berry_increment.imag()) > tol.berry_imaginary * dt) {
      std::ostringstream os;
      os << "Berry increment has imaginary part " << berry_increment.imag() << at_time(times[k]);
      throw Error(ErrorCode::NonsmoothPath, op, os.str());
    }
    const double t_mid = 0.5 * (times[k] + times[k + 1]);
    const Matrix h = rep.combine(schedule.coefficients_at(t_mid));
    const double energy = mid_zero.dot(h * mid_zero).real();
    action[k + 1] = action[k] + berry_increment.real() - energy * dt;
  }
  return action;
}

// ---------------------------------------------------------------------------
// van Hove

double TrajectoryRecord::max_fidelity_deficit() const {
  double worst = 0.0;
  for (double f : fidelity) worst = std::max(worst, 1.0 - f);
  return worst;
}

double TrajectoryRecord::max_abs_phase_residual() const {
  double worst = 0.0;
  for (double r : phase_residual) worst = std::max(worst, std::abs(r));
  return worst;
}

TrajectoryRecord van_hove_check(const LieAlgebraRep& rep, const FiducialVector& fiducial,
                                const HamiltonianSchedule& schedule, const VanHoveOptions& options,
                                const Tolerances& tol) {
  constexpr const char* op = "van_hove_check";
  require_su2(rep, op);
  const MomentVector mu_fid = moment_map(rep, fiducial, tol);
  if (mu_fid.mu.norm() <= tol.degenerate_moment) {
    throw Error(ErrorCode::DegenerateOrbit, op, "fiducial has zero moment; the orbit is a point");
  }
  if (!is_canonical(mu_fid, tol)) {
    throw Error(ErrorCode::CanonicalizationRequired, op, "fiducial moment must point along +e_3");
  }

  const GroupElement g_start = section_element(rep, options.tilt_theta, options.tilt_phi, options.chart.id);
  const Vector psi_start = g_start.matrix() * fiducial.amplitudes();
  const MomentVector mu_start =
      moment_map(rep, FiducialVector::normalized(rep, psi_start), tol);

  const QuantumTrajectory quantum =
      propagate_quantum(rep, schedule, psi_start, options.dt, options.t_final, tol);
  const MomentTrajectory classical = flow_coadjoint(rep, schedule, mu_start, options.dt, options.t_final);

  TrajectoryRecord rec;
  rec.chart = options.chart.id;
  rec.times = quantum.times;
  rec.psi = quantum.states;
  rec.mu = classical.mu;
  const std::size_t steps = rec.times.size();

  std::vector<GroupElement> path;
  path.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    try {
      SectionPoint p = section_su2(rep, MomentVector{classical.mu[k]}, options.chart, tol);
      rec.theta.push_back(p.theta);
      rec.phi.push_back(p.phi);
      path.push_back(std::move(p.g));
    } catch (const Error& e) {
      throw Error(e.code(), op, e.detail() + at_time(rec.times[k]));
    }
  }
  try {
    rec.action = action_along_path(rep, schedule, fiducial, path, rec.times, tol);
  } catch (const Error& e) {
    throw Error(e.code(), op, e.detail());
  }

  rec.fidelity.reserve(steps);
  rec.phase_residual.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const Vector classical_state = path[k].matrix() * fiducial.amplitudes();
    const Complex overlap = classical_state.dot(rec.psi[k]);
    rec.fidelity.push_back(std::abs(overlap));
    rec.phase_residual.push_back(wrap_phase(std::arg(overlap) - rec.action[k]));
  }
  return rec;
}

}  // namespace coherent
