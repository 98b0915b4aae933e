#include "coherent/path_integral.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "coherent/errors.hpp"

namespace coherent {

namespace {

constexpr double kPi = std::numbers::pi;

// Evolution over [a, b] and the time-averaged coefficient vector on it.
struct Slice {
  Matrix propagator;
  RealVector mean_h;
};

Slice make_slice(const LieAlgebraRep& rep, const HamiltonianSchedule& schedule, double a, double b) {
  const auto& bp = schedule.breakpoints();
  Slice s{Matrix::Identity(rep.rep_dim(), rep.rep_dim()), RealVector::Zero(rep.algebra_dim())};
  for (int seg = 0; seg < schedule.segments(); ++seg) {
    const double lo = std::max(a, bp[static_cast<std::size_t>(seg)]);
    const double hi = std::min(b, bp[static_cast<std::size_t>(seg) + 1]);
    if (hi <= lo) continue;
    const RealVector& h = schedule.coefficients()[static_cast<std::size_t>(seg)];
    s.propagator = hermitian_exp(rep.combine(h), hi - lo) * s.propagator;
    s.mean_h += (hi - lo) / (b - a) * h;
  }
  return s;
}

// K(x, y) between the columns of `left` and `right`.
Matrix slice_kernel(const LieAlgebraRep& rep, const Slice& slice, double eps, const Matrix& left,
                    const Matrix& right, KernelMode mode, const Tolerances& tol) {
  if (mode == KernelMode::Exact) return left.adjoint() * slice.propagator * right;
  const Matrix overlap = left.adjoint() * right;
  const Matrix energy = left.adjoint() * rep.combine(slice.mean_h) * right;
  Matrix k(overlap.rows(), overlap.cols());
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      const Complex o = overlap(i, j);
      k(i, j) = std::abs(o) <= tol.kernel_overlap_floor
                    ? Complex(0.0)
                    : o * std::exp(Complex(0.0, -eps) * energy(i, j) / o);
    }
  }
  return k;
}

}  // namespace

IdentityCheckResult identity_resolution(const LieAlgebraRep& rep, const FiducialVector& psi,
                                        const HaarQuadrature& quad) {
  if (psi.size() != rep.rep_dim()) {
    throw Error(ErrorCode::InvalidArgument, "identity_resolution", "fiducial has wrong dimension");
  }
  const int d = rep.rep_dim();
  IdentityCheckResult out;
  out.orders = quad.orders;
  out.orders_exact = meets_exactness(rep, quad.orders);
  if (!out.orders_exact) {
    const auto need = exactness_threshold(rep);
    std::ostringstream os;
    os << "quadrature orders (" << quad.orders.n_beta << ", " << quad.orders.n_alpha << ", "
       << quad.orders.n_gamma << ") are below the exactness threshold (" << need.n_beta << ", "
       << need.n_alpha << ", " << need.n_gamma << ")";
    out.warnings.push_back(os.str());
  }
  out.b = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    const Vector v = quad.nodes[i].matrix() * psi.amplitudes();
    out.b.noalias() += quad.weights[i] * (v * v.adjoint());
  }
  out.constant = out.b.trace().real() / d;
  Matrix diff = out.b;
  diff.diagonal().array() -= out.constant;
  out.deviation = max_abs(diff);
  return out;
}

std::vector<double> default_theta_grid(int count, double margin) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    grid.push_back(margin + (kPi - 2.0 * margin) * (k + 0.5) / count);
  }
  return grid;
}

BerryProfile berry_connection(const LieAlgebraRep& rep, const FiducialVector& psi_canonical,
                              const std::vector<double>& theta_grid, const Tolerances& tol) {
  constexpr const char* op = "berry_connection";
  if (!rep.is_su2()) throw Error(ErrorCode::UnsupportedAlgebra, op, "needs an su(2) irrep");
  const MomentVector mu = moment_map(rep, psi_canonical, tol);
  if (!is_canonical(mu, tol)) {
    std::ostringstream os;
    os << "moment (" << mu.mu(0) << ", " << mu.mu(1) << ", " << mu.mu(2) << ") is not along +e_3";
    throw Error(ErrorCode::CanonicalizationRequired, op, os.str());
  }
  if (theta_grid.empty()) throw Error(ErrorCode::InvalidArgument, op, "empty theta grid");

  BerryProfile out;
  out.theta_grid = theta_grid;
  const Vector& zero = psi_canonical.amplitudes();
  const double step = tol.fd_step;
  double num = 0.0;
  double den = 0.0;
  for (double theta : theta_grid) {
    if (!(theta > tol.chart_exclusion && theta < kPi - tol.chart_exclusion)) {
      std::ostringstream os;
      os << "theta = " << theta << " lies outside the north chart interior";
      throw Error(ErrorCode::ChartExit, op, os.str());
    }
    const Matrix g = section_element(rep, theta, 0.0, Chart::North).matrix();
    const Matrix plus = section_element(rep, theta, step, Chart::North).matrix();
    const Matrix minus = section_element(rep, theta, -step, Chart::North).matrix();
    const Complex value = Complex(0.0, 1.0) * (g * zero).dot((plus - minus) * zero) / (2.0 * step);
    out.a_phi.push_back(value.real());
    const double u = std::cos(theta) - 1.0;
    num += value.real() * u;
    den += u * u;
  }
  out.coefficient = num / den;
  for (std::size_t k = 0; k < theta_grid.size(); ++k) {
    const double u = std::cos(theta_grid[k]) - 1.0;
    out.fit_residual = std::max(out.fit_residual, std::abs(out.a_phi[k] - out.coefficient * u));
  }
  return out;
}

DiracVerdict dirac_check(const LieAlgebraRep& rep, const FiducialVector& psi, const Tolerances& tol) {
  const Canonicalization canon = canonicalize(rep, psi, tol);
  const BerryProfile profile = berry_connection(rep, canon.canonical, default_theta_grid(), tol);
  DiracVerdict v;
  v.coefficient = profile.coefficient;
  const double twice = 2.0 * v.coefficient;
  v.nearest_admissible = std::round(twice) / 2.0;
  v.gap = std::abs(v.coefficient - v.nearest_admissible);
  v.admissible = std::abs(twice - std::round(twice)) <= 2.0 * tol.dirac_gap;
  return v;
}

Complex discrete_amplitude(const LieAlgebraRep& rep, const FiducialVector& psi,
                           const HamiltonianSchedule& schedule, const GroupElement& g_initial,
                           const GroupElement& g_final, int slices, const HaarQuadrature& quad,
                           KernelMode mode, const Tolerances& tol) {
  constexpr const char* op = "discrete_propagator";
  if (slices < 1) throw Error(ErrorCode::InvalidArgument, op, "slice count must be >= 1");
  if (!meets_exactness(rep, quad.orders)) {
    const auto need = exactness_threshold(rep);
    std::ostringstream os;
    os << "quadrature orders must be at least (" << need.n_beta << ", " << need.n_alpha << ", "
       << need.n_gamma << ") for an N-fold product";
    throw Error(ErrorCode::QuadratureUnderresolved, op, os.str());
  }
  const auto m = static_cast<double>(quad.nodes.size());
  if (m * m > kMaxKernelEntries || slices * m * m > kMaxKernelWork) {
    std::ostringstream os;
    os << slices << " slices on " << quad.nodes.size() << " quadrature points exceed the kernel cost limit";
    throw Error(ErrorCode::CostLimit, op, os.str());
  }

  const int d = rep.rep_dim();
  Matrix grid(d, static_cast<Eigen::Index>(quad.nodes.size()));
  RealVector measure(static_cast<Eigen::Index>(quad.nodes.size()));
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    grid.col(static_cast<Eigen::Index>(i)) = quad.nodes[i].matrix() * psi.amplitudes();
    measure(static_cast<Eigen::Index>(i)) = d * quad.weights[i];
  }
  const Matrix initial = g_initial.matrix() * psi.amplitudes();
  const Matrix final_state = g_final.matrix() * psi.amplitudes();

  const double t0 = schedule.start();
  const double total = schedule.end() - t0;
  const double eps = total / slices;
  auto slice_at = [&](int s) {
    const double a = t0 + eps * s;
    const double b = s + 1 == slices ? schedule.end() : t0 + eps * (s + 1);
    return make_slice(rep, schedule, a, b);
  };

  if (slices == 1) {
    return slice_kernel(rep, slice_at(0), eps, final_state, initial, mode, tol)(0, 0);
  }

  // Interior kernels are cached per schedule segment when the slice lies inside one.
  std::map<int, Matrix> interior;
  Vector amp = slice_kernel(rep, slice_at(0), eps, grid, initial, mode, tol).col(0);
  for (int s = 1; s + 1 < slices; ++s) {
    const double a = t0 + eps * s;
    const double b = t0 + eps * (s + 1);
    const int seg = schedule.segment_at(a);
    const bool single = b <= schedule.breakpoints()[static_cast<std::size_t>(seg) + 1];
    const Vector weighted = measure.cast<Complex>().cwiseProduct(amp);
    if (single) {
      auto it = interior.find(seg);
      if (it == interior.end()) {
        it = interior.emplace(seg, slice_kernel(rep, make_slice(rep, schedule, a, b), eps, grid, grid, mode, tol)).first;
      }
      amp = it->second * weighted;
    } else {
      amp = slice_kernel(rep, slice_at(s), eps, grid, grid, mode, tol) * weighted;
    }
  }
  const Vector weighted = measure.cast<Complex>().cwiseProduct(amp);
  return (slice_kernel(rep, slice_at(slices - 1), eps, final_state, grid, mode, tol) * weighted)(0, 0);
}

ConvergenceRecord discrete_propagator(const LieAlgebraRep& rep, const FiducialVector& psi,
                                      const HamiltonianSchedule& schedule, const GroupElement& g_initial,
                                      const GroupElement& g_final, const std::vector<int>& slice_counts,
                                      const HaarQuadrature& quad, KernelMode mode, const Tolerances& tol) {
  ConvergenceRecord rec;
  rec.kernel_mode = mode;
  rec.slice_counts = slice_counts;
  rec.total_time = schedule.end() - schedule.start();
  rec.grid_size = static_cast<int>(quad.nodes.size());

  const Vector initial = g_initial.matrix() * psi.amplitudes();
  const Vector final_state = g_final.matrix() * psi.amplitudes();
  // One exact step per schedule segment.
  const QuantumTrajectory exact = propagate_quantum(rep, schedule, initial, rec.total_time, std::nullopt, tol);
  rec.exact_amplitude = final_state.dot(exact.states.back());

  for (int n : slice_counts) {
    const Complex a = discrete_amplitude(rep, psi, schedule, g_initial, g_final, n, quad, mode, tol);
    rec.amplitudes.push_back(a);
    rec.errors.push_back(std::abs(a - rec.exact_amplitude));
  }
  return rec;
}

double fitted_order(const std::vector<int>& slice_counts, const std::vector<double>& errors) {
  if (slice_counts.size() != errors.size() || slice_counts.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "fitted_order", "need at least two (N, error) pairs");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(errors.size());
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const double x = std::log(static_cast<double>(slice_counts[k]));
    const double y = std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace coherent
