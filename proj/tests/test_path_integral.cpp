#include <gtest/gtest.h>

#include <numbers>

#include "coherent/coherent_family.hpp"
#include "coherent/errors.hpp"
#include "coherent/path_integral.hpp"
#include "oracles.hpp"

using namespace coherent;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

LieAlgebraRep spin(int twice) { return build_spin_rep(Spin::from_twice(twice)); }

RealVector vec3(double a, double b, double c) {
  RealVector v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST(Identity, ExactAtThresholdForSeveralFiducials) {
  std::mt19937_64 rng(53);
  for (int tj : {1, 2, 3, 4}) {
    const auto rep = spin(tj);
    const HaarQuadrature q = haar_quadrature(rep, exactness_threshold(rep));
    std::vector<FiducialVector> fiducials{highest_weight_fiducial(rep)};
    for (int k = 0; k < 3; ++k) fiducials.push_back(FiducialVector::make(rep, oracle::random_state(rng, tj + 1)));
    if (tj == 2) fiducials.push_back(matsumoto_fiducial(rep));
    for (const auto& psi : fiducials) {
      const IdentityCheckResult r = identity_resolution(rep, psi, q);
      EXPECT_TRUE(r.orders_exact);
      EXPECT_TRUE(r.warnings.empty());
      EXPECT_NEAR(r.constant, 1.0 / (tj + 1), 1e-14);
      EXPECT_LE(r.deviation, 1e-12);
      EXPECT_LT(max_abs(r.b - Matrix::Identity(tj + 1, tj + 1) / double(tj + 1)), 1e-12);
    }
  }
}

TEST(Identity, BelowThresholdWarnsAndDeviates) {
  const auto rep = spin(2);
  const IdentityCheckResult r = identity_resolution(rep, matsumoto_fiducial(rep), haar_quadrature(rep, {2, 2, 2}));
  EXPECT_FALSE(r.orders_exact);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_GT(r.deviation, 1e-6);
}

TEST(Berry, CoefficientEqualsMomentNorm) {
  std::mt19937_64 rng(59);
  for (int tj : {1, 2, 3}) {
    const auto rep = spin(tj);
    for (int k = 0; k < 4; ++k) {
      const FiducialVector psi = FiducialVector::make(rep, oracle::random_state(rng, tj + 1));
      const Canonicalization c = canonicalize(rep, psi);
      const BerryProfile p = berry_connection(rep, c.canonical, default_theta_grid());
      EXPECT_NEAR(p.coefficient, c.moment_norm, 1e-8);
      EXPECT_LT(p.fit_residual, 1e-8);
    }
  }
}

TEST(Berry, ProfileFollowsMonopoleForm) {
  const auto rep = spin(2);
  const BerryProfile p = berry_connection(rep, matsumoto_fiducial(rep), default_theta_grid(9));
  ASSERT_EQ(p.a_phi.size(), 9u);
  for (std::size_t k = 0; k < p.theta_grid.size(); ++k) {
    EXPECT_NEAR(p.a_phi[k], (std::cos(p.theta_grid[k]) - 1.0) / 3.0, 1e-8);
  }
}

TEST(Berry, DiracVerdicts) {
  const auto one = spin(2);
  const DiracVerdict m = dirac_check(one, matsumoto_fiducial(one));
  EXPECT_NEAR(m.coefficient, 1.0 / 3.0, 1e-8);
  EXPECT_FALSE(m.admissible);
  EXPECT_DOUBLE_EQ(m.nearest_admissible, 0.5);
  for (int tj : {1, 2, 3, 4}) {
    const auto rep = spin(tj);
    const DiracVerdict v = dirac_check(rep, highest_weight_fiducial(rep));
    EXPECT_NEAR(v.coefficient, 0.5 * tj, 1e-8);
    EXPECT_TRUE(v.admissible);
  }
}

TEST(Berry, RequiresCanonicalInteriorGrid) {
  const auto rep = spin(2);
  Vector v(3);
  v << 0.6, 0.8, 0.0;
  EXPECT_EQ(code_of([&] { berry_connection(rep, FiducialVector::make(rep, v), default_theta_grid()); }),
            ErrorCode::CanonicalizationRequired);
  EXPECT_EQ(code_of([&] { berry_connection(rep, highest_weight_fiducial(rep), {0.5, std::numbers::pi}); }),
            ErrorCode::ChartExit);
}

TEST(PathIntegral, ExactKernelReproducesPropagator) {
  const auto rep = spin(1);
  const FiducialVector psi = highest_weight_fiducial(rep);
  const auto s = HamiltonianSchedule::constant(vec3(0, 0, 1), 1.0);
  const HaarQuadrature q = haar_quadrature(rep, exactness_threshold(rep));
  const GroupElement gf = exp_element(rep, vec3(0.3, 0.2, 0.1));
  const ConvergenceRecord r = discrete_propagator(rep, psi, s, GroupElement::identity(rep), gf, {1, 2, 4, 8}, q, KernelMode::Exact);
  // Oracle: direct matrix element with the closed-form evolution.
  const Matrix u = exp_element(rep, vec3(0, 0, 1.0)).matrix();
  const Complex expected = (gf.matrix() * psi.amplitudes()).dot(u * psi.amplitudes());
  EXPECT_LT(std::abs(r.exact_amplitude - expected), 1e-14);
  for (double e : r.errors) EXPECT_LE(e, 1e-10);
}

TEST(PathIntegral, ExactKernelWithPiecewiseScheduleSpinOne) {
  const auto rep = spin(2);
  std::mt19937_64 rng(61);
  const FiducialVector psi = FiducialVector::make(rep, oracle::random_state(rng, 3));
  const auto s = HamiltonianSchedule::make({0.0, 0.3, 1.0}, {vec3(0.5, 0, 1), vec3(0, -0.7, 0.2)});
  const HaarQuadrature q = haar_quadrature(rep, exactness_threshold(rep));
  const ConvergenceRecord r = discrete_propagator(rep, psi, s, exp_element(rep, vec3(0.1, 0.2, 0.3)), exp_element(rep, vec3(-0.4, 0, 0.9)),
                                                  {1, 3, 5, 8}, q, KernelMode::Exact);
  for (double e : r.errors) EXPECT_LE(e, 1e-10);
}

TEST(PathIntegral, FirstOrderKernelConvergesLinearly) {
  const auto rep = spin(1);
  const auto s = HamiltonianSchedule::constant(vec3(0, 0, 1), 1.0);
  const HaarQuadrature q = haar_quadrature(rep, exactness_threshold(rep));
  const ConvergenceRecord r = discrete_propagator(rep, highest_weight_fiducial(rep), s, GroupElement::identity(rep),
                                                  exp_element(rep, vec3(0.3, 0.2, 0.1)), {8, 16, 32, 64}, q, KernelMode::FirstOrder);
  for (std::size_t k = 1; k < r.errors.size(); ++k) EXPECT_LT(r.errors[k], r.errors[k - 1]);
  const double order = fitted_order(r.slice_counts, r.errors);
  EXPECT_GE(order, 0.7);
  EXPECT_LE(order, 1.3);
}

TEST(PathIntegral, Guards) {
  const auto rep = spin(2);
  const auto s = HamiltonianSchedule::constant(vec3(0, 0, 1), 1.0);
  const FiducialVector psi = matsumoto_fiducial(rep);
  const GroupElement e = GroupElement::identity(rep);
  EXPECT_EQ(code_of([&] { discrete_amplitude(rep, psi, s, e, e, 4, haar_quadrature(rep, {2, 5, 5}), KernelMode::Exact); }),
            ErrorCode::QuadratureUnderresolved);
  const HaarQuadrature big = haar_quadrature(rep, {20, 40, 40});
  EXPECT_EQ(code_of([&] { discrete_amplitude(rep, psi, s, e, e, 16, big, KernelMode::Exact); }), ErrorCode::CostLimit);
  EXPECT_EQ(code_of([&] { discrete_amplitude(rep, psi, s, e, e, 0, haar_quadrature(rep, {3, 5, 5}), KernelMode::Exact); }),
            ErrorCode::InvalidArgument);
}

TEST(PathIntegral, MatsumotoFirstOrderCompletes) {
  const auto rep = spin(2);
  const HaarQuadrature q = haar_quadrature(rep, exactness_threshold(rep));
  const ConvergenceRecord r = discrete_propagator(rep, matsumoto_fiducial(rep), HamiltonianSchedule::constant(vec3(0, 0, 1), 1.0),
                                                  GroupElement::identity(rep), GroupElement::identity(rep), {8, 16, 32, 64}, q,
                                                  KernelMode::FirstOrder);
  ASSERT_EQ(r.amplitudes.size(), 4u);
  for (const Complex& a : r.amplitudes) EXPECT_TRUE(std::isfinite(a.real()) && std::isfinite(a.imag()));
}

TEST(FittedOrder, RecoversPowerLaw) {
  EXPECT_NEAR(fitted_order({8, 16, 32, 64}, {3.0 / 8, 3.0 / 16, 3.0 / 32, 3.0 / 64}), 1.0, 1e-12);
  EXPECT_NEAR(fitted_order({1, 2, 4}, {1.0, 0.25, 0.0625}), 2.0, 1e-12);
  EXPECT_EQ(code_of([] { fitted_order({1}, {1.0}); }), ErrorCode::InvalidArgument);
}
