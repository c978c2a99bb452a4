#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lnstab/catalog.hpp"
#include "lnstab/periodic.hpp"
#include "lnstab/quadrature.hpp"
#include "oracles.hpp"

using namespace lnstab;

namespace {

std::vector<NormKind> all_kinds(const SystemDef& sys) {
  std::vector<NormKind> k{NormKind::one(), NormKind::two(), NormKind::inf()};
  std::mt19937_64 rng(sys.dimension());
  k.push_back(NormKind::weighted(oracle::random_matrix(rng, sys.dimension()) +
                                 Matrix::identity(sys.dimension()) * 3.0));
  return k;
}

}  // namespace

TEST(Quadrature, Polynomials) {
  EXPECT_NEAR(adaptive_simpson([](double x) { return x * x * x; }, 0.0, 2.0, 1e-12).value, 4.0, 1e-12);
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, oracle::pi, 1e-12).value, 2.0, 1e-11);
  EXPECT_EQ(adaptive_simpson([](double) { return 1.0; }, 1.0, 1.0, 1e-9).value, 0.0);
  EXPECT_THROW(adaptive_simpson([](double) { return 1.0; }, 1.0, 0.0, 1e-9), InputError);
}

TEST(Quadrature, KinkedIntegrandAndBudget) {
  auto f = [](double x) { return std::abs(std::cos(x)); };
  EXPECT_NEAR(adaptive_simpson(f, 0.0, 2 * oracle::pi, 1e-10).value, 4.0, 1e-9);
  EXPECT_THROW(adaptive_simpson(f, 0.0, 2 * oracle::pi, 1e-14, 50), NumericError);
}

TEST(Quadrature, VectorValued) {
  auto f = [](double x) { return Vector{1.0, x}; };
  const auto r = adaptive_simpson(f, 0.0, 3.0, 1e-12);
  EXPECT_NEAR(r.value[0], 3.0, 1e-13);
  EXPECT_NEAR(r.value[1], 4.5, 1e-13);
}

TEST(System, ValidationErrors) {
  EXPECT_THROW(SystemDef::from_strings(2, {"1", "2", "3"}, 1.0), InputError);
  EXPECT_THROW(SystemDef::from_strings(1, {"1"}, 0.0), InputError);
  EXPECT_THROW(SystemDef::from_strings(1, {"1"}, 1.0, -1.0), InputError);
  EXPECT_THROW(SystemDef::from_strings(1, {"1+"}, 1.0), InputError);
  EXPECT_THROW(SystemDef::from_strings(0, {}, 1.0), InputError);
}

TEST(System, Periodicity) {
  EXPECT_NO_THROW(validate_periodicity(SystemDef::from_strings(1, {"cos(3*t)"}, 2 * oracle::pi / 3)));
  EXPECT_THROW(validate_periodicity(SystemDef::from_strings(1, {"-1 + sin(t)"}, 1.0)), InputError);
  EXPECT_THROW(validate_periodicity(SystemDef::from_strings(1, {"t"}, 1.0)), InputError);
}

TEST(System, MatrixAtIsRowMajor) {
  const auto sys = SystemDef::from_strings(2, {"1", "t", "2*t", "3"}, 1.0);
  EXPECT_EQ(sys.matrix_at(2.0), (Matrix{{1, 2}, {4, 3}}));
}

TEST(PiIntegral, Examples) {
  const auto lti = SystemDef::constant(Matrix::diagonal({-1.0, -2.0}));
  EXPECT_NEAR(pi_integral(lti, NormKind::two(), Sign::plus, 2.5), -2.5, 1e-12);
  EXPECT_NEAR(pi_integral(lti, NormKind::two(), Sign::minus, 2.5), 5.0, 1e-12);
  const auto sys = catalog::example1(1.5).system;
  EXPECT_NEAR(pi_integral(sys, NormKind::two(), Sign::plus, 2 * oracle::pi), oracle::pi, 1e-9);
  // mu_1 integrand of the second example integrates to 15/pi - 5.5 per unit time
  const auto ex2 = catalog::example2().system;
  EXPECT_NEAR(pi_integral(ex2, NormKind::one(), Sign::plus, oracle::pi / 6), oracle::pi / 6 * (15 / oracle::pi - 5.5),
              1e-9);
  EXPECT_THROW(pi_integral(ex2, NormKind::one(), Sign::plus, -1.0), InputError);
}

TEST(PiProfile, MatchesDirectQuadrature) {
  const auto ex2 = catalog::example2().system;
  const PiProfile p(ex2, NormKind::two(), Sign::plus);
  for (double t : {0.0, 0.01, 0.13, 0.5236, 0.9, 3.3})
    EXPECT_NEAR(p(t), pi_integral(ex2, NormKind::two(), Sign::plus, t), 1e-8) << t;
}

TEST(Rates, SecondExampleMuOneAgainstOracle) {
  const auto r = rate_summary(catalog::example2().system, NormKind::one());
  const auto up = oracle::deviation([](double t) { return oracle::ex2_mu_one(t, +1); }, oracle::pi / 6);
  const auto dn = oracle::deviation([](double t) { return oracle::ex2_mu_one(t, -1); }, oracle::pi / 6);
  EXPECT_NEAR(r.lambda_plus, 15 / oracle::pi - 5.5, 1e-9);
  EXPECT_NEAR(r.lambda_plus, up.lambda, 1e-6);
  EXPECT_NEAR(r.lambda_minus, dn.lambda, 1e-6);
  EXPECT_NEAR(r.delta_u_plus, up.upper, 1e-6);
  EXPECT_NEAR(r.delta_l_plus, up.lower, 1e-6);
  EXPECT_NEAR(r.delta_u_minus, dn.upper, 1e-6);
  EXPECT_NEAR(r.delta_l_minus, dn.lower, 1e-6);
}

TEST(Rates, SecondExampleMuTwoAgainstOracle) {
  const auto r = rate_summary(catalog::example2().system, NormKind::two());
  const auto up = oracle::deviation([](double t) { return oracle::ex2_mu_two(t, +1); }, oracle::pi / 6);
  const auto dn = oracle::deviation([](double t) { return oracle::ex2_mu_two(t, -1); }, oracle::pi / 6);
  EXPECT_NEAR(r.lambda_plus, -13 + 30 / oracle::pi, 1e-9);
  EXPECT_NEAR(r.lambda_minus, 13 + 30 / oracle::pi, 1e-9);
  EXPECT_NEAR(r.delta_u_plus, up.upper, 1e-6);
  EXPECT_NEAR(r.delta_l_plus, up.lower, 1e-6);
  EXPECT_NEAR(r.delta_u_minus, dn.upper, 1e-6);
  EXPECT_NEAR(r.delta_l_minus, dn.lower, 1e-6);
}

TEST(Rates, ConstantSystemHasNoDeviation) {
  const auto r = rate_summary(SystemDef::constant(Matrix{{-1, 3}, {0, -2}}), NormKind::inf());
  EXPECT_NEAR(r.lambda_plus, 2.0, 1e-12);
  EXPECT_NEAR(r.lambda_minus, 4.0, 1e-12);  // rows of -A: 1+3, 2
  EXPECT_NEAR(r.delta_u_plus, 0.0, 1e-12);
  EXPECT_NEAR(r.delta_l_plus, 0.0, 1e-12);
}

TEST(Classify, Examples) {
  const double tol = 1e-8;
  EXPECT_EQ(classify(catalog::example2().system, NormKind::one(), tol).classification, Classification::ues);
  EXPECT_EQ(classify(catalog::example1(1.0).system, NormKind::two(), tol).classification, Classification::us);
  EXPECT_EQ(classify(catalog::example1(1.5).system, NormKind::two(), tol).classification,
            Classification::inconclusive);
  EXPECT_EQ(classify(catalog::scalar_unstable().system, NormKind::one(), tol).classification,
            Classification::unstable);
  EXPECT_EQ(classify(catalog::lti_jordan_marginal().system, NormKind::two(), tol).classification,
            Classification::inconclusive);
  EXPECT_THROW(classify(rate_summary(catalog::example2().system, NormKind::one()), -1.0), InputError);
}

TEST(Classify, CertificatesOfTheUesVerdict) {
  const auto v = classify(catalog::example1(0.5).system, NormKind::two(), 1e-8);
  ASSERT_EQ(v.classification, Classification::ues);
  ASSERT_TRUE(v.k && v.alpha_tilde);
  EXPECT_NEAR(*v.alpha_tilde, 0.5, 1e-9);
  EXPECT_NEAR(*v.k, 1.0, 1e-9);  // mu_2 is constant in t
  EXPECT_FALSE(v.uniform_bound);
}

TEST(Classify, UniformBoundOfTheUsVerdict) {
  const auto v = classify(catalog::example1(1.0).system, NormKind::two(), 1e-8);
  ASSERT_TRUE(v.uniform_bound);
  EXPECT_NEAR(*v.uniform_bound, 1.0, 1e-9);
  EXPECT_FALSE(v.k);
}

TEST(Classify, ZeroTolBand) {
  RateSummary r;
  r.kind = NormKind::two();
  r.period = 1.0;
  r.lambda_plus = 5e-9;
  EXPECT_EQ(classify(r, 1e-8).classification, Classification::us);
  EXPECT_EQ(classify(r, 1e-9).classification, Classification::inconclusive);
  r.lambda_plus = -5e-9;
  EXPECT_EQ(classify(r, 1e-9).classification, Classification::ues);
  r.lambda_plus = 1.0;
  r.lambda_minus = -1.0;
  EXPECT_EQ(classify(r, 1e-9).classification, Classification::unstable);
}

TEST(FceStrip, Examples) {
  const auto s = fce_strip(SystemDef::constant(Matrix::diagonal({-1.0, -2.0})), NormKind::two());
  EXPECT_NEAR(s.lower, -2.0, 1e-12);
  EXPECT_NEAR(s.upper, -1.0, 1e-12);
  const auto e = fce_strip(catalog::example2().system, NormKind::two());
  EXPECT_NEAR(e.lower, -13 - 30 / oracle::pi, 1e-9);
  EXPECT_NEAR(e.upper, -13 + 30 / oracle::pi, 1e-9);
}

TEST(FrozenTime, Examples) {
  const auto neg = frozen_time_check(SystemDef::constant(Matrix::identity(2) * -10.0), 16);
  ASSERT_TRUE(neg.applicable);
  EXPECT_NEAR(neg.m, 10.0, 1e-12);
  EXPECT_NEAR(*neg.alpha, 10.0, 1e-9);
  EXPECT_FALSE(neg.c1_satisfied);
  EXPECT_TRUE(neg.c2_satisfied);
  EXPECT_EQ(neg.sup_a_dot, 0.0);

  const auto ex2 = frozen_time_check(catalog::example2().system, 64);
  EXPECT_FALSE(ex2.applicable);
  EXPECT_FALSE(ex2.c1_satisfied);
  EXPECT_THROW(frozen_time_check(catalog::example2().system, 8), InputError);
}

TEST(FrozenTime, FirstExampleSampleIsIndependentOfTime) {
  for (double t : {0.0, 0.4, oracle::pi / 2}) {
    const auto s = frozen_time_sample(catalog::example1(1.5).system, t);
    EXPECT_NEAR(s.norm_a_dot, 1.5, 1e-6);
    ASSERT_EQ(s.spectrum.size(), 2u);
    EXPECT_NEAR(s.spectrum[0].real(), -0.25, 1e-9);
    EXPECT_NEAR(s.spectrum[1].real(), -0.25, 1e-9);
  }
}

TEST(Barrier, ZeroSystemGivesZeros) {
  const auto rows = barrier_series(SystemDef::constant(Matrix(2)), NormKind::two(), 3.0, 7);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows.back().t, 3.0);
  for (const auto& r : rows) {
    EXPECT_EQ(r.pi_plus, 0.0);
    EXPECT_EQ(r.pi_minus, 0.0);
    EXPECT_EQ(r.low_plus, 0.0);
    EXPECT_EQ(r.up_minus, 0.0);
  }
  EXPECT_THROW(barrier_series(SystemDef::constant(Matrix(2)), NormKind::two(), 0.0, 7), InputError);
  EXPECT_THROW(barrier_series(SystemDef::constant(Matrix(2)), NormKind::two(), 1.0, 1), InputError);
}

// Every catalog instance under every norm: the barriers enclose Pi*,
// Pi+ >= -Pi-, and Pi* advances by Pi*(t0 + T) per period.
TEST(Property, BarrierEnclosureAndPeriodReduction) {
  for (const auto& entry : catalog::reference_instances()) {
    const auto& sys = entry.system;
    for (const auto& k : all_kinds(sys)) {
      const double t_end = sys.t0() + 3 * sys.period();
      const auto rows = barrier_series(sys, k, t_end, 256);
      const PiProfile plus(sys, k, Sign::plus);
      const double per = plus.period_value();
      for (const auto& r : rows) {
        const double slack = 1e-8 * (1 + std::abs(r.pi_plus) + std::abs(r.pi_minus));
        EXPECT_LE(r.low_plus, r.pi_plus + slack) << entry.name << " " << k.name() << " t=" << r.t;
        EXPECT_LE(r.pi_plus, r.up_plus + slack) << entry.name << " " << k.name() << " t=" << r.t;
        EXPECT_LE(r.low_minus, r.pi_minus + slack) << entry.name << " " << k.name() << " t=" << r.t;
        EXPECT_LE(r.pi_minus, r.up_minus + slack) << entry.name << " " << k.name() << " t=" << r.t;
        EXPECT_GE(r.pi_plus, -r.pi_minus - slack) << entry.name << " " << k.name() << " t=" << r.t;
        if (r.t + sys.period() <= t_end) {
          EXPECT_NEAR(plus(r.t + sys.period()), plus(r.t) + per, 1e-8 * (1 + std::abs(per)));
        }
      }
    }
  }
}

TEST(Property, DeltaSigns) {
  for (const auto& entry : catalog::reference_instances())
    for (const auto& k : all_kinds(entry.system)) {
      const auto r = rate_summary(entry.system, k);
      EXPECT_GE(r.delta_u_plus, 0.0);
      EXPECT_LE(r.delta_l_plus, 0.0);
      EXPECT_GE(r.delta_u_minus, 0.0);
      EXPECT_LE(r.delta_l_minus, 0.0);
      EXPECT_LE(-r.lambda_minus, r.lambda_plus + 1e-10) << entry.name;
    }
}

// A stable verdict under one norm and an unstable one under another would be
// contradictory.
TEST(Property, VerdictsAgreeAcrossNorms) {
  for (const auto& entry : catalog::reference_instances()) {
    bool stable = false, unstable = false;
    for (const auto& k : all_kinds(entry.system)) {
      const auto c = classify(entry.system, k, 1e-8).classification;
      stable |= c == Classification::ues || c == Classification::us;
      unstable |= c == Classification::unstable;
    }
    EXPECT_FALSE(stable && unstable) << entry.name;
  }
}
