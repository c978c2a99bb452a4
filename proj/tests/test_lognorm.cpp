#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lnstab/linalg.hpp"
#include "lnstab/lognorm.hpp"
#include "lnstab/norms.hpp"
#include "oracles.hpp"

using namespace lnstab;

namespace {

Matrix ex2_at(double t) {
  const double s = std::sin(12 * t), c = std::cos(12 * t);
  return Matrix{{-5.5 + 7.5 * s, 7.5 * c}, {7.5 * c, -20.5 - 7.5 * s}};
}

std::vector<NormKind> kinds_for(std::size_t n, std::mt19937_64& rng) {
  return {NormKind::one(), NormKind::two(), NormKind::inf(),
          NormKind::weighted(oracle::random_matrix(rng, n) + Matrix::identity(n) * 3.0)};
}

}  // namespace

TEST(NormKind, ParseAndNames) {
  EXPECT_EQ(NormKind::parse("one").tag(), NormKind::Tag::one);
  EXPECT_EQ(NormKind::parse("1").tag(), NormKind::Tag::one);
  EXPECT_EQ(NormKind::parse("2").tag(), NormKind::Tag::two);
  EXPECT_EQ(NormKind::parse("inf").tag(), NormKind::Tag::inf);
  EXPECT_EQ(NormKind::two().name(), "two");
  EXPECT_THROW(NormKind::parse("three"), InputError);
  EXPECT_THROW(NormKind::weighted(Matrix{{1, 2}, {2, 4}}), InputError);
  EXPECT_THROW(NormKind::from_gram(Matrix{{1, 2}, {2, 1}}), InputError);
}

TEST(NormKind, WeightedVectorNormMatchesGram) {
  const Matrix h{{2, 1}, {1, 3}};
  const NormKind k = NormKind::from_gram(h);
  const Vector x{0.3, -1.7};
  const double quad = x[0] * (h(0, 0) * x[0] + h(0, 1) * x[1]) + x[1] * (h(1, 0) * x[0] + h(1, 1) * x[1]);
  EXPECT_NEAR(vec_norm(x, k), std::sqrt(quad), 1e-14);
  EXPECT_LE(oracle::max_diff(k.transform().transpose() * k.transform(), h), 1e-14);
}

TEST(Mu, ZeroMatrixIsZero) {
  std::mt19937_64 rng(1);
  for (const NormKind& k : kinds_for(3, rng)) EXPECT_NEAR(mu(Matrix(3), k), 0.0, 1e-15);
}

TEST(Mu, ClosedFormsByHand) {
  const Matrix a{{-3, 1}, {-2, 1}};
  EXPECT_EQ(mu_one(a), 2.0);  // columns: -3+2, 1+1
  EXPECT_EQ(mu_inf(a), 3.0);  // rows: -3+1, 1+2
  EXPECT_NEAR(mu_two(a), 0.5 * (-2 + std::sqrt(16 + 1)), 1e-14);
}

TEST(Mu, FirstExampleTwoNormIsBetaMinusOne) {
  for (double t : {0.0, 0.3, 1.7, 4.0}) EXPECT_NEAR(mu(oracle::example1_a(1.5, t), NormKind::two()), 0.5, 1e-12);
}

TEST(Mu, SecondExampleAtZero) {
  EXPECT_EQ(mu(ex2_at(0.0), NormKind::one()), 2.0);
  for (double t : {0.0, 0.05, 0.2, 0.4}) {
    EXPECT_NEAR(mu(ex2_at(t), NormKind::one()), oracle::ex2_mu_one(t, +1), 1e-12);
    EXPECT_NEAR(mu(-ex2_at(t), NormKind::one()), oracle::ex2_mu_one(t, -1), 1e-12);
    EXPECT_NEAR(mu(ex2_at(t), NormKind::two()), oracle::ex2_mu_two(t, +1), 1e-12);
    EXPECT_NEAR(mu(-ex2_at(t), NormKind::two()), oracle::ex2_mu_two(t, -1), 1e-12);
  }
}

TEST(MuWeighted, Examples) {
  std::mt19937_64 rng(2);
  const Matrix a = oracle::random_matrix(rng, 4);
  EXPECT_NEAR(mu_weighted(a, Matrix::identity(4)), mu_two(a), 1e-14);
  const Matrix p = oracle::random_matrix(rng, 4) + Matrix::identity(4) * 3.0;
  EXPECT_NEAR(mu_weighted(-Matrix::identity(4), p), -1.0, 1e-12);
  EXPECT_THROW(mu_weighted(a, Matrix(4)), InputError);
}

TEST(MuWeighted, LyapunovNormOfHurwitzMatrix) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = oracle::random_hurwitz(rng, 1 + trial % 6);
    const Matrix h = solve_lyapunov(a);
    const double m = mu_weighted(a, cholesky(h).transpose());
    EXPECT_LT(m, 0.0);
    EXPECT_NEAR(m, -1.0 / sym_eigs(h).back(), 1e-6);
  }
}

TEST(MuLimit, Examples) {
  EXPECT_EQ(mu_limit_estimate(Matrix(2), NormKind::one(), 1e-3), 0.0);
  EXPECT_NEAR(mu_limit_estimate(-Matrix::identity(3), NormKind::two(), 1e-6), -1.0, 1e-5);
  EXPECT_NEAR(mu_limit_estimate(ex2_at(0.0), NormKind::one(), 1e-7), 2.0, 1e-5);
  EXPECT_THROW(mu_limit_estimate(Matrix(2), NormKind::one(), 0.0), InputError);
}

TEST(Property, BasicInequalities) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const Matrix a = oracle::random_matrix(rng, n, 2.0), b = oracle::random_matrix(rng, n, 2.0);
    for (const NormKind& k : kinds_for(n, rng)) {
      const double ma = mu(a, k);
      EXPECT_LE(-mu(-a, k), ma + 1e-12);
      EXPECT_LE(std::abs(ma - mu(b, k)), mat_norm(a - b, k) + 1e-12);
      EXPECT_LE(ma, mat_norm(a, k) + 1e-12);
      EXPECT_GE(ma, -mat_norm(a, k) - 1e-12);
      EXPECT_LE(mu(a + b, k), ma + mu(b, k) + 1e-12);
    }
  }
}

TEST(Property, ShiftIdentity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const Matrix a = oracle::random_matrix(rng, n);
    const double c = shift(rng);
    for (const NormKind& k : kinds_for(n, rng))
      EXPECT_NEAR(mu(a + Matrix::identity(n) * c, k), mu(a, k) + c, 1e-12 * (1 + std::abs(c)) * 10);
  }
}

TEST(Property, ClosedFormsMatchDefiningLimit) {
  std::mt19937_64 rng(6);
  double worst_c = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const Matrix a = oracle::random_matrix(rng, n);
    for (const NormKind& k : kinds_for(n, rng)) {
      const double na = mat_norm(a, k);
      for (double h : {1e-4, 1e-5, 1e-6}) {
        const double gap = std::abs(mu_limit_estimate(a, k, h) - mu(a, k));
        // the estimator also carries ~1e-16/h rounding error
        const double c = std::max(0.0, gap - 1e-9) / (h * na * na);
        worst_c = std::max(worst_c, c);
      }
    }
  }
  EXPECT_LE(worst_c, 10.0);
}
