#include <gtest/gtest.h>

#include <cmath>

#include "lnstab/catalog.hpp"
#include "oracles.hpp"

using namespace lnstab;

TEST(Catalog, GetByName) {
  const auto e = catalog::get("example1", {{"beta", 1.5}});
  EXPECT_EQ(e.name, "example1");
  EXPECT_EQ(e.system.dimension(), 2u);
  EXPECT_DOUBLE_EQ(e.system.period(), 2 * oracle::pi);
  EXPECT_LE(oracle::max_diff(e.system.matrix_at(0.8), oracle::example1_a(1.5, 0.8)), 1e-14);

  const auto two = catalog::get("example2");
  EXPECT_DOUBLE_EQ(two.system.period(), oracle::pi / 6);
  EXPECT_EQ(two.system.matrix_at(0.0), (Matrix{{-5.5, 7.5}, {7.5, -20.5}}));

  const auto d = catalog::get("lti_diag", {{"a", -1.0}, {"b", 0.5}});
  EXPECT_EQ(d.system.matrix_at(3.0), Matrix::diagonal({-1.0, 0.5}));
  EXPECT_EQ(catalog::names().size(), 5u);
}

TEST(Catalog, Errors) {
  EXPECT_THROW(catalog::get("nope"), InputError);
  EXPECT_THROW(catalog::get("example1"), InputError);
  EXPECT_THROW(catalog::get("example1", {{"beta", 1.0}, {"gamma", 2.0}}), InputError);
  EXPECT_THROW(catalog::get("example2", {{"beta", 1.0}}), InputError);
  EXPECT_THROW(catalog::get("lti_diag", {{"a", 1.0}}), InputError);
  try {
    catalog::get("nope");
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("example2"), std::string::npos);  // lists known names
  }
}

TEST(Catalog, NegativeParametersRoundTripThroughExpressions) {
  const auto e = catalog::example1(-0.75);
  EXPECT_LE(oracle::max_diff(e.system.matrix_at(1.3), oracle::example1_a(-0.75, 1.3)), 1e-14);
}

TEST(Catalog, EverySystemIsPeriodic) {
  for (const auto& e : catalog::reference_instances()) EXPECT_NO_THROW(validate_periodicity(e.system)) << e.name;
}

TEST(Catalog, OriginTags) {
  const auto two = catalog::example2();
  ASSERT_TRUE(two.constant("lambda_plus_one"));
  EXPECT_DOUBLE_EQ(*two.constant("lambda_plus_one_closed_form"), 15 / oracle::pi - 5.5);
  EXPECT_FALSE(two.constant("missing"));
  for (const auto& c : two.constants)
    EXPECT_TRUE(c.origin == Origin::published || c.origin == Origin::derived) << c.name;
  EXPECT_EQ(to_string(Origin::trivial), "trivial");
}

TEST(Catalog, FirstExampleConstants) {
  const auto e = catalog::example1(1.5);
  EXPECT_DOUBLE_EQ(*e.constant("fce_1"), 0.5);
  EXPECT_DOUBLE_EQ(*e.constant("pi_plus_two_period"), oracle::pi);
  EXPECT_DOUBLE_EQ(*catalog::example1(0.5).constant("pi_plus_two_period"), -oracle::pi);
}

// Every closed-form transition matrix solves Phi' = A(t) Phi with Phi(t0) = I.
TEST(Property, ClosedFormsSolveTheSystem) {
  for (const auto& e : catalog::reference_instances()) {
    if (!e.closed_form) continue;
    const auto& phi = *e.closed_form;
    const std::size_t n = e.system.dimension();
    EXPECT_LE(oracle::max_diff(phi(e.system.t0()), Matrix::identity(n)), 1e-15) << e.name;
    const double h = 1e-5;
    for (double t : {0.2, 1.0, 2.5, 4.0}) {
      Matrix fd = (phi(t + h) - phi(t - h)) * (1.0 / (2 * h));
      const Matrix rhs = e.system.matrix_at(t) * phi(t);
      EXPECT_LE(oracle::max_diff(fd, rhs), 1e-5 * (1 + rhs.max_abs())) << e.name << " t=" << t;
    }
  }
}
