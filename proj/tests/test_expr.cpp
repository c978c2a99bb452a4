#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lnstab/expr.hpp"
#include "oracles.hpp"

using lnstab::DomainError;
using lnstab::Expression;
using lnstab::ParseError;
using lnstab::parse_expression;
using Kind = Expression::Kind;

TEST(Parse, VariableNode) {
  const Expression e = parse_expression("t");
  EXPECT_EQ(e.root().kind, Kind::variable);
  EXPECT_EQ(e.eval(3.25), 3.25);
}

TEST(Parse, Precedence) {
  EXPECT_EQ(parse_expression("2+3*4").eval(0), 14.0);
  EXPECT_EQ(parse_expression("2^3^2").eval(0), 512.0);
  EXPECT_EQ(parse_expression("-2^2").eval(0), -4.0);
  EXPECT_EQ(parse_expression("2^-1").eval(0), 0.5);
  EXPECT_EQ(parse_expression("8/4/2").eval(0), 1.0);
  EXPECT_EQ(parse_expression("10-4-3").eval(0), 3.0);
  EXPECT_EQ(parse_expression("(2+3)*4").eval(0), 20.0);
  EXPECT_EQ(parse_expression("--3").eval(0), 3.0);
}

TEST(Parse, NumbersAndConstants) {
  EXPECT_EQ(parse_expression("1.5e-3").eval(0), 1.5e-3);
  EXPECT_EQ(parse_expression("2E2").eval(0), 200.0);
  EXPECT_DOUBLE_EQ(parse_expression("pi").eval(0), oracle::pi);
  EXPECT_DOUBLE_EQ(parse_expression("e").eval(0), std::exp(1.0));
  EXPECT_DOUBLE_EQ(parse_expression("exp(1)").eval(0), std::exp(1.0));
}

TEST(Parse, WhitespaceInsignificant) {
  EXPECT_EQ(parse_expression("  sin ( 12 * t )\t+1 "), parse_expression("sin(12*t)+1"));
}

TEST(Eval, SinAtPiOver24) { EXPECT_NEAR(parse_expression("sin(12*t)").eval(oracle::pi / 24.0), 1.0, 1e-15); }

TEST(Eval, MuOneIntegrandOfTheSecondExample) {
  const Expression e = parse_expression("-11/2 + (15/2)*(sin(12*t)+abs(cos(12*t)))");
  EXPECT_EQ(e.eval(0.0), 2.0);
  for (double t : {0.01, 0.1, 0.3, 0.5})
    EXPECT_NEAR(e.eval(t), oracle::ex2_mu_one(t, +1), 1e-13);
}

TEST(Eval, AllFunctions) {
  const double t = 0.7;
  EXPECT_DOUBLE_EQ(parse_expression("tan(t)").eval(t), std::tan(t));
  EXPECT_DOUBLE_EQ(parse_expression("ln(t)").eval(t), std::log(t));
  EXPECT_DOUBLE_EQ(parse_expression("sqrt(t)").eval(t), std::sqrt(t));
  EXPECT_DOUBLE_EQ(parse_expression("abs(-t)").eval(t), t);
  EXPECT_DOUBLE_EQ(parse_expression("cos(t)^2+sin(t)^2").eval(t), 1.0);
}

TEST(Eval, DomainErrors) {
  EXPECT_THROW(parse_expression("ln(t)").eval(-1.0), DomainError);
  EXPECT_THROW(parse_expression("ln(t)").eval(0.0), DomainError);
  EXPECT_THROW(parse_expression("sqrt(t)").eval(-0.5), DomainError);
  EXPECT_THROW(parse_expression("1/t").eval(0.0), DomainError);
  EXPECT_THROW(parse_expression("t^(1/3)").eval(-8.0), DomainError);
  EXPECT_THROW(parse_expression("exp(t)").eval(1000.0), DomainError);
  EXPECT_EQ(parse_expression("t^3").eval(-2.0), -8.0);
}

TEST(Eval, DomainErrorCarriesContext) {
  try {
    parse_expression("1 + ln(t)").eval(-1.0);
    FAIL() << "expected a domain error";
  } catch (const DomainError& e) {
    EXPECT_EQ(e.t(), -1.0);
    EXPECT_NE(e.node().find("ln"), std::string::npos);
  }
}

namespace {

std::size_t error_offset(const char* text) {
  try {
    parse_expression(text);
  } catch (const ParseError& e) {
    return e.offset();
  }
  ADD_FAILURE() << "no parse error for '" << text << "'";
  return static_cast<std::size_t>(-1);
}

}  // namespace

TEST(ParseErrors, Offsets) {
  EXPECT_EQ(error_offset("2+*3"), 2u);
  EXPECT_EQ(error_offset("12t"), 2u);
  EXPECT_EQ(error_offset(""), 0u);
  EXPECT_EQ(error_offset("1+2)"), 3u);
  EXPECT_EQ(error_offset("(1+2"), 4u);
  EXPECT_EQ(error_offset("foo(t)"), 0u);
  EXPECT_EQ(error_offset("sin t"), 4u);
  EXPECT_EQ(error_offset("1 +"), 3u);
  EXPECT_EQ(error_offset("2 $ 3"), 2u);
}

TEST(ParseErrors, MessagesNameTheProblem) {
  try {
    parse_expression("sin(t");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unbalanced"), std::string::npos);
  }
  try {
    parse_expression("cosh(t)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("cosh"), std::string::npos);
  }
}

TEST(Factories, RejectNegativeAndNonFiniteLiterals) {
  EXPECT_THROW(Expression::number(-1.0), lnstab::InputError);
  EXPECT_THROW(Expression::number(-0.0), lnstab::InputError);
  EXPECT_THROW(Expression::number(INFINITY), lnstab::InputError);
  EXPECT_THROW(Expression::binary(Kind::negate, Expression(), Expression()), lnstab::InputError);
}

namespace {

Expression random_tree(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 1 ? 2 : 6);
  std::uniform_real_distribution<double> val(0.0, 5.0);
  switch (pick(rng)) {
    case 0: return Expression::number(std::round(val(rng) * 1000.0) / 1000.0 + 1e-7 * val(rng));
    case 1: return Expression::variable();
    case 2: return Expression::constant(rng() % 2 ? Expression::Constant::pi : Expression::Constant::e);
    case 3: return Expression::negate(random_tree(rng, depth - 1));
    case 4: {
      const auto f = static_cast<Expression::Function>(rng() % 7);
      return Expression::call(f, random_tree(rng, depth - 1));
    }
    default: {
      static constexpr Kind ops[] = {Kind::add, Kind::subtract, Kind::multiply, Kind::divide, Kind::power};
      return Expression::binary(ops[rng() % 5], random_tree(rng, depth - 1), random_tree(rng, depth - 1));
    }
  }
}

}  // namespace

TEST(Property, SerializeParseRoundTrip) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> tdist(-3.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const Expression a = random_tree(rng, 6);
    ASSERT_LE(a.depth(), 6u);
    const Expression b = parse_expression(lnstab::serialize(a));
    ASSERT_EQ(a, b) << lnstab::serialize(a);
    for (int k = 0; k < 100; ++k) {
      const double t = tdist(rng);
      double va = 0.0, vb = 0.0;
      bool ea = false, eb = false;
      try {
        va = a.eval(t);
      } catch (const DomainError&) {
        ea = true;
      }
      try {
        vb = b.eval(t);
      } catch (const DomainError&) {
        eb = true;
      }
      ASSERT_EQ(ea, eb);
      if (!ea) {
        ASSERT_EQ(va, vb);
      }
    }
  }
}

TEST(Property, StructuralEqualityDistinguishesTrees) {
  EXPECT_EQ(parse_expression("1+t"), parse_expression("(1)+(t)"));
  EXPECT_FALSE(parse_expression("1+t") == parse_expression("t+1"));
  EXPECT_FALSE(parse_expression("sin(t)") == parse_expression("cos(t)"));
}
