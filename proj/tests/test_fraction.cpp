#include <gtest/gtest.h>

#include <random>
#include <unordered_set>

#include "pmle/fraction.hpp"

using namespace pmle;

TEST(Fraction, CanonicalAfterArithmetic) {
  Fraction a(2, 4), b(-3, -6);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.numerator(), 1);
  EXPECT_EQ(a.denominator(), 2);
  Fraction c = Fraction(1, 6) + Fraction(1, 3);
  EXPECT_EQ(c.to_string(), "1/2");
  EXPECT_EQ((Fraction(3, 4) * Fraction(4, 3)).to_string(), "1");
  EXPECT_EQ(Fraction(1, -3).to_string(), "-1/3");
}

TEST(Fraction, DivisionByZeroThrows) {
  EXPECT_THROW(Fraction(1) / Fraction(0), DivisionByZero);
  EXPECT_THROW(Fraction(1, 0), DivisionByZero);
}

TEST(Fraction, ParseForms) {
  EXPECT_EQ(Fraction::parse("7"), Fraction(7));
  EXPECT_EQ(Fraction::parse(" -3/9 "), Fraction(-1, 3));
  EXPECT_EQ(Fraction::parse("0.125"), Fraction(1, 8));
  EXPECT_EQ(Fraction::parse("1e-3"), Fraction(1, 1000));
  EXPECT_EQ(Fraction::parse("-2.5E2"), Fraction(-250));
  EXPECT_EQ(Fraction::parse("+.5"), Fraction(1, 2));
  EXPECT_EQ(Fraction::parse("0.1"), Fraction(1, 10));
  EXPECT_THROW(Fraction::parse(""), ParseError);
  EXPECT_THROW(Fraction::parse("abc"), ParseError);
  EXPECT_THROW(Fraction::parse("1/0"), ParseError);
  EXPECT_THROW(Fraction::parse("1.2.3"), ParseError);
}

TEST(Fraction, OrderingAndPow) {
  EXPECT_LT(Fraction(1, 3), Fraction(1, 2));
  EXPECT_GT(Fraction(-1, 3), Fraction(-1, 2));
  EXPECT_EQ(pow(Fraction(2, 3), 3), Fraction(8, 27));
  EXPECT_EQ(pow(Fraction(2, 3), 0), Fraction(1));
  EXPECT_EQ(abs(Fraction(-5, 7)), Fraction(5, 7));
}

TEST(Fraction, HashAgreesWithEquality) {
  std::unordered_set<Fraction> s{Fraction(1, 2), Fraction(2, 4), Fraction(3, 6), Fraction(1, 3)};
  EXPECT_EQ(s.size(), 2u);
}

TEST(Fraction, FieldAxiomsOnRandomValues) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> n(-50, 50), d(1, 50);
  for (int t = 0; t < 500; ++t) {
    Fraction a(n(rng), d(rng)), b(n(rng), d(rng)), c(n(rng), d(rng));
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a - a, Fraction(0));
    if (!b.is_zero()) {
      EXPECT_EQ(a / b * b, a);
    }
  }
}

TEST(DenseMatrix, MultiplyAndStack) {
  FractionMatrix m{{1, 2}, {3, 4}};
  FractionVector x{Fraction(1), Fraction(-1)};
  auto y = m.multiply(x);
  EXPECT_EQ(y[0], Fraction(-1));
  EXPECT_EQ(y[1], Fraction(-1));
  auto s = m.stacked(m);
  EXPECT_EQ(s.rows(), 4u);
  EXPECT_EQ(s(3, 1), Fraction(4));
  std::vector<std::size_t> cols{1};
  EXPECT_EQ(m.select_columns(cols)(1, 0), Fraction(4));
}
