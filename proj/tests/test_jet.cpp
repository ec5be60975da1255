#include <gtest/gtest.h>

#include <cmath>

#include "sobolab/jet.hpp"

using namespace sobolab;
using combinat::MultiIndex;

TEST(JetSpace, LayoutMatchesEnumeration) {
  const auto& sp = JetSpace::get(3, 4);
  EXPECT_EQ(sp.size(), 35u);
  for (std::size_t k = 0; k < sp.size(); ++k) EXPECT_EQ(sp.index_of(sp.indices()[k]), static_cast<int>(k));
  const auto& g = sp.grade_offsets();
  ASSERT_EQ(g.size(), 6u);
  EXPECT_EQ(g[0], 0u);
  EXPECT_EQ(g[1], 1u);
  EXPECT_EQ(g[2], 4u);
  EXPECT_EQ(g[3], 10u);
  EXPECT_EQ(g[5], 35u);
  EXPECT_EQ(sp.index_of(MultiIndex{{3, 1, 1}}), -1);
}

TEST(Jet, PolynomialDerivatives) {
  // u = x^2 y + 3 y^3 at (1.5, -0.5)
  const auto& sp = JetSpace::get(2, 4);
  Jet x = Jet::variable(sp, 0, 1.5), y = Jet::variable(sp, 1, -0.5);
  Jet u = x * x * y + 3.0 * pow_int(y, 3);
  EXPECT_NEAR(u.value(), 2.25 * -0.5 + 3 * -0.125, 1e-15);
  EXPECT_NEAR(u.derivative(MultiIndex{{1, 0}}), 2 * 1.5 * -0.5, 1e-14);
  EXPECT_NEAR(u.derivative(MultiIndex{{0, 1}}), 2.25 + 9 * 0.25, 1e-14);
  EXPECT_NEAR(u.derivative(MultiIndex{{2, 1}}), 2.0, 1e-14);
  EXPECT_NEAR(u.derivative(MultiIndex{{0, 3}}), 18.0, 1e-14);
  EXPECT_NEAR(u.derivative(MultiIndex{{0, 4}}), 0.0, 1e-14);
  EXPECT_NEAR(u.derivative(MultiIndex{{1, 1}}), 3.0, 1e-14);
}

TEST(Jet, TensorNormOfHessian) {
  // u = x^2 + 3 x y: Hessian [[2,3],[3,0]], Frobenius sqrt(4 + 9 + 9)
  const auto& sp = JetSpace::get(2, 2);
  Jet x = Jet::variable(sp, 0, 0.2), y = Jet::variable(sp, 1, 0.7);
  Jet u = x * x + 3.0 * x * y;
  EXPECT_NEAR(u.tensor_norm(2), std::sqrt(22.0), 1e-14);
  EXPECT_NEAR(u.tensor_norm(1), std::hypot(0.4 + 2.1, 0.6), 1e-14);
}

TEST(Jet, TranscendentalOneVariable) {
  const auto& sp = JetSpace::get(1, 6);
  Jet t = Jet::variable(sp, 0, 0.3);
  Jet s = sin(t), c = cos(t), e = exp(t), r = pow_real(t, 2.5);
  for (int k = 0; k <= 6; ++k) {
    MultiIndex a{{k}};
    double ds[4] = {std::sin(0.3), std::cos(0.3), -std::sin(0.3), -std::cos(0.3)};
    EXPECT_NEAR(s.derivative(a), ds[k % 4], 1e-13);
    EXPECT_NEAR(c.derivative(a), ds[(k + 1) % 4], 1e-13);
    EXPECT_NEAR(e.derivative(a), std::exp(0.3), 1e-13);
    double fall = 1.0;
    for (int i = 0; i < k; ++i) fall *= 2.5 - i;
    EXPECT_NEAR(r.derivative(a), fall * std::pow(0.3, 2.5 - k), 1e-10 * std::max(1.0, std::abs(fall * std::pow(0.3, 2.5 - k))));
  }
}

TEST(Jet, ChainRuleMatchesFiniteDifference) {
  const auto& sp = JetSpace::get(3, 2);
  auto f = [](double a, double b, double c) { return std::sin(a * b) * std::exp(c) + std::sqrt(1 + a * a + c * c); };
  double p[3] = {0.4, -0.9, 0.25};
  Jet x = Jet::variable(sp, 0, p[0]), y = Jet::variable(sp, 1, p[1]), z = Jet::variable(sp, 2, p[2]);
  Jet u = sin(x * y) * exp(z) + sqrt(Jet(sp, 1.0) + x * x + z * z);
  double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    double q[3] = {p[0], p[1], p[2]}, m[3] = {p[0], p[1], p[2]};
    q[i] += h;
    m[i] -= h;
    MultiIndex e{{0, 0, 0}};
    e.entries[i] = 1;
    EXPECT_NEAR(u.derivative(e), (f(q[0], q[1], q[2]) - f(m[0], m[1], m[2])) / (2 * h), 1e-8);
  }
  EXPECT_NEAR(u.value(), f(p[0], p[1], p[2]), 1e-15);
}

TEST(Jet, PowIntKeepsExactZeros) {
  const auto& sp = JetSpace::get(2, 5);
  Jet x = Jet::variable(sp, 0, 0.0);
  Jet u = pow_int(x, 3);
  for (std::size_t k = 0; k < sp.size(); ++k) {
    const auto& a = sp.indices()[k];
    double expect = (a.entries[0] == 3 && a.entries[1] == 0) ? 6.0 : 0.0;
    EXPECT_EQ(u.derivative(k), expect);
  }
}

TEST(Jet, PolyTaylor) {
  auto t = poly_taylor({1.0, -2.0, 0.0, 4.0}, 0.5, 4);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_DOUBLE_EQ(t[0], 1.0 - 1.0 + 0.5);
  EXPECT_DOUBLE_EQ(t[1], -2.0 + 3.0);
  EXPECT_DOUBLE_EQ(t[2], 6.0);
  EXPECT_DOUBLE_EQ(t[3], 4.0);
  EXPECT_DOUBLE_EQ(t[4], 0.0);
}
