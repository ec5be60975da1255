#include <gtest/gtest.h>

#include "sobolab/kernel1d.hpp"

using namespace sobolab;
using namespace sobolab::kernel1d;

TEST(Poly1D, HornerMatchesNaive) {
  Poly1D p({0.3, -1.2, 0.0, 2.5, -0.7, 0.11});
  for (double t = -2.0; t <= 2.0; t += 0.125) EXPECT_NEAR(p(t), p.eval_naive(t), 1e-14 * (1 + std::abs(p(t))));
  EXPECT_EQ(p.degree(), 5);
  EXPECT_EQ(Poly1D({1.0, 2.0, 0.0, 0.0}).degree(), 1);
}

TEST(Poly1D, CalculusRoundTrip) {
  Poly1D p({1.0, -2.0, 3.0});
  Poly1D back = p.antiderivative().derivative();
  for (int k = 0; k <= 2; ++k) EXPECT_DOUBLE_EQ(back.coeffs()[k], p.coeffs()[k]);
  EXPECT_DOUBLE_EQ(p.derivative(2)(0.0), 6.0);
}

TEST(BuildQ, LowOrders) {
  auto q1 = build_Q(1);
  EXPECT_DOUBLE_EQ(q1.coeffs()[0], 0.5);
  EXPECT_DOUBLE_EQ(q1.coeffs()[1], 0.5);
  auto q3 = build_Q(2);
  ASSERT_EQ(q3.degree(), 3);
  EXPECT_DOUBLE_EQ(q3.coeffs()[0], 0.5);
  EXPECT_DOUBLE_EQ(q3.coeffs()[1], 0.75);
  EXPECT_DOUBLE_EQ(q3.coeffs()[2], 0.0);
  EXPECT_DOUBLE_EQ(q3.coeffs()[3], -0.25);
}

TEST(BuildQ, SymmetryAndFlatness) {
  for (int ell = 1; ell <= 6; ++ell) {
    auto q = build_Q(ell);
    EXPECT_EQ(q.degree(), 2 * ell - 1);
    EXPECT_NEAR(q(1.0), 1.0, 1e-14);
    EXPECT_NEAR(q(0.0), 0.5, 1e-15);
    for (int i = 0; i <= 100; ++i) {
      double t = -1.0 + 0.02 * i;
      EXPECT_LE(std::abs(q(t) + q(-t) - 1.0), 1e-12);
    }
    for (int j = 0; j < ell; ++j) EXPECT_LE(std::abs(q.derivative(j)(-1.0)), 1e-10);
  }
}

TEST(GreenKernel, CalibratedConstantMatchesClosedForm) {
  EXPECT_NEAR(green_constant(1), -0.5, 1e-14);
  EXPECT_NEAR(green_constant(2), 0.125, 1e-14);
  for (int ell = 1; ell <= 6; ++ell)
    EXPECT_NEAR(green_constant(ell), green_constant_closed_form(ell), 1e-12 * std::abs(green_constant_closed_form(ell)));
}

TEST(GreenKernel, FirstOrderClosedForm) {
  double c = green_constant(1);
  EXPECT_NEAR(green_kernel(1, 0.5, -0.25), 0.375 * c, 1e-15);
  for (double s = -1.0; s <= 1.0; s += 0.1)
    for (double r = -1.0; r <= 1.0; r += 0.15)
      EXPECT_NEAR(green_kernel(1, s, r), c * (1.0 - s * r - std::abs(s - r)), 1e-14);
  EXPECT_THROW(green_kernel(1, 1.5, 0.0), std::domain_error);
}

TEST(GreenKernel, Symmetry) {
  Rng rng(3);
  for (int ell = 1; ell <= 4; ++ell)
    for (int i = 0; i < 100; ++i) {
      double s = rng.uniform(-1, 1), r = rng.uniform(-1, 1);
      EXPECT_NEAR(green_kernel(ell, s, r), green_kernel(ell, -s, -r), 1e-14);
    }
}

TEST(GreenKernel, DiagonalIsContinuousExtension) {
  for (int ell = 1; ell <= 3; ++ell)
    for (double s : {-0.5, 0.0, 0.3}) {
      double diag = green_kernel(ell, s, s);
      EXPECT_NEAR(diag, green_kernel(ell, s, s + 1e-7), 1e-6);
      EXPECT_NEAR(diag, green_constant(ell) * std::pow(1 - s * s, 2 * ell - 1) / (2 * ell - 1), 1e-14);
    }
}

TEST(GreenKernel, BranchesAgreeWithKernel) {
  for (int ell = 1; ell <= 4; ++ell)
    for (double r : {-0.7, 0.1, 0.6}) {
      auto up = green_kernel_branch(ell, r, true);
      auto lo = green_kernel_branch(ell, r, false);
      for (double s = -1.0; s <= 1.0; s += 0.05) {
        const auto& p = s > r ? up : lo;
        EXPECT_NEAR(p(s), green_kernel(ell, s, r), 1e-13);
      }
    }
}

TEST(GreenKernel, HighestDerivativeRecoversQ) {
  for (int ell = 1; ell <= 4; ++ell) {
    auto q = build_Q(ell);
    for (double r : {-0.9, -0.2, 0.4}) {
      auto up = green_kernel_branch(ell, r, true).derivative(2 * ell - 1);
      auto lo = green_kernel_branch(ell, r, false).derivative(2 * ell - 1);
      EXPECT_NEAR(up(0.95), q(r), 1e-10);
      EXPECT_NEAR(lo(-0.95), -q(-r), 1e-10);
    }
  }
}

TEST(GreenKernel, FiniteDifferenceOfKernelRecoversQForFirstOrder) {
  // ell = 1: d kappa / ds at fixed r, central differences away from the diagonal.
  auto q = build_Q(1);
  const double h = 1e-5;
  for (double r : {-0.5, 0.2}) {
    double s = 0.8;
    double fd = (green_kernel(1, s + h, r) - green_kernel(1, s - h, r)) / (2 * h);
    EXPECT_NEAR(fd, q(r), 1e-8);
  }
}

TEST(GreenKernel, BoundaryValueProblem) {
  std::vector<std::function<double(double)>> phis = {[](double) { return 1.0; }, [](double r) { return r; },
                                                     [](double r) { return r * r; }};
  for (int ell = 1; ell <= 2; ++ell)
    for (const auto& phi : phis) {
      for (int j = 0; j < ell; ++j) {
        EXPECT_LE(std::abs(green_solution(ell, phi, -1.0, j)), 1e-8);
        EXPECT_LE(std::abs(green_solution(ell, phi, 1.0, j)), 1e-8);
      }
      for (double s : {-0.6, 0.0, 0.45}) {
        const double h = 1e-3;
        int top = 2 * ell - 2;
        double fd = (green_solution(ell, phi, s + h, top) - 2 * green_solution(ell, phi, s, top) +
                     green_solution(ell, phi, s - h, top)) /
                    (h * h);
        EXPECT_NEAR(fd, phi(s), 1e-6);
      }
    }
}

TEST(GreenKernel, PolyharmonicExactSolution) {
  // w = (s^2 - 1)^l / (2l)! solves w^{(2l)} = 1 with zero data.
  for (int ell = 1; ell <= 3; ++ell)
    for (double s : {-0.8, -0.1, 0.5}) {
      double exact = std::pow(s * s - 1, ell) / std::tgamma(2.0 * ell + 1);
      EXPECT_NEAR(green_solution(ell, [](double) { return 1.0; }, s, 0), exact, 1e-13);
    }
}

TEST(TwoPointConstant, Examples) {
  EXPECT_DOUBLE_EQ(two_point_constant(1, {0.0, 1.0, {0.0}, {1.0}}), 1.0);
  EXPECT_DOUBLE_EQ(two_point_constant(1, {0.0, 2.0, {3.0}, {3.0}}), 0.0);
  EXPECT_NEAR(two_point_constant(2, {0.0, 1.0, {0.0, 0.0}, {1.0, 3.0}}), 6.0, 1e-13);
  EXPECT_THROW(two_point_constant(1, {1.0, 0.0, {0.0}, {0.0}}), std::domain_error);
}

TEST(Repr1D, Examples) {
  EXPECT_NEAR(repr_1d(1, {0.0, 1.0, {0.0}, {1.0}}, 0.5, [](double) { return 2.0; }), 1.0, 1e-14);
  EXPECT_NEAR(repr_1d(1, {0.0, 1.0, {0.5}, {2.5}}, 0.3, [](double) { return 0.0; }), 2.0, 1e-14);
  BoundaryData1D sin_data{0.0, 1.0, {std::sin(0.0), std::cos(0.0)}, {std::sin(1.0), std::cos(1.0)}};
  EXPECT_NEAR(repr_1d(2, sin_data, 0.3, [](double t) { return std::sin(t); }), -std::cos(0.3), 1e-6);
  EXPECT_THROW(repr_1d(1, {0.0, 1.0, {0.0}, {1.0}}, 1.0, [](double) { return 0.0; }), std::domain_error);
}

TEST(Repr1D, ExactForPolynomials) {
  Rng rng(11);
  for (int ell = 1; ell <= 3; ++ell)
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> c(2 * ell + 1);
      for (double& x : c) x = rng.uniform(-1, 1);
      Poly1D psi(c);
      double a = rng.uniform(-2, 0), b = a + rng.uniform(0.5, 3);
      BoundaryData1D d{a, b, {}, {}};
      for (int k = 0; k < ell; ++k) {
        d.derivs_a.push_back(psi.derivative(k)(a));
        d.derivs_b.push_back(psi.derivative(k)(b));
      }
      Poly1D top = psi.derivative(2 * ell);
      double t = a + (b - a) * rng.uniform();
      double expect = psi.derivative(2 * ell - 1)(t);
      double got = repr_1d(ell, d, t, [&](double x) { return top(x); });
      EXPECT_LE(std::abs(got - expect), 1e-12 * std::max(1.0, std::abs(expect)));
    }
}
