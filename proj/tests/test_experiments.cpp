#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sobolab/counterexamples.hpp"
#include "sobolab/experiments.hpp"
#include "sobolab/gallery.hpp"

using namespace sobolab;
using namespace sobolab::experiments;
using report::AuditReport;
using report::fit_loglog;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::shared_ptr<fields::PolynomialField> bowl(int n, double scale = 1.0) {
  std::vector<fields::PolynomialField::Term> t{{combinat::MultiIndex{std::vector<int>(n, 0)}, scale}};
  for (int i = 0; i < n; ++i) {
    std::vector<int> e(n, 0);
    e[i] = 2;
    t.push_back({combinat::MultiIndex{e}, -scale});
  }
  return std::make_shared<fields::PolynomialField>(n, t);
}

AuditReport tiny_report() {
  AuditReport r;
  r.experiment = "unit";
  r.params = {{"a", 1}};
  r.columns = {"x", "y"};
  r.add_row({1.0, 0.5});
  r.add_row({2.0, std::nan("")});
  r.check("ok", true, 1.0, 2.0);
  return r;
}

}  // namespace

TEST(Report, LogLogFit) {
  std::vector<double> x{0.5, 0.25, 0.125, 0.0625}, y;
  for (double v : x) y.push_back(3 * std::pow(v, 1.5));
  auto f = fit_loglog(x, y);
  EXPECT_NEAR(f.slope, 1.5, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_TRUE(f.reportable());
  EXPECT_THROW(fit_loglog({1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(fit_loglog({1.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(fit_loglog({1.0, 2.0}, {0.0, 2.0}), std::invalid_argument);
}

TEST(Report, RatesBelowR2AreWithheld) {
  AuditReport r;
  auto noisy = fit_loglog({1, 2, 3, 4}, {1, 4, 1, 4});
  EXPECT_LT(noisy.r2, report::kMinR2);
  EXPECT_FALSE(r.add_rate("noisy", noisy));
  EXPECT_FALSE(r.rates.contains("noisy"));
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Report, JsonAndCsvRendering) {
  auto r = tiny_report();
  EXPECT_THROW(r.add_row({1.0}), std::invalid_argument);
  EXPECT_EQ(r.to_csv(), "x,y\n1,0.5\n2,\n");
  auto j = r.to_json();
  EXPECT_EQ(j["schema"], report::kReportSchema);
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_TRUE(j["rows"][1][1].is_null());
  EXPECT_TRUE(j["pass"].get<bool>());
  r.check("bad", false, 3.0, 2.0);
  EXPECT_FALSE(r.pass());
  EXPECT_EQ(r.failures().size(), 1u);
  EXPECT_EQ(report::format_double(0.1), "0.1");
}

TEST(Report, WrittenFilesAreByteDeterministic) {
  auto dir = std::filesystem::temp_directory_path() / "sobolab_report_test";
  std::filesystem::remove_all(dir);
  auto a = report::write_report(tiny_report(), dir / "a", "r");
  auto b = report::write_report(tiny_report(), dir / "b", "r");
  EXPECT_EQ(slurp(a.json), slurp(b.json));
  EXPECT_EQ(slurp(a.csv), slurp(b.csv));
  EXPECT_TRUE(json::parse(slurp(a.meta)).contains("unix_time"));
  std::filesystem::remove_all(dir);
}

TEST(Presets, Tiers) {
  auto s = preset("smoke"), d = preset("desk"), t = preset("thorough");
  EXPECT_EQ(s.cloud, 1000u);
  EXPECT_EQ(d.directions, 2048u);
  EXPECT_EQ(t.nodes, 128);
  EXPECT_EQ(s.doubled().cloud, 2000u);
  EXPECT_THROW(preset("huge"), std::invalid_argument);
}

TEST(PointwiseAudit, ZeroTraceUsesOnlyRiesz) {
  auto box = geometry::gallery("box", {{"n", 3}});
  fields::BoxBubbleField u(3, {0, 0, 0}, {1, 1, 1}, 2);
  auto r = pointwise_audit(box, u, 2, 0, preset("smoke"), kDefaultSeed);
  EXPECT_TRUE(r.constants["boundary_terms_zero"].get<bool>());
  for (const auto& t : r.constants["boundary_terms"]) EXPECT_EQ(t["sum_over_probes"].get<double>(), 0.0);
  EXPECT_EQ(r.column("t"), std::vector<double>(r.rows.size(), 0.0));
  auto riesz = r.column("riesz"), rhs = r.column("rhs");
  EXPECT_EQ(riesz, rhs);
  ASSERT_TRUE(r.constants["C"].is_number());
  EXPECT_GT(r.constants["C"].get<double>(), 0.0);
  EXPECT_TRUE(r.pass());
}

TEST(PointwiseAudit, ZeroFieldHasNoConstant) {
  auto box = geometry::gallery("box", {{"n", 2}});
  fields::ConstantField zero(2, 0.0);
  auto r = pointwise_audit(box, zero, 1, 0, preset("smoke"), kDefaultSeed);
  EXPECT_TRUE(r.constants["C"].is_null());
  EXPECT_TRUE(r.constants["boundary_terms_zero"].get<bool>());
  EXPECT_TRUE(r.pass());
}

TEST(PointwiseAudit, ScalingAndTranslationInvariance) {
  auto ball = geometry::gallery("ball", {{"n", 2}});
  auto moved = geometry::gallery("ball", {{"n", 2}, {"center", {3.0, -2.0}}});
  auto u = bowl(2);
  auto res = preset("smoke");
  auto a = pointwise_audit(ball, *u, 1, 0, res, 5);
  auto b = pointwise_audit(ball, *bowl(2, 4.0), 1, 0, res, 5);
  EXPECT_EQ(a.constants["C"].get<double>(), b.constants["C"].get<double>());
  fields::RigidField v(u, {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}, Vec3{3.0, -2.0, 0.0});
  auto c = pointwise_audit(moved, v, 1, 0, res, 5);
  EXPECT_NEAR(c.constants["C"].get<double>() / a.constants["C"].get<double>(), 1.0, 0.01);
}

TEST(RearrangementAudit, StableUnderDoubling) {
  auto disc = geometry::gallery("ball", {{"n", 2}});
  auto u = bowl(2);
  auto res = preset("smoke");
  auto mu = geometry::sample_volume(disc, res.cloud, 11);
  auto mu2 = geometry::sample_volume(disc, res.doubled().cloud, 11);
  auto a = rearrangement_audit(disc, mu, *u, 1, 0, 2.0, res, 3);
  auto b = rearrangement_audit(disc, mu2, *u, 1, 0, 2.0, res.doubled(), 3);
  double ca = a.constants["best"]["C"], cb = b.constants["best"]["C"];
  EXPECT_GT(ca, 0.0);
  EXPECT_NEAR(cb / ca, 1.0, 0.3);
  EXPECT_EQ(a.constants["C"].size(), 4u);
}

TEST(RearrangementAudit, RejectsMeasureOutsideWindow) {
  auto disc = geometry::gallery("ball", {{"n", 2}});
  auto mu = geometry::sample_volume(disc, 500, 1);
  EXPECT_THROW(rearrangement_audit(disc, mu, *bowl(2), 1, 0, 2.5, preset("smoke"), 3), std::invalid_argument);
}

TEST(SobolevAudit, ConstantsBoundedOverFamily) {
  auto disc = geometry::gallery("ball", {{"n", 2}});
  auto res = preset("smoke");
  auto mu = geometry::sample_volume(disc, res.cloud, 17);
  Rng rng(23);
  for (auto t : {Theorem::MainMeasure, Theorem::TrudMeasure}) {
    std::vector<double> C;
    for (int draw = 0; draw < 4; ++draw) {
      auto u = fields::random_polynomial(2, 3, rng);
      auto r = sobolev_audit(t, disc, mu, *u, {1, 0, 1.5, 0, {}}, res, 3);
      ASSERT_TRUE(r.constants["C"].is_number()) << to_string(t);
      C.push_back(r.constants["C"]);
    }
    auto [lo, hi] = std::minmax_element(C.begin(), C.end());
    EXPECT_LE(*hi / *lo, 9.0) << to_string(t);
  }
  EXPECT_EQ(theorem_from_string("superlimiting"), Theorem::SuperLimiting);
  EXPECT_THROW(theorem_from_string("nope"), std::invalid_argument);
}

TEST(SobolevAudit, ScalingInvariance) {
  auto disc = geometry::gallery("ball", {{"n", 2}});
  auto res = preset("smoke");
  auto mu = geometry::sample_volume(disc, res.cloud, 17);
  auto a = sobolev_audit(Theorem::SuperLimiting, disc, mu, *bowl(2), {1, 0, 3, 0, {}}, res, 3);
  auto b = sobolev_audit(Theorem::SuperLimiting, disc, mu, *bowl(2, 0.25), {1, 0, 3, 0, {}}, res, 3);
  EXPECT_NEAR(a.constants["C"].get<double>(), b.constants["C"].get<double>(), 1e-12 * a.constants["C"].get<double>());
}

TEST(Appendix, IdentityAndFittedConstant) {
  for (int ell = 1; ell <= 3; ++ell)
    for (int n = 1; n <= 3; ++n) {
      auto r = appendix_identity_check(ell, n, 100, kDefaultSeed);
      EXPECT_LE(r.constants["max_residual"].get<double>(), 1e-9) << ell << " " << n;
      EXPECT_TRUE(r.pass()) << ell << " " << n;
    }
  auto one = appendix_identity_check(1, 2, 50, 3);
  EXPECT_LE(one.constants["c_fit"].get<double>(), 0.5 + 1e-12);
  EXPECT_NEAR(one.constants["c_fit"].get<double>(), 0.5, 1e-3);
}

TEST(Counterexamples, ParameterResolution) {
  using namespace counterexamples;
  EXPECT_EQ(names().size(), 5u);
  auto p = resolve_params("ex3", {{"k", 4}});
  EXPECT_EQ(p["k"], 4);
  EXPECT_EQ(p["beta"], 2.0);
  EXPECT_THROW(resolve_params("ex3", {{"gamma", 1}}), std::invalid_argument);
  EXPECT_THROW(resolve_params("ex3", {{"k", "six"}}), std::invalid_argument);
  EXPECT_THROW(resolve_params("ex9"), std::invalid_argument);
  auto res = preset("smoke");
  EXPECT_THROW(counterexample_run("ex3", {{"h", {0.5, 0.5, 0.25}}}, res), std::invalid_argument);
  EXPECT_THROW(counterexample_run("ex3", {{"h", {0.25, 0.5}}}, res), std::invalid_argument);
  EXPECT_THROW(counterexample_run("ex3", {{"p", 1.6}}, res), std::invalid_argument);
  EXPECT_THROW(counterexample_run("ex4a", {{"alpha", 4.0}}, res), std::invalid_argument);
}

TEST(Counterexamples, Violation) {
  using counterexamples::violation;
  EXPECT_TRUE(violation({1, 2, 5, 10}, 10));
  EXPECT_FALSE(violation({1, 2, 5, 9}, 10));
  EXPECT_FALSE(violation({1, 20, 5, 30}, 10));
  EXPECT_FALSE(violation({1}, 1));
}

TEST(Counterexamples, Ex3Rates) {
  auto r = counterexamples::counterexample_run("ex3", json::object(), preset("smoke"));
  EXPECT_NEAR(r.rates["lhs_vs_h"]["slope"].get<double>(), 2.0 / 3, 0.05 * 2 / 3);
  EXPECT_NEAR(r.rates["boundary_vs_h"]["slope"].get<double>(), 0.6, 0.03);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.rows.size(), 6u);
}

TEST(Counterexamples, Ex1PartialSums) {
  auto r = counterexamples::counterexample_run("ex1", json::object(), preset("smoke"));
  EXPECT_EQ(r.constants["boundary_sup"].get<double>(), 2.0);
  EXPECT_GE(r.constants["grad_l1_growth"].get<double>(), 10.0);
  EXPECT_TRUE(r.pass());
  auto room = r.column("grad_l1_room");
  for (double v : room) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Counterexamples, Ex4Bumps) {
  auto res = preset("smoke");
  auto a = counterexamples::counterexample_run("ex4a", {{"k", 8}}, res);
  EXPECT_TRUE(a.pass());
  auto ra = a.column("ratio");
  EXPECT_GT(ra.back(), ra.front());
  auto b = counterexamples::counterexample_run("ex4b", json::object(), res);
  EXPECT_TRUE(b.pass());
  EXPECT_TRUE(b.constants["inequality_violated"].get<bool>());
  EXPECT_EQ(b.warnings.size(), 1u);
}

TEST(Counterexamples, Ex2ShortSweep) {
  auto r = counterexamples::counterexample_run("ex2", {{"k", 6}}, preset("smoke"));
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.constants["tail_first_k"], 4);
}
