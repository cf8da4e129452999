#include <cmath>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "ikham/config.hpp"
#include "ikham/consistency.hpp"

using namespace ikham;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(KeyValues::from_text(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig c = parse_config(KeyValues());
  EXPECT_EQ(c.mode, RunMode::selftest);
  EXPECT_DOUBLE_EQ(c.solver.tol, 1e-10);
  EXPECT_DOUBLE_EQ(c.gravity, 1.0);
  EXPECT_DOUBLE_EQ(c.depth_floor, 1e-3);
  EXPECT_EQ(c.points, 64);
  EXPECT_NEAR(c.length, 2 * std::numbers::pi, 1e-15);
  EXPECT_EQ(c.expansion_case, ExpansionCase::H1);
  EXPECT_EQ(c.order, 1);
  EXPECT_EQ(c.deltas.size(), 8u);
  EXPECT_NEAR(c.deltas.front(), 0.4, 1e-15);
  EXPECT_NEAR(c.deltas.back(), 0.05, 1e-15);
  EXPECT_NEAR(c.eta_field().max_abs(), 0.01, 1e-15);
  EXPECT_EQ(c.phi_field().max_abs(), 0.0);
}

TEST(Config, ParsesFileTextAndOverrides) {
  auto kv = KeyValues::from_text(
      "# comment\n"
      "spec.case = H2\n"
      "spec.N = 2   # trailing comment\n"
      "\n"
      "bottom.profile = cos\n"
      "bottom.amplitude = 0.1\n"
      "sweep.delta_list = 0.1, 0.2, 0.3\n");
  kv.set_assignment("physics.delta=0.25");
  const RunConfig c = parse_config(kv);
  EXPECT_EQ(c.expansion_case, ExpansionCase::H2);
  EXPECT_EQ(c.order, 2);
  EXPECT_DOUBLE_EQ(c.delta, 0.25);
  EXPECT_NEAR(c.bottom_field().max_abs(), 0.1, 1e-12);
  ASSERT_EQ(c.deltas.size(), 3u);
  EXPECT_DOUBLE_EQ(c.deltas[1], 0.2);
}

TEST(Config, ValidationErrors) {
  EXPECT_NE(error_of("bottom.profile = cos\nbottom.amplitude = 0.1\n").find("H1 requires flat bottom"),
            std::string::npos);
  EXPECT_NE(error_of("grid.M = 63\n").find("grid.M must be even"), std::string::npos);
  EXPECT_NE(error_of("physics.delta = 1.5\n").find("physics.delta"), std::string::npos);
  EXPECT_NE(error_of("eta.amplitude = 1.2\n").find("depth"), std::string::npos);
  EXPECT_NE(error_of("spec.case = H3\n").find("validation error"), std::string::npos);
  EXPECT_NE(error_of("gradcheck.eps_list = 0.001, 0.01\n").find("decreasing"), std::string::npos);
}

TEST(Config, ReportsLineOfBadEntry) {
  EXPECT_NE(error_of("grid.M = 32\nnot.a.key = 1\n").find("config:2: unknown key 'not.a.key'"), std::string::npos);
  EXPECT_NE(error_of("grid.M = 32\n\nmissing equals\n").find("config:3: expected 'key = value'"), std::string::npos);
  EXPECT_NE(error_of("grid.M = abc\n").find("expected an integer"), std::string::npos);
  KeyValues kv;
  EXPECT_THROW(kv.set_assignment("novalue"), ConfigError);
  EXPECT_THROW(kv.set("bogus", "1"), ConfigError);
}

TEST(Config, ProfilesAndHash) {
  const Grid g(2 * std::numbers::pi, 8);
  ProfileSpec p;
  p.profile = "fourier";
  p.coefficients = "1 1 0; 0.5 2 1.5707963267948966";
  const Field f = build_profile(g, p, "eta");
  for (int j = 0; j < 8; ++j) {
    const double x = g.node(j);
    EXPECT_NEAR(f[j], std::cos(x) + 0.5 * std::cos(2 * x + std::numbers::pi / 2), 1e-14);
  }
  p.profile = "samples";
  p.samples = {1, 2, 3};
  EXPECT_THROW(build_profile(g, p, "eta"), ConfigError);
  p.profile = "wiggly";
  EXPECT_THROW(build_profile(g, p, "eta"), ConfigError);

  const auto a = parse_config(KeyValues::from_text("spec.N = 2\n"));
  const auto b = parse_config(KeyValues::from_text("spec.N=2"));
  const auto c = parse_config(KeyValues::from_text("spec.N = 3\n"));
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_NE(a.hash, c.hash);
  EXPECT_EQ(a.hash.size(), 16u);
}

TEST(Sweep, FitLineAndGeometricDeltas) {
  const auto d = geometric_deltas(0.05, 0.4, 4);
  ASSERT_EQ(d.size(), 4u);
  EXPECT_NEAR(d[0] / d[1], 2.0, 1e-12);
  EXPECT_NEAR(d[0], 0.4, 1e-15);
  EXPECT_NEAR(d[3], 0.05, 1e-15);
  const auto fit = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(fit.slope, 2.0, 1e-14);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-14);
  EXPECT_NEAR(fit.slope_stderr, 0.0, 1e-14);
}

TEST(Config, HashIgnoresOutputLocation) {
  const auto a = parse_config(KeyValues::from_text("output.dir = a\njobs = 1\n"));
  const auto b = parse_config(KeyValues::from_text("output.dir = b\njobs = 4\n"));
  EXPECT_EQ(a.hash, b.hash);
}
