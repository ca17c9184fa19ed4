#include <cmath>

#include <gtest/gtest.h>

#include "nodal/dirac_model.hpp"
#include "support.hpp"

using namespace nodal;
using nodal::test::make;

TEST(Config, TrivialConfigHasIdentityJump) {
    ProblemConfig t = nodal::test::config_T();
    EXPECT_DOUBLE_EQ(t.sigma_plus, 1.0);
    EXPECT_DOUBLE_EQ(t.sigma_minus, 0.0);
    EXPECT_DOUBLE_EQ(t.gamma, 0.0);
    EXPECT_DOUBLE_EQ(t.c_even, 0.0);
}

TEST(Config, DefaultsFillBetaSigmaMassPotential) {
    RawConfig raw;
    raw.theta = 1.0;
    raw.mass = 2.0;
    raw.potential = CosPotential{-1.0};
    ProblemConfig p = validate_config(raw);
    EXPECT_DOUBLE_EQ(p.beta, 1.0);
    EXPECT_DOUBLE_EQ(p.sigma, 1.0);
    EXPECT_DOUBLE_EQ(p.mass, 2.0);
    EXPECT_DOUBLE_EQ(p.V(0.0), -1.0);
}

TEST(Config, JumpConstantsOfD) {
    JumpConstants k = jump_constants(nodal::test::config_D());
    EXPECT_DOUBLE_EQ(k.sigma_plus, 1.25);
    EXPECT_DOUBLE_EQ(k.sigma_minus, 0.75);
    EXPECT_NEAR(k.gamma, -0.6 * std::sin(-0.5), 1e-15);
    EXPECT_NEAR(k.gamma, 0.2876553, 1e-7);
    // (0.5 - 1 - asin(0.2876553)) / pi; asin(0.2876553) = 0.2917778.
    EXPECT_NEAR(k.arcsin_gamma, 0.2917778, 1e-7);
    EXPECT_NEAR(k.c_even, -0.2520307, 1e-7);
}

TEST(Config, GammaAtUnitSine) {
    // sigma = 3, rho(pi/2) = 0, theta + beta = pi/2
    ProblemConfig c = make(0.5, half_pi - 0.5, 3.0, 0.0, std::nullopt);
    EXPECT_NEAR(c.gamma, -0.8, 1e-14);
}

TEST(Config, RejectsBadInput) {
    RawConfig raw;
    EXPECT_ERROR_KIND(validate_config(raw), ErrorKind::InvalidConfig);
    raw.theta = 0.0;
    EXPECT_ERROR_KIND(validate_config(raw), ErrorKind::InvalidConfig);
    raw.theta = pi;
    EXPECT_ERROR_KIND(validate_config(raw), ErrorKind::InvalidConfig);
    raw.theta = 1.0;
    raw.beta = 3.5;
    EXPECT_ERROR_KIND(validate_config(raw), ErrorKind::InvalidConfig);
    raw.beta = 1.0;
    raw.sigma = 0.0;
    EXPECT_ERROR_KIND(validate_config(raw), ErrorKind::InvalidConfig);
    raw.sigma = std::nan("");
    EXPECT_ERROR_KIND(validate_config(raw), ErrorKind::InvalidConfig);
    raw.sigma = 1.0;
    raw.potential = TablePotential{{0.0, 1.0}, {1.0, 2.0}};
    EXPECT_ERROR_KIND(validate_config(raw), ErrorKind::InvalidConfig);
    raw.potential = TablePotential{{0.0, 2.0, 1.0, pi}, {0, 0, 0, 0}};
    EXPECT_ERROR_KIND(validate_config(raw), ErrorKind::InvalidConfig);
}

TEST(Config, RightAngleThetaIsFlagged) {
    EXPECT_TRUE(make(half_pi, 1.0, 1.0, 0.0, std::nullopt).theta_is_right_angle);
    EXPECT_FALSE(make(1.0, 1.0, 1.0, 0.0, std::nullopt).theta_is_right_angle);
}

TEST(Rho, AnalyticValues) {
    EXPECT_DOUBLE_EQ(rho(nodal::test::config_T(), 1.0), 0.0);
    ProblemConfig p = nodal::test::config_P();
    EXPECT_NEAR(rho(p, half_pi), -1.0, 1e-15);
    EXPECT_NEAR(rho(p, pi / 4), -0.7071068, 1e-7);
    EXPECT_NEAR(rho_shifted(p, pi / 4), -0.7071068 + 1.0, 1e-7);
    EXPECT_ERROR_KIND(rho(p, -0.1), ErrorKind::InvalidArgument);
    EXPECT_ERROR_KIND(rho(p, 3.2), ErrorKind::InvalidArgument);
}

TEST(Potential, MeanIsRemovedAndRecorded) {
    ProblemConfig c = make(1.0, 1.0, 1.0, 0.0, PolyPotential{{2.0, 1.0}});
    EXPECT_NEAR(c.potential.shift(), 2.0 + half_pi, 1e-14);
    EXPECT_NEAR(rho(c, pi), 0.0, 1e-13);
    EXPECT_NEAR(c.V(1.0), 3.0 - 2.0 - half_pi, 1e-14);
}

TEST(Potential, TableWithJumpIntegratesExactly) {
    // a step at pi/2: +1 on the left, -1 on the right
    TablePotential t{{0.0, half_pi, half_pi + 1e-9, pi}, {1.0, 1.0, -1.0, -1.0}};
    ProblemConfig c = make(1.0, 1.0, 1.0, 0.0, t);
    EXPECT_NEAR(rho(c, 1.0), 1.0, 1e-8);
    EXPECT_NEAR(rho(c, half_pi), half_pi, 1e-8);
    EXPECT_NEAR(rho(c, pi), 0.0, 1e-8);
}

// ---------------------------------------------------------------------------
// properties

TEST(ConfigProperty, SigmaPlusMinusIdentity) {
    for (int i = 0; i <= 400; ++i) {
        double sigma = std::exp(-4.0 + 8.0 * i / 400.0);
        ProblemConfig c = make(1.0, 1.0, sigma, 0.0, std::nullopt);
        double lhs = c.sigma_plus * c.sigma_plus - c.sigma_minus * c.sigma_minus;
        EXPECT_NEAR(lhs, 1.0, 1e-12 * c.sigma_plus * c.sigma_plus) << "sigma = " << sigma;
    }
}

TEST(ConfigProperty, GammaBoundedBySigmaRatio) {
    nodal::test::ConfigGenerator gen(11);
    for (int i = 0; i < 500; ++i) {
        ProblemConfig c = gen.config(false);
        EXPECT_LE(std::abs(c.gamma), std::abs(c.sigma_minus) / c.sigma_plus + 1e-15);
        EXPECT_LT(std::abs(c.gamma), 1.0);
    }
}

TEST(ConfigProperty, RhoVanishesAtPiAndIsAdditive) {
    nodal::test::ConfigGenerator gen(12);
    for (int i = 0; i < 300; ++i) {
        ProblemConfig c = gen.config(false);
        EXPECT_NEAR(rho(c, pi), 0.0, 1e-12);
        double a = gen.uniform(0.0, pi), b = gen.uniform(0.0, pi);
        if (a > b) std::swap(a, b);
        // composite Simpson on [a, b] with a breakpoint at every table knot
        std::vector<double> cuts{a, b};
        if (const auto* t = std::get_if<TablePotential>(&c.potential.form())) {
            for (double x : t->x) {
                if (x > a && x < b) cuts.push_back(x);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        double integral = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const int m = 512;
            const double h = (cuts[k + 1] - cuts[k]) / m;
            double s = c.V(cuts[k]) + c.V(cuts[k + 1]);
            for (int q = 1; q < m; ++q) s += (q % 2 ? 4.0 : 2.0) * c.V(cuts[k] + q * h);
            integral += s * h / 3.0;
        }
        EXPECT_NEAR(rho(c, b) - rho(c, a), integral, 1e-10);
    }
}

TEST(ConfigProperty, RhoIsContinuousForTables) {
    nodal::test::ConfigGenerator gen(13);
    for (int i = 0; i < 100; ++i) {
        TablePotential t;
        for (int k = 0; k <= 8; ++k) {
            t.x.push_back(pi * k / 8);
            t.v.push_back(gen.uniform(-3.0, 3.0));
        }
        ProblemConfig c = make(1.0, 1.0, 1.0, 0.0, t);
        for (double x : t.x) {
            double lo = std::max(0.0, x - 1e-9), hi = std::min(pi, x + 1e-9);
            EXPECT_NEAR(rho(c, lo), rho(c, hi), 1e-8);
        }
    }
}
