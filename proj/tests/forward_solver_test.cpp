#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "nodal/asymptotics.hpp"
#include "nodal/forward_solver.hpp"
#include "support.hpp"

using namespace nodal;

// Reference values below come from an independent integration of the
// untransformed system (y1, y2) with an adaptive 8th-order Runge-Kutta
// method at relative tolerance 1e-13 and Brent root finding.
namespace oracle {
constexpr double delta_D_425 = -1.383733609063;
constexpr double delta_D_445 = -0.777494024276;
constexpr double psi1_pi_D_5 = 1.979262596934;
constexpr double mu_D_8 = 8.455389892566;
constexpr double mu_D_10 = 10.416597524126;
const std::vector<double> nodes_D_10{0.235780334341, 0.517130063835, 0.802093810550, 1.092569996012,
                                     1.390317885247, 1.718158393348, 2.034942180910, 2.361292924328,
                                     2.695808159750, 3.035638856497};
}  // namespace oracle

TEST(Integrate, ConstantCoefficientSolution) {
    ProblemConfig t = nodal::test::config_T();
    Trajectory tr = integrate(t, 3.0);
    ASSERT_EQ(tr.grid.size(), tr.values.size());
    for (std::size_t i = 0; i < tr.grid.size(); ++i) {
        EXPECT_NEAR(tr.values[i].y1, std::cos(3.0 * tr.grid[i] - 1.0), 1e-9);
        EXPECT_NEAR(tr.values[i].y2, std::sin(3.0 * tr.grid[i] - 1.0), 1e-9);
    }
    const std::size_t k = tr.jump_index();
    EXPECT_DOUBLE_EQ(tr.grid[k], half_pi);
    EXPECT_DOUBLE_EQ(tr.grid[k + 1], half_pi);
    EXPECT_NEAR(tr.values[k].y1, tr.values[k + 1].y1, 1e-15);
    EXPECT_NEAR(tr.values[k].y2, tr.values[k + 1].y2, 1e-15);
}

TEST(Integrate, MatchesReferenceAtPi) {
    ProblemConfig d = nodal::test::config_D();
    EXPECT_NEAR(integrate(d, 5.0).values.back().y1, oracle::psi1_pi_D_5, 1e-9);
}

TEST(Integrate, StepHalvingSelfConsistent) {
    ProblemConfig d = nodal::test::config_D();
    double a = integrate(d, 5.0, SolverOptions{4096}).values.back().y1;
    double b = integrate(d, 5.0, SolverOptions{8192}).values.back().y1;
    EXPECT_NEAR(a, b, 1e-8);
}

TEST(Delta, ConstantCase) {
    ProblemConfig t = nodal::test::config_T();
    EXPECT_NEAR(delta(t, 0.5), 1.0, 1e-10);
    EXPECT_NEAR(delta(t, 5.0), 0.0, 1e-8);
}

TEST(Delta, ReferenceValuesOfD) {
    ProblemConfig d = nodal::test::config_D();
    EXPECT_NEAR(delta(d, 4.25), oracle::delta_D_425, 1e-9);
    EXPECT_NEAR(delta(d, 4.45), oracle::delta_D_445, 1e-9);
    // Both are negative: the root between them is at 4.6326, outside [4.25, 4.45].
    EXPECT_GT(delta(d, 4.25) * delta(d, 4.45), 0.0);
    EXPECT_LT(delta(d, 4.62) * delta(d, 4.65), 0.0);
}

TEST(Eigenvalues, ConstantCase) {
    ProblemConfig t = nodal::test::config_T();
    EXPECT_NEAR(eigenvalue_near(t, 5), 5.0, 1e-8);
    EXPECT_NEAR(eigenvalue_near(t, 12), 12.0, 1e-8);
    EXPECT_ERROR_KIND(eigenvalue_near(t, 0), ErrorKind::InvalidArgument);
}

TEST(Eigenvalues, ReferenceValuesOfD) {
    ProblemConfig d = nodal::test::config_D();
    EXPECT_NEAR(mu_zero(d, 8), 8.252031, 1e-6);
    EXPECT_NEAR(eigenvalue_near(d, 8), oracle::mu_D_8, 1e-9);
}

TEST(Spectrum, ConstantCase) {
    auto s = spectrum(nodal::test::config_T(), 3);
    ASSERT_EQ(s.size(), 3u);
    for (int n = 1; n <= 3; ++n) {
        EXPECT_EQ(s[n - 1].first, n);
        EXPECT_NEAR(s[n - 1].second, n, 1e-8);
    }
    EXPECT_ERROR_KIND(spectrum(nodal::test::config_T(), 0), ErrorKind::InvalidArgument);
}

TEST(Spectrum, IncreasingWithBoundedDrift) {
    ProblemConfig d = nodal::test::config_D();
    auto s = spectrum(d, 30);
    ASSERT_EQ(s.size(), 30u);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GT(s[i].second, s[i - 1].second);
    for (const auto& [n, mu] : s) {
        if (n >= 8) {
            EXPECT_LT(n * std::abs(mu - mu_zero(d, n)), 3.0) << "n = " << n;
        }
    }
}

TEST(NodalSet, ConstantCase) {
    ProblemConfig t = nodal::test::config_T();
    NodalSet s3 = nodal_set(t, 3);
    ASSERT_EQ(s3.nodes.size(), 3u);
    const double expected[] = {0.856932, 1.904130, 2.951328};
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(s3.nodes[k], expected[k], 1e-6);
        EXPECT_NEAR(s3.nodes[k], (1.0 + half_pi + k * pi) / 3.0, 1e-10);
    }
    NodalSet s1 = nodal_set(t, 1);
    ASSERT_EQ(s1.nodes.size(), 1u);
    EXPECT_NEAR(s1.nodes[0], 2.570796, 1e-6);
}

TEST(NodalSet, ReferenceNodesOfD) {
    ProblemConfig d = nodal::test::config_D();
    NodalSet s = nodal_set(d, 10);
    EXPECT_NEAR(s.mu_n, oracle::mu_D_10, 1e-9);
    ASSERT_EQ(s.nodes.size(), 10u);
    for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(s.nodes[k], oracle::nodes_D_10[k], 1e-9);

    NodalSet fine = nodal_set(d, 10, SolverOptions{8192});
    for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(s.nodes[k], fine.nodes[k], 1e-8);
}

TEST(NodalSet, SmallIndicesNearTheMassGap) {
    // The roots closest to the anchors of n = 2, 3 belong to the
    // eigenfunctions with one and two nodes; nodal_set picks by node count.
    ProblemConfig d = nodal::test::config_D();
    for (int n = 1; n <= 6; ++n) {
        NodalSet s = nodal_set(d, n);
        EXPECT_EQ(static_cast<int>(s.nodes.size()), n);
    }
    EXPECT_NEAR(nodal_set(d, 2).mu_n, 2.8136, 1e-3);
    EXPECT_ERROR_KIND(nodal_set(d, 0), ErrorKind::InvalidArgument);
}

TEST(IntegralResidual, Bounds) {
    EXPECT_LE(integral_residual(nodal::test::config_T(), integrate(nodal::test::config_T(), 3.0)).max(), 1e-8);
    ProblemConfig d = nodal::test::config_D();
    EXPECT_LE(integral_residual(d, integrate(d, 5.0)).max(), 1e-6);
    EXPECT_LE(integral_residual(d, integrate(d, 20.0)).max(), 1e-5);
}

// ---------------------------------------------------------------------------
// properties

TEST(ForwardProperty, JumpPreservesProduct) {
    nodal::test::ConfigGenerator gen(21);
    for (int i = 0; i < 40; ++i) {
        ProblemConfig c = gen.config(false);
        Trajectory tr = integrate(c, gen.uniform(-5.0, 30.0), SolverOptions{256});
        const std::size_t k = tr.jump_index();
        const double before = tr.values[k].y1 * tr.values[k].y2;
        const double after = tr.values[k + 1].y1 * tr.values[k + 1].y2;
        EXPECT_NEAR(after, before, 1e-12 * (1.0 + std::abs(before)));
        EXPECT_NEAR(tr.values[k + 1].y1, c.sigma * tr.values[k].y1, 1e-12 * (1.0 + std::abs(tr.values[k].y1)));
    }
}

TEST(ForwardProperty, DeltaIsContinuousInMu) {
    nodal::test::ConfigGenerator gen(22);
    for (int i = 0; i < 10; ++i) {
        ProblemConfig c = gen.config(false);
        ForwardSolver s(c, SolverOptions{512});
        // |psi| <= e^{|m| pi} max(sigma, 1/sigma); the phase sensitivity w = d phi / d mu
        // obeys w' = 1 + 2 m sin(2 phi) w, amplified at the jump by at most max(sigma^2, sigma^-2).
        const double s2 = std::max(c.sigma * c.sigma, 1.0 / (c.sigma * c.sigma));
        const double amp = std::exp(std::abs(c.mass) * pi) * std::max(c.sigma, 1.0 / c.sigma);
        const double w = pi * std::exp(2.0 * std::abs(c.mass) * pi) * s2;
        const double lipschitz = amp * w * (1.0 + 2.0 * std::abs(c.mass) * pi);
        double prev = s.delta(0.0);
        for (double mu = 0.01; mu <= 20.0; mu += 0.01) {
            double cur = s.delta(mu);
            ASSERT_TRUE(std::isfinite(cur));
            EXPECT_LT(std::abs(cur - prev), 0.01 * lipschitz);
            prev = cur;
        }
    }
}

TEST(ForwardProperty, NodeCountEqualsIndex) {
    nodal::test::ConfigGenerator gen(23);
    for (int i = 0; i < 12; ++i) {
        ProblemConfig c = gen.config(true);
        ForwardSolver s(c, SolverOptions{1024});
        for (int n = 2; n <= 40; ++n) {
            NodalSet set = s.nodal_set(n);
            ASSERT_EQ(static_cast<int>(set.nodes.size()), n);
            for (std::size_t k = 1; k < set.nodes.size(); ++k) EXPECT_GT(set.nodes[k], set.nodes[k - 1]);
            // psi1 at each node vanishes to refinement tolerance
            Trajectory tr = s.integrate(set.mu_n);
            for (double z : set.nodes) {
                auto it = std::lower_bound(tr.grid.begin(), tr.grid.end(), z);
                std::size_t i1 = static_cast<std::size_t>(it - tr.grid.begin());
                ASSERT_GT(i1, 0u);
                // psi1 changes sign across the node
                EXPECT_LE(tr.values[i1 - 1].y1 * tr.values[i1].y1, 0.0);
            }
        }
    }
}

TEST(ForwardProperty, EigenvaluesInterlace) {
    nodal::test::ConfigGenerator gen(24);
    for (int i = 0; i < 8; ++i) {
        ProblemConfig c = gen.config(true, true);
        auto s = spectrum(c, 25, SolverOptions{512});
        for (std::size_t k = 1; k < s.size(); ++k) EXPECT_LT(s[k - 1].second, s[k].second);
    }
}

TEST(ForwardProperty, StepHalvingOrderOfFour) {
    nodal::test::ConfigGenerator gen(25);
    for (int i = 0; i < 8; ++i) {
        ProblemConfig c = gen.config(false, true);
        const double mu = gen.uniform(2.0, 8.0);
        double y[4];
        for (int k = 0; k < 4; ++k) y[k] = integrate(c, mu, SolverOptions{32 << k}).values.back().y1;
        const double order = std::log2(std::abs(y[1] - y[0]) / std::abs(y[2] - y[1]));
        const double order_fine = std::log2(std::abs(y[2] - y[1]) / std::abs(y[3] - y[2]));
        EXPECT_GE(std::max(order, order_fine), 3.8) << "mu = " << mu;
        EXPECT_GE(order_fine, 3.8) << "mu = " << mu;
    }
}
