#pragma once

// Fixtures and hand-rolled generators shared by the unit tests.

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "nodal/dirac_model.hpp"
#include "nodal/errors.hpp"

namespace nodal::test {

inline ProblemConfig make(double theta, std::optional<double> beta, std::optional<double> sigma,
                          std::optional<double> mass, std::optional<PotentialForm> potential) {
    RawConfig raw;
    raw.theta = theta;
    raw.beta = beta;
    raw.sigma = sigma;
    raw.mass = mass;
    raw.potential = std::move(potential);
    return validate_config(raw);
}

// theta = beta = 1, sigma = 1, m = 0, V = 0: every solution is a rotating vector.
inline ProblemConfig config_T() { return make(1.0, 1.0, 1.0, 0.0, std::nullopt); }

inline ProblemConfig config_D() { return make(1.0, 0.5, 2.0, 2.0, CosPotential{-1.0}); }

// The reference series' left-half data with beta and sigma left at their defaults.
inline ProblemConfig config_P() { return make(1.0, std::nullopt, std::nullopt, 2.0, CosPotential{-1.0}); }

// The reference series with the right-half constants matched: beta = 1, sigma = 2.
inline ProblemConfig config_E() { return make(1.0, 1.0, 2.0, 2.0, CosPotential{-1.0}); }

/// Deterministic random configs with smooth potentials. With `same_side`
/// theta and beta lie on the same side of pi/2.
class ConfigGenerator {
public:
    explicit ConfigGenerator(std::uint32_t seed) : rng_(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

    PotentialForm potential() {
        switch (integer(0, 3)) {
        case 0: return CosPotential{uniform(-1.5, 1.5)};
        case 1: return SinPotential{uniform(-1.5, 1.5)};
        case 2: return PolyPotential{{uniform(-1, 1), uniform(-1, 1), uniform(-0.3, 0.3)}};
        default: {
            TablePotential t;
            const int k = integer(3, 12);
            for (int i = 0; i <= k; ++i) {
                t.x.push_back(pi * i / k);
                t.v.push_back(uniform(-1.5, 1.5));
            }
            return t;
        }
        }
    }

    ProblemConfig config(bool same_side = true, bool smooth = false) {
        const double side = uniform(0.0, 1.0) < 0.5 ? 0.0 : half_pi;
        const double theta = side + uniform(0.1, half_pi - 0.1);
        const double beta = same_side ? side + uniform(0.1, half_pi - 0.1) : uniform(0.1, pi - 0.1);
        PotentialForm v = potential();
        while (smooth && std::holds_alternative<TablePotential>(v)) v = potential();
        return make(theta, beta, uniform(0.3, 3.0), uniform(-2.0, 2.0), v);
    }

private:
    std::mt19937 rng_;
};

}  // namespace nodal::test

#define EXPECT_ERROR_KIND(stmt, expected_kind)                                  \
    do {                                                                        \
        try {                                                                   \
            (void)(stmt);                                                       \
            ADD_FAILURE() << "expected " << ::nodal::to_string(expected_kind);  \
        } catch (const ::nodal::Error& e__) {                                   \
            EXPECT_EQ(e__.kind(), expected_kind) << e__.what();                 \
        }                                                                       \
    } while (0)
