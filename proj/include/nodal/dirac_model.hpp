#pragma once

// Problem data for the Dirac system
//
//     y1' = (q - mu) y2,   y2' = (mu - p) y1,   p = V + m,  q = V - m
//
// on (0, pi) with the boundary angles theta (left) and beta (right) and the
// transmission condition y1 -> sigma y1, y2 -> y2 / sigma at x = pi/2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nodal/errors.hpp"

namespace nodal {

inline constexpr double pi = std::numbers::pi;
inline constexpr double half_pi = std::numbers::pi / 2.0;

/// a * cos(x)
struct CosPotential {
    double amplitude = 1.0;
};

/// a * sin(x)
struct SinPotential {
    double amplitude = 1.0;
};

/// sum_k c[k] x^k
struct PolyPotential {
    std::vector<double> coefficients;
};

/// Samples (x_i, V_i) on [0, pi], linearly interpolated.
struct TablePotential {
    std::vector<double> x;
    std::vector<double> v;
};

using PotentialForm = std::variant<CosPotential, SinPotential, PolyPotential, TablePotential>;

/// A potential normalized to zero mean on [0, pi]. The raw form is kept
/// together with the constant that was subtracted from it.
class Potential {
public:
    Potential() : Potential(PolyPotential{}) {}

    explicit Potential(PotentialForm form) : form_(std::move(form)) {
        if (const auto* table = std::get_if<TablePotential>(&form_)) {
            check_table(*table);
            build_prefix(*table);
        }
        shift_ = raw_integral(pi) / pi;
    }

    [[nodiscard]] const PotentialForm& form() const noexcept { return form_; }

    /// Constant subtracted from the raw potential so that its integral vanishes.
    [[nodiscard]] double shift() const noexcept { return shift_; }

    [[nodiscard]] double operator()(double x) const { return raw_value(x) - shift_; }

    /// Integral of the normalized potential over [0, x].
    [[nodiscard]] double integral(double x) const { return raw_integral(x) - shift_ * x; }

    [[nodiscard]] double raw_value(double x) const {
        return std::visit([x, this](const auto& f) { return value_of(f, x); }, form_);
    }

    [[nodiscard]] double raw_integral(double x) const {
        return std::visit([x, this](const auto& f) { return integral_of(f, x); }, form_);
    }

private:
    static void check_table(const TablePotential& t) {
        if (t.x.size() != t.v.size() || t.x.size() < 2) {
            throw Error(ErrorKind::InvalidConfig, "tabulated potential needs matching x/v arrays of length >= 2");
        }
        for (std::size_t i = 1; i < t.x.size(); ++i) {
            if (!(t.x[i] > t.x[i - 1])) {
                throw Error(ErrorKind::InvalidConfig, "tabulated potential x must be strictly increasing");
            }
        }
        constexpr double tol = 1e-12;
        if (t.x.front() > tol || t.x.back() < pi - tol) {
            throw Error(ErrorKind::InvalidConfig, "tabulated potential must cover [0, pi]");
        }
        for (double v : t.v) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::InvalidConfig, "tabulated potential has a non-finite value");
            }
        }
    }

    void build_prefix(const TablePotential& t) {
        prefix_.assign(t.x.size(), 0.0);
        for (std::size_t i = 1; i < t.x.size(); ++i) {
            prefix_[i] = prefix_[i - 1] + 0.5 * (t.v[i] + t.v[i - 1]) * (t.x[i] - t.x[i - 1]);
        }
    }

    static std::size_t segment(const TablePotential& t, double x) {
        auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
        std::size_t i = it == t.x.begin() ? 0 : static_cast<std::size_t>(it - t.x.begin()) - 1;
        return std::min(i, t.x.size() - 2);
    }

    static double value_of(const CosPotential& f, double x) { return f.amplitude * std::cos(x); }
    static double value_of(const SinPotential& f, double x) { return f.amplitude * std::sin(x); }
    static double value_of(const PolyPotential& f, double x) {
        double acc = 0.0;
        for (auto it = f.coefficients.rbegin(); it != f.coefficients.rend(); ++it) {
            acc = acc * x + *it;
        }
        return acc;
    }
    double value_of(const TablePotential& t, double x) const {
        std::size_t i = segment(t, x);
        double w = (x - t.x[i]) / (t.x[i + 1] - t.x[i]);
        return (1.0 - w) * t.v[i] + w * t.v[i + 1];
    }

    static double integral_of(const CosPotential& f, double x) { return f.amplitude * std::sin(x); }
    static double integral_of(const SinPotential& f, double x) { return f.amplitude * (1.0 - std::cos(x)); }
    static double integral_of(const PolyPotential& f, double x) {
        double acc = 0.0;
        for (std::size_t k = f.coefficients.size(); k-- > 0;) {
            acc = acc * x + f.coefficients[k] / static_cast<double>(k + 1);
        }
        return acc * x;
    }
    // Exact integral of the piecewise-linear interpolant.
    double integral_of(const TablePotential& t, double x) const {
        std::size_t i = segment(t, x);
        double dx = x - t.x[i];
        double slope = (t.v[i + 1] - t.v[i]) / (t.x[i + 1] - t.x[i]);
        return prefix_[i] + dx * (t.v[i] + 0.5 * slope * dx);
    }

    PotentialForm form_;
    std::vector<double> prefix_;
    double shift_ = 0.0;
};

struct ComponentPair {
    double y1 = 0.0;
    double y2 = 0.0;
};

/// Unvalidated input. Only theta is mandatory; beta defaults to theta,
/// sigma to 1, the mass to 0 and the potential to zero.
struct RawConfig {
    std::optional<double> theta;
    std::optional<double> beta;
    std::optional<double> sigma;
    std::optional<double> mass;
    std::optional<PotentialForm> potential;
};

struct JumpConstants {
    double sigma_plus = 1.0;
    double sigma_minus = 0.0;
    double gamma = 0.0;
    double arcsin_gamma = 0.0;
    double c_even = 0.0;
};

/// Validated, immutable problem data plus the constants derived from it.
struct ProblemConfig {
    double theta = 0.0;
    double beta = 0.0;
    double sigma = 1.0;
    double mass = 0.0;
    Potential potential;

    double sigma_plus = 1.0;
    double sigma_minus = 0.0;
    double rho_half = 0.0;  // rho(pi/2)
    double gamma = 0.0;
    double arcsin_gamma = 0.0;
    double c_even = 0.0;  // (beta - theta - arcsin(gamma)) / pi

    /// cot(theta) vanishes at theta = pi/2; the paper-form mass formula
    /// divides by it.
    bool theta_is_right_angle = false;

    [[nodiscard]] double V(double x) const { return potential(x); }
    [[nodiscard]] double p(double x) const { return potential(x) + mass; }
    [[nodiscard]] double q(double x) const { return potential(x) - mass; }
};

inline ProblemConfig validate_config(const RawConfig& raw) {
    if (!raw.theta) {
        throw Error(ErrorKind::InvalidConfig, "theta is required");
    }
    ProblemConfig cfg;
    cfg.theta = *raw.theta;
    cfg.beta = raw.beta.value_or(cfg.theta);
    cfg.sigma = raw.sigma.value_or(1.0);
    cfg.mass = raw.mass.value_or(0.0);

    for (double v : {cfg.theta, cfg.beta, cfg.sigma, cfg.mass}) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::InvalidConfig, "non-finite parameter");
        }
    }
    if (!(cfg.theta > 0.0 && cfg.theta < pi)) {
        throw Error(ErrorKind::InvalidConfig, "theta must lie in (0, pi), got " + std::to_string(cfg.theta));
    }
    if (!(cfg.beta > 0.0 && cfg.beta < pi)) {
        throw Error(ErrorKind::InvalidConfig, "beta must lie in (0, pi), got " + std::to_string(cfg.beta));
    }
    if (std::abs(std::sin(cfg.theta)) < 1e-9) {
        throw Error(ErrorKind::InvalidConfig, "sin(theta) vanishes");
    }
    if (!(cfg.sigma > 0.0)) {
        throw Error(ErrorKind::InvalidConfig, "sigma must be positive, got " + std::to_string(cfg.sigma));
    }
    cfg.potential = raw.potential ? Potential(*raw.potential) : Potential();

    cfg.sigma_plus = 0.5 * (cfg.sigma + 1.0 / cfg.sigma);
    cfg.sigma_minus = 0.5 * (cfg.sigma - 1.0 / cfg.sigma);
    cfg.rho_half = cfg.potential.integral(half_pi);
    cfg.gamma = -(cfg.sigma_minus / cfg.sigma_plus) * std::sin(2.0 * cfg.rho_half + cfg.theta + cfg.beta);
    cfg.arcsin_gamma = std::asin(cfg.gamma);
    cfg.c_even = (cfg.beta - cfg.theta - cfg.arcsin_gamma) / pi;
    cfg.theta_is_right_angle = std::abs(std::cos(cfg.theta)) < 1e-12;
    return cfg;
}

/// rho(x): integral of V over [0, x].
inline double rho(const ProblemConfig& cfg, double x) {
    if (!(x >= 0.0 && x <= pi)) {
        throw Error(ErrorKind::InvalidArgument, "rho: x outside [0, pi]: " + std::to_string(x));
    }
    return cfg.potential.integral(x);
}

/// rho(x) - rho(pi/2)
inline double rho_shifted(const ProblemConfig& cfg, double x) { return rho(cfg, x) - cfg.rho_half; }

inline JumpConstants jump_constants(const ProblemConfig& cfg) {
    return {cfg.sigma_plus, cfg.sigma_minus, cfg.gamma, cfg.arcsin_gamma, cfg.c_even};
}

}  // namespace nodal
