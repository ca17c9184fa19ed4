#pragma once

// Closed-form large-mu expansions: eigenvalue anchors, the two-term
// solution expansions on both halves, the characteristic function, the
// nodal point series and the limit functions Phi / Psi.
//
// Two evaluation modes are provided for the nodal quantities:
//   Mode::paper       the truncated series, term for term, including the
//                     linearized arctangent (first-order offset -cot(theta)).
//   Mode::consistent  the same expansion carried out without linearizing
//                     the arctangent: the left offset is theta - pi/2, the
//                     right offset comes from the exact transmission phase
//                     map, and second-order terms carry the sin^2(theta)
//                     Jacobian. docs/method.md sketches the derivation.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nodal/dirac_model.hpp"
#include "nodal/errors.hpp"
#include "nodal/fit.hpp"
#include "nodal/forward_solver.hpp"

namespace nodal {

enum class Mode { paper, consistent };

inline std::string to_string(Mode mode) { return mode == Mode::paper ? "paper" : "consistent"; }

inline Mode parse_mode(const std::string& s) {
    if (s == "paper") return Mode::paper;
    if (s == "consistent") return Mode::consistent;
    throw Error(ErrorKind::InvalidArgument, "unknown mode '" + s + "'");
}

namespace detail {
inline double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }
inline double cot(double x) { return std::cos(x) / std::sin(x); }
inline double csc2(double x) {
    double s = std::sin(x);
    return 1.0 / (s * s);
}
}  // namespace detail

/// n - (beta - theta)/pi + (-1)^n asin(gamma)/pi
inline double mu_zero(const ProblemConfig& cfg, int n) {
    return n - (cfg.beta - cfg.theta) / pi + detail::parity(n) * cfg.arcsin_gamma / pi;
}

/// (beta - theta - (-1)^n asin(gamma)) / pi; equals c_even for even n.
inline double drift_constant(const ProblemConfig& cfg, int n) {
    return (cfg.beta - cfg.theta - detail::parity(n) * cfg.arcsin_gamma) / pi;
}

/// Two-term expansion of psi(x, mu) for x != pi/2.
inline ComponentPair psi_asymptotic(const ProblemConfig& cfg, double x, double mu) {
    if (x == half_pi || mu == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "psi_asymptotic needs x != pi/2 and mu != 0");
    }
    const double th = cfg.theta, m = cfg.mass;
    const double a = mu * x - rho(cfg, x);
    if (x < half_pi) {
        double y1 = std::cos(a - th) + m * std::sin(th) / mu * std::sin(a) + m * m * x / (2.0 * mu) * std::sin(a - th);
        double y2 = std::sin(a - th) - m * std::cos(th) / mu * std::sin(a) - m * m * x / (2.0 * mu) * std::cos(a - th);
        return {y1, y2};
    }
    const double sp = cfg.sigma_plus, sm = cfg.sigma_minus;
    const double b = a - mu * pi + 2.0 * cfg.rho_half;  // reflected phase without theta
    double y1 = sp * std::cos(a - th) + sm * std::cos(b + th) + sp * m * std::sin(th) / mu * std::sin(a) -
                sm * m * std::sin(th) / mu * std::sin(b) + sp * m * m * x / (2.0 * mu) * std::sin(a - th) -
                sm * m * m * (pi - x) / (2.0 * mu) * std::sin(b + th);
    double y2 = sp * std::sin(a - th) + sm * std::sin(b + th) - sp * m * std::cos(th) / mu * std::sin(a) +
                sm * m * std::sin(th) / mu * std::sin(b) - sp * m * m * x / (2.0 * mu) * std::cos(a - th) +
                sm * m * m * (pi - x) / (2.0 * mu) * std::cos(b + th);
    return {y1, y2};
}

/// Large-mu form of the characteristic function, leading terms plus the
/// three 1/mu corrections.
inline double delta_asymptotic(const ProblemConfig& cfg, double mu) {
    if (mu == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "delta_asymptotic needs mu != 0");
    }
    const double th = cfg.theta, be = cfg.beta, m = cfg.mass;
    const double sp = cfg.sigma_plus, sm = cfg.sigma_minus;
    const double r2 = 2.0 * cfg.rho_half;
    return sp * std::sin(mu * pi - th + be) + sm * std::sin(r2 + th + be) -
           sp * m / mu * std::cos(th + be) * std::sin(mu * pi) +
           sm * m / mu * (std::cos(be) - std::cos(th)) * std::sin(th) * std::sin(r2) -
           sp * m * m * pi / (2.0 * mu) * std::cos(mu * pi - th + be);
}

/// Constants of the right-half nodal series for index n (parity kept).
/// T2* and M* depend on the node location x.
struct StarConstants {
    double T1_star = 0.0;
    double T2_star = 0.0;
    double M_star = 0.0;
    double numerator = 0.0;  // -sigma+ cos(theta) - sigma- (-1)^n cos(...)
};

inline StarConstants star_constants(const ProblemConfig& cfg, int n, double x) {
    const double e = detail::parity(n);
    const double th = cfg.theta, m = cfg.mass, sp = cfg.sigma_plus, sm = cfg.sigma_minus;
    const double arg = cfg.beta - e * cfg.arcsin_gamma + 2.0 * cfg.rho_half;
    StarConstants s;
    s.T1_star = sp * std::sin(th) + sm * e * std::sin(arg);
    s.T2_star = sp * m * std::sin(th) + sm * m * std::sin(th) * e * std::cos(arg) + 0.5 * sp * m * m * x * std::cos(th) +
                0.5 * sm * m * m * (pi - x) * e * std::cos(arg);
    s.M_star = e * sm * m * std::sin(th) * std::sin(arg) + 0.5 * sp * m * m * x * std::sin(th) +
               0.5 * e * sm * m * m * (pi - x) * std::sin(arg);
    s.numerator = -sp * std::cos(th) - sm * e * std::cos(arg);
    return s;
}

/// Even-n constants of the limit functions (T1**, T2**, M** at x).
inline StarConstants doublestar_constants(const ProblemConfig& cfg, double x) { return star_constants(cfg, 2, x); }

/// Quantities of the transmission map along the even-n (or odd-n)
/// eigenvalue sequence. `alpha` is the leading left-half phase at pi/2.
struct JumpPhase {
    double alpha = 0.0;
    double shift = 0.0;       // J(alpha) in (-pi/2, pi/2)
    double derivative = 1.0;  // F'(alpha)
};

inline JumpPhase jump_phase(const ProblemConfig& cfg, int n) {
    JumpPhase jp;
    jp.alpha = mu_zero(cfg, n) * half_pi - cfg.rho_half - cfg.theta;
    jp.shift = detail::jump_phase_shift(jp.alpha, cfg.sigma);
    jp.derivative = detail::jump_phase_derivative(jp.alpha, cfg.sigma);
    return jp;
}

/// d_n in mu_n = mu_n^0 + d_n / n + O(1/n^2).
inline double eigenvalue_correction(const ProblemConfig& cfg, int n) {
    const JumpPhase jp = jump_phase(cfg, n);
    const double m = cfg.mass, th = cfg.theta;
    const double f0 = jp.alpha + jp.shift;
    const double left_drift = -m * std::sin(th) * std::cos(th) - m * m * pi / 4.0 - 0.5 * m * std::sin(2.0 * jp.alpha);
    const double num = jp.derivative * left_drift + 0.5 * m * std::sin(2.0 * f0) - m * m * pi / 4.0 +
                       0.5 * m * std::sin(2.0 * cfg.beta);
    return -num / ((jp.derivative + 1.0) * half_pi);
}

/// First-order offsets K with Phi(x) = rho(x) + c x + K on each half.
struct Offsets {
    double left = 0.0;
    double right = 0.0;
};

inline Offsets first_order_offsets(const ProblemConfig& cfg, Mode mode, int n = 2) {
    if (mode == Mode::paper) {
        StarConstants s = star_constants(cfg, n, half_pi);
        if (std::abs(s.T1_star) < 1e-12) {
            throw Error(ErrorKind::DegenerateDenominator, "T1 vanishes");
        }
        return {-detail::cot(cfg.theta), s.numerator / s.T1_star};
    }
    const JumpPhase jp = jump_phase(cfg, n);
    return {cfg.theta - half_pi, cfg.theta - half_pi - jp.shift};
}

namespace detail {

// Second-order coefficient E(x) of the consistent expansion in powers of
// 1/mu:  mu x - rho(x) = j pi + K + E(x)/mu + O(1/mu^2).
inline double consistent_second_order(const ProblemConfig& cfg, int n, double x, bool right) {
    const double m = cfg.mass, th = cfg.theta;
    const double msc = m * std::sin(th) * std::cos(th);
    if (!right) return msc + 0.5 * m * m * x;
    const JumpPhase jp = jump_phase(cfg, n);
    const double d = eigenvalue_correction(cfg, n);
    const double f0 = jp.alpha + jp.shift;
    return -(jp.derivative - 1.0) * d * half_pi +
           jp.derivative * (msc + m * m * pi / 4.0 + 0.5 * m * std::sin(2.0 * jp.alpha)) -
           0.5 * m * std::sin(2.0 * f0) + 0.5 * m * m * (x - half_pi);
}

inline double node_series(const ProblemConfig& cfg, int n, int j, Mode mode, bool right, double x) {
    const double nn = n;
    const double u = j * pi / nn;
    const double c = drift_constant(cfg, n);
    const double r = cfg.potential.integral(std::clamp(x, 0.0, pi));
    const double th = cfg.theta, m = cfg.mass;
    if (mode == Mode::paper) {
        if (!right) {
            return u + c * u / nn + r / nn - cot(th) / nn + c * r / (nn * nn) + m * cot(th) / (nn * nn) +
                   c * cot(th) / (nn * nn) + m * m * x * csc2(th) / (2.0 * nn * nn);
        }
        StarConstants s = star_constants(cfg, n, x);
        if (std::abs(s.T1_star) < 1e-12) {
            throw Error(ErrorKind::DegenerateDenominator, "T1* vanishes");
        }
        return u + c * u / nn + r / nn + s.numerator / (nn * s.T1_star) + c * r / (nn * nn) +
               c * s.numerator / (nn * nn * s.T1_star) - s.numerator / (nn * nn * s.T1_star) * s.T2_star / s.T1_star +
               s.M_star / (nn * nn * s.T1_star);
    }
    const Offsets k = first_order_offsets(cfg, Mode::consistent, n);
    const double off = right ? k.right : k.left;
    const double d = eigenvalue_correction(cfg, n);
    // 1/mu_n = (1 + c/n + (c^2 - d)/n^2) / n
    return u + c * u / nn + (c * c - d) * u / (nn * nn) + (r + off) / nn + c * (r + off) / (nn * nn) +
           consistent_second_order(cfg, n, x, right) / (nn * nn);
}

}  // namespace detail

/// Asymptotic location of the node labelled j of the n-th eigenfunction.
/// Labels follow x ~ j pi / n; with offsets in (-pi, pi) the admissible
/// range is 0 <= j <= n.
inline double node_asymptotic(const ProblemConfig& cfg, int n, int j, Mode mode) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "node_asymptotic needs n >= 1");
    if (j < 0 || j > n) {
        throw Error(ErrorKind::InvalidArgument, "node label " + std::to_string(j) + " out of range for n = " +
                                                    std::to_string(n));
    }
    auto resolve = [&](bool right) {
        double x = j * pi / n;
        for (int pass = 0; pass < 2; ++pass) x = detail::node_series(cfg, n, j, mode, right, x);
        return x;
    };
    double left = resolve(false);
    if (left < half_pi) return left;
    return resolve(true);
}

/// Phi(x) = lim n (x_n^j - j pi / n), even n.
inline double phi_closed(const ProblemConfig& cfg, double x, Mode mode) {
    if (!(x >= 0.0 && x <= pi) || x == half_pi) {
        throw Error(ErrorKind::InvalidArgument, "phi_closed needs x in [0, pi] minus pi/2");
    }
    const Offsets k = first_order_offsets(cfg, mode);
    return rho(cfg, x) + cfg.c_even * x + (x < half_pi ? k.left : k.right);
}

/// Psi(x) = lim n^2 (x_n^j - j pi/n - c j pi/n^2 - rho(x_n^j)/n - K/n), even n.
///
/// Paper mode is the truncated series with the factor 1/2 on the m^2 x
/// term of the left half. Consistent mode also carries the eigenvalue
/// correction (c^2 - d) x that the expansion of j pi / mu_n produces.
inline double psi_closed(const ProblemConfig& cfg, double x, Mode mode) {
    if (!(x >= 0.0 && x <= pi) || x == half_pi) {
        throw Error(ErrorKind::InvalidArgument, "psi_closed needs x in [0, pi] minus pi/2");
    }
    const double c = cfg.c_even, th = cfg.theta, m = cfg.mass;
    const double r = rho(cfg, x);
    const bool right = x > half_pi;
    if (mode == Mode::paper) {
        if (!right) {
            return c * r + c * detail::cot(th) + m * detail::cot(th) + 0.5 * m * m * x * detail::csc2(th);
        }
        StarConstants s = doublestar_constants(cfg, x);
        if (std::abs(s.T1_star) < 1e-12) {
            throw Error(ErrorKind::DegenerateDenominator, "T1** vanishes");
        }
        return c * s.numerator / s.T1_star - s.numerator / s.T1_star * s.T2_star / s.T1_star + s.M_star / s.T1_star;
    }
    const Offsets k = first_order_offsets(cfg, Mode::consistent);
    const double off = right ? k.right : k.left;
    const double d = eigenvalue_correction(cfg, 2);
    return c * (r + off) + detail::consistent_second_order(cfg, 2, x, right) + (c * c - d) * x;
}

/// mu |Delta(mu) - Delta_asym(mu)| on a uniform mu grid. `envelope_slope`
/// is the log-log slope of the per-bin maxima over ten equal bins, a
/// growth measure insensitive to the oscillation.
struct DeltaSweep {
    std::vector<double> mu;
    std::vector<double> scaled_residual;
    double sup = 0.0;
    double envelope_slope = 0.0;
};

inline DeltaSweep delta_residual_sweep(const ForwardSolver& solver, double lo, double hi, double step) {
    if (!(lo > 0.0) || !(hi > lo) || !(step > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "delta sweep needs 0 < lo < hi and step > 0");
    }
    const ProblemConfig& cfg = solver.config();
    DeltaSweep out;
    for (double mu = lo; mu <= hi + 1e-12; mu += step) {
        out.mu.push_back(mu);
        out.scaled_residual.push_back(mu * std::abs(solver.delta(mu) - delta_asymptotic(cfg, mu)));
    }
    out.sup = *std::max_element(out.scaled_residual.begin(), out.scaled_residual.end());

    constexpr int bins = 10;
    std::vector<double> centers, maxima;
    for (int b = 0; b < bins; ++b) {
        const double a = lo + (hi - lo) * b / bins, z = lo + (hi - lo) * (b + 1) / bins;
        double best = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < out.mu.size(); ++i) {
            if (out.mu[i] >= a && (out.mu[i] < z || (b == bins - 1 && out.mu[i] <= z))) {
                best = std::max(best, out.scaled_residual[i]);
                any = true;
            }
        }
        if (any && best > 0.0) {
            centers.push_back(0.5 * (a + z));
            maxima.push_back(best);
        }
    }
    if (centers.size() >= 2) out.envelope_slope = loglog_slope(centers, maxima);
    return out;
}

}  // namespace nodal
