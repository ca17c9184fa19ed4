#pragma once

// Shooting solver for the Dirac system with the mid-point jump.
//
// The system is integrated in polar form y1 = r cos(phi), y2 = r sin(phi):
//
//     phi'      = mu - V(x) - m cos(2 phi)
//     (ln r)'   = -m sin(2 phi)
//
// with classical fixed-step RK4 on [0, pi/2] and [pi/2, pi]. The jump is the
// exact map (y1, y2) -> (sigma y1, y2 / sigma) applied between the halves;
// it never changes the quadrant of (y1, y2), so the phase stays continuous.
// Zeros of psi1 are the crossings phi = pi/2 + k pi, and the sign of the
// characteristic function is the sign of sin(phi(pi) + beta).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "nodal/dirac_model.hpp"
#include "nodal/errors.hpp"

namespace nodal {

struct SolverOptions {
    int steps_per_half = 4096;
};

/// Sampled solution at one mu. The grid holds pi/2 twice: index
/// `jump_index()` is the left limit and the next index the right limit.
struct Trajectory {
    double mu = 0.0;
    int steps_per_half = 0;
    std::vector<double> grid;
    std::vector<ComponentPair> values;
    std::vector<double> phase;

    [[nodiscard]] std::size_t jump_index() const noexcept { return static_cast<std::size_t>(steps_per_half); }
};

struct NodalSet {
    int n = 0;
    double mu_n = 0.0;
    std::vector<double> nodes;
};

namespace detail {

/// Phase increment of the transmission map tan(phi+) = tan(phi-) / sigma^2.
/// The map keeps the quadrant, so the increment lies in (-pi/2, pi/2).
inline double jump_phase_shift(double phi, double sigma) {
    double mapped = std::atan2(std::sin(phi) / sigma, sigma * std::cos(phi));
    double d = std::remainder(mapped - phi, 2.0 * pi);
    return d;
}

/// d(phi+)/d(phi-) of the transmission map.
inline double jump_phase_derivative(double phi, double sigma) {
    double c = std::cos(phi), s = std::sin(phi);
    double s2 = sigma * sigma;
    return s2 / (s2 * s2 * c * c + s * s);
}

inline double jump_log_radius(double phi, double sigma) {
    double c = std::cos(phi), s = std::sin(phi);
    return 0.5 * std::log(sigma * sigma * c * c + s * s / (sigma * sigma));
}

}  // namespace detail

/// Holds a validated configuration together with the potential sampled on
/// the RK4 half-step lattice, so repeated shots at different mu share it.
class ForwardSolver {
public:
    explicit ForwardSolver(ProblemConfig cfg, SolverOptions opts = {})
        : cfg_(std::move(cfg)), n_(opts.steps_per_half) {
        if (n_ < 2) {
            throw Error(ErrorKind::InvalidArgument, "steps_per_half must be >= 2");
        }
        h_ = half_pi / n_;
        v_left_.resize(2 * static_cast<std::size_t>(n_) + 1);
        v_right_.resize(v_left_.size());
        for (std::size_t k = 0; k < v_left_.size(); ++k) {
            double off = 0.5 * h_ * static_cast<double>(k);
            v_left_[k] = cfg_.V(off);
            v_right_[k] = cfg_.V(half_pi + off);
        }
    }

    [[nodiscard]] const ProblemConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] int steps_per_half() const noexcept { return n_; }
    [[nodiscard]] double step() const noexcept { return h_; }

    [[nodiscard]] Trajectory integrate(double mu) const {
        Trajectory tr;
        tr.mu = mu;
        tr.steps_per_half = n_;
        const std::size_t per_half = static_cast<std::size_t>(n_) + 1;
        tr.grid.reserve(2 * per_half);
        tr.values.reserve(2 * per_half);
        tr.phase.reserve(2 * per_half);

        double phi = -cfg_.theta;
        double logr = 0.0;
        auto record = [&tr](double x, double ph, double lr) {
            double r = std::exp(lr);
            tr.grid.push_back(x);
            tr.phase.push_back(ph);
            tr.values.push_back({r * std::cos(ph), r * std::sin(ph)});
        };

        record(0.0, phi, logr);
        for (int i = 0; i < n_; ++i) {
            step_rk4<true>(mu, v_left_, i, phi, logr);
            record(h_ * (i + 1), phi, logr);
        }
        check_finite(phi, logr, mu);
        logr += detail::jump_log_radius(phi, cfg_.sigma);
        phi += detail::jump_phase_shift(phi, cfg_.sigma);
        record(half_pi, phi, logr);
        for (int i = 0; i < n_; ++i) {
            step_rk4<true>(mu, v_right_, i, phi, logr);
            record(half_pi + h_ * (i + 1), phi, logr);
        }
        check_finite(phi, logr, mu);
        tr.grid.back() = pi;
        return tr;
    }

    /// Prufer angle of psi at x = pi.
    [[nodiscard]] double end_phase(double mu) const {
        double phi = -cfg_.theta;
        double unused = 0.0;
        for (int i = 0; i < n_; ++i) step_rk4<false>(mu, v_left_, i, phi, unused);
        phi += detail::jump_phase_shift(phi, cfg_.sigma);
        for (int i = 0; i < n_; ++i) step_rk4<false>(mu, v_right_, i, phi, unused);
        check_finite(phi, 0.0, mu);
        return phi;
    }

    /// sin(beta) psi1(pi, mu) + cos(beta) psi2(pi, mu)
    [[nodiscard]] double delta(double mu) const {
        double phi = -cfg_.theta;
        double logr = 0.0;
        for (int i = 0; i < n_; ++i) step_rk4<true>(mu, v_left_, i, phi, logr);
        logr += detail::jump_log_radius(phi, cfg_.sigma);
        phi += detail::jump_phase_shift(phi, cfg_.sigma);
        for (int i = 0; i < n_; ++i) step_rk4<true>(mu, v_right_, i, phi, logr);
        check_finite(phi, logr, mu);
        return std::exp(logr) * std::sin(phi + cfg_.beta);
    }

    /// Anchor of the n-th eigenvalue, n - (beta - theta)/pi + (-1)^n asin(gamma)/pi.
    [[nodiscard]] double anchor(int n) const {
        double sign = (n % 2 == 0) ? 1.0 : -1.0;
        return n - (cfg_.beta - cfg_.theta) / pi + sign * cfg_.arcsin_gamma / pi;
    }

    /// Root of the characteristic function closest to the anchor.
    [[nodiscard]] double eigenvalue_near(int n) const {
        if (n == 0) {
            throw Error(ErrorKind::InvalidArgument, "eigenvalue index must be nonzero");
        }
        const double mu0 = anchor(n);
        double half_width = 0.5;
        for (int attempt = 0; attempt <= 3; ++attempt, half_width *= 2.0) {
            std::vector<double> roots = roots_in(mu0 - half_width, mu0 + half_width);
            if (roots.empty()) continue;
            std::sort(roots.begin(), roots.end(),
                      [mu0](double a, double b) { return std::abs(a - mu0) < std::abs(b - mu0); });
            if (roots.size() > 1 && std::abs(std::abs(roots[0] - mu0) - std::abs(roots[1] - mu0)) < 1e-9) {
                throw Error(ErrorKind::MultipleRootsAmbiguous,
                            "two roots equidistant from the anchor for n = " + std::to_string(n));
            }
            return roots.front();
        }
        throw Error(ErrorKind::NoRootInWindow, "no eigenvalue within 4 of the anchor for n = " + std::to_string(n));
    }

    [[nodiscard]] std::vector<std::pair<int, double>> spectrum(int n_max) const {
        if (n_max < 1) {
            throw Error(ErrorKind::InvalidArgument, "spectrum needs n_max >= 1");
        }
        std::vector<std::pair<int, double>> out;
        out.reserve(static_cast<std::size_t>(n_max));
        for (int n = 1; n <= n_max; ++n) {
            double mu = eigenvalue_near(n);
            if (!out.empty() && !(mu > out.back().second)) {
                throw Error(ErrorKind::MultipleRootsAmbiguous,
                            "eigenvalues not increasing at n = " + std::to_string(n));
            }
            out.emplace_back(n, mu);
        }
        return out;
    }

    /// Zeros of psi1 in (0, pi) from an already computed trajectory, each
    /// refined by bisection on a single RK4 step from the grid point to the
    /// left of the crossing.
    [[nodiscard]] std::vector<double> zeros_of_first_component(const Trajectory& tr) const {
        std::vector<double> nodes;
        const std::size_t jump = tr.jump_index();
        for (std::size_t i = 0; i + 1 < tr.grid.size(); ++i) {
            if (i == jump) continue;  // left and right limits at pi/2
            double a = tr.phase[i], b = tr.phase[i + 1];
            double lo = std::min(a, b), hi = std::max(a, b);
            // levels pi/2 + k pi inside (lo, hi]
            double k_first = std::floor((lo - half_pi) / pi) + 1.0;
            for (double k = k_first; half_pi + k * pi <= hi; k += 1.0) {
                double level = half_pi + k * pi;
                if (level == lo) continue;
                nodes.push_back(refine_node(tr.mu, tr.grid[i], a, level));
            }
        }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::remove_if(nodes.begin(), nodes.end(), [](double z) { return !(z > 0.0 && z < pi); }),
                    nodes.end());
        return nodes;
    }

    [[nodiscard]] NodalSet nodal_set(int n) const {
        if (n < 1) {
            throw Error(ErrorKind::InvalidArgument, "nodal_set needs n >= 1");
        }
        NodalSet set{n, eigenvalue_near(n), {}};
        set.nodes = zeros_of_first_component(integrate(set.mu_n));
        if (static_cast<int>(set.nodes.size()) == n) return set;

        ForwardSolver finer(cfg_, SolverOptions{2 * n_});
        NodalSet retry{n, finer.eigenvalue_near(n), {}};
        retry.nodes = finer.zeros_of_first_component(finer.integrate(retry.mu_n));
        if (static_cast<int>(retry.nodes.size()) == n) return retry;

        // Near a spectral gap the root closest to the anchor can belong to a
        // neighbouring eigenfunction; take the nearby root with n nodes.
        const double mu0 = anchor(n);
        std::vector<double> roots = finer.roots_in(mu0 - 2.0, mu0 + 2.0);
        std::sort(roots.begin(), roots.end(),
                  [mu0](double a, double b) { return std::abs(a - mu0) < std::abs(b - mu0); });
        for (double mu : roots) {
            std::vector<double> nodes = finer.zeros_of_first_component(finer.integrate(mu));
            if (static_cast<int>(nodes.size()) == n) return NodalSet{n, mu, std::move(nodes)};
        }
        throw Error(ErrorKind::NodeCountMismatch, "expected " + std::to_string(n) + " nodes, found " +
                                                      std::to_string(retry.nodes.size()) +
                                                      " and no root within 2 of the anchor has n nodes");
    }

private:
    template <bool WithRadius>
    void step_rk4(double mu, const std::vector<double>& v, int i, double& phi, double& logr) const {
        const double m = cfg_.mass;
        const std::size_t k = 2 * static_cast<std::size_t>(i);
        const double v0 = v[k], vm = v[k + 1], v1 = v[k + 2];
        auto f = [mu, m](double vx, double ph) { return mu - vx - m * std::cos(2.0 * ph); };

        const double p1 = phi;
        const double k1 = f(v0, p1);
        const double p2 = phi + 0.5 * h_ * k1;
        const double k2 = f(vm, p2);
        const double p3 = phi + 0.5 * h_ * k2;
        const double k3 = f(vm, p3);
        const double p4 = phi + h_ * k3;
        const double k4 = f(v1, p4);
        phi += h_ / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if constexpr (WithRadius) {
            const double l = -m / 6.0 * (std::sin(2.0 * p1) + 2.0 * std::sin(2.0 * p2) + 2.0 * std::sin(2.0 * p3) +
                                         std::sin(2.0 * p4));
            logr += h_ * l;
        }
    }

    // One RK4 step of arbitrary length s from x0; V is evaluated directly.
    [[nodiscard]] double phase_step(double mu, double x0, double phi, double s) const {
        const double m = cfg_.mass;
        auto f = [&](double x, double ph) { return mu - cfg_.V(x) - m * std::cos(2.0 * ph); };
        const double k1 = f(x0, phi);
        const double k2 = f(x0 + 0.5 * s, phi + 0.5 * s * k1);
        const double k3 = f(x0 + 0.5 * s, phi + 0.5 * s * k2);
        const double k4 = f(x0 + s, phi + s * k3);
        return phi + s / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    [[nodiscard]] double refine_node(double mu, double x0, double phi0, double level) const {
        double lo = 0.0, hi = h_;
        const double g_lo = phi0 - level;
        const double width = 1e-12 * pi;
        for (int it = 0; it < 50 && hi - lo > width; ++it) {
            double mid = 0.5 * (lo + hi);
            double g = phase_step(mu, x0, phi0, mid) - level;
            if ((g < 0.0) == (g_lo < 0.0)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return x0 + 0.5 * (lo + hi);
    }

    // All roots of the characteristic function in [a, b]. The end phase is
    // increasing in mu, so each crossing of a multiple of pi is a single
    // sign change and is bracketed by [a, b] itself.
    [[nodiscard]] std::vector<double> roots_in(double a, double b) const {
        auto target = [this](double mu) { return end_phase(mu) + cfg_.beta; };
        const double ta = target(a), tb = target(b);
        std::vector<double> roots;
        for (double k = std::floor(std::min(ta, tb) / pi) + 1.0; k * pi < std::max(ta, tb); k += 1.0) {
            double lo = a, hi = b;
            double level = k * pi;
            bool increasing = tb > ta;
            for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
                double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                bool below = target(mid) < level;
                if (below == increasing) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        return roots;
    }

    static void check_finite(double phi, double logr, double mu) {
        if (!std::isfinite(phi) || !std::isfinite(logr)) {
            throw Error(ErrorKind::NonFinite, "integration overflow at mu = " + std::to_string(mu));
        }
    }

    ProblemConfig cfg_;
    int n_;
    double h_ = 0.0;
    std::vector<double> v_left_;
    std::vector<double> v_right_;
};

struct IntegralResidual {
    double left = 0.0;
    double right = 0.0;
    [[nodiscard]] double max() const noexcept { return std::max(left, right); }
};

namespace detail {

// Running integral of uniformly sampled f: Simpson on even indices, a
// one-interval quadratic rule for the odd ones.
inline std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n < 3) {
        for (std::size_t k = 1; k < n; ++k) out[k] = out[k - 1] + 0.5 * h * (f[k - 1] + f[k]);
        return out;
    }
    for (std::size_t k = 1; k < n; ++k) {
        if (k % 2 == 0) {
            out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
        } else if (k + 1 < n) {
            out[k] = out[k - 1] + h / 12.0 * (5.0 * f[k - 1] + 8.0 * f[k] - f[k + 1]);
        } else {
            out[k] = out[k - 1] + h / 12.0 * (-f[k - 2] + 8.0 * f[k - 1] + 5.0 * f[k]);
        }
    }
    return out;
}

inline ComponentPair rotate(double a, ComponentPair v) {
    const double c = std::cos(a), s = std::sin(a);
    return {c * v.y1 - s * v.y2, s * v.y1 + c * v.y2};
}

}  // namespace detail

/// Largest pointwise gap, per half, between a computed trajectory and the
/// right-hand side of the integral form of the problem
///
///   left:  y(x) = R(mu x) [y0 + I(x)],   I(x) = int_0^x R(-mu t) g(t) dt
///   right: y(x) = s+ R(mu x) [y0 + I(pi/2)] + s- R(mu (x - pi)) P [y0 + I(pi/2)]
///                 + R(mu x) int_{pi/2}^x R(-mu t) g(t) dt
///
/// with R the rotation matrix, P = diag(1, -1) and g = (q y2, -p y1).
/// Quadratures are cumulative Simpson on the trajectory grid.
inline IntegralResidual integral_residual(const ProblemConfig& cfg, const Trajectory& tr) {
    const std::size_t n = static_cast<std::size_t>(tr.steps_per_half);
    if (tr.grid.size() != 2 * (n + 1) || tr.values.size() != tr.grid.size()) {
        throw Error(ErrorKind::InvalidArgument, "trajectory layout does not match its step count");
    }
    const double mu = tr.mu;
    const double h = half_pi / static_cast<double>(n);
    const ComponentPair y0 = tr.values.front();

    auto pulled_back = [&](std::size_t idx, double x) {
        const ComponentPair y = tr.values[idx];
        return detail::rotate(-mu * x, {cfg.q(x) * y.y2, -cfg.p(x) * y.y1});
    };
    auto gap = [](ComponentPair a, ComponentPair b) { return std::max(std::abs(a.y1 - b.y1), std::abs(a.y2 - b.y2)); };

    std::vector<double> f1(n + 1), f2(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        ComponentPair g = pulled_back(k, h * static_cast<double>(k));
        f1[k] = g.y1;
        f2[k] = g.y2;
    }
    std::vector<double> i1 = detail::cumulative_simpson(f1, h), i2 = detail::cumulative_simpson(f2, h);

    IntegralResidual res;
    for (std::size_t k = 0; k <= n; ++k) {
        double x = h * static_cast<double>(k);
        ComponentPair rhs = detail::rotate(mu * x, {y0.y1 + i1[k], y0.y2 + i2[k]});
        res.left = std::max(res.left, gap(tr.values[k], rhs));
    }

    const ComponentPair w{y0.y1 + i1[n], y0.y2 + i2[n]};
    const ComponentPair pw{w.y1, -w.y2};
    for (std::size_t k = 0; k <= n; ++k) {
        double x = half_pi + h * static_cast<double>(k);
        ComponentPair g = pulled_back(n + 1 + k, x);
        f1[k] = g.y1;
        f2[k] = g.y2;
    }
    i1 = detail::cumulative_simpson(f1, h);
    i2 = detail::cumulative_simpson(f2, h);
    for (std::size_t k = 0; k <= n; ++k) {
        double x = half_pi + h * static_cast<double>(k);
        ComponentPair a = detail::rotate(mu * x, w);
        ComponentPair b = detail::rotate(mu * (x - pi), pw);
        ComponentPair c = detail::rotate(mu * x, {i1[k], i2[k]});
        ComponentPair rhs{cfg.sigma_plus * a.y1 + cfg.sigma_minus * b.y1 + c.y1,
                          cfg.sigma_plus * a.y2 + cfg.sigma_minus * b.y2 + c.y2};
        res.right = std::max(res.right, gap(tr.values[n + 1 + k], rhs));
    }
    return res;
}

inline Trajectory integrate(const ProblemConfig& cfg, double mu, SolverOptions opts = {}) {
    return ForwardSolver(cfg, opts).integrate(mu);
}

inline double delta(const ProblemConfig& cfg, double mu, SolverOptions opts = {}) {
    return ForwardSolver(cfg, opts).delta(mu);
}

inline double eigenvalue_near(const ProblemConfig& cfg, int n, SolverOptions opts = {}) {
    return ForwardSolver(cfg, opts).eigenvalue_near(n);
}

inline std::vector<std::pair<int, double>> spectrum(const ProblemConfig& cfg, int n_max, SolverOptions opts = {}) {
    return ForwardSolver(cfg, opts).spectrum(n_max);
}

inline NodalSet nodal_set(const ProblemConfig& cfg, int n, SolverOptions opts = {}) {
    return ForwardSolver(cfg, opts).nodal_set(n);
}

}  // namespace nodal
