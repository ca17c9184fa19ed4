#pragma once

// Reconstruction of theta, V and m from the even-indexed nodal points.
//
// Pipeline: label the nodes (index_nodes), estimate the first-order limit
// Phi on a grid (estimate_phi), read off c, theta and V from it, then the
// second-order limit Psi (estimate_psi) and the mass.
//
// Finite-n values are taken at the lattice point u = j pi / n = x: the
// node offsets s_j = n x_j - j pi are interpolated in u with a cubic
// through same-side nodes. This keeps the sequence smooth in n, so the
// limits can be extrapolated by a least-squares fit in powers of 1/n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nodal/asymptotics.hpp"
#include "nodal/dirac_model.hpp"
#include "nodal/errors.hpp"
#include "nodal/fit.hpp"
#include "nodal/forward_solver.hpp"

namespace nodal {

enum class Provenance { forward_generated, synthetic_asymptotic, external_file };

inline std::string to_string(Provenance p) {
    switch (p) {
    case Provenance::forward_generated: return "forward-generated";
    case Provenance::synthetic_asymptotic: return "synthetic-asymptotic";
    case Provenance::external_file: return "external-file";
    }
    return "external-file";
}

inline Provenance parse_provenance(const std::string& s) {
    if (s == "forward-generated") return Provenance::forward_generated;
    if (s == "synthetic-asymptotic") return Provenance::synthetic_asymptotic;
    if (s == "external-file") return Provenance::external_file;
    throw Error(ErrorKind::InvalidArgument, "unknown provenance '" + s + "'");
}

struct NodalEntry {
    std::optional<double> mu_n;
    std::vector<double> nodes;
    /// Label j of the smallest node, when the producer knows it.
    std::optional<int> first_label;
};

struct NodalDataset {
    std::map<int, NodalEntry> entries;
    Provenance provenance = Provenance::external_file;
};

/// A dataset whose every entry carries first_label.
struct CalibratedDataset {
    NodalDataset data;
    int shift = 0;  // integer added to the incoming labels
};

struct LimitEstimate {
    double x = 0.0;
    double value = 0.0;
    double std_error = 0.0;
    std::vector<int> n_used;
    int shift_delta = 0;
};

struct EstimateOptions {
    double exclusion = pi / 64.0;
    int fit_entries = 8;    // number of n values in the extrapolation
    double fit_span = 8.0;  // they are spread geometrically over [n_max / span, n_max]
    int phi_order = 2;      // Phi + a/n + b/n^2
    int psi_order = 1;      // Psi + b/n
    int stencil = 4;        // interpolation points in u
};

inline void validate_dataset(const NodalDataset& ds) {
    for (const auto& [n, e] : ds.entries) {
        if (n < 1) throw Error(ErrorKind::InvalidArgument, "entry index must be positive");
        if (static_cast<int>(e.nodes.size()) != n) {
            throw Error(ErrorKind::NodeCountMismatch, "entry n = " + std::to_string(n) + " has " +
                                                          std::to_string(e.nodes.size()) + " nodes");
        }
        for (std::size_t i = 0; i < e.nodes.size(); ++i) {
            double z = e.nodes[i];
            if (!std::isfinite(z) || !(z > 0.0 && z < pi)) {
                throw Error(ErrorKind::InvalidArgument, "entry n = " + std::to_string(n) + " has a node outside (0, pi)");
            }
            if (i > 0 && !(z > e.nodes[i - 1])) {
                throw Error(ErrorKind::InvalidArgument, "entry n = " + std::to_string(n) + " nodes not increasing");
            }
        }
        if (e.mu_n && !std::isfinite(*e.mu_n)) {
            throw Error(ErrorKind::NonFinite, "entry n = " + std::to_string(n) + " has a non-finite eigenvalue");
        }
    }
}

inline std::vector<int> even_indices(const NodalDataset& ds) {
    std::vector<int> out;
    for (const auto& [n, e] : ds.entries) {
        if (n % 2 == 0) out.push_back(n);
    }
    return out;
}

/// Assigns node labels. The smallest node satisfies n x ~ j pi + Phi1(0+),
/// and Phi1(0+) = theta - pi/2 lies in (-pi/2, pi/2); the shift is the
/// integer that puts the extrapolated n x - j pi of the smallest node in
/// (-pi/2, pi/2] for the three largest even n. Entries without a label
/// start from j = 0.
inline CalibratedDataset index_nodes(const NodalDataset& ds) {
    validate_dataset(ds);
    std::vector<int> ns = even_indices(ds);
    if (ns.size() < 3) {
        throw Error(ErrorKind::InsufficientData, "labelling needs at least three even entries");
    }
    std::vector<double> nd, v;
    for (auto it = ns.end() - 3; it != ns.end(); ++it) {
        const NodalEntry& e = ds.entries.at(*it);
        nd.push_back(static_cast<double>(*it));
        v.push_back(*it * e.nodes.front() - e.first_label.value_or(0) * pi);
    }
    const double spread = *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
    if (spread > 0.5) {
        throw Error(ErrorKind::NoStableShift, "first-node offsets spread by " + std::to_string(spread) +
                                                  " across the three largest n");
    }
    const double limit = fit_inverse_powers(nd, v, 1).coef[0];
    const int shift = static_cast<int>(std::ceil((limit - half_pi) / pi));
    if (shift < -2 || shift > 2) {
        throw Error(ErrorKind::NoStableShift, "label shift " + std::to_string(shift) + " outside [-2, 2]");
    }
    CalibratedDataset out{ds, shift};
    for (auto& [n, e] : out.data.entries) e.first_label = e.first_label.value_or(0) + shift;
    return out;
}

namespace detail {

struct LatticeValue {
    double s = 0.0;  // interpolated n x - j pi at u = x
    bool ok = false;
    bool side_mismatch = false;
};

inline LatticeValue lattice_offset(const NodalEntry& e, int n, double x, int stencil) {
    LatticeValue out;
    const auto& z = e.nodes;
    const bool left = x < half_pi;
    // Same-side ranks form a contiguous block [lo, hi).
    const std::size_t split = static_cast<std::size_t>(std::lower_bound(z.begin(), z.end(), half_pi) - z.begin());
    const std::size_t lo = left ? 0 : split, hi = left ? split : z.size();
    const std::size_t count = hi - lo;
    if (count < 2) {
        out.side_mismatch = true;
        return out;
    }

    const int label0 = e.first_label.value_or(0);
    auto u_of = [&](std::size_t r) { return (label0 + static_cast<double>(r)) * pi / n; };
    std::size_t best = lo;
    for (std::size_t r = lo; r < hi; ++r) {
        if (std::abs(u_of(r) - x) < std::abs(u_of(best) - x)) best = r;
    }
    if (std::abs(u_of(best) - x) > 2.0 * pi / n) {
        out.side_mismatch = true;
        return out;
    }

    const std::size_t width = std::min<std::size_t>(static_cast<std::size_t>(std::max(stencil, 2)), count);
    std::size_t first = best >= lo + width / 2 ? best - width / 2 : lo;
    if (first + width > hi) first = hi - width;
    std::vector<double> us, ss;
    for (std::size_t r = first; r < first + width; ++r) {
        us.push_back(u_of(r));
        ss.push_back(n * z[r] - (label0 + static_cast<double>(r)) * pi);
    }
    out.s = lagrange(us, ss, x);
    out.ok = std::isfinite(out.s);
    return out;
}

/// Picks up to k values from the sorted list, spread geometrically between
/// max / span and max.
inline std::vector<int> spread_selection(const std::vector<int>& sorted, int k, double span) {
    if (sorted.empty() || k <= 0) return {};
    if (static_cast<int>(sorted.size()) <= k) return sorted;
    const double top = sorted.back();
    const double bottom = std::max(static_cast<double>(sorted.front()), top / span);
    std::vector<int> picked;
    for (int i = 0; i < k; ++i) {
        double target = k == 1 ? top : top * std::pow(bottom / top, static_cast<double>(i) / (k - 1));
        auto best = sorted.end();
        for (auto it = sorted.begin(); it != sorted.end(); ++it) {
            if (std::find(picked.begin(), picked.end(), *it) != picked.end()) continue;
            if (best == sorted.end() || std::abs(*it - target) < std::abs(*best - target)) best = it;
        }
        if (best != sorted.end()) picked.push_back(*best);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

inline void check_point(double x, double exclusion) {
    if (!(x > 0.0 && x < pi) || std::abs(x - half_pi) <= exclusion) {
        throw Error(ErrorKind::InvalidArgument, "x = " + std::to_string(x) + " lies outside (0, pi) or within " +
                                                    std::to_string(exclusion) + " of pi/2");
    }
}

struct Samples {
    std::vector<int> n;
    std::vector<double> s;
};

// Lattice offsets of every usable even entry at x, reduced to the fit window.
inline Samples collect(const CalibratedDataset& cal, double x, const EstimateOptions& opts) {
    Samples all;
    bool mismatch = false;
    for (int n : even_indices(cal.data)) {
        LatticeValue lv = lattice_offset(cal.data.entries.at(n), n, x, opts.stencil);
        mismatch = mismatch || lv.side_mismatch;
        if (!lv.ok) continue;
        all.n.push_back(n);
        all.s.push_back(lv.s);
    }
    if (all.n.empty() && mismatch) {
        throw Error(ErrorKind::SideMismatch, "no entry has nodes near x = " + std::to_string(x) + " on its side of pi/2");
    }
    if (all.n.size() < 3) {
        throw Error(ErrorKind::InsufficientData,
                    "only " + std::to_string(all.n.size()) + " usable even entries at x = " + std::to_string(x));
    }
    std::vector<int> keep = spread_selection(all.n, opts.fit_entries, opts.fit_span);
    Samples out;
    for (std::size_t i = 0; i < all.n.size(); ++i) {
        if (std::find(keep.begin(), keep.end(), all.n[i]) != keep.end()) {
            out.n.push_back(all.n[i]);
            out.s.push_back(all.s[i]);
        }
    }
    return out;
}

inline LimitEstimate extrapolate(double x, const std::vector<int>& ns, const std::vector<double>& y, int order,
                                 int shift) {
    std::vector<double> nd(ns.begin(), ns.end());
    const int usable = std::min(order, static_cast<int>(ns.size()) - 2);
    LinearFit fit = fit_inverse_powers(nd, y, std::max(usable, 0));
    return {x, fit.coef[0], fit.std_error[0], ns, shift};
}

}  // namespace detail

/// Phi(x) = lim n (x_n^j - j pi / n) over even n.
inline LimitEstimate estimate_phi(const CalibratedDataset& cal, double x, const EstimateOptions& opts = {}) {
    detail::check_point(x, opts.exclusion);
    detail::Samples smp = detail::collect(cal, x, opts);
    return detail::extrapolate(x, smp.n, smp.s, opts.phi_order, cal.shift);
}

/// First-pass quantities the second-order limit depends on.
struct PsiAux {
    double theta_hat = 0.0;
    double c_hat = 0.0;
    double offset_left = 0.0;
    double offset_right = 0.0;
    std::function<double(double)> rho_left;
    std::function<double(double)> rho_right;
};

/// Psi(x) = lim n^2 (x_n^j - j pi/n - c j pi/n^2 - rho(.)/n - K/n).
/// Paper mode evaluates rho at the lattice point j pi / n, as the reference
/// series is written; consistent mode evaluates it
/// at the node, as the expansion of the node condition requires.
inline LimitEstimate estimate_psi(const CalibratedDataset& cal, double x, const PsiAux& aux, Mode mode,
                                  const EstimateOptions& opts = {}) {
    detail::check_point(x, opts.exclusion);
    const bool right = x > half_pi;
    const auto& rho_hat = right ? aux.rho_right : aux.rho_left;
    if (!rho_hat) {
        throw Error(ErrorKind::AuxInconsistent, std::string("no rho estimate for the ") + (right ? "right" : "left") +
                                                    " half");
    }
    const double offset = right ? aux.offset_right : aux.offset_left;
    detail::Samples smp = detail::collect(cal, x, opts);
    std::vector<double> t;
    for (std::size_t i = 0; i < smp.n.size(); ++i) {
        const double n = smp.n[i];
        const double at = mode == Mode::consistent ? x + smp.s[i] / n : x;
        const double r = rho_hat(at);
        if (!std::isfinite(r)) {
            throw Error(ErrorKind::AuxInconsistent, "rho estimate unavailable at x = " + std::to_string(at));
        }
        t.push_back(n * (smp.s[i] - aux.c_hat * x - offset - r));
    }
    return detail::extrapolate(x, smp.n, t, opts.psi_order, cal.shift);
}

struct OneSidedLimits {
    double phi1_0 = 0.0;
    double phi1_half = 0.0;
    double phi2_half = 0.0;
    double phi2_pi = 0.0;
};

struct ReconstructionDiagnostics {
    std::vector<LimitEstimate> phi;
    std::vector<LimitEstimate> psi;
    OneSidedLimits limits;
    double psi1_0 = 0.0;
    double offset_left = 0.0;
    double offset_right = 0.0;
    std::vector<std::pair<double, double>> excluded;
    int shift = 0;
    bool mass_from_slope = false;
    std::optional<double> eigenvalue_correction;  // d in mu_n = n - c + d/n, when eigenvalues are present
};

struct ReconstructionResult {
    Mode mode = Mode::consistent;
    double theta_hat = 0.0;
    double c_hat = 0.0;
    double m_hat = 0.0;
    std::vector<std::pair<double, double>> V_hat;
    ReconstructionDiagnostics diagnostics;
};

struct ReconstructOptions {
    EstimateOptions estimate;
    int points_per_half = 64;
    int smoothing_width = 5;
    double slope_fallback_cos = 0.05;
};

/// Uniform reporting grid with the exclusion zones removed.
inline std::vector<double> default_grid(int points_per_half = 64, double exclusion = pi / 64.0) {
    if (points_per_half < 5) throw Error(ErrorKind::InvalidArgument, "grid needs at least 5 points per half");
    std::vector<double> g;
    auto fill = [&](double a, double b) {
        for (int i = 0; i < points_per_half; ++i) g.push_back(a + (b - a) * i / (points_per_half - 1));
    };
    fill(exclusion, half_pi - exclusion);
    fill(half_pi + exclusion, pi - exclusion);
    return g;
}

namespace detail {

// Derivative of the quadratic through three neighbours, at the middle or an end.
inline std::vector<double> derivative(const std::vector<double>& x, const std::vector<double>& f) {
    const std::size_t n = x.size();
    std::vector<double> d(n);
    auto quad_slope = [&](std::size_t a, double at) {
        const double x0 = x[a], x1 = x[a + 1], x2 = x[a + 2];
        return f[a] * ((at - x1) + (at - x2)) / ((x0 - x1) * (x0 - x2)) +
               f[a + 1] * ((at - x0) + (at - x2)) / ((x1 - x0) * (x1 - x2)) +
               f[a + 2] * ((at - x0) + (at - x1)) / ((x2 - x0) * (x2 - x1));
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t a = i == 0 ? 0 : (i + 1 == n ? n - 3 : i - 1);
        d[i] = quad_slope(a, x[i]);
    }
    return d;
}

// Centered moving average; the window shrinks symmetrically near the ends.
inline std::vector<double> smooth(const std::vector<double>& f, int width) {
    const int n = static_cast<int>(f.size());
    std::vector<double> out(f.size());
    const int half = width / 2;
    for (int i = 0; i < n; ++i) {
        int h = std::min({half, i, n - 1 - i});
        double acc = 0.0;
        for (int k = i - h; k <= i + h; ++k) acc += f[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(i)] = acc / (2 * h + 1);
    }
    return out;
}

// Value at `at` of the quadratic through the three grid points nearest it.
inline double end_value(const std::vector<double>& x, const std::vector<double>& f, bool at_start, double at) {
    const std::size_t n = x.size();
    std::size_t a = at_start ? 0 : n - 3;
    return lagrange({x[a], x[a + 1], x[a + 2]}, {f[a], f[a + 1], f[a + 2]}, at);
}

// Integral over [a, b] of the piecewise-linear interpolant of (x, f),
// extended linearly from the end segments.
inline double linear_integral(const std::vector<double>& x, const std::vector<double>& f, double a, double b) {
    const std::size_t n = x.size();
    auto line = [&](std::size_t i, double t) { return f[i] + (f[i + 1] - f[i]) * (t - x[i]) / (x[i + 1] - x[i]); };
    double acc = 0.5 * (line(0, a) + f[0]) * (x[0] - a);
    for (std::size_t i = 0; i + 1 < n; ++i) acc += 0.5 * (f[i] + f[i + 1]) * (x[i + 1] - x[i]);
    acc += 0.5 * (f[n - 1] + line(n - 2, b)) * (b - x[n - 1]);
    return acc;
}

inline std::function<double(double)> cubic_interpolant(std::vector<double> x, std::vector<double> f) {
    return [x = std::move(x), f = std::move(f)](double at) {
        const std::size_t n = x.size();
        if (n < 4) return lagrange(x, f, at);
        std::size_t i = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), at) - x.begin());
        std::size_t first = i >= 2 ? i - 2 : 0;
        if (first + 4 > n) first = n - 4;
        return lagrange({x[first], x[first + 1], x[first + 2], x[first + 3]},
                        {f[first], f[first + 1], f[first + 2], f[first + 3]}, at);
    };
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

}  // namespace detail

/// Limit of n (mu_n - n + c) over even n, or nothing if the dataset has no eigenvalues.
inline std::optional<double> estimate_eigenvalue_correction(const CalibratedDataset& cal, double c_hat,
                                                            const EstimateOptions& opts = {}) {
    std::vector<int> ns;
    for (int n : even_indices(cal.data)) {
        if (cal.data.entries.at(n).mu_n) ns.push_back(n);
    }
    if (ns.size() < 3) return std::nullopt;
    ns = detail::spread_selection(ns, opts.fit_entries, opts.fit_span);
    std::vector<double> y;
    for (int n : ns) y.push_back(n * (*cal.data.entries.at(n).mu_n - n + c_hat));
    return detail::extrapolate(0.0, ns, y, 1, cal.shift).value;
}

inline ReconstructionResult reconstruct(const NodalDataset& dataset, std::vector<double> grid, Mode mode,
                                        const ReconstructOptions& opts = {}) {
    const EstimateOptions& eo = opts.estimate;
    if (grid.empty()) grid = default_grid(opts.points_per_half, eo.exclusion);
    std::sort(grid.begin(), grid.end());
    std::vector<double> xl, xr;
    for (double x : grid) {
        detail::check_point(x, eo.exclusion);
        (x < half_pi ? xl : xr).push_back(x);
    }
    if (xl.size() < 5 || xr.size() < 5) {
        throw Error(ErrorKind::InvalidArgument, "grid needs at least 5 points on each half");
    }

    const CalibratedDataset cal = index_nodes(dataset);
    ReconstructionResult res;
    res.mode = mode;
    auto& dg = res.diagnostics;
    dg.shift = cal.shift;
    dg.excluded = {{0.0, eo.exclusion}, {half_pi - eo.exclusion, half_pi + eo.exclusion}, {pi - eo.exclusion, pi}};

    // (a) Phi on the grid and its one-sided limits
    std::vector<double> fl, fr;
    for (double x : xl) {
        dg.phi.push_back(estimate_phi(cal, x, eo));
        fl.push_back(dg.phi.back().value);
    }
    for (double x : xr) {
        dg.phi.push_back(estimate_phi(cal, x, eo));
        fr.push_back(dg.phi.back().value);
    }
    OneSidedLimits& lim = dg.limits;
    lim.phi1_0 = detail::end_value(xl, fl, true, 0.0);
    lim.phi1_half = detail::end_value(xl, fl, false, half_pi);
    lim.phi2_half = detail::end_value(xr, fr, true, half_pi);
    lim.phi2_pi = detail::end_value(xr, fr, false, pi);

    // (b) drift constant, (c) boundary angle
    res.c_hat = (lim.phi2_pi + lim.phi1_half - lim.phi2_half - lim.phi1_0) / pi;
    res.theta_hat = mode == Mode::paper ? half_pi + std::atan(lim.phi1_0) : lim.phi1_0 + half_pi;
    if (!(res.theta_hat > 0.0 && res.theta_hat < pi)) {
        throw Error(ErrorKind::ThetaOutOfRange, "theta estimate " + std::to_string(res.theta_hat) + " outside (0, pi)");
    }

    // (d) potential
    auto potential_half = [&](const std::vector<double>& x, const std::vector<double>& f) {
        std::vector<double> d = detail::derivative(x, f);
        for (double& v : d) v -= res.c_hat;
        return detail::smooth(d, opts.smoothing_width);
    };
    std::vector<double> vl = potential_half(xl, fl), vr = potential_half(xr, fr);
    const double mean = (detail::linear_integral(xl, vl, 0.0, half_pi) + detail::linear_integral(xr, vr, half_pi, pi)) / pi;
    for (double& v : vl) v -= mean;
    for (double& v : vr) v -= mean;
    for (std::size_t i = 0; i < xl.size(); ++i) res.V_hat.emplace_back(xl[i], vl[i]);
    for (std::size_t i = 0; i < xr.size(); ++i) res.V_hat.emplace_back(xr[i], vr[i]);

    // (e) rho from Phi with the data-driven offsets
    dg.offset_left = lim.phi1_0;
    dg.offset_right = lim.phi2_pi - res.c_hat * pi;
    std::vector<double> rl, rr;
    for (std::size_t i = 0; i < xl.size(); ++i) rl.push_back(fl[i] - res.c_hat * xl[i] - dg.offset_left);
    for (std::size_t i = 0; i < xr.size(); ++i) rr.push_back(fr[i] - res.c_hat * xr[i] - dg.offset_right);
    PsiAux aux{res.theta_hat, res.c_hat, dg.offset_left, dg.offset_right, detail::cubic_interpolant(xl, rl),
               detail::cubic_interpolant(xr, rr)};

    // (f) Psi and the mass
    std::vector<double> gl;
    for (double x : xl) {
        dg.psi.push_back(estimate_psi(cal, x, aux, mode, eo));
        gl.push_back(dg.psi.back().value);
    }
    for (double x : xr) dg.psi.push_back(estimate_psi(cal, x, aux, mode, eo));
    dg.psi1_0 = detail::end_value(xl, gl, true, 0.0);
    dg.eigenvalue_correction = estimate_eigenvalue_correction(cal, res.c_hat, eo);

    if (mode == Mode::paper) {
        if (std::abs(lim.phi1_0) < 1e-9) {
            throw Error(ErrorKind::DegenerateDenominator, "Phi1(0) vanishes; the mass formula divides by it");
        }
        res.m_hat = (lim.phi1_0 * res.c_hat * pi + pi * dg.psi1_0) / (-pi * lim.phi1_0);
        return res;
    }
    const double sc = std::sin(res.theta_hat) * std::cos(res.theta_hat);
    if (std::abs(std::cos(res.theta_hat)) >= opts.slope_fallback_cos) {
        res.m_hat = (dg.psi1_0 - res.c_hat * (res.theta_hat - half_pi)) / sc;
        return res;
    }
    // Psi1'(x) = c V(x) + m^2/2 + c^2 - d on the left half.
    dg.mass_from_slope = true;
    std::vector<double> dpsi = detail::derivative(xl, gl);
    const double d = dg.eigenvalue_correction.value_or(res.c_hat * res.c_hat);
    std::vector<double> m2;
    for (std::size_t i = 0; i < xl.size(); ++i) {
        m2.push_back(2.0 * (dpsi[i] - res.c_hat * vl[i] - res.c_hat * res.c_hat + d));
    }
    const double m2_hat = detail::median(m2);
    if (m2_hat < 0.0) {
        throw Error(ErrorKind::NegativeMassSquare, "slope estimate of m^2 is " + std::to_string(m2_hat));
    }
    res.m_hat = std::sqrt(m2_hat);
    return res;
}

// ---------------------------------------------------------------------------
// Dataset generators

/// Nodes from the forward solver for each listed n; eigenvalues included,
/// labels left to index_nodes.
inline NodalDataset forward_dataset(const ProblemConfig& cfg, const std::vector<int>& ns, SolverOptions opts = {}) {
    ForwardSolver solver(cfg, opts);
    NodalDataset ds;
    ds.provenance = Provenance::forward_generated;
    for (int n : ns) {
        NodalSet set = solver.nodal_set(n);
        ds.entries[n] = NodalEntry{set.mu_n, std::move(set.nodes), std::nullopt};
    }
    return ds;
}

/// Nodes from the asymptotic series of the chosen mode; labels j with an
/// asymptotic node inside (0, pi) are kept.
inline NodalDataset asymptotic_dataset(const ProblemConfig& cfg, const std::vector<int>& ns, Mode mode) {
    NodalDataset ds;
    ds.provenance = Provenance::synthetic_asymptotic;
    for (int n : ns) {
        NodalEntry e;
        for (int j = 0; j <= n; ++j) {
            double x = node_asymptotic(cfg, n, j, mode);
            if (!(x > 0.0 && x < pi)) continue;
            if (!e.first_label) e.first_label = j;
            e.nodes.push_back(x);
        }
        if (static_cast<int>(e.nodes.size()) != n) {
            throw Error(ErrorKind::NodeCountMismatch, "asymptotic series gives " + std::to_string(e.nodes.size()) +
                                                          " nodes in (0, pi) for n = " + std::to_string(n));
        }
        ds.entries[n] = std::move(e);
    }
    validate_dataset(ds);
    return ds;
}

/// The reference nodal series (theta = 1, m = 2, V = -cos x):
///   x < pi/2:  u + (-sin u - cot 1)/n + (2 cot 1 + 2 u csc^2 1)/n^2
///   x > pi/2:  u + (-sin u - 4 cot 1)/n + (A + 8 u csc^2 1)/n^2
/// with u = j pi / n, labels j = 1..n, the left series used for u <= pi/2.
inline double example_node(int n, int j) {
    const double u = j * pi / n;
    const double cot1 = std::cos(1.0) / std::sin(1.0);
    const double csc2 = 1.0 / (std::sin(1.0) * std::sin(1.0));
    const double nn = n;
    if (u <= half_pi) return u + (-std::sin(u) - cot1) / nn + (2.0 * cot1 + 2.0 * u * csc2) / (nn * nn);
    const double a = 20.0 * cot1 + 12.0 * std::cos(1.0) * cot1 + 12.0 * pi * cot1 * cot1 - 3.0 * std::sin(1.0) - 3.0 * pi;
    return u + (-std::sin(u) - 4.0 * cot1) / nn + (a + 8.0 * u * csc2) / (nn * nn);
}

/// Entries whose series leaves (0, pi) or loses monotonicity (small n)
/// are not nodal sets; they are skipped and listed in `skipped`.
inline NodalDataset example_dataset(const std::vector<int>& ns, std::vector<int>* skipped = nullptr) {
    NodalDataset ds;
    ds.provenance = Provenance::synthetic_asymptotic;
    for (int n : ns) {
        NodalEntry e;
        e.first_label = 1;
        for (int j = 1; j <= n; ++j) e.nodes.push_back(example_node(n, j));
        NodalDataset one;
        one.entries[n] = e;
        try {
            validate_dataset(one);
        } catch (const Error&) {
            if (skipped) skipped->push_back(n);
            continue;
        }
        ds.entries[n] = std::move(e);
    }
    return ds;
}

/// Even n from lo to hi inclusive.
inline std::vector<int> even_range(int lo, int hi) {
    std::vector<int> out;
    for (int n = lo + (lo % 2 != 0); n <= hi; n += 2) out.push_back(n);
    return out;
}

// ---------------------------------------------------------------------------
// Second-order convention check

struct ConventionFit {
    double kappa = 0.0;  // fitted coefficient of x in the left-half second-order residual
    double kappa_std_error = 0.0;
    std::vector<std::pair<std::string, double>> candidates;
    std::string best;
    std::vector<int> n_used;
};

/// With mu_n and the true data of the problem, the left-half residual
///   r = mu_n^2 (x - (j pi + rho(x) + theta - pi/2) / mu_n)
/// tends to A + kappa x. kappa is fitted per n over the left nodes away
/// from the exclusion zones, then extrapolated in 1/n, and compared with
/// m^2 csc^2(theta), m^2 csc^2(theta)/2 and m^2/2.
inline ConventionFit fit_second_order_convention(const ProblemConfig& cfg, const CalibratedDataset& cal, int n_max,
                                                 const EstimateOptions& opts = {}) {
    std::vector<int> ns;
    for (int n : even_indices(cal.data)) {
        if (n <= n_max && cal.data.entries.at(n).mu_n) ns.push_back(n);
    }
    if (ns.size() < 3) {
        throw Error(ErrorKind::InsufficientData, "convention fit needs three even entries with eigenvalues");
    }
    ns = detail::spread_selection(ns, opts.fit_entries, opts.fit_span);
    const double k1 = cfg.theta - half_pi;
    std::vector<double> kappas;
    for (int n : ns) {
        const NodalEntry& e = cal.data.entries.at(n);
        const double mu = *e.mu_n;
        std::vector<double> xs, rs;
        for (std::size_t r = 0; r < e.nodes.size(); ++r) {
            double x = e.nodes[r];
            if (x <= opts.exclusion || x >= half_pi - opts.exclusion) continue;
            double j = *e.first_label + static_cast<double>(r);
            xs.push_back(x);
            rs.push_back(mu * mu * (x - (j * pi + rho(cfg, x) + k1) / mu));
        }
        if (xs.size() < 3) {
            throw Error(ErrorKind::InsufficientData, "too few left nodes for n = " + std::to_string(n));
        }
        kappas.push_back(fit_line(xs, rs).coef[1]);
    }
    LimitEstimate k = detail::extrapolate(0.0, ns, kappas, 1, cal.shift);
    ConventionFit out;
    out.kappa = k.value;
    out.kappa_std_error = k.std_error;
    out.n_used = ns;
    const double m2 = cfg.mass * cfg.mass, s2 = std::sin(cfg.theta) * std::sin(cfg.theta);
    out.candidates = {{"m^2 csc^2(theta)", m2 / s2}, {"m^2 csc^2(theta)/2", 0.5 * m2 / s2}, {"m^2/2", 0.5 * m2}};
    if (m2 == 0.0) {
        out.best = "undetermined";  // all candidates vanish
        return out;
    }
    auto best = std::min_element(out.candidates.begin(), out.candidates.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.second - out.kappa) < std::abs(b.second - out.kappa);
    });
    out.best = best->first;
    return out;
}

}  // namespace nodal
