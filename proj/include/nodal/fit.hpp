#pragma once

// Small least-squares fits: polynomials in 1/n for limit extrapolation,
// straight lines, log-log slopes.

#include <cmath>
#include <cstddef>
#include <vector>

#include "nodal/errors.hpp"

namespace nodal {

struct LinearFit {
    std::vector<double> coef;    // coef[k] multiplies column k
    std::vector<double> std_error;  // zero when the fit is exactly determined
    double rms = 0.0;
};

/// Least squares for a dense design matrix given row by row, through a
/// Householder QR so nearly collinear columns in 1/n and 1/n^2 stay stable.
inline LinearFit least_squares(std::vector<std::vector<double>> rows, std::vector<double> y) {
    const std::size_t m = rows.size();
    if (m == 0 || m != y.size()) {
        throw Error(ErrorKind::InsufficientData, "least squares needs matching nonempty inputs");
    }
    const std::size_t p = rows.front().size();
    if (m < p) {
        throw Error(ErrorKind::InsufficientData,
                    "least squares with " + std::to_string(p) + " unknowns needs as many rows, got " +
                        std::to_string(m));
    }
    std::vector<double> y_orig = y;
    auto a = rows;

    for (std::size_t k = 0; k < p; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += a[i][k] * a[i][k];
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            throw Error(ErrorKind::DegenerateDenominator, "rank-deficient design matrix");
        }
        double alpha = a[k][k] > 0 ? -norm : norm;
        std::vector<double> v(m, 0.0);
        for (std::size_t i = k; i < m; ++i) v[i] = a[i][k];
        v[k] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < m; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0) continue;
        for (std::size_t j = k; j < p; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i] * a[i][j];
            double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < m; ++i) a[i][j] -= f * v[i];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i) dot += v[i] * y[i];
        double f = 2.0 * dot / vnorm2;
        for (std::size_t i = k; i < m; ++i) y[i] -= f * v[i];
    }

    LinearFit fit;
    fit.coef.assign(p, 0.0);
    for (std::size_t k = p; k-- > 0;) {
        if (std::abs(a[k][k]) < 1e-300) {
            throw Error(ErrorKind::DegenerateDenominator, "rank-deficient design matrix");
        }
        double s = y[k];
        for (std::size_t j = k + 1; j < p; ++j) s -= a[k][j] * fit.coef[j];
        fit.coef[k] = s / a[k][k];
    }

    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double pred = 0.0;
        for (std::size_t j = 0; j < p; ++j) pred += rows[i][j] * fit.coef[j];
        rss += (y_orig[i] - pred) * (y_orig[i] - pred);
    }
    fit.rms = std::sqrt(rss / static_cast<double>(m));

    // Covariance (R^T R)^{-1} s^2 from the triangular factor: invert R column by column.
    fit.std_error.assign(p, 0.0);
    if (m > p) {
        const double s2 = rss / static_cast<double>(m - p);
        std::vector<std::vector<double>> rinv(p, std::vector<double>(p, 0.0));
        for (std::size_t col = 0; col < p; ++col) {
            for (std::size_t k = p; k-- > 0;) {
                double s = (k == col) ? 1.0 : 0.0;
                for (std::size_t j = k + 1; j < p; ++j) s -= a[k][j] * rinv[j][col];
                rinv[k][col] = s / a[k][k];
            }
        }
        for (std::size_t k = 0; k < p; ++k) {
            double var = 0.0;
            for (std::size_t j = 0; j < p; ++j) var += rinv[k][j] * rinv[k][j];
            fit.std_error[k] = std::sqrt(var * s2);
        }
    }
    return fit;
}

/// y ~ c0 + c1 / n + ... + c_order / n^order
inline LinearFit fit_inverse_powers(const std::vector<double>& n, const std::vector<double>& y, int order) {
    if (order < 0) throw Error(ErrorKind::InvalidArgument, "negative fit order");
    std::vector<std::vector<double>> rows;
    rows.reserve(n.size());
    for (double v : n) {
        std::vector<double> row(static_cast<std::size_t>(order) + 1, 1.0);
        for (int k = 1; k <= order; ++k) row[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(k) - 1] / v;
        rows.push_back(std::move(row));
    }
    return least_squares(std::move(rows), y);
}

/// y ~ c0 + c1 x
inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<std::vector<double>> rows;
    rows.reserve(x.size());
    for (double v : x) rows.push_back({1.0, v});
    return least_squares(std::move(rows), y);
}

/// Slope of log y against log x. Zero or negative y are rejected.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2) throw Error(ErrorKind::InsufficientData, "slope needs at least two points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "log-log slope needs positive data");
        }
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly).coef[1];
}

/// Lagrange interpolation through (xs, ys) evaluated at x.
inline double lagrange(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double w = 1.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (k != i) w *= (x - xs[k]) / (xs[i] - xs[k]);
        }
        acc += w * ys[i];
    }
    return acc;
}

}  // namespace nodal
