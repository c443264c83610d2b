#pragma once

// Empirical search for linear recurrences with polynomial coefficients
//   sum_{j=0..r} sum_{k=0..d} c[j][k] n^k u_{n+j} = 0
// satisfied by u_n = n!^alpha.
//
// Each row of the probe matrix holds n^k u_{n+j} / u_{n+r}; those ratios are at
// most one, so nothing overflows however large n!^alpha gets. Rows are scaled to
// unit max-norm and columns to unit 2-norm before the SVD, which removes the
// n^k scale disparity between columns. A recurrence shows up as a singular value
// ratio sigma_min / sigma_max at rounding level.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mlf/numeric.hpp"

namespace mlf {

struct RecurrenceHypothesis {
    int order = 1;   ///< r >= 1
    int degree = 0;  ///< d >= 0

    int unknowns() const { return (order + 1) * (degree + 1); }
    friend bool operator==(const RecurrenceHypothesis&, const RecurrenceHypothesis&) = default;
};

inline void validate(const RecurrenceHypothesis& h)
{
    if (h.order < 1 || h.degree < 0 || h.unknowns() < 2)
        throw UsageError("recurrence hypothesis needs order >= 1 and degree >= 0");
}

struct ProbeWindow {
    std::int64_t start = 1;
    std::int64_t length = 1000;

    ProbeWindow next() const { return {start + length, length}; }
};

struct RecurrenceCandidate {
    RecurrenceHypothesis hypothesis;
    /// (order + 1) x (degree + 1), unit Frobenius norm; coeffs(j, k) multiplies n^k u_{n+j}.
    Eigen::MatrixXd coeffs;
    /// sigma_min / sigma_max of the fitting matrix.
    double residual = 0.0;
    /// Scaled residual of coeffs on the held-out window.
    double holdout_residual = 0.0;
    bool verified = false;
};

struct ProbeOutcome {
    RecurrenceHypothesis hypothesis;
    double sigma_ratio = 0.0;
    std::optional<RecurrenceCandidate> candidate;
};

/// ln(n!^alpha).
inline double log_seq(double alpha, std::int64_t n)
{
    if (n < 0)
        throw UsageError("log_seq: n must be non-negative");
    return alpha * log_gamma(double(n) + 1.0);
}

namespace detail {

// Row-normalized probe matrix, columns ordered (j, k) with k fastest.
inline Eigen::MatrixXd probe_matrix(double alpha, const RecurrenceHypothesis& h, const ProbeWindow& w)
{
    const int r = h.order, d = h.degree;
    Eigen::MatrixXd m(w.length, h.unknowns());
    for (std::int64_t row = 0; row < w.length; ++row) {
        const std::int64_t n = w.start + row;
        const double top = log_seq(alpha, n + r);
        for (int j = 0; j <= r; ++j) {
            const double ratio = std::exp(log_seq(alpha, n + j) - top);
            double nk = 1.0;
            for (int k = 0; k <= d; ++k) {
                m(row, j * (d + 1) + k) = nk * ratio;
                nk *= double(n);
            }
        }
        const double mx = m.row(row).cwiseAbs().maxCoeff();
        if (mx > 0.0)
            m.row(row) /= mx;
    }
    return m;
}

inline Eigen::VectorXd column_norms(const Eigen::MatrixXd& m)
{
    Eigen::VectorXd s = m.colwise().norm().transpose();
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) == 0.0)
            s(i) = 1.0;
    return s;
}

} // namespace detail

/// Residual of a coefficient vector on a window: ||M v|| / (sigma_max(M) ||v||)
/// with M the column-equilibrated probe matrix and v the coefficients in that basis.
inline double scaled_residual(double alpha, const RecurrenceHypothesis& h, const Eigen::MatrixXd& coeffs,
                              const ProbeWindow& w)
{
    validate(h);
    const Eigen::MatrixXd raw = detail::probe_matrix(alpha, h, w);
    const Eigen::VectorXd s = detail::column_norms(raw);
    const Eigen::MatrixXd m = raw * s.cwiseInverse().asDiagonal();

    Eigen::VectorXd v(h.unknowns());
    for (int j = 0; j <= h.order; ++j)
        for (int k = 0; k <= h.degree; ++k)
            v(j * (h.degree + 1) + k) = coeffs(j, k);
    v = v.cwiseProduct(s);
    const double sigma_max = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
    return (m * v).norm() / (sigma_max * v.norm());
}

/// Fits hypothesis h on `fit`, and if sigma_min / sigma_max < threshold checks the
/// coefficients on the next window of equal length (scaled residual < 10 * threshold).
inline ProbeOutcome probe_detailed(double alpha, const RecurrenceHypothesis& h, const ProbeWindow& fit,
                                   double threshold)
{
    validate(h);
    if (fit.start < 1)
        throw UsageError("probe: window must start at n >= 1");
    if (fit.length < 2 * h.unknowns())
        throw UsageError("probe: window needs at least 2 (r+1)(d+1) rows");
    if (!(alpha > 0.0))
        throw DomainError("probe: alpha must be positive");

    const Eigen::MatrixXd raw = detail::probe_matrix(alpha, h, fit);
    const Eigen::VectorXd s = detail::column_norms(raw);
    const Eigen::MatrixXd m = raw * s.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();

    ProbeOutcome out;
    out.hypothesis = h;
    out.sigma_ratio = sv(sv.size() - 1) / sv(0);
    if (!(out.sigma_ratio < threshold))
        return out;

    Eigen::VectorXd v = svd.matrixV().col(h.unknowns() - 1).cwiseQuotient(s);
    v /= v.norm();
    RecurrenceCandidate c;
    c.hypothesis = h;
    c.coeffs.resize(h.order + 1, h.degree + 1);
    for (int j = 0; j <= h.order; ++j)
        for (int k = 0; k <= h.degree; ++k)
            c.coeffs(j, k) = v(j * (h.degree + 1) + k);
    // Sign convention: the largest-magnitude coefficient is positive.
    Eigen::Index mr = 0, mc = 0;
    c.coeffs.cwiseAbs().maxCoeff(&mr, &mc);
    if (c.coeffs(mr, mc) < 0.0)
        c.coeffs = -c.coeffs;
    c.residual = out.sigma_ratio;
    c.holdout_residual = scaled_residual(alpha, h, c.coeffs, fit.next());
    c.verified = c.holdout_residual < 10.0 * threshold;
    if (c.verified)
        out.candidate = std::move(c);
    return out;
}

inline std::optional<RecurrenceCandidate> probe(double alpha, const RecurrenceHypothesis& h, std::int64_t window_start,
                                                std::int64_t window_len, double threshold)
{
    return probe_detailed(alpha, h, {window_start, window_len}, threshold).candidate;
}

struct ProbeSettings {
    ProbeWindow window{1, 1000};
    double threshold = 1e-10;
};

/// Every hypothesis with 1 <= r <= max_order, 0 <= d <= max_degree, in (r, d) order.
/// The fitting window is stretched when a hypothesis needs more rows.
inline std::vector<ProbeOutcome> probe_grid(double alpha, int max_order, int max_degree,
                                            const ProbeSettings& settings = {})
{
    if (max_order < 1 || max_degree < 1)
        throw UsageError("probe_grid: bounds must be >= 1");
    std::vector<ProbeOutcome> out;
    for (int r = 1; r <= max_order; ++r)
        for (int d = 0; d <= max_degree; ++d) {
            RecurrenceHypothesis h{r, d};
            ProbeWindow w = settings.window;
            w.length = std::max<std::int64_t>(w.length, 2 * h.unknowns());
            out.push_back(probe_detailed(alpha, h, w, settings.threshold));
        }
    return out;
}

/// Human-readable form, e.g. "1*u(n) + 1*n*u(n) - 1*u(n+1) = 0" (coefficients scaled so the largest is 1).
inline std::string describe(const RecurrenceCandidate& c, double drop_below = 1e-8)
{
    const double mx = c.coeffs.cwiseAbs().maxCoeff();
    std::string out;
    char buf[64];
    for (int j = 0; j < c.coeffs.rows(); ++j)
        for (int k = 0; k < c.coeffs.cols(); ++k) {
            const double v = c.coeffs(j, k) / mx;
            if (std::abs(v) < drop_below)
                continue;
            std::snprintf(buf, sizeof buf, "%s%.6g", out.empty() ? (v < 0 ? "-" : "") : (v < 0 ? " - " : " + "),
                          std::abs(v));
            out += buf;
            if (k == 1)
                out += "*n";
            else if (k > 1)
                out += "*n^" + std::to_string(k);
            out += j == 0 ? "*u(n)" : "*u(n+" + std::to_string(j) + ")";
        }
    return out + " = 0";
}

} // namespace mlf
