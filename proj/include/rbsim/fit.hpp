#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "rbsim/decay.hpp"
#include "rbsim/errors.hpp"

namespace rbsim {

struct FitOptions {
    int max_iterations = 500;
    double objective_rel_tol = 1e-10;
    double step_norm_tol = 1e-12;
    double initial_damping = 1e-3;
};

struct FitResult {
    DecayModel model;
    std::vector<double> stderrs;                   // per raw parameter
    std::vector<std::vector<double>> covariance;   // raw parameter space
    double weighted_rss = 0.0;
    double log_likelihood = 0.0;
    double aic = 0.0;
    int k = 0;
    bool converged = false;
    int iterations = 0;
    std::string series_kind;
    std::string series_id;
};

// Stable identifier of a fitted series; compare() refuses results from
// different series.
inline std::string series_identifier(const DecaySeries& s) {
    std::string blob = s.dataset_id + "|" + s.kind;
    for (const auto& pt : s.points)
        blob += "|" + std::to_string(pt.m) + ":" + csv::format_double(pt.value) + ":" +
                csv::format_double(pt.variance);
    return content_id(blob);
}

inline double log_likelihood(const DecayModel& model, const DecaySeries& series) {
    double lnl = 0.0;
    for (const auto& pt : series.points) {
        const double r = pt.value - evaluate(model, pt.m);
        lnl += -0.5 * std::log(2.0 * std::numbers::pi * pt.variance) -
               r * r / (2.0 * pt.variance);
    }
    return lnl;
}

inline double aic(int k, double lnl) { return 2.0 * k - 2.0 * lnl; }

// Relative likelihood of b minimizing information loss compared to a:
// exp((AIC_a - AIC_b)/2).
inline double compare(const FitResult& a, const FitResult& b) {
    if (a.series_id != b.series_id)
        throw SeriesMismatch("fit results refer to different series");
    return std::exp((a.aic - b.aic) / 2.0);
}

inline double relative_likelihood(double aic_a, double aic_b) {
    return std::exp((aic_a - aic_b) / 2.0);
}

inline double weighted_rss(const DecayModel& model, const DecaySeries& series) {
    double s = 0.0;
    for (const auto& pt : series.points) {
        const double r = pt.value - evaluate(model, pt.m);
        s += r * r / pt.variance;
    }
    return s;
}

namespace fit_detail {

// Raw parameter vector layout per kind:
//   zero-order / residual-spam: [A, p, B]
//   no-constant:                [A, p]
//   two-fidelity:               [A, p, q]
inline std::vector<double> raw_params(const DecayModel& m) {
    switch (m.kind) {
        case ModelKind::ZeroOrder:
        case ModelKind::ResidualSpam: return {m.amplitude, m.p, m.constant};
        case ModelKind::NoConstant: return {m.amplitude, m.p};
        case ModelKind::TwoFidelity: return {m.amplitude, m.p, m.q};
    }
    return {};
}

inline DecayModel from_raw(ModelKind kind, const std::vector<double>& x) {
    switch (kind) {
        case ModelKind::ZeroOrder: return DecayModel::zero_order(x[0], x[1], x[2]);
        case ModelKind::ResidualSpam: return DecayModel::residual_spam(x[0], x[1], x[2]);
        case ModelKind::NoConstant: return DecayModel::no_constant(x[0], x[1]);
        case ModelKind::TwoFidelity: return DecayModel::two_fidelity(x[0], x[1], x[2]);
    }
    return {};
}

// Rate parameters (p, q) live on a logit scale internally so the iteration
// cannot leave (0, 1); amplitudes and constants are untransformed.
inline bool is_rate_param(ModelKind kind, int j) {
    if (j == 1) return true;
    return kind == ModelKind::TwoFidelity && j == 2;
}

inline double clamp_rate(double v) {
    return std::min(std::max(v, 1e-12), 1.0 - 1e-12);
}

inline std::vector<double> to_internal(ModelKind kind, const std::vector<double>& raw) {
    std::vector<double> t = raw;
    for (std::size_t j = 0; j < t.size(); ++j)
        if (is_rate_param(kind, static_cast<int>(j))) {
            const double v = clamp_rate(t[j]);
            t[j] = std::log(v / (1.0 - v));
        }
    return t;
}

inline std::vector<double> from_internal(ModelKind kind, const std::vector<double>& theta) {
    std::vector<double> raw = theta;
    for (std::size_t j = 0; j < raw.size(); ++j)
        if (is_rate_param(kind, static_cast<int>(j))) raw[j] = 1.0 / (1.0 + std::exp(-raw[j]));
    return raw;
}

// d f / d raw_j at one point.
inline void raw_jacobian_row(const DecayModel& m, int mm, double* row) {
    const double pm = std::pow(m.p, mm);
    const double dp = mm == 0 ? 0.0 : m.amplitude * mm * std::pow(m.p, mm - 1);
    switch (m.kind) {
        case ModelKind::ZeroOrder:
        case ModelKind::ResidualSpam:
            row[0] = pm;
            row[1] = dp;
            row[2] = 1.0;
            break;
        case ModelKind::NoConstant:
            row[0] = pm;
            row[1] = dp;
            break;
        case ModelKind::TwoFidelity: {
            const double qm = std::pow(m.q, mm);
            row[0] = pm + qm;
            row[1] = dp;
            row[2] = mm == 0 ? 0.0 : m.amplitude * mm * std::pow(m.q, mm - 1);
            break;
        }
    }
}

// Solve the k x k system N x = g in place (Gaussian elimination, partial
// pivoting). Returns false if the matrix is numerically singular.
inline bool solve_small(std::vector<std::vector<double>> n, std::vector<double> g,
                        std::vector<double>& x) {
    const int k = static_cast<int>(g.size());
    for (int col = 0; col < k; ++col) {
        int piv = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(n[r][col]) > std::abs(n[piv][col])) piv = r;
        if (std::abs(n[piv][col]) < 1e-300) return false;
        std::swap(n[piv], n[col]);
        std::swap(g[piv], g[col]);
        for (int r = col + 1; r < k; ++r) {
            const double f = n[r][col] / n[col][col];
            for (int c = col; c < k; ++c) n[r][c] -= f * n[col][c];
            g[r] -= f * g[col];
        }
    }
    x.assign(static_cast<std::size_t>(k), 0.0);
    for (int r = k - 1; r >= 0; --r) {
        double s = g[r];
        for (int c = r + 1; c < k; ++c) s -= n[r][c] * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = s / n[r][r];
    }
    return true;
}

// Inverse of a symmetric k x k matrix, with a small diagonal ridge retried
// when the matrix is singular (degenerate fits, e.g. two-fidelity at p = q).
inline std::vector<std::vector<double>> invert_symmetric(std::vector<std::vector<double>> n) {
    const int k = static_cast<int>(n.size());
    double max_diag = 0.0;
    for (int i = 0; i < k; ++i) max_diag = std::max(max_diag, std::abs(n[i][i]));
    double ridge = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
        std::vector<std::vector<double>> work = n;
        for (int i = 0; i < k; ++i) work[i][i] += ridge;
        std::vector<std::vector<double>> inv(static_cast<std::size_t>(k),
                                             std::vector<double>(static_cast<std::size_t>(k), 0.0));
        bool ok = true;
        for (int col = 0; col < k && ok; ++col) {
            std::vector<double> e(static_cast<std::size_t>(k), 0.0);
            e[static_cast<std::size_t>(col)] = 1.0;
            std::vector<double> x;
            ok = solve_small(work, e, x);
            if (ok)
                for (int r = 0; r < k; ++r) inv[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] = x[static_cast<std::size_t>(r)];
        }
        if (ok) {
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j) {
                    const double s = 0.5 * (inv[i][j] + inv[j][i]);
                    inv[i][j] = inv[j][i] = s;
                }
            return inv;
        }
        ridge = ridge == 0.0 ? 1e-12 * std::max(max_diag, 1.0) : ridge * 100.0;
    }
    throw InternalError("normal matrix inversion failed");
}

// Log-linear seeding of the decay parameters: OLS of ln(max(y, eps)) against
// m over the first half of the lengths.
inline DecayModel initial_guess(ModelKind kind, const DecaySeries& series) {
    const std::size_t n = series.points.size();
    const std::size_t half = std::max<std::size_t>(2, n / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::size_t used = std::min(half, n);
    for (std::size_t i = 0; i < used; ++i) {
        const double x = series.points[i].m;
        const double y = std::log(std::max(series.points[i].value, 1e-6));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = used * sxx - sx * sx;
    const double slope = denom != 0.0 ? (used * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - slope * sx) / static_cast<double>(used);

    const double p0 = clamp_rate(std::exp(slope));
    double a0 = std::exp(intercept);
    double min_y = series.points.front().value;
    for (const auto& pt : series.points) min_y = std::min(min_y, pt.value);

    switch (kind) {
        case ModelKind::ZeroOrder: return DecayModel::zero_order(a0, p0, min_y);
        case ModelKind::ResidualSpam: return DecayModel::residual_spam(a0, p0, min_y);
        case ModelKind::NoConstant: return DecayModel::no_constant(a0, p0);
        case ModelKind::TwoFidelity: {
            double q0 = p0 - 3.0 * (1.0 - p0);
            q0 = std::min(std::max(q0, std::min(1e-3, p0 / 2.0)), p0 * (1.0 - 1e-6));
            return DecayModel::two_fidelity(a0 / 2.0, p0, q0);
        }
    }
    return {};
}

}  // namespace fit_detail

// Weighted nonlinear least-squares fit of a decay model by damped
// least-squares iteration (damping x10 on objective increase, x0.1 on
// decrease). Convergence: relative objective decrease < 1e-10 or step norm
// < 1e-12, at most max_iterations steps; on iteration exhaustion the
// best-so-far result is returned with converged = false.
inline FitResult fit(ModelKind kind, const DecaySeries& series, const FitOptions& options = {}) {
    std::vector<int> distinct;
    for (const auto& pt : series.points) distinct.push_back(pt.m);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    const int k = kind == ModelKind::NoConstant ? 2 : 3;
    if (static_cast<int>(distinct.size()) < k + 1)
        throw DegenerateData("need at least " + std::to_string(k + 1) +
                             " distinct lengths to fit " + model_kind_name(kind));
    for (const auto& pt : series.points)
        if (!(pt.variance > 0.0)) throw ConfigError("series variances must be positive");

    const DecayModel guess = fit_detail::initial_guess(kind, series);

    const std::size_t n = series.points.size();
    std::vector<double> theta = fit_detail::to_internal(kind, fit_detail::raw_params(guess));

    auto objective = [&](const std::vector<double>& th) {
        return weighted_rss(fit_detail::from_raw(kind, fit_detail::from_internal(kind, th)), series);
    };

    double s_current = objective(theta);
    double damping = options.initial_damping;
    bool converged = false;
    int iterations = 0;

    while (iterations < options.max_iterations) {
        ++iterations;
        const std::vector<double> raw = fit_detail::from_internal(kind, theta);
        const DecayModel model = fit_detail::from_raw(kind, raw);

        // Weighted Jacobian and gradient in internal coordinates.
        std::vector<std::vector<double>> normal(static_cast<std::size_t>(k),
                                                std::vector<double>(static_cast<std::size_t>(k), 0.0));
        std::vector<double> grad(static_cast<std::size_t>(k), 0.0);
        double row[3];
        for (std::size_t i = 0; i < n; ++i) {
            const auto& pt = series.points[i];
            fit_detail::raw_jacobian_row(model, pt.m, row);
            const double inv_sigma = 1.0 / std::sqrt(pt.variance);
            double jrow[3];
            for (int j = 0; j < k; ++j) {
                double scale = 1.0;
                if (fit_detail::is_rate_param(kind, j)) {
                    const double v = raw[static_cast<std::size_t>(j)];
                    scale = v * (1.0 - v);
                }
                jrow[j] = row[j] * scale * inv_sigma;
            }
            const double r = (pt.value - evaluate(model, pt.m)) * inv_sigma;
            for (int a = 0; a < k; ++a) {
                grad[static_cast<std::size_t>(a)] += jrow[a] * r;
                for (int b = 0; b < k; ++b) normal[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += jrow[a] * jrow[b];
            }
        }

        auto damped = normal;
        for (int j = 0; j < k; ++j) {
            const double d = normal[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
            damped[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] += damping * (d > 0.0 ? d : 1.0);
        }
        std::vector<double> step;
        if (!fit_detail::solve_small(damped, grad, step)) {
            damping *= 10.0;
            if (damping > 1e15) break;
            continue;
        }

        std::vector<double> trial = theta;
        double step_norm2 = 0.0;
        for (int j = 0; j < k; ++j) {
            trial[static_cast<std::size_t>(j)] += step[static_cast<std::size_t>(j)];
            step_norm2 += step[static_cast<std::size_t>(j)] * step[static_cast<std::size_t>(j)];
        }
        const double s_trial = objective(trial);

        if (s_trial < s_current) {
            const double rel_decrease = (s_current - s_trial) / std::max(s_current, 1e-300);
            theta = std::move(trial);
            s_current = s_trial;
            damping = std::max(damping * 0.1, 1e-15);
            if (rel_decrease < options.objective_rel_tol ||
                std::sqrt(step_norm2) < options.step_norm_tol) {
                converged = true;
                break;
            }
        } else {
            damping *= 10.0;
            if (std::sqrt(step_norm2) < options.step_norm_tol) {
                // No descent available and the proposed step is negligible.
                converged = true;
                break;
            }
            if (damping > 1e15) {
                converged = true;
                break;
            }
        }
    }

    DecayModel final_model =
        fit_detail::from_raw(kind, fit_detail::from_internal(kind, theta)).canonicalized();

    // Covariance from the weighted Gauss-Newton normal matrix in raw
    // parameter space at the optimum.
    std::vector<std::vector<double>> normal_raw(static_cast<std::size_t>(k),
                                                std::vector<double>(static_cast<std::size_t>(k), 0.0));
    double row[3];
    for (const auto& pt : series.points) {
        fit_detail::raw_jacobian_row(final_model, pt.m, row);
        const double w = 1.0 / pt.variance;
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) normal_raw[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += row[a] * row[b] * w;
    }
    FitResult out;
    out.covariance = fit_detail::invert_symmetric(normal_raw);
    out.stderrs.resize(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        out.stderrs[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, out.covariance[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)]));

    out.model = final_model;
    out.weighted_rss = weighted_rss(final_model, series);
    out.log_likelihood = log_likelihood(final_model, series);
    out.k = k;
    out.aic = aic(k, out.log_likelihood);
    out.converged = converged;
    out.iterations = iterations;
    out.series_kind = series.kind;
    out.series_id = series_identifier(series);
    return out;
}

}  // namespace rbsim
