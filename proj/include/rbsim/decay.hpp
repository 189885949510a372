#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rbsim/dataset.hpp"
#include "rbsim/errors.hpp"

namespace rbsim {

// The four parametric fidelity-decay curves considered by the analysis.
enum class ModelKind { ZeroOrder, NoConstant, ResidualSpam, TwoFidelity };

inline const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::ZeroOrder: return "zero-order";
        case ModelKind::NoConstant: return "no-constant";
        case ModelKind::ResidualSpam: return "residual-spam";
        case ModelKind::TwoFidelity: return "two-fidelity";
    }
    return "?";
}

inline ModelKind model_kind_from_name(const std::string& s) {
    if (s == "zero-order") return ModelKind::ZeroOrder;
    if (s == "no-constant") return ModelKind::NoConstant;
    if (s == "residual-spam") return ModelKind::ResidualSpam;
    if (s == "two-fidelity") return ModelKind::TwoFidelity;
    throw ConfigError("unknown decay model: '" + s + "'");
}

// Decay curve with its parameters:
//   zero-order:    A p^m + B       (raw survival series)
//   no-constant:   A p^m           (B-eliminated series)
//   residual-spam: A p^m + B       (B-eliminated series, residual constant)
//   two-fidelity:  A p^m + A q^m   (equal mixture of two decay rates)
struct DecayModel {
    ModelKind kind = ModelKind::NoConstant;
    double amplitude = 0.5;  // A
    double p = 0.99;
    double q = 0.9;          // two-fidelity only
    double constant = 0.0;   // B, zero-order / residual-spam only

    static DecayModel zero_order(double a, double p, double b) {
        return {ModelKind::ZeroOrder, a, p, 0.0, b};
    }
    static DecayModel no_constant(double a, double p) { return {ModelKind::NoConstant, a, p, 0.0, 0.0}; }
    static DecayModel residual_spam(double a, double p, double b) {
        return {ModelKind::ResidualSpam, a, p, 0.0, b};
    }
    static DecayModel two_fidelity(double a, double p, double q) {
        return {ModelKind::TwoFidelity, a, p, q, 0.0};
    }

    int parameter_count() const { return kind == ModelKind::NoConstant ? 2 : 3; }

    // Two-fidelity is symmetric in (p, q); the canonical labeling is p >= q.
    DecayModel canonicalized() const {
        DecayModel m = *this;
        if (m.kind == ModelKind::TwoFidelity && m.q > m.p) std::swap(m.p, m.q);
        return m;
    }
};

inline double evaluate(const DecayModel& model, int m) {
    const double pm = std::pow(model.p, m);
    switch (model.kind) {
        case ModelKind::ZeroOrder:
        case ModelKind::ResidualSpam: return model.amplitude * pm + model.constant;
        case ModelKind::NoConstant: return model.amplitude * pm;
        case ModelKind::TwoFidelity: return model.amplitude * (pm + std::pow(model.q, m));
    }
    return 0.0;
}

struct SeriesPoint {
    int m = 0;
    double value = 0.0;
    double variance = 0.0;  // of the plotted mean
    int n_up = 0;
    int n_down = 0;
};

// A per-length series extracted from a dataset (B-eliminated or single
// direction), the common input to the fit engine.
struct DecaySeries {
    std::string kind;        // "tilde", "up", "down", or "synthetic"
    std::string dataset_id;  // content id of the source dataset
    std::vector<SeriesPoint> points;
};

namespace series_detail {

// Saturated shot estimates can make the observed variance exactly zero;
// lift those points to the binomial floor so weights stay finite.
inline double floor_variance(double var, int n_shots, int n_sequences) {
    if (var > 0.0) return var;
    return 1.0 / (4.0 * static_cast<double>(n_shots) * static_cast<double>(n_sequences));
}

}  // namespace series_detail

// B-elimination: F~_m = mean(F_up) - (1 - mean(F_down)), with the variances
// of the two independent direction means added.
inline DecaySeries tilde_series(const BenchmarkDataset& dataset) {
    DecaySeries s;
    s.kind = "tilde";
    for (int m : dataset.lengths()) {
        const auto up = dataset.estimates(m, Direction::Up);
        const auto down = dataset.estimates(m, Direction::Down);
        SeriesPoint pt;
        pt.m = m;
        pt.value = mean(up) - (1.0 - mean(down));
        pt.n_up = static_cast<int>(up.size());
        pt.n_down = static_cast<int>(down.size());
        const double var = variance_of_mean(up) + variance_of_mean(down);
        pt.variance = series_detail::floor_variance(var, dataset.n_shots, pt.n_up + pt.n_down);
        s.points.push_back(pt);
    }
    return s;
}

// Mean survival of a single target direction per length.
inline DecaySeries direction_series(const BenchmarkDataset& dataset, Direction d) {
    DecaySeries s;
    s.kind = direction_name(d);
    for (int m : dataset.lengths()) {
        const auto est = dataset.estimates(m, d);
        SeriesPoint pt;
        pt.m = m;
        pt.value = mean(est);
        (d == Direction::Up ? pt.n_up : pt.n_down) = static_cast<int>(est.size());
        pt.variance = series_detail::floor_variance(variance_of_mean(est), dataset.n_shots,
                                                    static_cast<int>(est.size()));
        s.points.push_back(pt);
    }
    return s;
}

// F = p + (1-p)/d for a depolarizing channel of dimension d.
inline double polarization_to_avg_fidelity(double p, int d = 2) {
    return p + (1.0 - p) / d;
}

inline double avg_fidelity_to_polarization(double f, int d = 2) {
    return (d * f - 1.0) / (d - 1.0);
}

// Per-primitive-gate fidelity from a per-Clifford polarization, spreading
// the Clifford error over the mean generator-pulse count N_g.
inline double primitive_gate_fidelity(double p, double n_g) {
    return 1.0 - (1.0 - polarization_to_avg_fidelity(p, 2)) / n_g;
}

inline double primitive_gate_fidelity_stderr(double p_stderr, double n_g) {
    return p_stderr / (2.0 * n_g);
}

// Interleaved-gate fidelity from the interleaved/reference polarization
// ratio, normalized per primitive gate. Sampling noise can push the ratio
// slightly above 1; up to 1.05 it is clamped (reported via *clamped), beyond
// that the fits are inconsistent.
inline double interleaved_fidelity(double p_int, double p_ref, double n_g,
                                   bool* clamped = nullptr) {
    if (!(p_ref > 0.0)) throw ConfigError("reference polarization must be positive");
    double ratio = p_int / p_ref;
    if (ratio > 1.05)
        throw RatioOutOfRange("interleaved/reference polarization ratio " +
                              std::to_string(ratio) + " exceeds 1.05");
    if (clamped) *clamped = ratio > 1.0;
    if (ratio > 1.0) ratio = 1.0;
    return 1.0 - 0.5 * (1.0 - ratio) / n_g;
}

// First-order propagation of independent fit errors through the interleaved
// conversion.
inline double interleaved_fidelity_stderr(double p_int, double p_ref, double s_int, double s_ref,
                                          double n_g) {
    const double d_int = 1.0 / (2.0 * n_g * p_ref);
    const double d_ref = p_int / (2.0 * n_g * p_ref * p_ref);
    return std::sqrt(d_int * d_int * s_int * s_int + d_ref * d_ref * s_ref * s_ref);
}

// Derived fidelities of a benchmarking analysis, each with its first-order
// propagated uncertainty.
struct FidelityReport {
    double n_g = 1.875;
    std::string conversion;  // e.g. "first-order", pairing name for interleaved runs
    std::optional<double> clifford_fidelity;
    std::optional<double> clifford_stderr;
    std::optional<double> primitive_fidelity;
    std::optional<double> primitive_stderr;
    std::optional<double> interleaved_gate_fidelity;
    std::optional<double> interleaved_stderr;
    bool ratio_clamped = false;
};

}  // namespace rbsim
