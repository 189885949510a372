#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbsim/config.hpp"
#include "rbsim/csv.hpp"
#include "rbsim/dataset.hpp"
#include "rbsim/decay.hpp"
#include "rbsim/fit.hpp"
#include "rbsim/noise.hpp"
#include "rbsim/simulator.hpp"
#include "rbsim/version.hpp"

namespace rbsim {
namespace pipeline {

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

inline std::string path_join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

// ---------------------------------------------------------------------------
// Clifford table export (documentation format).

inline nlohmann::json clifford_table_json() {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& e : CliffordGroup::instance().elements()) {
        nlohmann::json pulses = nlohmann::json::array();
        for (const auto& p : e.pulses) pulses.push_back(pulse_kind_name(p.kind));
        nlohmann::json u = nlohmann::json::array();
        for (int r = 0; r < 2; ++r) {
            nlohmann::json urow = nlohmann::json::array();
            for (int c = 0; c < 2; ++c)
                urow.push_back({e.unitary(r, c).real(), e.unitary(r, c).imag()});
            u.push_back(urow);
        }
        table.push_back({{"index", e.index}, {"name", e.name}, {"pulses", pulses}, {"unitary", u}});
    }
    return table;
}

// ---------------------------------------------------------------------------
// Fit result serialization.

inline nlohmann::json series_to_json(const DecaySeries& s) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& pt : s.points)
        points.push_back({{"m", pt.m},
                          {"value", pt.value},
                          {"variance", pt.variance},
                          {"n_up", pt.n_up},
                          {"n_down", pt.n_down}});
    return {{"kind", s.kind}, {"dataset_id", s.dataset_id}, {"points", points}};
}

inline DecaySeries series_from_json(const nlohmann::json& j) {
    DecaySeries s;
    s.kind = j.at("kind").get<std::string>();
    s.dataset_id = j.at("dataset_id").get<std::string>();
    for (const auto& pj : j.at("points")) {
        SeriesPoint pt;
        pt.m = pj.at("m").get<int>();
        pt.value = pj.at("value").get<double>();
        pt.variance = pj.at("variance").get<double>();
        pt.n_up = pj.at("n_up").get<int>();
        pt.n_down = pj.at("n_down").get<int>();
        s.points.push_back(pt);
    }
    return s;
}

inline nlohmann::json fit_result_to_json(const FitResult& fr, const DecaySeries& series) {
    nlohmann::json model{{"kind", model_kind_name(fr.model.kind)},
                         {"amplitude", fr.model.amplitude},
                         {"p", fr.model.p}};
    if (fr.model.kind == ModelKind::TwoFidelity) model["q"] = fr.model.q;
    if (fr.model.kind == ModelKind::ZeroOrder || fr.model.kind == ModelKind::ResidualSpam)
        model["constant"] = fr.model.constant;
    return {{"toolkit_version", kToolkitVersion},
            {"series", series_to_json(series)},
            {"series_id", fr.series_id},
            {"model", model},
            {"stderrs", fr.stderrs},
            {"covariance", fr.covariance},
            {"weighted_rss", fr.weighted_rss},
            {"log_likelihood", fr.log_likelihood},
            {"aic", fr.aic},
            {"k", fr.k},
            {"converged", fr.converged},
            {"iterations", fr.iterations}};
}

inline FitResult fit_result_from_json(const nlohmann::json& j) {
    FitResult fr;
    const auto& mj = j.at("model");
    const ModelKind kind = model_kind_from_name(mj.at("kind").get<std::string>());
    fr.model.kind = kind;
    fr.model.amplitude = mj.at("amplitude").get<double>();
    fr.model.p = mj.at("p").get<double>();
    if (mj.contains("q")) fr.model.q = mj.at("q").get<double>();
    if (mj.contains("constant")) fr.model.constant = mj.at("constant").get<double>();
    fr.stderrs = j.at("stderrs").get<std::vector<double>>();
    fr.covariance = j.at("covariance").get<std::vector<std::vector<double>>>();
    fr.weighted_rss = j.at("weighted_rss").get<double>();
    fr.log_likelihood = j.at("log_likelihood").get<double>();
    fr.aic = j.at("aic").get<double>();
    fr.k = j.at("k").get<int>();
    fr.converged = j.at("converged").get<bool>();
    fr.iterations = j.at("iterations").get<int>();
    fr.series_id = j.at("series_id").get<std::string>();
    fr.series_kind = j.at("series").at("kind").get<std::string>();
    return fr;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOutputs {
    BenchmarkDataset dataset;
    std::string dataset_id;
    std::string csv_path;
    std::string meta_path;
    std::string summary;  // per-length mean table, printable
};

inline SimulateOutputs run_simulate(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    SimulateOutputs out;
    out.dataset = simulate(cfg.plan);
    const std::string csv_content = out.dataset.to_csv();
    out.dataset_id = content_id(csv_content);

    out.csv_path = path_join(out_dir, "dataset.csv");
    csv::write_file(out.csv_path, csv_content);

    nlohmann::json meta = nlohmann::json::parse(out.dataset.metadata_json);
    meta["dataset_id"] = out.dataset_id;
    out.meta_path = path_join(out_dir, "dataset.meta.json");
    csv::write_file(out.meta_path, meta.dump(2) + "\n");

    std::string s = "m,mean_f_up,mean_f_down,f_tilde\n";
    const DecaySeries tilde = tilde_series(out.dataset);
    for (const auto& pt : tilde.points) {
        const double up = mean(out.dataset.estimates(pt.m, Direction::Up));
        const double down = mean(out.dataset.estimates(pt.m, Direction::Down));
        s += std::to_string(pt.m) + "," + csv::format_double(up) + "," +
             csv::format_double(down) + "," + csv::format_double(pt.value) + "\n";
    }
    out.summary = s;
    return out;
}

// ---------------------------------------------------------------------------
// ramsey

struct RamseyFitResult {
    double envelope_time_us = 0.0;  // T in exp(-(t/T)^2)
    double t2_star_us = 0.0;        // T2* whose sigma_op reproduces that envelope
    double sigma_cycles = 0.0;      // fitted detuning width, cycles per pi-pulse
};

// Gaussian envelope fit c(t) = exp(-(t/T)^2), linearized through the origin
// on points with c above a noise floor. The detuning width sigma follows from
// the envelope, and T2* from inverting the sigma_op relation.
inline RamseyFitResult fit_gaussian_envelope(const std::vector<std::pair<double, double>>& points,
                                             double tau_op_us) {
    double sxy = 0.0, sxx = 0.0;
    int used = 0;
    for (const auto& [t, c] : points) {
        if (t <= 0.0 || c < 0.1) continue;
        const double x = t * t;
        const double y = -std::log(c);
        sxy += x * y;
        sxx += x * x;
        ++used;
    }
    if (used < 2 || sxy <= 0.0) throw ConfigError("not enough usable points for a Ramsey envelope fit");
    const double inv_t2 = sxy / sxx;  // 1 / T_env^2
    RamseyFitResult r;
    r.envelope_time_us = 1.0 / std::sqrt(inv_t2);
    r.sigma_cycles = tau_op_us / (std::sqrt(2.0) * std::numbers::pi * r.envelope_time_us);
    r.t2_star_us = r.envelope_time_us / (2.0 * std::sqrt(std::numbers::ln2));
    return r;
}

struct RamseyOutputs {
    std::vector<std::pair<double, double>> table;
    RamseyFitResult fit;
    std::string csv_path;
    std::string json_path;
};

inline RamseyOutputs run_ramsey(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    RamseyOutputs out;
    out.table = ramsey_decay(cfg.plan.qubit, cfg.plan.detuning, cfg.ramsey_delays_us,
                             cfg.ramsey_samples, cfg.plan.seed);
    out.fit = fit_gaussian_envelope(out.table, cfg.plan.qubit.tau_op_us);

    std::string content = "delay_us,coherence\n";
    for (const auto& [t, c] : out.table)
        content += csv::format_double(t) + "," + csv::format_double(c) + "\n";
    out.csv_path = path_join(out_dir, "ramsey.csv");
    csv::write_file(out.csv_path, content);

    nlohmann::json j{{"toolkit_version", kToolkitVersion},
                     {"detuning", detuning_to_json(cfg.plan.detuning)},
                     {"n_samples", cfg.ramsey_samples},
                     {"seed", cfg.plan.seed},
                     {"envelope_time_us", out.fit.envelope_time_us},
                     {"t2_star_us", out.fit.t2_star_us},
                     {"sigma_cycles", out.fit.sigma_cycles}};
    out.json_path = path_join(out_dir, "ramsey_fit.json");
    csv::write_file(out.json_path, j.dump(2) + "\n");
    return out;
}

// ---------------------------------------------------------------------------
// fit

struct FitOutputs {
    std::vector<FitResult> results;
    std::vector<std::string> paths;
    DecaySeries series;
};

inline DecaySeries series_for_mode(const BenchmarkDataset& ds, const std::string& mode,
                                   const std::string& dataset_id) {
    DecaySeries series;
    if (mode == "tilde")
        series = tilde_series(ds);
    else if (mode == "up")
        series = direction_series(ds, Direction::Up);
    else if (mode == "down")
        series = direction_series(ds, Direction::Down);
    else
        throw ConfigError("unknown series mode '" + mode + "' (expected tilde, up, or down)");
    series.dataset_id = dataset_id;
    return series;
}

inline FitOutputs run_fit(const std::string& dataset_csv_path,
                          const std::vector<std::string>& model_names, const std::string& mode,
                          const std::string& out_dir) {
    ensure_dir(out_dir);
    const std::string content = csv::read_file(dataset_csv_path);
    const BenchmarkDataset ds = BenchmarkDataset::from_csv(content);

    FitOutputs out;
    out.series = series_for_mode(ds, mode, content_id(content));
    for (const auto& name : model_names) {
        const ModelKind kind = model_kind_from_name(name);
        const FitResult fr = fit(kind, out.series);
        std::string fname = "fit_" + std::string(model_kind_name(kind));
        if (mode != "tilde") fname += "_" + mode;
        fname += ".json";
        const std::string path = path_join(out_dir, fname);
        csv::write_file(path, fit_result_to_json(fr, out.series).dump(2) + "\n");
        out.results.push_back(fr);
        out.paths.push_back(path);
    }
    return out;
}

// ---------------------------------------------------------------------------
// compare

struct CompareRow {
    std::string model_a;
    std::string model_b;
    double aic_a = 0.0;
    double aic_b = 0.0;
    double relative_likelihood = 0.0;  // of b relative to a
};

inline std::vector<CompareRow> compare_fits(const std::vector<FitResult>& fits) {
    if (fits.size() < 2) throw ConfigError("compare needs at least two fit results");
    std::vector<CompareRow> rows;
    for (std::size_t a = 0; a < fits.size(); ++a)
        for (std::size_t b = a + 1; b < fits.size(); ++b) {
            CompareRow row;
            row.model_a = model_kind_name(fits[a].model.kind);
            row.model_b = model_kind_name(fits[b].model.kind);
            row.aic_a = fits[a].aic;
            row.aic_b = fits[b].aic;
            row.relative_likelihood = compare(fits[a], fits[b]);
            rows.push_back(row);
        }
    return rows;
}

inline std::string run_compare(const std::vector<std::string>& fit_paths,
                               const std::string& out_path) {
    std::vector<FitResult> fits;
    std::string series_id, series_kind, dataset_id;
    for (const auto& p : fit_paths) {
        const nlohmann::json j = nlohmann::json::parse(csv::read_file(p));
        fits.push_back(fit_result_from_json(j));
        dataset_id = j.at("series").at("dataset_id").get<std::string>();
        series_kind = fits.back().series_kind;
    }
    const auto rows = compare_fits(fits);

    std::string content =
        "dataset_id,series,model_a,aic_a,model_b,aic_b,relative_likelihood_b_vs_a\n";
    for (const auto& r : rows) {
        content += csv::join_row({dataset_id, series_kind, r.model_a, csv::format_double(r.aic_a),
                                  r.model_b, csv::format_double(r.aic_b),
                                  csv::format_double(r.relative_likelihood)});
        content += '\n';
    }
    csv::write_file(out_path, content);
    return content;
}

// ---------------------------------------------------------------------------
// interleave

// Pull the requested polarization (and its standard error) out of a fit:
// 'p' is the high rate, 'q' the low rate of a two-fidelity fit; no-constant
// fits expose only 'p'.
inline void extract_rate(const FitResult& fr, char which, double& value, double& stderr_out) {
    if (fr.model.kind == ModelKind::TwoFidelity) {
        if (which == 'p') {
            value = fr.model.p;
            stderr_out = fr.stderrs.size() > 1 ? fr.stderrs[1] : 0.0;
        } else {
            value = fr.model.q;
            stderr_out = fr.stderrs.size() > 2 ? fr.stderrs[2] : 0.0;
        }
        return;
    }
    if (fr.model.kind == ModelKind::NoConstant) {
        if (which != 'p')
            throw ConfigError("no-constant fits have a single rate; only p/p pairing applies");
        value = fr.model.p;
        stderr_out = fr.stderrs.size() > 1 ? fr.stderrs[1] : 0.0;
        return;
    }
    throw ConfigError("interleave expects two-fidelity or no-constant fits");
}

inline FidelityReport interleaved_report(const FitResult& reference, const FitResult& interleaved,
                                         const std::string& pairing, double n_g) {
    if (pairing != "p/p" && pairing != "q/q" && pairing != "q/p")
        throw ConfigError("unknown pairing '" + pairing + "' (expected p/p, q/q, or q/p)");
    const char int_rate = pairing[0];
    const char ref_rate = pairing[2];

    double p_int, s_int, p_ref, s_ref;
    extract_rate(interleaved, int_rate, p_int, s_int);
    extract_rate(reference, ref_rate, p_ref, s_ref);

    FidelityReport report;
    report.n_g = n_g;
    report.conversion = pairing + std::string(" first-order");
    bool clamped = false;
    report.interleaved_gate_fidelity = interleaved_fidelity(p_int, p_ref, n_g, &clamped);
    report.ratio_clamped = clamped;
    report.interleaved_stderr = interleaved_fidelity_stderr(p_int, p_ref, s_int, s_ref, n_g);
    report.clifford_fidelity = polarization_to_avg_fidelity(p_ref, 2);
    report.clifford_stderr = s_ref / 2.0;
    report.primitive_fidelity = primitive_gate_fidelity(p_ref, n_g);
    report.primitive_stderr = primitive_gate_fidelity_stderr(s_ref, n_g);
    return report;
}

inline nlohmann::json fidelity_report_to_json(const FidelityReport& r) {
    nlohmann::json j{{"toolkit_version", kToolkitVersion},
                     {"n_g", r.n_g},
                     {"conversion", r.conversion},
                     {"ratio_clamped", r.ratio_clamped}};
    if (r.clifford_fidelity) {
        j["reference_clifford_fidelity"] = *r.clifford_fidelity;
        j["reference_clifford_stderr"] = *r.clifford_stderr;
    }
    if (r.primitive_fidelity) {
        j["reference_primitive_fidelity"] = *r.primitive_fidelity;
        j["reference_primitive_stderr"] = *r.primitive_stderr;
    }
    if (r.interleaved_gate_fidelity) {
        j["interleaved_gate_fidelity"] = *r.interleaved_gate_fidelity;
        j["interleaved_stderr"] = *r.interleaved_stderr;
    }
    return j;
}

inline FidelityReport run_interleave(const std::string& reference_fit_path,
                                     const std::string& interleaved_fit_path,
                                     const std::string& pairing, double n_g,
                                     const std::string& out_path) {
    const FitResult ref =
        fit_result_from_json(nlohmann::json::parse(csv::read_file(reference_fit_path)));
    const FitResult inter =
        fit_result_from_json(nlohmann::json::parse(csv::read_file(interleaved_fit_path)));
    const FidelityReport report = interleaved_report(ref, inter, pairing, n_g);
    csv::write_file(out_path, fidelity_report_to_json(report).dump(2) + "\n");
    return report;
}

// ---------------------------------------------------------------------------
// report (plot-ready tables)

struct ReportOutputs {
    std::string decay_csv_path;
    std::vector<std::string> histogram_csv_paths;
};

inline ReportOutputs run_report(const std::string& dataset_csv_path,
                                const std::vector<std::string>& fit_paths,
                                const std::string& out_dir, const std::vector<int>& hist_lengths,
                                int bins) {
    ensure_dir(out_dir);
    const std::string content = csv::read_file(dataset_csv_path);
    const BenchmarkDataset ds = BenchmarkDataset::from_csv(content);
    const std::string dataset_id = content_id(content);

    std::vector<FitResult> fits;
    for (const auto& p : fit_paths) {
        const nlohmann::json j = nlohmann::json::parse(csv::read_file(p));
        const std::string fit_ds = j.at("series").at("dataset_id").get<std::string>();
        if (fit_ds != dataset_id)
            throw ConfigError("fit " + p + " belongs to dataset " + fit_ds +
                              ", not to the one being reported (" + dataset_id + ")");
        fits.push_back(fit_result_from_json(j));
    }

    const DecaySeries tilde = tilde_series(ds);
    std::string header = "dataset_id,m,f_tilde,ci95_half_width";
    for (const auto& fr : fits) header += ",fit_" + std::string(model_kind_name(fr.model.kind));
    std::string decay = header + "\n";
    for (const auto& pt : tilde.points) {
        std::vector<std::string> fields{dataset_id, std::to_string(pt.m),
                                        csv::format_double(pt.value),
                                        csv::format_double(1.96 * std::sqrt(pt.variance))};
        for (const auto& fr : fits) fields.push_back(csv::format_double(evaluate(fr.model, pt.m)));
        decay += csv::join_row(fields) + "\n";
    }
    ReportOutputs out;
    out.decay_csv_path = path_join(out_dir, "report_decay.csv");
    csv::write_file(out.decay_csv_path, decay);

    for (int m : hist_lengths) {
        const HistogramPair h = histogram(ds, m, bins);
        std::string hist = "dataset_id,m,bin_lo,bin_hi,count_up,count_down\n";
        for (int b = 0; b < bins; ++b) {
            hist += csv::join_row({dataset_id, std::to_string(m),
                                   csv::format_double(static_cast<double>(b) / bins),
                                   csv::format_double(static_cast<double>(b + 1) / bins),
                                   std::to_string(h.up[static_cast<std::size_t>(b)]),
                                   std::to_string(h.down[static_cast<std::size_t>(b)])});
            hist += '\n';
        }
        const std::string path = path_join(out_dir, "report_hist_m" + std::to_string(m) + ".csv");
        csv::write_file(path, hist);
        out.histogram_csv_paths.push_back(path);
    }
    return out;
}

}  // namespace pipeline
}  // namespace rbsim
