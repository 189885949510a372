// Command-line driver for the randomized-benchmarking toolkit: deterministic
// simulate -> fit -> compare -> report workflows over JSON/CSV files.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbsim/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNonConvergence = 4;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out;
};

// Precedence for the worker count: --workers flag, RBSIM_WORKERS environment
// variable, config file, hardware default.
void apply_overrides(rbsim::RunConfig& cfg, const CommonOpts& opts) {
    if (opts.seed) cfg.plan.seed = *opts.seed;
    if (opts.workers) {
        cfg.plan.workers = *opts.workers;
    } else if (const char* env = std::getenv("RBSIM_WORKERS")) {
        try {
            cfg.plan.workers = std::stoi(env);
        } catch (const std::exception&) {
            throw rbsim::ConfigError("RBSIM_WORKERS is not an integer");
        }
    }
    if (cfg.plan.workers < 0) throw rbsim::ConfigError("worker count must be >= 0");
    if (!opts.out.empty()) cfg.output_dir = opts.out;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "run configuration JSON");
    if (config_required) c->required();
    cmd->add_option("--seed", opts.seed, "master seed override");
    cmd->add_option("--workers", opts.workers, "worker thread count override");
    cmd->add_option("--out", opts.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rbsim: single-qubit randomized benchmarking under quasi-static detuning noise"};
    app.require_subcommand(1);

    CommonOpts sim_opts;
    auto* sim_cmd = app.add_subcommand("simulate", "generate a benchmarking dataset (CSV + metadata)");
    add_common(sim_cmd, sim_opts);

    CommonOpts ramsey_opts;
    auto* ramsey_cmd =
        app.add_subcommand("ramsey", "ensemble Ramsey decay table and fitted T2*");
    add_common(ramsey_cmd, ramsey_opts);

    struct {
        std::string data;
        std::string models = "no-constant,residual-spam,two-fidelity";
        std::string series = "tilde";
        std::string out = ".";
    } fit_opts;
    auto* fit_cmd = app.add_subcommand("fit", "fit decay models to a dataset");
    fit_cmd->add_option("--data", fit_opts.data, "dataset CSV path")->required();
    fit_cmd->add_option("--models", fit_opts.models,
                        "comma-separated model names (zero-order, no-constant, residual-spam, two-fidelity)");
    fit_cmd->add_option("--series", fit_opts.series, "series to fit: tilde (default), up, or down");
    fit_cmd->add_option("--out", fit_opts.out, "output directory");

    struct {
        std::vector<std::string> fits;
        std::string out = "comparison.csv";
    } cmp_opts;
    auto* cmp_cmd = app.add_subcommand("compare", "pairwise AIC relative likelihoods of fits");
    cmp_cmd->add_option("--fits", cmp_opts.fits, "fit result JSON paths")->required()->expected(2, -1);
    cmp_cmd->add_option("--out", cmp_opts.out, "output CSV path");

    struct {
        std::string reference;
        std::string interleaved;
        std::string pairing = "p/p";
        double n_g = rbsim::CliffordGroup::instance().mean_pulse_count();
        std::string out = "fidelity_report.json";
    } int_opts;
    auto* int_cmd = app.add_subcommand("interleave", "interleaved-gate fidelity report from two fits");
    int_cmd->add_option("--reference", int_opts.reference, "reference fit JSON")->required();
    int_cmd->add_option("--interleaved", int_opts.interleaved, "interleaved fit JSON")->required();
    int_cmd->add_option("--pairing", int_opts.pairing, "rate pairing: p/p, q/q, or q/p");
    int_cmd->add_option("--ng", int_opts.n_g, "pulses per Clifford used in conversions");
    int_cmd->add_option("--out", int_opts.out, "output JSON path");

    struct {
        std::string data;
        std::vector<std::string> fits;
        std::string out = ".";
        std::vector<int> hist_lengths = {2, 150};
        int bins = 20;
    } rep_opts;
    auto* rep_cmd = app.add_subcommand("report", "plot-ready decay and histogram tables");
    rep_cmd->add_option("--data", rep_opts.data, "dataset CSV path")->required();
    rep_cmd->add_option("--fits", rep_opts.fits, "fit result JSON paths");
    rep_cmd->add_option("--out", rep_opts.out, "output directory");
    rep_cmd->add_option("--hist-lengths", rep_opts.hist_lengths, "lengths to histogram");
    rep_cmd->add_option("--bins", rep_opts.bins, "histogram bin count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (sim_cmd->parsed()) {
            rbsim::RunConfig cfg = rbsim::load_run_config(sim_opts.config_path);
            apply_overrides(cfg, sim_opts);
            const auto out = rbsim::pipeline::run_simulate(cfg, cfg.output_dir);
            if (out.dataset.n_large_detuning > 0)
                std::cerr << "warning: " << out.dataset.n_large_detuning
                          << " detuning draws outside the |delta| < 0.5 model range\n";
            std::cout << out.summary;
            std::cout << "dataset: " << out.csv_path << "\nmetadata: " << out.meta_path
                      << "\ndataset_id: " << out.dataset_id << "\n";
        } else if (ramsey_cmd->parsed()) {
            rbsim::RunConfig cfg = rbsim::load_run_config(ramsey_opts.config_path);
            apply_overrides(cfg, ramsey_opts);
            const auto out = rbsim::pipeline::run_ramsey(cfg, cfg.output_dir);
            std::cout << "fitted_t2_star_us: " << rbsim::csv::format_double(out.fit.t2_star_us)
                      << "\nenvelope_time_us: " << rbsim::csv::format_double(out.fit.envelope_time_us)
                      << "\nsigma_cycles: " << rbsim::csv::format_double(out.fit.sigma_cycles)
                      << "\ntable: " << out.csv_path << "\nfit: " << out.json_path << "\n";
        } else if (fit_cmd->parsed()) {
            std::vector<std::string> models;
            std::string cur;
            for (char c : fit_opts.models + ",") {
                if (c == ',') {
                    if (!cur.empty()) models.push_back(cur);
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            const auto out = rbsim::pipeline::run_fit(fit_opts.data, models, fit_opts.series,
                                                      fit_opts.out);
            bool all_converged = true;
            for (std::size_t i = 0; i < out.results.size(); ++i) {
                const auto& fr = out.results[i];
                std::cout << rbsim::model_kind_name(fr.model.kind) << ": aic="
                          << rbsim::csv::format_double(fr.aic)
                          << " p=" << rbsim::csv::format_double(fr.model.p)
                          << (fr.model.kind == rbsim::ModelKind::TwoFidelity
                                  ? " q=" + rbsim::csv::format_double(fr.model.q)
                                  : "")
                          << (fr.converged ? "" : " (not converged)") << " -> " << out.paths[i]
                          << "\n";
                all_converged = all_converged && fr.converged;
            }
            if (!all_converged) {
                std::cerr << "warning: at least one fit did not converge\n";
                return kExitNonConvergence;
            }
        } else if (cmp_cmd->parsed()) {
            std::cout << rbsim::pipeline::run_compare(cmp_opts.fits, cmp_opts.out);
        } else if (int_cmd->parsed()) {
            const auto report = rbsim::pipeline::run_interleave(
                int_opts.reference, int_opts.interleaved, int_opts.pairing, int_opts.n_g,
                int_opts.out);
            if (report.ratio_clamped)
                std::cerr << "warning: polarization ratio above 1 clamped to 1\n";
            std::cout << rbsim::pipeline::fidelity_report_to_json(report).dump(2) << "\n";
        } else if (rep_cmd->parsed()) {
            const auto out = rbsim::pipeline::run_report(rep_opts.data, rep_opts.fits, rep_opts.out,
                                                         rep_opts.hist_lengths, rep_opts.bins);
            std::cout << "decay table: " << out.decay_csv_path << "\n";
            for (const auto& p : out.histogram_csv_paths) std::cout << "histogram: " << p << "\n";
        }
    } catch (const rbsim::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const rbsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
