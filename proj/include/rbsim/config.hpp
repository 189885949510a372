#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbsim/clifford.hpp"
#include "rbsim/errors.hpp"
#include "rbsim/noise.hpp"
#include "rbsim/simulator.hpp"

namespace rbsim {

// Parsed run configuration: the simulation plan plus toolkit-level settings.
struct RunConfig {
    SimulationPlan plan;
    std::string output_dir = ".";
    double n_g = 1.875;  // overwritten with the group-derived value by default
    std::vector<double> ramsey_delays_us;
    std::size_t ramsey_samples = 100000;

    void validate() const { plan.validate(); }
};

namespace config_detail {

inline void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                       const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const auto& a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + context);
    }
}

template <typename T>
T require(const nlohmann::json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + context);
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("key '" + key + "' in " + context + " has the wrong type");
    }
}

template <typename T>
T optional_or(const nlohmann::json& j, const std::string& key, const std::string& context,
              T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("key '" + key + "' in " + context + " has the wrong type");
    }
}

inline QubitConfig parse_qubit(const nlohmann::json& j) {
    check_keys(j, {"tau_op_us", "tau_wait_us", "t2_star_us"}, "qubit");
    QubitConfig q;
    q.tau_op_us = require<double>(j, "tau_op_us", "qubit");
    q.tau_wait_us = require<double>(j, "tau_wait_us", "qubit");
    q.t2_star_us = require<double>(j, "t2_star_us", "qubit");
    return q;
}

// Distribution widths default to the T2*-derived sigma_op (Gaussian) and the
// FWHM-matched gamma (Lorentzian) when omitted.
inline DetuningModel parse_detuning(const nlohmann::json& j, const QubitConfig& qubit) {
    check_keys(j, {"kind", "delta", "sigma", "gamma", "sigma_step", "sigma_cap"}, "detuning");
    const std::string kind = require<std::string>(j, "kind", "detuning");
    const double sig_op = sigma_op(qubit);
    if (kind == "fixed") return DetuningModel::fixed(require<double>(j, "delta", "detuning"));
    if (kind == "gaussian")
        return DetuningModel::gaussian(optional_or<double>(j, "sigma", "detuning", sig_op));
    if (kind == "lorentzian")
        return DetuningModel::lorentzian(optional_or<double>(
            j, "gamma", "detuning", std::sqrt(2.0 * std::numbers::ln2) * sig_op));
    if (kind == "random-walk")
        return DetuningModel::random_walk(require<double>(j, "sigma_step", "detuning"),
                                          require<double>(j, "sigma_cap", "detuning"));
    throw ConfigError("unknown detuning kind '" + kind + "'");
}

inline SpamParams parse_spam(const nlohmann::json& j) {
    check_keys(j, {"prep_error", "readout_fidelity_up", "readout_fidelity_down"}, "spam");
    SpamParams s;
    s.prep_error = optional_or<double>(j, "prep_error", "spam", 0.0);
    s.readout_fidelity_up = optional_or<double>(j, "readout_fidelity_up", "spam", 1.0);
    s.readout_fidelity_down = optional_or<double>(j, "readout_fidelity_down", "spam", 1.0);
    return s;
}

}  // namespace config_detail

// Strict parse: unknown keys anywhere are rejected, and all component
// invariants are checked before any work starts.
inline RunConfig parse_run_config(const nlohmann::json& j) {
    using namespace config_detail;
    check_keys(j,
               {"qubit", "detuning", "plan", "seed", "output_dir", "workers", "ramsey", "n_g"},
               "run config");

    RunConfig cfg;
    cfg.plan.qubit = parse_qubit(require<nlohmann::json>(j, "qubit", "run config"));

    if (j.contains("detuning"))
        cfg.plan.detuning = parse_detuning(j.at("detuning"), cfg.plan.qubit);
    else
        cfg.plan.detuning = DetuningModel::gaussian(sigma_op(cfg.plan.qubit));

    const nlohmann::json pj = require<nlohmann::json>(j, "plan", "run config");
    check_keys(pj,
               {"lengths", "n_sequences", "n_shots", "interleaved_gate", "random_directions",
                "spam"},
               "plan");
    cfg.plan.lengths = require<std::vector<int>>(pj, "lengths", "plan");
    cfg.plan.n_sequences = require<int>(pj, "n_sequences", "plan");
    cfg.plan.n_shots = require<int>(pj, "n_shots", "plan");
    if (pj.contains("interleaved_gate") && !pj.at("interleaved_gate").is_null())
        cfg.plan.interleaved_gate = CliffordGroup::instance().find_by_name(
            require<std::string>(pj, "interleaved_gate", "plan"));
    cfg.plan.random_directions = optional_or<bool>(pj, "random_directions", "plan", false);
    if (pj.contains("spam")) cfg.plan.spam = parse_spam(pj.at("spam"));

    cfg.plan.seed = require<std::uint64_t>(j, "seed", "run config");
    cfg.output_dir = optional_or<std::string>(j, "output_dir", "run config", ".");
    cfg.plan.workers = optional_or<int>(j, "workers", "run config", 0);
    cfg.n_g = optional_or<double>(j, "n_g", "run config",
                                  CliffordGroup::instance().mean_pulse_count());

    if (j.contains("ramsey")) {
        const auto& rj = j.at("ramsey");
        check_keys(rj, {"delays_us", "n_samples"}, "ramsey");
        cfg.ramsey_delays_us =
            optional_or<std::vector<double>>(rj, "delays_us", "ramsey", {});
        const std::int64_t ns = optional_or<std::int64_t>(rj, "n_samples", "ramsey", 100000);
        if (ns < 1) throw ConfigError("ramsey n_samples must be >= 1");
        cfg.ramsey_samples = static_cast<std::size_t>(ns);
    }
    // Default Ramsey delay grid: 49 points spanning [0, 2 T2*].
    if (cfg.ramsey_delays_us.empty()) {
        for (int i = 0; i <= 48; ++i)
            cfg.ramsey_delays_us.push_back(2.0 * cfg.plan.qubit.t2_star_us * i / 48.0);
    }

    cfg.validate();
    if (!(cfg.n_g > 0.0)) throw ConfigError("n_g must be positive");
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(csv::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config JSON parse error in " + path + ": " + e.what());
    }
    return parse_run_config(j);
}

}  // namespace rbsim
