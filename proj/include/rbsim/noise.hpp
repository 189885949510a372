#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "rbsim/clifford.hpp"
#include "rbsim/errors.hpp"
#include "rbsim/rng.hpp"
#include "rbsim/unitary.hpp"

namespace rbsim {

// Physical timing and dephasing parameters. All times in microseconds.
struct QubitConfig {
    double tau_op_us = 1.6;    // pi-pulse duration
    double tau_wait_us = 0.5;  // wait after each pulse (microwave source dead time)
    double t2_star_us = 120.0; // Ramsey dephasing time

    double wait_fraction() const { return tau_wait_us / tau_op_us; }

    void validate() const {
        if (!(tau_op_us > 0.0) || !(tau_wait_us > 0.0) || !(t2_star_us > 0.0))
            throw ConfigError("qubit timing parameters must be strictly positive");
        if (!(tau_wait_us < t2_star_us))
            throw ConfigError("tau_wait must be smaller than T2*");
    }
};

// Width of the quasi-static Gaussian detuning distribution implied by T2*,
// in cycles per pi-pulse (delta = dOmega * tau_op / 2pi).
inline double sigma_op(const QubitConfig& config) {
    return config.tau_op_us / (2.0 * std::numbers::pi * std::sqrt(2.0 * std::numbers::ln2) * config.t2_star_us);
}

enum class DetuningKind { Fixed, Gaussian, Lorentzian, RandomWalk };

inline const char* detuning_kind_name(DetuningKind k) {
    switch (k) {
        case DetuningKind::Fixed: return "fixed";
        case DetuningKind::Gaussian: return "gaussian";
        case DetuningKind::Lorentzian: return "lorentzian";
        case DetuningKind::RandomWalk: return "random-walk";
    }
    return "?";
}

// Quasi-static detuning distribution. All parameters are dimensionless
// detunings in cycles per pi-pulse.
struct DetuningModel {
    DetuningKind kind = DetuningKind::Fixed;
    double delta = 0.0;       // Fixed
    double sigma = 0.0;       // Gaussian std
    double gamma = 0.0;       // Lorentzian scale
    double sigma_step = 0.0;  // RandomWalk step std
    double sigma_cap = 0.0;   // RandomWalk clamp

    static DetuningModel fixed(double delta) { return {DetuningKind::Fixed, delta, 0, 0, 0, 0}; }
    static DetuningModel gaussian(double sigma) { return {DetuningKind::Gaussian, 0, sigma, 0, 0, 0}; }
    static DetuningModel lorentzian(double gamma) { return {DetuningKind::Lorentzian, 0, 0, gamma, 0, 0}; }
    static DetuningModel random_walk(double step, double cap) {
        return {DetuningKind::RandomWalk, 0, 0, 0, step, cap};
    }

    void validate() const {
        switch (kind) {
            case DetuningKind::Fixed: break;
            case DetuningKind::Gaussian:
                if (!(sigma > 0.0)) throw ConfigError("gaussian detuning requires sigma > 0");
                break;
            case DetuningKind::Lorentzian:
                if (!(gamma > 0.0)) throw ConfigError("lorentzian detuning requires gamma > 0");
                break;
            case DetuningKind::RandomWalk:
                if (!(sigma_step > 0.0) || !(sigma_cap > 0.0))
                    throw ConfigError("random-walk detuning requires sigma_step > 0 and sigma_cap > 0");
                break;
        }
    }
};

// Draws quasi-static detunings; carries the walk state for the correlated
// RandomWalk variant.
class DetuningSampler {
  public:
    explicit DetuningSampler(const DetuningModel& model) : model_(model) {}

    double sample(RandomStream& rng) {
        switch (model_.kind) {
            case DetuningKind::Fixed: return model_.delta;
            case DetuningKind::Gaussian: return rng.normal(0.0, model_.sigma);
            case DetuningKind::Lorentzian: return rng.cauchy(model_.gamma);
            case DetuningKind::RandomWalk: {
                walk_ += rng.normal(0.0, model_.sigma_step);
                walk_ = std::min(std::max(walk_, -model_.sigma_cap), model_.sigma_cap);
                return walk_;
            }
        }
        return 0.0;
    }

  private:
    DetuningModel model_;
    double walk_ = 0.0;
};

// One-shot draw for the stateless distribution kinds. The random walk is
// stateful across draws and must go through a DetuningSampler.
inline double sample_detuning(const DetuningModel& model, RandomStream& rng) {
    if (model.kind == DetuningKind::RandomWalk)
        throw ConfigError("random-walk detuning draws require a DetuningSampler");
    DetuningSampler s(model);
    return s.sample(rng);
}

// Rotation-frame validity bound for the off-resonant pulse model; draws past
// it are simulated anyway but should be surfaced to the user as a warning.
inline bool detuning_in_model_range(double delta) { return std::abs(delta) < 0.5; }

// Free z-axis precession for a wait of `duration_fraction` pi-pulse times at
// detuning delta: exp(-i (2 pi delta f / 2) sigma_z).
inline Unitary2 wait_unitary(double duration_fraction, double delta) {
    return Unitary2::rotation(0.0, 0.0, 1.0, 2.0 * std::numbers::pi * delta * duration_fraction);
}

// Off-resonant generator pulse: the drive (Omega tau_op = pi, along the pulse
// axis) and the detuning (dOmega tau_op = 2 pi delta, along z) combine into a
// tilted rotation of angle f * sqrt(pi^2 + (2 pi delta)^2). The identity wait
// is pure z precession for one pi-pulse time.
inline Unitary2 pulse_unitary(const PrimitivePulse& pulse, double delta) {
    if (pulse.kind == PulseKind::IdentityWait) return wait_unitary(pulse.duration_fraction, delta);
    const double pi = std::numbers::pi;
    double ax, ay;
    pulse_axis(pulse.kind, ax, ay);
    const double wz = 2.0 * pi * delta;
    const double omega = std::sqrt(pi * pi + wz * wz);
    const double theta = pulse.duration_fraction * omega;
    return Unitary2::rotation(pi * ax / omega, pi * ay / omega, wz / omega, theta);
}

// Physical realization of a Clifford at fixed detuning: each pulse of the
// canonical decomposition followed by the inter-pulse wait, in temporal
// order (the wait after the final pulse included).
inline Unitary2 noisy_clifford(const CliffordElement& c, double delta, const QubitConfig& config) {
    const double wf = config.wait_fraction();
    Unitary2 u = Unitary2::identity();
    for (const PrimitivePulse& p : c.pulses) {
        u = pulse_unitary(p, delta) * u;
        u = wait_unitary(wf, delta) * u;
    }
    return u;
}

// Ensemble-averaged Ramsey fringe envelope at zero nominal detuning: for each
// delay t, the mean of cos(2 pi delta t / tau_op) over detuning draws.
inline std::vector<std::pair<double, double>> ramsey_decay(const QubitConfig& config,
                                                           const DetuningModel& model,
                                                           const std::vector<double>& delays_us,
                                                           std::size_t n_samples,
                                                           std::uint64_t seed) {
    if (model.kind != DetuningKind::Gaussian && model.kind != DetuningKind::Lorentzian)
        throw ConfigError("ramsey_decay requires a gaussian or lorentzian detuning model");
    model.validate();
    config.validate();

    RandomStream rng(derive_seed(seed, stream_tag::kRamsey));
    DetuningSampler sampler(model);
    std::vector<double> sums(delays_us.size(), 0.0);
    for (std::size_t s = 0; s < n_samples; ++s) {
        const double delta = sampler.sample(rng);
        const double w = 2.0 * std::numbers::pi * delta / config.tau_op_us;
        for (std::size_t i = 0; i < delays_us.size(); ++i) sums[i] += std::cos(w * delays_us[i]);
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(delays_us.size());
    for (std::size_t i = 0; i < delays_us.size(); ++i)
        out.emplace_back(delays_us[i], sums[i] / static_cast<double>(n_samples));
    return out;
}

}  // namespace rbsim
