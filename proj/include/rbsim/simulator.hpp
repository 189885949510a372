#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rbsim/clifford.hpp"
#include "rbsim/dataset.hpp"
#include "rbsim/errors.hpp"
#include "rbsim/noise.hpp"
#include "rbsim/rng.hpp"
#include "rbsim/version.hpp"

namespace rbsim {

// Full description of a benchmarking run. Everything downstream (including
// the dataset on disk) is a pure function of this plan.
struct SimulationPlan {
    std::vector<int> lengths;
    int n_sequences = 500;  // per length, split evenly over up/down targets
    int n_shots = 50;
    int interleaved_gate = -1;       // element index, -1 for standard benchmarking
    bool random_directions = false;  // draw targets at random instead of alternating
    SpamParams spam;
    DetuningModel detuning;
    QubitConfig qubit;
    std::uint64_t seed = 0;
    int workers = 0;  // 0 = hardware concurrency

    void validate() const {
        if (lengths.empty()) throw ConfigError("plan needs at least one sequence length");
        int prev = 0;
        for (int m : lengths) {
            if (m < 1) throw ConfigError("sequence lengths must be >= 1");
            if (m <= prev) throw ConfigError("sequence lengths must be strictly increasing");
            prev = m;
        }
        if (n_sequences < 2 || n_sequences % 2 != 0)
            throw ConfigError("n_sequences must be an even count >= 2");
        if (n_shots < 1) throw ConfigError("n_shots must be >= 1");
        if (interleaved_gate < -1 || interleaved_gate >= CliffordGroup::kSize)
            throw ConfigError("interleaved gate index out of range");
        if (workers < 0) throw ConfigError("worker count must be >= 0");
        spam.validate();
        detuning.validate();
        qubit.validate();
    }
};

inline nlohmann::json spam_to_json(const SpamParams& s) {
    return {{"prep_error", s.prep_error},
            {"readout_fidelity_up", s.readout_fidelity_up},
            {"readout_fidelity_down", s.readout_fidelity_down}};
}

inline nlohmann::json detuning_to_json(const DetuningModel& d) {
    nlohmann::json j{{"kind", detuning_kind_name(d.kind)}};
    switch (d.kind) {
        case DetuningKind::Fixed: j["delta"] = d.delta; break;
        case DetuningKind::Gaussian: j["sigma"] = d.sigma; break;
        case DetuningKind::Lorentzian: j["gamma"] = d.gamma; break;
        case DetuningKind::RandomWalk:
            j["sigma_step"] = d.sigma_step;
            j["sigma_cap"] = d.sigma_cap;
            break;
    }
    return j;
}

inline nlohmann::json qubit_to_json(const QubitConfig& q) {
    return {{"tau_op_us", q.tau_op_us}, {"tau_wait_us", q.tau_wait_us}, {"t2_star_us", q.t2_star_us}};
}

inline nlohmann::json plan_to_json(const SimulationPlan& p) {
    nlohmann::json j;
    j["lengths"] = p.lengths;
    j["n_sequences"] = p.n_sequences;
    j["n_shots"] = p.n_shots;
    if (p.interleaved_gate >= 0)
        j["interleaved_gate"] = CliffordGroup::instance().element(p.interleaved_gate).name;
    j["random_directions"] = p.random_directions;
    j["spam"] = spam_to_json(p.spam);
    j["detuning"] = detuning_to_json(p.detuning);
    j["qubit"] = qubit_to_json(p.qubit);
    j["seed"] = p.seed;
    return j;
}

// m uniform draws from the group plus the recovery gate for the target.
inline std::pair<std::vector<int>, int> generate_sequence(int m, Direction direction,
                                                          RandomStream& rng) {
    const auto& group = CliffordGroup::instance();
    std::vector<int> seq(static_cast<std::size_t>(m));
    for (auto& g : seq) g = static_cast<int>(rng.uniform_below(CliffordGroup::kSize));
    return {seq, group.recovery_index(seq, direction)};
}

// c1, g, c2, g, ..., cm, g. The recovery must be recomputed for the woven
// sequence by the caller.
inline std::vector<int> interleave(const std::vector<int>& sequence, int gate) {
    std::vector<int> out;
    out.reserve(2 * sequence.size());
    for (int c : sequence) {
        out.push_back(c);
        out.push_back(gate);
    }
    return out;
}

namespace sim_detail {

// Per-delta lazy cache of noisy Clifford unitaries; a sequence reuses the
// same 24 matrices many times.
class NoisyTable {
  public:
    NoisyTable(double delta, const QubitConfig& config) : delta_(delta), config_(config) {}

    const Unitary2& get(int index) {
        auto& slot = cache_[static_cast<std::size_t>(index)];
        if (!slot)
            slot = noisy_clifford(CliffordGroup::instance().element(index), delta_, config_);
        return *slot;
    }

  private:
    double delta_;
    const QubitConfig& config_;
    std::array<std::optional<Unitary2>, CliffordGroup::kSize> cache_;
};

inline double survival_probability(const Unitary2& net, const SpamParams& spam,
                                   Direction direction) {
    const double e = spam.prep_error;
    const double p_up = (1.0 - e) * std::norm(net(0, 0)) + e * std::norm(net(0, 1));
    const double p_true = direction == Direction::Up ? p_up : 1.0 - p_up;
    const double f_correct =
        direction == Direction::Up ? spam.readout_fidelity_up : spam.readout_fidelity_down;
    const double f_other =
        direction == Direction::Up ? spam.readout_fidelity_down : spam.readout_fidelity_up;
    return f_correct * p_true + (1.0 - f_other) * (1.0 - p_true);
}

inline double run_with_table(const std::vector<int>& sequence, int recovery, NoisyTable& table,
                             const SpamParams& spam, Direction direction) {
    Unitary2 net = Unitary2::identity();
    for (int g : sequence) net = table.get(g) * net;
    net = table.get(recovery) * net;
    return survival_probability(net, spam, direction);
}

}  // namespace sim_detail

// Exact survival probability of one sequence-plus-recovery at fixed detuning,
// through the SPAM filter: the prepared state evolves through the noisy
// realization of every gate, and the probability of the expected outcome is
// reported through the asymmetric readout model.
inline double run_sequence_exact(const std::vector<int>& sequence, int recovery, double delta,
                                 const SpamParams& spam, const QubitConfig& config,
                                 Direction direction) {
    sim_detail::NoisyTable table(delta, config);
    return sim_detail::run_with_table(sequence, recovery, table, spam, direction);
}

// Monte Carlo benchmarking dataset for a plan. Deterministic in the plan
// alone: every sequence owns an RNG stream derived from (seed, length index,
// sequence index), and results are assembled by index, so the output is
// identical for any worker count.
inline BenchmarkDataset simulate(const SimulationPlan& plan) {
    plan.validate();
    const auto n_lengths = plan.lengths.size();
    const std::size_t n_jobs = n_lengths * static_cast<std::size_t>(plan.n_sequences);

    // The correlated random-walk variant draws its path once, in global
    // sequence order, so that parallel execution cannot reorder it.
    std::vector<double> walk_path;
    if (plan.detuning.kind == DetuningKind::RandomWalk) {
        RandomStream walk_rng(derive_seed(plan.seed, stream_tag::kWalk));
        DetuningSampler sampler(plan.detuning);
        walk_path.resize(n_jobs);
        for (auto& d : walk_path) d = sampler.sample(walk_rng);
    }

    std::vector<SequenceRecord> records(n_jobs);
    std::atomic<std::size_t> next_job{0};
    std::atomic<std::size_t> large_detuning{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker_fn = [&]() {
        try {
            for (;;) {
                const std::size_t job = next_job.fetch_add(1);
                if (job >= n_jobs) return;
                const std::size_t li = job / static_cast<std::size_t>(plan.n_sequences);
                const int si = static_cast<int>(job % static_cast<std::size_t>(plan.n_sequences));
                const int m = plan.lengths[li];

                RandomStream rng(derive_seed(plan.seed, stream_tag::kSequence, li,
                                             static_cast<std::uint64_t>(si)));
                const Direction direction =
                    plan.random_directions ? (rng.bernoulli(0.5) ? Direction::Up : Direction::Down)
                                           : (si % 2 == 0 ? Direction::Up : Direction::Down);

                auto [seq, recovery] = generate_sequence(m, direction, rng);
                if (plan.interleaved_gate >= 0) {
                    seq = interleave(seq, plan.interleaved_gate);
                    recovery = CliffordGroup::instance().recovery_index(seq, direction);
                }

                double delta;
                if (plan.detuning.kind == DetuningKind::RandomWalk) {
                    delta = walk_path[job];
                } else {
                    DetuningSampler sampler(plan.detuning);
                    delta = sampler.sample(rng);
                }
                if (!detuning_in_model_range(delta)) large_detuning.fetch_add(1);

                sim_detail::NoisyTable table(delta, plan.qubit);
                const double p = sim_detail::run_with_table(seq, recovery, table, plan.spam, direction);

                int k = 0;
                for (int s = 0; s < plan.n_shots; ++s)
                    if (rng.bernoulli(p)) ++k;

                records[job] = SequenceRecord{m, direction, si,
                                              static_cast<double>(k) / plan.n_shots, plan.n_shots};
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    unsigned n_workers = plan.workers > 0 ? static_cast<unsigned>(plan.workers)
                                          : std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(n_jobs));
    if (n_workers <= 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker_fn);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    BenchmarkDataset ds;
    ds.records = std::move(records);
    ds.seed = plan.seed;
    ds.n_shots = plan.n_shots;
    ds.n_large_detuning = large_detuning.load();
    nlohmann::json meta;
    meta["toolkit_version"] = kToolkitVersion;
    meta["plan"] = plan_to_json(plan);
    meta["n_large_detuning"] = ds.n_large_detuning;
    ds.metadata_json = meta.dump(2);
    return ds;
}

// Sequence-averaged exact survival (no SPAM, no shot noise) at a fixed
// detuning, for each length. These are the individual decay traces whose
// ensemble average is non-exponential.
inline std::vector<std::pair<int, double>> trace_decay(double delta, const std::vector<int>& lengths,
                                                       int n_sequences, const QubitConfig& config,
                                                       std::uint64_t seed) {
    config.validate();
    const SpamParams perfect;
    std::vector<std::pair<int, double>> out;
    out.reserve(lengths.size());
    for (std::size_t li = 0; li < lengths.size(); ++li) {
        double sum = 0.0;
        for (int si = 0; si < n_sequences; ++si) {
            RandomStream rng(derive_seed(seed, stream_tag::kTrace, li,
                                         static_cast<std::uint64_t>(si)));
            auto [seq, recovery] = generate_sequence(lengths[li], Direction::Up, rng);
            sum += run_sequence_exact(seq, recovery, delta, perfect, config, Direction::Up);
        }
        out.emplace_back(lengths[li], sum / n_sequences);
    }
    return out;
}

// Per-sequence survival estimates at one length, binned uniformly over [0, 1]
// separately for up- and down-target runs. Estimates exactly 1.0 land in the
// top bin.
struct HistogramPair {
    int m = 0;
    int bins = 0;
    std::vector<std::size_t> up;
    std::vector<std::size_t> down;
};

inline HistogramPair histogram(const BenchmarkDataset& dataset, int m, int bins) {
    if (bins < 1) throw ConfigError("histogram needs at least one bin");
    const auto up = dataset.estimates(m, Direction::Up);
    const auto down = dataset.estimates(m, Direction::Down);
    HistogramPair h;
    h.m = m;
    h.bins = bins;
    h.up.assign(static_cast<std::size_t>(bins), 0);
    h.down.assign(static_cast<std::size_t>(bins), 0);
    auto bin_of = [bins](double v) {
        int b = static_cast<int>(v * bins);
        if (b >= bins) b = bins - 1;
        if (b < 0) b = 0;
        return static_cast<std::size_t>(b);
    };
    for (double v : up) ++h.up[bin_of(v)];
    for (double v : down) ++h.down[bin_of(v)];
    return h;
}

}  // namespace rbsim
