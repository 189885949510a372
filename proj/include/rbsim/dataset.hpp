#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rbsim/clifford.hpp"
#include "rbsim/csv.hpp"
#include "rbsim/errors.hpp"

namespace rbsim {

using Direction = Target;

inline const char* direction_name(Direction d) { return d == Direction::Up ? "up" : "down"; }

inline Direction direction_from_name(const std::string& s) {
    if (s == "up") return Direction::Up;
    if (s == "down") return Direction::Down;
    throw IoError("invalid direction field: '" + s + "'");
}

// State preparation and measurement error model: the prepared state is
// |down><down| with probability prep_error, and each readout reports the
// true state with its own fidelity.
struct SpamParams {
    double prep_error = 0.0;
    double readout_fidelity_up = 1.0;
    double readout_fidelity_down = 1.0;

    void validate() const {
        for (double v : {prep_error, readout_fidelity_up, readout_fidelity_down})
            if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("SPAM parameters must lie in [0, 1]");
    }
};

// One simulated randomized-benchmarking run: a random sequence of m
// Cliffords plus recovery, measured n_shots times.
struct SequenceRecord {
    int m = 0;
    Direction direction = Direction::Up;
    int sequence_index = 0;  // within (length, run), global over both directions
    double survival = 0.0;   // k / n_shots
    int n_shots = 0;
};

// Survival-probability records keyed by (sequence length, target direction),
// plus provenance metadata.
struct BenchmarkDataset {
    std::vector<SequenceRecord> records;  // canonical order: length asc, sequence index asc
    std::uint64_t seed = 0;
    int n_shots = 0;
    std::string metadata_json;  // plan echo, written next to the CSV
    std::size_t n_large_detuning = 0;  // draws outside the |delta| < 0.5 model range

    std::vector<int> lengths() const {
        std::vector<int> ls;
        for (const auto& r : records)
            if (ls.empty() || ls.back() != r.m) ls.push_back(r.m);
        std::sort(ls.begin(), ls.end());
        ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
        return ls;
    }

    bool has_length(int m) const {
        for (const auto& r : records)
            if (r.m == m) return true;
        return false;
    }

    std::vector<double> estimates(int m, Direction d) const {
        if (!has_length(m)) throw LengthNotFound("length m=" + std::to_string(m) + " not in dataset");
        std::vector<double> out;
        for (const auto& r : records)
            if (r.m == m && r.direction == d) out.push_back(r.survival);
        if (out.empty())
            throw MissingDirection(std::string("no ") + direction_name(d) +
                                   "-target records at m=" + std::to_string(m));
        return out;
    }

    std::string to_csv() const {
        std::string out = "m,direction,sequence_index,survival,n_shots\n";
        for (const auto& r : records) {
            out += csv::join_row({std::to_string(r.m), direction_name(r.direction),
                                  std::to_string(r.sequence_index), csv::format_double(r.survival),
                                  std::to_string(r.n_shots)});
            out += '\n';
        }
        return out;
    }

    static BenchmarkDataset from_csv(const std::string& content) {
        const auto rows = csv::parse(content);
        if (rows.empty() || rows[0] != std::vector<std::string>{"m", "direction", "sequence_index",
                                                                "survival", "n_shots"})
            throw IoError("dataset CSV header mismatch");
        BenchmarkDataset ds;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& f = rows[i];
            if (f.size() != 5) throw IoError("dataset CSV row has wrong field count");
            SequenceRecord r;
            r.m = static_cast<int>(csv::parse_int(f[0]));
            r.direction = direction_from_name(f[1]);
            r.sequence_index = static_cast<int>(csv::parse_int(f[2]));
            r.survival = csv::parse_double(f[3]);
            r.n_shots = static_cast<int>(csv::parse_int(f[4]));
            ds.records.push_back(r);
        }
        if (!ds.records.empty()) ds.n_shots = ds.records.front().n_shots;
        return ds;
    }
};

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Unbiased sample variance.
inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return s / static_cast<double>(v.size() - 1);
}

// Variance of the mean, estimated from the per-sequence sample variance.
inline double variance_of_mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : sample_variance(v) / static_cast<double>(v.size());
}

// FNV-1a hash, used as a stable content identifier for datasets.
inline std::string content_id(const std::string& content) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : content) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 0; i < 16; ++i) buf[15 - i] = hex[(h >> (4 * i)) & 0xF];
    buf[16] = '\0';
    return std::string(buf);
}

}  // namespace rbsim
