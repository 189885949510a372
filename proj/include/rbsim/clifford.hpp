#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <string>
#include <vector>

#include "rbsim/errors.hpp"
#include "rbsim/ptm.hpp"
#include "rbsim/unitary.hpp"

namespace rbsim {

// Physical generator pulses. IdentityWait realizes the identity as a wait of
// one pi-pulse duration; the enum order fixes the canonical lexicographic
// order used for decompositions and element indexing.
enum class PulseKind : int {
    IdentityWait = 0,
    PlusX,
    MinusX,
    PlusX2,
    MinusX2,
    PlusY,
    MinusY,
    PlusY2,
    MinusY2,
};

inline const char* pulse_kind_name(PulseKind k) {
    switch (k) {
        case PulseKind::IdentityWait: return "wait";
        case PulseKind::PlusX: return "+X";
        case PulseKind::MinusX: return "-X";
        case PulseKind::PlusX2: return "+X/2";
        case PulseKind::MinusX2: return "-X/2";
        case PulseKind::PlusY: return "+Y";
        case PulseKind::MinusY: return "-Y";
        case PulseKind::PlusY2: return "+Y/2";
        case PulseKind::MinusY2: return "-Y/2";
    }
    return "?";
}

inline bool is_half_pulse(PulseKind k) {
    return k == PulseKind::PlusX2 || k == PulseKind::MinusX2 || k == PulseKind::PlusY2 ||
           k == PulseKind::MinusY2;
}

struct PrimitivePulse {
    PulseKind kind = PulseKind::IdentityWait;
    double nominal_angle = std::numbers::pi;  // pi for full pulses and the wait, pi/2 for halves
    double duration_fraction = 1.0;           // of tau_op: 1.0 full / wait, 0.5 half
};

inline PrimitivePulse make_pulse(PulseKind k) {
    const bool half = is_half_pulse(k);
    return PrimitivePulse{k, half ? std::numbers::pi / 2.0 : std::numbers::pi, half ? 0.5 : 1.0};
}

// Rotation axis of a drive pulse (zero for the wait).
inline void pulse_axis(PulseKind k, double& ax, double& ay) {
    ax = ay = 0.0;
    switch (k) {
        case PulseKind::PlusX:
        case PulseKind::PlusX2: ax = 1.0; break;
        case PulseKind::MinusX:
        case PulseKind::MinusX2: ax = -1.0; break;
        case PulseKind::PlusY:
        case PulseKind::PlusY2: ay = 1.0; break;
        case PulseKind::MinusY:
        case PulseKind::MinusY2: ay = -1.0; break;
        case PulseKind::IdentityWait: break;
    }
}

// Unitary of a generator pulse on resonance.
inline Unitary2 ideal_pulse_unitary(PulseKind k) {
    if (k == PulseKind::IdentityWait) return Unitary2::identity();
    double ax, ay;
    pulse_axis(k, ax, ay);
    const double theta = is_half_pulse(k) ? std::numbers::pi / 2.0 : std::numbers::pi;
    return Unitary2::rotation(ax, ay, 0.0, theta);
}

struct CliffordElement {
    int index = 0;
    std::string name;                    // "I", "X", "X/2", ... or "C<index>"
    Unitary2 unitary;                    // defined up to global phase
    std::vector<PrimitivePulse> pulses;  // shortest decomposition, temporal order
};

enum class Target { Up, Down };

// The 24-element single-qubit Clifford group with canonical indexing,
// physical pulse decompositions, and composition/inverse lookup tables.
//
// Canonical order: by (pulse count, lexicographic pulse kinds), which places
// the identity (decomposed as a single wait) at index 0.
class CliffordGroup {
  public:
    static constexpr int kSize = 24;

    static const CliffordGroup& instance() {
        static const CliffordGroup g;
        return g;
    }

    const std::vector<CliffordElement>& elements() const { return elems_; }
    const CliffordElement& element(int i) const { return elems_.at(static_cast<size_t>(i)); }
    const CliffordElement& identity() const { return elems_[0]; }

    // Group element whose unitary equals a.unitary * b.unitary up to phase
    // (b acts first in time).
    int compose_index(int a, int b) const { return compose_[a][b]; }
    const CliffordElement& compose(const CliffordElement& a, const CliffordElement& b) const {
        return elems_[static_cast<size_t>(compose_[a.index][b.index])];
    }

    int inverse_index(int a) const { return inverse_[a]; }
    const CliffordElement& inverse(const CliffordElement& a) const {
        return elems_[static_cast<size_t>(inverse_[a.index])];
    }

    // Net element of a gate list applied left-to-right in time.
    int net_index(const std::vector<int>& sequence) const {
        int net = 0;
        for (int g : sequence) net = compose_[g][net];
        return net;
    }

    // Final gate returning the ideal net evolution to the identity (Up) or
    // to the X element, which maps |up> to |down> (Down).
    int recovery_index(const std::vector<int>& sequence, Target target) const {
        const int net = net_index(sequence);
        const int inv = inverse_[net];
        return target == Target::Up ? inv : compose_[x_index_][inv];
    }
    const CliffordElement& recovery_gate(const std::vector<int>& sequence, Target target) const {
        return elems_[static_cast<size_t>(recovery_index(sequence, target))];
    }

    // Index of the element matching u up to global phase, or -1.
    int find(const Unitary2& u, double tol = 1e-8) const {
        for (const auto& e : elems_)
            if (phase_distance(e.unitary, u) < tol) return e.index;
        return -1;
    }

    // Element lookup by conventional rotation name ("I", "X", "-Y/2", "Z/2",
    // ...) or canonical index ("C17").
    int find_by_name(const std::string& name) const {
        for (const auto& e : elems_)
            if (e.name == name) return e.index;
        if (name == "-X") return find(Unitary2::rotation(-1, 0, 0, std::numbers::pi));
        if (name == "-Y") return find(Unitary2::rotation(0, -1, 0, std::numbers::pi));
        if (name == "-Z") return find(Unitary2::rotation(0, 0, -1, std::numbers::pi));
        if (name.size() > 1 && name[0] == 'C') {
            const int idx = std::stoi(name.substr(1));
            if (idx >= 0 && idx < kSize) return idx;
        }
        throw ConfigError("unknown Clifford element name: " + name);
    }

    const ChannelPTM& ptm(int i) const { return ptms_[static_cast<size_t>(i)]; }
    const ChannelPTM& ptm_inverse(int i) const { return inv_ptms_[static_cast<size_t>(i)]; }

    int x_element_index() const { return x_index_; }

    // Mean physical pulse count over the 24 canonical decompositions, with
    // the identity counted as its one wait pulse. This is the N_g used to
    // convert per-Clifford error rates to per-primitive-gate fidelities.
    double mean_pulse_count() const {
        size_t total = 0;
        for (const auto& e : elems_) total += e.pulses.size();
        return static_cast<double>(total) / static_cast<double>(kSize);
    }

  private:
    CliffordGroup() { build(); }

    void build() {
        constexpr double match_tol = 1e-6;
        const std::array<PulseKind, 8> generators = {
            PulseKind::PlusX,  PulseKind::MinusX,  PulseKind::PlusX2, PulseKind::MinusX2,
            PulseKind::PlusY,  PulseKind::MinusY,  PulseKind::PlusY2, PulseKind::MinusY2,
        };

        struct Candidate {
            Unitary2 u;
            std::vector<PulseKind> word;
        };
        std::vector<Candidate> found;
        found.push_back({Unitary2::identity(), {PulseKind::IdentityWait}});

        // Breadth-first closure over generator words in lexicographic order;
        // the first word reaching an element is its shortest-lex decomposition.
        std::deque<Candidate> queue;
        for (PulseKind g : generators) queue.push_back({ideal_pulse_unitary(g), {g}});
        while (!queue.empty() && found.size() < kSize) {
            Candidate c = std::move(queue.front());
            queue.pop_front();
            bool known = false;
            for (const auto& f : found)
                if (phase_distance(f.u, c.u) < match_tol) {
                    known = true;
                    break;
                }
            if (known) continue;
            found.push_back(c);
            for (PulseKind g : generators) {
                Candidate next{ideal_pulse_unitary(g) * c.u, c.word};
                next.word.push_back(g);
                queue.push_back(std::move(next));
            }
        }
        if (found.size() != kSize)
            throw InternalError("Clifford closure produced " + std::to_string(found.size()) +
                                " elements instead of 24");

        std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
            if (a.word.size() != b.word.size()) return a.word.size() < b.word.size();
            return a.word < b.word;
        });

        elems_.reserve(kSize);
        for (int i = 0; i < kSize; ++i) {
            CliffordElement e;
            e.index = i;
            e.unitary = found[static_cast<size_t>(i)].u;
            for (PulseKind k : found[static_cast<size_t>(i)].word) e.pulses.push_back(make_pulse(k));
            elems_.push_back(std::move(e));
        }

        for (auto& e : elems_) e.name = conventional_name(e.unitary, e.index);

        for (int a = 0; a < kSize; ++a) {
            const Unitary2 inv = elems_[static_cast<size_t>(a)].unitary.dagger();
            const int ia = find(inv);
            if (ia < 0) throw InternalError("Clifford table not closed under inversion");
            inverse_[a] = ia;
            for (int b = 0; b < kSize; ++b) {
                const int c = find(elems_[static_cast<size_t>(a)].unitary * elems_[static_cast<size_t>(b)].unitary);
                if (c < 0) throw InternalError("Clifford table not closed under composition");
                compose_[a][b] = c;
            }
        }

        ptms_.reserve(kSize);
        inv_ptms_.reserve(kSize);
        for (int i = 0; i < kSize; ++i) {
            ptms_.push_back(ptm_of_unitary(elems_[static_cast<size_t>(i)].unitary));
            inv_ptms_.push_back(ptm_of_unitary(elems_[static_cast<size_t>(inverse_[i])].unitary));
        }

        x_index_ = find(Unitary2::rotation(1, 0, 0, std::numbers::pi));
        if (x_index_ < 0) throw InternalError("X element missing from Clifford table");
    }

    std::string conventional_name(const Unitary2& u, int index) const {
        const double pi = std::numbers::pi;
        struct Named {
            const char* name;
            Unitary2 u;
        };
        const Named named[] = {
            {"I", Unitary2::identity()},
            {"X", Unitary2::rotation(1, 0, 0, pi)},
            {"Y", Unitary2::rotation(0, 1, 0, pi)},
            {"Z", Unitary2::rotation(0, 0, 1, pi)},
            {"X/2", Unitary2::rotation(1, 0, 0, pi / 2)},
            {"-X/2", Unitary2::rotation(-1, 0, 0, pi / 2)},
            {"Y/2", Unitary2::rotation(0, 1, 0, pi / 2)},
            {"-Y/2", Unitary2::rotation(0, -1, 0, pi / 2)},
            {"Z/2", Unitary2::rotation(0, 0, 1, pi / 2)},
            {"-Z/2", Unitary2::rotation(0, 0, -1, pi / 2)},
        };
        for (const auto& n : named)
            if (equal_up_to_phase(n.u, u, 1e-8)) return n.name;
        return "C" + std::to_string(index);
    }

    std::vector<CliffordElement> elems_;
    std::array<std::array<int, kSize>, kSize> compose_{};
    std::array<int, kSize> inverse_{};
    std::vector<ChannelPTM> ptms_;
    std::vector<ChannelPTM> inv_ptms_;
    int x_index_ = -1;
};

// Clifford-group twirl of a trace-preserving channel:
// (1/24) sum_C R(C) M R(C)^-1. The result must be depolarizing
// diag(1, p, p, p); returns p.
inline double twirl(const ChannelPTM& channel, double tol = 1e-10) {
    const auto& group = CliffordGroup::instance();
    ChannelPTM sum;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) sum.m[i][j] = 0.0;
    for (int c = 0; c < CliffordGroup::kSize; ++c)
        sum = sum + group.ptm(c) * channel * group.ptm_inverse(c);
    const ChannelPTM avg = sum.scaled(1.0 / CliffordGroup::kSize);

    if (std::abs(avg.m[0][0] - 1.0) > tol)
        throw NotDepolarizing("twirled channel is not trace preserving");
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            if (std::abs(avg.m[i][j]) > tol)
                throw NotDepolarizing("twirled channel has off-diagonal residue");
        }
    const double p = (avg.m[1][1] + avg.m[2][2] + avg.m[3][3]) / 3.0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(avg.m[i][i] - p) > tol)
            throw NotDepolarizing("twirled channel diagonal is not uniform");
    return p;
}

}  // namespace rbsim
