#pragma once

#include <array>
#include <cmath>

#include "rbsim/unitary.hpp"

namespace rbsim {

// Pauli transfer matrix: the action of a qubit channel on the orthonormal
// basis {I, X, Y, Z}/sqrt(2). Row/column 0 is the identity component, so a
// trace-preserving channel has first row (1, 0, 0, 0).
struct ChannelPTM {
    std::array<std::array<double, 4>, 4> m{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};

    static ChannelPTM identity() { return ChannelPTM{}; }

    static ChannelPTM depolarizing(double p) {
        ChannelPTM r;
        r.m = {{{1, 0, 0, 0}, {0, p, 0, 0}, {0, 0, p, 0}, {0, 0, 0, p}}};
        return r;
    }

    ChannelPTM operator*(const ChannelPTM& o) const {
        ChannelPTM r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = 0.0;
                for (int k = 0; k < 4; ++k) s += m[i][k] * o.m[k][j];
                r.m[i][j] = s;
            }
        return r;
    }

    ChannelPTM operator+(const ChannelPTM& o) const {
        ChannelPTM r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
        return r;
    }

    ChannelPTM scaled(double a) const {
        ChannelPTM r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r.m[i][j] = a * m[i][j];
        return r;
    }

    double trace() const { return m[0][0] + m[1][1] + m[2][2] + m[3][3]; }
};

inline bool is_trace_preserving(const ChannelPTM& c, double tol = 1e-12) {
    return std::abs(c.m[0][0] - 1.0) <= tol && std::abs(c.m[0][1]) <= tol &&
           std::abs(c.m[0][2]) <= tol && std::abs(c.m[0][3]) <= tol;
}

inline bool entries_in_range(const ChannelPTM& c, double slack = 1e-12) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (std::abs(c.m[i][j]) > 1.0 + slack) return false;
    return true;
}

// PTM of the unitary channel rho -> U rho U^dag:
// R_ij = (1/2) Tr(P_i U P_j U^dag). Insensitive to the global phase of U.
inline ChannelPTM ptm_of_unitary(const Unitary2& u) {
    const std::array<Unitary2, 4> pauli = {Unitary2::identity(), Unitary2::pauli_x(),
                                           Unitary2::pauli_y(), Unitary2::pauli_z()};
    const Unitary2 ud = u.dagger();
    ChannelPTM r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            r.m[i][j] = 0.5 * std::real((pauli[i] * u * pauli[j] * ud).trace());
    return r;
}

// Uniform average over pure states of <psi| C(|psi><psi|) |psi>. For a qubit
// this reduces to (Tr R + 2)/6 with R the full 4x4 PTM; a depolarizing
// channel gives p + (1-p)/2.
inline double avg_gate_fidelity(const ChannelPTM& c) {
    return (c.trace() + 2.0) / 6.0;
}

}  // namespace rbsim
