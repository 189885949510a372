#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace rbsim {

using complexd = std::complex<double>;

// 2x2 complex matrix with value semantics. Used for single-qubit unitaries;
// nothing here enforces unitarity, see is_unitary() for the check.
struct Unitary2 {
    // Row-major entries: m[0]=U00, m[1]=U01, m[2]=U10, m[3]=U11.
    std::array<complexd, 4> m{complexd(1, 0), complexd(0, 0), complexd(0, 0), complexd(1, 0)};

    static Unitary2 identity() { return Unitary2{}; }

    static Unitary2 pauli_x() { return Unitary2{{complexd(0, 0), complexd(1, 0), complexd(1, 0), complexd(0, 0)}}; }
    static Unitary2 pauli_y() { return Unitary2{{complexd(0, 0), complexd(0, -1), complexd(0, 1), complexd(0, 0)}}; }
    static Unitary2 pauli_z() { return Unitary2{{complexd(1, 0), complexd(0, 0), complexd(0, 0), complexd(-1, 0)}}; }

    // exp(-i (theta/2) n.sigma) for a unit axis (nx, ny, nz).
    static Unitary2 rotation(double nx, double ny, double nz, double theta) {
        const double c = std::cos(theta / 2.0);
        const double s = std::sin(theta / 2.0);
        return Unitary2{{complexd(c, -s * nz), complexd(-s * ny, -s * nx),
                         complexd(s * ny, -s * nx), complexd(c, s * nz)}};
    }

    complexd operator()(int r, int c) const { return m[2 * r + c]; }

    Unitary2 operator*(const Unitary2& o) const {
        return Unitary2{{m[0] * o.m[0] + m[1] * o.m[2], m[0] * o.m[1] + m[1] * o.m[3],
                         m[2] * o.m[0] + m[3] * o.m[2], m[2] * o.m[1] + m[3] * o.m[3]}};
    }

    Unitary2 dagger() const {
        return Unitary2{{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
    }

    complexd trace() const { return m[0] + m[3]; }
    complexd det() const { return m[0] * m[3] - m[1] * m[2]; }
};

// Largest absolute entry of A - B.
inline double max_abs_diff(const Unitary2& a, const Unitary2& b) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a.m[i] - b.m[i]));
    return d;
}

inline bool is_unitary(const Unitary2& u, double tol = 1e-12) {
    if (max_abs_diff(u * u.dagger(), Unitary2::identity()) > tol) return false;
    return std::abs(std::abs(u.det()) - 1.0) <= tol;
}

// Distance to equality up to a global phase: 2 - |Tr(A^dag B)|, which is 0
// iff A = e^{i phi} B for unitaries.
inline double phase_distance(const Unitary2& a, const Unitary2& b) {
    return 2.0 - std::abs((a.dagger() * b).trace());
}

inline bool equal_up_to_phase(const Unitary2& a, const Unitary2& b, double tol = 1e-10) {
    return phase_distance(a, b) < tol;
}

}  // namespace rbsim
