#pragma once

/// Wootters concurrence for two-qubit density matrices, plus the closed form
/// valid for states whose only coherence sits in the |01><10| block.
/// Basis order is fixed project-wide to {|00>, |01>, |10>, |11>}.

#include <algorithm>
#include <array>
#include <cmath>

#include "linalg.hpp"

namespace qtm {

struct TwoQubitState {
    ComplexMatrix rho;

    explicit TwoQubitState(ComplexMatrix r) : rho(std::move(r)) {
        if (rho.rows() != 4 || rho.cols() != 4)
            throw DimensionError("TwoQubitState: matrix is not 4x4");
        if (!is_hermitian(rho))
            throw HermiticityError("TwoQubitState: not Hermitian within 1e-10");
        if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-10)
            throw Error("TwoQubitState: trace differs from 1 beyond 1e-10");
        const Spectrum sp = eig_hermitian(rho);
        if (sp.real_eigenvalues().minCoeff() < -1e-9)
            throw NumericalPSDError("TwoQubitState: negative eigenvalue beyond 1e-9");
    }
};

inline const ComplexMatrix& sigma_y_sigma_y() {
    static const ComplexMatrix yy = [] {
        ComplexMatrix m = ComplexMatrix::Zero(4, 4);
        m(0, 3) = -1.0;
        m(1, 2) = 1.0;
        m(2, 1) = 1.0;
        m(3, 0) = -1.0;
        return m;
    }();
    return yy;
}

/// rho_tilde = (sigma_y x sigma_y) rho^* (sigma_y x sigma_y)
inline ComplexMatrix spin_flip(const TwoQubitState& state) {
    const ComplexMatrix& yy = sigma_y_sigma_y();
    return yy * state.rho.conjugate() * yy;
}

/// max{0, l1 - l2 - l3 - l4} with l_i the descending square roots of the
/// eigenvalues of rho * rho_tilde.
inline double concurrence(const TwoQubitState& state) {
    const ComplexMatrix m = state.rho * spin_flip(state);
    const Spectrum sp = eig_general(m);
    std::array<double, 4> lambda{};
    for (Index i = 0; i < 4; ++i) {
        const Complex ev = sp.eigenvalues(i);
        if (ev.real() < -1e-8 || std::abs(ev.imag()) > 1e-8)
            throw NumericalPSDError("concurrence: eigenvalue of rho*rho_tilde not real non-negative");
        lambda[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, ev.real()));
    }
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    const double c = lambda[0] - lambda[1] - lambda[2] - lambda[3];
    return std::clamp(c, 0.0, 1.0);
}

/// Fast path for the steady-state pattern: diagonal plus the inner coherence
/// rho_c = <01|rho|10>. Equals concurrence() on such states.
inline double concurrence_x(const TwoQubitState& state) {
    const ComplexMatrix& r = state.rho;
    const double tol = 1e-10;
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) {
            if (i == j) continue;
            if ((i == 1 && j == 2) || (i == 2 && j == 1)) continue;
            if (std::abs(r(i, j)) > tol)
                throw NotXStateError("concurrence_x: off-pattern entry above 1e-10");
        }
    const double rho00 = r(0, 0).real();
    const double rho11 = r(3, 3).real();
    const double rho_c = std::abs(r(1, 2));
    return 2.0 * std::max(0.0, rho_c - std::sqrt(std::max(0.0, rho00 * rho11)));
}

} // namespace qtm
