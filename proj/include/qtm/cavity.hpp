#pragma once

/// Full cavity QED realization: two incoherently pumped qubits coupled to a
/// lossy single-mode cavity (two-emitter Tavis-Cummings), optional pure
/// dephasing, symmetric detuning and incoherent cavity pumping, Fock-space
/// truncation with a concurrence-based convergence ladder, and the adiabatic
/// elimination map onto the effective diamond machine.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "concurrence.hpp"
#include "diamond.hpp"
#include "lindblad.hpp"

namespace qtm {

struct CavitySpec {
    double omega0 = 1.0;  // qubit energy, unit of the problem
    double omega_cav = std::numeric_limits<double>::quiet_NaN(); // NaN = resonance
    double g = 1e-3;      // qubit-cavity coupling
    double kappa = 1e-2;  // cavity emission rate
    double p = 0.0;       // incoherent pump rate per qubit
    double gamma = 0.0;   // qubit relaxation rate
    double gamma_z = 0.0; // pure dephasing rate per qubit
    double delta = 0.0;   // symmetric detuning: w1 = w0 + delta, w2 = w0 - delta
    double p_c = 0.0;     // incoherent cavity pump rate
    Index n_max = 5;      // Fock truncation

    double cavity_energy() const { return std::isnan(omega_cav) ? omega0 : omega_cav; }
    /// Rotating-wave validity; the models of interest sit at g/omega0 = 1e-3.
    bool rwa_ok() const { return g / omega0 <= 0.01; }

    void validate() const {
        if (!(omega0 > 0.0)) throw Error("CavitySpec: omega0 must be > 0");
        if (g < 0.0) throw Error("CavitySpec: g must be >= 0");
        if (!(kappa > 0.0)) throw Error("CavitySpec: kappa must be > 0");
        if (p < 0.0 || gamma < 0.0 || gamma_z < 0.0 || p_c < 0.0)
            throw Error("CavitySpec: rates must be >= 0");
        if (n_max < 1) throw Error("CavitySpec: n_max must be >= 1");
    }
};

struct MappedEffectiveParams {
    double gamma_plus = 0.0;    // p / 2
    double gamma_minus_A = 0.0; // gamma / 2
    double gamma_minus_S = 0.0; // 4 g^2 / kappa + gamma / 2
    double beta_A = 0.0;        // ln(gamma / p), -inf at gamma = 0
    double beta_S = 0.0;        // ln((gamma + 8 g^2/kappa) / p)
    bool adiabatic_valid = true; // kappa/g > 1
};

namespace detail {

inline ComplexMatrix fock_lowering(Index levels) {
    ComplexMatrix a = ComplexMatrix::Zero(levels, levels);
    for (Index n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

struct CavityOps {
    ComplexMatrix c1, c2, a, sz1, sz2;
};

/// Tensor order: qubit 1 x qubit 2 x cavity.
inline CavityOps cavity_ops(Index n_max) {
    const Index nc = n_max + 1;
    const ComplexMatrix sm = qubit_lowering();
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix ic = ComplexMatrix::Identity(nc, nc);
    ComplexMatrix sz = ComplexMatrix::Zero(2, 2);
    sz(0, 0) = 1.0;
    sz(1, 1) = -1.0;
    CavityOps ops;
    ops.c1 = kron(kron(sm, i2), ic);
    ops.c2 = kron(kron(i2, sm), ic);
    ops.a = kron(kron(i2, i2), fock_lowering(nc));
    ops.sz1 = kron(kron(sz, i2), ic);
    ops.sz2 = kron(kron(i2, sz), ic);
    return ops;
}

} // namespace detail

/// H = sum_i (w0 +- delta) c_i^dag c_i + w_cav a^dag a + g sum_i (c_i^dag a + c_i a^dag),
/// with pump/relaxation channels per qubit, cavity loss, and the optional
/// extra noise terms. The dephasing channel uses jump sigma_z_i at rate
/// gamma_z, which under the (rate/2) D convention generates exactly
/// gamma_z (sigma_z rho sigma_z - rho).
inline OpenSystem build_tavis_cummings(const CavitySpec& spec) {
    spec.validate();
    const auto ops = detail::cavity_ops(spec.n_max);
    const double w1 = spec.omega0 + spec.delta;
    const double w2 = spec.omega0 - spec.delta;
    ComplexMatrix h = w1 * (ops.c1.adjoint() * ops.c1) + w2 * (ops.c2.adjoint() * ops.c2) +
                      spec.cavity_energy() * (ops.a.adjoint() * ops.a);
    if (spec.g != 0.0)
        h += spec.g * (ops.c1.adjoint() * ops.a + ops.c1 * ops.a.adjoint() +
                       ops.c2.adjoint() * ops.a + ops.c2 * ops.a.adjoint());

    std::vector<LindbladChannel> channels;
    auto add = [&](const std::string& label, Direction dir, const ComplexMatrix& jump,
                   double rate) {
        if (rate > 0.0) channels.push_back({label, dir, jump, rate});
    };
    add("pump-1", Direction::absorption, ops.c1.adjoint(), spec.p);
    add("pump-2", Direction::absorption, ops.c2.adjoint(), spec.p);
    add("relax-1", Direction::emission, ops.c1, spec.gamma);
    add("relax-2", Direction::emission, ops.c2, spec.gamma);
    add("cavity", Direction::emission, ops.a, spec.kappa);
    add("dephase-1", Direction::neutral, ops.sz1, spec.gamma_z);
    add("dephase-2", Direction::neutral, ops.sz2, spec.gamma_z);
    add("cavity-pump", Direction::absorption, ops.a.adjoint(), spec.p_c);
    return OpenSystem(std::move(h), std::move(channels));
}

/// Effective rates after adiabatic elimination of the cavity: each qubit is
/// further relaxed through the symmetric channel at Gamma = 4 g^2 / kappa.
/// Betas require p > 0; use adiabatic_rates() when only rates are needed.
inline MappedEffectiveParams adiabatic_rates(const CavitySpec& spec) {
    spec.validate();
    const double big_gamma = 4.0 * spec.g * spec.g / spec.kappa;
    MappedEffectiveParams m;
    m.gamma_plus = 0.5 * spec.p;
    m.gamma_minus_A = 0.5 * spec.gamma;
    m.gamma_minus_S = big_gamma + 0.5 * spec.gamma;
    m.adiabatic_valid = spec.kappa > spec.g;
    m.beta_A = std::numeric_limits<double>::quiet_NaN();
    m.beta_S = std::numeric_limits<double>::quiet_NaN();
    return m;
}

inline MappedEffectiveParams adiabatic_map(const CavitySpec& spec) {
    MappedEffectiveParams m = adiabatic_rates(spec);
    if (!(spec.p > 0.0))
        throw MapUndefinedError("adiabatic_map: betas require p > 0 (see adiabatic_rates)");
    const double big_gamma = m.gamma_minus_S - 0.5 * spec.gamma;
    m.beta_A = spec.gamma == 0.0 ? -std::numeric_limits<double>::infinity()
                                 : std::log(spec.gamma / spec.p);
    m.beta_S = std::log((spec.gamma + 2.0 * big_gamma) / spec.p);
    return m;
}

/// Reduced two-qubit state after tracing out the cavity mode.
inline TwoQubitState qubits_reduced_state(const ComplexMatrix& rho_full, Index n_max) {
    const Index d = 4 * (n_max + 1);
    if (rho_full.rows() != d || rho_full.cols() != d)
        throw DimensionError("qubits_reduced_state: dimension does not match 4*(n_max+1)");
    ComplexMatrix red = partial_trace(rho_full, {2, 2, n_max + 1}, {0, 1});
    red = 0.5 * (red + ComplexMatrix(red.adjoint()));
    red /= red.trace();
    return TwoQubitState(std::move(red));
}

struct ConvergedSteadyState {
    SteadyState state;
    Index n_used = 0;
    double concurrence_value = 0.0;
};

/// Solve at n_max = 2, 4, 6, ... until the reduced-state concurrence moves by
/// less than c_tol between consecutive rungs; capped at 15.
inline ConvergedSteadyState converged_steady_state(CavitySpec spec, double c_tol = 1e-4) {
    if (!(c_tol > 0.0)) throw Error("converged_steady_state: c_tol must be > 0");
    constexpr Index rungs[] = {2, 4, 6, 8, 10, 12, 14, 15};
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (Index n : rungs) {
        spec.n_max = n;
        SteadyState ss = steady_state(build_tavis_cummings(spec));
        const double c = concurrence(qubits_reduced_state(ss.rho, n));
        if (!std::isnan(prev) && std::abs(c - prev) < c_tol)
            return {std::move(ss), n, c};
        if (n == 15)
            throw NoConvergenceError(
                "converged_steady_state: not converged at the n_max = 15 cap; C(15) = " +
                std::to_string(c) + ", C(14) = " + std::to_string(prev));
        prev = c;
    }
    throw NoConvergenceError("converged_steady_state: empty rung ladder");
}

} // namespace qtm
