#pragma once

/// The effective four-level machine: two degenerate qubits whose symmetric and
/// antisymmetric collective transitions couple to independent baths with a
/// common pump rate. Provides the model builder, the rate <-> effective
/// inverse temperature maps, and the closed-form steady-state concurrence.

#include <cmath>
#include <limits>
#include <utility>

#include "concurrence.hpp"
#include "lindblad.hpp"

namespace qtm {

struct DiamondSpec {
    double omega0 = 1.0;
    double gamma_plus = 1.0;    // common absorption rate of both collective baths
    double gamma_minus_S = 1.0; // emission rate, symmetric channel
    double gamma_minus_A = 1.0; // emission rate, antisymmetric channel

    void validate() const {
        if (!(omega0 > 0.0)) throw Error("DiamondSpec: omega0 must be > 0");
        if (!(gamma_plus > 0.0)) throw Error("DiamondSpec: gamma_plus must be > 0");
        if (gamma_minus_S < 0.0 || gamma_minus_A < 0.0)
            throw Error("DiamondSpec: emission rates must be >= 0");
    }
};

/// Columns |G>, |S>, |A>, |E> over the computational basis {|00>,|01>,|10>,|11>},
/// with |S> = (|01>+|10>)/sqrt2 and |A> = (|01>-|10>)/sqrt2.
struct BellBasis {
    ComplexMatrix columns; // 4x4 unitary, column order G, S, A, E
    double omega0 = 1.0;

    explicit BellBasis(double w0 = 1.0) : omega0(w0) {
        const double s = 1.0 / std::sqrt(2.0);
        columns = ComplexMatrix::Zero(4, 4);
        columns(0, 0) = 1.0;                      // G = |00>
        columns(1, 1) = s; columns(2, 1) = s;     // S
        columns(1, 2) = s; columns(2, 2) = -s;    // A
        columns(3, 3) = 1.0;                      // E = |11>
    }

    /// Energies 0, w0, w0, 2*w0 in column order.
    RealVector energies() const {
        RealVector e(4);
        e << 0.0, omega0, omega0, 2.0 * omega0;
        return e;
    }
};

inline ComplexMatrix qubit_lowering() {
    ComplexMatrix s = ComplexMatrix::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

/// Collective lowering operators J_S = c1 + c2 and J_A = c1 - c2 built from
/// per-site tensor-product lowering operators. J_S annihilates |A>;
/// J_A annihilates |S>, maps |A> -> -sqrt2 |G| and |E> -> +sqrt2 |A>.
inline std::pair<ComplexMatrix, ComplexMatrix> collective_ops() {
    const ComplexMatrix sm = qubit_lowering();
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix c1 = kron(sm, id);
    const ComplexMatrix c2 = kron(id, sm);
    return {c1 + c2, c1 - c2};
}

/// Gamma^-_i = Gamma^+ * exp(beta_i); betas are dimensionless (units 1/omega0).
inline DiamondSpec rates_from_betas(double beta_A, double beta_S, double gamma_plus,
                                    double omega0 = 1.0) {
    if (!std::isfinite(beta_A) || !std::isfinite(beta_S))
        throw NonFiniteBetaError("rates_from_betas: betas must be finite; build the spec from rates instead");
    if (!(gamma_plus > 0.0)) throw Error("rates_from_betas: gamma_plus must be > 0");
    DiamondSpec spec;
    spec.omega0 = omega0;
    spec.gamma_plus = gamma_plus;
    spec.gamma_minus_A = gamma_plus * std::exp(beta_A);
    spec.gamma_minus_S = gamma_plus * std::exp(beta_S);
    return spec;
}

/// beta_i = ln(Gamma^-_i / Gamma^+); a zero emission rate maps to -infinity.
inline std::pair<double, double> betas_from_rates(const DiamondSpec& spec) {
    spec.validate();
    auto beta = [&](double gm) {
        if (gm == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(gm / spec.gamma_plus);
    };
    return {beta(spec.gamma_minus_A), beta(spec.gamma_minus_S)};
}

inline OpenSystem build_diamond(const DiamondSpec& spec) {
    spec.validate();
    auto [j_s, j_a] = collective_ops();
    const ComplexMatrix n1 = kron(qubit_lowering().adjoint() * qubit_lowering(),
                                  ComplexMatrix::Identity(2, 2));
    const ComplexMatrix n2 = kron(ComplexMatrix::Identity(2, 2),
                                  qubit_lowering().adjoint() * qubit_lowering());
    const ComplexMatrix h = spec.omega0 * (n1 + n2);
    std::vector<LindbladChannel> channels{
        {"S", Direction::absorption, j_s.adjoint(), spec.gamma_plus},
        {"S", Direction::emission, j_s, spec.gamma_minus_S},
        {"A", Direction::absorption, j_a.adjoint(), spec.gamma_plus},
        {"A", Direction::emission, j_a, spec.gamma_minus_A},
    };
    return OpenSystem(h, std::move(channels), BellBasis(spec.omega0).columns);
}

struct AnalyticConcurrence {
    double value = 0.0;
    bool overflow_handled = false; // evaluated through the rescaled large-beta path
};

namespace detail {

inline long double conc_quotient(long double n1, long double n2sq, long double dd) {
    const long double c = (n1 - std::sqrt(n2sq)) / dd;
    if (c <= 0.0L) return 0.0L;
    return std::min(c, 0.5L);
}

} // namespace detail

/// Closed-form steady-state concurrence of the diamond machine as a function
/// of the two effective inverse temperatures. Accepts -infinity (vanishing
/// emission rate). Values above ~700 route through a rescaled evaluation that
/// divides numerator and denominator by the dominant exponential.
inline AnalyticConcurrence analytic_concurrence_detail(double beta_A, double beta_S) {
    if (std::isnan(beta_A) || std::isnan(beta_S) ||
        beta_A == std::numeric_limits<double>::infinity() ||
        beta_S == std::numeric_limits<double>::infinity())
        throw NonFiniteBetaError("analytic_concurrence: betas must be < +infinity and not NaN");

    AnalyticConcurrence out;
    const long double ba = beta_A, bs = beta_S;
    if (std::max(beta_A, beta_S) <= 700.0) {
        // Direct evaluation; intermediates stay below exp(2800), inside long
        // double range.
        const long double xa = std::exp(ba), xs = std::exp(bs);
        const long double s = xa + xs;
        const long double a = xa - xs;
        const long double p = std::exp(ba + bs);
        const long double n1 = std::abs(a * (s / 2.0L - 1.0L));
        const long double n2sq = (s / 2.0L + 1.0L) * (2.0L * s * s + 2.0L * p * (s - 2.0L));
        const long double dd = 1.0L + s * s + s * (p + 3.0L) / 2.0L - p;
        out.value = static_cast<double>(detail::conc_quotient(n1, n2sq, dd));
        return out;
    }

    out.overflow_handled = true;
    if (std::min(beta_A, beta_S) > 700.0) {
        // Both baths deeply cold: the state is essentially |00><00| and the
        // exact value underflows double precision.
        out.value = 0.0;
        return out;
    }
    // Scale out exp(2*sigma) with sigma the larger beta.
    const long double sigma = std::max(ba, bs);
    const long double a = std::exp(ba - sigma); // one of a, b equals 1
    const long double b = std::exp(bs - sigma);
    const long double eps = std::exp(-sigma);
    const long double ab = a + b;
    const long double n1 = std::abs(a - b) * std::abs(ab / 2.0L - eps);
    const long double n2sq = (ab / 2.0L + eps) * 2.0L * (eps * (a * a + b * b) + a * b * ab);
    const long double dd = eps * eps + ab * ab - a * b + 1.5L * eps * ab +
                           0.5L * std::exp(ba + bs - sigma) * ab;
    out.value = static_cast<double>(detail::conc_quotient(n1, n2sq, dd));
    return out;
}

inline double analytic_concurrence(double beta_A, double beta_S) {
    return analytic_concurrence_detail(beta_A, beta_S).value;
}

/// Closed form in terms of the emission/absorption rate ratios
/// r_i = Gamma^-_i / Gamma^+ (r = exp(beta)); r = 0 is legal.
inline double concurrence_from_rate_ratios(double ratio_A, double ratio_S) {
    if (!(ratio_A >= 0.0) || !(ratio_S >= 0.0))
        throw Error("concurrence_from_rate_ratios: ratios must be >= 0");
    const double ba = ratio_A == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(ratio_A);
    const double bs = ratio_S == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(ratio_S);
    return analytic_concurrence(ba, bs);
}

/// Both routes to the same number: the closed form and the full pipeline
/// (steady-state solve + Wootters concurrence). They agree within 1e-8 for
/// |beta| <= 40.
inline std::pair<double, double> concurrence_vs_numeric(double beta_A, double beta_S,
                                                        double gamma_plus = 1.0) {
    if (std::abs(beta_A) > 40.0 || std::abs(beta_S) > 40.0)
        throw Error("concurrence_vs_numeric: |beta| must be <= 40");
    const double analytic = analytic_concurrence(beta_A, beta_S);
    const OpenSystem sys = build_diamond(rates_from_betas(beta_A, beta_S, gamma_plus));
    const SteadyState ss = steady_state(sys);
    const double numeric = concurrence(TwoQubitState(ss.rho));
    return {analytic, numeric};
}

} // namespace qtm
