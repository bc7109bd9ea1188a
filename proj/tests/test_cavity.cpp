#include <catch2/catch_amalgamated.hpp>

#include "qtm/cavity.hpp"
#include "qtm/diamond.hpp"
#include "test_helpers.hpp"

using namespace qtm;
using namespace qtm_test;

namespace {

CavitySpec fig2_spec(double kappa_over_g, double p_over_g, double gamma_over_g,
                     Index n_max = 5) {
    CavitySpec spec;
    spec.omega0 = 1.0;
    spec.g = 1e-3;
    spec.kappa = kappa_over_g * spec.g;
    spec.p = p_over_g * spec.g;
    spec.gamma = gamma_over_g * spec.g;
    spec.n_max = n_max;
    return spec;
}

double effective_concurrence(const CavitySpec& spec) {
    const MappedEffectiveParams m = adiabatic_rates(spec);
    return concurrence_from_rate_ratios(m.gamma_minus_A / m.gamma_plus,
                                        m.gamma_minus_S / m.gamma_plus);
}

} // namespace

TEST_CASE("tavis-cummings construction") {
    SECTION("dimension and trace preservation") {
        CavitySpec spec = fig2_spec(10.0, 2e-4, 0.0, 2);
        const OpenSystem sys = build_tavis_cummings(spec);
        REQUIRE(sys.dimension == 4 * (2 + 1));
        std::mt19937_64 eng(61);
        for (int rep = 0; rep < 5; ++rep) {
            const ComplexMatrix rho = random_density(sys.dimension, eng);
            REQUIRE(std::abs(apply_liouvillian(sys, rho).trace()) < 1e-12);
        }
    }
    SECTION("superoperator oracle equivalence at n_max = 1") {
        CavitySpec spec = fig2_spec(5.0, 1e-3, 1e-3, 1);
        spec.gamma_z = 2e-4 * spec.g;
        spec.p_c = 1e-4 * spec.g;
        spec.delta = 1e-4;
        const OpenSystem sys = build_tavis_cummings(spec);
        const ComplexMatrix f = superoperator(sys);
        std::mt19937_64 eng(62);
        for (int rep = 0; rep < 5; ++rep) {
            const ComplexMatrix rho = random_hermitian(sys.dimension, eng);
            const ComplexVector lhs = f * vec_rowmajor(rho);
            const ComplexVector rhs = vec_rowmajor(apply_liouvillian(sys, rho));
            REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SECTION("no coupling, no pump: relaxes to both qubits down, cavity empty") {
        CavitySpec spec;
        spec.g = 0.0;
        spec.kappa = 1e-2;
        spec.gamma = 1e-3;
        spec.p = 0.0;
        spec.n_max = 2;
        const SteadyState ss = steady_state(build_tavis_cummings(spec));
        REQUIRE(ss.rho(0, 0).real() == Catch::Approx(1.0).margin(1e-10));
    }
    SECTION("dephasing channel generates gamma_z (sz rho sz - rho)") {
        CavitySpec spec = fig2_spec(5.0, 0.0, 0.0, 1);
        spec.gamma_z = 3e-4;
        const OpenSystem sys = build_tavis_cummings(spec);
        ComplexMatrix sz;
        double rate = 0.0;
        for (const auto& c : sys.channels)
            if (c.label == "dephase-1") {
                sz = c.jump;
                rate = c.rate;
            }
        REQUIRE(rate == Catch::Approx(spec.gamma_z));
        std::mt19937_64 eng(63);
        const ComplexMatrix rho = random_density(sys.dimension, eng);
        const ComplexMatrix term = 0.5 * rate * dissipator(sz, rho);
        const ComplexMatrix direct = spec.gamma_z * (sz * rho * sz - rho);
        REQUIRE((term - direct).norm() < 1e-14);
    }
    SECTION("spec validation") {
        CavitySpec bad = fig2_spec(5.0, 1e-3, 0.0);
        bad.kappa = 0.0;
        REQUIRE_THROWS_AS(build_tavis_cummings(bad), Error);
        CavitySpec strong = fig2_spec(5.0, 1e-3, 0.0);
        strong.g = 0.1; // outside the weak-coupling regime
        REQUIRE_FALSE(strong.rwa_ok());
        REQUIRE(fig2_spec(5.0, 1e-3, 0.0).rwa_ok());
    }
}

TEST_CASE("adiabatic elimination map") {
    SECTION("rate arithmetic") {
        CavitySpec spec = fig2_spec(2.0, 5e-3, 1e-3);
        const MappedEffectiveParams m = adiabatic_map(spec);
        REQUIRE(m.gamma_plus == Catch::Approx(0.5 * spec.p));
        REQUIRE(m.gamma_minus_A == Catch::Approx(0.5 * spec.gamma));
        // kappa = 2g gives Gamma = 4g^2/kappa = 2g
        REQUIRE(m.gamma_minus_S == Catch::Approx(2.0 * spec.g + 0.5 * spec.gamma));
        REQUIRE(m.adiabatic_valid);
        // p/gamma = 5 puts the dark-state bath at negative effective temperature
        REQUIRE(m.beta_A == Catch::Approx(-std::log(5.0)));
        REQUIRE(m.beta_A < 0.0);
        REQUIRE(m.beta_S > m.beta_A);
    }
    SECTION("gamma = 0 maps to the minus-infinity sentinel") {
        const MappedEffectiveParams m = adiabatic_map(fig2_spec(10.0, 2e-4, 0.0));
        REQUIRE(m.beta_A == -std::numeric_limits<double>::infinity());
        REQUIRE(std::isfinite(m.beta_S));
    }
    SECTION("p = 0: betas undefined, rates still available") {
        const CavitySpec spec = fig2_spec(10.0, 0.0, 1e-3);
        REQUIRE_THROWS_AS(adiabatic_map(spec), MapUndefinedError);
        const MappedEffectiveParams m = adiabatic_rates(spec);
        REQUIRE(m.gamma_minus_S > 0.0);
    }
    SECTION("outside kappa/g > 1 the map carries an invalid flag") {
        REQUIRE_FALSE(adiabatic_map(fig2_spec(0.5, 1e-3, 0.0)).adiabatic_valid);
    }
    SECTION("round trip through the diamond beta map") {
        const MappedEffectiveParams m = adiabatic_map(fig2_spec(2.0, 5e-3, 1e-3));
        DiamondSpec d;
        d.gamma_plus = m.gamma_plus;
        d.gamma_minus_A = m.gamma_minus_A;
        d.gamma_minus_S = m.gamma_minus_S;
        const auto [ba, bs] = betas_from_rates(d);
        REQUIRE(ba == Catch::Approx(m.beta_A).margin(1e-12));
        REQUIRE(bs == Catch::Approx(m.beta_S).margin(1e-12));
    }
}

TEST_CASE("reduced two-qubit state") {
    SECTION("product with the cavity vacuum returns the qubit state") {
        std::mt19937_64 eng(64);
        const ComplexMatrix qubits = random_density(4, eng);
        ComplexMatrix vac = ComplexMatrix::Zero(3, 3);
        vac(0, 0) = 1.0;
        const TwoQubitState red = qubits_reduced_state(kron(qubits, vac), 2);
        REQUIRE((red.rho - qubits).norm() < 1e-12);
    }
    SECTION("steady state reduces to a valid state with unit trace") {
        const CavitySpec spec = fig2_spec(10.0, 2e-4, 0.0, 4);
        const SteadyState ss = steady_state(build_tavis_cummings(spec));
        const TwoQubitState red = qubits_reduced_state(ss.rho, 4);
        REQUIRE(std::abs(red.rho.trace() - Complex(1, 0)) < 1e-12);
    }
    SECTION("dimension mismatch") {
        REQUIRE_THROWS_AS(qubits_reduced_state(ComplexMatrix::Identity(12, 12), 5),
                          DimensionError);
    }
}

TEST_CASE("full model vs mapped effective model") {
    SECTION("subradiant point at n_max = 5 agrees within 0.02") {
        const CavitySpec spec = fig2_spec(10.0, 2e-4, 0.0, 5);
        const SteadyState ss = steady_state(build_tavis_cummings(spec));
        const double c_full = concurrence(qubits_reduced_state(ss.rho, 5));
        const double c_eff = effective_concurrence(spec);
        REQUIRE(c_eff > 0.45); // deep subradiant regime approaches 1/2
        REQUIRE(std::abs(c_full - c_eff) < 0.02);
    }
    SECTION("agreement across the adiabatic window") {
        for (double kog : {3.0, 30.0}) {
            const CavitySpec spec = fig2_spec(kog, 2e-4, 0.0);
            const ConvergedSteadyState conv = converged_steady_state(spec, 1e-4);
            REQUIRE(std::abs(conv.concurrence_value - effective_concurrence(spec)) < 0.02);
        }
    }
    SECTION("elimination breaks down below kappa/g = 1") {
        const CavitySpec spec = fig2_spec(0.05, 2e-4, 0.0);
        const ConvergedSteadyState conv = converged_steady_state(spec, 1e-4);
        REQUIRE(conv.concurrence_value < effective_concurrence(spec) - 0.05);
    }
}

TEST_CASE("fock-space convergence ladder") {
    SECTION("weak pump converges by n_max = 4") {
        const ConvergedSteadyState conv =
            converged_steady_state(fig2_spec(10.0, 2e-4, 0.0), 1e-4);
        REQUIRE(conv.n_used <= 4);
    }
    SECTION("stronger pump climbs higher but stays within the cap") {
        const ConvergedSteadyState conv =
            converged_steady_state(fig2_spec(2.0, 5e-3, 1e-3), 1e-4);
        REQUIRE(conv.n_used <= 15);
        SECTION("converged value is stable at the cap") {
            CavitySpec at_cap = fig2_spec(2.0, 5e-3, 1e-3, 15);
            const SteadyState ss = steady_state(build_tavis_cummings(at_cap));
            const double c15 = concurrence(qubits_reduced_state(ss.rho, 15));
            REQUIRE(std::abs(c15 - conv.concurrence_value) < 1e-4);
        }
    }
    SECTION("invalid tolerance") {
        REQUIRE_THROWS_AS(converged_steady_state(fig2_spec(10.0, 2e-4, 0.0), 0.0), Error);
    }
}

TEST_CASE("subradiant window and beyond-thermal onset") {
    SECTION("concurrence dies at both kappa extremes") {
        // the low edge sits between kappa/g = 0.02 (separable) and 0.05
        // (residual C ~ 0.08); both extremes are far below the window peak
        const ConvergedSteadyState low =
            converged_steady_state(fig2_spec(0.02, 5e-3, 1e-3), 1e-4);
        REQUIRE(low.concurrence_value == 0.0);
        const ConvergedSteadyState low_edge =
            converged_steady_state(fig2_spec(0.05, 5e-3, 1e-3), 1e-4);
        REQUIRE(low_edge.concurrence_value < 0.1);
        const ConvergedSteadyState huge =
            converged_steady_state(fig2_spec(1000.0, 5e-3, 1e-3), 1e-4);
        REQUIRE(huge.concurrence_value < 0.05);
        const ConvergedSteadyState mid =
            converged_steady_state(fig2_spec(2.0, 5e-3, 1e-3), 1e-4);
        REQUIRE(mid.concurrence_value > 1.0 / 3.0);
    }
    SECTION("thermal bound crossed only when the pump beats the relaxation") {
        const ConvergedSteadyState below =
            converged_steady_state(fig2_spec(2.0, 5e-4, 1e-3), 1e-4);
        REQUIRE(below.concurrence_value <= 1.0 / 3.0);
        const ConvergedSteadyState above =
            converged_steady_state(fig2_spec(2.0, 5e-3, 1e-3), 1e-4);
        REQUIRE(above.concurrence_value > 1.0 / 3.0);
    }
}

TEST_CASE("robustness to added noise at the operating point") {
    const CavitySpec base = fig2_spec(2.0, 5e-3, 1e-3);
    const double c_base = converged_steady_state(base, 1e-4).concurrence_value;
    REQUIRE(c_base > 1.0 / 3.0);

    SECTION("pure dephasing degrades but does not destroy the entanglement") {
        CavitySpec noisy = base;
        noisy.gamma_z = base.p; // dephasing as strong as the pump
        const double c = converged_steady_state(noisy, 1e-4).concurrence_value;
        REQUIRE(c < c_base);
        REQUIRE(c > 0.1 * c_base);
    }
    SECTION("symmetric detuning degrades monotonically at sampled points") {
        CavitySpec d1 = base, d2 = base;
        d1.delta = 0.1 * base.g;
        d2.delta = 0.5 * base.g;
        const double c1 = converged_steady_state(d1, 1e-4).concurrence_value;
        const double c2 = converged_steady_state(d2, 1e-4).concurrence_value;
        REQUIRE(c1 <= c_base + 1e-6);
        REQUIRE(c2 <= c1 + 1e-6);
    }
    SECTION("cavity pumping degrades the dark-state population") {
        CavitySpec noisy = base;
        noisy.p_c = 0.05 * base.g;
        const double c = converged_steady_state(noisy, 1e-4).concurrence_value;
        REQUIRE(c < c_base + 1e-6);
    }
}
