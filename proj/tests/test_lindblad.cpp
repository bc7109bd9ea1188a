#include <catch2/catch_amalgamated.hpp>

#include "qtm/diamond.hpp"
#include "qtm/lindblad.hpp"
#include "test_helpers.hpp"

using namespace qtm;
using namespace qtm_test;

namespace {

ComplexMatrix lowering2() {
    ComplexMatrix s = ComplexMatrix::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

OpenSystem decay_qubit(double gamma, double omega = 0.0) {
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(1, 1) = omega;
    return OpenSystem(h, {{"bath", Direction::emission, lowering2(), gamma}});
}

} // namespace

TEST_CASE("dissipator") {
    SECTION("lowering operator on the excited state") {
        ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
        rho(1, 1) = 1.0;
        const ComplexMatrix d = dissipator(lowering2(), rho);
        ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
        expected(0, 0) = 2.0;
        expected(1, 1) = -2.0;
        REQUIRE((d - expected).norm() < 1e-14);
    }
    SECTION("zero state maps to zero") {
        std::mt19937_64 eng(21);
        const ComplexMatrix o = random_matrix(3, 3, eng);
        REQUIRE(dissipator(o, ComplexMatrix::Zero(3, 3)).norm() == 0.0);
    }
    SECTION("traceless on random inputs") {
        std::mt19937_64 eng(22);
        for (int rep = 0; rep < 20; ++rep) {
            const ComplexMatrix o = random_matrix(4, 4, eng);
            const ComplexMatrix rho = random_density(4, eng);
            REQUIRE(std::abs(dissipator(o, rho).trace()) < 1e-12);
        }
    }
    SECTION("dimension mismatch") {
        REQUIRE_THROWS_AS(dissipator(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(3, 3)),
                          DimensionError);
    }
}

TEST_CASE("apply_liouvillian") {
    SECTION("free system with no channels is zero") {
        const OpenSystem sys(ComplexMatrix::Zero(2, 2), {});
        std::mt19937_64 eng(23);
        REQUIRE(apply_liouvillian(sys, random_density(2, eng)).norm() == 0.0);
    }
    SECTION("decay channel drains the excited state at the channel rate") {
        const double gamma = 0.37;
        const OpenSystem sys = decay_qubit(gamma);
        ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
        rho(1, 1) = 1.0;
        const ComplexMatrix l = apply_liouvillian(sys, rho);
        REQUIRE(l(1, 1).real() == Catch::Approx(-gamma));
        REQUIRE(l(0, 0).real() == Catch::Approx(gamma));
    }
    SECTION("traceless and Hermiticity-preserving on random states") {
        const OpenSystem sys = build_diamond(rates_from_betas(-1.0, 2.0, 1.0));
        std::mt19937_64 eng(24);
        for (int rep = 0; rep < 10; ++rep) {
            const ComplexMatrix rho = random_hermitian(4, eng);
            const ComplexMatrix l = apply_liouvillian(sys, rho);
            REQUIRE(std::abs(l.trace()) < 1e-12);
            REQUIRE((l - ComplexMatrix(l.adjoint())).norm() < 1e-12);
        }
    }
}

TEST_CASE("superoperator") {
    SECTION("qubit decay: hand-expanded entries") {
        const double gamma = 0.8;
        const OpenSystem sys = decay_qubit(gamma);
        const ComplexMatrix f = superoperator(sys);
        ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
        expected(0, 3) = gamma;        // feeds |0><0| from |1><1|
        expected(1, 1) = -0.5 * gamma; // coherence decay
        expected(2, 2) = -0.5 * gamma;
        expected(3, 3) = -gamma;
        REQUIRE((f - expected).norm() < 1e-14);
    }
    SECTION("oracle equivalence with apply_liouvillian") {
        std::mt19937_64 eng(25);
        const OpenSystem diamond = build_diamond(rates_from_betas(-2.0, 3.0, 1.0));
        const ComplexMatrix f = superoperator(diamond);
        for (int rep = 0; rep < 20; ++rep) {
            const ComplexMatrix rho = random_hermitian(4, eng);
            const ComplexVector lhs = f * vec_rowmajor(rho);
            const ComplexVector rhs = vec_rowmajor(apply_liouvillian(diamond, rho));
            REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    SECTION("column sums over trace indices vanish") {
        const OpenSystem sys = build_diamond(rates_from_betas(0.5, -1.5, 2.0));
        const ComplexMatrix f = superoperator(sys);
        const Index d = sys.dimension;
        for (Index c = 0; c < d * d; ++c) {
            Complex sum = 0.0;
            for (Index i = 0; i < d; ++i) sum += f(i * d + i, c);
            REQUIRE(std::abs(sum) < 1e-12);
        }
    }
}

TEST_CASE("steady_state") {
    SECTION("pure decay relaxes to the ground state") {
        const SteadyState ss = steady_state(decay_qubit(0.5, 1.0));
        ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
        expected(0, 0) = 1.0;
        REQUIRE((ss.rho - expected).norm() < 1e-12);
    }
    SECTION("pump and decay balance") {
        const double gp = 0.7, gm = 1.9;
        ComplexMatrix h = ComplexMatrix::Zero(2, 2);
        h(1, 1) = 1.0;
        const OpenSystem sys(h, {{"bath", Direction::absorption, dagger(lowering2()), gp},
                                 {"bath", Direction::emission, lowering2(), gm}});
        const SteadyState ss = steady_state(sys);
        REQUIRE(ss.rho(0, 0).real() == Catch::Approx(gm / (gp + gm)).epsilon(1e-12));
        REQUIRE(ss.rho(1, 1).real() == Catch::Approx(gp / (gp + gm)).epsilon(1e-12));
    }
    SECTION("diamond at equal infinite temperatures is maximally mixed") {
        const SteadyState ss = steady_state(build_diamond(rates_from_betas(0.0, 0.0, 1.0)));
        REQUIRE((ss.rho - 0.25 * ComplexMatrix::Identity(4, 4)).norm() < 1e-10);
    }
    SECTION("state invariants and residual bound") {
        const OpenSystem sys = build_diamond(rates_from_betas(-2.0, 3.0, 1.3));
        const SteadyState ss = steady_state(sys);
        REQUIRE(std::abs(ss.rho.trace() - Complex(1, 0)) < 1e-10);
        REQUIRE((ss.rho - ComplexMatrix(ss.rho.adjoint())).norm() < 1e-10);
        REQUIRE(eig_hermitian(ss.rho).real_eigenvalues().minCoeff() > -1e-9);
        REQUIRE(ss.residual < 1e-9 * sys.max_rate());
        REQUIRE(apply_liouvillian(sys, ss.rho).norm() < 1e-9 * sys.max_rate());
    }
    SECTION("degenerate stationary manifold is detected") {
        // decay on qubit 1 only: any state of qubit 2 is stationary
        const ComplexMatrix c1 = kron(lowering2(), ComplexMatrix::Identity(2, 2));
        const OpenSystem sys(ComplexMatrix::Zero(4, 4),
                             {{"bath", Direction::emission, c1, 1.0}});
        REQUIRE_THROWS_AS(steady_state(sys), Error); // singular or degenerate, both detect it
    }
    SECTION("validation of the model description") {
        std::mt19937_64 eng(26);
        REQUIRE_THROWS_AS(OpenSystem(random_matrix(2, 2, eng), {}), HermiticityError);
        REQUIRE_THROWS_AS(
            OpenSystem(ComplexMatrix::Zero(2, 2),
                       {{"b", Direction::emission, ComplexMatrix::Zero(3, 3), 1.0}}),
            DimensionError);
        REQUIRE_THROWS_AS(OpenSystem(ComplexMatrix::Zero(2, 2),
                                     {{"b", Direction::emission, lowering2(), -1.0}}),
                          Error);
    }
}
