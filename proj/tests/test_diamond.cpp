#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qtm/concurrence.hpp"
#include "qtm/diamond.hpp"
#include "test_helpers.hpp"

using namespace qtm;
using namespace qtm_test;

namespace {

// App-style asymptotic limit of the closed form for beta_A -> -infinity:
// C = (e^{2b}/2 - e^b - e^b sqrt(e^b + 2)) / (1 + e^{2b} + 1.5 e^b)
double deep_negative_asymptote(double beta_s) {
    const double x = std::exp(beta_s);
    return (0.5 * x * x - x - x * std::sqrt(x + 2.0)) / (1.0 + x * x + 1.5 * x);
}

ComplexVector bell_column(int which) { // 0:G 1:S 2:A 3:E
    return BellBasis().columns.col(which);
}

} // namespace

TEST_CASE("collective operators") {
    auto [j_s, j_a] = collective_ops();
    const double r2 = std::sqrt(2.0);

    REQUIRE((j_s * bell_column(2)).norm() < 1e-15);               // J_S |A> = 0
    REQUIRE((j_a * bell_column(1)).norm() < 1e-15);               // J_A |S> = 0
    REQUIRE((j_s * bell_column(1) - r2 * bell_column(0)).norm() < 1e-15);
    REQUIRE((j_s * bell_column(3) - r2 * bell_column(1)).norm() < 1e-15);
    // direct expansion: J_A (|01> - |10>)/sqrt2 = -sqrt2 |00>, J_A |11> = +sqrt2 |A>
    REQUIRE((j_a * bell_column(2) + r2 * bell_column(0)).norm() < 1e-15);
    REQUIRE((j_a * bell_column(3) - r2 * bell_column(2)).norm() < 1e-15);

    SECTION("J_S^dag J_S + J_A^dag J_A = 2 (n1 + n2)") {
        const ComplexMatrix sm = qubit_lowering();
        const ComplexMatrix n1 = kron(sm.adjoint() * sm, ComplexMatrix::Identity(2, 2));
        const ComplexMatrix n2 = kron(ComplexMatrix::Identity(2, 2), sm.adjoint() * sm);
        const ComplexMatrix lhs = j_s.adjoint() * j_s + j_a.adjoint() * j_a;
        REQUIRE((lhs - 2.0 * (n1 + n2)).norm() < 1e-14);
    }
}

TEST_CASE("rate / effective-temperature maps") {
    SECTION("reference values") {
        const DiamondSpec s1 = rates_from_betas(0.0, 0.0, 1.0);
        REQUIRE(s1.gamma_minus_A == Catch::Approx(1.0));
        REQUIRE(s1.gamma_minus_S == Catch::Approx(1.0));

        const DiamondSpec s2 = rates_from_betas(0.0, std::log(2.0), 1.0);
        REQUIRE(s2.gamma_minus_S == Catch::Approx(2.0));

        const DiamondSpec s3 = rates_from_betas(-std::log(3.0), 0.0, 3.0);
        REQUIRE(s3.gamma_minus_A == Catch::Approx(1.0));
        REQUIRE(s3.gamma_plus > s3.gamma_minus_A); // population-inversion regime
    }
    SECTION("round trip") {
        std::mt19937_64 eng(41);
        std::uniform_real_distribution<double> u(-6.0, 6.0);
        for (int rep = 0; rep < 20; ++rep) {
            const double ba = u(eng), bs = u(eng);
            const auto [ba2, bs2] = betas_from_rates(rates_from_betas(ba, bs, 1.7));
            REQUIRE(std::abs(ba2 - ba) < 1e-12);
            REQUIRE(std::abs(bs2 - bs) < 1e-12);
        }
    }
    SECTION("sentinels and errors") {
        DiamondSpec dark;
        dark.gamma_plus = 1.0;
        dark.gamma_minus_A = 0.0;
        dark.gamma_minus_S = 2.0;
        const auto [ba, bs] = betas_from_rates(dark);
        REQUIRE(ba == -std::numeric_limits<double>::infinity());
        REQUIRE(bs == Catch::Approx(std::log(2.0)));
        REQUIRE_THROWS_AS(rates_from_betas(std::numeric_limits<double>::infinity(), 0.0, 1.0),
                          NonFiniteBetaError);
    }
}

TEST_CASE("diamond steady state structure") {
    SECTION("equal infinite temperatures give the maximally mixed state") {
        const SteadyState ss = steady_state(build_diamond(rates_from_betas(0.0, 0.0, 1.0)));
        REQUIRE((ss.rho - 0.25 * ComplexMatrix::Identity(4, 4)).norm() < 1e-10);
    }
    SECTION("zero pattern: diagonal plus the |01><10| coherence only") {
        const SteadyState ss = steady_state(build_diamond(rates_from_betas(-2.0, 3.0, 1.0)));
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 4; ++j) {
                if (i == j || (i == 1 && j == 2) || (i == 2 && j == 1)) continue;
                REQUIRE(std::abs(ss.rho(i, j)) < 1e-12);
            }
        REQUIRE(std::abs(ss.rho(1, 2)) > 1e-3); // genuinely nonzero coherence
    }
    SECTION("dark antisymmetric channel accumulates population") {
        DiamondSpec spec;
        spec.gamma_plus = 1.0;
        spec.gamma_minus_A = 0.0;
        spec.gamma_minus_S = 20.0;
        const SteadyState ss = steady_state(build_diamond(spec));
        const ComplexMatrix b = BellBasis().columns;
        const RealVector pops = (b.adjoint() * ss.rho * b).diagonal().real();
        REQUIRE(pops(2) > pops(1)); // A above S
        REQUIRE(pops(2) > pops(3)); // A above E
        // with Gamma^-_A exactly zero, pump-only balance pins p_A to p_G
        REQUIRE(std::abs(pops(2) - pops(0)) < 1e-10);
    }
}

TEST_CASE("analytic concurrence limits") {
    SECTION("equal betas are exactly separable") {
        for (double b : {-10.0, -3.0, -0.5, 0.0, 0.7, 4.0, 10.0})
            REQUIRE(analytic_concurrence(b, b) == 0.0);
    }
    SECTION("thermal limit 1/3") {
        REQUIRE(std::abs(analytic_concurrence(0.0, 30.0) - 1.0 / 3.0) < 1e-6);
        REQUIRE(std::abs(analytic_concurrence(30.0, 0.0) - 1.0 / 3.0) < 1e-6);
    }
    SECTION("negative-temperature maximum approaches 1/2") {
        const double c = analytic_concurrence(-40.0, 10.0);
        REQUIRE(c > 0.49);
        REQUIRE(c < 0.5);
        REQUIRE(std::abs(c - deep_negative_asymptote(10.0)) < 1e-6);
        REQUIRE(analytic_concurrence(-40.0, 25.0) > 0.4999);
    }
    SECTION("deep negative corner follows the asymptotic expression") {
        REQUIRE(std::abs(analytic_concurrence(-20.0, 5.0) - deep_negative_asymptote(5.0)) < 1e-6);
        REQUIRE(std::abs(analytic_concurrence(-30.0, 8.0) - deep_negative_asymptote(8.0)) < 1e-6);
    }
    SECTION("both baths inverted: separable") {
        for (double ba : {-5.0, -8.0, -20.0})
            for (double bs : {-5.0, -12.0, -30.0})
                REQUIRE(analytic_concurrence(ba, bs) == 0.0);
    }
    SECTION("thermal quadrant never beats 1/3") {
        double worst = 0.0;
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j)
                worst = std::max(worst,
                                 analytic_concurrence(20.0 * i / 49.0, 20.0 * j / 49.0));
        REQUIRE(worst <= 1.0 / 3.0 + 1e-9);
    }
    SECTION("global bound 1/2") {
        std::mt19937_64 eng(42);
        std::uniform_real_distribution<double> u(-50.0, 50.0);
        for (int rep = 0; rep < 500; ++rep)
            REQUIRE(analytic_concurrence(u(eng), u(eng)) <= 0.5 + 1e-12);
    }
    SECTION("exact symmetry under bath exchange") {
        std::mt19937_64 eng(43);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        for (int rep = 0; rep < 20; ++rep) {
            const double ba = u(eng), bs = u(eng);
            REQUIRE(analytic_concurrence(ba, bs) == analytic_concurrence(bs, ba));
        }
    }
}

TEST_CASE("analytic concurrence large-beta evaluation") {
    SECTION("rescaled path is continuous with the direct one") {
        const double below = analytic_concurrence(-40.0, 699.0);
        const double above = analytic_concurrence(-40.0, 701.0);
        REQUIRE(analytic_concurrence_detail(-40.0, 699.0).overflow_handled == false);
        REQUIRE(analytic_concurrence_detail(-40.0, 701.0).overflow_handled == true);
        REQUIRE(std::abs(below - above) < 1e-9);
        REQUIRE(above == Catch::Approx(0.5).margin(1e-9));
    }
    SECTION("deep positive pairs are separable to working precision") {
        REQUIRE(analytic_concurrence(800.0, 900.0) == 0.0); // true value below denormal range
        REQUIRE(analytic_concurrence_detail(800.0, 900.0).overflow_handled);
        REQUIRE(analytic_concurrence(600.0, 720.0) <= 1e-200);
    }
    SECTION("minus-infinity beta is a legal rate-ratio zero") {
        const double inf = std::numeric_limits<double>::infinity();
        REQUIRE(analytic_concurrence(-inf, 10.0) ==
                Catch::Approx(concurrence_from_rate_ratios(0.0, std::exp(10.0))).margin(1e-15));
        REQUIRE(analytic_concurrence(-inf, -inf) == 0.0);
        REQUIRE_THROWS_AS(analytic_concurrence(inf, 1.0), NonFiniteBetaError);
        REQUIRE_THROWS_AS(analytic_concurrence(std::nan(""), 1.0), NonFiniteBetaError);
    }
}

TEST_CASE("closed form vs full pipeline") {
    SECTION("reference pairs") {
        const auto [a0, n0] = concurrence_vs_numeric(0.0, 0.0);
        REQUIRE(a0 == 0.0);
        REQUIRE(n0 == Catch::Approx(0.0).margin(1e-10));

        const auto [a1, n1] = concurrence_vs_numeric(0.0, 4.0);
        REQUIRE(std::abs(a1 - n1) < 1e-8);
        REQUIRE(a1 > 0.18); // nontrivial point

        // evaluating the closed form at (-3, 2) gives 0: the beyond-thermal
        // region needs a larger beta_S at fixed negative beta_A
        const auto [a2, n2] = concurrence_vs_numeric(-3.0, 2.0);
        REQUIRE(std::abs(a2 - n2) < 1e-8);
        REQUIRE(a2 == 0.0);

        const auto [a3, n3] = concurrence_vs_numeric(-15.0, 6.0);
        REQUIRE(std::abs(a3 - n3) < 1e-7);
        REQUIRE(a3 > 1.0 / 3.0); // genuinely beyond the thermal bound
    }
    SECTION("random oracle equivalence on [-4, 4]^2") {
        std::mt19937_64 eng(44);
        std::uniform_real_distribution<double> u(-4.0, 4.0);
        for (int rep = 0; rep < 100; ++rep) {
            const auto [a, n] = concurrence_vs_numeric(u(eng), u(eng));
            REQUIRE(std::abs(a - n) < 1e-8);
        }
    }
    SECTION("x-pattern closed form agrees on the solved state") {
        const SteadyState ss = steady_state(build_diamond(rates_from_betas(-2.0, 3.0, 1.0)));
        const TwoQubitState state(ss.rho);
        REQUIRE(std::abs(concurrence_x(state) - concurrence(state)) < 1e-10);
    }
    SECTION("out-of-range betas rejected") {
        REQUIRE_THROWS_AS(concurrence_vs_numeric(-45.0, 2.0), Error);
    }
}
