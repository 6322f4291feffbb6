#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "qthermo/core.hpp"
#include "test_util.hpp"

using namespace qthermo;

TEST_SUITE("core") {

TEST_CASE("domain types reject invalid values") {
    CHECK_THROWS_AS(bath_temperature(0.0), std::domain_error);
    CHECK_THROWS_AS(bath_temperature(-1.0), std::domain_error);
    CHECK_THROWS_AS(bath_temperature(std::numeric_limits<double>::infinity()), std::domain_error);
    CHECK_THROWS_AS(qubit_hamiltonian(-0.5), std::domain_error);
    CHECK_NOTHROW(qubit_hamiltonian(0.0));

    // density operator invariants
    mat2 not_hermitian{{cplx(0.5), cplx(0.1, 0.1), cplx(0.3, 0.1), cplx(0.5)}};
    CHECK_THROWS_AS(density_operator{not_hermitian}, std::invalid_argument);
    CHECK_THROWS_AS(density_operator{mat2::diagonal(0.7, 0.7)}, std::invalid_argument);
    CHECK_THROWS_AS(density_operator{mat2::diagonal(1.2, -0.2)}, std::invalid_argument);
    CHECK_NOTHROW(density_operator{mat2::diagonal(0.5, 0.5)});
}

TEST_CASE("gibbs state populations match the closed form") {
    const qubit_hamiltonian h(1.0);
    const auto rho = gibbs_state(h, bath_temperature(1.0));
    CHECK(rho.excited_population() == doctest::Approx(oracle::p_gibbs_1_1).epsilon(1e-12));
    CHECK(std::abs(rho.coherence()) < 1e-15);

    // infinite-temperature symmetry
    const auto hot = gibbs_state(h, bath_temperature(1e9));
    CHECK(std::abs(hot.excited_population() - 0.5) < 1e-9);

    // zero-temperature ground state
    const auto cold = gibbs_state(h, bath_temperature(1e-6));
    CHECK(cold.excited_population() <= 1e-12);
}

TEST_CASE("gibbs state diagonalizes the hamiltonian with transverse field") {
    const qubit_hamiltonian h(1.0, 0.8);
    const auto rho = gibbs_state(h, bath_temperature(0.7));
    CHECK(max_abs_diff(commutator(rho.matrix(), h.matrix()), mat2::zero()) < 1e-14);
    // excited weight only depends on the eigen gap
    const double gap = std::hypot(1.0, 0.8);
    const auto es = eigen_hermitian(h.matrix());
    const double p = expectation(rho.matrix(), es.vectors[1]);
    CHECK(p == doctest::Approx(oracle::gibbs_excited(gap, 0.7)).epsilon(1e-12));
}

TEST_CASE("mean energy") {
    const qubit_hamiltonian h1(1.0);
    CHECK(mean_energy(density_operator::pure_ground(), h1) == doctest::Approx(0.0));
    CHECK(mean_energy(density_operator::maximally_mixed(), qubit_hamiltonian(2.0)) ==
          doctest::Approx(1.0));
    const auto rho = gibbs_state(h1, bath_temperature(1.0));
    CHECK(mean_energy(rho, h1) == doctest::Approx(oracle::p_gibbs_1_1).epsilon(1e-12));
}

TEST_CASE("von Neumann entropy: pure, mixed, thermal") {
    CHECK(von_neumann_entropy(density_operator::pure_excited()) == doctest::Approx(0.0));
    CHECK(von_neumann_entropy(density_operator::maximally_mixed()) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
    const auto rho = density_operator::from_populations(oracle::p_gibbs_1_1);
    CHECK(von_neumann_entropy(rho) == doctest::Approx(oracle::entropy_gibbs_1_1).epsilon(1e-12));
}

TEST_CASE("relative entropy: identity, thermal reference, support violation") {
    const auto gibbs = gibbs_state(qubit_hamiltonian(1.0), bath_temperature(1.0));
    CHECK(relative_entropy(gibbs, gibbs) == doctest::Approx(0.0));
    CHECK(relative_entropy(density_operator::maximally_mixed(),
                           density_operator::maximally_mixed()) == doctest::Approx(0.0));

    const double r = relative_entropy(density_operator::pure_excited(), gibbs);
    CHECK(r == doctest::Approx(oracle::relent_excited_gibbs_1_1).epsilon(1e-12));

    // rho with weight outside sigma's support -> +infinity sentinel, not a throw
    const double inf = relative_entropy(density_operator::maximally_mixed(),
                                        density_operator::pure_ground());
    CHECK(std::isinf(inf));
}

TEST_CASE("partition function") {
    CHECK(partition_function(qubit_hamiltonian(1.0), bath_temperature(1.0)) ==
          doctest::Approx(oracle::z_1_1).epsilon(1e-14));
    CHECK(partition_function(qubit_hamiltonian(0.0), bath_temperature(0.37)) ==
          doctest::Approx(2.0));
    CHECK(partition_function(qubit_hamiltonian(2.0), bath_temperature(1.0)) ==
          doctest::Approx(oracle::z_2_1).epsilon(1e-14));
}

TEST_CASE("entropy bounds and relative entropy positivity over random states") {
    std::mt19937 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const auto rho = testutil::random_state(rng);
        const double s = von_neumann_entropy(rho);
        CHECK(s >= 0.0);
        CHECK(s <= std::log(2.0) + 1e-12);

        const auto sigma = testutil::random_state(rng);
        CHECK(relative_entropy(rho, sigma) >= 0.0);
    }
}

TEST_CASE("thermal mean energy increases with temperature") {
    const qubit_hamiltonian h(1.3);
    double prev = -1.0;
    for (double t = 0.1; t < 30.0; t *= 1.6) {
        const double e = mean_energy(gibbs_state(h, bath_temperature(t)), h);
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("spectral round-trip of random states") {
    std::mt19937 rng(13);
    for (int i = 0; i < 200; ++i) {
        const auto rho = testutil::random_state(rng);
        const auto es = eigen_hermitian(rho.matrix());
        const mat2 back = es.values[0] * outer(es.vectors[0], es.vectors[0]) +
                          es.values[1] * outer(es.vectors[1], es.vectors[1]);
        CHECK(max_abs_diff(rho.matrix(), back) < 1e-12);
    }
}

}  // TEST_SUITE
