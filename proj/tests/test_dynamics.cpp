#include <cmath>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "qthermo/accounting.hpp"
#include "qthermo/core.hpp"
#include "qthermo/dynamics.hpp"
#include "test_util.hpp"

using namespace qthermo;

namespace {

mat2 oracle_matrix(const std::array<oracle::cplx, 4>& a) {
    return mat2{{a[0], a[1], a[2], a[3]}};
}

bath_spec make_bath(double t, double gamma0) { return bath_spec(bath_temperature(t), gamma0); }

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("trajectory requires strictly increasing times") {
    trajectory t;
    t.append(0.0, density_operator::pure_ground(), qubit_hamiltonian(1.0));
    CHECK_THROWS_AS(t.append(0.0, density_operator::pure_ground(), qubit_hamiltonian(1.0)),
                    std::invalid_argument);
}

TEST_CASE("concatenate joins segments and keeps times strictly increasing") {
    trajectory a, b;
    a.append(0.0, density_operator::pure_ground(), qubit_hamiltonian(1.0));
    a.append(1.0, density_operator::pure_ground(), qubit_hamiltonian(2.0));
    // b starts with a's final state: the duplicate junction sample is dropped
    b.append(0.0, density_operator::pure_ground(), qubit_hamiltonian(2.0));
    b.append(1.0, density_operator::pure_excited(), qubit_hamiltonian(2.0));
    const auto joined = concatenate(a, b);
    CHECK(joined.size() == 3);
    CHECK(joined.back().time == doctest::Approx(2.0));

    // distinct junction states are both kept
    trajectory c;
    c.append(0.0, density_operator::maximally_mixed(), qubit_hamiltonian(2.0));
    c.append(0.5, density_operator::pure_excited(), qubit_hamiltonian(2.0));
    const auto joined2 = concatenate(a, c);
    CHECK(joined2.size() == 4);
    for (std::size_t i = 1; i < joined2.size(); ++i) {
        CHECK(joined2[i].time > joined2[i - 1].time);
    }
}

TEST_CASE("bath and drive validation") {
    CHECK_THROWS_AS(bath_spec(bath_temperature(1.0), 0.0), std::domain_error);
    CHECK_THROWS_AS(bath_spec(bath_temperature(1.0), -1.0), std::domain_error);
    const auto one = [](double) { return 1.0; };
    const auto zero = [](double) { return 0.0; };
    CHECK_THROWS_AS(drive_schedule(one, zero, 0.0, 0.1), std::domain_error);
    CHECK_THROWS_AS(drive_schedule(one, zero, 1.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(drive_schedule(one, zero, 1.0, 0.0), std::domain_error);
    // a negative gap surfaces as soon as the schedule is sampled there
    drive_schedule bad([](double t) { return 0.5 - t; }, zero, 1.0, 0.1);
    CHECK_THROWS_AS(bad.at(0.9), std::domain_error);
}

TEST_CASE("unitary evolution under a constant hamiltonian keeps eigenbasis populations") {
    const qubit_hamiltonian h(1.0, 0.6);
    const auto es = eigen_hermitian(h.matrix());
    // state diagonal in the H eigenbasis
    const mat2 m = 0.3 * outer(es.vectors[0], es.vectors[0]) +
                   0.7 * outer(es.vectors[1], es.vectors[1]);
    const density_operator rho0(m);
    const auto traj = unitary_propagate(rho0, drive_schedule::constant(h, 2.0, 1e-3));
    for (const auto& s : traj) {
        CHECK(expectation(s.state.matrix(), es.vectors[1]) == doctest::Approx(0.7).epsilon(1e-9));
    }
}

TEST_CASE("commuting drive leaves diagonal populations untouched") {
    const auto rho0 = density_operator::from_populations(0.25);
    drive_schedule drive([](double t) { return 1.0 + 0.5 * std::sin(3.0 * t); },
                         [](double) { return 0.0; }, 1.5, 1e-3);
    const auto traj = unitary_propagate(rho0, drive);
    for (const auto& s : traj) {
        CHECK(s.state.excited_population() == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("rabi pi pulse inverts the ground state") {
    const double t_f = 1.0;
    drive_schedule pulse([](double) { return 0.0; }, [t_f](double) { return M_PI / t_f; }, t_f,
                         1e-3);
    const auto traj = unitary_propagate(density_operator::pure_ground(), pulse);
    CHECK(traj.back().state.excited_population() == doctest::Approx(1.0).epsilon(1e-6));

    // against the closed-form propagator
    const auto u = oracle_matrix(oracle::su2_propagator(0.0, M_PI / t_f, t_f));
    const mat2 expected = u * density_operator::pure_ground().matrix() * adjoint(u);
    CHECK(max_abs_diff(traj.back().state.matrix(), expected) < 1e-9);
}

TEST_CASE("unitary propagation conserves spectrum, trace and entropy") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.2, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho0 = testutil::random_state(rng);
        const double w0 = u(rng), w1 = u(rng), d0 = u(rng);
        drive_schedule drive(
            [w0, w1](double t) { return w0 + (w1 - w0) * std::sin(t) * std::sin(t); },
            [d0](double t) { return d0 * std::cos(2.0 * t); }, 1.0, 5e-4);
        const auto traj = unitary_propagate(rho0, drive);

        const auto ev0 = rho0.eigenvalues();
        const double s0 = von_neumann_entropy(rho0);
        for (const auto& s : traj) {
            const auto ev = s.state.eigenvalues();
            CHECK(std::abs(ev[0] - ev0[0]) < 1e-9);
            CHECK(std::abs(ev[1] - ev0[1]) < 1e-9);
            CHECK(std::abs(std::real(trace(s.state.matrix())) - 1.0) < 1e-10);
            CHECK(std::abs(std::imag(trace(s.state.matrix()))) < 1e-10);
            CHECK(ev[0] >= -1e-10);
        }
        CHECK(std::abs(von_neumann_entropy(traj.back().state) - s0) < 1e-9);
    }
}

TEST_CASE("too coarse a step raises an integrator error") {
    drive_schedule wild([](double) { return 0.0; }, [](double) { return 8.0; }, 10.0, 2.5);
    CHECK_THROWS_AS(unitary_propagate(density_operator::pure_ground(), wild), integrator_error);
}

TEST_CASE("drive propagator matches the closed-form exponential") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double w = u(rng), d = u(rng), t_f = u(rng);
        drive_schedule drive([w](double) { return w; }, [d](double) { return d; }, t_f, 2e-4);
        const mat2 got = drive_propagator(drive);
        const mat2 expected = oracle_matrix(oracle::su2_propagator(w, d, t_f));
        CHECK(max_abs_diff(got, expected) < 1e-10);
        CHECK(unitarity_defect(got) < 1e-12);
    }
}

TEST_CASE("gibbs state is the fixed point of thermalization") {
    const qubit_hamiltonian h(1.0);
    const auto bath = make_bath(1.0, 1.0);
    const auto rho_eq = gibbs_state(h, bath.temperature);
    const auto traj = thermalize(rho_eq, h, bath, 2.0, 0.02);
    for (const auto& s : traj) {
        CHECK(max_abs_diff(s.state.matrix(), rho_eq.matrix()) < 1e-10);
    }
}

TEST_CASE("full thermalization reaches the gibbs population") {
    const qubit_hamiltonian h(1.0);
    const auto bath = make_bath(1.0, 1.0);
    const double gamma = oracle::gamma_total(1.0, 1.0, 1.0);
    const double duration = 40.0 / gamma;
    const auto traj = thermalize(density_operator::pure_excited(), h, bath, duration, 0.02);
    CHECK(traj.back().state.excited_population() ==
          doctest::Approx(oracle::p_gibbs_1_1).epsilon(1e-9));
}

TEST_CASE("relaxation follows the closed-form exponential") {
    const qubit_hamiltonian h(1.0);
    const auto bath = make_bath(1.0, 1.0);
    const double gamma = oracle::gamma_total(1.0, 1.0, 1.0);
    CHECK(gamma == doctest::Approx(oracle::gamma_total_1_1).epsilon(1e-14));

    const double t_one_tau = 1.0 / gamma;
    const auto traj =
        thermalize(density_operator::pure_ground(), h, bath, t_one_tau, t_one_tau / 64.0);
    CHECK(traj.back().state.excited_population() ==
          doctest::Approx(oracle::relax_one_tau_from_zero).epsilon(1e-6));

    const auto exact =
        thermalize(density_operator::pure_ground(), h, bath, t_one_tau, t_one_tau / 4.0,
                   integration::closed_form);
    CHECK(exact.back().state.excited_population() ==
          doctest::Approx(oracle::relax_one_tau_from_zero).epsilon(1e-12));
}

TEST_CASE("rk4 and closed form agree including coherences") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(0.3, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho0 = testutil::random_state(rng);
        const qubit_hamiltonian h(u(rng));
        const auto bath = make_bath(u(rng), u(rng));
        const double gamma = detail::rates_for(h, bath).total();
        const double duration = 2.0 / gamma;
        // resolve both the dissipative rate and the coherence rotation
        const double dt = 0.01 / std::max(gamma, h.eigen_gap());
        const auto rk4 = thermalize(rho0, h, bath, duration, dt);
        const auto exact = thermalize(rho0, h, bath, duration, dt, integration::closed_form);
        CHECK(max_abs_diff(rk4.back().state.matrix(), exact.back().state.matrix()) < 1e-8);
    }
}

TEST_CASE("thermalize rejects oversized steps and vanishing gaps") {
    const qubit_hamiltonian h(1.0);
    const auto bath = make_bath(1.0, 1.0);
    CHECK_THROWS_AS(thermalize(density_operator::pure_excited(), h, bath, 1.0, 0.5),
                    integrator_error);
    CHECK_THROWS_AS(
        thermalize(density_operator::pure_excited(), qubit_hamiltonian(0.0), bath, 1.0, 0.01),
        std::domain_error);
}

TEST_CASE("relative entropy to the fixed point is non-increasing (Spohn)") {
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> u(0.3, 2.5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho0 = testutil::random_state(rng);
        const qubit_hamiltonian h(u(rng));
        const auto bath = make_bath(u(rng), 1.0);
        const double gamma = detail::rates_for(h, bath).total();
        const auto traj = thermalize(rho0, h, bath, 5.0 / gamma, 0.05 / gamma);
        const auto target = gibbs_state(h, bath.temperature);

        double prev = relative_entropy(traj[0].state, target);
        for (std::size_t i = 1; i < traj.size(); ++i) {
            const double cur = relative_entropy(traj[i].state, target);
            CHECK(cur <= prev + 1e-10);
            prev = cur;
        }
    }
}

TEST_CASE("thermalization preserves trace and positivity along the path") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.3, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho0 = testutil::random_state(rng);
        const qubit_hamiltonian h(u(rng));
        const auto bath = make_bath(u(rng), u(rng));
        const double gamma = detail::rates_for(h, bath).total();
        const auto traj = thermalize(rho0, h, bath, 3.0 / gamma, 0.05 / gamma);
        for (const auto& s : traj) {
            CHECK(std::abs(std::real(trace(s.state.matrix())) - 1.0) < 1e-10);
            CHECK(s.state.eigenvalues()[0] >= -1e-10);
        }
    }
}

TEST_CASE("rk4 is fourth order against the closed-form relaxation") {
    const qubit_hamiltonian h(1.0);
    const auto bath = make_bath(1.0, 1.0);
    const auto rho0 = density_operator::from_populations(0.9);
    const double duration = 1.0;
    const double p_eq = oracle::gibbs_excited(1.0, 1.0);
    const double expected =
        oracle::relaxed_population(0.9, p_eq, oracle::gamma_total_1_1, duration);

    double prev_err = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double dt = 0.032 / (1 << k);
        const auto traj = thermalize(rho0, h, bath, duration, dt);
        const double err = std::abs(traj.back().state.excited_population() - expected);
        if (k > 0) CHECK(prev_err / err >= 8.0);
        prev_err = err;
    }
}

TEST_CASE("null isotherm has no work, heat or entropy production") {
    const auto traj =
        quasistatic_isotherm(qubit_hamiltonian(1.0), qubit_hamiltonian(1.0), bath_temperature(2.0), 5);
    CHECK(std::abs(integrate_work(traj)) < 1e-15);
    CHECK(std::abs(integrate_heat(traj)) < 1e-15);
    CHECK(std::abs(entropy_production(traj, bath_temperature(2.0))) < 1e-15);
}

TEST_CASE("isotherm entropy production shrinks under refinement") {
    const qubit_hamiltonian from(2.0), to(1.5);
    const bath_temperature t(2.0);
    const double s1 = entropy_production(quasistatic_isotherm(from, to, t, 1), t);
    const double s2 = entropy_production(quasistatic_isotherm(from, to, t, 2), t);
    CHECK(s2 < s1);
    CHECK(s2 > 0.0);
}

TEST_CASE("isotherm heat converges to T dS at first order in 1/n") {
    const qubit_hamiltonian from(2.0), to(1.5);
    const bath_temperature t(2.0);
    const double t_ds = 2.0 * (oracle::binary_entropy(oracle::gibbs_excited(1.5, 2.0)) -
                               oracle::binary_entropy(oracle::gibbs_excited(2.0, 2.0)));

    double prev_err = 0.0;
    for (int n : {10, 20, 40, 80}) {
        const auto traj = quasistatic_isotherm(from, to, t, n);
        const double err = std::abs(integrate_heat(traj) - t_ds);
        if (prev_err > 0.0) {
            const double ratio = prev_err / err;
            CHECK(ratio > 1.6);
            CHECK(ratio < 2.4);
        }
        prev_err = err;
    }
}

TEST_CASE("isotherm states sit on the gibbs curve after every step") {
    const qubit_hamiltonian from(2.0), to(1.5);
    const bath_temperature t(2.0);
    const auto traj = quasistatic_isotherm(from, to, t, 8);
    for (std::size_t i = 2; i < traj.size(); i += 2) {
        const auto target = gibbs_state(traj[i].hamiltonian, t);
        CHECK(max_abs_diff(traj[i].state.matrix(), target.matrix()) < 1e-14);
    }
}

TEST_CASE("isotherm input validation") {
    CHECK_THROWS_AS(quasistatic_isotherm(qubit_hamiltonian(1.0), qubit_hamiltonian(2.0),
                                         bath_temperature(1.0), 0),
                    std::domain_error);
    CHECK_THROWS_AS(quasistatic_isotherm(qubit_hamiltonian(1.0, 0.5), qubit_hamiltonian(2.0),
                                         bath_temperature(1.0), 4),
                    std::domain_error);
}

}  // TEST_SUITE
