// Exact closed-form layer: Gibbs states, partition functions, energies and
// entropy functionals of the working qubit. Everything analytic; serves as
// the equilibrium reference for the dynamics and cycle layers.

#pragma once

#include <cmath>
#include <limits>

#include "state.hpp"

namespace qthermo {

// Z = Tr exp(-H/T). Reduces to 1 + exp(-omega/T) for a diagonal Hamiltonian.
inline double partition_function(const qubit_hamiltonian& h, const bath_temperature& t) {
    const auto ev = eigenvalues_hermitian(h.matrix());
    return std::exp(-ev[0] / t.value()) + std::exp(-ev[1] / t.value());
}

// exp(-H/T)/Z, computed in the eigenbasis with the spectrum shifted by the
// ground energy so that low temperatures underflow gracefully instead of
// overflowing.
inline density_operator gibbs_state(const qubit_hamiltonian& h, const bath_temperature& t) {
    const eigensystem2 es = eigen_hermitian(h.matrix());
    const double w1 = std::exp(-(es.values[1] - es.values[0]) / t.value());
    const double z = 1.0 + w1;
    mat2 m = (1.0 / z) * outer(es.vectors[0], es.vectors[0]) +
             (w1 / z) * outer(es.vectors[1], es.vectors[1]);
    return density_operator(m);
}

inline double mean_energy(const density_operator& rho, const qubit_hamiltonian& h) {
    return std::real(trace(rho.matrix() * h.matrix()));
}

namespace detail {
// Eigenvalues in [-1e-12, 0) are rounding residue and clamped to 0 before
// logs; the density_operator invariant already rejected anything below that.
inline double clip_probability(double p) { return std::min(1.0, std::max(0.0, p)); }

inline double xlnx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
}  // namespace detail

// S(rho) = -Tr[rho ln rho] in nats; lies in [0, ln 2] for a qubit.
inline double von_neumann_entropy(const density_operator& rho) {
    const auto ev = rho.eigenvalues();
    return -detail::xlnx(detail::clip_probability(ev[0])) -
           detail::xlnx(detail::clip_probability(ev[1]));
}

// S(rho || sigma) = Tr[rho (ln rho - ln sigma)] in nats. Returns +infinity
// when rho has weight outside the support of sigma.
inline double relative_entropy(const density_operator& rho, const density_operator& sigma) {
    constexpr double support_tol = 1e-12;
    double s = 0.0;
    for (double lambda : rho.eigenvalues()) s += detail::xlnx(detail::clip_probability(lambda));

    const eigensystem2 es = eigen_hermitian(sigma.matrix());
    for (int k = 0; k < 2; ++k) {
        const double mu = detail::clip_probability(es.values[k]);
        const double weight = std::max(0.0, expectation(rho.matrix(), es.vectors[k]));
        if (mu <= support_tol) {
            if (weight > support_tol) return std::numeric_limits<double>::infinity();
            continue;  // 0 * ln 0
        }
        s -= weight * std::log(mu);
    }
    // rounding residue near rho == sigma
    if (s < 0.0 && s > -1e-12) return 0.0;
    return s;
}

}  // namespace qthermo
