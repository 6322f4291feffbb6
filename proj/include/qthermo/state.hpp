// Validated value types for the working qubit: density operators,
// Hamiltonians and bath temperatures. hbar = k_B = 1 throughout; the energy
// zero sits at the ground level, so a bare qubit has spectrum {0, omega}.

#pragma once

#include <array>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "matrix2.hpp"

namespace qthermo {

class qubit_hamiltonian {
public:
    explicit qubit_hamiltonian(double gap, double transverse = 0.0)
        : gap_(gap), transverse_(transverse) {
        if (!std::isfinite(gap) || gap < 0.0)
            throw std::domain_error("qubit_hamiltonian: gap must be finite and >= 0, got " +
                                    std::to_string(gap));
        if (!std::isfinite(transverse))
            throw std::domain_error("qubit_hamiltonian: transverse field must be finite");
    }

    double gap() const { return gap_; }
    double transverse() const { return transverse_; }
    bool diagonal() const { return transverse_ == 0.0; }

    // omega |e><e| + (delta/2)(|g><e| + |e><g|)
    mat2 matrix() const {
        return mat2{{cplx(0.0), cplx(0.5 * transverse_), cplx(0.5 * transverse_), cplx(gap_)}};
    }

    // energy splitting between the two eigenlevels
    double eigen_gap() const { return std::hypot(gap_, transverse_); }

private:
    double gap_;
    double transverse_;
};

class bath_temperature {
public:
    explicit bath_temperature(double value) : value_(value) {
        if (!std::isfinite(value) || value <= 0.0)
            throw std::domain_error("bath_temperature: must be finite and > 0, got " +
                                    std::to_string(value));
    }
    double value() const { return value_; }

private:
    double value_;
};

// Hermitian, unit-trace, positive semidefinite 2x2 state. Construction
// validates all three invariants; `tol` exists so the integrators can accept
// their own (looser) accuracy band while user-facing construction stays at
// the default.
class density_operator {
public:
    static constexpr double default_tol = 1e-12;

    explicit density_operator(const mat2& m, double tol = default_tol) : m_(m) {
        validate(m_, tol);
    }

    static density_operator from_populations(double p_excited) {
        if (!std::isfinite(p_excited) || p_excited < -default_tol || p_excited > 1.0 + default_tol)
            throw std::domain_error("density_operator: excited population outside [0,1]");
        const double p = std::min(1.0, std::max(0.0, p_excited));
        return density_operator(mat2::diagonal(1.0 - p, p));
    }

    static density_operator pure_ground() { return from_populations(0.0); }
    static density_operator pure_excited() { return from_populations(1.0); }
    static density_operator maximally_mixed() { return from_populations(0.5); }

    const mat2& matrix() const { return m_; }
    double ground_population() const { return std::real(m_(0, 0)); }
    double excited_population() const { return std::real(m_(1, 1)); }
    cplx coherence() const { return m_(0, 1); }  // <g| rho |e>
    std::array<double, 2> eigenvalues() const { return eigenvalues_hermitian(m_); }

    static void validate(const mat2& m, double tol) {
        const double herm = hermiticity_defect(m);
        if (!(herm <= tol))
            throw std::invalid_argument("density_operator: not Hermitian (defect " +
                                        std::to_string(herm) + ")");
        const double tr_err = std::abs(trace(m) - cplx(1.0));
        if (!(tr_err <= tol))
            throw std::invalid_argument("density_operator: trace differs from 1 by " +
                                        std::to_string(tr_err));
        const double lambda_min = eigenvalues_hermitian(m)[0];
        if (!(lambda_min >= -tol))
            throw std::invalid_argument("density_operator: negative eigenvalue " +
                                        std::to_string(lambda_min));
    }

private:
    mat2 m_;
};

inline double trace_distance(const density_operator& a, const density_operator& b) {
    return trace_distance(a.matrix(), b.matrix());
}

}  // namespace qthermo
