// Two-point-measurement work statistics for a driven qubit, by exact
// enumeration over the (at most four) measurement outcome pairs. From a
// thermal initial state and any unitary drive the Jarzynski equality
// <exp(-beta W)> = exp(-beta dF) holds identically, so the check below is a
// consistency gate on the implementation, not a statistical test.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "core.hpp"
#include "errors.hpp"
#include "state.hpp"

namespace qthermo {

struct tpm_protocol {
    double beta;  // inverse temperature of the preparation
    qubit_hamiltonian h_initial;
    qubit_hamiltonian h_final;
    mat2 propagator;  // unitary evolution between the two measurements

    tpm_protocol(double b, qubit_hamiltonian hi, qubit_hamiltonian hf, mat2 u)
        : beta(b), h_initial(hi), h_final(hf), propagator(u) {
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw std::domain_error("tpm_protocol: beta must be finite and > 0");
        const double defect = unitarity_defect(propagator);
        if (defect > 1e-12)
            throw std::domain_error("tpm_protocol: propagator not unitary (defect " +
                                    std::to_string(defect) + ")");
    }

    static tpm_protocol sudden_quench(double beta, double omega_initial, double omega_final) {
        return tpm_protocol(beta, qubit_hamiltonian(omega_initial),
                            qubit_hamiltonian(omega_final), mat2::identity());
    }
};

// Finite list of (work value, probability); outcomes with coinciding work
// values are merged, so the list is <= 4 entries, sorted by work value.
struct work_distribution {
    struct outcome {
        double work;
        double probability;
    };
    std::vector<outcome> outcomes;

    double total_probability() const {
        double s = 0.0;
        for (const auto& o : outcomes) s += o.probability;
        return s;
    }
    double mean_work() const {
        double s = 0.0;
        for (const auto& o : outcomes) s += o.work * o.probability;
        return s;
    }
};

// p_{mn} = [exp(-beta E_n)/Z] |<m'|U|n>|^2, w_{mn} = E'_m - E_n. Outcomes
// whose probability is rounding residue (<= 1e-15, forbidden transitions)
// are dropped.
inline work_distribution tpm_distribution(const tpm_protocol& p) {
    const eigensystem2 initial = eigen_hermitian(p.h_initial.matrix());
    const eigensystem2 final_ = eigen_hermitian(p.h_final.matrix());

    const double z = std::exp(-p.beta * initial.values[0]) + std::exp(-p.beta * initial.values[1]);

    std::vector<work_distribution::outcome> raw;
    raw.reserve(4);
    for (int n = 0; n < 2; ++n) {
        const double weight = std::exp(-p.beta * initial.values[n]) / z;
        const vec2 evolved = mat_vec(p.propagator, initial.vectors[n]);
        for (int m = 0; m < 2; ++m) {
            const double transition = std::norm(inner(final_.vectors[m], evolved));
            raw.push_back({final_.values[m] - initial.values[n], weight * transition});
        }
    }
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) { return a.work < b.work; });

    work_distribution dist;
    for (const auto& o : raw) {
        if (o.probability <= 1e-15) continue;
        if (!dist.outcomes.empty() && std::abs(o.work - dist.outcomes.back().work) <= 1e-12)
            dist.outcomes.back().probability += o.probability;
        else
            dist.outcomes.push_back(o);
    }
    return dist;
}

inline double jarzynski_average(const work_distribution& d, double beta) {
    double s = 0.0;
    for (const auto& o : d.outcomes) s += o.probability * std::exp(-beta * o.work);
    return s;
}

// dF = -(1/beta) ln(Z_final / Z_initial)
inline double free_energy_difference(const qubit_hamiltonian& h_initial,
                                     const qubit_hamiltonian& h_final, double beta) {
    if (!(beta > 0.0)) throw std::domain_error("free_energy_difference: beta must be > 0");
    const bath_temperature t(1.0 / beta);
    return -std::log(partition_function(h_final, t) / partition_function(h_initial, t)) / beta;
}

struct jarzynski_result {
    double lhs;               // <exp(-beta W)>
    double rhs;               // exp(-beta dF)
    double gap;               // |lhs - rhs|
    double mean_work;
    double second_law_slack;  // <W> - dF, >= 0 by Jensen
};

// The equality is exact here, so a gap above 1e-8 can only be a bug.
inline jarzynski_result jarzynski_check(const tpm_protocol& p) {
    const work_distribution d = tpm_distribution(p);
    jarzynski_result r{};
    r.lhs = jarzynski_average(d, p.beta);
    const double df = free_energy_difference(p.h_initial, p.h_final, p.beta);
    r.rhs = std::exp(-p.beta * df);
    r.gap = std::abs(r.lhs - r.rhs);
    r.mean_work = d.mean_work();
    r.second_law_slack = r.mean_work - df;
    if (r.gap > 1e-8)
        throw invariant_violation("jarzynski_equality",
                                  "Jarzynski gap " + std::to_string(r.gap) +
                                      " exceeds 1e-8; implementation inconsistency");
    return r;
}

}  // namespace qthermo
