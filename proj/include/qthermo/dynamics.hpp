// Time evolution of the qubit. Two generators are implemented:
//
//   unitary        drho/dt = -i [H(t), rho]
//   thermalization drho/dt = -i [H, rho] + g_down D[L-] rho + g_up D[L+] rho
//
// with detailed-balance bosonic rates g_down = gamma0 (nbar + 1),
// g_up = gamma0 nbar, nbar = 1/(exp(gap/T) - 1), taken in the eigenbasis of
// the (static) Hamiltonian. The fixed point of the thermalization channel is
// then exactly the Gibbs state at the bath temperature. Integration is
// fixed-step classical RK4 for reproducibility; diagonal strokes also have a
// closed-form path (populations relax exponentially at rate
// Gamma = g_down + g_up, coherences at Gamma/2).

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "errors.hpp"
#include "state.hpp"

namespace qthermo {

struct bath_spec {
    bath_temperature temperature;
    double base_rate;  // gamma0 > 0, inverse time

    bath_spec(bath_temperature t, double gamma0) : temperature(t), base_rate(gamma0) {
        if (!std::isfinite(gamma0) || gamma0 <= 0.0)
            throw std::domain_error("bath_spec: base rate must be finite and > 0");
    }
};

// Control trajectory (omega(t), delta(t)) over [0, t_final], sampled at dt.
struct drive_schedule {
    std::function<double(double)> gap;
    std::function<double(double)> transverse;
    double t_final;
    double sample_step;

    drive_schedule(std::function<double(double)> gap_fn, std::function<double(double)> delta_fn,
                   double duration, double dt)
        : gap(std::move(gap_fn)), transverse(std::move(delta_fn)), t_final(duration),
          sample_step(dt) {
        if (!(t_final > 0.0) || !std::isfinite(t_final))
            throw std::domain_error("drive_schedule: duration must be finite and > 0");
        if (!(sample_step > 0.0) || sample_step > t_final)
            throw std::domain_error("drive_schedule: need 0 < dt <= duration");
    }

    static drive_schedule constant(const qubit_hamiltonian& h, double duration, double dt) {
        return drive_schedule([w = h.gap()](double) { return w; },
                              [d = h.transverse()](double) { return d; }, duration, dt);
    }

    qubit_hamiltonian at(double t) const { return qubit_hamiltonian(gap(t), transverse(t)); }
};

struct trajectory_sample {
    double time;
    density_operator state;
    qubit_hamiltonian hamiltonian;
};

// Ordered (time, state, Hamiltonian) samples with strictly increasing times.
class trajectory {
public:
    void append(double time, density_operator state, qubit_hamiltonian h) {
        if (!samples_.empty() && !(time > samples_.back().time))
            throw std::invalid_argument("trajectory: sample times must strictly increase");
        samples_.push_back({time, std::move(state), std::move(h)});
    }

    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const trajectory_sample& operator[](std::size_t i) const { return samples_[i]; }
    const trajectory_sample& front() const { return samples_.front(); }
    const trajectory_sample& back() const { return samples_.back(); }
    auto begin() const { return samples_.begin(); }
    auto end() const { return samples_.end(); }

private:
    std::vector<trajectory_sample> samples_;
};

// Joins two trajectories; b's samples are shifted so its first sample lands
// where a ends. If b starts with a's final state the duplicate is dropped.
inline trajectory concatenate(const trajectory& a, const trajectory& b) {
    if (a.empty()) return b;
    trajectory out = a;
    if (b.empty()) return out;
    const double offset = a.back().time - b.front().time;
    std::size_t start =
        max_abs_diff(a.back().state.matrix(), b.front().state.matrix()) < 1e-14 ? 1 : 0;
    double last = a.back().time;
    for (std::size_t i = start; i < b.size(); ++i) {
        double t = b[i].time + offset;
        if (!(t > last)) t = std::nextafter(last, last + 1.0);
        out.append(t, b[i].state, b[i].hamiltonian);
        last = t;
    }
    return out;
}

enum class integration { rk4, closed_form };

namespace detail {

// Tolerance used when re-wrapping integrator output as density operators;
// catches gross blow-ups. The 1e-10 trace and positivity guarantees along
// trajectories are asserted by the test suite.
constexpr double integrator_state_tol = 1e-6;

inline int step_count(double duration, double dt) {
    int n = static_cast<int>(std::ceil(duration / dt - 1e-9));
    return n < 1 ? 1 : n;
}

template <class Rhs>
mat2 rk4_step(const mat2& rho, double t, double dt, Rhs&& rhs) {
    const mat2 k1 = rhs(t, rho);
    const mat2 k2 = rhs(t + 0.5 * dt, rho + (0.5 * dt) * k1);
    const mat2 k3 = rhs(t + 0.5 * dt, rho + (0.5 * dt) * k2);
    const mat2 k4 = rhs(t + dt, rho + dt * k3);
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

// Propagates rho under drho/dt = -i[H(t), rho] with fixed-step RK4, sampling
// once per step. Spectrum conservation is monitored; drift beyond 1e-6
// signals a step size too coarse for the drive and raises integrator_error.
inline trajectory unitary_propagate(const density_operator& rho0, const drive_schedule& drive) {
    const int n = detail::step_count(drive.t_final, drive.sample_step);
    const auto ev0 = rho0.eigenvalues();

    trajectory traj;
    traj.append(0.0, rho0, drive.at(0.0));

    const auto rhs = [&drive](double t, const mat2& rho) {
        return cplx(0.0, -1.0) * commutator(drive.at(t).matrix(), rho);
    };

    mat2 rho = rho0.matrix();
    double t = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t_next = (k + 1 == n) ? drive.t_final : (k + 1) * drive.sample_step;
        rho = detail::rk4_step(rho, t, t_next - t, rhs);
        t = t_next;

        const auto ev = eigenvalues_hermitian(rho);
        const double drift = std::max(std::abs(ev[0] - ev0[0]), std::abs(ev[1] - ev0[1]));
        if (drift > 1e-6)
            throw integrator_error(
                "unitary_propagate: eigenvalue drift " + std::to_string(drift) + " at t=" +
                std::to_string(t) + " with dt=" + std::to_string(drive.sample_step) +
                "; reduce the step size");
        traj.append(t, density_operator(rho, detail::integrator_state_tol), drive.at(t));
    }
    return traj;
}

// Integrates dU/dt = -i H(t) U from the identity; the propagator feeding the
// two-point-measurement protocol.
inline mat2 drive_propagator(const drive_schedule& drive) {
    const int n = detail::step_count(drive.t_final, drive.sample_step);
    const auto rhs = [&drive](double t, const mat2& u) {
        return cplx(0.0, -1.0) * (drive.at(t).matrix() * u);
    };
    mat2 u = mat2::identity();
    double t = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t_next = (k + 1 == n) ? drive.t_final : (k + 1) * drive.sample_step;
        u = detail::rk4_step(u, t, t_next - t, rhs);
        t = t_next;
    }
    return u;
}

namespace detail {

struct thermal_rates {
    double down, up;
    double total() const { return down + up; }
};

inline thermal_rates rates_for(const qubit_hamiltonian& h, const bath_spec& bath) {
    const double gap = h.eigen_gap();
    if (gap < 1e-9)
        throw std::domain_error(
            "thermalize: gap below 1e-9, bosonic occupation nbar diverges");
    const double nbar = 1.0 / std::expm1(gap / bath.temperature.value());
    return {bath.base_rate * (nbar + 1.0), bath.base_rate * nbar};
}

}  // namespace detail

// Dissipative relaxation toward gibbs_state(h, bath.temperature) under a
// static Hamiltonian. RK4 enforces dt * Gamma <= 0.1 (accuracy contract);
// the closed-form path has no step restriction and is exact at each sample.
inline trajectory thermalize(const density_operator& rho0, const qubit_hamiltonian& h,
                             const bath_spec& bath, double duration, double dt,
                             integration method = integration::rk4) {
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw std::domain_error("thermalize: duration must be finite and > 0");
    if (!(dt > 0.0)) throw std::domain_error("thermalize: dt must be > 0");

    const detail::thermal_rates rates = detail::rates_for(h, bath);
    const double gamma_total = rates.total();
    if (method == integration::rk4 && dt * gamma_total > 0.1)
        throw integrator_error("thermalize: dt * Gamma = " + std::to_string(dt * gamma_total) +
                               " exceeds 0.1; reduce the step size");

    const eigensystem2 es = eigen_hermitian(h.matrix());
    const mat2 lower = outer(es.vectors[0], es.vectors[1]);  // |g><e| in eigenbasis
    const mat2 raise = outer(es.vectors[1], es.vectors[0]);
    const mat2 hm = h.matrix();

    trajectory traj;
    traj.append(0.0, rho0, h);

    const int n = detail::step_count(duration, dt);

    if (method == integration::closed_form) {
        // Populations relax exponentially; the coherence picks up the free
        // rotation at the eigen gap and decays at Gamma/2.
        const double p0 = expectation(rho0.matrix(), es.vectors[1]);
        const double p_eq = rates.up / gamma_total;
        const cplx c0 = inner(es.vectors[1], mat_vec(rho0.matrix(), es.vectors[0]));
        const double gap = es.values[1] - es.values[0];
        for (int k = 1; k <= n; ++k) {
            const double t = (k == n) ? duration : k * dt;
            const double p = p_eq + (p0 - p_eq) * std::exp(-gamma_total * t);
            const cplx c = c0 * std::exp(cplx(-0.5 * gamma_total * t, -gap * t));
            mat2 m = (1.0 - p) * outer(es.vectors[0], es.vectors[0]) +
                     p * outer(es.vectors[1], es.vectors[1]) +
                     c * outer(es.vectors[1], es.vectors[0]) +
                     std::conj(c) * outer(es.vectors[0], es.vectors[1]);
            traj.append(t, density_operator(m, 1e-12), h);
        }
        return traj;
    }

    const auto dissipate = [&](const mat2& rho, const mat2& jump, double rate) {
        const mat2 jd = adjoint(jump);
        const mat2 jdj = jd * jump;
        return rate * (jump * rho * jd - 0.5 * (jdj * rho + rho * jdj));
    };
    const auto rhs = [&](double, const mat2& rho) {
        return cplx(0.0, -1.0) * commutator(hm, rho) + dissipate(rho, lower, rates.down) +
               dissipate(rho, raise, rates.up);
    };

    mat2 rho = rho0.matrix();
    double t = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t_next = (k + 1 == n) ? duration : (k + 1) * dt;
        rho = detail::rk4_step(rho, t, t_next - t, rhs);
        t = t_next;
        traj.append(t, density_operator(rho, detail::integrator_state_tol), h);
    }
    return traj;
}

// Discretized reversible isotherm: n steps of a small gap change at frozen
// populations followed by full re-thermalization, so every post-step state is
// exactly the Gibbs state at (current omega, T). Entropy production of the
// discretization vanishes as O(1/n). Sample times are step counters, not
// physical times.
inline trajectory quasistatic_isotherm(const qubit_hamiltonian& h_start,
                                       const qubit_hamiltonian& h_end, const bath_temperature& t,
                                       int n_steps) {
    if (!h_start.diagonal() || !h_end.diagonal())
        throw std::domain_error("quasistatic_isotherm: endpoints must have zero transverse field");
    if (n_steps < 1) throw std::domain_error("quasistatic_isotherm: n_steps must be >= 1");

    trajectory traj;
    density_operator state = gibbs_state(h_start, t);
    traj.append(0.0, state, h_start);

    const double w0 = h_start.gap();
    const double w1 = h_end.gap();
    for (int k = 1; k <= n_steps; ++k) {
        const qubit_hamiltonian hk(w0 + (w1 - w0) * (static_cast<double>(k) / n_steps));
        traj.append(k - 0.5, state, hk);  // gap moved, populations frozen
        state = gibbs_state(hk, t);
        traj.append(static_cast<double>(k), state, hk);  // re-thermalized
    }
    return traj;
}

}  // namespace qthermo
