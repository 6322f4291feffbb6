// Quantum Otto and Carnot cycles for a single qubit, assembled from the
// dynamics and accounting layers.
//
// Otto: gap change at frozen populations (work strokes 1 and 3) alternating
// with fixed-gap thermalization (heat strokes 2 and 4). Exact mode ends the
// heat strokes at the Gibbs state itself (the infinite-duration limit of the
// closed-form relaxation); finite-time mode integrates the GKSL channel for
// the configured durations.
//
// Carnot: the same machine with the work strokes retargeted to
// w'_h = (T_h/T_c) w_c and w'_c = (T_c/T_h) w_h, so the qubit is already in
// equilibrium with each bath when contact starts, and with the isochores
// replaced by discretized quasi-static isotherms.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "accounting.hpp"
#include "core.hpp"
#include "dynamics.hpp"
#include "errors.hpp"

namespace qthermo {

enum class cycle_mode { exact, finite_time };

struct finite_time_params {
    double gamma0 = 1.0;
    double hot_duration = 0.0;   // 0 = auto: rate_duration_product / Gamma
    double cold_duration = 0.0;  // 0 = auto
    double dt = 0.0;             // 0 = auto: 0.08 / Gamma
    double rate_duration_product = 40.0;
};

struct otto_spec {
    bath_temperature t_cold;
    bath_temperature t_hot;
    double omega_c;
    double omega_h;
    cycle_mode mode = cycle_mode::exact;
    finite_time_params ft{};

    otto_spec(bath_temperature tc, bath_temperature th, double wc, double wh,
              cycle_mode m = cycle_mode::exact, finite_time_params p = {})
        : t_cold(tc), t_hot(th), omega_c(wc), omega_h(wh), mode(m), ft(p) {
        if (!(t_cold.value() < t_hot.value()))
            throw std::domain_error("otto_spec: need T_c < T_h");
        if (!(omega_c > 0.0) || !(omega_c <= omega_h) || !std::isfinite(omega_h))
            throw std::domain_error("otto_spec: need 0 < omega_c <= omega_h");
        if (ft.gamma0 <= 0.0) throw std::domain_error("otto_spec: need gamma0 > 0");
    }

    // work can be extracted iff omega_c/omega_h >= T_c/T_h
    bool engine_condition() const {
        return omega_c / omega_h >= t_cold.value() / t_hot.value();
    }
};

struct carnot_spec {
    bath_temperature t_cold;
    bath_temperature t_hot;
    double omega_c;
    double omega_h;
    int isotherm_steps;

    carnot_spec(bath_temperature tc, bath_temperature th, double wc, double wh, int n)
        : t_cold(tc), t_hot(th), omega_c(wc), omega_h(wh), isotherm_steps(n) {
        if (!(t_cold.value() < t_hot.value()))
            throw std::domain_error("carnot_spec: need T_c < T_h");
        if (!(omega_c > 0.0) || !(omega_c <= omega_h) || !std::isfinite(omega_h))
            throw std::domain_error("carnot_spec: need 0 < omega_c <= omega_h");
        if (isotherm_steps < 1) throw std::domain_error("carnot_spec: need isotherm_steps >= 1");
        if (!(omega_h_prime() >= omega_h) || !(omega_c_prime() <= omega_c))
            throw std::domain_error(
                "carnot_spec: derived gaps violate w'_h >= w_h, w'_c <= w_c "
                "(requires omega_c/omega_h >= T_c/T_h)");
    }

    double omega_h_prime() const { return (t_hot.value() / t_cold.value()) * omega_c; }
    double omega_c_prime() const { return (t_cold.value() / t_hot.value()) * omega_h; }
};

struct cycle_report {
    std::vector<stroke_record> strokes;
    double extracted_work = 0.0;
    double efficiency = 0.0;         // measured: W_ext / Q_hot
    double closure_residual = 0.0;   // sum of W + Q over the cycle
    double state_return_error = 0.0; // trace distance initial vs final state
    bool engine = false;
};

struct otto_efficiency_result {
    double value;  // 1 - omega_c/omega_h
    bool engine;   // false: extraction condition violated, value still usable for sweeps
};

inline otto_efficiency_result otto_efficiency(const otto_spec& spec) {
    return {1.0 - spec.omega_c / spec.omega_h, spec.engine_condition()};
}

inline double carnot_efficiency(const bath_temperature& t_cold, const bath_temperature& t_hot) {
    if (!(t_cold.value() < t_hot.value()))
        throw std::domain_error("carnot_efficiency: need T_c < T_h");
    return 1.0 - t_cold.value() / t_hot.value();
}

namespace detail {

inline trajectory frozen_gap_stroke(const density_operator& rho, const qubit_hamiltonian& from,
                                    const qubit_hamiltonian& to) {
    trajectory t;
    t.append(0.0, rho, from);
    t.append(1.0, rho, to);
    return t;
}

// Heat stroke in the full-thermalization limit: endpoint is the Gibbs state.
inline trajectory exact_isochore(const density_operator& rho0, const qubit_hamiltonian& h,
                                 const bath_temperature& t) {
    trajectory traj;
    traj.append(0.0, rho0, h);
    traj.append(1.0, gibbs_state(h, t), h);
    return traj;
}

template <class Fn>
auto with_stroke_context(int index, const std::string& label, Fn&& fn) {
    try {
        return fn();
    } catch (const invariant_violation& e) {
        throw invariant_violation(e.invariant, "stroke " + std::to_string(index) + " (" + label +
                                                   "): " + e.what());
    } catch (const integrator_error& e) {
        throw integrator_error("stroke " + std::to_string(index) + " (" + label + "): " +
                               e.what());
    }
}

inline double guarded_ratio(double num, double den) {
    return std::abs(den) > 1e-13 ? num / den : 0.0;
}

}  // namespace detail

// Four-stroke Otto cycle from the cold thermal state. `full_path`, when
// given, receives the stitched cycle trajectory for dumping.
inline cycle_report run_otto(const otto_spec& spec, trajectory* full_path = nullptr) {
    const qubit_hamiltonian h_cold(spec.omega_c);
    const qubit_hamiltonian h_hot(spec.omega_h);
    const density_operator start = gibbs_state(h_cold, spec.t_cold);

    const bool exact = spec.mode == cycle_mode::exact;
    bath_spec hot_bath(spec.t_hot, spec.ft.gamma0);
    bath_spec cold_bath(spec.t_cold, spec.ft.gamma0);

    double enforce_product = 0.0;  // min Gamma * duration across heat strokes
    const auto isochore = [&](const density_operator& rho, const qubit_hamiltonian& h,
                              const bath_spec& bath, double duration_override) {
        if (exact) return detail::exact_isochore(rho, h, bath.temperature);
        const double gamma_total = detail::rates_for(h, bath).total();
        const double duration = duration_override > 0.0 ? duration_override
                                                        : spec.ft.rate_duration_product / gamma_total;
        const double dt = spec.ft.dt > 0.0 ? spec.ft.dt : 0.08 / gamma_total;
        const double product = gamma_total * duration;
        enforce_product = enforce_product == 0.0 ? product : std::min(enforce_product, product);
        return thermalize(rho, h, bath, duration, dt);
    };

    cycle_report report;

    // 1: raise the gap at frozen populations
    trajectory t1 = detail::with_stroke_context(1, "compression", [&] {
        return detail::frozen_gap_stroke(start, h_cold, h_hot);
    });
    report.strokes.push_back(make_stroke_record(t1, "compression"));

    // 2: thermalize against the hot bath at fixed gap
    trajectory t2 = detail::with_stroke_context(2, "hot_isochore", [&] {
        return isochore(t1.back().state, h_hot, hot_bath, spec.ft.hot_duration);
    });
    report.strokes.push_back(make_stroke_record(t2, "hot_isochore", spec.t_hot));

    // 3: lower the gap at frozen populations
    trajectory t3 = detail::with_stroke_context(3, "expansion", [&] {
        return detail::frozen_gap_stroke(t2.back().state, h_hot, h_cold);
    });
    report.strokes.push_back(make_stroke_record(t3, "expansion"));

    // 4: thermalize against the cold bath
    trajectory t4 = detail::with_stroke_context(4, "cold_isochore", [&] {
        return isochore(t3.back().state, h_cold, cold_bath, spec.ft.cold_duration);
    });
    report.strokes.push_back(make_stroke_record(t4, "cold_isochore", spec.t_cold));

    report.extracted_work = -(report.strokes[0].work + report.strokes[2].work);
    report.efficiency = detail::guarded_ratio(report.extracted_work, report.strokes[1].heat);
    report.closure_residual = first_law_check(report.strokes);
    report.state_return_error = trace_distance(start, t4.back().state);
    report.engine = spec.engine_condition();

    const bool enforce = exact || enforce_product >= 39.999;
    const double closure_tol = exact ? 1e-9 : 1e-5;
    const double return_tol = exact ? 1e-8 : 1e-4;
    if (enforce && std::abs(report.closure_residual) > closure_tol)
        throw invariant_violation("first_law_closure",
                                  "otto cycle closure residual " +
                                      std::to_string(report.closure_residual));
    if (enforce && report.state_return_error > return_tol)
        throw invariant_violation("cycle_state_return",
                                  "otto cycle does not return to its initial state (distance " +
                                      std::to_string(report.state_return_error) + ")");

    if (full_path)
        *full_path = concatenate(concatenate(t1, t2), concatenate(t3, t4));
    return report;
}

// Carnot cycle: two population-frozen adiabats and two discretized
// quasi-static isotherms. Efficiency approaches 1 - T_c/T_h as the isotherm
// step count grows, with O(1/n) error.
inline cycle_report run_carnot(const carnot_spec& spec, trajectory* full_path = nullptr) {
    const double wh_prime = spec.omega_h_prime();
    const double wc_prime = spec.omega_c_prime();
    const qubit_hamiltonian h_c(spec.omega_c), h_h(spec.omega_h);
    const qubit_hamiltonian h_hp(wh_prime), h_cp(wc_prime);
    const density_operator start = gibbs_state(h_c, spec.t_cold);

    cycle_report report;

    // 1: adiabatic compression to w'_h; ends in equilibrium with the hot bath
    trajectory t1 = detail::with_stroke_context(1, "compression_adiabat", [&] {
        return detail::frozen_gap_stroke(start, h_c, h_hp);
    });
    report.strokes.push_back(make_stroke_record(t1, "compression_adiabat"));

    // 2: hot isotherm, gap decreasing
    trajectory t2 = detail::with_stroke_context(2, "hot_isotherm", [&] {
        return quasistatic_isotherm(h_hp, h_h, spec.t_hot, spec.isotherm_steps);
    });
    report.strokes.push_back(make_stroke_record(t2, "hot_isotherm", spec.t_hot));

    // 3: adiabatic expansion to w'_c; ends in equilibrium with the cold bath
    trajectory t3 = detail::with_stroke_context(3, "expansion_adiabat", [&] {
        return detail::frozen_gap_stroke(t2.back().state, h_h, h_cp);
    });
    report.strokes.push_back(make_stroke_record(t3, "expansion_adiabat"));

    // 4: cold isotherm, gap increasing, back to the starting point
    trajectory t4 = detail::with_stroke_context(4, "cold_isotherm", [&] {
        return quasistatic_isotherm(h_cp, h_c, spec.t_cold, spec.isotherm_steps);
    });
    report.strokes.push_back(make_stroke_record(t4, "cold_isotherm", spec.t_cold));

    report.extracted_work = 0.0;
    for (const auto& s : report.strokes) report.extracted_work -= s.work;
    report.efficiency = detail::guarded_ratio(report.extracted_work, report.strokes[1].heat);
    report.closure_residual = first_law_check(report.strokes);
    report.state_return_error = trace_distance(start, t4.back().state);
    report.engine = true;  // guaranteed by the derived-gap ordering

    if (std::abs(report.closure_residual) > 1e-9)
        throw invariant_violation("first_law_closure",
                                  "carnot cycle closure residual " +
                                      std::to_string(report.closure_residual));
    if (report.state_return_error > 1e-8)
        throw invariant_violation("cycle_state_return",
                                  "carnot cycle does not return to its initial state (distance " +
                                      std::to_string(report.state_return_error) + ")");

    if (full_path)
        *full_path = concatenate(concatenate(t1, t2), concatenate(t3, t4));
    return report;
}

// Work deficit of the Otto cycle against the reversible cycle with the same
// per-cycle entropy swing dS_hot between the two thermal endpoints:
//   W_matched_carnot = (T_h - T_c) dS_hot
//   W_otto           = W_matched_carnot - (T_h Sigma_2 + T_c Sigma_4)
// The identity is exact in full-thermalization mode; `residual` records the
// numerical defect.
struct deficit_report {
    double w_otto = 0.0;
    double w_matched_carnot = 0.0;
    double dissipation = 0.0;  // T_h Sigma_2 + T_c Sigma_4
    double residual = 0.0;
    double delta_s_hot = 0.0;
    double sigma_hot = 0.0;
    double sigma_cold = 0.0;
};

inline deficit_report otto_carnot_deficit(const otto_spec& spec) {
    if (spec.mode != cycle_mode::exact)
        throw std::domain_error("otto_carnot_deficit: requires exact mode");
    const cycle_report cycle = run_otto(spec);

    deficit_report d;
    d.w_otto = cycle.extracted_work;
    d.delta_s_hot = cycle.strokes[1].delta_entropy;
    d.sigma_hot = cycle.strokes[1].entropy_production.value();
    d.sigma_cold = cycle.strokes[3].entropy_production.value();
    d.w_matched_carnot = (spec.t_hot.value() - spec.t_cold.value()) * d.delta_s_hot;
    d.dissipation = spec.t_hot.value() * d.sigma_hot + spec.t_cold.value() * d.sigma_cold;
    d.residual = std::abs(d.w_matched_carnot - d.dissipation - d.w_otto);
    if (d.residual > 1e-9)
        throw invariant_violation("work_deficit_identity",
                                  "deficit identity residual " + std::to_string(d.residual));
    return d;
}

// Cartesian parameter sweep of Otto cycles. Points that fail validation are
// reported as skipped, not fatal. Results are ordered by grid index no
// matter how many worker threads evaluate them.
struct sweep_grid {
    std::vector<double> t_cold, t_hot, omega_c, omega_h;
    cycle_mode mode = cycle_mode::exact;
    finite_time_params ft{};
};

struct sweep_point {
    double tc = 0, th = 0, wc = 0, wh = 0;
    bool skipped = false;
    std::string skip_reason;
    bool engine = false;
    double w_ext = 0.0;
    double eta = 0.0;
    double eta_carnot = 0.0;
    std::optional<cycle_report> report;
};

inline std::vector<sweep_point> sweep(const sweep_grid& grid, unsigned jobs = 1) {
    const std::size_t n = grid.t_cold.size() * grid.t_hot.size() * grid.omega_c.size() *
                          grid.omega_h.size();
    if (n == 0) throw std::domain_error("sweep: empty grid");

    std::vector<sweep_point> points(n);
    const auto eval = [&](std::size_t idx) {
        sweep_point& pt = points[idx];
        std::size_t rest = idx;
        pt.wh = grid.omega_h[rest % grid.omega_h.size()];
        rest /= grid.omega_h.size();
        pt.wc = grid.omega_c[rest % grid.omega_c.size()];
        rest /= grid.omega_c.size();
        pt.th = grid.t_hot[rest % grid.t_hot.size()];
        rest /= grid.t_hot.size();
        pt.tc = grid.t_cold[rest];
        try {
            otto_spec spec(bath_temperature(pt.tc), bath_temperature(pt.th), pt.wc, pt.wh,
                           grid.mode, grid.ft);
            pt.report = run_otto(spec);
            pt.engine = pt.report->engine;
            pt.w_ext = pt.report->extracted_work;
            pt.eta = pt.report->efficiency;
            pt.eta_carnot = 1.0 - pt.tc / pt.th;
        } catch (const std::exception& e) {
            pt.skipped = true;
            pt.skip_reason = e.what();
        }
    };

    const unsigned workers = std::min<unsigned>(jobs > 0 ? jobs : 1, static_cast<unsigned>(n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) eval(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers) eval(i);
            });
        }
        for (auto& th : pool) th.join();
    }
    return points;
}

}  // namespace qthermo
