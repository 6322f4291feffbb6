// Deterministic report serialization. Two formats: JSON (structured report)
// and CSV (one row per stroke, grid point or work outcome). Every numeric
// field is printed with 12 significant digits; field order is fixed, so
// identical inputs serialize to identical bytes.

#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "accounting.hpp"
#include "cycles.hpp"
#include "dynamics.hpp"
#include "fluctuations.hpp"

namespace qthermo::report {

using config_echo = std::vector<std::pair<std::string, std::string>>;

inline std::string num(double v) {
    if (v == 0.0) return "0";  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

inline std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

// Minimal ordered JSON writer; enough structure for the report schemas.
class json_writer {
public:
    std::string str() && { return std::move(out_); }

    void open_object() { open_token("{"); }
    void close_object() { close_token("}"); }
    void open_array() { open_token("["); }
    void close_array() { close_token("]"); }

    void key(const std::string& k) {
        element_prefix();
        out_ += "\"" + escape(k) + "\": ";
        pending_key_ = true;
    }

    void value_string(const std::string& v) { scalar("\"" + escape(v) + "\""); }
    void value_number(double v) { scalar(num(v)); }
    void value_int(long v) { scalar(std::to_string(v)); }
    void value_bool(bool v) { scalar(v ? "true" : "false"); }
    void value_null() { scalar("null"); }

    void field(const std::string& k, const std::string& v) { key(k); value_string(v); }
    void field(const std::string& k, double v) { key(k); value_number(v); }
    void field(const std::string& k, bool v) { key(k); value_bool(v); }
    void field_int(const std::string& k, long v) { key(k); value_int(v); }
    void field_optional(const std::string& k, const std::optional<double>& v) {
        key(k);
        if (v) value_number(*v); else value_null();
    }

private:
    // comma after the previous sibling, then newline + indent
    void element_prefix() {
        if (needs_comma_) out_ += ",";
        if (!out_.empty()) {
            out_ += "\n";
            out_.append(static_cast<std::size_t>(2 * depth_), ' ');
        }
        needs_comma_ = false;
    }

    void open_token(const char* tok) {
        if (pending_key_) pending_key_ = false;
        else element_prefix();
        out_ += tok;
        ++depth_;
        needs_comma_ = false;
    }

    void close_token(const char* tok) {
        --depth_;
        out_ += "\n";
        out_.append(static_cast<std::size_t>(2 * depth_), ' ');
        out_ += tok;
        needs_comma_ = true;
    }

    void scalar(const std::string& tok) {
        if (pending_key_) pending_key_ = false;
        else element_prefix();
        out_ += tok;
        needs_comma_ = true;
    }

    std::string out_;
    int depth_ = 0;
    bool pending_key_ = false;
    bool needs_comma_ = false;
};

inline void emit_config(json_writer& w, const config_echo& echo) {
    w.key("config");
    w.open_object();
    for (const auto& [k, v] : echo) w.field(k, v);
    w.close_object();
}

inline void emit_strokes(json_writer& w, const std::vector<stroke_record>& strokes) {
    w.key("strokes");
    w.open_array();
    for (std::size_t i = 0; i < strokes.size(); ++i) {
        const auto& s = strokes[i];
        w.open_object();
        w.field_int("index", static_cast<long>(i + 1));
        w.field("label", s.label);
        w.field("W", s.work);
        w.field("Q", s.heat);
        w.field("dE", s.delta_energy);
        w.field("dS", s.delta_entropy);
        w.field_optional("Sigma", s.entropy_production);
        w.field_optional("T_bath", s.bath_temp);
        w.close_object();
    }
    w.close_array();
}

inline std::string csv_header(const config_echo& echo, const std::string& command) {
    std::string out = "# command=" + command + "\n";
    for (const auto& [k, v] : echo) {
        if (k != "command") out += "# " + k + "=" + v + "\n";
    }
    return out;
}

inline std::string stroke_rows(const std::vector<stroke_record>& strokes) {
    std::string out = "index,label,W,Q,dE,dS,Sigma,T_bath\n";
    for (std::size_t i = 0; i < strokes.size(); ++i) {
        const auto& s = strokes[i];
        out += std::to_string(i + 1) + "," + s.label + "," + num(s.work) + "," + num(s.heat) +
               "," + num(s.delta_energy) + "," + num(s.delta_entropy) + ",";
        if (s.entropy_production) out += num(*s.entropy_production);
        out += ",";
        if (s.bath_temp) out += num(*s.bath_temp);
        out += "\n";
    }
    return out;
}

}  // namespace detail

struct cycle_extras {
    double eta_formula = 0.0;   // closed-form efficiency of the cycle family
    double eta_carnot = 0.0;    // 1 - T_c/T_h
    std::optional<double> omega_h_prime;  // carnot only
    std::optional<double> omega_c_prime;
};

inline std::string cycle_json(const std::string& command, const config_echo& echo,
                              const cycle_report& rep, const cycle_extras& extras) {
    detail::json_writer w;
    w.open_object();
    w.field("command", command);
    detail::emit_config(w, echo);
    w.key("report");
    w.open_object();
    detail::emit_strokes(w, rep.strokes);
    w.field("extracted_work", rep.extracted_work);
    w.field("efficiency", rep.efficiency);
    w.field("eta_formula", extras.eta_formula);
    w.field("eta_carnot", extras.eta_carnot);
    if (extras.omega_h_prime) w.field("omega_h_prime", *extras.omega_h_prime);
    if (extras.omega_c_prime) w.field("omega_c_prime", *extras.omega_c_prime);
    w.field("closure_residual", rep.closure_residual);
    w.field("state_return_error", rep.state_return_error);
    w.field("engine", rep.engine);
    w.close_object();
    w.close_object();
    return std::move(w).str() + "\n";
}

inline std::string cycle_csv(const std::string& command, const config_echo& echo,
                             const cycle_report& rep) {
    return detail::csv_header(echo, command) + detail::stroke_rows(rep.strokes);
}

inline std::string sweep_json(const config_echo& echo, const std::vector<sweep_point>& points) {
    detail::json_writer w;
    w.open_object();
    w.field("command", std::string("sweep"));
    detail::emit_config(w, echo);
    w.key("report");
    w.open_object();
    w.key("points");
    w.open_array();
    for (const auto& p : points) {
        w.open_object();
        w.field("tc", p.tc);
        w.field("th", p.th);
        w.field("wc", p.wc);
        w.field("wh", p.wh);
        w.field("skipped", p.skipped);
        if (p.skipped) {
            w.field("reason", p.skip_reason);
        } else {
            w.field("engine", p.engine);
            w.field("w_ext", p.w_ext);
            w.field("eta", p.eta);
            w.field("eta_carnot", p.eta_carnot);
            w.field("closure_residual", p.report->closure_residual);
        }
        w.close_object();
    }
    w.close_array();
    w.close_object();
    w.close_object();
    return std::move(w).str() + "\n";
}

inline std::string sweep_csv(const config_echo& echo, const std::vector<sweep_point>& points) {
    std::string out = detail::csv_header(echo, "sweep");
    out += "tc,th,wc,wh,engine_flag,w_ext,eta,eta_carnot\n";
    for (const auto& p : points) {
        if (p.skipped) {
            out += "# skipped: tc=" + num(p.tc) + " th=" + num(p.th) + " wc=" + num(p.wc) +
                   " wh=" + num(p.wh) + ": " + p.skip_reason + "\n";
            continue;
        }
        out += num(p.tc) + "," + num(p.th) + "," + num(p.wc) + "," + num(p.wh) + "," +
               (p.engine ? "1" : "0") + "," + num(p.w_ext) + "," + num(p.eta) + "," +
               num(p.eta_carnot) + "\n";
    }
    return out;
}

inline std::string jarzynski_json(const config_echo& echo, const jarzynski_result& r,
                                  const work_distribution& dist, double beta, double delta_f) {
    detail::json_writer w;
    w.open_object();
    w.field("command", std::string("jarzynski"));
    detail::emit_config(w, echo);
    w.key("report");
    w.open_object();
    w.field("beta", beta);
    w.field("lhs", r.lhs);
    w.field("rhs", r.rhs);
    w.field("gap", r.gap);
    w.field("mean_work", r.mean_work);
    w.field("delta_f", delta_f);
    w.field("second_law_slack", r.second_law_slack);
    w.key("outcomes");
    w.open_array();
    for (const auto& o : dist.outcomes) {
        w.open_object();
        w.field("work", o.work);
        w.field("probability", o.probability);
        w.close_object();
    }
    w.close_array();
    w.close_object();
    w.close_object();
    return std::move(w).str() + "\n";
}

inline std::string jarzynski_csv(const config_echo& echo, const work_distribution& dist) {
    std::string out = detail::csv_header(echo, "jarzynski");
    out += "index,work,probability\n";
    for (std::size_t i = 0; i < dist.outcomes.size(); ++i) {
        out += std::to_string(i + 1) + "," + num(dist.outcomes[i].work) + "," +
               num(dist.outcomes[i].probability) + "\n";
    }
    return out;
}

struct relax_summary {
    stroke_record stroke;
    double initial_population = 0.0;
    double final_population = 0.0;
    double equilibrium_population = 0.0;
    double gamma_total = 0.0;
    double duration = 0.0;
};

inline std::string relax_json(const config_echo& echo, const relax_summary& r) {
    detail::json_writer w;
    w.open_object();
    w.field("command", std::string("relax"));
    detail::emit_config(w, echo);
    w.key("report");
    w.open_object();
    w.field("initial_population", r.initial_population);
    w.field("final_population", r.final_population);
    w.field("equilibrium_population", r.equilibrium_population);
    w.field("gamma_total", r.gamma_total);
    w.field("duration", r.duration);
    detail::emit_strokes(w, {r.stroke});
    w.close_object();
    w.close_object();
    return std::move(w).str() + "\n";
}

inline std::string relax_csv(const config_echo& echo, const relax_summary& r) {
    return detail::csv_header(echo, "relax") + detail::stroke_rows({r.stroke});
}

inline std::string deficit_json(const config_echo& echo, const deficit_report& d) {
    detail::json_writer w;
    w.open_object();
    w.field("command", std::string("deficit"));
    detail::emit_config(w, echo);
    w.key("report");
    w.open_object();
    w.field("w_otto", d.w_otto);
    w.field("w_matched_carnot", d.w_matched_carnot);
    w.field("dissipation", d.dissipation);
    w.field("residual", d.residual);
    w.field("delta_s_hot", d.delta_s_hot);
    w.field("sigma_hot", d.sigma_hot);
    w.field("sigma_cold", d.sigma_cold);
    w.close_object();
    w.close_object();
    return std::move(w).str() + "\n";
}

inline std::string deficit_csv(const config_echo& echo, const deficit_report& d) {
    std::string out = detail::csv_header(echo, "deficit");
    out += "w_otto,w_matched_carnot,dissipation,residual,delta_s_hot,sigma_hot,sigma_cold\n";
    out += num(d.w_otto) + "," + num(d.w_matched_carnot) + "," + num(d.dissipation) + "," +
           num(d.residual) + "," + num(d.delta_s_hot) + "," + num(d.sigma_hot) + "," +
           num(d.sigma_cold) + "\n";
    return out;
}

// Plot-ready dump: one row per sample with cumulative work and heat.
inline std::string trajectory_csv(const trajectory& traj) {
    std::string out = "t,p_excited,re_coherence,im_coherence,omega,cum_W,cum_Q\n";
    double cum_w = 0.0, cum_q = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (i > 0) {
            const mat2 rho_mid = traj[i - 1].state.matrix() + traj[i].state.matrix();
            const mat2 dh = traj[i].hamiltonian.matrix() - traj[i - 1].hamiltonian.matrix();
            const mat2 h_mid = traj[i - 1].hamiltonian.matrix() + traj[i].hamiltonian.matrix();
            const mat2 drho = traj[i].state.matrix() - traj[i - 1].state.matrix();
            cum_w += 0.5 * std::real(trace(rho_mid * dh));
            cum_q += 0.5 * std::real(trace(h_mid * drho));
        }
        const auto& s = traj[i];
        out += num(s.time) + "," + num(s.state.excited_population()) + "," +
               num(std::real(s.state.coherence())) + "," + num(std::imag(s.state.coherence())) +
               "," + num(s.hamiltonian.gap()) + "," + num(cum_w) + "," + num(cum_q) + "\n";
    }
    return out;
}

}  // namespace qthermo::report
