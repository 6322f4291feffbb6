// Command-line front end: flag/config-file parsing with fail-fast
// validation, report generation and atomic output.
//
//   qthermo <otto|carnot|jarzynski|relax|sweep|deficit> [flags]
//
// Exit codes: 0 ok, 2 config error, 3 physics invariant violated at
// runtime, 4 I/O failure. Flags override config-file values; unknown keys
// are rejected. Every output embeds a normalized echo of the effective
// configuration (--jobs is excluded: parallelism must not change output).

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cycles.hpp"
#include "dynamics.hpp"
#include "fluctuations.hpp"
#include "report.hpp"

namespace qthermo::cli {

struct config_error : std::runtime_error {
    std::string key;
    config_error(std::string k, const std::string& msg)
        : std::runtime_error(k.empty() ? msg : k + ": " + msg), key(std::move(k)) {}
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class command_kind { otto, carnot, jarzynski, relax, sweep, deficit };

struct run_config {
    command_kind kind = command_kind::otto;
    double tc = 0.0, th = 0.0, wc = 0.0, wh = 0.0;
    double gamma = 1.0, duration = 0.0, dt = 0.0;  // 0 = auto
    double beta = 0.0, p0 = 1.0;
    long steps = 100;
    long jobs = 1;
    std::string mode;  // exact | finite_time (command-dependent default)
    std::string format = "json";
    std::string output;     // empty = stdout
    std::string dump_path;  // empty = no trajectory dump
    std::vector<double> tc_grid, th_grid, wc_grid, wh_grid;  // sweep only
    report::config_echo echo;
};

namespace detail {

inline const std::map<std::string, command_kind>& commands() {
    static const std::map<std::string, command_kind> m{
        {"otto", command_kind::otto},         {"carnot", command_kind::carnot},
        {"jarzynski", command_kind::jarzynski}, {"relax", command_kind::relax},
        {"sweep", command_kind::sweep},       {"deficit", command_kind::deficit}};
    return m;
}

inline const std::set<std::string>& allowed_keys(command_kind kind) {
    static const std::set<std::string> otto{"tc", "th", "wc", "wh", "mode", "gamma",
                                            "duration", "dt", "format", "output",
                                            "dump-trajectory"};
    static const std::set<std::string> carnot{"tc", "th", "wc", "wh", "steps",
                                              "format", "output", "dump-trajectory"};
    static const std::set<std::string> jarzynski{"beta", "wc", "wh", "format", "output"};
    static const std::set<std::string> relax{"tc", "wc", "gamma", "duration", "dt", "mode",
                                             "p0", "format", "output", "dump-trajectory"};
    static const std::set<std::string> sweep{"tc", "th", "wc", "wh", "mode", "gamma",
                                             "duration", "dt", "jobs", "format", "output"};
    static const std::set<std::string> deficit{"tc", "th", "wc", "wh", "format", "output"};
    switch (kind) {
        case command_kind::otto: return otto;
        case command_kind::carnot: return carnot;
        case command_kind::jarzynski: return jarzynski;
        case command_kind::relax: return relax;
        case command_kind::sweep: return sweep;
        default: return deficit;
    }
}

inline double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error(key, "not a number: '" + text + "'");
    }
}

inline long parse_long(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error(key, "not an integer: '" + text + "'");
    }
}

// "x" -> {x};  "lo:hi:n" -> n equally spaced values, endpoints included
inline std::vector<double> parse_range(const std::string& key, const std::string& text) {
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) return {parse_double(key, text)};
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw config_error(key, "range must be lo:hi:count, got '" + text + "'");
    const double lo = parse_double(key, text.substr(0, c1));
    const double hi = parse_double(key, text.substr(c1 + 1, c2 - c1 - 1));
    const long count = parse_long(key, text.substr(c2 + 1));
    if (count < 0) throw config_error(key, "range count must be >= 0");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        values.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) /
                                               static_cast<double>(count - 1));
    }
    return values;
}

inline std::string normalize_range(const std::string& key, const std::string& text) {
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) return report::num(parse_double(key, text));
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw config_error(key, "range must be lo:hi:count, got '" + text + "'");
    return report::num(parse_double(key, text.substr(0, c1))) + ":" +
           report::num(parse_double(key, text.substr(c1 + 1, c2 - c1 - 1))) + ":" +
           std::to_string(parse_long(key, text.substr(c2 + 1)));
}

inline std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("config", "cannot read config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(f, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config", "expected key=value in config file, got '" + line + "'");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        const auto vstart = value.find_first_not_of(" \t");
        value = vstart == std::string::npos ? "" : value.substr(vstart);
        kv[key] = value;
    }
    return kv;
}

}  // namespace detail

inline run_config parse_config(const std::vector<std::string>& args) {
    if (args.empty())
        throw config_error("", "missing command (otto|carnot|jarzynski|relax|sweep|deficit)");
    const auto cmd_it = detail::commands().find(args[0]);
    if (cmd_it == detail::commands().end())
        throw config_error(args[0], "unknown command");

    run_config cfg;
    cfg.kind = cmd_it->second;

    // flags: --key value (or --key=value); gather before merging
    std::map<std::string, std::string> flags;
    for (std::size_t i = 1; i < args.size(); ++i) {
        std::string arg = args[i];
        if (arg.rfind("--", 0) != 0)
            throw config_error(arg, "expected a --flag");
        arg = arg.substr(2);
        std::string value;
        const auto eq = arg.find('=');
        if (eq != std::string::npos) {
            value = arg.substr(eq + 1);
            arg = arg.substr(0, eq);
        } else {
            if (i + 1 >= args.size()) throw config_error(arg, "missing value");
            value = args[++i];
        }
        flags[arg] = value;
    }

    // config file first, flags override
    std::map<std::string, std::string> kv;
    if (const auto it = flags.find("config"); it != flags.end()) {
        kv = detail::load_config_file(it->second);
        flags.erase("config");
    }
    for (const auto& [k, v] : flags) kv[k] = v;

    const auto& allowed = detail::allowed_keys(cfg.kind);
    for (const auto& [k, v] : kv) {
        if (!allowed.count(k)) throw config_error(k, "unknown key for command '" + args[0] + "'");
    }

    const auto has = [&](const std::string& k) { return kv.count(k) != 0; };
    const auto require = [&](const std::string& k) {
        if (!has(k)) throw config_error(k, "required parameter missing");
    };
    std::map<std::string, std::string> echo;  // normalized effective values

    const auto take_double = [&](const std::string& k, double& slot) {
        if (has(k)) {
            slot = detail::parse_double(k, kv[k]);
            echo[k] = report::num(slot);
        }
    };
    const auto take_long = [&](const std::string& k, long& slot) {
        if (has(k)) {
            slot = detail::parse_long(k, kv[k]);
            echo[k] = std::to_string(slot);
        }
    };
    const auto take_string = [&](const std::string& k, std::string& slot,
                                 const std::set<std::string>& valid) {
        if (has(k)) {
            if (!valid.empty() && !valid.count(kv[k]))
                throw config_error(k, "invalid value '" + kv[k] + "'");
            slot = kv[k];
            echo[k] = slot;
        }
    };

    const bool is_sweep = cfg.kind == command_kind::sweep;
    if (is_sweep) {
        for (const std::string k : {"tc", "th", "wc", "wh"}) {
            require(k);
            auto& grid = k == "tc"   ? cfg.tc_grid
                         : k == "th" ? cfg.th_grid
                         : k == "wc" ? cfg.wc_grid
                                     : cfg.wh_grid;
            grid = detail::parse_range(k, kv[k]);
            echo[k] = detail::normalize_range(k, kv[k]);
        }
    } else {
        switch (cfg.kind) {
            case command_kind::jarzynski:
                require("beta"); require("wc"); require("wh");
                break;
            case command_kind::relax:
                require("tc"); require("wc");
                break;
            default:
                require("tc"); require("th"); require("wc"); require("wh");
        }
        take_double("tc", cfg.tc);
        take_double("th", cfg.th);
        take_double("wc", cfg.wc);
        take_double("wh", cfg.wh);
    }

    take_double("beta", cfg.beta);
    take_double("p0", cfg.p0);
    take_double("gamma", cfg.gamma);
    take_double("duration", cfg.duration);
    take_double("dt", cfg.dt);
    take_long("steps", cfg.steps);
    take_long("jobs", cfg.jobs);
    take_string("mode", cfg.mode, {"exact", "finite_time"});
    take_string("format", cfg.format, {"json", "csv"});
    take_string("output", cfg.output, {});
    take_string("dump-trajectory", cfg.dump_path, {});

    // command-dependent defaults, folded into the echo
    if (cfg.mode.empty()) cfg.mode = cfg.kind == command_kind::relax ? "finite_time" : "exact";
    const bool finite = cfg.mode == "finite_time";
    if (cfg.kind == command_kind::otto || is_sweep) {
        echo.try_emplace("mode", cfg.mode);
        if (finite) {
            echo.try_emplace("gamma", report::num(cfg.gamma));
            echo.try_emplace("duration", report::num(cfg.duration));
            echo.try_emplace("dt", report::num(cfg.dt));
        }
    } else if (cfg.kind == command_kind::relax) {
        echo.try_emplace("mode", cfg.mode);
        echo.try_emplace("gamma", report::num(cfg.gamma));
        echo.try_emplace("duration", report::num(cfg.duration));
        echo.try_emplace("dt", report::num(cfg.dt));
        echo.try_emplace("p0", report::num(cfg.p0));
    } else if (cfg.kind == command_kind::carnot) {
        echo.try_emplace("steps", std::to_string(cfg.steps));
    }
    echo.try_emplace("format", cfg.format);
    echo.erase("jobs");  // execution detail, must not affect the output

    cfg.echo.assign(echo.begin(), echo.end());

    // fail-fast: construct the target specs so every precondition is checked
    // before any computation or output happens
    try {
        if (cfg.duration < 0.0) throw std::domain_error("duration must be >= 0 (0 = auto)");
        if (cfg.dt < 0.0) throw std::domain_error("dt must be >= 0 (0 = auto)");
        switch (cfg.kind) {
            case command_kind::otto:
            case command_kind::deficit: {
                finite_time_params ft;
                ft.gamma0 = cfg.gamma;
                ft.hot_duration = ft.cold_duration = cfg.duration;
                ft.dt = cfg.dt;
                otto_spec spec(bath_temperature(cfg.tc), bath_temperature(cfg.th), cfg.wc, cfg.wh,
                               finite ? cycle_mode::finite_time : cycle_mode::exact, ft);
                if (cfg.kind == command_kind::deficit && finite)
                    throw std::domain_error("deficit: requires exact mode");
                break;
            }
            case command_kind::carnot: {
                carnot_spec spec(bath_temperature(cfg.tc), bath_temperature(cfg.th), cfg.wc,
                                 cfg.wh, static_cast<int>(cfg.steps));
                break;
            }
            case command_kind::jarzynski: {
                tpm_protocol::sudden_quench(cfg.beta, cfg.wc, cfg.wh);
                break;
            }
            case command_kind::relax: {
                bath_spec bath(bath_temperature(cfg.tc), cfg.gamma);
                qubit_hamiltonian h(cfg.wc);
                if (h.eigen_gap() < 1e-9)
                    throw std::domain_error("relax: gap below 1e-9 is rejected by thermalize");
                if (!(cfg.p0 >= 0.0 && cfg.p0 <= 1.0))
                    throw std::domain_error("relax: p0 must lie in [0, 1]");
                if (has("duration") && !(cfg.duration > 0.0))
                    throw std::domain_error("relax: duration must be > 0");
                if (has("dt") && !(cfg.dt > 0.0))
                    throw std::domain_error("relax: dt must be > 0");
                break;
            }
            case command_kind::sweep: {
                const std::size_t n = cfg.tc_grid.size() * cfg.th_grid.size() *
                                      cfg.wc_grid.size() * cfg.wh_grid.size();
                if (n == 0) throw std::domain_error("sweep: empty grid");
                if (cfg.jobs < 1) throw std::domain_error("sweep: jobs must be >= 1");
                if (cfg.gamma <= 0.0) throw std::domain_error("sweep: gamma must be > 0");
                break;
            }
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error("", e.what());
    }
    return cfg;
}

namespace detail {

inline void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp(path + ".tmp");
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw io_error("cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.flush();
        if (!f) throw io_error("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw io_error("cannot rename temporary file onto '" + path + "'");
    }
}

inline finite_time_params ft_from(const run_config& cfg) {
    finite_time_params ft;
    ft.gamma0 = cfg.gamma;
    ft.hot_duration = ft.cold_duration = cfg.duration;
    ft.dt = cfg.dt;
    return ft;
}

}  // namespace detail

// Runs the configured command and writes the report (file or `out`).
// Returns the process exit code.
inline int execute(const run_config& cfg, std::ostream& err, std::ostream& out) {
    try {
        const bool json = cfg.format == "json";
        std::string content;
        std::string dump;

        switch (cfg.kind) {
            case command_kind::otto: {
                const otto_spec spec(bath_temperature(cfg.tc), bath_temperature(cfg.th), cfg.wc,
                                     cfg.wh,
                                     cfg.mode == "finite_time" ? cycle_mode::finite_time
                                                               : cycle_mode::exact,
                                     detail::ft_from(cfg));
                trajectory path;
                const cycle_report rep = run_otto(spec, cfg.dump_path.empty() ? nullptr : &path);
                report::cycle_extras extras;
                extras.eta_formula = otto_efficiency(spec).value;
                extras.eta_carnot = carnot_efficiency(spec.t_cold, spec.t_hot);
                content = json ? report::cycle_json("otto", cfg.echo, rep, extras)
                               : report::cycle_csv("otto", cfg.echo, rep);
                if (!cfg.dump_path.empty()) dump = report::trajectory_csv(path);
                break;
            }
            case command_kind::carnot: {
                const carnot_spec spec(bath_temperature(cfg.tc), bath_temperature(cfg.th), cfg.wc,
                                       cfg.wh, static_cast<int>(cfg.steps));
                trajectory path;
                const cycle_report rep =
                    run_carnot(spec, cfg.dump_path.empty() ? nullptr : &path);
                report::cycle_extras extras;
                extras.eta_formula = carnot_efficiency(spec.t_cold, spec.t_hot);
                extras.eta_carnot = extras.eta_formula;
                extras.omega_h_prime = spec.omega_h_prime();
                extras.omega_c_prime = spec.omega_c_prime();
                content = json ? report::cycle_json("carnot", cfg.echo, rep, extras)
                               : report::cycle_csv("carnot", cfg.echo, rep);
                if (!cfg.dump_path.empty()) dump = report::trajectory_csv(path);
                break;
            }
            case command_kind::jarzynski: {
                const auto protocol = tpm_protocol::sudden_quench(cfg.beta, cfg.wc, cfg.wh);
                const auto result = jarzynski_check(protocol);
                const auto dist = tpm_distribution(protocol);
                const double df =
                    free_energy_difference(protocol.h_initial, protocol.h_final, cfg.beta);
                content = json ? report::jarzynski_json(cfg.echo, result, dist, cfg.beta, df)
                               : report::jarzynski_csv(cfg.echo, dist);
                break;
            }
            case command_kind::relax: {
                const qubit_hamiltonian h(cfg.wc);
                const bath_spec bath(bath_temperature(cfg.tc), cfg.gamma);
                const double gamma_total = qthermo::detail::rates_for(h, bath).total();
                const double duration =
                    cfg.duration > 0.0 ? cfg.duration : 40.0 / gamma_total;
                const double dt = cfg.dt > 0.0 ? cfg.dt : 0.08 / gamma_total;
                const auto rho0 = density_operator::from_populations(cfg.p0);
                const auto traj = thermalize(rho0, h, bath, duration, dt,
                                             cfg.mode == "exact" ? integration::closed_form
                                                                 : integration::rk4);
                report::relax_summary summary;
                summary.stroke = make_stroke_record(traj, "relax", bath.temperature);
                summary.initial_population = cfg.p0;
                summary.final_population = traj.back().state.excited_population();
                summary.equilibrium_population =
                    gibbs_state(h, bath.temperature).excited_population();
                summary.gamma_total = gamma_total;
                summary.duration = duration;
                content = json ? report::relax_json(cfg.echo, summary)
                               : report::relax_csv(cfg.echo, summary);
                if (!cfg.dump_path.empty()) dump = report::trajectory_csv(traj);
                break;
            }
            case command_kind::sweep: {
                sweep_grid grid;
                grid.t_cold = cfg.tc_grid;
                grid.t_hot = cfg.th_grid;
                grid.omega_c = cfg.wc_grid;
                grid.omega_h = cfg.wh_grid;
                grid.mode = cfg.mode == "finite_time" ? cycle_mode::finite_time
                                                      : cycle_mode::exact;
                grid.ft = detail::ft_from(cfg);
                const auto points = sweep(grid, static_cast<unsigned>(cfg.jobs));
                content = json ? report::sweep_json(cfg.echo, points)
                               : report::sweep_csv(cfg.echo, points);
                break;
            }
            case command_kind::deficit: {
                const otto_spec spec(bath_temperature(cfg.tc), bath_temperature(cfg.th), cfg.wc,
                                     cfg.wh);
                const auto d = otto_carnot_deficit(spec);
                content = json ? report::deficit_json(cfg.echo, d)
                               : report::deficit_csv(cfg.echo, d);
                break;
            }
        }

        if (!cfg.dump_path.empty() && !dump.empty()) detail::write_atomic(cfg.dump_path, dump);
        if (cfg.output.empty()) {
            out << content;
            if (!out) throw io_error("write to output stream failed");
        } else {
            detail::write_atomic(cfg.output, content);
        }
        return 0;
    } catch (const io_error& e) {
        err << "qthermo: i/o error: " << e.what() << "\n";
        return 4;
    } catch (const invariant_violation& e) {
        err << "qthermo: invariant violated [" << e.invariant << "]: " << e.what() << "\n";
        return 3;
    } catch (const integrator_error& e) {
        err << "qthermo: integrator error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "qthermo: runtime error: " << e.what() << "\n";
        return 3;
    }
}

inline const char* usage_text() {
    return "usage: qthermo <command> [--flag value ...]\n"
           "\n"
           "commands:\n"
           "  otto       four-stroke Otto cycle        (--tc --th --wc --wh --mode\n"
           "             [--gamma --duration --dt --dump-trajectory])\n"
           "  carnot     Carnot cycle with discretized isotherms (--tc --th --wc --wh\n"
           "             [--steps --dump-trajectory])\n"
           "  jarzynski  sudden-quench work statistics  (--beta --wc --wh)\n"
           "  relax      single thermalization stroke   (--tc --wc [--gamma --duration\n"
           "             --dt --p0 --mode --dump-trajectory])\n"
           "  sweep      Otto parameter sweep; values may be lo:hi:count ranges\n"
           "             (--tc --th --wc --wh [--mode --jobs])\n"
           "  deficit    Otto vs matched-Carnot work deficit (--tc --th --wc --wh)\n"
           "\n"
           "common flags: --format {json|csv}  --output PATH  --config FILE\n"
           "exit codes: 0 ok, 2 config error, 3 invariant violation, 4 i/o error\n";
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!args.empty() && (args[0] == "--help" || args[0] == "-h" || args[0] == "help")) {
        std::cout << usage_text();
        return 0;
    }
    try {
        const run_config cfg = parse_config(args);
        return execute(cfg, std::cerr, std::cout);
    } catch (const config_error& e) {
        std::cerr << "qthermo: config error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace qthermo::cli
