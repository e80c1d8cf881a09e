// Command-line driver: figure datasets, parameter sweeps, the validation
// suite, and eigensystem inspection for the dressed quantum-dot spin
// read-out simulator.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 validation failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "flq/config.hpp"
#include "flq/optics.hpp"
#include "flq/readout.hpp"
#include "flq/units.hpp"
#include "flq/validate.hpp"

namespace {

using namespace flq;

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    localtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
    return buf;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Output path for one dataset.  A user-provided --out is used verbatim
// (with the variant tag inserted before the extension when a subcommand
// emits more than one dataset).
std::string output_path(const std::string& out_override, const std::string& subcommand,
                        const std::string& variant) {
    if (!out_override.empty()) {
        if (variant.empty()) return out_override;
        const auto dot = out_override.rfind('.');
        if (dot == std::string::npos) return out_override + "-" + variant;
        return out_override.substr(0, dot) + "-" + variant + out_override.substr(dot);
    }
    std::string name = "out/" + subcommand;
    if (!variant.empty()) name += "-" + variant;
    return name + "-" + timestamp() + ".csv";
}

void write_table(const Table& table, const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + path + "'");
    out << to_csv(table);
    std::cout << "wrote " << path << " (" << table.rows.size() << " rows)\n";
}

void echo_config(const RunConfig& cfg) {
    std::cout << "# resolved configuration\n" << format_config(cfg) << "\n";
    if (cfg.drive.large_mixing_warning())
        std::cerr << "warning: dressing mixing ratio |Omega1p/Delta1| = "
                  << cfg.drive.mixing_ratio()
                  << " > 0.2; the dispersive regime is questionable\n";
}

int run_eigensystem(const RunConfig& cfg) {
    const auto es = pseudo_faraday_eigensystem(cfg.drive);
    std::cout << "pseudo-Faraday eigensystem (basis |e,z+>, |e,z->, |t,z+>, |t,z->):\n";
    for (const auto& st : es.states) {
        std::printf("  %-18s %14.9f GHz   [", to_string(st.label).c_str(),
                    units::to_ghz(st.value));
        for (int i = 0; i < 4; ++i)
            std::printf(" %+.6f%+.6fi", st.vector[i].real(), st.vector[i].imag());
        std::printf(" ]\n");
    }
    std::cout << "branching ratio r_B = " << branching_ratio(cfg.drive) << "\n";
    std::cout << "resonant Delta2 (z- target) = "
              << fmt17(resonant_detuning_for_readout(cfg.drive, SpinSign::Minus))
              << " GHz\n";
    std::cout << "resonant Delta2 (z+ target) = "
              << fmt17(resonant_detuning_for_readout(cfg.drive, SpinSign::Plus))
              << " GHz\n";
    std::cout << "electron spin precession timescale hbar/delta_e = "
              << spin_precession_time_ns(cfg.drive.bx_tesla, cfg.drive.g_ex) * 1e3
              << " ps (dressing turn-on must be slow against this)\n";
    return 0;
}

int run_validate(const RunConfig& cfg) {
    const auto results = check::run_validation_suite(cfg);
    bool all_ok = true;
    for (const auto& r : results) {
        std::printf("%-4s %-28s  metric %.3e  bound %.3e  %s\n",
                    r.passed ? "PASS" : "FAIL", r.name.c_str(), r.metric, r.bound,
                    r.detail.c_str());
        all_ok = all_ok && r.passed;
    }
    return all_ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optical spin read-out simulator for a driven quantum dot"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path, prob_model, sweep_param;
    std::vector<std::string> sets;
    int threads = 0;
    int m_override = std::numeric_limits<int>::min();
    double sweep_from = 0.0, sweep_to = 0.0;
    int sweep_points = 21;

    app.add_option("--config", config_path, "configuration file (INI sections)");
    app.add_option("--set", sets, "override, e.g. drive.Omega1p_GHz=150")->type_size(1);
    app.add_option("--out", out_path, "output CSV path");
    app.add_option("--threads", threads, "worker threads for sweeps")
        ->envname("FLOQUET_READOUT_THREADS");
    app.add_option("--M", m_override, "fix the Floquet truncation order");
    app.add_option("--prob-model", prob_model, "poisson | capped-linear")
        ->check(CLI::IsMember({"poisson", "capped-linear"}));

    auto* cmd_fig2 = app.add_subcommand("fig2", "Zeeman and dressing-shift splittings");
    auto* cmd_fig3 = app.add_subcommand("fig3", "eigenfrequency traces, field then dressing");
    auto* cmd_fig4 = app.add_subcommand("fig4", "branching ratio vs dressing strength");
    auto* cmd_fig5 = app.add_subcommand("fig5", "full read-out run: rates, counts, fidelity");
    auto* cmd_sweep = app.add_subcommand("sweep", "read-out figures of merit vs one parameter");
    auto* cmd_validate = app.add_subcommand("validate", "oracle and invariant checks");
    auto* cmd_eigen = app.add_subcommand("eigensystem", "labeled eigensystem and detunings");

    cmd_sweep->add_option("--param", sweep_param, "config key, e.g. drive.Omega1p_GHz")
        ->required();
    cmd_sweep->add_option("--from", sweep_from, "first value")->required();
    cmd_sweep->add_option("--to", sweep_to, "last value")->required();
    cmd_sweep->add_option("--points", sweep_points, "grid points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = default_run_config();
        if (cmd_fig4->parsed()) {
            // branching-ratio sweeps use the swapped g-factor pair unless
            // the user overrides them
            cfg.drive.g_ex = 0.47;
            cfg.drive.g_hx = 0.24;
        }
        if (!config_path.empty()) cfg = parse_config_file(config_path, cfg);
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ParseError("--set expects key=value, got '" + kv + "'");
            apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (m_override != std::numeric_limits<int>::min()) cfg.engine.m_override = m_override;
        if (threads > 0) cfg.engine.threads = threads;
        if (prob_model == "poisson") cfg.prob_model = ProbabilityModel::Poisson;
        if (prob_model == "capped-linear") cfg.prob_model = ProbabilityModel::CappedLinear;
        cfg.validate();
        echo_config(cfg);

        if (cmd_eigen->parsed()) return run_eigensystem(cfg);
        if (cmd_validate->parsed()) return run_validate(cfg);

        if (cmd_fig2->parsed()) {
            write_table(fig2_zeeman(cfg.drive), output_path(out_path, "fig2", "zeeman"));
            write_table(fig2_acstark(cfg.drive), output_path(out_path, "fig2", "acstark"));
        } else if (cmd_fig3->parsed()) {
            write_table(fig3_bfield(cfg.drive), output_path(out_path, "fig3", "bfield"));
            write_table(fig3_rabi(cfg.drive), output_path(out_path, "fig3", "rabi"));
        } else if (cmd_fig4->parsed()) {
            const Table t = fig4(cfg.drive);
            write_table(t, output_path(out_path, "fig4", ""));
            std::cout << "r_B at Omega1p = " << t.rows.back()[0]
                      << " GHz: " << t.rows.back()[1] << "\n";
        } else if (cmd_fig5->parsed()) {
            ReadoutResult res;
            const Table t = fig5(cfg.readout_config(), &res);
            write_table(t, output_path(out_path, "fig5", ""));
            std::printf(
                "T* = %.1f ns   F* = %.1f%%   D* = %.3f   (M = %d, Delta2 = %s GHz)\n",
                res.t_star, 100.0 * res.f_star, res.d_star, res.m_used,
                fmt17(res.delta2_ghz).c_str());
        } else if (cmd_sweep->parsed()) {
            const RunConfig base = cfg;
            const std::string key = sweep_param;
            auto set = [&base, &key](ReadoutConfig& rc, double v) {
                RunConfig point = base;
                apply_override(point, key, fmt17(v));
                point.validate();
                rc = point.readout_config();
            };
            const Table t = sweep_readout(cfg.readout_config(), sweep_param, set,
                                          sweep_from, sweep_to, sweep_points,
                                          std::max(1, cfg.engine.threads));
            write_table(t, output_path(out_path, "sweep", ""));
        }
        return 0;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
