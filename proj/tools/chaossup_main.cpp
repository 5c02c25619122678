#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chaossup/config.hpp"
#include "chaossup/lyapunov.hpp"
#include "chaossup/report.hpp"
#include "chaossup/series_io.hpp"

namespace {

using namespace chaossup;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;   // usage / config errors
constexpr int kExitData = 2;    // unusable data (too short, degenerate, I/O)
constexpr int kExitUnmet = 3;   // reproduction gate not met

struct CommonFlags {
    std::string config_path;
    std::string method;
    std::string filter;
    std::string backend;
    std::string policy;
    std::string out;
    std::string dump_config;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "key = value config file");
    cmd->add_option("--method", flags.method, "rk3|rk4|rk5");
    cmd->add_option("--filter", flags.filter, "on|off");
    cmd->add_option("--backend", flags.backend, "hardware|emulated");
    cmd->add_option("--policy", flags.policy, "strict|matlab_faithful");
    cmd->add_option("--out", flags.out, "output path");
    cmd->add_option("--dump-config", flags.dump_config,
                    "write the effective configuration here");
}

ExperimentConfig build_config(const CommonFlags& flags) {
    ExperimentConfig cfg;
    if (!flags.config_path.empty())
        cfg = ExperimentConfig::load(flags.config_path);
    if (!flags.method.empty()) cfg.set("method", flags.method);
    if (!flags.filter.empty()) cfg.set("filter", flags.filter);
    if (!flags.backend.empty()) cfg.set("rounding_backend", flags.backend);
    if (!flags.policy.empty()) cfg.set("policy", flags.policy);
    if (!flags.out.empty()) cfg.set("out", flags.out);
    cfg.validate();
    if (!flags.dump_config.empty()) {
        std::ofstream os(flags.dump_config);
        if (!os) throw std::runtime_error("cannot write '" + flags.dump_config + "'");
        os << cfg.to_string();
    }
    return cfg;
}

int cmd_simulate(const CommonFlags& flags) {
    const ExperimentConfig cfg = build_config(flags);
    const Model model = find_model(cfg.model, cfg.params);
    const StepperConfig stepper = cfg.stepper();

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!cfg.out_path.empty()) {
        file.open(cfg.out_path);
        if (!file) {
            std::cerr << "error: cannot write '" << cfg.out_path << "'\n";
            return kExitData;
        }
        os = &file;
    }
    if (cfg.filter) {
        const CoupledOrbitPair pair =
            run_filtered(model, cfg.y0, stepper, cfg.policy, cfg.backend);
        write_pair_csv(*os, pair);
    } else {
        const PseudoOrbit orbit = run_traditional(
            model, cfg.y0, stepper, RoundingMode::ToNearestEven, cfg.backend);
        write_orbit_csv(*os, orbit);
    }
    return kExitOk;
}

std::vector<double> builtin_series(const std::string& name) {
    if (name == "builtin:logistic4") {
        std::vector<double> s(10000);
        s[0] = 0.65;
        for (std::size_t i = 1; i < s.size(); ++i)
            s[i] = 4.0 * s[i - 1] * (1.0 - s[i - 1]);
        return s;
    }
    if (name == "builtin:sine") {
        std::vector<double> s(10000);
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = std::sin(2.0 * M_PI * static_cast<double>(i) / 100.0);
        return s;
    }
    throw std::runtime_error("unknown builtin series '" + name +
                             "' (have builtin:logistic4, builtin:sine)");
}

int cmd_lyapunov(const CommonFlags& flags, const std::string& series_path,
                 const std::string& column, double sample_h) {
    ExperimentConfig cfg = build_config(flags);
    std::vector<double> series;
    double h = sample_h;
    if (!series_path.empty()) {
        if (series_path.rfind("builtin:", 0) == 0)
            series = builtin_series(series_path);
        else
            series = read_series(series_path, column);
    } else {
        // no series given: simulate per config and take the x trace
        const Model model = find_model(cfg.model, cfg.params);
        const StepperConfig stepper = cfg.stepper();
        if (cfg.filter) {
            const CoupledOrbitPair pair =
                run_filtered(model, cfg.y0, stepper, cfg.policy, cfg.backend);
            series.reserve(pair.averaged.states.size());
            for (std::size_t k = 0; k < pair.averaged.states.size(); ++k)
                series.push_back(pair.averaged.states.state(k)[0]);
        } else {
            const PseudoOrbit orbit = run_traditional(
                model, cfg.y0, stepper, RoundingMode::ToNearestEven, cfg.backend);
            series.reserve(orbit.states.size());
            for (std::size_t k = 0; k < orbit.states.size(); ++k)
                series.push_back(orbit.states.state(k)[0]);
        }
        h = cfg.h;
    }

    const LyapunovEstimate est = estimate_lambda_max(series, h, cfg.lyapunov);
    std::cout << "lambda_max = " << format_double(est.lambda_max) << "\n"
              << "tau = " << est.config.delay
              << (est.delay_fell_back ? " (fallback)" : "") << "\n"
              << "m = " << est.config.dimension
              << (est.dimension_fell_back ? " (fallback)" : "") << "\n"
              << "theiler = " << est.config.theiler_window << "\n"
              << "fit_range = [" << est.config.fit_min << ", "
              << est.config.fit_max << "]\n"
              << "fit_r2 = " << format_double(est.fit_r2) << "\n"
              << "series_len = " << est.series_len << "\n";
    return kExitOk;
}

int cmd_reproduce(const CommonFlags& flags) {
    const ExperimentConfig cfg = build_config(flags);
    const ReproductionReport report = run_reproduction(cfg.backend);
    std::cout << format_report(report);
    const std::string path =
        !cfg.report_path.empty() ? cfg.report_path : cfg.out_path;
    if (!path.empty()) {
        std::ofstream os(path);
        if (!os) {
            std::cerr << "error: cannot write '" << path << "'\n";
            return kExitData;
        }
        write_report_json(os, report);
    }
    return report.criteria_met() ? kExitOk : kExitUnmet;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled directed-rounding simulation of the Lorenz system "
                 "with per-step mode averaging and largest-Lyapunov-exponent "
                 "analysis"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string series_path, column = "x";
    double sample_h = 1.0;

    CLI::App* sim = app.add_subcommand(
        "simulate", "integrate one orbit (or the coupled pair) and emit CSV");
    add_common(sim, flags);

    CLI::App* lyap = app.add_subcommand(
        "lyapunov", "estimate the largest Lyapunov exponent of a series");
    add_common(lyap, flags);
    lyap->add_option("--series", series_path,
                     "series file (CSV or one value per line), or "
                     "builtin:logistic4 / builtin:sine; default: simulate per "
                     "config and use the x trace");
    lyap->add_option("--column", column, "CSV column to read (default x)");
    lyap->add_option("--sample-h", sample_h,
                     "sample interval of an external series (default 1)");

    CLI::App* rep = app.add_subcommand(
        "reproduce", "run all six exponent cells (rk3/rk4/rk5 x "
                     "traditional/filtered) at the default settings");
    add_common(rep, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(flags);
        if (lyap->parsed()) return cmd_lyapunov(flags, series_path, column, sample_h);
        if (rep->parsed()) return cmd_reproduce(flags);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SeriesTooShort& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const DegenerateSeries& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const NonFiniteState& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
