#include "chaossup/report.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "chaossup/lyapunov.hpp"

namespace chaossup {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> x_component(const PseudoOrbit& orbit) {
    std::vector<double> xs;
    xs.reserve(orbit.states.size());
    for (std::size_t k = 0; k < orbit.states.size(); ++k)
        xs.push_back(orbit.states.state(k)[0]);
    return xs;
}

// the periodicity probe windows: full series for the traditional runs,
// the last half for the filtered runs
AutocorrPeak peak_of(const std::vector<double>& xs, bool tail_only, double h) {
    std::vector<double> window = xs;
    if (tail_only && xs.size() > 2)
        window.assign(xs.begin() + xs.size() / 2, xs.end());
    const int lag_min = std::max(1, static_cast<int>(std::lround(1.0 / h)));
    const int lag_max =
        std::min(static_cast<int>(window.size()) - 3,
                 static_cast<int>(window.size()) / 2);
    if (lag_max <= lag_min) return {};
    return autocorr_peak(window, lag_min, lag_max);
}

CellResult analyze(const std::vector<double>& xs, double h, bool tail_only) {
    CellResult cell;
    const std::vector<double> slice = estimation_slice(xs);
    const LyapunovEstimate est = estimate_lambda_max(slice, h);
    cell.lambda = est.lambda_max;
    cell.fit_r2 = est.fit_r2;
    cell.tau = est.config.delay;
    cell.dimension = est.config.dimension;
    const AutocorrPeak pk = peak_of(xs, tail_only, h);
    cell.autocorr_r = pk.r;
    cell.autocorr_lag_s = pk.lag * h;
    cell.ok = true;
    return cell;
}

} // namespace

std::vector<double> estimation_slice(const std::vector<double>& series) {
    const std::size_t drop =
        static_cast<std::size_t>(series.size() * kSettleFraction);
    return std::vector<double>(series.begin() + drop, series.end());
}

bool ReproductionReport::criteria_met() const {
    if (rows.size() != 3) return false;
    for (const auto& row : rows) {
        if (!row.traditional.ok || !row.filtered.ok) return false;
        if (!(row.traditional.lambda > 0.0)) return false;
        if (!(row.filtered.lambda < kSuppressedLambdaBound)) return false;
    }
    return true;
}

ReproductionReport run_reproduction(RoundingBackend backend) {
    const Clock::time_point t0 = Clock::now();
    const Experiment exp = default_experiment();
    const Model model = find_model("lorenz", exp.params);

    static constexpr struct {
        const char* method;
        double paper_traditional;
        double paper_filtered;
    } kPaperRows[] = {
        {"rk3", 0.344215, -0.011370},
        {"rk4", 0.087915, -0.001371},
        {"rk5", 0.165580, -0.001362},
    };

    ReproductionReport report;
    report.backend = backend;
    for (const auto& paper : kPaperRows) {
        ReproRow row;
        row.method = paper.method;
        row.paper_traditional = paper.paper_traditional;
        row.paper_filtered = paper.paper_filtered;
        const StepperConfig config{exp.h, exp.t_final, find_tableau(paper.method)};

        try {
            const Clock::time_point c0 = Clock::now();
            const PseudoOrbit orbit = run_traditional(
                model, exp.y0, config, RoundingMode::ToNearestEven, backend);
            row.traditional = analyze(x_component(orbit), exp.h, false);
            row.traditional.runtime_s = seconds_since(c0);
        } catch (const std::exception& e) {
            row.traditional.error = e.what();
        }
        try {
            const Clock::time_point c0 = Clock::now();
            const CoupledOrbitPair pair = run_filtered(
                model, exp.y0, config, RoundingPolicy::Strict, backend);
            row.filtered = analyze(x_component(pair.averaged), exp.h, true);
            row.filtered.runtime_s = seconds_since(c0);
        } catch (const std::exception& e) {
            row.filtered.error = e.what();
        }
        try {
            const Clock::time_point c0 = Clock::now();
            const CoupledOrbitPair pair = run_filtered(
                model, exp.y0, config, RoundingPolicy::MatlabFaithful, backend);
            row.matlab_faithful = analyze(x_component(pair.averaged), exp.h, true);
            row.matlab_faithful.runtime_s = seconds_since(c0);
        } catch (const std::exception& e) {
            row.matlab_faithful.error = e.what();
        }

        row.sign_match_traditional =
            row.traditional.ok && row.traditional.lambda > 0.0;
        row.sign_match_filtered =
            row.filtered.ok && row.filtered.lambda < kSuppressedLambdaBound;
        report.rows.push_back(std::move(row));
    }
    report.total_runtime_s = seconds_since(t0);
    return report;
}

namespace {

void cell_line(std::ostream& os, const char* label, const CellResult& c,
               double paper) {
    os << "  " << std::left << std::setw(16) << label;
    if (!c.ok) {
        os << "ERROR: " << c.error << "\n";
        return;
    }
    os << "lambda=" << std::setw(12) << format_double(c.lambda)
       << " paper=" << std::setw(10) << paper << " r2=" << std::setprecision(3)
       << c.fit_r2 << " tau=" << c.tau << " m=" << c.dimension
       << " acorr=" << std::setprecision(4) << c.autocorr_r << "@"
       << std::setprecision(3) << c.autocorr_lag_s << "s ("
       << std::setprecision(2) << c.runtime_s << "s)\n";
}

nlohmann::json cell_json(const CellResult& c) {
    if (!c.ok) return {{"ok", false}, {"error", c.error}};
    return {{"ok", true},
            {"lambda", c.lambda},
            {"fit_r2", c.fit_r2},
            {"tau", c.tau},
            {"m", c.dimension},
            {"autocorr_r", c.autocorr_r},
            {"autocorr_lag_s", c.autocorr_lag_s},
            {"runtime_s", c.runtime_s}};
}

} // namespace

std::string format_report(const ReproductionReport& report) {
    std::ostringstream os;
    os << "largest Lyapunov exponent, traditional vs filtered ("
       << to_string(report.backend) << " backend)\n";
    for (const auto& row : report.rows) {
        os << row.method << " (sign match: traditional="
           << (row.sign_match_traditional ? "yes" : "no")
           << ", filtered=" << (row.sign_match_filtered ? "yes" : "no") << ")\n";
        cell_line(os, "traditional", row.traditional, row.paper_traditional);
        cell_line(os, "filtered", row.filtered, row.paper_filtered);
        cell_line(os, "matlab_faithful", row.matlab_faithful, row.paper_filtered);
    }
    os << "total " << std::setprecision(3) << report.total_runtime_s << "s; gate "
       << (report.criteria_met() ? "met" : "NOT met")
       << " (traditional > 0, filtered < " << kSuppressedLambdaBound << ")\n";
    return os.str();
}

void write_report_json(std::ostream& os, const ReproductionReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"method", row.method},
                        {"traditional", cell_json(row.traditional)},
                        {"filtered", cell_json(row.filtered)},
                        {"matlab_faithful", cell_json(row.matlab_faithful)},
                        {"paper_traditional", row.paper_traditional},
                        {"paper_filtered", row.paper_filtered},
                        {"sign_match_traditional", row.sign_match_traditional},
                        {"sign_match_filtered", row.sign_match_filtered}});
    }
    const nlohmann::json doc = {{"rows", rows},
                                {"backend", to_string(report.backend)},
                                {"criteria_met", report.criteria_met()},
                                {"total_runtime_s", report.total_runtime_s}};
    os << doc.dump(2) << "\n";
}

} // namespace chaossup
