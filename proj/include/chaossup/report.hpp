#ifndef CHAOSSUP_REPORT_HPP
#define CHAOSSUP_REPORT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "chaossup/config.hpp"

namespace chaossup {

/// Outcome of one (method, methodology) cell of the reproduction run.
struct CellResult {
    bool ok = false;
    std::string error;
    double lambda = 0.0;
    double fit_r2 = 0.0;
    int tau = 0;
    int dimension = 0;
    double autocorr_r = 0.0; // strongest self-correlation peak
    double autocorr_lag_s = 0.0;
    double runtime_s = 0.0;
};

struct ReproRow {
    std::string method;
    CellResult traditional;
    CellResult filtered;          // Strict policy
    CellResult matlab_faithful;   // supplementary, same metrics
    double paper_traditional = 0.0;
    double paper_filtered = 0.0;
    bool sign_match_traditional = false; // positive exponent, as reported
    bool sign_match_filtered = false;    // suppressed exponent (< 0.01)
};

struct ReproductionReport {
    std::vector<ReproRow> rows; // rk3, rk4, rk5 in order
    RoundingBackend backend = RoundingBackend::HardwareEnv;
    double total_runtime_s = 0.0;

    /// The gate the CLI exit status reflects: every traditional cell has
    /// lambda > 0 and every Strict filtered cell has lambda < 0.01.
    bool criteria_met() const;
};

/// Suppressed-exponent bound for the filtered cells.
inline constexpr double kSuppressedLambdaBound = 0.01;

/// Share of the run discarded before exponent estimation (the filtered
/// system needs most of the horizon to settle onto its attractor).
inline constexpr double kSettleFraction = 0.6;

/// x-series slice an exponent is estimated on, shared by every cell.
std::vector<double> estimation_slice(const std::vector<double>& series);

/// Runs all six Table-style cells (three methods, traditional and
/// filtered) plus the matlab_faithful supplement. Per-cell failures are
/// recorded in the cell, not propagated.
ReproductionReport run_reproduction(RoundingBackend backend);

std::string format_report(const ReproductionReport& report);
void write_report_json(std::ostream& os, const ReproductionReport& report);

} // namespace chaossup

#endif
