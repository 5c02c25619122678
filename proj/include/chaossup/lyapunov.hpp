#ifndef CHAOSSUP_LYAPUNOV_HPP
#define CHAOSSUP_LYAPUNOV_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "chaossup/stepper.hpp"

namespace chaossup {

class SeriesTooShort : public std::runtime_error {
public:
    explicit SeriesTooShort(const std::string& what)
        : std::runtime_error("series too short: " + what) {}
};

class DegenerateSeries : public std::runtime_error {
public:
    explicit DegenerateSeries(const std::string& what)
        : std::runtime_error("degenerate series: " + what) {}
};

/// Parameters of the largest-exponent estimation. delay/dimension of 0 and
/// theiler_window of -1 mean "select automatically" (mutual-information
/// first minimum, false-nearest-neighbor search, delay*dimension).
struct EmbeddingConfig {
    int delay = 0;
    int dimension = 0;
    int theiler_window = -1;
    int fit_min = 80;       // divergence-curve fit window, in samples
    int fit_max = 300;
    int neighbor_count = 1;

    int mi_bins = 16;
    int mi_max_delay = 100;
    int fnn_max_dim = 8;
    double fnn_ratio_tol = 15.0;
    double fnn_size_tol = 2.0;
    double fnn_threshold = 0.01;

    int fallback_delay = 10;
    int fallback_dimension = 3;
};

struct LyapunovEstimate {
    double lambda_max = 0.0; // per unit time (slope per sample / h)
    double fit_r2 = 0.0;
    EmbeddingConfig config;  // with auto fields resolved
    std::size_t series_len = 0;
    bool delay_fell_back = false;
    bool dimension_fell_back = false;
};

/// Delay embedding: points v_i = (s_i, s_{i+tau}, ..., s_{i+(m-1)tau}),
/// count N - (m-1)*tau. Throws SeriesTooShort.
StateSequence embed(std::span<const double> series, int tau, int m);

/// Time-delayed mutual information in nats over an equal-width joint
/// histogram of (s_t, s_{t+tau}). Throws DegenerateSeries for a constant
/// series.
double mutual_information(std::span<const double> series, int tau, int bins = 16);

/// First local minimum of the mutual-information curve tau = 1..max_delay,
/// located on a 5-point moving average of the curve (the raw curve is too
/// jagged for a pointwise rule). nullopt when no interior minimum exists;
/// callers fall back to a configured default.
std::optional<int> choose_delay(std::span<const double> series,
                                int max_delay = 100, int bins = 16);

/// Fraction of false nearest neighbors of the m-dimensional embedding
/// (distance-ratio and attractor-size criteria).
double fnn_fraction(std::span<const double> series, int tau, int m,
                    double ratio_tol = 15.0, double size_tol = 2.0);

/// Smallest dimension whose false-neighbor fraction drops below
/// `threshold`, scanning m = 1..max_dim. nullopt when none qualifies
/// (noise-like series).
std::optional<int> choose_dimension(std::span<const double> series, int tau,
                                    int max_dim = 8, double threshold = 0.01,
                                    double ratio_tol = 15.0,
                                    double size_tol = 2.0);

/// Mean log-distance between each reference point and its nearest
/// neighbor(s), tracked k steps ahead: curve[k] = <ln d_k>. NaN entries
/// mark horizons with no surviving pairs.
std::vector<double> divergence_curve(std::span<const double> series, int tau,
                                     int m, int theiler, int kmax,
                                     int neighbor_count = 1);

/// Nearest-neighbor divergence estimate of the largest Lyapunov exponent:
/// slope of the linear fit to the divergence curve over
/// [fit_min, fit_max], divided by h. Deterministic for fixed inputs.
LyapunovEstimate estimate_lambda_max(std::span<const double> series, double h,
                                     EmbeddingConfig cfg = {});

/// Strongest Pearson self-correlation of the series over the lag range;
/// a peak near 1 at some lag marks a repeating cycle of that period.
struct AutocorrPeak {
    double r = -1.0;
    int lag = 0;
};
AutocorrPeak autocorr_peak(std::span<const double> series, int lag_min,
                           int lag_max);

} // namespace chaossup

#endif
