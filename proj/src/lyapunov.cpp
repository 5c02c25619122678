#include "chaossup/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chaossup {

namespace {

constexpr std::size_t kMinSelectionLen = 1000; // meaningful MI/FNN statistics

void require_varying(std::span<const double> s) {
    for (double v : s)
        if (v != s[0]) return;
    throw DegenerateSeries("all samples identical");
}

// Indices of the `count` nearest neighbors of every point, excluding the
// Theiler window around the reference and zero-distance twins. Ties keep
// the lower index. -1 marks a missing neighbor.
std::vector<int> nearest_neighbors(const StateSequence& pts, int theiler,
                                   int count) {
    const int m = static_cast<int>(pts.dim);
    const int n = static_cast<int>(pts.size());
    const double* data = pts.data.data();
    std::vector<int> nn(static_cast<std::size_t>(n) * count, -1);
    std::vector<double> best_d(count);
    std::vector<int> best_i(count);

    for (int i = 0; i < n; ++i) {
        int found = 0;
        const double* pi = data + static_cast<std::size_t>(i) * m;
        for (int j = 0; j < n; ++j) {
            if (j >= i - theiler && j <= i + theiler) continue;
            const double* pj = data + static_cast<std::size_t>(j) * m;
            double d2 = 0.0;
            for (int c = 0; c < m; ++c) {
                const double diff = pi[c] - pj[c];
                d2 += diff * diff;
            }
            if (d2 == 0.0) continue;
            if (found < count) {
                int pos = found++;
                while (pos > 0 && best_d[pos - 1] > d2) {
                    best_d[pos] = best_d[pos - 1];
                    best_i[pos] = best_i[pos - 1];
                    --pos;
                }
                best_d[pos] = d2;
                best_i[pos] = j;
            } else if (d2 < best_d[count - 1]) {
                int pos = count - 1;
                while (pos > 0 && best_d[pos - 1] > d2) {
                    best_d[pos] = best_d[pos - 1];
                    best_i[pos] = best_i[pos - 1];
                    --pos;
                }
                best_d[pos] = d2;
                best_i[pos] = j;
            }
        }
        for (int c = 0; c < found; ++c)
            nn[static_cast<std::size_t>(i) * count + c] = best_i[c];
    }
    return nn;
}

struct LineFit {
    double slope = 0.0;
    double r2 = 0.0;
    int points = 0;
};

LineFit fit_line(const std::vector<double>& curve, int kmin, int kmax) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int k = kmin; k <= kmax && k < static_cast<int>(curve.size()); ++k) {
        if (!std::isfinite(curve[k])) continue;
        const double x = k, y = curve[k];
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    LineFit fit;
    fit.points = n;
    if (n < 2) return fit;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.slope * sx) / n;
    double ssr = 0, sst = 0;
    const double mean = sy / n;
    for (int k = kmin; k <= kmax && k < static_cast<int>(curve.size()); ++k) {
        if (!std::isfinite(curve[k])) continue;
        const double pred = fit.slope * k + intercept;
        ssr += (curve[k] - pred) * (curve[k] - pred);
        sst += (curve[k] - mean) * (curve[k] - mean);
    }
    fit.r2 = sst > 0.0 ? std::max(0.0, 1.0 - ssr / sst) : 0.0;
    return fit;
}

} // namespace

StateSequence embed(std::span<const double> series, int tau, int m) {
    if (tau < 1 || m < 1) throw std::invalid_argument("embed: tau >= 1, m >= 1");
    const std::size_t window = static_cast<std::size_t>(m - 1) * tau;
    if (series.size() < window + 1)
        throw SeriesTooShort("need at least (m-1)*tau + 1 samples to embed");
    const std::size_t n = series.size() - window;
    StateSequence pts;
    pts.dim = static_cast<std::size_t>(m);
    pts.data.resize(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c)
            pts.data[i * m + c] = series[i + static_cast<std::size_t>(c) * tau];
    return pts;
}

double mutual_information(std::span<const double> series, int tau, int bins) {
    if (tau < 1 || bins < 2)
        throw std::invalid_argument("mutual_information: tau >= 1, bins >= 2");
    if (series.size() < static_cast<std::size_t>(tau) + 2)
        throw SeriesTooShort("mutual information needs more than tau samples");
    const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi == lo) throw DegenerateSeries("constant series has no information");

    const std::size_t n = series.size() - tau;
    auto bin_of = [&](double v) {
        int b = static_cast<int>((v - lo) / (hi - lo) * bins);
        return std::min(b, bins - 1);
    };
    std::vector<double> joint(static_cast<std::size_t>(bins) * bins, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        joint[static_cast<std::size_t>(bin_of(series[i])) * bins +
              bin_of(series[i + tau])] += 1.0;
    std::vector<double> pa(bins, 0.0), pb(bins, 0.0);
    for (int r = 0; r < bins; ++r)
        for (int c = 0; c < bins; ++c) {
            joint[static_cast<std::size_t>(r) * bins + c] /= static_cast<double>(n);
            pa[r] += joint[static_cast<std::size_t>(r) * bins + c];
            pb[c] += joint[static_cast<std::size_t>(r) * bins + c];
        }
    double mi = 0.0;
    for (int r = 0; r < bins; ++r)
        for (int c = 0; c < bins; ++c) {
            const double p = joint[static_cast<std::size_t>(r) * bins + c];
            if (p > 0.0) mi += p * std::log(p / (pa[r] * pb[c]));
        }
    return mi;
}

std::optional<int> choose_delay(std::span<const double> series, int max_delay,
                                int bins) {
    if (series.size() < kMinSelectionLen)
        throw SeriesTooShort("delay selection needs >= 1000 samples");
    require_varying(series);

    const int n = max_delay;
    std::vector<double> mi(n);
    for (int tau = 1; tau <= n; ++tau)
        mi[tau - 1] = mutual_information(series, tau, bins);

    // 5-point moving average
    constexpr int w = 2;
    std::vector<double> sm(n);
    for (int i = 0; i < n; ++i) {
        const int a = std::max(0, i - w), b = std::min(n - 1, i + w);
        double acc = 0.0;
        for (int k = a; k <= b; ++k) acc += mi[k];
        sm[i] = acc / (b - a + 1);
    }

    constexpr int span = 3;
    for (int i = span; i < n - span; ++i) {
        double seg_min = sm[i - span];
        for (int k = i - span + 1; k <= i + span; ++k)
            seg_min = std::min(seg_min, sm[k]);
        if (sm[i] <= seg_min && sm[i] < sm[i - span] && sm[i] < sm[i + span])
            return i + 1; // mi[0] is tau = 1
    }
    return std::nullopt;
}

double fnn_fraction(std::span<const double> series, int tau, int m,
                    double ratio_tol, double size_tol) {
    // only points with an (m+1)-th coordinate can be classified
    const std::size_t full = static_cast<std::size_t>(m) * tau;
    if (series.size() < full + 1)
        throw SeriesTooShort("false-neighbor scan needs (m*tau + 1) samples");
    const std::size_t n_next = series.size() - full;

    StateSequence pts = embed(series, tau, m);
    pts.data.resize(n_next * pts.dim);

    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(series.size()));
    if (sd == 0.0) throw DegenerateSeries("constant series");

    const std::vector<int> nn = nearest_neighbors(pts, tau, 1);
    std::size_t false_count = 0, total = 0;
    for (std::size_t i = 0; i < n_next; ++i) {
        const int j = nn[i];
        if (j < 0) continue;
        double d2 = 0.0;
        for (int c = 0; c < m; ++c) {
            const double diff = pts.data[i * m + c] -
                                pts.data[static_cast<std::size_t>(j) * m + c];
            d2 += diff * diff;
        }
        const double d = std::sqrt(d2);
        if (d == 0.0) continue;
        const double extra =
            std::fabs(series[i + full] - series[static_cast<std::size_t>(j) + full]);
        ++total;
        if (extra / d > ratio_tol ||
            std::sqrt(d2 + extra * extra) / sd > size_tol)
            ++false_count;
    }
    if (total == 0) return 1.0;
    return static_cast<double>(false_count) / static_cast<double>(total);
}

std::optional<int> choose_dimension(std::span<const double> series, int tau,
                                    int max_dim, double threshold,
                                    double ratio_tol, double size_tol) {
    if (series.size() < kMinSelectionLen)
        throw SeriesTooShort("dimension selection needs >= 1000 samples");
    require_varying(series);
    for (int m = 1; m <= max_dim; ++m)
        if (fnn_fraction(series, tau, m, ratio_tol, size_tol) < threshold)
            return m;
    return std::nullopt;
}

std::vector<double> divergence_curve(std::span<const double> series, int tau,
                                     int m, int theiler, int kmax,
                                     int neighbor_count) {
    const StateSequence pts = embed(series, tau, m);
    const int n = static_cast<int>(pts.size());
    const std::vector<int> nn = nearest_neighbors(pts, theiler, neighbor_count);

    std::vector<double> curve(static_cast<std::size_t>(kmax) + 1,
                              std::numeric_limits<double>::quiet_NaN());
    for (int k = 0; k <= kmax; ++k) {
        double acc = 0.0;
        std::size_t cnt = 0;
        for (int i = 0; i + k < n; ++i) {
            for (int c = 0; c < neighbor_count; ++c) {
                const int j = nn[static_cast<std::size_t>(i) * neighbor_count + c];
                if (j < 0 || j + k >= n) continue;
                double d2 = 0.0;
                for (int q = 0; q < m; ++q) {
                    const double diff =
                        pts.data[static_cast<std::size_t>(i + k) * m + q] -
                        pts.data[static_cast<std::size_t>(j + k) * m + q];
                    d2 += diff * diff;
                }
                if (d2 > 0.0) {
                    acc += 0.5 * std::log(d2);
                    ++cnt;
                }
            }
        }
        if (cnt > 0) curve[k] = acc / static_cast<double>(cnt);
    }
    return curve;
}

LyapunovEstimate estimate_lambda_max(std::span<const double> series, double h,
                                     EmbeddingConfig cfg) {
    if (!(h > 0.0)) throw std::invalid_argument("sample interval h must be > 0");
    if (series.size() < 4) throw SeriesTooShort("nothing to estimate from");
    require_varying(series);

    LyapunovEstimate est;
    est.series_len = series.size();

    if (cfg.delay < 1) {
        const auto tau = choose_delay(series, cfg.mi_max_delay, cfg.mi_bins);
        est.delay_fell_back = !tau.has_value();
        cfg.delay = tau.value_or(cfg.fallback_delay);
    }
    if (cfg.dimension < 1) {
        const auto m =
            choose_dimension(series, cfg.delay, cfg.fnn_max_dim,
                             cfg.fnn_threshold, cfg.fnn_ratio_tol, cfg.fnn_size_tol);
        est.dimension_fell_back = !m.has_value();
        cfg.dimension = m.value_or(cfg.fallback_dimension);
    }
    if (cfg.theiler_window < 0) cfg.theiler_window = cfg.delay * cfg.dimension;

    const StateSequence pts = embed(series, cfg.delay, cfg.dimension);
    const int npts = static_cast<int>(pts.size());
    if (npts - 1 <= cfg.fit_min)
        throw SeriesTooShort("embedded cloud does not reach the fit window");
    const int kmax = std::min(cfg.fit_max, npts - 2);

    const std::vector<double> curve = divergence_curve(
        series, cfg.delay, cfg.dimension, cfg.theiler_window, kmax,
        cfg.neighbor_count);

    const LineFit fit = fit_line(curve, cfg.fit_min, kmax);
    if (fit.points < 2)
        throw DegenerateSeries("no neighbor pairs survive in the fit window");

    est.lambda_max = fit.slope / h;
    est.fit_r2 = fit.r2;
    est.config = cfg;
    return est;
}

AutocorrPeak autocorr_peak(std::span<const double> series, int lag_min,
                           int lag_max) {
    const int n = static_cast<int>(series.size());
    if (lag_min < 1 || lag_max < lag_min || lag_max >= n - 2)
        throw std::invalid_argument("autocorr_peak: bad lag range");
    AutocorrPeak best;
    for (int lag = lag_min; lag <= lag_max; ++lag) {
        const int len = n - lag;
        double ma = 0.0, mb = 0.0;
        for (int i = 0; i < len; ++i) {
            ma += series[i];
            mb += series[i + lag];
        }
        ma /= len;
        mb /= len;
        double sab = 0.0, saa = 0.0, sbb = 0.0;
        for (int i = 0; i < len; ++i) {
            const double a = series[i] - ma;
            const double b = series[i + lag] - mb;
            sab += a * b;
            saa += a * a;
            sbb += b * b;
        }
        if (saa == 0.0 || sbb == 0.0) continue;
        const double r = sab / std::sqrt(saa * sbb);
        if (r > best.r) {
            best.r = r;
            best.lag = lag;
        }
    }
    return best;
}

} // namespace chaossup
