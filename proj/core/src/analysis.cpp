// Copyright 2026 The rankp Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rankp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rankp {

namespace {

constexpr double kSupportSlack = 1e-9;
constexpr double kTinyDistance = 1e-300;

struct LogSeries {
    std::vector<double> log_n;
    std::vector<double> log_d;
};

LogSeries log_series(const TomographyTrace &trace) {
    LogSeries s;
    for (const auto &e : trace.entries) {
        if (!e.d_bures_sq || !(e.n_emit > 0.0)) {
            continue;
        }
        const double ln = std::log(e.n_emit);
        const double ld = std::log(std::max(*e.d_bures_sq, kTinyDistance));
        if (!s.log_n.empty() && ln <= s.log_n.back()) {
            // Repeated N keeps the latest estimate.
            s.log_d.back() = ld;
            continue;
        }
        s.log_n.push_back(ln);
        s.log_d.push_back(ld);
    }
    if (s.log_n.empty()) {
        throw std::invalid_argument("trace has no entries with a distance to average");
    }
    return s;
}

double interpolate(const LogSeries &s, double log_n) {
    if (s.log_n.size() == 1 || log_n <= s.log_n.front()) {
        return s.log_d.front();
    }
    if (log_n >= s.log_n.back()) {
        return s.log_d.back();
    }
    const auto it = std::upper_bound(s.log_n.begin(), s.log_n.end(), log_n);
    const auto hi = static_cast<std::size_t>(it - s.log_n.begin());
    const auto lo = hi - 1;
    const double t = (log_n - s.log_n[lo]) / (s.log_n[hi] - s.log_n[lo]);
    return s.log_d[lo] + t * (s.log_d[hi] - s.log_d[lo]);
}

} // namespace

ConvergenceCurve average_curves(std::span<const TomographyTrace> traces, const CurveOptions &opts) {
    if (traces.size() < 2) {
        throw std::invalid_argument("average_curves needs at least two traces");
    }
    if (!(opts.points_per_decade > 0.0)) {
        throw std::invalid_argument("average_curves: points_per_decade must be positive");
    }
    std::vector<LogSeries> series;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto &t : traces) {
        series.push_back(log_series(t));
        lo = std::max(lo, series.back().log_n.front());
        hi = std::min(hi, series.back().log_n.back());
    }
    if (lo > hi + kSupportSlack) {
        throw std::invalid_argument("average_curves: traces have disjoint N support");
    }

    const double ppd = opts.points_per_decade;
    const double ln10 = std::log(10.0);
    const auto k_lo = static_cast<long>(std::ceil(lo / ln10 * ppd - kSupportSlack * ppd));
    const auto k_hi = static_cast<long>(std::floor(hi / ln10 * ppd + kSupportSlack * ppd));

    ConvergenceCurve curve;
    curve.runs = static_cast<int>(traces.size());
    const double count = static_cast<double>(traces.size());
    for (long k = k_lo; k <= k_hi; ++k) {
        const double log_n = std::clamp(static_cast<double>(k) / ppd * ln10, lo, hi);
        double sum = 0.0;
        std::vector<double> values;
        for (const auto &s : series) {
            values.push_back(std::exp(interpolate(s, log_n)));
            sum += values.back();
        }
        const double mean = sum / count;
        double ss = 0.0;
        for (double v : values) {
            ss += (v - mean) * (v - mean);
        }
        const double sem = std::sqrt(ss / (count - 1.0) / count);
        curve.points.push_back({std::pow(10.0, static_cast<double>(k) / ppd), mean, sem});
    }
    if (curve.points.empty()) {
        throw std::invalid_argument("average_curves: common N support contains no grid point");
    }
    return curve;
}

PowerLawFit fit_power_law(const ConvergenceCurve &curve, double n_lo, double n_hi) {
    if (!(n_lo > 0.0) || !(n_lo < n_hi)) {
        throw std::invalid_argument("fit_power_law: degenerate window");
    }
    std::vector<CurvePoint> window;
    for (const auto &p : curve.points) {
        if (p.n >= n_lo * (1.0 - kSupportSlack) && p.n <= n_hi * (1.0 + kSupportSlack)) {
            if (!(p.mean > 0.0)) {
                throw std::invalid_argument("fit_power_law: non-positive mean in window");
            }
            window.push_back(p);
        }
    }
    if (window.size() < 5) {
        throw std::invalid_argument("fit_power_law: fewer than 5 points in the window");
    }
    const bool unit = std::any_of(window.begin(), window.end(),
                                  [](const CurvePoint &p) { return !(p.sem > 0.0); });

    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto &p : window) {
        const double x = std::log(p.n);
        const double y = std::log(p.mean);
        const double sigma = p.sem / p.mean;
        const double w = unit ? 1.0 : 1.0 / (sigma * sigma);
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
    }
    const double det = sw * sxx - sx * sx;
    if (!(det > 0.0)) {
        throw std::invalid_argument("fit_power_law: degenerate window");
    }
    const double slope = (sw * sxy - sx * sy) / det;
    const double intercept = (sxx * sy - sx * sxy) / det;

    double var_slope = sw / det;
    double var_intercept = sxx / det;
    if (unit) {
        // Scale by the residual variance when no per-point errors are known.
        double rss = 0.0;
        for (const auto &p : window) {
            const double r = std::log(p.mean) - (intercept + slope * std::log(p.n));
            rss += r * r;
        }
        const double s2 = window.size() > 2 ? rss / static_cast<double>(window.size() - 2) : 0.0;
        var_slope *= s2;
        var_intercept *= s2;
    }

    PowerLawFit fit;
    fit.alpha = std::exp(intercept);
    fit.beta = slope;
    fit.alpha_err = fit.alpha * std::sqrt(std::max(var_intercept, 0.0));
    fit.beta_err = std::sqrt(std::max(var_slope, 0.0));
    fit.n_lo = window.front().n;
    fit.n_hi = window.back().n;
    fit.points = static_cast<int>(window.size());
    return fit;
}

double efficiency_ratio(const PowerLawFit &fit1, const PowerLawFit &fit2, double n1, double n2) {
    if (!(fit1.alpha > 0.0) || !(fit2.alpha > 0.0)) {
        throw std::invalid_argument("efficiency_ratio: fits need alpha > 0");
    }
    if (!(n1 > 0.0) || !(n1 < n2)) {
        throw std::invalid_argument("efficiency_ratio: need 0 < N1 < N2");
    }
    // Evaluated in log space so that (n1 n2)^x cannot overflow.
    const double log_ratio = std::log(fit2.alpha) - std::log(fit1.alpha) +
                             0.5 * (fit2.beta - fit1.beta) * (std::log(n1) + std::log(n2));
    return std::exp(log_ratio);
}

double gill_massar_bound(double n, BoundKind kind) {
    if (!(n > 0.0)) {
        throw std::invalid_argument("gill_massar_bound: N must be positive");
    }
    return kind == BoundKind::MixedQubit ? 9.0 / (4.0 * n) : 1.0 / n;
}

double evaluate(const PowerLawFit &fit, double n) { return fit.alpha * std::pow(n, fit.beta); }

} // namespace rankp
