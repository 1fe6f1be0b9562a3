#include "superrad/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace superrad::analysis {

std::vector<double> moving_average(std::span<const double> y, int window) {
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("smoothing window must be an odd integer >= 1");
    const std::size_t n = y.size();
    const std::size_t half = static_cast<std::size_t>(window / 2);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t h = std::min({half, i, n - 1 - i});
        double s = 0.0;
        for (std::size_t j = i - h; j <= i + h; ++j) s += y[j];
        out[i] = s / static_cast<double>(2 * h + 1);
    }
    return out;
}

std::vector<double> derivative(std::span<const double> t, std::span<const double> y) {
    const std::size_t n = y.size();
    if (t.size() != n) throw std::invalid_argument("derivative: size mismatch");
    if (n < 2) throw std::invalid_argument("derivative: need at least two points");
    std::vector<double> d(n);
    if (n == 2) {
        d[0] = d[1] = (y[1] - y[0]) / (t[1] - t[0]);
        return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (t[i + 1] - t[i - 1]);
    // Lagrange three-point formulas at the ends (exact for quadratics on any spacing).
    auto edge = [](double x0, double x1, double x2, double y0, double y1, double y2) {
        const double h1 = x1 - x0;
        const double h2 = x2 - x0;
        return -y0 * (h1 + h2) / (h1 * h2) + y1 * h2 / (h1 * (h2 - h1)) - y2 * h1 / (h2 * (h2 - h1));
    };
    d[0] = edge(t[0], t[1], t[2], y[0], y[1], y[2]);
    d[n - 1] = edge(t[n - 1], t[n - 2], t[n - 3], y[n - 1], y[n - 2], y[n - 3]);
    return d;
}

EmissionMeasurement emission_strength(std::span<const double> t, std::span<const double> sz, int smoothing_window) {
    if (sz.size() < 3) throw AnalysisError("emission_strength: series too short");
    const std::vector<double> smooth = moving_average(sz, smoothing_window);
    const std::vector<double> d = derivative(t, smooth);
    // Slopes equal up to rounding count as ties and go to the earliest point.
    const double peak = -*std::min_element(d.begin(), d.end());
    const double slack = 1e-9 * std::max(std::abs(peak), std::numeric_limits<double>::min());
    std::size_t best = 0;
    while (-d[best] < peak - slack) ++best;
    EmissionMeasurement m;
    m.intensity = std::max(0.0, -d[best]);
    m.t0 = t[best];
    m.index = best;
    m.smoothing_window = smoothing_window;
    m.resolved = best + 1 != d.size();
    return m;
}

EmissionMeasurement emission_strength(const ObservableSeries& series, int smoothing_window) {
    return emission_strength(series.times, series.sz_mean, smoothing_window);
}

PowerLawFit power_law_fit(std::span<const ScalingPoint> points) {
    if (points.size() < 3) throw AnalysisError("power_law_fit: need at least 3 points");
    std::set<int> seen;
    for (const auto& p : points) {
        if (p.n <= 0) throw AnalysisError("power_law_fit: N must be positive (got " + std::to_string(p.n) + ")");
        if (!(p.intensity > 0.0) || !std::isfinite(p.intensity))
            throw AnalysisError("power_law_fit: nonpositive intensity at N=" + std::to_string(p.n));
        if (!seen.insert(p.n).second) throw AnalysisError("power_law_fit: duplicate N=" + std::to_string(p.n));
    }
    // Sort first so the result does not depend on the input order, bit for bit.
    std::vector<ScalingPoint> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
    const double k = static_cast<double>(sorted.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : sorted) {
        mx += std::log(static_cast<double>(p.n));
        my += std::log(p.intensity);
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : sorted) {
        const double dx = std::log(static_cast<double>(p.n)) - mx;
        const double dy = std::log(p.intensity) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    PowerLawFit f;
    f.zeta = sxy / sxx;
    f.intercept = my - f.zeta * mx;
    const double sse = std::max(0.0, syy - f.zeta * sxy);
    f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    f.zeta_stderr = k > 2.0 ? std::sqrt(sse / (k - 2.0) / sxx) : 0.0;
    if (!std::isfinite(f.zeta)) throw AnalysisError("power_law_fit: non-finite exponent");
    return f;
}

ScalingReport make_report(std::vector<ScalingPoint> points, std::string fingerprint) {
    ScalingReport r;
    r.fit = power_law_fit(points);
    r.points = std::move(points);
    r.fingerprint = std::move(fingerprint);
    return r;
}

Verdict convergence_check(const ScalingReport& a, const ScalingReport& b, double tolerance) {
    if (a.fingerprint != b.fingerprint) throw AnalysisError("convergence_check: reports are not comparable (configurations differ beyond dt and trajectory count)");
    Verdict v;
    v.tolerance = tolerance;
    v.delta = std::abs(a.fit.zeta - b.fit.zeta);
    // Small slack so that decimal inputs like 1.76 vs 1.78 sit on the right side.
    v.pass = v.delta <= tolerance + 1e-12;
    return v;
}

}  // namespace superrad::analysis
