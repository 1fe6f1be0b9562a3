#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "superrad/model.hpp"

namespace superrad::analysis {

class AnalysisError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Peak emission rate I = max_t -d<S_z>/dt and where it happens.
struct EmissionMeasurement {
    double intensity = 0.0;
    double t0 = 0.0;
    std::size_t index = 0;
    int smoothing_window = 5;
    std::string method = "max-slope";
    /// False when the maximum sits on the last grid point.
    bool resolved = true;
};

/// Centred moving average; the window shrinks symmetrically near the ends.
std::vector<double> moving_average(std::span<const double> y, int window);

/// Three-point derivative: central in the interior, second-order one-sided at the ends.
std::vector<double> derivative(std::span<const double> t, std::span<const double> y);

/// Smooths sz with an odd window, differentiates, and takes the earliest maximum of -dS_z/dt.
EmissionMeasurement emission_strength(std::span<const double> t, std::span<const double> sz, int smoothing_window = 5);
EmissionMeasurement emission_strength(const ObservableSeries& series, int smoothing_window = 5);

struct ScalingPoint {
    int n = 0;
    double intensity = 0.0;
    double sem = 0.0;
    double t0 = 0.0;
    std::int64_t divergent = 0;
};

struct PowerLawFit {
    double zeta = 0.0;
    double intercept = 0.0;  // natural log of the prefactor
    double r_squared = 0.0;
    double zeta_stderr = 0.0;
};

/// Ordinary least squares of log I on log N. Needs at least 3 points with distinct N.
PowerLawFit power_law_fit(std::span<const ScalingPoint> points);

struct ScalingReport {
    std::vector<ScalingPoint> points;
    PowerLawFit fit;
    /// Everything that defines the sweep except dt, the trajectory count and run-time details.
    std::string fingerprint;
};

/// Fits `points` and packs them into a report.
ScalingReport make_report(std::vector<ScalingPoint> points, std::string fingerprint = {});

struct Verdict {
    bool pass = false;
    double delta = 0.0;
    double tolerance = 0.02;
};

/// Passes iff |zeta_a - zeta_b| <= tolerance. Throws AnalysisError if the fingerprints differ.
Verdict convergence_check(const ScalingReport& a, const ScalingReport& b, double tolerance = 0.02);

}  // namespace superrad::analysis
