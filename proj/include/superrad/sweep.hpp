#pragma once

#include <string>
#include <vector>

#include "superrad/analysis.hpp"
#include "superrad/model.hpp"
#include "superrad/sde.hpp"

namespace superrad {

enum class Solver { twa, dtwa, meanfield, oracle };

std::string to_string(Solver s);
Solver solver_from_string(const std::string& s);

/// Throws ValidationError for combinations like twa with the individual scheme.
void check_solver(Scheme scheme, Solver solver);

/// Runs one configuration with any solver. Deterministic solvers report n_used = 1.
EnsembleResult run_solver(const Config& config, Solver solver, EnsembleOptions opts = {});

/**
 * Horizon used when none is given. Collective: (ln N + 8) / (Gamma N).
 * Individual: 3 (ln N + 4) / (gamma + N g^2 / kappa), capped at 1.5 / gamma.
 */
double default_horizon(const SystemParams& params, int n_atoms);

}  // namespace superrad

namespace superrad::analysis {

struct SweepRequest {
    SystemParams params;       // n_atoms is replaced per entry
    NumericalParams numerics;  // dt / t_max <= 0 select the per-N defaults
    Solver solver = Solver::twa;
    std::vector<int> n_list{50, 100, 200, 400};
    /// Multiplies the per-N default step (or the explicit dt) for convergence runs.
    double dt_scale = 1.0;
    /// Sub-ensembles used to estimate the uncertainty of I.
    int batches = 8;
};

struct SweepEntry {
    Config config;
    EmissionMeasurement emission;
    std::int64_t n_used = 0;
    std::int64_t n_divergent = 0;
    ObservableSeries series;
};

struct SweepResult {
    ScalingReport report;
    std::vector<SweepEntry> entries;
};

/// The validated configuration a sweep uses for atom number n.
Config sweep_config(const SweepRequest& request, int n);

/// Identity of a sweep for convergence comparisons: excludes dt, dt_scale and the trajectory count.
std::string sweep_fingerprint(const SweepRequest& request);

/**
 * Runs the solver for every N in order (each run uses all worker threads),
 * extracts I and fits the exponent. Per-N seeds are derived from the master
 * seed and N. Throws AnalysisError on an unresolved burst.
 */
SweepResult scaling_sweep(const SweepRequest& request, EnsembleOptions opts = {});

}  // namespace superrad::analysis
