#include "superrad/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "superrad/collective.hpp"
#include "superrad/individual.hpp"
#include "superrad/oracle.hpp"
#include "superrad/rng.hpp"

namespace superrad {

std::string to_string(Solver s) {
    switch (s) {
        case Solver::twa: return "twa";
        case Solver::dtwa: return "dtwa";
        case Solver::meanfield: return "meanfield";
        case Solver::oracle: return "oracle";
    }
    return "?";
}

Solver solver_from_string(const std::string& s) {
    if (s == "twa") return Solver::twa;
    if (s == "dtwa") return Solver::dtwa;
    if (s == "meanfield" || s == "mean-field") return Solver::meanfield;
    if (s == "oracle") return Solver::oracle;
    throw std::invalid_argument("unknown solver '" + s + "' (expected twa, dtwa, meanfield or oracle)");
}

void check_solver(Scheme scheme, Solver solver) {
    if (solver == Solver::twa && scheme != Scheme::collective)
        throw ValidationError({"solver twa requires the collective scheme"});
    if (solver == Solver::dtwa && scheme != Scheme::individual)
        throw ValidationError({"solver dtwa requires the individual scheme"});
}

EnsembleResult run_solver(const Config& config, Solver solver, EnsembleOptions opts) {
    const Scheme scheme = config.system().scheme();
    check_solver(scheme, solver);
    auto deterministic = [](ObservableSeries s) {
        EnsembleResult r;
        r.series = std::move(s);
        r.n_used = 1;
        return r;
    };
    switch (solver) {
        case Solver::twa: return collective::simulate_twa(config, opts);
        case Solver::dtwa: return individual::simulate_dtwa(config, opts);
        case Solver::meanfield:
            return deterministic(scheme == Scheme::collective ? collective::integrate_meanfield(config)
                                                              : individual::integrate_meanfield(config));
        case Solver::oracle: return deterministic(oracle::simulate(config));
    }
    throw std::logic_error("run_solver: bad solver");
}

double default_horizon(const SystemParams& params, int n_atoms) {
    const double rate = params.decay_rate();
    const double n = static_cast<double>(n_atoms);
    if (params.scheme() == Scheme::collective) return (std::log(n) + 8.0) / (rate * n);
    // Cavity-mediated collective rate; the burst comes after a few of its inverse.
    const double cavity = params.kappa > 0.0 ? n * params.g * params.g / params.kappa : 0.0;
    return std::min(1.5 / rate, 3.0 * (std::log(n) + 4.0) / (rate + cavity));
}

}  // namespace superrad

namespace superrad::analysis {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

Config sweep_config(const SweepRequest& request, int n) {
    SystemParams p = request.params;
    p.n_atoms = n;
    NumericalParams nm = request.numerics;
    const double rate = p.decay_rate();
    if (!(rate > 0.0)) throw ValidationError({"scaling sweeps need a positive decay rate"});
    const double dt = nm.dt > 0.0 ? nm.dt : default_time_step(rate, n);
    nm.dt = dt * request.dt_scale;
    if (!(nm.t_max > 0.0)) nm.t_max = default_horizon(p, n);
    nm.seed = rng::mix_seed(request.numerics.seed, static_cast<std::uint64_t>(n));
    return validate_params(p, nm);
}

std::string sweep_fingerprint(const SweepRequest& request) {
    const SystemParams& p = request.params;
    const NumericalParams& nm = request.numerics;
    // Frame-normalized frequencies so lab and rotating descriptions of one run compare equal.
    SystemParams q = p;
    q.n_atoms = 1;
    NumericalParams probe;
    probe.dt = 1e-3;
    probe.t_max = 1.0;
    const Config c = validate_params(q, probe);
    std::string f = "scheme=" + to_string(p.scheme()) + ";solver=" + to_string(request.solver);
    f += ";omega_a=" + num(c.system().omega_a) + ";omega_c=" + num(c.system().omega_c);
    f += ";g=" + num(p.g) + ";rate=" + num(p.decay_rate()) + ";kappa=" + num(p.kappa);
    f += ";n_list=";
    for (std::size_t i = 0; i < request.n_list.size(); ++i) f += (i ? "," : "") + std::to_string(request.n_list[i]);
    f += ";t_max=" + (nm.t_max > 0.0 ? num(nm.t_max) : std::string("auto"));
    f += ";seed=" + std::to_string(nm.seed);
    f += ";window=" + std::to_string(nm.smoothing_window);
    f += ";alpha=" + to_string(nm.alpha_amplitude);
    f += ";cutoff=" + std::to_string(nm.photon_cutoff);
    return f;
}

SweepResult scaling_sweep(const SweepRequest& request, EnsembleOptions opts) {
    if (request.n_list.size() < 3) throw ValidationError({"a sweep needs at least 3 atom numbers"});
    if (!(request.dt_scale > 0.0)) throw ValidationError({"dt_scale must be positive"});
    check_solver(request.params.scheme(), request.solver);
    SweepResult out;
    std::vector<ScalingPoint> points;
    opts.batches = request.batches;
    for (int n : request.n_list) {
        const Config config = sweep_config(request, n);
        const EnsembleResult run = run_solver(config, request.solver, opts);
        const int window = config.numerics().smoothing_window;
        const EmissionMeasurement em = emission_strength(run.series, window);
        if (!em.resolved)
            throw AnalysisError("unresolved burst at N=" + std::to_string(n) + ": the steepest descent is at t_max=" +
                                num(em.t0) + "; increase t_max");
        ScalingPoint pt;
        pt.n = n;
        pt.intensity = em.intensity;
        pt.t0 = em.t0;
        pt.divergent = run.n_divergent;
        if (run.batch_sz_mean.size() > 1) {
            // Spread of I over independent sub-ensembles, scaled to the full ensemble.
            std::vector<double> ib;
            for (const auto& sz : run.batch_sz_mean) ib.push_back(emission_strength(run.series.times, sz, window).intensity);
            double mean = 0.0;
            for (double v : ib) mean += v;
            mean /= static_cast<double>(ib.size());
            double var = 0.0;
            for (double v : ib) var += (v - mean) * (v - mean);
            var /= static_cast<double>(ib.size() - 1);
            pt.sem = std::sqrt(var / static_cast<double>(ib.size()));
        }
        points.push_back(pt);
        out.entries.push_back({config, em, run.n_used, run.n_divergent, run.series});
    }
    out.report = make_report(std::move(points), sweep_fingerprint(request));
    return out;
}

}  // namespace superrad::analysis
