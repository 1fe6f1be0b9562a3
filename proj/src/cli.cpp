#include "superrad/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "superrad/analysis.hpp"
#include "superrad/io.hpp"
#include "superrad/kernels.hpp"
#include "superrad/oracle.hpp"
#include "superrad/sweep.hpp"

namespace superrad::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

// Flags shared by simulate and sweep. Defaults apply only when neither a flag nor the config file sets a value.
struct RunFlags {
    std::string scheme = "collective";
    std::string solver;
    int n_atoms = 100;
    double g = 0.0;
    double kappa = 1.0;
    double gamma = 1.0;
    double detuning = 0.0;
    double t_max = 0.0;
    double dt = 0.0;
    std::int64_t trajectories = 2000;
    std::uint64_t seed = 0;
    std::string out;
    std::string config;
    int smoothing_window = 5;
    int photon_cutoff = -1;
    std::string alpha_amplitude = "fock";
    int threads = 0;

    std::vector<int> n_list{50, 100, 200, 400};
    double dt_scale = 1.0;
    int batches = 8;

    std::map<std::string, CLI::Option*> opt;

    bool given(const std::string& name) const {
        auto it = opt.find(name);
        return it != opt.end() && it->second->count() > 0;
    }
};

void add_run_flags(CLI::App* app, RunFlags& f, bool sweep) {
    f.opt["scheme"] = app->add_option("--scheme", f.scheme, "Emission scheme")
                          ->check(CLI::IsMember({"collective", "individual"}));
    f.opt["solver"] = app->add_option("--solver", f.solver, "Solver (default: twa for collective, dtwa for individual)")
                          ->check(CLI::IsMember({"twa", "dtwa", "meanfield", "oracle"}));
    if (!sweep) f.opt["n_atoms"] = app->add_option("--n-atoms", f.n_atoms, "Number of atoms N");
    f.opt["g"] = app->add_option("--g", f.g, "Atom-cavity coupling, in units of the decay rate");
    f.opt["kappa"] = app->add_option("--kappa", f.kappa, "Cavity half-linewidth (default 1)");
    f.opt["gamma"] = app->add_option("--gamma", f.gamma, "Atomic decay half-rate of the active scheme (default 1)");
    f.opt["detuning"] = app->add_option("--detuning", f.detuning, "omega_c - omega_a in the rotating frame (default 0)");
    f.opt["t_max"] = app->add_option("--t-max", f.t_max, "Simulation horizon (default: scheme-dependent)");
    f.opt["dt"] = app->add_option("--dt", f.dt, "Time step (default: min(1e-3, 0.05/(gamma N)))");
    f.opt["trajectories"] = app->add_option("--trajectories", f.trajectories, "Trajectory count M (default 2000)");
    f.opt["seed"] = app->add_option("--seed", f.seed, "Master seed");
    f.opt["out"] = app->add_option("--out", f.out, "Output directory");
    f.opt["config"] = app->add_option("--config", f.config, "JSON config file (or a manifest); flags override it")
                          ->check(CLI::ExistingFile);
    f.opt["smoothing_window"] = app->add_option("--smoothing-window", f.smoothing_window, "Odd moving-average window");
    f.opt["photon_cutoff"] = app->add_option("--photon-cutoff", f.photon_cutoff, "Oracle Fock cutoff (default N+1)");
    f.opt["alpha_amplitude"] = app->add_option("--alpha-amplitude", f.alpha_amplitude, "Initial |alpha|: fock (sqrt N) or symmetric (sqrt(N+1/2))")
                                   ->check(CLI::IsMember({"fock", "symmetric"}));
    f.opt["threads"] = app->add_option("--threads", f.threads, "Worker threads (default: SUPERRAD_THREADS or all cores)");
    if (sweep) {
        f.opt["n_list"] = app->add_option("--n-list", f.n_list, "Comma-separated atom numbers")->delimiter(',');
        f.opt["dt_scale"] = app->add_option("--dt-scale", f.dt_scale, "Multiplier on the per-N time step");
        f.opt["batches"] = app->add_option("--batches", f.batches, "Sub-ensembles for the uncertainty of I");
    }
}

struct Resolved {
    SystemParams params;
    NumericalParams numerics;
    Solver solver = Solver::twa;
    std::vector<int> n_list;
    double dt_scale = 1.0;
    int batches = 8;
};

Resolved resolve(const RunFlags& f) {
    Resolved r;
    SystemParams& p = r.params;
    NumericalParams& n = r.numerics;
    p.gamma_col = 1.0;
    p.kappa = f.kappa;
    p.n_atoms = f.n_atoms;
    n.dt = 0.0;
    n.t_max = 0.0;
    n.n_traj = f.trajectories;
    r.n_list = f.n_list;
    std::string solver = f.solver;

    if (f.given("config")) {
        json j = io::read_json(f.config);
        if (j.is_object() && j.contains("config") && j.contains("digests")) j = j["config"];
        if (!j.is_object()) throw ValidationError({"config file must hold a JSON object"});
        try {
            if (j.contains("solver")) {
                if (!f.given("solver")) solver = j["solver"].get<std::string>();
                j.erase("solver");
            }
            if (j.contains("n_list")) {
                if (!f.given("n_list")) r.n_list = j["n_list"].get<std::vector<int>>();
                j.erase("n_list");
            }
            if (j.contains("dt_scale")) {
                r.dt_scale = j["dt_scale"].get<double>();
                j.erase("dt_scale");
            }
            if (j.contains("batches")) {
                r.batches = j["batches"].get<int>();
                j.erase("batches");
            }
            // Per-N policies are recorded as null in sweep manifests.
            for (const char* k : {"dt", "t_max"})
                if (j.contains(k) && j[k].is_null()) j[k] = 0.0;
            io::config_from_json(j, p, n);
        } catch (const json::exception& e) {
            throw ValidationError({std::string("bad config file: ") + e.what()});
        } catch (const io::IoError& e) {
            throw ValidationError({e.what()});
        }
    }

    if (f.given("scheme")) {
        const Scheme s = scheme_from_string(f.scheme);
        if (s != p.scheme()) {
            const double rate = p.decay_rate();
            p.gamma_col.reset();
            p.gamma_ind.reset();
            (s == Scheme::collective ? p.gamma_col : p.gamma_ind) = rate;
        }
    }
    if (f.given("gamma")) (p.scheme() == Scheme::collective ? p.gamma_col : p.gamma_ind) = f.gamma;
    if (f.given("n_atoms")) p.n_atoms = f.n_atoms;
    if (f.given("g")) p.g = f.g;
    if (f.given("kappa")) p.kappa = f.kappa;
    if (f.given("detuning")) {
        p.frame = Frame::rotating;
        p.omega_a = 0.0;
        p.omega_c = f.detuning;
    }
    if (f.given("t_max")) n.t_max = f.t_max;
    if (f.given("dt")) n.dt = f.dt;
    if (f.given("trajectories")) n.n_traj = f.trajectories;
    if (f.given("seed")) n.seed = f.seed;
    if (f.given("smoothing_window")) n.smoothing_window = f.smoothing_window;
    if (f.given("photon_cutoff")) n.photon_cutoff = f.photon_cutoff;
    if (f.given("alpha_amplitude")) n.alpha_amplitude = alpha_amplitude_from_string(f.alpha_amplitude);
    if (f.given("dt_scale")) r.dt_scale = f.dt_scale;
    if (f.given("batches")) r.batches = f.batches;

    if (solver.empty()) solver = p.scheme() == Scheme::collective ? "twa" : "dtwa";
    try {
        r.solver = solver_from_string(solver);
    } catch (const std::invalid_argument& e) {
        throw ValidationError({e.what()});
    }
    check_solver(p.scheme(), r.solver);
    return r;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

io::RunManifest base_manifest(const Resolved& r) {
    io::RunManifest m;
    m.seed = r.numerics.seed;
    m.solver = to_string(r.solver);
    m.kernel = kernels::to_string(kernels::active());
    return m;
}

int run_simulate(const RunFlags& f, std::ostream& out, std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    Resolved r = resolve(f);
    const double rate = r.params.decay_rate();
    if (r.numerics.dt <= 0.0) r.numerics.dt = rate > 0.0 ? default_time_step(rate, r.params.n_atoms) : 1e-3;
    if (r.numerics.t_max <= 0.0)
        r.numerics.t_max = rate > 0.0 ? default_horizon(r.params, r.params.n_atoms) : 1.0;
    const Config config = validate_params(r.params, r.numerics);
    if (r.solver == Solver::oracle) {
        const int cutoff = config.numerics().photon_cutoff < 0 ? config.system().n_atoms + 1 : config.numerics().photon_cutoff;
        if (cutoff < config.system().n_atoms + 1)
            throw ValidationError({"photon_cutoff must be >= n_atoms + 1 for oracle runs"});
    }

    EnsembleOptions opts;
    opts.threads = f.threads;
    const EnsembleResult run = run_solver(config, r.solver, opts);
    if (run.n_divergent > 0)
        err << "warning: " << run.n_divergent << " divergent trajectories excluded\n";

    const fs::path dir = f.out.empty() ? fs::path("superrad_out") : fs::path(f.out);
    const fs::path csv = dir / "timeseries.csv";
    io::write_timeseries(run.series, csv);

    io::RunManifest m = base_manifest(r);
    m.config = io::config_to_json(config.system(), config.numerics());
    m.config["solver"] = to_string(r.solver);
    m.seed = config.numerics().seed;
    m.divergent = run.n_divergent;
    m.digests[csv.filename().string()] = io::sha256_file(csv);
    m.wall_seconds = seconds_since(t0);
    io::write_manifest(m, dir / "manifest.json");
    out << "wrote " << csv.string() << " (" << run.series.size() << " points, " << run.n_used << " trajectories used, "
        << run.n_divergent << " divergent)\n";
    return ok;
}

int run_sweep(const RunFlags& f, std::ostream& out, std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    const Resolved r = resolve(f);
    analysis::SweepRequest req;
    req.params = r.params;
    req.numerics = r.numerics;
    req.solver = r.solver;
    req.n_list = r.n_list;
    req.dt_scale = r.dt_scale;
    req.batches = r.batches;
    {
        std::vector<int> sorted = req.n_list;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ValidationError({"--n-list entries must be distinct"});
    }
    EnsembleOptions opts;
    opts.threads = f.threads;
    const analysis::SweepResult res = analysis::scaling_sweep(req, opts);

    io::RunManifest m = base_manifest(r);
    m.config = io::config_to_json(r.params, r.numerics);
    m.config.erase("n_atoms");
    if (r.numerics.dt <= 0.0) m.config["dt"] = nullptr;
    if (r.numerics.t_max <= 0.0) m.config["t_max"] = nullptr;
    m.config["solver"] = to_string(r.solver);
    m.config["n_list"] = r.n_list;
    m.config["dt_scale"] = r.dt_scale;
    m.config["batches"] = r.batches;
    std::int64_t divergent = 0;
    for (const auto& e : res.entries) divergent += e.n_divergent;
    m.divergent = divergent;
    if (divergent > 0) err << "warning: " << divergent << " divergent trajectories excluded\n";

    if (!f.out.empty()) {
        const fs::path dir(f.out);
        for (const auto& e : res.entries) {
            const fs::path csv = dir / ("series_N" + std::to_string(e.config.system().n_atoms) + ".csv");
            io::write_timeseries(e.series, csv);
            m.digests[csv.filename().string()] = io::sha256_file(csv);
        }
        m.wall_seconds = seconds_since(t0);
        io::write_report(res.report, m, dir / "report.json");
        out << "zeta = " << res.report.fit.zeta << " (r^2 = " << res.report.fit.r_squared << "), report "
            << (dir / "report.json").string() << "\n";
    } else {
        m.wall_seconds = seconds_since(t0);
        out << io::report_to_json(res.report, &m).dump(2) << "\n";
    }
    return ok;
}

int run_fit(const std::string& input, const std::string& out_path, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<analysis::ScalingPoint> points;
    std::string fingerprint;
    try {
        points = io::read_points(input);
        const json j = io::read_json(input);
        if (j.is_object()) fingerprint = j.value("fingerprint", "");
    } catch (const io::IoError&) {
        if (points.empty()) throw;
    }
    analysis::ScalingReport rep;
    try {
        rep = analysis::make_report(std::move(points), fingerprint);
    } catch (const analysis::AnalysisError& e) {
        throw ValidationError({e.what()});
    }
    io::RunManifest m;
    m.config = json::object();
    m.config["input"] = input;
    m.solver = "fit";
    m.digests[fs::path(input).filename().string()] = io::sha256_file(input);
    m.wall_seconds = seconds_since(t0);
    if (out_path.empty()) {
        out << io::report_to_json(rep, &m).dump(2) << "\n";
    } else {
        io::write_report(rep, m, out_path);
        out << "zeta = " << rep.fit.zeta << "\n";
    }
    return ok;
}

int run_check(const std::vector<std::string>& files, double tolerance, std::ostream& out, std::ostream& err) {
    if (files.size() != 2) throw ValidationError({"check needs exactly two report files"});
    const auto a = io::read_report(files[0]);
    const auto b = io::read_report(files[1]);
    analysis::Verdict v;
    try {
        v = analysis::convergence_check(a, b, tolerance);
    } catch (const analysis::AnalysisError& e) {
        throw ValidationError({e.what()});
    }
    json j;
    j["verdict"] = v.pass ? "pass" : "fail";
    j["delta"] = v.delta;
    j["tolerance"] = v.tolerance;
    j["zeta_a"] = a.fit.zeta;
    j["zeta_b"] = b.fit.zeta;
    out << j.dump(2) << "\n";
    if (!v.pass) err << "convergence check failed: |delta zeta| = " << v.delta << " > " << v.tolerance << "\n";
    return v.pass ? ok : validation_error;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Phase-space and master-equation simulator for cavity superradiance", "superrad"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::version_string());

    RunFlags sim_flags;
    auto* simulate = app.add_subcommand("simulate", "Run one configuration and write a time series and manifest");
    add_run_flags(simulate, sim_flags, false);

    RunFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "Scan N, extract the emission strength and fit I ~ N^zeta");
    add_run_flags(sweep, sweep_flags, true);

    std::string fit_input, fit_out;
    auto* fit = app.add_subcommand("fit", "Power-law fit of a points file (CSV n,intensity[,sem] or a report)");
    fit->add_option("--input", fit_input, "Points or report file")->required()->check(CLI::ExistingFile);
    fit->add_option("--out", fit_out, "Write the fit report here instead of stdout");

    std::vector<std::string> check_files;
    double tolerance = 0.02;
    auto* check = app.add_subcommand("check", "Compare the exponents of two reports");
    check->add_option("reports", check_files, "Two report files")->expected(2)->check(CLI::ExistingFile);
    check->add_option("--input", check_files, "Report file (give twice)")->check(CLI::ExistingFile);
    check->add_option("--tolerance", tolerance, "Largest accepted |delta zeta| (default 0.02)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : validation_error;
    }

    try {
        if (*simulate) return run_simulate(sim_flags, out, err);
        if (*sweep) return run_sweep(sweep_flags, out, err);
        if (*fit) return run_fit(fit_input, fit_out, out);
        if (*check) return run_check(check_files, tolerance, out, err);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        CLI::App* active = *simulate ? simulate : *sweep ? sweep : *fit ? fit : check;
        err << active->help();
        return validation_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return validation_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return runtime_failure;
    }
    return validation_error;
}

int dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace superrad::cli
