#include "superrad/collective.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace superrad::collective {

namespace {

constexpr complex I{0.0, 1.0};

void require_collective(const SystemParams& p) {
    if (p.scheme() != Scheme::collective) throw std::invalid_argument("collective solver needs gamma_col to be set");
}

}  // namespace

CollectiveDerivative collective_drift(const CollectivePhasePoint& p, const SystemParams& params) {
    const double gam = params.decay_rate();
    const double a2 = std::norm(p.alpha);
    const double b2 = std::norm(p.beta);
    // omega_a * S_z = (omega_a / 2)(a^dag a - b^dag b)
    const double half_wa = 0.5 * params.omega_a;
    return {
        -I * half_wa * p.alpha - I * params.g * p.beta * p.eta - gam * (b2 + 0.5) * p.alpha,
        I * half_wa * p.beta - I * params.g * p.alpha * std::conj(p.eta) + gam * (a2 - 0.5) * p.beta,
        -I * params.omega_c * p.eta - I * params.g * p.alpha * std::conj(p.beta) - params.kappa * p.eta,
    };
}

CollectivePhasePoint collective_noise(const CollectivePhasePoint& p, const SystemParams& params, std::span<const double> dw) {
    if (dw.size() != 6) throw std::invalid_argument("collective noise needs 6 Wiener increments");
    const double gam = params.decay_rate();
    const double na = std::sqrt(std::max(0.0, gam * (std::norm(p.beta) + 0.5)) / 2.0);
    const double nb = std::sqrt(std::max(0.0, gam * (std::norm(p.alpha) - 0.5)) / 2.0);
    const double nc = std::sqrt(params.kappa / 2.0);
    return {na * complex(dw[0], dw[1]), nb * complex(dw[2], dw[3]), nc * complex(dw[4], dw[5])};
}

CollectivePhasePoint sample_collective_initial(int n_atoms, const rng::StreamId& stream, AlphaAmplitude amplitude) {
    if (n_atoms < 1) throw std::invalid_argument("sample_collective_initial needs n_atoms >= 1");
    double z[4];
    rng::fill_normals(stream, z);
    const auto u = rng::uniforms(rng::raw_block(stream, 2));
    const double phi = 2.0 * std::numbers::pi * u.closed_low;
    const double n = static_cast<double>(n_atoms);
    const double r = std::sqrt(amplitude == AlphaAmplitude::fock ? n : n + 0.5);
    // Vacuum Wigner function: <|beta|^2> = 1/2, i.e. variance 1/4 per quadrature.
    return {std::polar(r, phi), complex(0.5 * z[0], 0.5 * z[1]), complex(0.5 * z[2], 0.5 * z[3])};
}

Observation observe(const CollectivePhasePoint& p) {
    return {0.5 * (std::norm(p.alpha) - std::norm(p.beta)), std::norm(p.eta) - 0.5};
}

Observation collective_observables(std::span<const CollectivePhasePoint> ensemble) {
    if (ensemble.empty()) throw std::invalid_argument("collective_observables: empty ensemble");
    Observation acc;
    for (const auto& p : ensemble) {
        const Observation o = observe(p);
        acc.sz += o.sz;
        acc.photon += o.photon;
    }
    const double m = static_cast<double>(ensemble.size());
    return {acc.sz / m, acc.photon / m};
}

MeanFieldCollectiveState meanfield_collective_rhs(const MeanFieldCollectiveState& s, const SystemParams& params, int n_atoms) {
    const double gam = params.decay_rate();
    const double j = 0.5 * n_atoms;
    const complex sminus = std::conj(s.splus);
    const complex coupling = -I * params.g * s.c * s.splus + I * params.g * std::conj(s.c) * sminus;
    return {
        coupling.real() - 2.0 * gam * (j * (j + 1.0) - s.sz * s.sz + s.sz),
        I * params.omega_a * s.splus - 2.0 * I * params.g * std::conj(s.c) * s.sz - gam * s.splus,
        -I * params.omega_c * s.c - I * params.g * sminus - params.kappa * s.c,
    };
}

ObservableSeries integrate_meanfield(const Config& config) {
    const SystemParams& p = config.system();
    require_collective(p);
    const NumericalParams& num = config.numerics();
    const std::int64_t n_steps = num.n_steps();
    const int n = p.n_atoms;

    auto axpy = [](const MeanFieldCollectiveState& y, const MeanFieldCollectiveState& k, double h) {
        return MeanFieldCollectiveState{y.sz + h * k.sz, y.splus + h * k.splus, y.c + h * k.c};
    };

    ObservableSeries out;
    out.n_atoms = n;
    out.resize(static_cast<std::size_t>(n_steps) + 1);
    MeanFieldCollectiveState y{0.5 * n, {}, {}};
    const double h = num.dt;
    for (std::int64_t k = 0;; ++k) {
        const auto i = static_cast<std::size_t>(k);
        out.times[i] = static_cast<double>(k) * h;
        out.sz_mean[i] = y.sz;
        out.photon_mean[i] = std::norm(y.c);
        if (k == n_steps) break;
        const auto k1 = meanfield_collective_rhs(y, p, n);
        const auto k2 = meanfield_collective_rhs(axpy(y, k1, h / 2), p, n);
        const auto k3 = meanfield_collective_rhs(axpy(y, k2, h / 2), p, n);
        const auto k4 = meanfield_collective_rhs(axpy(y, k3, h), p, n);
        y.sz += h / 6 * (k1.sz + 2 * k2.sz + 2 * k3.sz + k4.sz);
        y.splus += h / 6 * (k1.splus + 2.0 * k2.splus + 2.0 * k3.splus + k4.splus);
        y.c += h / 6 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c);
    }
    return out;
}

TwaModel::TwaModel(const Config& config) : params_(config.system()), amplitude_(config.numerics().alpha_amplitude) {
    require_collective(params_);
}

TwaModel::State TwaModel::sample_initial(const TrajectorySchedule& sch) const {
    return sample_collective_initial(params_.n_atoms, sch.stream(rng::initial_step), amplitude_);
}

Observation TwaModel::step(State& s, std::span<const double> dw, double dt) const {
    s = euler_maruyama_step(
        s,
        [this](const State& x) {
            const auto d = collective_drift(x, params_);
            return State{d.d_alpha, d.d_beta, d.d_eta};
        },
        [this](const State& x, std::span<const double> w) { return collective_noise(x, params_, w); }, dw, dt);
    return collective::observe(s);
}

EnsembleResult simulate_twa(const Config& config, EnsembleOptions opts) {
    const TwaModel model(config);
    return run_ensemble(model, config.numerics(), config.system().n_atoms, opts);
}

}  // namespace superrad::collective
