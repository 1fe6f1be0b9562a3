#include "superrad/individual.hpp"

#include <cmath>
#include <stdexcept>

#include "superrad/kernels.hpp"

namespace superrad::individual {

namespace {

constexpr complex I{0.0, 1.0};

void require_individual(const SystemParams& p) {
    if (p.scheme() != Scheme::individual) throw std::invalid_argument("individual solver needs gamma_ind to be set");
}

// The cavity normals live in block 0; atom i draws its two signs from block 1 + i / 4.
constexpr std::uint32_t first_atom_block = 1;

}  // namespace

SpinLatticeState DtwaDerivative::as_state() const {
    SpinLatticeState s(dsx.size());
    s.sx = dsx;
    s.sy = dsy;
    s.sz = dsz;
    s.eta = d_eta;
    return s;
}

DtwaDerivative dtwa_drift(const SpinLatticeState& s, const SystemParams& params) {
    const std::size_t n = s.size();
    const double gam = params.decay_rate();
    const double er = s.eta.real();
    const double ei = s.eta.imag();
    const double g = params.g;
    DtwaDerivative d{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), {}};
    complex sminus_sum{};
    for (std::size_t i = 0; i < n; ++i) {
        d.dsx[i] = -params.omega_a * s.sy[i] - 2.0 * g * s.sz[i] * ei - gam * s.sx[i];
        d.dsy[i] = params.omega_a * s.sx[i] - 2.0 * g * s.sz[i] * er - gam * s.sy[i];
        d.dsz[i] = 2.0 * g * (s.sy[i] * er + s.sx[i] * ei) - 2.0 * gam * (s.sz[i] + 1.0);
        sminus_sum += complex(s.sx[i], -s.sy[i]);
    }
    d.d_eta = -I * params.omega_c * s.eta - params.kappa * s.eta - 0.5 * I * g * sminus_sum;
    return d;
}

SpinLatticeState dtwa_noise(const SpinLatticeState& s, const SystemParams& params, std::span<const double> dw) {
    const std::size_t n = s.size();
    if (dw.size() != n + 2) throw std::invalid_argument("dtwa noise needs N + 2 Wiener increments");
    const double amp = std::sqrt(2.0 * params.decay_rate());
    SpinLatticeState out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.sx[i] = -amp * s.sy[i] * dw[i];
        out.sy[i] = amp * s.sx[i] * dw[i];
        out.sz[i] = amp * (s.sz[i] + 1.0) * dw[i];
    }
    out.eta = std::sqrt(params.kappa / 2.0) * complex(dw[n], dw[n + 1]);
    return out;
}

SpinLatticeState sample_dtwa_initial(int n_atoms, const rng::StreamId& stream) {
    if (n_atoms < 1) throw std::invalid_argument("sample_dtwa_initial needs n_atoms >= 1");
    const auto n = static_cast<std::size_t>(n_atoms);
    SpinLatticeState s(n);
    rng::Counter bits{};
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 4 == 0) bits = rng::raw_block(stream, first_atom_block + static_cast<std::uint32_t>(i / 4));
        const std::uint32_t w = bits[i % 4];
        s.sx[i] = (w & 1u) ? 1.0 : -1.0;
        s.sy[i] = (w & 2u) ? 1.0 : -1.0;
        s.sz[i] = 1.0;
    }
    double z[2];
    rng::fill_normals(stream, z);
    s.eta = complex(0.5 * z[0], 0.5 * z[1]);
    return s;
}

Observation observe(const SpinLatticeState& s) {
    double sum = 0.0;
    for (double z : s.sz) sum += z;
    return {0.5 * sum, std::norm(s.eta) - 0.5};
}

Observation dtwa_observables(std::span<const SpinLatticeState> ensemble) {
    if (ensemble.empty()) throw std::invalid_argument("dtwa_observables: empty ensemble");
    Observation acc;
    for (const auto& s : ensemble) {
        const Observation o = observe(s);
        acc.sz += o.sz;
        acc.photon += o.photon;
    }
    const double m = static_cast<double>(ensemble.size());
    return {acc.sz / m, acc.photon / m};
}

MeanFieldIndividualState meanfield_individual_rhs(const MeanFieldIndividualState& s, const SystemParams& params) {
    const double gam = params.decay_rate();
    const double g = params.g;
    const std::size_t n = s.sz.size();
    MeanFieldIndividualState d{std::vector<double>(n), std::vector<complex>(n), {}};
    complex sminus_sum{};
    for (std::size_t i = 0; i < n; ++i) {
        const complex sm = std::conj(s.splus[i]);
        const complex coupling = -2.0 * I * g * s.c * s.splus[i] + 2.0 * I * g * std::conj(s.c) * sm;
        d.sz[i] = coupling.real() - 2.0 * gam * (1.0 + s.sz[i]);
        d.splus[i] = I * params.omega_a * s.splus[i] - I * g * std::conj(s.c) * s.sz[i] - gam * s.splus[i];
        sminus_sum += sm;
    }
    d.c = -I * params.omega_c * s.c - I * g * sminus_sum - params.kappa * s.c;
    return d;
}

ObservableSeries integrate_meanfield(const Config& config) {
    const SystemParams& p = config.system();
    require_individual(p);
    const NumericalParams& num = config.numerics();
    const std::int64_t n_steps = num.n_steps();
    const auto n = static_cast<std::size_t>(p.n_atoms);

    auto axpy = [n](const MeanFieldIndividualState& y, const MeanFieldIndividualState& k, double h) {
        MeanFieldIndividualState r = y;
        for (std::size_t i = 0; i < n; ++i) {
            r.sz[i] += h * k.sz[i];
            r.splus[i] += h * k.splus[i];
        }
        r.c += h * k.c;
        return r;
    };

    ObservableSeries out;
    out.n_atoms = p.n_atoms;
    out.resize(static_cast<std::size_t>(n_steps) + 1);
    MeanFieldIndividualState y{std::vector<double>(n, 1.0), std::vector<complex>(n), {}};
    const double h = num.dt;
    for (std::int64_t k = 0;; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        double sum = 0.0;
        for (double z : y.sz) sum += z;
        out.times[idx] = static_cast<double>(k) * h;
        out.sz_mean[idx] = 0.5 * sum;
        out.photon_mean[idx] = std::norm(y.c);
        if (k == n_steps) break;
        const auto k1 = meanfield_individual_rhs(y, p);
        const auto k2 = meanfield_individual_rhs(axpy(y, k1, h / 2), p);
        const auto k3 = meanfield_individual_rhs(axpy(y, k2, h / 2), p);
        const auto k4 = meanfield_individual_rhs(axpy(y, k3, h), p);
        for (std::size_t i = 0; i < n; ++i) {
            y.sz[i] += h / 6 * (k1.sz[i] + 2 * k2.sz[i] + 2 * k3.sz[i] + k4.sz[i]);
            y.splus[i] += h / 6 * (k1.splus[i] + 2.0 * k2.splus[i] + 2.0 * k3.splus[i] + k4.splus[i]);
        }
        y.c += h / 6 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c);
    }
    return out;
}

DtwaModel::DtwaModel(const Config& config) : params_(config.system()) { require_individual(params_); }

DtwaModel::State DtwaModel::sample_initial(const TrajectorySchedule& sch) const {
    return sample_dtwa_initial(params_.n_atoms, sch.stream(rng::initial_step));
}

Observation DtwaModel::step(State& s, std::span<const double> dw, double dt) const {
    kernels::DtwaLattice lat{s.sx, s.sy, s.sz, s.eta.real(), s.eta.imag()};
    const kernels::DtwaStepCoefficients c{params_.omega_a, params_.omega_c, params_.g, params_.decay_rate(), params_.kappa, dt};
    const double sum_z = kernels::dtwa_step(lat, dw, c);
    s.eta = complex(lat.eta_re, lat.eta_im);
    return {0.5 * sum_z, std::norm(s.eta) - 0.5};
}

EnsembleResult simulate_dtwa(const Config& config, EnsembleOptions opts) {
    const DtwaModel model(config);
    return run_ensemble(model, config.numerics(), config.system().n_atoms, opts);
}

}  // namespace superrad::individual
