#include "superrad/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace superrad {

std::string to_string(Scheme s) { return s == Scheme::collective ? "collective" : "individual"; }
std::string to_string(Frame f) { return f == Frame::lab ? "lab" : "rotating"; }
std::string to_string(AlphaAmplitude a) { return a == AlphaAmplitude::fock ? "fock" : "symmetric"; }

Scheme scheme_from_string(const std::string& s) {
    if (s == "collective") return Scheme::collective;
    if (s == "individual") return Scheme::individual;
    throw std::invalid_argument("unknown scheme '" + s + "'");
}

Frame frame_from_string(const std::string& s) {
    if (s == "lab") return Frame::lab;
    if (s == "rotating") return Frame::rotating;
    throw std::invalid_argument("unknown frame '" + s + "'");
}

AlphaAmplitude alpha_amplitude_from_string(const std::string& s) {
    if (s == "fock") return AlphaAmplitude::fock;
    if (s == "symmetric") return AlphaAmplitude::symmetric;
    throw std::invalid_argument("unknown alpha amplitude '" + s + "'");
}

double SystemParams::decay_rate() const {
    if (gamma_col) return *gamma_col;
    if (gamma_ind) return *gamma_ind;
    return 0.0;
}

std::int64_t NumericalParams::n_steps() const {
    // Guard against t_max/dt landing a hair below an integer.
    return static_cast<std::int64_t>(std::floor(t_max / dt + 1e-9));
}

namespace {

std::string join(const std::vector<std::string>& items) {
    std::ostringstream os;
    for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "; " : "") << items[i];
    return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : std::invalid_argument("invalid configuration: " + join(issues)), issues_(std::move(issues)) {}

Config validate_params(const SystemParams& params, const NumericalParams& num) {
    std::vector<std::string> issues;
    auto check_finite = [&](double v, const char* name) {
        if (!std::isfinite(v)) issues.push_back(std::string("non-finite ") + name);
    };
    check_finite(params.omega_a, "omega_a");
    check_finite(params.omega_c, "omega_c");
    check_finite(params.g, "g");
    check_finite(params.kappa, "kappa");

    auto check_rate = [&](double v, const char* name) {
        if (v < 0.0) issues.push_back(std::string("negative rate ") + name);
    };
    check_rate(params.kappa, "kappa");
    if (params.g < 0.0) issues.push_back("negative coupling g");
    if (params.gamma_col && params.gamma_ind)
        issues.push_back("both gamma_col and gamma_ind set; exactly one emission scheme must be active");
    if (!params.gamma_col && !params.gamma_ind)
        issues.push_back("neither gamma_col nor gamma_ind set; exactly one emission scheme must be active");
    if (params.gamma_col) {
        check_finite(*params.gamma_col, "gamma_col");
        check_rate(*params.gamma_col, "gamma_col");
    }
    if (params.gamma_ind) {
        check_finite(*params.gamma_ind, "gamma_ind");
        check_rate(*params.gamma_ind, "gamma_ind");
    }
    if (params.n_atoms < 1) issues.push_back(params.n_atoms == 0 ? "zero atoms" : "negative atom count");

    if (!(num.dt > 0.0)) issues.push_back("dt must be positive");
    if (!(num.t_max > num.dt)) issues.push_back("dt >= t_max");
    if (num.n_traj < 1) issues.push_back("n_traj must be at least 1");
    if (num.smoothing_window < 1 || num.smoothing_window % 2 == 0)
        issues.push_back("even smoothing window (must be odd and >= 1)");
    if (num.photon_cutoff < -1) issues.push_back("photon_cutoff must be -1 (auto) or >= 0");
    if (num.dt > 0.0 && num.t_max > num.dt && num.n_steps() >= std::int64_t{0xFFFFFFFE})
        issues.push_back("too many time steps for the Wiener counter layout");

    if (!issues.empty()) throw ValidationError(std::move(issues));

    SystemParams resolved = params;
    if (resolved.frame == Frame::rotating) {
        resolved.omega_c -= resolved.omega_a;
        resolved.omega_a = 0.0;
    }
    return Config(resolved, num);
}

double default_time_step(double decay_rate, int n_atoms) {
    if (decay_rate <= 0.0 || n_atoms < 1) return 1e-3;
    return std::min(1e-3, 0.05 / (decay_rate * n_atoms));
}

bool CollectivePhasePoint::finite() const {
    auto f = [](complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return f(alpha) && f(beta) && f(eta);
}

SpinLatticeState& SpinLatticeState::operator+=(const SpinLatticeState& o) {
    for (std::size_t i = 0; i < size(); ++i) {
        sx[i] += o.sx[i];
        sy[i] += o.sy[i];
        sz[i] += o.sz[i];
    }
    eta += o.eta;
    return *this;
}

SpinLatticeState operator*(SpinLatticeState a, double s) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        a.sx[i] *= s;
        a.sy[i] *= s;
        a.sz[i] *= s;
    }
    a.eta *= s;
    return a;
}

bool SpinLatticeState::finite() const {
    auto all = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    return all(sx) && all(sy) && all(sz) && std::isfinite(eta.real()) && std::isfinite(eta.imag());
}

void ObservableSeries::resize(std::size_t n) {
    times.resize(n);
    sz_mean.resize(n);
    sz_sem.resize(n);
    photon_mean.resize(n);
    photon_sem.resize(n);
}

}  // namespace superrad
