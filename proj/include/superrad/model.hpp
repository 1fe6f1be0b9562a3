#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace superrad {

using complex = std::complex<double>;

enum class Scheme { collective, individual };
enum class Frame { lab, rotating };

/// How the Fock-excited Schwinger mode is seeded: fixed amplitude sqrt(N), or
/// sqrt(N + 1/2) so that the symmetric-ordered occupation equals N exactly.
enum class AlphaAmplitude { fock, symmetric };

std::string to_string(Scheme s);
std::string to_string(Frame f);
std::string to_string(AlphaAmplitude a);
Scheme scheme_from_string(const std::string& s);
Frame frame_from_string(const std::string& s);
AlphaAmplitude alpha_amplitude_from_string(const std::string& s);

/**
 * Physical constants of the atom-cavity model.
 *
 * Rates are half-rates: the Lindblad prefactors are 2*kappa, 2*gamma_col and
 * 2*gamma_ind. omega_a is the atomic transition frequency, i.e. the atoms
 * enter the Hamiltonian as omega_a * S_z. Exactly one of gamma_col and
 * gamma_ind is set; that choice selects the emission scheme.
 */
struct SystemParams {
    double omega_a = 0.0;
    double omega_c = 0.0;
    double g = 0.0;
    std::optional<double> gamma_col;
    std::optional<double> gamma_ind;
    double kappa = 0.0;
    int n_atoms = 1;
    Frame frame = Frame::rotating;

    Scheme scheme() const { return gamma_col ? Scheme::collective : Scheme::individual; }
    /// The active atomic decay half-rate (Gamma or gamma).
    double decay_rate() const;

    bool operator==(const SystemParams&) const = default;
};

struct NumericalParams {
    double dt = 1e-3;
    double t_max = 1.0;
    std::int64_t n_traj = 1000;
    std::uint64_t seed = 0;
    int smoothing_window = 5;
    /// Highest Fock level kept by the oracle; -1 means n_atoms + 1.
    int photon_cutoff = -1;
    AlphaAmplitude alpha_amplitude = AlphaAmplitude::fock;

    std::int64_t n_steps() const;
    bool operator==(const NumericalParams&) const = default;
};

/// A validated, frame-resolved configuration. Only validate_params builds one.
class Config {
  public:
    const SystemParams& system() const { return system_; }
    const NumericalParams& numerics() const { return numerics_; }
    bool operator==(const Config&) const = default;

  private:
    friend Config validate_params(const SystemParams&, const NumericalParams&);
    Config(SystemParams s, NumericalParams n) : system_(s), numerics_(n) {}
    SystemParams system_;
    NumericalParams numerics_;
};

class ValidationError : public std::invalid_argument {
  public:
    explicit ValidationError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

  private:
    std::vector<std::string> issues_;
};

/**
 * Checks every invariant and returns the normalized configuration. In the
 * rotating frame the frequencies are shifted so that omega_a = 0 and
 * omega_c becomes the detuning. All violations are collected before throwing.
 */
Config validate_params(const SystemParams& params, const NumericalParams& num);

/// Convenience overload: validating an already validated configuration is a no-op.
inline Config validate_params(const Config& c) { return validate_params(c.system(), c.numerics()); }

/// Step size used when none is given: min(1e-3, 0.05 / (rate * N)).
double default_time_step(double decay_rate, int n_atoms);

/// Complex amplitudes of Schwinger modes a, b and cavity mode c.
struct CollectivePhasePoint {
    complex alpha;
    complex beta;
    complex eta;

    CollectivePhasePoint& operator+=(const CollectivePhasePoint& o) {
        alpha += o.alpha;
        beta += o.beta;
        eta += o.eta;
        return *this;
    }
    friend CollectivePhasePoint operator+(CollectivePhasePoint a, const CollectivePhasePoint& b) { return a += b; }
    friend CollectivePhasePoint operator*(CollectivePhasePoint a, double s) {
        a.alpha *= s;
        a.beta *= s;
        a.eta *= s;
        return a;
    }
    bool finite() const;
};

/// N classical spin vectors in structure-of-arrays layout plus the cavity amplitude.
struct SpinLatticeState {
    std::vector<double> sx;
    std::vector<double> sy;
    std::vector<double> sz;
    complex eta;

    explicit SpinLatticeState(std::size_t n = 0) : sx(n), sy(n), sz(n) {}
    std::size_t size() const { return sx.size(); }

    SpinLatticeState& operator+=(const SpinLatticeState& o);
    friend SpinLatticeState operator+(SpinLatticeState a, const SpinLatticeState& b) { return a += b; }
    friend SpinLatticeState operator*(SpinLatticeState a, double s);
    bool finite() const;
};

/// Ensemble mean and standard error of <S_z> and <c^dag c> on a uniform grid.
struct ObservableSeries {
    std::vector<double> times;
    std::vector<double> sz_mean;
    std::vector<double> sz_sem;
    std::vector<double> photon_mean;
    std::vector<double> photon_sem;
    int n_atoms = 1;

    std::size_t size() const { return times.size(); }
    double sz_norm(std::size_t i) const { return 2.0 * sz_mean[i] / n_atoms; }
    void resize(std::size_t n);
};

}  // namespace superrad
