#pragma once

#include <span>
#include <vector>

#include "superrad/model.hpp"
#include "superrad/rng.hpp"
#include "superrad/sde.hpp"

/**
 * Individual emission: every atom decays through its own sigma^-_i channel
 * with rate 2*gamma. Spins are classical vectors s_i = <sigma_i> sampled from
 * the discrete Wigner distribution; the cavity is a Wigner-sampled mode.
 */
namespace superrad::individual {

struct DtwaDerivative {
    std::vector<double> dsx, dsy, dsz;
    complex d_eta;

    SpinLatticeState as_state() const;
};

/**
 * Deterministic part of the lattice equations, from the mean-field
 * Heisenberg equations of H = omega_a S_z + omega_c c^dag c + g (S^+ c + S^- c^dag):
 *
 *   ds_x = -omega_a s_y - 2 g s_z Im(eta) - gamma s_x
 *   ds_y =  omega_a s_x - 2 g s_z Re(eta) - gamma s_y
 *   ds_z =  2 g (s_y Re(eta) + s_x Im(eta)) - 2 gamma (s_z + 1)
 *   d_eta = -i omega_c eta - kappa eta - (i g / 2) sum_i (s_x - i s_y)
 */
DtwaDerivative dtwa_drift(const SpinLatticeState& s, const SystemParams& params);

/// Noise increments; dw holds one increment per atom, then two for the cavity.
SpinLatticeState dtwa_noise(const SpinLatticeState& s, const SystemParams& params, std::span<const double> dw);

/// Each atom uniformly one of (+-1, +-1, 1); eta from the vacuum Wigner function.
SpinLatticeState sample_dtwa_initial(int n_atoms, const rng::StreamId& stream);

Observation observe(const SpinLatticeState& s);
Observation dtwa_observables(std::span<const SpinLatticeState> ensemble);

struct MeanFieldIndividualState {
    std::vector<double> sz;
    std::vector<complex> splus;
    complex c;
};

MeanFieldIndividualState meanfield_individual_rhs(const MeanFieldIndividualState& s, const SystemParams& params);

ObservableSeries integrate_meanfield(const Config& config);

class DtwaModel {
  public:
    using State = SpinLatticeState;

    explicit DtwaModel(const Config& config);

    std::size_t noise_dimension() const { return static_cast<std::size_t>(params_.n_atoms) + 2; }
    State sample_initial(const TrajectorySchedule& sch) const;
    /// Fused step through the dispatched SIMD kernel.
    Observation step(State& s, std::span<const double> dw, double dt) const;
    Observation observe(const State& s) const { return individual::observe(s); }

  private:
    SystemParams params_;
};

EnsembleResult simulate_dtwa(const Config& config, EnsembleOptions opts = {});

}  // namespace superrad::individual
