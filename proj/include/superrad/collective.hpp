#pragma once

#include <span>

#include "superrad/model.hpp"
#include "superrad/rng.hpp"
#include "superrad/sde.hpp"

/**
 * Collective emission: the ensemble decays through the collective jump
 * operator S^- with rate 2*Gamma. Collective spins are mapped onto two
 * Schwinger bosons (S^+ = a^dag b, S_z = (a^dag a - b^dag b)/2) and the three
 * modes a, b, c are sampled from their Wigner functions.
 */
namespace superrad::collective {

struct CollectiveDerivative {
    complex d_alpha;
    complex d_beta;
    complex d_eta;
};

/// Deterministic part of the phase-space equations.
CollectiveDerivative collective_drift(const CollectivePhasePoint& p, const SystemParams& params);

/**
 * Stochastic increments driven by six real Wiener increments. Radicands that
 * turn negative near depletion of mode a are clamped to zero.
 */
CollectivePhasePoint collective_noise(const CollectivePhasePoint& p, const SystemParams& params, std::span<const double> dw);

/// Fully inverted ensemble and empty cavity: |alpha| = sqrt(N) (or sqrt(N+1/2)) with random phase, b and c in vacuum.
CollectivePhasePoint sample_collective_initial(int n_atoms, const rng::StreamId& stream,
                                               AlphaAmplitude amplitude = AlphaAmplitude::fock);

/// <S_z> and <c^dag c> of one phase point (symmetric-ordering corrected).
Observation observe(const CollectivePhasePoint& p);

/// Ensemble average of `observe`; throws on an empty ensemble.
Observation collective_observables(std::span<const CollectivePhasePoint> ensemble);

struct MeanFieldCollectiveState {
    double sz = 0.0;
    complex splus;
    complex c;
};

MeanFieldCollectiveState meanfield_collective_rhs(const MeanFieldCollectiveState& s, const SystemParams& params, int n_atoms);

/// Classical RK4 integration of the factorized equations from full inversion, sampled every dt.
ObservableSeries integrate_meanfield(const Config& config);

class TwaModel {
  public:
    using State = CollectivePhasePoint;

    explicit TwaModel(const Config& config);

    std::size_t noise_dimension() const { return 6; }
    State sample_initial(const TrajectorySchedule& sch) const;
    Observation step(State& s, std::span<const double> dw, double dt) const;
    Observation observe(const State& s) const { return collective::observe(s); }

  private:
    SystemParams params_;
    AlphaAmplitude amplitude_;
};

/// Runs the TWA ensemble described by `config`.
EnsembleResult simulate_twa(const Config& config, EnsembleOptions opts = {});

}  // namespace superrad::collective
