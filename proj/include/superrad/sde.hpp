#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "superrad/model.hpp"
#include "superrad/rng.hpp"

namespace superrad {

/// One Euler-Maruyama step: x + drift(x) dt + noise(x, dW).
template <class State, class Drift, class Noise, class Increments>
State euler_maruyama_step(const State& x, Drift&& drift, Noise&& noise, const Increments& dw, double dt) {
    return x + drift(x) * dt + noise(x, dw);
}

struct Observation {
    double sz = 0.0;
    double photon = 0.0;
};

/**
 * A stochastic model the ensemble runner can drive. `step` advances a state
 * in place using increments already scaled by sqrt(dt) and returns the
 * observables of the new state. Models are shared between worker threads and
 * must not hold mutable state.
 */
template <class M>
concept EnsembleModel = requires(const M& m, typename M::State& s, std::span<const double> dw, const TrajectorySchedule& sch) {
    { m.noise_dimension() } -> std::convertible_to<std::size_t>;
    { m.sample_initial(sch) } -> std::same_as<typename M::State>;
    { m.step(s, dw, 1.0) } -> std::same_as<Observation>;
    { m.observe(std::as_const(s)) } -> std::same_as<Observation>;
};

class RunError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct EnsembleOptions {
    /// Worker threads; 0 means SUPERRAD_THREADS or the hardware concurrency.
    int threads = 0;
    /// Number of independent sub-ensemble series to keep (for I uncertainty).
    int batches = 0;
};

struct EnsembleResult {
    ObservableSeries series;
    std::int64_t n_used = 0;
    std::int64_t n_divergent = 0;
    /// sz_mean of each sub-ensemble, if requested.
    std::vector<std::vector<double>> batch_sz_mean;
};

namespace detail {

/// Trajectories per reduction chunk. Fixed so the reduction tree never depends on the thread count.
inline constexpr std::int64_t chunk_size = 64;

/// Streaming mean/variance over trajectories, one slot per grid point.
class SeriesAccumulator {
  public:
    explicit SeriesAccumulator(std::size_t points = 0);
    void add(std::span<const double> sz, std::span<const double> photon);
    void merge(const SeriesAccumulator& other);
    std::int64_t count() const { return count_; }
    ObservableSeries finish(double dt, int n_atoms) const;
    const std::vector<double>& sz_mean() const { return mean_sz_; }

  private:
    std::int64_t count_ = 0;
    std::vector<double> mean_sz_, m2_sz_, mean_ph_, m2_ph_;
};

/// Merges accumulators[first, last) as a balanced binary tree in index order.
SeriesAccumulator tree_merge(std::span<const SeriesAccumulator> parts);

int resolve_threads(int requested);

/// Runs body(chunk) for chunk in [0, n_chunks) on `threads` workers; rethrows the first exception.
void parallel_chunks(std::int64_t n_chunks, int threads, const std::function<void(std::int64_t, int)>& body);

EnsembleResult reduce(std::vector<SeriesAccumulator>& chunks, std::int64_t divergent, double dt, int n_atoms, int batches);

}  // namespace detail

/**
 * Integrates n_traj independent trajectories of `model` on the grid
 * t_k = k dt, k = 0..n_steps, and reduces them to ensemble statistics.
 * Trajectories whose observables become non-finite are excluded and counted.
 */
template <EnsembleModel M>
EnsembleResult run_ensemble(const M& model, const NumericalParams& num, int n_atoms, EnsembleOptions opts = {}) {
    const std::int64_t n_steps = num.n_steps();
    const std::size_t points = static_cast<std::size_t>(n_steps) + 1;
    const std::int64_t n_chunks = (num.n_traj + detail::chunk_size - 1) / detail::chunk_size;
    const int threads = detail::resolve_threads(opts.threads);
    const std::size_t noise_dim = model.noise_dimension();

    std::vector<detail::SeriesAccumulator> chunks(static_cast<std::size_t>(n_chunks));
    std::atomic<std::int64_t> divergent{0};

    struct Scratch {
        std::vector<double> dw, sz, ph;
    };
    std::vector<Scratch> scratch(static_cast<std::size_t>(threads));

    detail::parallel_chunks(n_chunks, threads, [&](std::int64_t chunk, int worker) {
        Scratch& buf = scratch[static_cast<std::size_t>(worker)];
        buf.dw.resize(noise_dim);
        buf.sz.resize(points);
        buf.ph.resize(points);
        detail::SeriesAccumulator acc(points);
        const std::int64_t first = chunk * detail::chunk_size;
        const std::int64_t last = std::min(num.n_traj, first + detail::chunk_size);
        for (std::int64_t m = first; m < last; ++m) {
            const TrajectorySchedule sch{num.seed, static_cast<std::uint64_t>(m), n_steps, num.dt};
            auto state = model.sample_initial(sch);
            Observation o = model.observe(state);
            buf.sz[0] = o.sz;
            buf.ph[0] = o.photon;
            bool ok = std::isfinite(o.sz) && std::isfinite(o.photon);
            for (std::int64_t k = 0; ok && k < n_steps; ++k) {
                generate_wiener_into(sch, k, buf.dw);
                o = model.step(state, buf.dw, num.dt);
                ok = std::isfinite(o.sz) && std::isfinite(o.photon);
                buf.sz[static_cast<std::size_t>(k) + 1] = o.sz;
                buf.ph[static_cast<std::size_t>(k) + 1] = o.photon;
            }
            if (ok)
                acc.add(buf.sz, buf.ph);
            else
                divergent.fetch_add(1, std::memory_order_relaxed);
        }
        chunks[static_cast<std::size_t>(chunk)] = std::move(acc);
    });

    return detail::reduce(chunks, divergent.load(), num.dt, n_atoms, opts.batches);
}

}  // namespace superrad
