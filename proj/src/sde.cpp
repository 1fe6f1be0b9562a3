#include "superrad/sde.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>

namespace superrad::detail {

SeriesAccumulator::SeriesAccumulator(std::size_t points)
    : mean_sz_(points, 0.0), m2_sz_(points, 0.0), mean_ph_(points, 0.0), m2_ph_(points, 0.0) {}

void SeriesAccumulator::add(std::span<const double> sz, std::span<const double> photon) {
    ++count_;
    const double inv = 1.0 / static_cast<double>(count_);
    for (std::size_t i = 0; i < mean_sz_.size(); ++i) {
        const double d = sz[i] - mean_sz_[i];
        mean_sz_[i] += d * inv;
        m2_sz_[i] += d * (sz[i] - mean_sz_[i]);
        const double e = photon[i] - mean_ph_[i];
        mean_ph_[i] += e * inv;
        m2_ph_[i] += e * (photon[i] - mean_ph_[i]);
    }
}

void SeriesAccumulator::merge(const SeriesAccumulator& o) {
    if (o.count_ == 0) return;
    if (count_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(o.count_);
    const double n = na + nb;
    for (std::size_t i = 0; i < mean_sz_.size(); ++i) {
        const double d = o.mean_sz_[i] - mean_sz_[i];
        mean_sz_[i] += d * nb / n;
        m2_sz_[i] += o.m2_sz_[i] + d * d * na * nb / n;
        const double e = o.mean_ph_[i] - mean_ph_[i];
        mean_ph_[i] += e * nb / n;
        m2_ph_[i] += o.m2_ph_[i] + e * e * na * nb / n;
    }
    count_ += o.count_;
}

ObservableSeries SeriesAccumulator::finish(double dt, int n_atoms) const {
    ObservableSeries s;
    s.n_atoms = n_atoms;
    s.resize(mean_sz_.size());
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < mean_sz_.size(); ++i) {
        s.times[i] = static_cast<double>(i) * dt;
        s.sz_mean[i] = mean_sz_[i];
        s.photon_mean[i] = mean_ph_[i];
        s.sz_sem[i] = count_ > 1 ? std::sqrt(std::max(0.0, m2_sz_[i]) / (n - 1.0) / n) : 0.0;
        s.photon_sem[i] = count_ > 1 ? std::sqrt(std::max(0.0, m2_ph_[i]) / (n - 1.0) / n) : 0.0;
    }
    return s;
}

SeriesAccumulator tree_merge(std::span<const SeriesAccumulator> parts) {
    if (parts.empty()) return SeriesAccumulator{};
    if (parts.size() == 1) return parts.front();
    const std::size_t mid = parts.size() / 2;
    SeriesAccumulator left = tree_merge(parts.first(mid));
    left.merge(tree_merge(parts.subspan(mid)));
    return left;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SUPERRAD_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_chunks(std::int64_t n_chunks, int threads, const std::function<void(std::int64_t, int)>& body) {
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&](int worker) {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                body(c, worker);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_chunks);
                return;
            }
        }
    };
    const int n_workers = static_cast<int>(std::min<std::int64_t>(threads, std::max<std::int64_t>(1, n_chunks)));
    if (n_workers <= 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(work, w);
    }
    if (failure) std::rethrow_exception(failure);
}

EnsembleResult reduce(std::vector<SeriesAccumulator>& chunks, std::int64_t divergent, double dt, int n_atoms,
                      int batches) {
    const SeriesAccumulator total = tree_merge(chunks);
    if (total.count() == 0)
        throw RunError("all " + std::to_string(divergent) + " trajectories diverged; no ensemble statistics");
    EnsembleResult r;
    r.series = total.finish(dt, n_atoms);
    r.n_used = total.count();
    r.n_divergent = divergent;
    const std::size_t n_chunks = chunks.size();
    if (batches > 1 && static_cast<std::size_t>(batches) <= n_chunks) {
        for (int b = 0; b < batches; ++b) {
            const std::size_t lo = n_chunks * static_cast<std::size_t>(b) / static_cast<std::size_t>(batches);
            const std::size_t hi = n_chunks * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(batches);
            const SeriesAccumulator part = tree_merge(std::span<const SeriesAccumulator>(chunks).subspan(lo, hi - lo));
            if (part.count() > 0) r.batch_sz_mean.push_back(part.sz_mean());
        }
    }
    return r;
}

}  // namespace superrad::detail
