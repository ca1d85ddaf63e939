#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "hpfilt/filters.hpp"

namespace hpfilt {

/// First-stage cycles with l1 norm below this fraction of the observation
/// norm mark the series as perfectly trended (solver round-off scale).
inline constexpr double kDegenerateCycleTol = 1e-9;

/// Per-horizon eigenvalues of B_t = I_t - S_t^{-1} for t = 3..l, cached once
/// per (length, smoothing) pair. From the eigenvalues, tr(M_t^{(n)}) with
/// M_t^{(n)} = I_t - B_t^n is O(t) arithmetic for any power n, which makes
/// the stopping criterion cheap to probe for every candidate n.
class TraceCache {
public:
    TraceCache(Index length, double smoothing)
        : length_(length),
          smoothing_(smoothing),
          eigenvalues_(static_cast<std::size_t>(length - 2)),
          base_trace_(static_cast<std::size_t>(length - 2), 0.0) {}

    Index length() const { return length_; }
    double smoothing() const { return smoothing_; }

    /// Eigenvalues of B_t, ascending; all lie in [0, 1) for smoothing > 0.
    const std::vector<double>& eigenvalues(Index t) const {
        return eigenvalues_[slot(t)];
    }

    /// tr(I_t - S_t^{-1}).
    double base_trace(Index t) const { return base_trace_[slot(t)]; }

    /// tr(M_t^{(n)}) = t - sum_i mu_i^n.
    double trace_power(Index t, int n) const {
        const std::vector<double>& mu = eigenvalues(t);
        double sum = 0.0;
        for (double m : mu) {
            double p = m;
            for (int k = 1; k < n; ++k) p *= m;
            sum += p;
        }
        return static_cast<double>(t) - sum;
    }

    /// Averaged trace ratio of the stopping criterion,
    ///   (1/(l-2)) sum_{t=3}^{l} tr(M_t^{(n)}) / tr(I_t - S_t^{-1}),
    /// defined as 0 in the smoothing -> 0 limit where every B_t vanishes.
    double trace_term(int n, Index horizon_start = 3) const {
        if (n < 1)
            throw ParameterError("trace power must be >= 1");
        if (horizon_start < 3 || horizon_start > length_)
            throw ParameterError("horizon start out of range");
        if (smoothing_ == 0.0)
            return 0.0;
        double sum = 0.0;
        for (Index t = horizon_start; t <= length_; ++t)
            sum += trace_power(t, n) / base_trace(t);
        return sum / static_cast<double>(length_ - horizon_start + 1);
    }

    void store(Index t, std::vector<double> eigenvalues) {
        double sum = 0.0;
        for (double m : eigenvalues) sum += m;
        base_trace_[slot(t)] = sum;
        eigenvalues_[slot(t)] = std::move(eigenvalues);
    }

private:
    std::size_t slot(Index t) const {
        if (t < 3 || t > length_)
            throw DimensionError("horizon outside cached range");
        return static_cast<std::size_t>(t - 3);
    }

    Index length_;
    double smoothing_;
    std::vector<std::vector<double>> eigenvalues_;
    std::vector<double> base_trace_;
};

namespace detail {

inline std::vector<double> symmetric_eigenvalues(const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    solver.compute(b, Eigen::EigenvaluesOnly);
    const Vector& ev = solver.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
}

}  // namespace detail

/// Walks the incremental inverse chain once and eigendecomposes every
/// B_t = I_t - S_t^{-1}. The decompositions are independent across horizons
/// and may run on `threads` workers (0 = hardware concurrency); the result
/// does not depend on the schedule.
inline TraceCache build_trace_cache(Index l, double eta, unsigned threads = 0) {
    if (l < 3)
        throw DimensionError("trace cache needs length >= 3");
    if (!(eta >= 0.0))
        throw ParameterError("smoothing weight must be >= 0");

    TraceCache cache(l, eta);
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    const auto horizons = static_cast<unsigned>(l - 2);
    threads = std::min(threads, horizons);

    auto make_b = [](const InverseState& inv) {
        Matrix b = -inv.inverse;
        b.diagonal().array() += 1.0;
        return b;
    };

    if (threads <= 1) {
        InverseState state = s3_inverse(eta);
        cache.store(3, detail::symmetric_eigenvalues(make_b(state)));
        for (Index t = 4; t <= l; ++t) {
            state = woodbury_step(state, eta).state;
            cache.store(t, detail::symmetric_eigenvalues(make_b(state)));
        }
        return cache;
    }

    struct Job {
        Index t;
        Matrix b;
    };
    std::deque<Job> queue;
    std::mutex mu;
    std::condition_variable not_empty, not_full;
    bool done = false;
    const std::size_t capacity = 2 * threads;

    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                Job job;
                {
                    std::unique_lock<std::mutex> lock(mu);
                    not_empty.wait(lock, [&] { return done || !queue.empty(); });
                    if (queue.empty())
                        return;
                    job = std::move(queue.front());
                    queue.pop_front();
                    not_full.notify_one();
                }
                cache.store(job.t, detail::symmetric_eigenvalues(job.b));
            }
        });
    }

    auto enqueue = [&](Index t, Matrix b) {
        std::unique_lock<std::mutex> lock(mu);
        not_full.wait(lock, [&] { return queue.size() < capacity; });
        queue.push_back(Job{t, std::move(b)});
        not_empty.notify_one();
    };

    InverseState state = s3_inverse(eta);
    enqueue(3, make_b(state));
    for (Index t = 4; t <= l; ++t) {
        state = woodbury_step(state, eta).state;
        enqueue(t, make_b(state));
    }
    {
        std::lock_guard<std::mutex> lock(mu);
        done = true;
    }
    not_empty.notify_all();
    for (std::thread& w : workers) w.join();
    return cache;
}

/// Stopping index for the successive filter:
///
///   SI(n) = ||c^(n)||_1 / ||c^(1)||_1
///         + (1/(l-2)) sum_{t=3}^{l} tr(M_t^{(n)}) / tr(I_t - S_t^{-1}).
///
/// The proper stage count is the n with the smallest value.
inline double stopping_index(int n, const Vector& c_first, const Vector& c_nth,
                       const TraceCache& cache, Index horizon_start = 3) {
    if (n < 1)
        throw ParameterError("stage index must be >= 1");
    if (c_first.size() != c_nth.size() || c_first.size() != cache.length())
        throw DimensionError("cycle vectors must match the cached length");
    const double base = c_first.lpNorm<1>();
    if (base == 0.0)
        throw DegenerateError("first-stage cycle has zero l1 norm");
    return c_nth.lpNorm<1>() / base + cache.trace_term(n, horizon_start);
}

/// Successive one-sided decomposition: per-stage trend residuals, their sum
/// up to the chosen stage, the final cycle, and the probed SI trace.
struct SohpResult {
    Vector observations;
    std::vector<Vector> stage_trends;  // g^(1) .. g^(chosen_n)
    Vector cumulative_trend;
    Vector final_cycle;
    int chosen_n = 1;
    std::vector<double> si_values;  // SI(1) .. SI(max probed); empty if degenerate
    bool degenerate = false;
};

/// Successive one-sided HP filter. Stage 1 runs the one-sided filter on the
/// observations; stage i+1 reruns it on the remaining cycle. Stages are
/// probed up to cfg.max_iterations, the stage count with the smallest SI wins
/// (ties toward fewer stages), and the trend estimate is the sum of the
/// winning stages' trends.
inline SohpResult sohp(const Vector& y, const FilterConfig& cfg) {
    if (y.size() < 3)
        throw DimensionError("successive filter needs at least 3 observations");
    validate(cfg);
    if (cfg.si_horizon_start > y.size())
        throw ParameterError("si_horizon_start exceeds the series length");

    const Index l = y.size();
    SohpResult result;
    result.observations = y;

    Vector g1 = ohp(y, cfg.smoothing);
    Vector c1 = y - g1;
    result.stage_trends.push_back(std::move(g1));

    const double base_norm = c1.lpNorm<1>();
    if (base_norm <= kDegenerateCycleTol * std::max(1.0, y.lpNorm<1>())) {
        result.degenerate = true;
        result.chosen_n = 1;
        result.cumulative_trend = result.stage_trends.front();
        result.final_cycle = y - result.cumulative_trend;
        return result;
    }

    const TraceCache cache = build_trace_cache(l, cfg.smoothing);
    result.si_values.push_back(
        stopping_index(1, c1, c1, cache, cfg.si_horizon_start));

    Vector residual = c1;
    for (int i = 2; i <= cfg.max_iterations; ++i) {
        Vector gi = ohp(residual, cfg.smoothing);
        residual -= gi;
        result.stage_trends.push_back(std::move(gi));
        result.si_values.push_back(
            stopping_index(i, c1, residual, cache, cfg.si_horizon_start));
    }

    int chosen = 1;
    for (int i = 2; i <= cfg.max_iterations; ++i)
        if (result.si_values[i - 1] < result.si_values[chosen - 1])
            chosen = i;
    result.chosen_n = chosen;

    result.stage_trends.resize(static_cast<std::size_t>(chosen));
    Vector cumulative = result.stage_trends.front();
    for (std::size_t i = 1; i < result.stage_trends.size(); ++i)
        cumulative += result.stage_trends[i];
    result.cumulative_trend = std::move(cumulative);
    result.final_cycle = y - result.cumulative_trend;
    return result;
}

inline SohpResult sohp(const Vector& y, double eta) {
    FilterConfig cfg;
    cfg.smoothing = eta;
    return sohp(y, cfg);
}

}  // namespace hpfilt
