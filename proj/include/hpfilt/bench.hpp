#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <json.hpp>

#include "hpfilt/filters.hpp"

namespace hpfilt {

inline constexpr std::uint64_t kDefaultBenchSeed = 123456789;

struct BenchConfig {
    std::vector<Index> lengths = {250, 500, 1000, 2000};
    int repeats = 10;
    double smoothing = 14400.0;
    std::uint64_t seed = kDefaultBenchSeed;
};

/// Mean wall times per length for the dense direct solve and for the full
/// incremental pass, with fitted log-log slopes per arm.
struct BenchReport {
    std::vector<Index> lengths;
    std::vector<double> direct_seconds;
    std::vector<double> incremental_seconds;
    int repeats = 0;
    double direct_slope = 0.0;
    double incremental_slope = 0.0;
    double smoothing = 0.0;
    std::uint64_t seed = 0;
};

/// Standard Gaussian random walk; value content does not affect dense-algebra
/// timing, the fixed seed only keeps runs reproducible.
inline Vector gaussian_random_walk(Index l, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 1.0);
    Vector y(l);
    double level = 0.0;
    for (Index i = 0; i < l; ++i) {
        level += step(rng);
        y[i] = level;
    }
    return y;
}

/// Least-squares slope of log(seconds) against log(length).
inline double loglog_slope(const std::vector<Index>& lengths,
                           const std::vector<double>& seconds) {
    if (lengths.size() != seconds.size() || lengths.size() < 2)
        throw DimensionError("slope fit needs >= 2 (length, time) pairs");
    const double n = static_cast<double>(lengths.size());
    double mx = 0.0, my = 0.0;
    std::vector<double> xs(lengths.size()), ys(lengths.size());
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        xs[i] = std::log(static_cast<double>(lengths[i]));
        ys[i] = std::log(std::max(seconds[i], 1e-12));
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
}

namespace detail {

inline volatile double bench_sink = 0.0;

template <typename F>
double mean_seconds(F&& body, int repeats) {
    using clock = std::chrono::steady_clock;
    body();  // warm-up, excluded from the mean
    double total = 0.0;
    for (int r = 0; r < repeats; ++r) {
        const auto start = clock::now();
        body();
        const auto stop = clock::now();
        total += std::chrono::duration<double>(stop - start).count();
    }
    return std::max(total / repeats, 1e-9);
}

}  // namespace detail

/// Times, per length, (a) the direct trend via a general dense factorization
/// of S_l -- deliberately not the banded shortcut, this arm represents the
/// from-scratch solve -- and (b) the full incremental pass through OhpScan.
inline BenchReport run_bench(const BenchConfig& cfg) {
    if (cfg.repeats < 1)
        throw ParameterError("repeats must be >= 1");
    std::vector<Index> lengths = cfg.lengths;
    std::sort(lengths.begin(), lengths.end());
    lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
    if (lengths.empty() || lengths.front() < 3)
        throw ParameterError("benchmark lengths must be >= 3");

    BenchReport report;
    report.lengths = lengths;
    report.repeats = cfg.repeats;
    report.smoothing = cfg.smoothing;
    report.seed = cfg.seed;

    for (Index l : lengths) {
        const Vector y = gaussian_random_walk(l, cfg.seed);

        report.direct_seconds.push_back(detail::mean_seconds(
            [&] {
                Vector g = solve_direct(penalty_matrix(l, cfg.smoothing), y);
                detail::bench_sink = detail::bench_sink + g[l - 1];
            },
            cfg.repeats));

        report.incremental_seconds.push_back(detail::mean_seconds(
            [&] {
                OhpScan scan(cfg.smoothing);
                double last = 0.0;
                for (Index i = 0; i < l; ++i)
                    last = scan.push(y[i]);
                detail::bench_sink = detail::bench_sink + last;
            },
            cfg.repeats));
    }

    if (lengths.size() >= 2) {
        report.direct_slope = loglog_slope(lengths, report.direct_seconds);
        report.incremental_slope =
            loglog_slope(lengths, report.incremental_seconds);
    }
    return report;
}

inline nlohmann::json to_json(const BenchReport& report) {
    nlohmann::json j;
    j["lengths"] = report.lengths;
    j["direct_seconds"] = report.direct_seconds;
    j["incremental_seconds"] = report.incremental_seconds;
    j["repeats"] = report.repeats;
    j["direct_slope"] = report.direct_slope;
    j["incremental_slope"] = report.incremental_slope;
    j["smoothing"] = report.smoothing;
    j["seed"] = report.seed;
    return j;
}

/// Per-length CSV table; the slopes and run parameters live in the JSON form.
inline void write_report_csv(const BenchReport& report, std::ostream& out) {
    out << "length,direct_seconds,incremental_seconds\n";
    for (std::size_t i = 0; i < report.lengths.size(); ++i)
        out << report.lengths[i] << ',' << report.direct_seconds[i] << ','
            << report.incremental_seconds[i] << '\n';
}

}  // namespace hpfilt
