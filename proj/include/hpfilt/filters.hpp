#pragma once

#include <utility>
#include <vector>

#include "hpfilt/linalg.hpp"

namespace hpfilt {

/// Tuning knobs shared by the iterated filters. `smoothing` is the penalty
/// weight (14400 is the conventional monthly value, 1600 quarterly);
/// `max_iterations` caps the boosting/successive stages; `si_horizon_start`
/// is the first horizon entering the stopping-criterion trace sum.
struct FilterConfig {
    double smoothing = 14400.0;
    int max_iterations = 20;
    Index si_horizon_start = 3;
};

inline void validate(const FilterConfig& cfg) {
    if (!(cfg.smoothing >= 0.0))
        throw ParameterError("smoothing weight must be >= 0");
    if (cfg.max_iterations < 1)
        throw ParameterError("max_iterations must be >= 1");
    if (cfg.si_horizon_start < 3)
        throw ParameterError("si_horizon_start must be >= 3");
}

/// Trend/cycle split of a series; cycle is constructed as y - trend.
struct Decomposition {
    Vector observations;
    Vector trend;
    Vector cycle;
};

/// Two-sided HP filter: trend solves S g = y, cycle is the remainder.
/// Reference implementation for the incremental and one-sided variants.
inline Decomposition hp_direct(const Vector& y, double eta) {
    if (y.size() < 3)
        throw DimensionError("HP filter needs at least 3 observations");
    Vector g = solve_direct(penalty_matrix(y.size(), eta), y);
    Vector c = y - g;
    return Decomposition{y, std::move(g), std::move(c)};
}

/// Boosted HP filter: applies the HP cycle map n times, c^(n) = (I - S^-1)^n y,
/// each application as a factored solve (the matrix power is never formed).
/// n = 1 reproduces hp_direct bit for bit.
inline Decomposition bhp(const Vector& y, double eta, int n) {
    if (y.size() < 3)
        throw DimensionError("boosted HP filter needs at least 3 observations");
    if (n < 1)
        throw ParameterError("boosted HP iteration count must be >= 1");

    Eigen::LLT<Matrix> llt(penalty_matrix(y.size(), eta).values);
    Vector trend = llt.solve(y);
    Vector residual = y - trend;
    for (int k = 2; k <= n; ++k) {
        Vector extracted = llt.solve(residual);
        trend += extracted;
        residual -= extracted;
    }
    Vector cycle = y - trend;
    return Decomposition{y, std::move(trend), std::move(cycle)};
}

/// Expanding-horizon HP state: the current inverse S_t^{-1}, prefix trend and
/// cycle, and the last step's q_t / delta_t. Advancing by one observation
/// costs O(t^2), against O(t^3) for re-solving from scratch.
struct IncrementalHpState {
    double smoothing;
    InverseState inverse;
    Vector trend;
    Vector cycle;
    Vector last_q;           // empty at horizon 3
    double last_delta = 0.0; // 0 at horizon 3

    Index horizon() const { return trend.size(); }
};

/// Seeds the recursion at horizon 3 from the closed-form S_3^{-1}.
inline IncrementalHpState incr_init(double y1, double y2, double y3, double eta) {
    InverseState inv = s3_inverse(eta);
    Vector y(3);
    y << y1, y2, y3;
    Vector g = inv.inverse * y;
    Vector c = y - g;
    return IncrementalHpState{eta, std::move(inv), std::move(g), std::move(c),
                              Vector{}, 0.0};
}

/// Absorbs one observation:
///
///   g_t = [g_{t-1}; y_t] - delta_t (g_{t-2} - 2 g_{t-1} + y_t) q_t
///
/// with (S_t^{-1}, q_t, delta_t) from woodbury_step. The cycle is kept as the
/// exact complement of the trend, so trend + cycle == y holds bitwise.
inline IncrementalHpState incr_step(IncrementalHpState state, double y_next) {
    const Index t = state.horizon() + 1;
    WoodburyUpdate upd = woodbury_step(state.inverse, state.smoothing);

    // Innovation from the last two entries of the previous prefix trend.
    const double s =
        state.trend[t - 3] - 2.0 * state.trend[t - 2] + y_next;
    const double coef = upd.delta * s;

    Vector y_prefix(t);
    y_prefix.head(t - 1) = state.trend + state.cycle;
    y_prefix[t - 1] = y_next;

    Vector g(t);
    g.head(t - 1) = state.trend;
    g[t - 1] = y_next;
    g -= coef * upd.q;

    state.inverse = std::move(upd.state);
    state.trend = std::move(g);
    state.cycle = y_prefix - state.trend;
    state.last_q = std::move(upd.q);
    state.last_delta = upd.delta;
    return state;
}

/// Streaming one-sided HP trend. Carries only the prefix trend and the last
/// two columns of S_t^{-1}, which is all the recursion reads, so a push costs
/// O(t) and a full pass O(l^2) -- the full inverse is never materialized.
class OhpScan {
public:
    explicit OhpScan(double eta) : eta_(eta) {
        if (!(eta >= 0.0))
            throw ParameterError("smoothing weight must be >= 0");
    }

    /// Absorbs y and returns the one-sided trend value at the new horizon.
    double push(double y) {
        const Index t = static_cast<Index>(trend_.size()) + 1;
        if (t == 1) {
            first_ = y;
            trend_.push_back(y);
            return y;
        }
        if (t == 2) {
            second_ = y;
            trend_.push_back(y);
            return y;
        }
        if (t == 3) {
            const Matrix inv = s3_inverse(eta_).inverse;
            Vector y3(3);
            y3 << first_, second_, y;
            const Vector g3 = inv * y3;
            trend_ = {g3[0], g3[1], g3[2]};
            col0_ = {inv(0, 1), inv(1, 1), inv(2, 1)};
            col1_ = {inv(0, 2), inv(1, 2), inv(2, 2)};
            return g3[2];
        }

        const std::size_t m = trend_.size();  // t - 1
        // resize() allocates exact sizes; grow geometrically so a long pass
        // is not dominated by per-step reallocation.
        if (q_.capacity() < m + 1) {
            const std::size_t cap = 2 * (m + 1);
            q_.reserve(cap);
            col0_.reserve(cap);
            col1_.reserve(cap);
        }
        q_.resize(m + 1);
        for (std::size_t i = 0; i < m; ++i)
            q_[i] = col0_[i] - 2.0 * col1_[i];
        q_[m] = 1.0;

        const double ptq = q_[m - 2] - 2.0 * q_[m - 1] + q_[m];
        const double delta = eta_ == 0.0 ? 0.0 : 1.0 / (1.0 / eta_ + ptq);
        const double s = trend_[m - 2] - 2.0 * trend_[m - 1] + y;
        const double coef = delta * s;

        trend_.push_back(y);
        for (std::size_t i = 0; i <= m; ++i)
            trend_[i] -= coef * q_[i];

        // Last two columns of the grown inverse: the old last column shifted,
        // and the new unit column, both downdated by the rank-one term.
        const double d0 = delta * q_[m - 1];
        const double d1 = delta;  // delta * q[m], q[m] == 1
        col0_.resize(m + 1);
        col1_.resize(m + 1);
        for (std::size_t i = m + 1; i-- > 0;) {
            const double old1 = i < m ? col1_[i] : 0.0;
            col0_[i] = old1 - d0 * q_[i];
            col1_[i] = (i == m ? 1.0 : 0.0) - d1 * q_[i];
        }
        return trend_.back();
    }

    Index horizon() const { return static_cast<Index>(trend_.size()); }
    double smoothing() const { return eta_; }

    /// Current prefix trend g_t.
    Vector trend() const {
        return Eigen::Map<const Vector>(trend_.data(),
                                        static_cast<Index>(trend_.size()));
    }

private:
    double eta_;
    double first_ = 0.0;
    double second_ = 0.0;
    std::vector<double> trend_;
    std::vector<double> col0_, col1_;  // last two columns of S_t^{-1}
    std::vector<double> q_;
};

/// One-sided HP trend: entry t is the last element of the HP trend fitted to
/// y_1..y_t. The first two entries pass the observations through (no second
/// difference exists below horizon 3).
inline Vector ohp(const Vector& y, double eta) {
    if (y.size() < 1)
        throw DimensionError("one-sided HP filter needs at least 1 observation");
    OhpScan scan(eta);
    Vector out(y.size());
    for (Index i = 0; i < y.size(); ++i)
        out[i] = scan.push(y[i]);
    return out;
}

}  // namespace hpfilt
