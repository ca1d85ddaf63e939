#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <utility>

#include "hpfilt/errors.hpp"

namespace hpfilt {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// The (l-2) x l second-difference stencil with rows [1, -2, 1].
/// Annihilates affine sequences; integer-valued affine inputs map to
/// exact floating-point zeros.
struct SecondDiffOperator {
    Index length;  // l >= 3

    /// y -> (y_i - 2 y_{i+1} + y_{i+2}), i = 0..l-3.
    Vector apply(const Vector& y) const {
        if (y.size() != length || length < 3)
            throw DimensionError("second difference needs at least 3 observations");
        Vector out(length - 2);
        for (Index i = 0; i + 2 < length; ++i)
            out[i] = y[i] - 2.0 * y[i + 1] + y[i + 2];
        return out;
    }

    /// Dense realization; row i holds 1, -2, 1 at columns i, i+1, i+2.
    Matrix dense() const {
        if (length < 3)
            throw DimensionError("second difference needs at least 3 observations");
        Matrix f = Matrix::Zero(length - 2, length);
        for (Index i = 0; i + 2 < length; ++i) {
            f(i, i) = 1.0;
            f(i, i + 1) = -2.0;
            f(i, i + 2) = 1.0;
        }
        return f;
    }
};

inline Vector second_diff_apply(const Vector& y) {
    return SecondDiffOperator{y.size()}.apply(y);
}

namespace detail {

// Bands of F^T F. Diagonal runs 1, 5, 6, ..., 6, 5, 1 (1, 5, 5, 1 at l = 4
// and 1, 4, 1 at l = 3), first off-diagonal -2, -4, ..., -4, -2, second is
// all ones. Shared by the dense builder and the pentadiagonal solver.
inline double ftf_diag(Index i, Index l) {
    if (i == 0 || i == l - 1) return 1.0;
    if (l == 3) return 4.0;
    if (i == 1 || i == l - 2) return 5.0;
    return 6.0;
}

inline double ftf_off1(Index i, Index l) {  // (i, i+1)
    return (i == 0 || i == l - 2) ? -2.0 : -4.0;
}

}  // namespace detail

/// Dense S_l = I_l + eta * F_l^T F_l. Symmetric positive definite and
/// pentadiagonal; every eigenvalue is >= 1.
struct PenaltyMatrix {
    Index length;
    double smoothing;
    Matrix values;
};

inline PenaltyMatrix penalty_matrix(Index l, double eta) {
    if (l < 3)
        throw DimensionError("penalty matrix needs length >= 3");
    if (!(eta >= 0.0))
        throw ParameterError("smoothing weight must be >= 0");

    Matrix s = Matrix::Zero(l, l);
    for (Index i = 0; i < l; ++i)
        s(i, i) = 1.0 + eta * detail::ftf_diag(i, l);
    for (Index i = 0; i + 1 < l; ++i) {
        s(i, i + 1) = eta * detail::ftf_off1(i, l);
        s(i + 1, i) = s(i, i + 1);
    }
    for (Index i = 0; i + 2 < l; ++i) {
        s(i, i + 2) = eta;
        s(i + 2, i) = eta;
    }
    return PenaltyMatrix{l, eta, std::move(s)};
}

/// Solves S g = y with a dense Cholesky factorization (no explicit inverse).
/// This is the general O(l^3) route; see solve_pentadiagonal for the banded
/// O(l) path.
inline Vector solve_direct(const PenaltyMatrix& s, const Vector& y) {
    if (s.values.rows() != y.size())
        throw DimensionError("penalty matrix and observation lengths differ");
    Eigen::LLT<Matrix> llt(s.values);
    return llt.solve(y);
}

/// Banded Cholesky solve of S g = y exploiting the pentadiagonal structure,
/// O(l) time and memory. Practical fixed-sample path; deliberately not the
/// subject of the direct-vs-incremental benchmark.
inline Vector solve_pentadiagonal(double eta, const Vector& y) {
    const Index n = y.size();
    if (n < 3)
        throw DimensionError("pentadiagonal solve needs length >= 3");
    if (!(eta >= 0.0))
        throw ParameterError("smoothing weight must be >= 0");

    // L has main diagonal d, first subdiagonal e, second subdiagonal f.
    Vector d(n), e(n), f(n);
    for (Index i = 0; i < n; ++i) {
        const double a0 = 1.0 + eta * detail::ftf_diag(i, n);
        const double fm2 = i >= 2 ? f[i - 2] : 0.0;
        const double em1 = i >= 1 ? e[i - 1] : 0.0;
        d[i] = std::sqrt(a0 - fm2 * fm2 - em1 * em1);
        if (i + 1 < n) {
            const double a1 = eta * detail::ftf_off1(i, n);
            const double fm1 = i >= 1 ? f[i - 1] : 0.0;
            e[i] = (a1 - fm1 * em1) / d[i];
        }
        if (i + 2 < n)
            f[i] = eta / d[i];
    }

    Vector z(n);
    for (Index i = 0; i < n; ++i) {
        double acc = y[i];
        if (i >= 1) acc -= e[i - 1] * z[i - 1];
        if (i >= 2) acc -= f[i - 2] * z[i - 2];
        z[i] = acc / d[i];
    }
    Vector x(n);
    for (Index i = n - 1; i >= 0; --i) {
        double acc = z[i];
        if (i + 1 < n) acc -= e[i] * x[i + 1];
        if (i + 2 < n) acc -= f[i] * x[i + 2];
        x[i] = acc / d[i];
    }
    return x;
}

/// Dense symmetric S_t^{-1} for some horizon t >= 3. Produced by s3_inverse
/// and advanced by woodbury_step; entries are exactly symmetric.
struct InverseState {
    Matrix inverse;

    Index horizon() const { return inverse.rows(); }
};

/// Closed-form seed of the recursion,
///   S_3^{-1} = 1/(6 eta + 1) * [[5e+1, 2e, -e], [2e, 2e+1, 2e], [-e, 2e, 5e+1]].
inline InverseState s3_inverse(double eta) {
    if (!(eta >= 0.0))
        throw ParameterError("smoothing weight must be >= 0");
    const double k = 1.0 / (6.0 * eta + 1.0);
    Matrix m(3, 3);
    m(0, 0) = k * (5.0 * eta + 1.0);
    m(0, 1) = k * (2.0 * eta);
    m(0, 2) = k * (-eta);
    m(1, 0) = m(0, 1);
    m(1, 1) = k * (2.0 * eta + 1.0);
    m(1, 2) = m(0, 1);
    m(2, 0) = m(0, 2);
    m(2, 1) = m(0, 1);
    m(2, 2) = m(0, 0);
    return InverseState{std::move(m)};
}

/// One rank-one inverse update: S_{t-1}^{-1} -> S_t^{-1} together with the
/// step vector q_t and scalar delta_t used by the trend recursion.
struct WoodburyUpdate {
    InverseState state;  // S_t^{-1}
    Vector q;            // diag(S_{t-1}^{-1}, 1) * p_t
    double delta;        // 1 / (1/eta + p_t^T q_t); 0 when eta == 0
};

/// Grows the inverse by one observation via the Woodbury identity:
///
///   S_t^{-1} = diag(S_{t-1}^{-1}, 1) - delta_t q_t q_t^T,
///   q_t = diag(S_{t-1}^{-1}, 1) p_t,   p_t = [0, ..., 0, 1, -2, 1]^T.
///
/// q_t needs only the last two columns of the previous inverse, so the step
/// is dominated by the O(t^2) rank-one update. eta == 0 is legal: 1/eta
/// diverges, delta_t = 0 and the update vanishes.
inline WoodburyUpdate woodbury_step(const InverseState& prev, double eta) {
    if (prev.horizon() < 3)
        throw DimensionError("previous inverse must have horizon >= 3");
    if (!(eta >= 0.0))
        throw ParameterError("smoothing weight must be >= 0");

    const Index t = prev.horizon() + 1;
    const Matrix& a = prev.inverse;

    // q = [a(:, t-3) - 2 a(:, t-2); 1]  (0-based columns of the old inverse).
    Vector q(t);
    q.head(t - 1) = a.col(t - 3) - 2.0 * a.col(t - 2);
    q[t - 1] = 1.0;

    const double ptq = q[t - 3] - 2.0 * q[t - 2] + q[t - 1];
    const double delta = eta == 0.0 ? 0.0 : 1.0 / (1.0 / eta + ptq);

    Matrix m = Matrix::Zero(t, t);
    m.topLeftCorner(t - 1, t - 1) = a;
    m(t - 1, t - 1) = 1.0;
    // Rank-one downdate written from a single product per (i, j) pair so the
    // result stays bitwise symmetric.
    for (Index j = 0; j < t; ++j) {
        const double dqj = delta * q[j];
        for (Index i = 0; i <= j; ++i) {
            const double upd = m(i, j) - dqj * q[i];
            m(i, j) = upd;
            m(j, i) = upd;
        }
    }
    return WoodburyUpdate{InverseState{std::move(m)}, std::move(q), delta};
}

}  // namespace hpfilt
