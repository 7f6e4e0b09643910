#pragma once

// General-equilibrium price solvers.
//
// With a universal elasticity sigma != 1, zero profit in sector j reads
//   pi_j = zeta_j * (alpha0_j + sum_i A(i, j) pi_i),   pi = p^(1-sigma), zeta = z^(sigma-1)
// which is linear in the transcendent prices. As a row-vector system:
//   pi (I - A<zeta>) = alpha0 <zeta>.
// At sigma = 1 the same condition is linear in log prices:
//   log p (I - A) = -log z.

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "domarnet/linalg.hpp"
#include "domarnet/network.hpp"

namespace domarnet {

enum class SolveMethod { Direct, FixedPoint };

enum class SolutionStatus {
    Finite,
    /// det(I - A<zeta>) <= tolerance, a nonpositive price, or fixed-point divergence.
    Singular,
    /// Prices are finite and positive but the linear system is badly conditioned.
    NumericallyIll,
};

inline std::string_view to_string(SolutionStatus s) noexcept {
    switch (s) {
        case SolutionStatus::Finite: return "Finite";
        case SolutionStatus::Singular: return "Singular";
        case SolutionStatus::NumericallyIll: return "NumericallyIll";
    }
    return "Unknown";
}

struct SolveOptions {
    SolveMethod method = SolveMethod::Direct;
    std::size_t fp_max_iter = 100000;
    double fp_tol = 1e-12;
    double fp_divergence_threshold = 1e12;
    /// Determinant at or below which the system counts as singular.
    /// Defaults to 1e-12 * (1 + ||<zeta>A||_inf).
    std::optional<double> det_singular_tol;
    /// Reciprocal condition estimate below which a finite solution is flagged NumericallyIll.
    double ill_conditioned_rcond = 1e-13;

    void validate() const {
        if (!(fp_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "fp_tol must be positive");
        if (fp_max_iter < 1) throw Error(ErrorCode::InvalidArgument, "fp_max_iter must be at least 1");
        if (!(fp_divergence_threshold > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "fp_divergence_threshold must be positive");
        }
        if (det_singular_tol && !(*det_singular_tol >= 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "det_singular_tol must be nonnegative");
        }
    }
};

struct SolveDiagnostics {
    std::optional<double> determinant;
    std::optional<double> determinant_tolerance;
    std::optional<double> rcond;
    /// Fixed-point iterations performed (0 for direct solves).
    std::size_t iterations = 0;
    /// Infinity-norm residual of the zero-profit system (NaN when no prices exist).
    double residual = std::numeric_limits<double>::quiet_NaN();
};

struct EquilibriumSolution {
    Regime regime = Regime::Neutral;
    SolutionStatus status = SolutionStatus::Singular;
    /// Transcendent prices; absent in the neutral regime.
    std::optional<Vector> pi;
    /// Empty when status is Singular.
    Vector log_p;
    Vector p;
    SolveDiagnostics diagnostics;

    bool has_prices() const noexcept { return status != SolutionStatus::Singular; }
};

namespace detail {

/// A<zeta>: column j of A scaled by zeta_j.
inline Matrix scale_columns(const Matrix& A, const Vector& zeta) {
    return A * zeta.asDiagonal();
}

inline void check_zeta(const ProductionNetwork& net, const Vector& zeta) {
    if (static_cast<std::size_t>(zeta.size()) != net.n()) {
        throw Error(ErrorCode::DimensionMismatch, "transcendent shock vector has wrong length");
    }
    for (Eigen::Index j = 0; j < zeta.size(); ++j) {
        if (!std::isfinite(zeta[j]) || zeta[j] <= 0.0) {
            throw Error(ErrorCode::InvalidArgument, "transcendent shocks must be positive and finite");
        }
    }
}

inline void fill_prices(EquilibriumSolution& sol, const Vector& pi, const Elasticity& sigma) {
    const double inv = 1.0 / sigma.exponent();
    sol.log_p = pi.array().log() * inv;
    sol.p = pi.array().pow(inv);
    sol.pi = pi;
}

inline double transcendent_residual(const ProductionNetwork& net, const Vector& zeta, const Vector& pi) {
    const Vector rhs = zeta.cwiseProduct(net.alpha0() + net.A().transpose() * pi);
    return (pi - rhs).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Zero-profit residual ||pi - alpha0<zeta> - pi A<zeta>||_inf.
inline double zero_profit_residual(const ProductionNetwork& net, const Vector& zeta, const Vector& pi) {
    detail::check_zeta(net, zeta);
    return detail::transcendent_residual(net, zeta, pi);
}

/// Log-space residual ||log p - log p A + log z||_inf for the Cobb-Douglas system.
inline double log_linear_residual(const ProductionNetwork& net, const ShockVector& z, const Vector& log_p) {
    require_size(net, z);
    const Vector rhs = net.A().transpose() * log_p - z.values().array().log().matrix();
    return (log_p - rhs).cwiseAbs().maxCoeff();
}

/// Direct linear solve given transcendent shocks zeta directly.
inline EquilibriumSolution solve_transcendent_zeta(const ProductionNetwork& net, const Vector& zeta,
                                                   const Elasticity& sigma, const SolveOptions& opts = {}) {
    if (sigma.neutral()) {
        throw Error(ErrorCode::NeutralRegime, "use the Cobb-Douglas solver at sigma = 1");
    }
    opts.validate();
    detail::check_zeta(net, zeta);

    EquilibriumSolution sol;
    sol.regime = sigma.regime();

    const Eigen::Index n = zeta.size();
    const Matrix W = detail::scale_columns(net.A(), zeta);
    const Matrix M = Matrix::Identity(n, n) - W;
    const double det_tol = opts.det_singular_tol.value_or(
        1e-12 * (1.0 + linalg::inf_norm(zeta.asDiagonal() * net.A())));

    const Eigen::PartialPivLU<Matrix> lu(M.transpose());
    const double det = lu.determinant();
    sol.diagnostics.determinant = det;
    sol.diagnostics.determinant_tolerance = det_tol;
    if (!(det > det_tol)) {
        sol.status = SolutionStatus::Singular;
        return sol;
    }

    const Vector rhs = zeta.cwiseProduct(net.alpha0());
    const Vector pi = lu.solve(rhs);
    if (!pi.allFinite() || (pi.array() <= 0.0).any()) {
        sol.status = SolutionStatus::Singular;
        return sol;
    }

    const double rcond = lu.rcond();
    sol.diagnostics.rcond = rcond;
    sol.status = rcond < opts.ill_conditioned_rcond ? SolutionStatus::NumericallyIll
                                                    : SolutionStatus::Finite;
    detail::fill_prices(sol, pi, sigma);
    sol.diagnostics.residual = detail::transcendent_residual(net, zeta, pi);
    return sol;
}

/// pi = alpha0<zeta>[I - A<zeta>]^-1 by LU with partial pivoting.
inline EquilibriumSolution solve_transcendent(const ProductionNetwork& net, const ShockVector& z,
                                              const Elasticity& sigma, const SolveOptions& opts = {}) {
    require_size(net, z);
    return solve_transcendent_zeta(net, transcendent_shocks(z, sigma), sigma, opts);
}

/// log p = -(log z)[I - A]^-1. Always finite for a validated network.
inline EquilibriumSolution solve_cobb_douglas(const ProductionNetwork& net, const ShockVector& z) {
    require_size(net, z);
    const Eigen::Index n = static_cast<Eigen::Index>(net.n());

    EquilibriumSolution sol;
    sol.regime = Regime::Neutral;

    const Eigen::PartialPivLU<Matrix> lu((Matrix::Identity(n, n) - net.A()).transpose());
    const Vector rhs = -z.values().array().log().matrix();
    sol.log_p = lu.solve(rhs);
    sol.diagnostics.determinant = lu.determinant();
    sol.diagnostics.rcond = lu.rcond();
    if (!sol.log_p.allFinite()) {
        throw Error(ErrorCode::InternalInconsistency,
                    "Cobb-Douglas solve produced non-finite log prices on a validated network");
    }
    sol.p = sol.log_p.array().exp();
    sol.status = SolutionStatus::Finite;
    sol.diagnostics.residual = log_linear_residual(net, z, sol.log_p);
    return sol;
}

/// Fixed-point iteration pi <- alpha0<zeta> + pi A<zeta>, started from pi = 0.
///
/// From zero the iterates increase monotonically, so they either converge or
/// grow without bound. Divergence is declared when a component passes
/// `fp_divergence_threshold`, or when the budget runs out and the step has not
/// shrunk over the second half of the run. Anything else throws NonConvergence.
inline EquilibriumSolution solve_fixed_point_zeta(const ProductionNetwork& net, const Vector& zeta,
                                                  const Elasticity& sigma, const SolveOptions& opts = {}) {
    if (sigma.neutral()) {
        throw Error(ErrorCode::NeutralRegime, "fixed-point iteration runs in transcendent variables");
    }
    opts.validate();
    detail::check_zeta(net, zeta);

    EquilibriumSolution sol;
    sol.regime = sigma.regime();

    const Vector b = zeta.cwiseProduct(net.alpha0());
    const Matrix Wt = detail::scale_columns(net.A(), zeta).transpose();

    Vector pi = Vector::Zero(zeta.size());
    Vector next(zeta.size());
    const std::size_t midpoint = opts.fp_max_iter / 2;
    double step_at_midpoint = std::numeric_limits<double>::infinity();
    double step = std::numeric_limits<double>::infinity();

    for (std::size_t k = 1; k <= opts.fp_max_iter; ++k) {
        next.noalias() = Wt * pi;
        next += b;
        step = (next - pi).cwiseAbs().maxCoeff();
        pi.swap(next);
        sol.diagnostics.iterations = k;

        if (!pi.allFinite() || pi.maxCoeff() > opts.fp_divergence_threshold) {
            sol.status = SolutionStatus::Singular;
            return sol;
        }
        if (step < opts.fp_tol) {
            if ((pi.array() <= 0.0).any()) {
                sol.status = SolutionStatus::Singular;
                return sol;
            }
            sol.status = SolutionStatus::Finite;
            detail::fill_prices(sol, pi, sigma);
            sol.diagnostics.residual = detail::transcendent_residual(net, zeta, pi);
            return sol;
        }
        if (k == midpoint) step_at_midpoint = step;
    }

    if (step >= step_at_midpoint) {
        sol.status = SolutionStatus::Singular;
        return sol;
    }
    throw Error(ErrorCode::NonConvergence,
                "fixed-point iteration stalled after " + std::to_string(opts.fp_max_iter) +
                    " iterations with step " + std::to_string(step));
}

inline EquilibriumSolution solve_fixed_point(const ProductionNetwork& net, const ShockVector& z,
                                             const Elasticity& sigma, const SolveOptions& opts = {}) {
    require_size(net, z);
    return solve_fixed_point_zeta(net, transcendent_shocks(z, sigma), sigma, opts);
}

/// Routes sigma within kNeutralTolerance of 1 to the Cobb-Douglas solver,
/// otherwise to the method named in `opts`.
inline EquilibriumSolution solve(const ProductionNetwork& net, const ShockVector& z,
                                 const Elasticity& sigma, const SolveOptions& opts = {}) {
    if (sigma.neutral()) return solve_cobb_douglas(net, z);
    if (opts.method == SolveMethod::FixedPoint) return solve_fixed_point(net, z, sigma, opts);
    return solve_transcendent(net, z, sigma, opts);
}

/// Throws SingularNetworkError unless the solution carries prices.
inline const EquilibriumSolution& require_prices(const EquilibriumSolution& sol, const std::string& what) {
    if (!sol.has_prices()) {
        throw SingularNetworkError(what + ": equilibrium is singular", sol.diagnostics.determinant);
    }
    return sol;
}

}  // namespace domarnet
