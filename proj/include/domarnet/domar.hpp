#pragma once

// Domar aggregation and shock synergy.
//
// Aggregate output growth under a Cobb-Douglas household is
//   log V = -(log p) . kappa.
// At sigma = 1 this is linear in log z with Domar weights [I - A]^-1 kappa;
// otherwise the network transforms with the shocks and the mapping is nonlinear.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "domarnet/equilibrium.hpp"
#include "domarnet/network.hpp"

namespace domarnet {

struct DomarResult {
    double log_V = 0.0;
    Vector log_p;
    /// [I - A]^-1 kappa; set on the neutral path and at the reference state.
    std::optional<Vector> weights;
};

/// Domar weights [I - A]^-1 kappa.
inline Vector hulten_weights(const ProductionNetwork& net) {
    const auto n = static_cast<Eigen::Index>(net.n());
    return (Matrix::Identity(n, n) - net.A()).partialPivLu().solve(net.kappa());
}

inline double aggregate_output(const ProductionNetwork& net, const Vector& log_p) {
    return -log_p.dot(net.kappa());
}

/// Throws SingularNetworkError when the shocked equilibrium has no prices.
inline DomarResult domar_aggregate(const ProductionNetwork& net, const ShockVector& z,
                                   const Elasticity& sigma, const SolveOptions& opts = {}) {
    const EquilibriumSolution sol = solve(net, z, sigma, opts);
    require_prices(sol, "Domar aggregation");
    DomarResult r;
    r.log_p = sol.log_p;
    r.log_V = aggregate_output(net, sol.log_p);
    if (sigma.neutral() || z.is_reference()) r.weights = hulten_weights(net);
    return r;
}

// -- Network transformation --------------------------------------------------

struct CostShares {
    /// S(i, j): cost share of input i in sector j after the shock.
    Matrix S;
    /// Labor (primary factor) cost share of each sector.
    Vector labor;
};

namespace detail {
inline void require_finite_solution(const EquilibriumSolution& sol, std::size_t n) {
    if (!sol.has_prices()) {
        throw Error(ErrorCode::SingularSolution, "network transformation needs a finite equilibrium");
    }
    if (static_cast<std::size_t>(sol.p.size()) != n) {
        throw Error(ErrorCode::DimensionMismatch, "solution does not match the network size");
    }
}
}  // namespace detail

/// s_ij = a_ij zeta_j pi_i / pi_j and s_0j = alpha0_j zeta_j / pi_j.
/// At sigma = 1 the network does not move: S = A.
inline CostShares cost_shares(const ProductionNetwork& net, const ShockVector& z, const Elasticity& sigma,
                              const EquilibriumSolution& solution) {
    require_size(net, z);
    detail::require_finite_solution(solution, net.n());
    if (sigma.neutral()) return {net.A(), net.alpha0()};
    if (!solution.pi) {
        throw Error(ErrorCode::InvalidArgument, "solution carries no transcendent prices for sigma != 1");
    }

    const Vector zeta = transcendent_shocks(z, sigma);
    const Vector& pi = *solution.pi;
    CostShares cs;
    cs.S = net.A();
    for (Eigen::Index j = 0; j < cs.S.cols(); ++j) {
        cs.S.col(j) = cs.S.col(j).cwiseProduct(pi) * (zeta[j] / pi[j]);
    }
    cs.labor = net.alpha0().cwiseProduct(zeta).cwiseQuotient(pi);
    return cs;
}

/// Physical labor input per unit of output, m0_j = alpha0_j z_j^(sigma-1) p_j^sigma (wage = 1).
inline Vector labor_coefficients(const ProductionNetwork& net, const ShockVector& z, const Elasticity& sigma,
                                 const EquilibriumSolution& solution) {
    require_size(net, z);
    detail::require_finite_solution(solution, net.n());
    const double s = sigma.sigma();
    Vector m0(static_cast<Eigen::Index>(net.n()));
    for (Eigen::Index j = 0; j < m0.size(); ++j) {
        m0[j] = net.alpha0()[j] * std::exp((s - 1.0) * std::log(z.values()[j]) + s * solution.log_p[j]);
    }
    return m0;
}

/// Cobb-Douglas household demand c_i = kappa_i B / p_i.
inline Vector household_demand(const ProductionNetwork& net, const Vector& p, double income) {
    if (static_cast<std::size_t>(p.size()) != net.n()) {
        throw Error(ErrorCode::DimensionMismatch, "price vector does not match the network size");
    }
    if (!(income > 0.0) || !std::isfinite(income)) {
        throw Error(ErrorCode::InvalidArgument, "income must be positive and finite");
    }
    if (!p.allFinite() || (p.array() <= 0.0).any()) {
        throw Error(ErrorCode::NonpositivePrice, "household demand needs strictly positive prices");
    }
    return (net.kappa() * income).cwiseQuotient(p);
}

// -- Synergy -----------------------------------------------------------------

enum class SynergySign { Negative, Zero, Positive, NotApplicable };

inline std::string_view to_string(SynergySign s) noexcept {
    switch (s) {
        case SynergySign::Negative: return "Negative";
        case SynergySign::Zero: return "Zero";
        case SynergySign::Positive: return "Positive";
        case SynergySign::NotApplicable: return "NotApplicable";
    }
    return "Unknown";
}

/// Sign of the synergy gap for same-direction shocks: negative for
/// inelastic networks, zero for Cobb-Douglas, positive for elastic.
inline SynergySign regime_sign(const Elasticity& sigma) noexcept {
    switch (sigma.regime()) {
        case Regime::Inelastic: return SynergySign::Negative;
        case Regime::Neutral: return SynergySign::Zero;
        case Regime::Elastic: return SynergySign::Positive;
    }
    return SynergySign::NotApplicable;
}

struct SynergyOptions {
    /// Accept overlapping shock supports; the sign is then not predicted.
    bool relaxed = false;
    SolveOptions solve;
};

struct SynergyReport {
    double log_V_joint = 0.0;
    double log_V_a = 0.0;
    double log_V_b = 0.0;
    double gap = 0.0;
    SynergySign predicted_sign = SynergySign::NotApplicable;
    bool same_direction = false;
    bool disjoint = true;
};

namespace detail {

/// Every component that differs from 1 lies on the same side of 1,
/// and both shocks move at least one sector.
inline bool same_direction(const Vector& a, const Vector& b) {
    bool up = false, down = false, moved_a = false, moved_b = false;
    for (const auto* v : {&a, &b}) {
        for (Eigen::Index k = 0; k < v->size(); ++k) {
            const double x = (*v)[k];
            if (x == 1.0) continue;
            (x > 1.0 ? up : down) = true;
            (v == &a ? moved_a : moved_b) = true;
        }
    }
    return moved_a && moved_b && (up != down);
}

inline double labelled_log_V(const ProductionNetwork& net, const ShockVector& z, const Elasticity& sigma,
                             const SolveOptions& opts, const std::string& label) {
    const EquilibriumSolution sol = solve(net, z, sigma, opts);
    if (!sol.has_prices()) {
        throw SingularNetworkError(label + " is singular", sol.diagnostics.determinant);
    }
    return aggregate_output(net, sol.log_p);
}

}  // namespace detail

/// gap = log V(z_a o z_b) - log V(z_a) - log V(z_b), with o the component-wise product.
inline SynergyReport synergy_gap(const ProductionNetwork& net, const ShockVector& za, const ShockVector& zb,
                                 const Elasticity& sigma, const SynergyOptions& opts = {}) {
    require_size(net, za);
    require_size(net, zb);

    SynergyReport r;
    for (std::size_t k = 0; k < net.n(); ++k) {
        if (za[k] != 1.0 && zb[k] != 1.0) r.disjoint = false;
    }
    if (!r.disjoint && !opts.relaxed) {
        throw Error(ErrorCode::OverlappingShocks,
                    "shock supports overlap; pass the relaxed option to compute the gap anyway");
    }
    r.same_direction = detail::same_direction(za.values(), zb.values());

    r.log_V_joint = detail::labelled_log_V(net, za.compose(zb), sigma, opts.solve, "joint shock");
    r.log_V_a = detail::labelled_log_V(net, za, sigma, opts.solve, "shock a");
    r.log_V_b = detail::labelled_log_V(net, zb, sigma, opts.solve, "shock b");
    r.gap = r.log_V_joint - r.log_V_a - r.log_V_b;

    if (sigma.neutral()) {
        r.predicted_sign = SynergySign::Zero;
    } else if (r.disjoint && r.same_direction) {
        r.predicted_sign = regime_sign(sigma);
    }
    return r;
}

// -- Reduction to two sectors ------------------------------------------------

/// Exact elimination of every sector except the pair (i, j), valid when shocks
/// hit only that pair. For the remaining sectors r,
///   pi_r = remaining_alpha0 + pi_p remaining_A,
/// and the pair obeys pi_p = (hat_alpha0 + pi_p hat_A) <delta, eps>.
struct ReducedTwoSector {
    std::array<std::size_t, 2> sectors{};
    std::vector<std::size_t> remaining;
    Vector hat_alpha0;  ///< length 2
    Matrix hat_A;       ///< 2 x 2, self-loops allowed
    /// Self-loop-free coefficients at the reference state: tilde = hat / (1 - hat_self).
    Vector tilde_alpha0;
    Matrix tilde_A;  ///< 2 x 2 with zero diagonal
    Vector remaining_alpha0;
    Matrix remaining_A;  ///< 2 x (n-2)
};

inline ReducedTwoSector reduce_to_two_sector(const ProductionNetwork& net, std::size_t i, std::size_t j) {
    const std::size_t n = net.n();
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "reduction needs at least two sectors");
    if (i >= n || j >= n) throw Error(ErrorCode::IndexOutOfRange, "sector index out of range");
    if (i == j) throw Error(ErrorCode::InvalidArgument, "reduction needs two distinct sectors");

    ReducedTwoSector red;
    red.sectors = {i, j};
    for (std::size_t k = 0; k < n; ++k) {
        if (k != i && k != j) red.remaining.push_back(k);
    }
    const std::vector<Eigen::Index> p{Eigen::Index(i), Eigen::Index(j)};
    std::vector<Eigen::Index> r(red.remaining.begin(), red.remaining.end());
    const auto m = static_cast<Eigen::Index>(r.size());

    const Matrix& A = net.A();
    const Vector& a0 = net.alpha0();
    Matrix A_pp = A(p, p);
    Vector a0_p = a0(p);

    if (m == 0) {
        red.hat_A = A_pp;
        red.hat_alpha0 = a0_p;
        red.remaining_alpha0 = Vector(0);
        red.remaining_A = Matrix(2, 0);
    } else {
        const Matrix A_pr = A(p, r);
        const Matrix A_rp = A(r, p);
        const Matrix L = Matrix::Identity(m, m) - A(r, r);
        const Eigen::PartialPivLU<Matrix> lu(L);
        const double det = lu.determinant();
        if (!(det > 0.0) || !std::isfinite(det)) {
            throw Error(ErrorCode::SubmatrixSingular, "I - A_rr is singular");
        }
        const Matrix X = lu.solve(A_rp);  // [I - A_rr]^-1 A_rp
        const Vector a0_r = a0(r);
        red.hat_A = A_pp + A_pr * X;
        red.hat_alpha0 = a0_p + X.transpose() * a0_r;

        const Eigen::PartialPivLU<Matrix> lut(L.transpose());
        red.remaining_alpha0 = lut.solve(a0_r);
        red.remaining_A = lut.solve(A_pr.transpose()).transpose();
    }

    red.tilde_alpha0.resize(2);
    red.tilde_A = Matrix::Zero(2, 2);
    for (Eigen::Index c = 0; c < 2; ++c) {
        const double keep = 1.0 - red.hat_A(c, c);
        red.tilde_alpha0[c] = red.hat_alpha0[c] / keep;
        red.tilde_A(1 - c, c) = red.hat_A(1 - c, c) / keep;
    }
    return red;
}

/// Transcendent prices (pi_i, pi_j) of the reduced system under multipliers (delta, eps).
inline Vector solve_reduced(const ReducedTwoSector& red, double delta, double eps) {
    Vector zeta(2);
    zeta << delta, eps;
    const Matrix M = (Matrix::Identity(2, 2) - red.hat_A * zeta.asDiagonal()).transpose();
    const double det = M.determinant();
    const Vector pi = M.partialPivLu().solve(zeta.cwiseProduct(red.hat_alpha0));
    if (!(det > 0.0) || !pi.allFinite() || (pi.array() <= 0.0).any()) {
        throw SingularNetworkError("reduced two-sector system is singular", det);
    }
    return pi;
}

/// Gap between the self-loop-free (tilde) form and the exact reduced system.
/// Zero at the reference state; generally nonzero once delta or eps move.
inline double tilde_form_residual(const ReducedTwoSector& red, double delta, double eps) {
    const double t01 = red.tilde_alpha0[0], t02 = red.tilde_alpha0[1];
    const double t21 = red.tilde_A(1, 0), t12 = red.tilde_A(0, 1);
    const double den = 1.0 - t21 * t12 * delta * eps;
    Vector tilde(2);
    tilde << (t01 * delta + t21 * t02 * delta * eps) / den, (t02 * eps + t12 * t01 * delta * eps) / den;
    return (tilde - solve_reduced(red, delta, eps)).cwiseAbs().maxCoeff();
}

// -- Multisector synergy -----------------------------------------------------

inline constexpr double kInfinitesimalCap = 0.05;

struct MultisectorSynergyReport {
    /// log pi_k(delta, eps) - log pi_k(delta, 1) - log pi_k(1, eps) for every sector k.
    Vector margins;
    double min_margin = 0.0;
    bool margins_nonnegative = true;
    double gap = 0.0;
    SynergySign predicted_sign = SynergySign::NotApplicable;
    bool same_direction = false;
    bool within_cap = false;
    /// same_direction and within_cap: the sign claim is expected to hold.
    bool guaranteed = false;
};

/// Superadditivity of log transcendent prices when sectors i and j receive
/// transcendent multipliers delta and eps (zeta_i = delta, zeta_j = eps, all others 1).
inline MultisectorSynergyReport synergy_multisector_check(const ProductionNetwork& net, std::size_t i,
                                                          std::size_t j, double delta, double eps,
                                                          const Elasticity& sigma, const SolveOptions& opts = {},
                                                          double infinitesimal_cap = kInfinitesimalCap) {
    if (sigma.neutral()) {
        throw Error(ErrorCode::NeutralRegime, "transcendent multipliers are undefined at sigma = 1");
    }
    const std::size_t n = net.n();
    if (i >= n || j >= n) throw Error(ErrorCode::IndexOutOfRange, "sector index out of range");
    if (i == j) throw Error(ErrorCode::InvalidArgument, "synergy check needs two distinct sectors");
    if (!(delta > 0.0) || !(eps > 0.0) || !std::isfinite(delta) || !std::isfinite(eps)) {
        throw Error(ErrorCode::InvalidArgument, "multipliers must be positive and finite");
    }

    const auto N = static_cast<Eigen::Index>(n);
    auto solve_log_pi = [&](double d, double e, const std::string& label) {
        Vector zeta = Vector::Ones(N);
        zeta[Eigen::Index(i)] = d;
        zeta[Eigen::Index(j)] = e;
        const EquilibriumSolution sol = solve_transcendent_zeta(net, zeta, sigma, opts);
        if (!sol.has_prices()) throw SingularNetworkError(label + " is singular", sol.diagnostics.determinant);
        return Vector(sol.pi->array().log());
    };

    const Vector joint = solve_log_pi(delta, eps, "joint shock");
    const Vector a = solve_log_pi(delta, 1.0, "shock on sector i");
    const Vector b = solve_log_pi(1.0, eps, "shock on sector j");

    MultisectorSynergyReport r;
    r.margins = joint - a - b;
    r.min_margin = r.margins.minCoeff();
    r.margins_nonnegative = r.min_margin >= -1e-9;
    // log V = -(1/(1-sigma)) kappa . log pi
    r.gap = -r.margins.dot(net.kappa()) / sigma.exponent();
    r.same_direction = (delta > 1.0 && eps > 1.0) || (delta < 1.0 && eps < 1.0);
    r.within_cap = std::abs(std::log(delta)) <= infinitesimal_cap && std::abs(std::log(eps)) <= infinitesimal_cap;
    r.guaranteed = r.same_direction && r.within_cap;
    if (r.same_direction) r.predicted_sign = regime_sign(sigma);
    return r;
}

/// One step of an integration path: productivity multipliers on sectors i and j.
struct PathStep {
    double on_i = 1.0;
    double on_j = 1.0;
};

struct IntegrationReport {
    /// log V of the composed shock after each step.
    std::vector<double> joint_partials;
    /// log V(step k on sector i alone) + log V(step k on sector j alone).
    std::vector<double> step_terms;
    /// Running sums of step_terms.
    std::vector<double> partial_sums;
    double joint_log_V = 0.0;
    double individual_sum = 0.0;
    double gap = 0.0;
    SynergySign predicted_sign = SynergySign::NotApplicable;
    bool inequality_holds = false;
};

/// Compares log V of the composed shock prod_k (on_i, on_j) with the sum of
/// log V over every individual step on each sector. All multipliers must lie
/// on the same side of 1.
inline IntegrationReport synergy_integration_check(const ProductionNetwork& net, std::size_t i, std::size_t j,
                                                   const Elasticity& sigma, const std::vector<PathStep>& path,
                                                   const SolveOptions& opts = {}) {
    const std::size_t n = net.n();
    if (i >= n || j >= n) throw Error(ErrorCode::IndexOutOfRange, "sector index out of range");
    if (i == j) throw Error(ErrorCode::InvalidArgument, "integration check needs two distinct sectors");
    if (path.empty()) throw Error(ErrorCode::InvalidArgument, "integration path is empty");

    bool up = false, down = false;
    for (const PathStep& s : path) {
        for (double m : {s.on_i, s.on_j}) {
            if (!(m > 0.0) || !std::isfinite(m)) {
                throw Error(ErrorCode::InvalidArgument, "path multipliers must be positive and finite");
            }
            if (m > 1.0) up = true;
            if (m < 1.0) down = true;
        }
    }
    if (up && down) throw Error(ErrorCode::InvalidArgument, "path multipliers must lie on one side of 1");

    const auto N = static_cast<Eigen::Index>(n);
    auto shock = [&](double on_i, double on_j) {
        Vector z = Vector::Ones(N);
        z[Eigen::Index(i)] = on_i;
        z[Eigen::Index(j)] = on_j;
        return ShockVector(std::move(z));
    };

    IntegrationReport r;
    double cum_i = 1.0, cum_j = 1.0, running = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        cum_i *= path[k].on_i;
        cum_j *= path[k].on_j;
        const EquilibriumSolution sol = solve(net, shock(cum_i, cum_j), sigma, opts);
        if (!sol.has_prices()) {
            throw SingularNetworkError("composed shock crosses the singularity frontier at step " +
                                           std::to_string(k),
                                       sol.diagnostics.determinant, k);
        }
        r.joint_partials.push_back(aggregate_output(net, sol.log_p));

        const std::string step = " at step " + std::to_string(k);
        const double term = detail::labelled_log_V(net, shock(path[k].on_i, 1.0), sigma, opts, "shock on sector i" + step) +
                            detail::labelled_log_V(net, shock(1.0, path[k].on_j), sigma, opts, "shock on sector j" + step);
        r.step_terms.push_back(term);
        running += term;
        r.partial_sums.push_back(running);
    }

    r.joint_log_V = r.joint_partials.back();
    r.individual_sum = r.partial_sums.back();
    r.gap = r.joint_log_V - r.individual_sum;
    if (sigma.neutral() || (!up && !down)) {
        r.predicted_sign = SynergySign::Zero;
        r.inequality_holds = std::abs(r.gap) <= 1e-12;
    } else {
        r.predicted_sign = regime_sign(sigma);
        r.inequality_holds = r.predicted_sign == SynergySign::Negative ? r.gap < 0.0 : r.gap > 0.0;
    }
    return r;
}

}  // namespace domarnet
