#pragma once

// Singularity and viability diagnostics for production networks.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "domarnet/equilibrium.hpp"
#include "domarnet/linalg.hpp"
#include "domarnet/network.hpp"

namespace domarnet {

enum class Verdict { Viable, NonViable, Indeterminate };

inline std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Viable: return "Viable";
        case Verdict::NonViable: return "NonViable";
        case Verdict::Indeterminate: return "Indeterminate";
    }
    return "Unknown";
}

struct ViabilityOptions {
    /// Half-width of the band around rho = 1 where no verdict is asserted.
    double band = 1e-6;
    int neumann_max_squarings = 64;
    double neumann_tol = 1e-12;
    /// Relative tolerance for treating tiny negative inverse entries as zero.
    double inverse_tol = 1e-12;
    /// Inside the band, a determinant at or below this makes the verdict NonViable.
    double det_zero_tol = 1e-12;
};

struct ViabilityReport {
    double determinant = 0.0;
    Vector principal_minors;
    double spectral_radius = 0.0;
    std::vector<std::complex<double>> eigenvalues;
    linalg::NeumannProbe neumann;
    bool inverse_positive = false;
    Verdict verdict = Verdict::Indeterminate;

    bool minors_positive() const { return (principal_minors.array() > 0.0).all(); }

    /// True when all five indicators tell the same story.
    bool indicators_agree() const {
        const bool viable = verdict == Verdict::Viable;
        return minors_positive() == viable && inverse_positive == viable &&
               neumann.converged == viable && (determinant > 0.0 || !viable);
    }
};

namespace detail {

inline std::vector<std::complex<double>> eigenvalues_of(const Matrix& W) {
    const Eigen::EigenSolver<Matrix> es(W, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::InternalInconsistency, "eigenvalue iteration did not converge");
    }
    const auto& ev = es.eigenvalues();
    std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return out;
}

}  // namespace detail

/// Viability of a nonnegative network W: det(I - W), leading minors of I - W,
/// spectral radius, Neumann decay of W^T and nonnegativity of [I - W]^-1.
inline ViabilityReport viability_check(const Matrix& W, const ViabilityOptions& opts = {}) {
    if (W.rows() != W.cols()) throw Error(ErrorCode::NonSquare, "viability check needs a square matrix");
    if (W.rows() == 0) throw Error(ErrorCode::NonSquare, "viability check needs a nonempty matrix");
    if (!W.allFinite()) throw Error(ErrorCode::NonFiniteValue, "matrix has non-finite entries");
    if ((W.array() < 0.0).any()) throw Error(ErrorCode::NegativeEntry, "matrix has negative entries");

    const Eigen::Index n = W.rows();
    const Matrix M = Matrix::Identity(n, n) - W;

    ViabilityReport r;
    const Eigen::PartialPivLU<Matrix> lu(M);
    r.determinant = lu.determinant();
    r.principal_minors = linalg::leading_principal_minors(M);
    r.eigenvalues = detail::eigenvalues_of(W);
    r.spectral_radius = std::abs(r.eigenvalues.front());
    r.neumann = linalg::neumann_probe(W, opts.neumann_max_squarings, opts.neumann_tol);

    if (r.determinant != 0.0) {
        const Matrix inv = lu.inverse();
        const double scale = inv.cwiseAbs().maxCoeff();
        r.inverse_positive = inv.allFinite() && (inv.array() >= -opts.inverse_tol * scale).all();
    }

    if (r.spectral_radius < 1.0 - opts.band) {
        r.verdict = Verdict::Viable;
    } else if (r.spectral_radius > 1.0 + opts.band || r.determinant <= opts.det_zero_tol) {
        r.verdict = Verdict::NonViable;
    } else {
        r.verdict = Verdict::Indeterminate;
    }
    return r;
}

/// Viability of the unshocked network A. A validated network is always viable;
/// anything else is reported as an internal inconsistency.
inline ViabilityReport reference_viability(const ProductionNetwork& net, const ViabilityOptions& opts = {}) {
    ViabilityReport r = viability_check(net.A(), opts);
    if (r.verdict != Verdict::Viable) {
        throw Error(ErrorCode::InternalInconsistency,
                    "validated network failed the reference viability check (spectral radius " +
                        std::to_string(r.spectral_radius) + ")");
    }
    return r;
}

/// The transcendent network A<zeta> that appears in the price system.
/// It is diagonally similar to <zeta>A, so both share spectrum, minors and sign pattern of the inverse.
inline Matrix transcendent_network(const ProductionNetwork& net, const Vector& zeta) {
    detail::check_zeta(net, zeta);
    return detail::scale_columns(net.A(), zeta);
}

enum class BoundClass { GuaranteedViable, GuaranteedNonViable, Indeterminate };

inline std::string_view to_string(BoundClass c) noexcept {
    switch (c) {
        case BoundClass::GuaranteedViable: return "GuaranteedViable";
        case BoundClass::GuaranteedNonViable: return "GuaranteedNonViable";
        case BoundClass::Indeterminate: return "Indeterminate";
    }
    return "Unknown";
}

struct EigenBoundVerdict {
    double zeta_max = 0.0;
    double zeta_min = 0.0;
    /// zeta_max * max|lambda|: below 1 secures viability.
    double bound_low = 0.0;
    /// zeta_min * min|lambda|: above 1 rules viability out.
    double bound_high = 0.0;
    BoundClass classification = BoundClass::Indeterminate;
    std::vector<std::complex<double>> eigenvalues;
};

inline constexpr double kDefectTolerance = 1e-8;
/// Bounds within this distance of 1 are not trusted to classify.
inline constexpr double kBoundBand = 1e-6;

/// Classifies A<zeta> from the spectrum of the reference network A alone.
/// Requires distinct eigenvalues; throws DefectiveNetwork otherwise.
inline EigenBoundVerdict eigen_bounds_zeta(const ProductionNetwork& net, const Vector& zeta,
                                           double defect_tol = kDefectTolerance, double band = kBoundBand) {
    detail::check_zeta(net, zeta);
    EigenBoundVerdict v;
    v.eigenvalues = detail::eigenvalues_of(net.A());

    const double scale = std::max(std::abs(v.eigenvalues.front()), std::numeric_limits<double>::min());
    for (std::size_t a = 0; a < v.eigenvalues.size(); ++a) {
        for (std::size_t b = a + 1; b < v.eigenvalues.size(); ++b) {
            if (std::abs(v.eigenvalues[a] - v.eigenvalues[b]) <= defect_tol * scale) {
                throw Error(ErrorCode::DefectiveNetwork,
                            "reference network has a repeated eigenvalue; eigenvalue bounds do not apply");
            }
        }
    }

    v.zeta_max = zeta.maxCoeff();
    v.zeta_min = zeta.minCoeff();
    v.bound_low = v.zeta_max * std::abs(v.eigenvalues.front());
    v.bound_high = v.zeta_min * std::abs(v.eigenvalues.back());
    if (v.bound_low < 1.0 - band) {
        v.classification = BoundClass::GuaranteedViable;
    } else if (v.bound_high > 1.0 + band) {
        v.classification = BoundClass::GuaranteedNonViable;
    }
    return v;
}

inline EigenBoundVerdict eigen_bounds(const ProductionNetwork& net, const ShockVector& z,
                                      const Elasticity& sigma, double defect_tol = kDefectTolerance,
                                      double band = kBoundBand) {
    require_size(net, z);
    return eigen_bounds_zeta(net, transcendent_shocks(z, sigma), defect_tol, band);
}

// -- Two-sector closed forms -------------------------------------------------

namespace detail {
inline void check_alpha_prod(double alpha_prod) {
    if (!(alpha_prod > 0.0 && alpha_prod < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha_prod must lie in (0, 1)");
    }
}
}  // namespace detail

/// D = 1 - a21 a12 (z1 z2)^(sigma - 1) for a two-sector network without self-inputs.
inline double two_sector_determinant(double alpha_prod, const Elasticity& sigma, double z1, double z2) {
    detail::check_alpha_prod(alpha_prod);
    if (!(z1 > 0.0) || !(z2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "z1 and z2 must be positive");
    return 1.0 - alpha_prod * std::pow(z1 * z2, sigma.sigma() - 1.0);
}

/// Product z1 z2 on the D = 0 locus: alpha_prod^(1 / (1 - sigma)).
/// Below 1 for inelastic networks, above 1 for elastic ones.
inline double singularity_frontier(double alpha_prod, const Elasticity& sigma) {
    detail::check_alpha_prod(alpha_prod);
    if (sigma.neutral()) {
        throw Error(ErrorCode::NeutralRegime, "a Cobb-Douglas network has no singularity frontier");
    }
    return std::pow(alpha_prod, 1.0 / sigma.exponent());
}

struct GridRange {
    double lo = 0.01;
    double hi = 3.0;
};

struct GridOptions {
    std::size_t resolution = 200;
    /// |D| below this marks a cell as lying on the D = 0 contour.
    double contour_eps = 1e-3;
    /// Worker threads; 0 means hardware concurrency.
    std::size_t threads = 1;
};

struct DeterminantGrid {
    std::vector<double> z1;  ///< column coordinates
    std::vector<double> z2;  ///< row coordinates
    /// Row-major over (z2, z1): D[r * z1.size() + c].
    std::vector<double> D;
    /// Sign of D: -1, 0 or +1. Negative cells are the singular region.
    std::vector<int> sign;
    /// |D| < contour_eps: cells on the D = 0 locus.
    std::vector<bool> on_contour;
    double frontier_product = 0.0;

    double at(std::size_t row, std::size_t col) const { return D[row * z1.size() + col]; }
};

namespace detail {
inline std::vector<double> linspace(GridRange r, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] = r.lo + (r.hi - r.lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    out.back() = r.hi;
    return out;
}
}  // namespace detail

/// Evaluates D over a z1 x z2 grid. Rows are split across threads; each
/// cell is written by exactly one worker so the output does not depend on scheduling.
inline DeterminantGrid grid_scan(double alpha_prod, const Elasticity& sigma, GridRange z1_range,
                                 GridRange z2_range, const GridOptions& opts = {}) {
    detail::check_alpha_prod(alpha_prod);
    if (sigma.neutral()) {
        throw Error(ErrorCode::NeutralRegime, "D does not depend on z at sigma = 1");
    }
    if (opts.resolution < 2) throw Error(ErrorCode::InvalidArgument, "grid resolution must be at least 2");
    for (const GridRange& r : {z1_range, z2_range}) {
        if (!(r.lo > 0.0) || !(r.hi > r.lo) || !std::isfinite(r.hi)) {
            throw Error(ErrorCode::InvalidArgument, "grid ranges must be positive and increasing");
        }
    }

    DeterminantGrid g;
    g.z1 = detail::linspace(z1_range, opts.resolution);
    g.z2 = detail::linspace(z2_range, opts.resolution);
    g.frontier_product = singularity_frontier(alpha_prod, sigma);
    const std::size_t rows = g.z2.size();
    const std::size_t cols = g.z1.size();
    g.D.assign(rows * cols, 0.0);
    g.sign.assign(rows * cols, 0);
    std::vector<char> contour(rows * cols, 0);

    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t r = first; r < rows; r += stride) {
            for (std::size_t c = 0; c < cols; ++c) {
                const double d = two_sector_determinant(alpha_prod, sigma, g.z1[c], g.z2[r]);
                g.D[r * cols + c] = d;
                g.sign[r * cols + c] = (d > 0.0) - (d < 0.0);
                contour[r * cols + c] = std::abs(d) < opts.contour_eps;
            }
        }
    };

    std::size_t threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
    threads = std::min(threads, rows);
    if (threads <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }
    g.on_contour.assign(contour.begin(), contour.end());
    return g;
}

}  // namespace domarnet
