#pragma once

// Small dense helpers that Eigen does not provide directly.

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "domarnet/network.hpp"

namespace domarnet::linalg {

/// Maximum absolute row sum.
inline double inf_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    return M.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Leading principal minors det(M[0..k, 0..k]) for k = 1..n.
///
/// Uses Gaussian elimination without pivoting, where minor k is the running
/// product of the first k pivots. If a pivot is exactly zero the elimination
/// cannot continue, and the remaining minors come from separate pivoted
/// factorizations of each leading block.
inline Vector leading_principal_minors(const Matrix& M) {
    const Eigen::Index n = M.rows();
    Vector minors(n);
    Matrix U = M;
    double running = 1.0;
    Eigen::Index k = 0;
    for (; k < n; ++k) {
        const double pivot = U(k, k);
        running *= pivot;
        minors[k] = running;
        if (pivot == 0.0) {
            ++k;
            break;
        }
        for (Eigen::Index r = k + 1; r < n; ++r) {
            const double f = U(r, k) / pivot;
            if (f != 0.0) U.row(r).tail(n - k) -= f * U.row(k).tail(n - k);
        }
    }
    for (; k < n; ++k) {
        minors[k] = M.topLeftCorner(k + 1, k + 1).partialPivLu().determinant();
    }
    return minors;
}

struct NeumannProbe {
    bool converged = false;
    /// ||W^T||_inf at the last power examined.
    double terminal_norm = 0.0;
    /// Number of squarings performed; the last power examined is W^(2^squarings).
    int squarings = 0;
};

/// Checks whether W^T -> 0 by repeated squaring.
///
/// Stops when ||W^(2^k)||_inf drops below `tol` (converged), exceeds
/// `overflow` (diverged), or the squaring budget runs out.
inline NeumannProbe neumann_probe(const Matrix& W, int max_squarings = 64, double tol = 1e-12,
                                  double overflow = 1e200) {
    NeumannProbe probe;
    Matrix P = W;
    for (int k = 0;; ++k) {
        const double norm = inf_norm(P);
        probe.terminal_norm = norm;
        probe.squarings = k;
        if (norm < tol) {
            probe.converged = true;
            return probe;
        }
        if (!std::isfinite(norm) || norm > overflow || k == max_squarings) return probe;
        P = (P * P).eval();
    }
}

}  // namespace domarnet::linalg
