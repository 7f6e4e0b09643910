#pragma once

// Production-network domain types: share matrix, shocks, elasticity.
//
// Orientation: A(i, j) is the cost share of input commodity i in sector j,
// so columns are producing sectors and every column j satisfies
//   alpha0(j) + sum_i A(i, j) = 1.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "domarnet/error.hpp"

namespace domarnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// |sigma - 1| below this routes to the Cobb-Douglas (log-linear) solver.
inline constexpr double kNeutralTolerance = 1e-9;
/// Absolute tolerance on column and expenditure share sums.
inline constexpr double kShareSumTolerance = 1e-12;

enum class Regime { Inelastic, Neutral, Elastic };

inline std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::Inelastic: return "inelastic";
        case Regime::Neutral: return "neutral";
        case Regime::Elastic: return "elastic";
    }
    return "unknown";
}

/// Universal elasticity of substitution.
class Elasticity {
public:
    explicit Elasticity(double sigma) : sigma_(sigma) {
        if (!std::isfinite(sigma) || sigma <= 0.0) {
            throw Error(ErrorCode::InvalidArgument,
                        "elasticity must be positive and finite, got " + std::to_string(sigma));
        }
    }

    double sigma() const noexcept { return sigma_; }
    /// Exponent 1 - sigma that maps prices to transcendent prices.
    double exponent() const noexcept { return 1.0 - sigma_; }

    Regime regime() const noexcept {
        if (std::abs(sigma_ - 1.0) < kNeutralTolerance) return Regime::Neutral;
        return sigma_ < 1.0 ? Regime::Inelastic : Regime::Elastic;
    }

    bool neutral() const noexcept { return regime() == Regime::Neutral; }

private:
    double sigma_;
};

/// Hicks-neutral productivity levels z, reference value 1.
class ShockVector {
public:
    explicit ShockVector(Vector z) : z_(std::move(z)) {
        for (Eigen::Index j = 0; j < z_.size(); ++j) {
            if (!std::isfinite(z_[j]) || z_[j] <= 0.0) {
                throw Error(ErrorCode::InvalidArgument,
                            "productivity level z[" + std::to_string(j) +
                                "] must be positive and finite");
            }
        }
    }

    static ShockVector ones(std::size_t n) {
        return ShockVector(Vector::Ones(static_cast<Eigen::Index>(n)));
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(z_.size()); }
    const Vector& values() const noexcept { return z_; }
    double operator[](std::size_t j) const { return z_[static_cast<Eigen::Index>(j)]; }

    /// Component-wise product: applying two multiplicative shocks in sequence.
    ShockVector compose(const ShockVector& other) const {
        if (other.size() != size()) {
            throw Error(ErrorCode::DimensionMismatch, "cannot compose shocks of different length");
        }
        return ShockVector(z_.cwiseProduct(other.z_));
    }

    bool is_reference() const noexcept { return (z_.array() == 1.0).all(); }

private:
    Vector z_;
};

/// Unvalidated network data as read from a file or built by hand.
struct NetworkData {
    std::size_t n = 0;
    std::vector<std::vector<double>> A;
    std::vector<double> alpha0;
    std::vector<double> kappa;
    std::vector<std::string> names;
};

struct ValidationOptions {
    /// Require every A(i, j) > 0, the setting under which reference viability is proved.
    /// When false, zero entries are accepted.
    bool strict_positive = false;
};

class ProductionNetwork;
ProductionNetwork validate_network(const NetworkData& raw, ValidationOptions options = {});

/// A validated economy. Immutable; only validate_network constructs one.
class ProductionNetwork {
public:
    std::size_t n() const noexcept { return static_cast<std::size_t>(A_.rows()); }
    const Matrix& A() const noexcept { return A_; }
    const Vector& alpha0() const noexcept { return alpha0_; }
    const Vector& kappa() const noexcept { return kappa_; }
    const std::vector<std::string>& names() const noexcept { return names_; }

    NetworkData data() const {
        NetworkData d;
        d.n = n();
        d.A.assign(n(), std::vector<double>(n()));
        for (std::size_t i = 0; i < n(); ++i)
            for (std::size_t j = 0; j < n(); ++j)
                d.A[i][j] = A_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        d.alpha0.assign(alpha0_.data(), alpha0_.data() + alpha0_.size());
        d.kappa.assign(kappa_.data(), kappa_.data() + kappa_.size());
        d.names = names_;
        return d;
    }

private:
    ProductionNetwork(Matrix A, Vector alpha0, Vector kappa, std::vector<std::string> names)
        : A_(std::move(A)), alpha0_(std::move(alpha0)), kappa_(std::move(kappa)),
          names_(std::move(names)) {}

    friend ProductionNetwork validate_network(const NetworkData&, ValidationOptions);

    Matrix A_;
    Vector alpha0_;
    Vector kappa_;
    std::vector<std::string> names_;
};

inline ProductionNetwork validate_network(const NetworkData& raw, ValidationOptions options) {
    std::vector<Violation> violations;
    const std::size_t n = raw.n;

    auto dim = [&](std::string msg) {
        violations.push_back({ErrorCode::DimensionMismatch, std::nullopt, 0.0, std::move(msg)});
    };
    if (n == 0) dim("n must be at least 1");
    if (raw.A.size() != n) dim("A has " + std::to_string(raw.A.size()) + " rows, expected n");
    for (std::size_t i = 0; i < raw.A.size(); ++i) {
        if (raw.A[i].size() != n) dim("A[" + std::to_string(i) + "] has wrong length");
    }
    if (raw.alpha0.size() != n) dim("alpha0 has wrong length");
    if (raw.kappa.size() != n) dim("kappa has wrong length");
    if (!raw.names.empty() && raw.names.size() != n) dim("names has wrong length");
    if (!violations.empty()) throw ValidationError(std::move(violations));

    const auto N = static_cast<Eigen::Index>(n);
    Matrix A(N, N);
    Vector alpha0(N), kappa(N);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) A(Eigen::Index(i), Eigen::Index(j)) = raw.A[i][j];
        alpha0[Eigen::Index(i)] = raw.alpha0[i];
        kappa[Eigen::Index(i)] = raw.kappa[i];
    }

    if (!A.allFinite() || !alpha0.allFinite() || !kappa.allFinite()) {
        violations.push_back({ErrorCode::NonFiniteValue, std::nullopt, 0.0,
                              "shares must be finite numbers"});
        throw ValidationError(std::move(violations));
    }

    for (Eigen::Index j = 0; j < N; ++j) {
        for (Eigen::Index i = 0; i < N; ++i) {
            const double a = A(i, j);
            if (a < 0.0 || (options.strict_positive && a == 0.0)) {
                violations.push_back({ErrorCode::NegativeShare, std::size_t(j), a,
                                      "A[" + std::to_string(i) + "][" + std::to_string(j) +
                                          "] = " + std::to_string(a) +
                                          (a < 0.0 ? " is negative" : " is zero in strict mode")});
            }
        }
        if (alpha0[j] <= 0.0) {
            violations.push_back({ErrorCode::NegativeShare, std::size_t(j), alpha0[j],
                                  "alpha0[" + std::to_string(j) + "] must be positive"});
        }
        const double deviation = alpha0[j] + A.col(j).sum() - 1.0;
        if (std::abs(deviation) > kShareSumTolerance) {
            violations.push_back({ErrorCode::ColumnSumViolation, std::size_t(j), deviation,
                                  "column " + std::to_string(j) + " sums to " +
                                      std::to_string(1.0 + deviation)});
        }
    }

    for (Eigen::Index i = 0; i < N; ++i) {
        if (kappa[i] < 0.0) {
            violations.push_back({ErrorCode::NegativeShare, std::size_t(i), kappa[i],
                                  "kappa[" + std::to_string(i) + "] is negative"});
        }
    }
    const double kappa_dev = kappa.sum() - 1.0;
    if (std::abs(kappa_dev) > kShareSumTolerance) {
        violations.push_back({ErrorCode::KappaSumViolation, std::nullopt, kappa_dev,
                              "kappa sums to " + std::to_string(1.0 + kappa_dev)});
    }

    if (!violations.empty()) throw ValidationError(std::move(violations));
    return ProductionNetwork(std::move(A), std::move(alpha0), std::move(kappa), raw.names);
}

inline void require_size(const ProductionNetwork& net, const ShockVector& z) {
    if (z.size() != net.n()) {
        throw Error(ErrorCode::DimensionMismatch, "shock vector has " + std::to_string(z.size()) +
                                                      " entries, network has " +
                                                      std::to_string(net.n()) + " sectors");
    }
}

/// zeta_j = z_j^(sigma - 1). Undefined in the neutral regime.
inline Vector transcendent_shocks(const ShockVector& z, const Elasticity& sigma) {
    if (sigma.neutral()) {
        throw Error(ErrorCode::NeutralRegime, "transcendent shocks are undefined at sigma = 1");
    }
    const double e = sigma.sigma() - 1.0;
    return z.values().unaryExpr([e](double v) { return std::pow(v, e); });
}

}  // namespace domarnet
