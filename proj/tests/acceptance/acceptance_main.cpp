// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "domarnet/domarnet.hpp"
#include "support/oracles.hpp"
#include "support/random_networks.hpp"

using namespace domarnet;
using testsupport::Rng;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Records the first failure and keeps the worst observed error.
class Tracker {
public:
    void fail(const std::string& why) {
        if (pass_) first_failure_ = why;
        pass_ = false;
    }
    void check(bool ok, const std::string& why) {
        if (!ok) fail(why);
    }
    void error(double e) { worst_ = std::max(worst_, e); }
    void count() { ++cases_; }

    Outcome outcome(const std::string& label) const {
        std::ostringstream os;
        os << label << ": " << cases_ << " cases, worst error " << worst_;
        if (!pass_) os << "; first failure: " << first_failure_;
        return {pass_, os.str()};
    }

private:
    bool pass_ = true;
    std::string first_failure_;
    double worst_ = 0.0;
    std::size_t cases_ = 0;
};

std::size_t random_size(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double spectral_radius(const Matrix& W) {
    const Eigen::EigenSolver<Matrix> es(W, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Outcome reference_identity() {
    Rng rng(101);
    Tracker t;
    for (int k = 0; k < 100; ++k) {
        const auto net = testsupport::random_network(rng, {.n = random_size(rng, 1, 10), .sparsity = 0.2});
        for (double s : {0.5, 0.9, 1.0, 1.5, 2.0}) {
            const auto sol = solve(net, ShockVector::ones(net.n()), Elasticity(s));
            t.count();
            if (!sol.has_prices()) {
                t.fail("reference state reported singular");
                continue;
            }
            const double err = (sol.p.array() - 1.0).abs().maxCoeff();
            t.error(err);
            t.check(err < 1e-12, "p deviates from 1 by " + std::to_string(err));
        }
    }
    return t.outcome("p = 1 at z = 1");
}

Outcome frontier_values() {
    Tracker t;
    const double f1 = singularity_frontier(0.8, Elasticity(0.9));
    const double f2 = singularity_frontier(0.6, Elasticity(1.5));
    const double e1 = std::abs(f1 / std::pow(0.8, 10) - 1.0);
    const double e2 = std::abs(f2 / std::pow(0.6, -2) - 1.0);
    t.error(std::max(e1, e2));
    t.check(e1 < 1e-12, "frontier(0.8, 0.9) off");
    t.check(e2 < 1e-12, "frontier(0.6, 1.5) off");

    for (auto [prod, s] : {std::pair{0.8, 0.9}, std::pair{0.6, 1.5}, std::pair{0.3, 0.5}, std::pair{0.9, 2.0}}) {
        const Elasticity sigma(s);
        const auto g = grid_scan(prod, sigma, {}, {}, {.resolution = 200, .threads = 4});
        for (std::size_t r = 0; r < g.z2.size(); ++r) {
            for (std::size_t c = 0; c < g.z1.size(); ++c) {
                const double product = g.z1[c] * g.z2[r];
                if (std::abs(product / g.frontier_product - 1.0) < 1e-12) continue;
                const bool predicted = s < 1.0 ? product < g.frontier_product : product > g.frontier_product;
                const bool negative = g.sign[r * g.z1.size() + c] < 0;
                t.count();
                t.check(predicted == negative, "sign mask disagrees at z1=" + std::to_string(g.z1[c]) +
                                                   " z2=" + std::to_string(g.z2[r]));
            }
        }
    }
    return t.outcome("frontier products and grid sign masks");
}

Outcome oracle_agreement() {
    Rng rng(303);
    Tracker t;
    int viable = 0;
    while (viable < 200) {
        const auto net = testsupport::random_network(rng, {.n = random_size(rng, 1, 10), .sparsity = 0.1});
        const double s = std::vector<double>{0.5, 0.8, 1.3, 2.0}[random_size(rng, 0, 3)];
        const auto z = testsupport::uniform_shock(rng, net.n(), 0.7, 1.4);
        const Elasticity sigma(s);
        const Vector zeta = transcendent_shocks(z, sigma);
        if (spectral_radius(transcendent_network(net, zeta)) > 0.99) continue;
        ++viable;
        t.count();
        const auto direct = solve(net, z, sigma, {.method = SolveMethod::Direct});
        const auto fixed = solve(net, z, sigma, {.method = SolveMethod::FixedPoint});
        if (!direct.has_prices() || !fixed.has_prices()) {
            t.fail("viable instance reported singular");
            continue;
        }
        const double err = (*direct.pi - *fixed.pi).cwiseAbs().maxCoeff();
        t.error(err);
        t.check(err < 1e-8, "direct and fixed-point differ by " + std::to_string(err));
    }
    for (int k = 0; k < 50;) {
        const auto net = testsupport::random_network(rng, {.n = random_size(rng, 1, 8), .sparsity = 0.1});
        // an input-free network cannot be pushed past the bound
        if (spectral_radius(net.A()) < 1e-3) continue;
        const bool elastic = k++ % 2 == 0;
        const Elasticity sigma(elastic ? 2.0 : 0.5);
        Vector zeta(static_cast<Eigen::Index>(net.n()));
        for (auto& x : zeta) x = testsupport::uniform(rng, 0.5, 2.0);
        const double target = testsupport::uniform(rng, 1.06, 2.0);
        zeta *= target / spectral_radius(transcendent_network(net, zeta));
        const Vector z = zeta.array().pow(1.0 / (sigma.sigma() - 1.0));
        t.count();
        if (!(spectral_radius(transcendent_network(net, zeta)) > 1.05)) {
            t.fail("constructed instance is not beyond the spectral bound");
            continue;
        }
        const auto fixed = solve(net, ShockVector(z), sigma, {.method = SolveMethod::FixedPoint});
        t.check(fixed.status == SolutionStatus::Singular, "fixed-point did not flag divergence");
    }
    return t.outcome("direct vs fixed-point on 200 viable, divergence on 50 nonviable");
}

Outcome hulten_gradient() {
    Rng rng(404);
    Tracker t;
    const double h = 1e-5;
    for (int k = 0; k < 50; ++k) {
        const auto net = testsupport::random_network(rng, {.n = random_size(rng, 1, 8), .sparsity = 0.2});
        const auto weights = oracle::domar_weights(net);
        const auto N = static_cast<Eigen::Index>(net.n());
        for (double s : {0.5, 0.9, 1.5, 2.0}) {
            const Elasticity sigma(s);
            for (Eigen::Index j = 0; j < N; ++j) {
                Vector up = Vector::Ones(N), down = Vector::Ones(N);
                up[j] = std::exp(h);
                down[j] = std::exp(-h);
                const double fd = (domar_aggregate(net, ShockVector(up), sigma).log_V -
                                   domar_aggregate(net, ShockVector(down), sigma).log_V) /
                                  (2.0 * h);
                const double err = std::abs(fd - weights[std::size_t(j)]);
                t.count();
                t.error(err);
                t.check(err < 1e-5, "gradient mismatch " + std::to_string(err));
            }
        }
    }
    return t.outcome("finite-difference gradient vs Domar weights");
}

Outcome neutral_continuity() {
    Rng rng(505);
    Tracker t;
    for (int k = 0; k < 50; ++k) {
        const auto net = testsupport::random_network(rng, {.n = random_size(rng, 1, 10), .sparsity = 0.2});
        const auto z = testsupport::uniform_shock(rng, net.n(), 0.9, 1.1);
        const double base = domar_aggregate(net, z, Elasticity(1.0)).log_V;
        for (double s : {1.0 - 1e-6, 1.0 + 1e-6}) {
            const double err = std::abs(domar_aggregate(net, z, Elasticity(s)).log_V - base);
            t.count();
            t.error(err);
            t.check(err < 1e-4, "discontinuity " + std::to_string(err));
        }
    }
    return t.outcome("log V continuous through sigma = 1");
}

Outcome synergy_signs() {
    Rng rng(606);
    Tracker t;
    int made = 0;
    while (made < 200) {
        const double a21 = testsupport::uniform(rng, 0.05, 0.95), a12 = testsupport::uniform(rng, 0.05, 0.95);
        const double kap = testsupport::uniform(rng, 0.0, 1.0);
        const auto net = testsupport::two_sector(a21, a12, {kap, 1.0 - kap});
        const bool up = made % 2 == 0;
        const double d = up ? testsupport::uniform(rng, 1.05, 2.0) : testsupport::uniform(rng, 0.5, 0.95);
        const double e = up ? testsupport::uniform(rng, 1.05, 2.0) : testsupport::uniform(rng, 0.5, 0.95);
        // every shock in the suite must leave the network viable at every tested sigma
        bool ok = true;
        for (double s : {0.5, 0.9, 1.5, 2.0}) {
            ok = ok && 1.0 - a21 * a12 * std::pow(d * e, s - 1.0) > 0.05;
        }
        if (!ok) continue;
        ++made;
        const ShockVector za(Vector{{d, 1.0}}), zb(Vector{{1.0, e}});
        for (double s : {0.5, 0.9, 1.0, 1.5, 2.0}) {
            const auto r = synergy_gap(net, za, zb, Elasticity(s));
            t.count();
            if (s < 1.0) t.check(r.gap < 0.0, "inelastic gap not negative: " + std::to_string(r.gap));
            if (s > 1.0) t.check(r.gap > 0.0, "elastic gap not positive: " + std::to_string(r.gap));
            if (s == 1.0) {
                t.error(std::abs(r.gap));
                t.check(std::abs(r.gap) < 1e-12, "neutral gap not zero: " + std::to_string(r.gap));
            }
        }
    }
    return t.outcome("synergy sign by regime on 200 two-sector instances");
}

Outcome cross_identities() {
    Rng rng(707);
    Tracker t;
    int made = 0;
    while (made < 200) {
        const double a21 = testsupport::uniform(rng, 0.05, 0.95), a12 = testsupport::uniform(rng, 0.05, 0.95);
        const oracle::TwoSector cf{1.0 - a21, 1.0 - a12, a21, a12};
        const double d = testsupport::uniform(rng, 0.3, 2.5), e = testsupport::uniform(rng, 0.3, 2.5);
        const double dp = testsupport::uniform(rng, 0.3, 2.5);
        bool ok = true;
        for (double x : {d * e, d, e, dp, d * dp}) ok = ok && cf.D(x, 1.0) > 0.05;
        if (!ok) continue;
        ++made;
        const auto net = testsupport::two_sector(a21, a12);
        auto pi = [&](double x, double y) {
            const auto sol = solve_transcendent_zeta(net, Vector{{x, y}}, Elasticity(2.0));
            return *sol.pi;
        };
        const Vector de = pi(d, e), d1 = pi(d, 1.0), e1 = pi(1.0, e);
        const Vector ddp = pi(d * dp, 1.0), dp1 = pi(dp, 1.0);
        const double errs[] = {
            std::abs(de[0] - d1[0] * e1[0] - cf.cross1(d, e)),
            std::abs(de[1] - d1[1] * e1[1] - cf.cross2(d, e)),
            std::abs(ddp[0] - d1[0] * dp1[0] - cf.compose1(d, dp)),
            std::abs(ddp[1] - d1[1] * dp1[1] - cf.compose2(d, dp)),
        };
        for (double err : errs) {
            t.count();
            t.error(err);
            t.check(err < 1e-10, "identity residual " + std::to_string(err));
        }
    }
    return t.outcome("cross-shock and composed-shock identities");
}

Outcome viability_equivalence() {
    Rng rng(808);
    Tracker t;
    for (int k = 0; k < 400; ++k) {
        const bool below = k % 2 == 0;
        const double rho = below ? testsupport::uniform(rng, 0.05, 1.0 - 1e-3) : testsupport::uniform(rng, 1.0 + 1e-3, 3.0);
        const Matrix W = testsupport::nonnegative_with_radius(rng, random_size(rng, 1, 8), rho);
        const auto r = viability_check(W);
        t.count();
        if (std::abs(r.spectral_radius - 1.0) < 1e-6) continue;
        const bool viable = r.verdict == Verdict::Viable;
        t.check(viable == below, "verdict contradicts constructed radius " + std::to_string(rho));
        t.check(r.inverse_positive == viable, "inverse positivity disagrees at rho " + std::to_string(rho));
        t.check(r.minors_positive() == viable, "principal minors disagree at rho " + std::to_string(rho));
        t.check(r.neumann.converged == viable, "Neumann decay disagrees at rho " + std::to_string(rho));
    }
    return t.outcome("four viability indicators agree");
}

/// A = s P + c J with P a cyclic permutation: eigenvalues s w_k (k > 0) and s + n c, all of modulus >= s.
ProductionNetwork circulant_network(std::size_t n, double s, double c) {
    NetworkData d;
    d.n = n;
    d.A.assign(n, std::vector<double>(n, c));
    for (std::size_t j = 0; j < n; ++j) d.A[(j + 1) % n][j] += s;
    d.alpha0.assign(n, 1.0 - s - static_cast<double>(n) * c);
    d.kappa.assign(n, 1.0 / static_cast<double>(n));
    double partial = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) partial += d.kappa[i];
    d.kappa[n - 1] = 1.0 - partial;
    return validate_network(d);
}

Outcome eigen_bound_lemmas() {
    Rng rng(909);
    Tracker t;
    int viable = 0;
    while (viable < 100) {
        const auto net = testsupport::random_network(rng, {.n = random_size(rng, 2, 8)});
        const double s = testsupport::uniform(rng, 0.3, 3.0);
        const Elasticity sigma(s);
        const auto z = testsupport::uniform_shock(rng, net.n(), 0.5, 2.0);
        EigenBoundVerdict b;
        try {
            b = eigen_bounds(net, z, sigma);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::DefectiveNetwork) continue;
            throw;
        }
        if (b.classification != BoundClass::GuaranteedViable) continue;
        ++viable;
        t.count();
        const auto direct = solve(net, z, sigma);
        const auto fixed = solve(net, z, sigma, {.method = SolveMethod::FixedPoint});
        t.check(direct.status == SolutionStatus::Finite, "guaranteed-viable instance not Finite (direct)");
        t.check(fixed.status == SolutionStatus::Finite, "guaranteed-viable instance not Finite (fixed point)");
    }
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = random_size(rng, 2, 8);
        const double s = testsupport::uniform(rng, 0.5, 0.9);
        const double c = testsupport::uniform(rng, 0.001, (0.98 - s) / static_cast<double>(n));
        const auto net = circulant_network(n, s, c);
        const bool elastic = k % 2 == 0;
        const Elasticity sigma(elastic ? 1.5 : 0.6);
        Vector zeta(static_cast<Eigen::Index>(n));
        for (auto& x : zeta) x = testsupport::uniform(rng, 1.01, 1.6) / s;
        const ShockVector z(Vector(zeta.array().pow(1.0 / (sigma.sigma() - 1.0))));
        const auto b = eigen_bounds(net, z, sigma);
        t.count();
        if (b.classification != BoundClass::GuaranteedNonViable) {
            t.fail("circulant instance not classified GuaranteedNonViable");
            continue;
        }
        const auto direct = solve(net, z, sigma);
        const auto fixed = solve(net, z, sigma, {.method = SolveMethod::FixedPoint});
        t.check(direct.status == SolutionStatus::Singular, "guaranteed-nonviable instance solved (direct)");
        t.check(fixed.status == SolutionStatus::Singular, "guaranteed-nonviable instance converged (fixed point)");
    }
    return t.outcome("eigenvalue bounds: 100 guaranteed viable, 100 guaranteed nonviable");
}

Outcome reduction_exactness() {
    Rng rng(1010);
    Tracker t;
    int made = 0;
    while (made < 100) {
        const auto net = testsupport::random_network(rng, {.n = random_size(rng, 2, 8), .sparsity = 0.2});
        const std::size_t n = net.n();
        const std::size_t i = random_size(rng, 0, n - 1);
        std::size_t j = random_size(rng, 0, n - 2);
        if (j >= i) ++j;
        const double d = testsupport::uniform(rng, 0.6, 1.6), e = testsupport::uniform(rng, 0.6, 1.6);
        Vector zeta = Vector::Ones(static_cast<Eigen::Index>(n));
        zeta[Eigen::Index(i)] = d;
        zeta[Eigen::Index(j)] = e;
        const auto full = solve_transcendent_zeta(net, zeta, Elasticity(2.0));
        if (full.status != SolutionStatus::Finite) continue;
        ++made;
        const auto red = reduce_to_two_sector(net, i, j);
        const Vector pair = solve_reduced(red, d, e);
        const double err = std::max(std::abs(pair[0] - (*full.pi)[Eigen::Index(i)]),
                                    std::abs(pair[1] - (*full.pi)[Eigen::Index(j)]));
        t.count();
        t.error(err);
        t.check(err < 1e-10, "reduced pair differs by " + std::to_string(err));
    }
    return t.outcome("two-sector reduction reproduces the full solve");
}

Outcome spot_values() {
    Tracker t;
    const auto net = testsupport::symmetric_two_sector();
    const Elasticity sigma(2.0);
    const double r2 = std::numbers::sqrt2;
    const auto sol = solve(net, ShockVector(Vector{{r2, r2}}), sigma);
    t.count();
    if (!sol.has_prices()) return {false, "symmetric instance reported singular"};
    const double e_pi = (sol.pi->array() - (1.0 + r2)).abs().maxCoeff();
    const double e_v = std::abs(aggregate_output(net, sol.log_p) + std::log(r2 - 1.0));
    const auto gap = synergy_gap(net, ShockVector(Vector{{r2, 1.0}}), ShockVector(Vector{{1.0, r2}}), sigma);
    const double e_gap = std::abs(gap.gap - 0.108299916535464985);
    t.error(std::max(e_pi, e_v));
    t.check(e_pi < 1e-12, "pi off by " + std::to_string(e_pi));
    t.check(e_v < 1e-12, "log V off by " + std::to_string(e_v));
    t.check(e_gap < 1e-6, "synergy gap off by " + std::to_string(e_gap));
    std::ostringstream os;
    os.precision(10);
    os << "pi=" << (*sol.pi)[0] << " log_V=" << -sol.log_p.dot(net.kappa()) << " gap=" << gap.gap;
    Outcome o = t.outcome("symmetric two-sector spot values");
    o.detail += " (" + os.str() + ")";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"reference identity", reference_identity},
        {"frontier values and sign mask", frontier_values},
        {"direct/fixed-point oracle agreement", oracle_agreement},
        {"Hulten gradient", hulten_gradient},
        {"continuity at sigma = 1", neutral_continuity},
        {"synergy sign suite", synergy_signs},
        {"two-sector product identities", cross_identities},
        {"viability equivalence", viability_equivalence},
        {"eigenvalue bounds", eigen_bound_lemmas},
        {"reduction exactness", reduction_exactness},
        {"closed-form spot values", spot_values},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %2d %s | %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
        if (!o.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", index - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
