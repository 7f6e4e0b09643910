#pragma once

// Command-line front end. Kept in a header so the test suite can drive it in-process.
//
// Exit codes:
//   0  success
//   1  input error (bad flags, unreadable or invalid network file)
//   2  domain singularity or inapplicability (singular equilibrium, sigma = 1 for
//      a frontier, non-viable shocked network, fixed-point non-convergence)

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "domarnet/domarnet.hpp"
#include "domarnet/network_io.hpp"

namespace domarnet::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitDomain = 2;

inline int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NeutralRegime:
        case ErrorCode::SingularNetwork:
        case ErrorCode::SingularSolution:
        case ErrorCode::NonConvergence:
        case ErrorCode::DefectiveNetwork:
            return kExitDomain;
        default:
            return kExitInput;
    }
}

/// Parses "1.5,2,e" into numbers. `e` stands for Euler's number.
inline std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = text.find(',', start);
        std::string token = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
        token.erase(0, token.find_first_not_of(" \t"));
        token.erase(token.find_last_not_of(" \t") + 1);
        if (token == "e") {
            out.push_back(std::numbers::e);
        } else {
            double v = 0.0;
            const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
            if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size() ||
                !std::isfinite(v)) {
                throw Error(ErrorCode::InvalidArgument, "flag " + flag + ": cannot parse `" + token + "` as a number");
            }
            out.push_back(v);
        }
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

inline Vector to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Copies out, folding -0.0 into 0.0 so reports never print a signed zero.
inline std::vector<double> to_std(const Vector& v) {
    std::vector<double> out(v.data(), v.data() + v.size());
    for (double& x : out) x += 0.0;
    return out;
}

inline Json matrix_json(const Matrix& M) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) rows.push_back(to_std(M.row(i).transpose()));
    return rows;
}

inline Json complex_json(const std::vector<std::complex<double>>& values) {
    Json arr = Json::array();
    for (const auto& c : values) arr.push_back({{"re", c.real()}, {"im", c.imag()}, {"abs", std::abs(c)}});
    return arr;
}

/// Shortest round-trip decimal, independent of the C locale.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

struct CommonFlags {
    std::string net_path;
    double sigma = 1.0;
    std::string z;
    bool strict_shares = false;
    std::string method = "direct";
    double fp_tol = 1e-12;
    std::size_t fp_max_iter = 100000;
    double fp_divergence = 1e12;
    std::optional<double> det_tol;

    SolveOptions solve_options() const {
        SolveOptions o;
        o.method = method == "fixed-point" ? SolveMethod::FixedPoint : SolveMethod::Direct;
        o.fp_tol = fp_tol;
        o.fp_max_iter = fp_max_iter;
        o.fp_divergence_threshold = fp_divergence;
        o.det_singular_tol = det_tol;
        return o;
    }

    ProductionNetwork network() const { return load_network(net_path, {.strict_positive = strict_shares}); }

    ShockVector shock(const ProductionNetwork& net, const std::string& text, const std::string& flag) const {
        if (text.empty()) return ShockVector::ones(net.n());
        const auto v = parse_list(text, flag);
        if (v.size() != net.n()) {
            throw Error(ErrorCode::DimensionMismatch, "flag " + flag + " has " + std::to_string(v.size()) +
                                                          " entries, network has " + std::to_string(net.n()));
        }
        return ShockVector(to_vector(v));
    }
};

inline void add_network_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--net", f.net_path, "Network JSON file")->required();
    cmd->add_flag("--strict-shares", f.strict_shares, "Reject zero entries in A");
}

inline void add_solver_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--method", f.method, "direct or fixed-point")
        ->check(CLI::IsMember({"direct", "fixed-point"}));
    cmd->add_option("--fp-tol", f.fp_tol, "Fixed-point step tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--fp-max-iter", f.fp_max_iter, "Fixed-point iteration budget")->check(CLI::PositiveNumber);
    cmd->add_option("--fp-divergence", f.fp_divergence, "Fixed-point divergence threshold")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--det-tol", f.det_tol, "Determinant singularity tolerance")->check(CLI::NonNegativeNumber);
}

inline void write_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

inline int cmd_solve(const CommonFlags& f, std::ostream& out) {
    const ProductionNetwork net = f.network();
    const Elasticity sigma(f.sigma);
    const ShockVector z = f.shock(net, f.z, "--z");
    const EquilibriumSolution sol = solve(net, z, sigma, f.solve_options());

    Json j;
    j["command"] = "solve";
    j["sigma"] = sigma.sigma();
    j["regime"] = to_string(sigma.regime());
    j["method"] = sigma.neutral() ? "log-linear" : f.method;
    j["status"] = to_string(sol.status);
    j["determinant"] = sol.diagnostics.determinant ? Json(*sol.diagnostics.determinant) : Json(nullptr);
    if (sol.has_prices()) {
        j["p"] = to_std(sol.p);
        j["log_p"] = to_std(sol.log_p);
        if (sol.pi) j["pi"] = to_std(*sol.pi);
        j["residual"] = sol.diagnostics.residual;
    }
    if (f.method == "fixed-point" && !sigma.neutral()) j["iterations"] = sol.diagnostics.iterations;
    write_json(out, j);
    return sol.has_prices() ? kExitOk : kExitDomain;
}

inline int cmd_domar(const CommonFlags& f, std::ostream& out) {
    const ProductionNetwork net = f.network();
    const Elasticity sigma(f.sigma);
    const ShockVector z = f.shock(net, f.z, "--z");
    const DomarResult r = domar_aggregate(net, z, sigma, f.solve_options());

    Json j;
    j["command"] = "domar";
    j["sigma"] = sigma.sigma();
    j["regime"] = to_string(sigma.regime());
    j["log_V"] = r.log_V;
    j["log_p"] = to_std(r.log_p);
    if (r.weights) j["weights"] = to_std(*r.weights);
    write_json(out, j);
    return kExitOk;
}

inline int cmd_synergy(const CommonFlags& f, const std::string& za_text, const std::string& zb_text, bool relaxed,
                       std::ostream& out) {
    const ProductionNetwork net = f.network();
    const Elasticity sigma(f.sigma);
    const ShockVector za = f.shock(net, za_text, "--za");
    const ShockVector zb = f.shock(net, zb_text, "--zb");
    const SynergyReport r = synergy_gap(net, za, zb, sigma, {.relaxed = relaxed, .solve = f.solve_options()});

    Json j;
    j["command"] = "synergy";
    j["sigma"] = sigma.sigma();
    j["regime"] = to_string(sigma.regime());
    j["log_V_joint"] = r.log_V_joint;
    j["log_V_a"] = r.log_V_a;
    j["log_V_b"] = r.log_V_b;
    j["gap"] = r.gap;
    j["predicted_sign"] = to_string(r.predicted_sign);
    j["same_direction"] = r.same_direction;
    j["disjoint"] = r.disjoint;
    write_json(out, j);
    return kExitOk;
}

inline Json viability_json(const ViabilityReport& r) {
    Json j;
    j["verdict"] = to_string(r.verdict);
    j["spectral_radius"] = r.spectral_radius;
    j["determinant"] = r.determinant;
    j["principal_minors"] = to_std(r.principal_minors);
    j["inverse_positive"] = r.inverse_positive;
    j["neumann_converged"] = r.neumann.converged;
    j["neumann_terminal_norm"] = r.neumann.terminal_norm;
    j["neumann_squarings"] = r.neumann.squarings;
    j["eigenvalues"] = complex_json(r.eigenvalues);
    j["indicators_agree"] = r.indicators_agree();
    return j;
}

inline int cmd_viability(const CommonFlags& f, bool sigma_given, const std::string& shock_text, std::ostream& out) {
    const ProductionNetwork net = f.network();
    Json j;
    j["command"] = "viability";
    if (shock_text.empty()) {
        j["network"] = "reference";
        j["report"] = viability_json(reference_viability(net));
        write_json(out, j);
        return kExitOk;
    }
    if (!sigma_given) throw Error(ErrorCode::InvalidArgument, "--shock requires --sigma");
    const Elasticity sigma(f.sigma);
    const ShockVector z = f.shock(net, shock_text, "--shock");
    const Vector zeta = transcendent_shocks(z, sigma);
    const ViabilityReport r = viability_check(transcendent_network(net, zeta));

    j["network"] = "transcendent";
    j["sigma"] = sigma.sigma();
    j["zeta"] = to_std(zeta);
    j["report"] = viability_json(r);
    try {
        const EigenBoundVerdict b = eigen_bounds_zeta(net, zeta);
        j["eigen_bounds"] = {{"classification", to_string(b.classification)},
                             {"zeta_max", b.zeta_max},
                             {"zeta_min", b.zeta_min},
                             {"bound_low", b.bound_low},
                             {"bound_high", b.bound_high}};
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DefectiveNetwork) throw;
        j["eigen_bounds"] = {{"classification", "NotApplicable"}, {"reason", e.what()}};
    }
    write_json(out, j);
    return r.verdict == Verdict::NonViable ? kExitDomain : kExitOk;
}

inline int cmd_reduce(const CommonFlags& f, const std::string& pair_text, std::optional<double> delta,
                      std::optional<double> eps, std::ostream& out) {
    const ProductionNetwork net = f.network();
    const auto pair = parse_list(pair_text, "--pair");
    if (pair.size() != 2 || pair[0] < 0 || pair[1] < 0 || pair[0] != std::floor(pair[0]) ||
        pair[1] != std::floor(pair[1])) {
        throw Error(ErrorCode::InvalidArgument, "flag --pair expects two sector indices, e.g. 0,1");
    }
    const ReducedTwoSector red =
        reduce_to_two_sector(net, static_cast<std::size_t>(pair[0]), static_cast<std::size_t>(pair[1]));

    Json j;
    j["command"] = "reduce";
    j["sectors"] = red.sectors;
    j["remaining"] = red.remaining;
    j["hat_alpha0"] = to_std(red.hat_alpha0);
    j["hat_A"] = matrix_json(red.hat_A);
    j["tilde_alpha0"] = to_std(red.tilde_alpha0);
    j["tilde_A"] = matrix_json(red.tilde_A);
    j["remaining_alpha0"] = to_std(red.remaining_alpha0);
    j["remaining_A"] = matrix_json(red.remaining_A);
    if (delta || eps) {
        const double d = delta.value_or(1.0), e = eps.value_or(1.0);
        j["delta"] = d;
        j["eps"] = e;
        j["pi_pair"] = to_std(solve_reduced(red, d, e));
        j["tilde_residual"] = tilde_form_residual(red, d, e);
    }
    write_json(out, j);
    return kExitOk;
}

inline std::size_t thread_cap() {
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DOMARNET_THREADS")) {
        std::size_t cap = 0;
        const std::string s(env);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), cap);
        if (res.ec == std::errc() && res.ptr == s.data() + s.size() && cap > 0) threads = std::min(threads, cap);
    }
    return threads;
}

inline GridRange parse_range(const std::string& text, const std::string& flag) {
    const auto v = parse_list(text, flag);
    if (v.size() != 2) throw Error(ErrorCode::InvalidArgument, "flag " + flag + " expects lo,hi");
    return {v[0], v[1]};
}

inline void write_grid_csv(std::ostream& out, const DeterminantGrid& g) {
    out << "z1,z2,D,sign\n";
    const std::size_t cols = g.z1.size();
    for (std::size_t r = 0; r < g.z2.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            out << format_double(g.z1[c]) << ',' << format_double(g.z2[r]) << ','
                << format_double(g.D[r * cols + c]) << ',' << g.sign[r * cols + c] << '\n';
        }
    }
}

/// Frontier curve points (t, critical / t) for t on the z1 axis, kept where z2 stays in range.
inline void write_frontier_csv(std::ostream& out, const DeterminantGrid& g, GridRange z2) {
    out << "z1,z2\n";
    for (const double t : g.z1) {
        const double other = g.frontier_product / t;
        if (other >= z2.lo && other <= z2.hi) out << format_double(t) << ',' << format_double(other) << '\n';
    }
}

inline int cmd_grid(double alpha_prod, double sigma_value, const std::string& z1_text, const std::string& z2_text,
                    std::size_t resolution, double contour_eps, const std::string& out_path,
                    const std::string& frontier_path, std::ostream& out, std::ostream& err) {
    const Elasticity sigma(sigma_value);
    const GridRange z1 = z1_text.empty() ? GridRange{} : parse_range(z1_text, "--z1-range");
    const GridRange z2 = z2_text.empty() ? GridRange{} : parse_range(z2_text, "--z2-range");
    const DeterminantGrid g = grid_scan(alpha_prod, sigma, z1, z2,
                                        {.resolution = resolution, .contour_eps = contour_eps, .threads = thread_cap()});

    const std::string summary = "frontier z1*z2=" + format_double(g.frontier_product) +
                                " alpha_prod=" + format_double(alpha_prod) +
                                " sigma=" + format_double(sigma.sigma()) + '\n';
    if (out_path.empty()) {
        write_grid_csv(out, g);
        err << summary;
    } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write `" + out_path + "`");
        write_grid_csv(file, g);
        out << summary;
    }
    if (!frontier_path.empty()) {
        std::ofstream file(frontier_path, std::ios::binary);
        if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write `" + frontier_path + "`");
        write_frontier_csv(file, g, z2);
    }
    return kExitOk;
}

/// Runs the CLI on `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Production-network equilibrium, Domar aggregation and singularity analysis", "domarnet"};
    app.require_subcommand(0, 1);
    bool version = false;
    app.add_flag("--version", version, "Print the version to stderr");

    CommonFlags f;
    bool sigma_given = false;

    auto* solve_cmd = app.add_subcommand("solve", "Solve equilibrium prices");
    auto* domar_cmd = app.add_subcommand("domar", "Aggregate output growth (Domar aggregation)");
    auto* synergy_cmd = app.add_subcommand("synergy", "Synergy gap between two disjoint shocks");
    auto* viability_cmd = app.add_subcommand("viability", "Viability of the reference or shocked network");
    auto* reduce_cmd = app.add_subcommand("reduce", "Reduce the network to a sector pair");
    auto* grid_cmd = app.add_subcommand("grid", "Two-sector determinant grid as CSV");

    for (auto* cmd : {solve_cmd, domar_cmd, synergy_cmd, viability_cmd, reduce_cmd}) add_network_flags(cmd, f);
    for (auto* cmd : {solve_cmd, domar_cmd, synergy_cmd}) {
        cmd->add_option("--sigma", f.sigma, "Elasticity of substitution")->required();
        add_solver_flags(cmd, f);
    }
    for (auto* cmd : {solve_cmd, domar_cmd}) cmd->add_option("--z", f.z, "Productivity levels, comma-separated");

    std::string za, zb;
    bool relaxed = false;
    synergy_cmd->add_option("--za", za, "First shock vector")->required();
    synergy_cmd->add_option("--zb", zb, "Second shock vector")->required();
    synergy_cmd->add_flag("--relaxed", relaxed, "Allow overlapping shock supports");

    std::string shock;
    viability_cmd->add_option("--sigma", f.sigma, "Elasticity of substitution");
    viability_cmd->add_option("--shock", shock, "Productivity levels for the transcendent network");

    std::string pair;
    std::optional<double> delta, eps;
    reduce_cmd->add_option("--pair", pair, "Zero-based sector pair, e.g. 0,1")->required();
    reduce_cmd->add_option("--delta", delta, "Transcendent multiplier on the first sector")->check(CLI::PositiveNumber);
    reduce_cmd->add_option("--eps", eps, "Transcendent multiplier on the second sector")->check(CLI::PositiveNumber);

    double alpha_prod = 0.0, grid_sigma = 1.0, contour_eps = 1e-3;
    std::string z1_range, z2_range, out_path, frontier_path;
    std::size_t resolution = 200;
    grid_cmd->add_option("--alpha-prod", alpha_prod, "Product a21*a12 in (0,1)")->required();
    grid_cmd->add_option("--sigma", grid_sigma, "Elasticity of substitution")->required();
    grid_cmd->add_option("--z1-range", z1_range, "lo,hi (default 0.01,3.0)");
    grid_cmd->add_option("--z2-range", z2_range, "lo,hi (default 0.01,3.0)");
    grid_cmd->add_option("--resolution", resolution, "Points per axis")->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    grid_cmd->add_option("--contour-eps", contour_eps, "|D| threshold for the D=0 contour")->check(CLI::PositiveNumber);
    grid_cmd->add_option("--out", out_path, "Write CSV here instead of stdout");
    grid_cmd->add_option("--frontier-out", frontier_path, "Also write frontier curve points (z1,z2) here");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }
    if (version) err << "domarnet " << kVersion << '\n';
    if (app.get_subcommands().empty()) {
        if (version) return kExitOk;
        err << app.help();
        return kExitInput;
    }
    sigma_given = viability_cmd->count("--sigma") > 0;

    try {
        if (*solve_cmd) return cmd_solve(f, out);
        if (*domar_cmd) return cmd_domar(f, out);
        if (*synergy_cmd) return cmd_synergy(f, za, zb, relaxed, out);
        if (*viability_cmd) return cmd_viability(f, sigma_given, shock, out);
        if (*reduce_cmd) return cmd_reduce(f, pair, delta, eps, out);
        if (*grid_cmd) {
            return cmd_grid(alpha_prod, grid_sigma, z1_range, z2_range, resolution, contour_eps, out_path, frontier_path, out,
                            err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    }
    return kExitInput;
}

}  // namespace domarnet::cli
