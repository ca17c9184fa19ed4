#pragma once

// The four CLI subcommands plus `synth`, as functions returning exit codes.
// Exit codes: 0 ok, 1 usage, 2 config, 3 forward solver, 4 inverse solver.

#include <cmath>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nodal/asymptotics.hpp"
#include "nodal/dirac_model.hpp"
#include "nodal/errors.hpp"
#include "nodal/forward_solver.hpp"
#include "nodal/inverse_solver.hpp"
#include "nodal/nodal_io.hpp"

namespace nodal {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int config = 2;
inline constexpr int forward = 3;
inline constexpr int inverse = 4;
}  // namespace exit_code

/// Acceptance thresholds of the forward-invert roundtrip.
struct RoundtripThresholds {
    double theta = 1e-2;
    double c = 1e-2;
    double potential = 5e-2;
    double mass = 1e-1;
};

struct ForwardArgs {
    std::string config;
    int n_min = 1;
    int n_max = 8;
    bool even = false;
    std::string out;
    std::string csv;
    int grid_n = 0;
};

struct InvertArgs {
    std::string nodes;
    Mode mode = Mode::consistent;
    int grid_size = 64;
    std::string out;
    std::string csv;
};

struct VerifyArgs {
    std::string config;
    int n_min = 2;
    int n_max = 512;
    Mode mode = Mode::consistent;
    std::string out;
    int grid_n = 0;
};

struct AsymptArgs {
    std::string config;
    std::vector<int> n;
    std::string out;
    std::string csv;
    int grid_n = 0;
};

struct SynthArgs {
    std::string config;  // empty with `example`
    bool example = false;
    Mode mode = Mode::consistent;
    int n_min = 8;
    int n_max = 512;
    std::string out;
};

/// Integration steps per half: the flag if given, else NODAL_GRID_N, else 4096.
inline SolverOptions solver_options(int grid_n) {
    SolverOptions opts;
    if (grid_n > 0) {
        opts.steps_per_half = grid_n;
    } else if (const char* env = std::getenv("NODAL_GRID_N")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 2 || v > (1L << 24)) {
            throw Error(ErrorKind::InvalidConfig, std::string("NODAL_GRID_N must be an integer >= 2, got '") + env + "'");
        }
        opts.steps_per_half = static_cast<int>(v);
    }
    return opts;
}

namespace detail {

inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text(path, text);
    }
}

inline json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::vector<int> n_values(int lo, int hi, bool even) {
    std::vector<int> out;
    for (int n = lo; n <= hi; ++n) {
        if (!even || n % 2 == 0) out.push_back(n);
    }
    return out;
}

inline json reconstruction_json(const ReconstructionResult& r) {
    const auto& d = r.diagnostics;
    json excluded = json::array();
    for (auto [a, b] : d.excluded) excluded.push_back({a, b});
    return {{"mode", to_string(r.mode)},
            {"theta_hat", r.theta_hat},
            {"c_hat", r.c_hat},
            {"m_hat", r.m_hat},
            {"mass_from_slope", d.mass_from_slope},
            {"label_shift", d.shift},
            {"one_sided_limits",
             {{"phi1_0", d.limits.phi1_0},
              {"phi1_half", d.limits.phi1_half},
              {"phi2_half", d.limits.phi2_half},
              {"phi2_pi", d.limits.phi2_pi}}},
            {"psi1_0", d.psi1_0},
            {"offsets", {{"left", d.offset_left}, {"right", d.offset_right}}},
            {"eigenvalue_correction", nullable(d.eigenvalue_correction)},
            {"excluded_zones", excluded}};
}

inline json grid_json(const ReconstructionResult& r) {
    json rows = json::array();
    const auto& d = r.diagnostics;
    for (std::size_t i = 0; i < r.V_hat.size(); ++i) {
        rows.push_back({{"x", r.V_hat[i].first},
                        {"phi", d.phi[i].value},
                        {"phi_stderr", d.phi[i].std_error},
                        {"psi", d.psi[i].value},
                        {"psi_stderr", d.psi[i].std_error},
                        {"V_hat", r.V_hat[i].second}});
    }
    return rows;
}

inline std::string grid_csv(const ReconstructionResult& r) {
    std::vector<std::vector<double>> rows;
    const auto& d = r.diagnostics;
    for (std::size_t i = 0; i < r.V_hat.size(); ++i) {
        rows.push_back({r.V_hat[i].first, d.phi[i].value, d.phi[i].std_error, d.psi[i].value, d.psi[i].std_error,
                        r.V_hat[i].second});
    }
    return to_csv({"x", "phi", "phi_stderr", "psi", "psi_stderr", "V_hat"}, rows);
}

inline NodalDataset truncated(const NodalDataset& ds, int n_max) {
    NodalDataset out;
    out.provenance = ds.provenance;
    for (const auto& [n, e] : ds.entries) {
        if (n <= n_max) out.entries.emplace(n, e);
    }
    return out;
}

struct RoundtripErrors {
    double theta = 0.0, c = 0.0, mass = 0.0, potential = 0.0;
};

inline RoundtripErrors roundtrip_errors(const ProblemConfig& cfg, const ReconstructionResult& r) {
    RoundtripErrors e;
    e.theta = std::abs(r.theta_hat - cfg.theta);
    e.c = std::abs(r.c_hat - cfg.c_even);
    e.mass = std::abs(r.m_hat - cfg.mass);
    for (auto [x, v] : r.V_hat) e.potential = std::max(e.potential, std::abs(v - cfg.V(x)));
    return e;
}

/// Convention that a reconstruction mode builds into its mass formula.
inline std::string pipeline_convention(Mode mode) {
    return mode == Mode::paper ? "m^2 csc^2(theta)/2" : "m^2/2";
}

inline int first_label_guess(const ProblemConfig& cfg, int n, double first_node) {
    return static_cast<int>(std::lround((n * first_node - (cfg.theta - half_pi)) / pi));
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int cmd_forward(const ForwardArgs& a, std::ostream& out, std::ostream& err) {
    if (a.n_min < 1 || a.n_max < a.n_min) {
        err << "forward: need 1 <= n-min <= n-max\n";
        return exit_code::usage;
    }
    ProblemConfig cfg;
    SolverOptions opts;
    try {
        cfg = load_config(a.config);
        opts = solver_options(a.grid_n);
    } catch (const Error& e) {
        err << "forward: " << e.what() << "\n";
        return exit_code::config;
    }
    NodalFile file;
    file.config = config_to_json(cfg);
    file.dataset.provenance = Provenance::forward_generated;
    ForwardSolver solver(cfg, opts);
    for (int n : detail::n_values(a.n_min, a.n_max, a.even)) {
        try {
            NodalSet set = solver.nodal_set(n);
            file.dataset.entries[n] = NodalEntry{set.mu_n, std::move(set.nodes), std::nullopt};
        } catch (const Error& e) {
            err << "forward: n = " << n << ": " << e.what() << "\n";
            return exit_code::forward;
        }
    }
    try {
        detail::emit(a.out, dump(nodal_file_to_json(file)), out);
        if (!a.csv.empty()) {
            std::vector<std::vector<double>> rows;
            for (const auto& [n, e] : file.dataset.entries) {
                for (std::size_t r = 0; r < e.nodes.size(); ++r) {
                    rows.push_back({static_cast<double>(n), *e.mu_n, static_cast<double>(r), e.nodes[r]});
                }
            }
            write_text(a.csv, to_csv({"n", "mu_n", "rank", "node"}, rows));
        }
    } catch (const Error& e) {
        err << "forward: " << e.what() << "\n";
        return exit_code::forward;
    }
    return exit_code::ok;
}

inline int cmd_invert(const InvertArgs& a, std::ostream& out, std::ostream& err) {
    try {
        NodalFile file = load_nodal_file(a.nodes);
        ReconstructOptions ro;
        ro.points_per_half = a.grid_size;
        ReconstructionResult r = reconstruct(file.dataset, {}, a.mode, ro);
        json n_list = json::array();
        for (int n : even_indices(file.dataset)) n_list.push_back(n);
        json report = {{"version", format_version},
                       {"command", "invert"},
                       {"source", {{"nodes", a.nodes}, {"provenance", to_string(file.dataset.provenance)}, {"even_n", n_list}}},
                       {"reconstruction", detail::reconstruction_json(r)},
                       {"grid", detail::grid_json(r)}};
        detail::emit(a.out, dump(report), out);
        if (!a.csv.empty()) write_text(a.csv, detail::grid_csv(r));
    } catch (const Error& e) {
        err << "invert: " << e.what() << "\n";
        return exit_code::inverse;
    }
    return exit_code::ok;
}

inline int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    if (a.n_min < 1 || a.n_max < a.n_min) {
        err << "verify: need 1 <= n-min <= n-max\n";
        return exit_code::usage;
    }
    ProblemConfig cfg;
    SolverOptions opts;
    try {
        cfg = load_config(a.config);
        opts = solver_options(a.grid_n);
    } catch (const Error& e) {
        err << "verify: config: " << e.what() << "\n";
        return exit_code::config;
    }
    NodalDataset data;
    data.provenance = Provenance::forward_generated;
    ForwardSolver solver(cfg, opts);
    for (int n : even_range(a.n_min, a.n_max)) {
        try {
            NodalSet set = solver.nodal_set(n);
            data.entries[n] = NodalEntry{set.mu_n, std::move(set.nodes), std::nullopt};
        } catch (const Error& e) {
            err << "verify: forward: n = " << n << ": " << e.what() << "\n";
            return exit_code::forward;
        }
    }

    const RoundtripThresholds th;
    json report = {{"version", format_version},
                   {"command", "verify"},
                   {"config", config_to_json(cfg)},
                   {"mode", to_string(a.mode)},
                   {"n_range", {a.n_min, a.n_max}},
                   {"thresholds", {{"theta", th.theta}, {"c", th.c}, {"V_inf", th.potential}, {"mass", th.mass}}}};
    int code = exit_code::ok;
    bool all_pass = false;
    try {
        ReconstructionResult r = reconstruct(data, {}, a.mode);
        detail::RoundtripErrors e = detail::roundtrip_errors(cfg, r);
        auto flag = [](double v, double t) { return v <= t ? "PASS" : "FAIL"; };
        report["reconstruction"] = detail::reconstruction_json(r);
        report["errors"] = {{"theta", e.theta}, {"c", e.c}, {"V_inf", e.potential}, {"mass", e.mass}};
        report["checks"] = {{"theta", flag(e.theta, th.theta)},
                            {"c", flag(e.c, th.c)},
                            {"V_inf", flag(e.potential, th.potential)},
                            {"mass", flag(e.mass, th.mass)}};
        all_pass = e.theta <= th.theta && e.c <= th.c && e.potential <= th.potential && e.mass <= th.mass;
        report["grid"] = detail::grid_json(r);
    } catch (const Error& e) {
        report["error"] = std::string("inverse: ") + e.what();
        report["checks"] = {{"theta", "FAIL"}, {"c", "FAIL"}, {"V_inf", "FAIL"}, {"mass", "FAIL"}};
        code = exit_code::inverse;
    }
    report["all_pass"] = all_pass;

    // error norms as the data is truncated
    json table = json::array();
    for (int nm = a.n_max; nm >= a.n_min; nm /= 2) {
        NodalDataset sub = detail::truncated(data, nm);
        json row = {{"n_max", nm}};
        try {
            detail::RoundtripErrors e = detail::roundtrip_errors(cfg, reconstruct(sub, {}, a.mode));
            row["theta"] = e.theta;
            row["c"] = e.c;
            row["V_inf"] = e.potential;
            row["mass"] = e.mass;
        } catch (const Error& e) {
            row["error"] = e.what();
        }
        table.push_back(std::move(row));
        if (even_indices(sub).size() <= 3) break;
    }
    report["convergence"] = std::move(table);

    // second-order coefficient of x on the left half
    json conv = {{"pipeline_convention", detail::pipeline_convention(a.mode)}};
    json rows = json::array();
    std::vector<std::string> bests;
    for (int k = 0; k < 3; ++k) {
        const int nm = a.n_max >> k;
        if (nm < a.n_min) break;
        json row = {{"n_max", nm}};
        try {
            ConventionFit f = fit_second_order_convention(cfg, index_nodes(detail::truncated(data, nm)), nm);
            row["kappa"] = f.kappa;
            row["kappa_stderr"] = f.kappa_std_error;
            json cands = json::object();
            for (const auto& [name, value] : f.candidates) cands[name] = value;
            row["candidates"] = cands;
            row["best"] = f.best;
            bests.push_back(f.best);
        } catch (const Error& e) {
            row["error"] = e.what();
        }
        rows.push_back(std::move(row));
    }
    conv["fits"] = std::move(rows);
    if (!bests.empty()) {
        bool stable = std::all_of(bests.begin(), bests.end(), [&](const std::string& b) { return b == bests.front(); });
        conv["best"] = bests.front();
        conv["stable"] = stable;
        conv["pipeline_uses_best"] = bests.front() == detail::pipeline_convention(a.mode);
    } else {
        conv["best"] = nullptr;
        conv["stable"] = false;
        conv["pipeline_uses_best"] = false;
    }
    report["second_order_convention"] = std::move(conv);

    try {
        detail::emit(a.out, dump(report), out);
    } catch (const Error& e) {
        err << "verify: " << e.what() << "\n";
        return exit_code::inverse;
    }
    if (code != exit_code::ok) err << "verify: " << report["error"].get<std::string>() << "\n";
    return code;
}

inline int cmd_asympt(const AsymptArgs& a, std::ostream& out, std::ostream& err) {
    if (a.n.empty()) {
        err << "asympt: no n values given\n";
        return exit_code::usage;
    }
    ProblemConfig cfg;
    SolverOptions opts;
    try {
        cfg = load_config(a.config);
        opts = solver_options(a.grid_n);
    } catch (const Error& e) {
        err << "asympt: " << e.what() << "\n";
        return exit_code::config;
    }
    ForwardSolver solver(cfg, opts);
    json rows = json::array();
    std::vector<double> ns, mu_err, res_paper, res_cons;
    std::vector<std::vector<double>> csv_rows;
    try {
        for (int n : a.n) {
            if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
            NodalSet set = solver.nodal_set(n);
            const int j0 = detail::first_label_guess(cfg, n, set.nodes.front());
            double rp = 0.0, rc = 0.0;
            for (std::size_t r = 0; r < set.nodes.size(); ++r) {
                const int j = j0 + static_cast<int>(r);
                if (j < 0 || j > n) throw Error(ErrorKind::InvalidArgument, "node label out of range at n = " + std::to_string(n));
                rp = std::max(rp, std::abs(node_asymptotic(cfg, n, j, Mode::paper) - set.nodes[r]));
                rc = std::max(rc, std::abs(node_asymptotic(cfg, n, j, Mode::consistent) - set.nodes[r]));
            }
            const double mu0 = mu_zero(cfg, n);
            rows.push_back({{"n", n},
                            {"mu_n", set.mu_n},
                            {"mu_zero", mu0},
                            {"mu_error", std::abs(set.mu_n - mu0)},
                            {"mu_correction_predicted", eigenvalue_correction(cfg, n) / n},
                            {"node_residual_paper", rp},
                            {"node_residual_consistent", rc}});
            csv_rows.push_back({static_cast<double>(n), set.mu_n, mu0, std::abs(set.mu_n - mu0), rp, rc});
            ns.push_back(n);
            mu_err.push_back(std::abs(set.mu_n - mu0));
            res_paper.push_back(rp);
            res_cons.push_back(rc);
        }
    } catch (const Error& e) {
        err << "asympt: forward: " << e.what() << "\n";
        return exit_code::forward;
    }

    auto slope = [&](const std::vector<double>& y) -> json {
        if (ns.size() < 3) return nullptr;
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            if (y[i] > 0.0) {
                xs.push_back(ns[i]);
                ys.push_back(y[i]);
            }
        }
        if (xs.size() < 3) return nullptr;
        return loglog_slope(xs, ys);
    };
    json report = {{"version", format_version},
                   {"command", "asympt"},
                   {"config", config_to_json(cfg)},
                   {"rows", rows},
                   {"slopes",
                    {{"mu_error", slope(mu_err)},
                     {"node_residual_paper", slope(res_paper)},
                     {"node_residual_consistent", slope(res_cons)}}}};
    if (ns.size() < 3) report["slopes_note"] = "fits need at least three n values";
    try {
        DeltaSweep sweep = delta_residual_sweep(solver, 20.0, 200.0, 0.7);
        report["delta_sweep"] = {{"range", {20.0, 200.0}},
                                 {"step", 0.7},
                                 {"sup_scaled_residual", sweep.sup},
                                 {"envelope_slope", sweep.envelope_slope}};
        detail::emit(a.out, dump(report), out);
        if (!a.csv.empty()) {
            write_text(a.csv, to_csv({"n", "mu_n", "mu_zero", "mu_error", "node_residual_paper", "node_residual_consistent"},
                                     csv_rows));
        }
    } catch (const Error& e) {
        err << "asympt: " << e.what() << "\n";
        return exit_code::forward;
    }
    return exit_code::ok;
}

inline int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
    if (a.n_min < 1 || a.n_max < a.n_min) {
        err << "synth: need 1 <= n-min <= n-max\n";
        return exit_code::usage;
    }
    if (a.example == !a.config.empty()) {
        err << "synth: give exactly one of --example or --config\n";
        return exit_code::usage;
    }
    NodalFile file;
    try {
        if (a.example) {
            std::vector<int> skipped;
            file.dataset = example_dataset(even_range(a.n_min, a.n_max), &skipped);
            for (int n : skipped) err << "synth: n = " << n << " skipped, series leaves (0, pi)\n";
            file.config = "external";
        } else {
            ProblemConfig cfg;
            try {
                cfg = load_config(a.config);
            } catch (const Error& e) {
                err << "synth: " << e.what() << "\n";
                return exit_code::config;
            }
            file.dataset = asymptotic_dataset(cfg, even_range(a.n_min, a.n_max), a.mode);
            file.config = config_to_json(cfg);
        }
        detail::emit(a.out, dump(nodal_file_to_json(file)), out);
    } catch (const Error& e) {
        err << "synth: " << e.what() << "\n";
        return exit_code::forward;
    }
    return exit_code::ok;
}

}  // namespace nodal
