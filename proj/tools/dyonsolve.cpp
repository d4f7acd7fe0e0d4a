#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dyon/errors.hpp"
#include "dyon/fixed_point.hpp"
#include "dyon/io.hpp"
#include "dyon/oracle.hpp"
#include "dyon/verifier.hpp"

namespace fs = std::filesystem;
using namespace dyon;

namespace {

constexpr double kOracleGap = 1e-4;

json error_json(const std::string& kind, const std::string& message) {
    return {{"error", kind}, {"message", message}};
}

json error_json(const Error& e) {
    json j = error_json(to_string(e.kind()), e.what());
    if (e.field()) j["field"] = std::string(field_name(*e.field()));
    return j;
}

// error.json goes to the output directory when it can be created, else stderr.
int fail(const fs::path& out, const json& j) {
    std::error_code ec;
    fs::create_directories(out, ec);
    try {
        if (ec) throw Error(ErrorKind::Io, ec.message());
        write_json(out / "error.json", j);
    } catch (const Error&) {
        std::cerr << j.dump(2) << '\n';
    }
    std::cerr << "dyonsolve: " << j.value("message", std::string("failed")) << '\n';
    return 1;
}

int run(const std::string& config_path, bool oracle_flag, std::optional<std::string> out_flag, bool plot) {
    RunConfig cfg;
    fs::path out = out_flag.value_or("out");
    try {
        cfg = load_config(config_path);
    } catch (const Error& e) {
        return fail(out, error_json(e));
    }
    if (out_flag) cfg.out_dir = *out_flag;
    out = cfg.out_dir;
    if (oracle_flag) cfg.oracle = true;

    const ValidationResult v = validate(cfg.params);
    if (!v.ok()) {
        json j = error_json("Domain", "parameters violate " + v.violations.front().constraint);
        j["violations"] = to_json(v);
        return fail(out, j);
    }

    try {
        const DerivedConstants c = derive(cfg.params, cfg.solver.alpha);
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw Error(ErrorKind::Io, "cannot create " + out.string() + ": " + ec.message());
        write_json(out / "params.json", params_json(cfg, c));

        const auto t0 = std::chrono::steady_clock::now();
        SolveResult res;
        try {
            res = solve_dyon(cfg.params, cfg.solver);
        } catch (const NotConvergedError& e) {
            write_json(out / "trace.json", to_json(e.trace()));
            json j = error_json(e);
            j["iterations"] = e.trace().iterations.size();
            if (!e.trace().iterations.empty()) j["last_residual"] = e.trace().iterations.back().residual;
            return fail(out, j);
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_json(out / "trace.json", to_json(res.trace));
        write_profile_csv(out / "profile.csv", res.profile);
        if (!res.trace.converged) return fail(out, error_json("NotConverged", "iteration budget is zero"));

        const VerificationReport rep = verify(res.profile, res.consts, cfg.verify_tol, cfg.window, cfg.solver.fp_tol);
        json rj = to_json(rep);
        rj["solve_seconds"] = seconds;
        write_json(out / "report.json", rj);
        if (plot) emit_plot_data(res.profile, res.consts, out, cfg.window);

        bool oracle_ok = true;
        if (cfg.oracle) {
            const CollocationResult col = solve_collocation(cfg.params, res.profile.r, res.profile);
            write_profile_csv(out / "oracle_profile.csv", col.profile);
            const FieldGaps gaps = compare(res.profile, col.profile);
            json cj = to_json(gaps, kOracleGap);
            cj["newton_iterations"] = col.iterations;
            cj["residual_history"] = col.residual_history;
            write_json(out / "compare.json", cj);
            oracle_ok = gaps.max_gap() <= kOracleGap;
        }

        std::printf("converged in %zu iterations (%.2f s); report %s%s\n", res.trace.iterations.size(), seconds,
                    rep.overall ? "PASS" : "FAIL", cfg.oracle ? (oracle_ok ? "; oracle PASS" : "; oracle FAIL") : "");
        if (!rep.overall || !oracle_ok) {
            json j = error_json("VerificationFailed", "verification report or oracle comparison failed");
            json failed = json::array();
            for (const auto& cl : rep.clauses)
                if (!cl.pass) failed.push_back(cl.id);
            for (const auto& cl : rep.origin_orders)
                if (!cl.pass) failed.push_back(cl.id);
            for (const auto& d : rep.decay_fits)
                if (!d.pass) failed.push_back("decay." + d.quantity);
            if (!oracle_ok) failed.push_back("oracle.gap");
            j["failed"] = failed;
            return fail(out, j);
        }
        return 0;
    } catch (const Error& e) {
        return fail(out, error_json(e));
    } catch (const std::exception& e) {
        return fail(out, error_json("Internal", e.what()));
    }
}

int check(const std::string& config_path) {
    try {
        const RunConfig cfg = load_config(config_path);
        const ValidationResult v = validate(cfg.params);
        if (!v.ok()) {
            json j = error_json("Domain", "parameters violate " + v.violations.front().constraint);
            j["violations"] = to_json(v);
            std::cout << j.dump(2) << '\n';
            return 1;
        }
        const DerivedConstants c = derive(cfg.params, cfg.solver.alpha);
        std::cout << params_json(cfg, c).dump(2) << '\n';
        return 0;
    } catch (const Error& e) {
        std::cout << error_json(e).dump(2) << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dyonsolve: static dyon profiles of the generalized Weinberg-Salam model"};
    app.require_subcommand(1);

    std::string config;
    bool oracle = false, plot = false;
    std::optional<std::string> out;

    auto* run_cmd = app.add_subcommand("run", "solve, verify and write results");
    run_cmd->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
    run_cmd->add_flag("--oracle", oracle, "cross-check against the collocation solver");
    run_cmd->add_option("--out", out, "output directory (overrides the config)");
    run_cmd->add_flag("--plot", plot, "also write plotdata_fields.csv and plotdata_decay.csv");

    auto* check_cmd = app.add_subcommand("check", "validate a configuration");
    check_cmd->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);
    if (*run_cmd) return run(config, oracle, out, plot);
    return check(config);
}
