// Command-line front end: seed construction (mu), the local solver
// (solve), the independent solution check (verify) and the randomized
// sigma_k-algebra diagnostics (expand-check).
//
// Exit codes: 0 success, 1 verification fail, 2 unsupported regime,
// 3 divergence, 64 usage, 65 data format.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sigmak/expand_check.hpp"
#include "sigmak/field_io.hpp"
#include "sigmak/mu_construct.hpp"
#include "sigmak/nonlinear.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify_fail = 1;
constexpr int exit_unsupported = 2;
constexpr int exit_divergence = 3;
constexpr int exit_usage = 64;
constexpr int exit_data = 65;
constexpr int exit_internal = 70;

struct MuArgs {
    int n = 0;
    int k = 0;
    double M = 0.0;
    bool convex = false;
};

struct SolveArgs {
    std::string config_path;
    sigmak::RunConfig rc;
    bool convex = false;
    // verify-only
    std::string field_path;
    double bound = 1e-3;
};

sigmak::MuVector build_seed(int n, int k, double target, bool convex) {
    if (convex) {
        if (!(target > 0.0))
            throw sigmak::unsupported_regime_error(
                "the convex seed needs a positive target (psi(0) > 0)");
        return sigmak::convex_mu(n, k, target);
    }
    if (k == n) return sigmak::gauss_mu(n, target);
    return sigmak::construct_mu(n, k, target);
}

int cmd_mu(const MuArgs& args) {
    const sigmak::MuVector v = build_seed(args.n, args.k, args.M, args.convex);
    const sigmak::MuValidation check = sigmak::validate_mu(v);
    std::cout << sigmak::mu_to_json(v).dump() << "\n";
    std::cout << sigmak::validation_to_json(check).dump() << "\n";
    return check.pass ? exit_ok : exit_unsupported;
}

sigmak::SolverConfig build_solver_config(const SolveArgs& args) {
    sigmak::RunConfig rc = args.rc;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw std::invalid_argument("cannot open config '" + args.config_path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("config: ") + e.what());
        }
        rc = sigmak::run_config_from_json(j);
    }
    sigmak::SolveMode mode;
    if (rc.mode == "hessian")
        mode = sigmak::SolveMode::hessian;
    else if (rc.mode == "curvature")
        mode = sigmak::SolveMode::curvature;
    else
        throw std::invalid_argument("mode must be 'hessian' or 'curvature'");

    sigmak::PsiExpr psi = sigmak::PsiExpr::parse(rc.psi, rc.n);
    const double target = psi.eval_origin();  // sigma_k(mu) = psi(0) by construction
    sigmak::MuVector mu = build_seed(rc.n, rc.k, target, args.convex);
    sigmak::SolverConfig cfg{rc.n,       rc.k,
                             mode,       std::move(mu),
                             std::move(psi), rc.epsilon,
                             sigmak::GridSpec(rc.n, rc.grid), rc.max_iter,
                             rc.tol};
    cfg.validate();
    return cfg;
}

int cmd_solve(const SolveArgs& args) {
    const sigmak::SolverConfig cfg = build_solver_config(args);
    const sigmak::RunConfig& rc = args.rc;
    std::string out_field = rc.out_field;
    std::string out_report = rc.out_report;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        nlohmann::json j;
        in >> j;
        const sigmak::RunConfig file_rc = sigmak::run_config_from_json(j);
        out_field = file_rc.out_field;
        out_report = file_rc.out_report;
    }

    const sigmak::PicardResult result = sigmak::picard_solve(cfg);
    const sigmak::ScalarField u = sigmak::reconstruct_u(result.w, cfg);
    sigmak::write_field_csv(out_field, cfg, result.w, u, result.residual);
    std::ofstream rep(out_report);
    if (!rep) throw std::runtime_error("cannot open '" + out_report + "' for writing");
    rep << sigmak::report_to_json(result.report).dump(2) << "\n";

    std::cout << sigmak::report_to_json(result.report).dump() << "\n";
    if (!result.report.converged) {
        std::cerr << "did not converge: " << result.report.note << "\n";
        return exit_divergence;
    }
    std::cout << "wrote " << out_field << " and " << out_report << "\n";
    return exit_ok;
}

int cmd_verify(const SolveArgs& args) {
    const sigmak::SolverConfig cfg = build_solver_config(args);
    const sigmak::FieldCsv csv = sigmak::read_field_csv(args.field_path);
    const sigmak::ScalarField u = sigmak::field_from_csv(csv, cfg);
    const sigmak::ScalarField err = sigmak::verify_solution(u, cfg);
    const double max_err = err.max_abs();

    std::printf("max interior error: %.6e (bound %.2e)\n", max_err, args.bound);
    const int next_G = 2 * (cfg.grid.G - 1) + 1;
    std::printf("refinement guidance: second-order stencils, error ~ h^2;"
                " at G=%d expect about %.2e\n",
                next_G, max_err / 4.0);
    if (max_err <= args.bound) {
        std::printf("PASS\n");
        return exit_ok;
    }
    std::printf("FAIL\n");
    return exit_verify_fail;
}

int cmd_expand_check(int n, int k, int trials, std::uint64_t seed) {
    const std::vector<sigmak::CheckRow> rows = sigmak::run_expand_checks(n, k, trials, seed);
    bool all_pass = true;
    std::printf("%-32s %7s %12s  %s\n", "check", "trials", "worst", "result");
    for (const sigmak::CheckRow& row : rows) {
        if (row.skipped) {
            std::printf("%-32s %7d %12s  skipped: %s\n", row.name.c_str(), row.trials, "-",
                        row.note.c_str());
            continue;
        }
        std::printf("%-32s %7d %12.3e  %s\n", row.name.c_str(), row.trials, row.worst,
                    row.pass ? "pass" : "FAIL");
        all_pass = all_pass && row.pass;
    }
    return all_pass ? exit_ok : exit_verify_fail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"local solver for the prescribed sigma_k-curvature and sigma_k-Hessian "
                 "equations"};
    app.require_subcommand(1);

    MuArgs mu_args;
    CLI::App* mu = app.add_subcommand(
        "mu", "construct the ellipticity-preserving diagonal seed for a target sigma_k");
    mu->add_option("--n", mu_args.n, "dimension")->required();
    mu->add_option("--k", mu_args.k, "sigma_k index")->required();
    mu->add_option("--M", mu_args.M, "target value sigma_k(mu) = M")->required();
    mu->add_flag("--convex", mu_args.convex, "all-equal positive seed (requires M > 0)");

    auto add_problem_flags = [](CLI::App* cmd, SolveArgs& a, bool with_outputs) {
        cmd->add_option("--config", a.config_path, "JSON config file (overrides other flags)");
        cmd->add_option("--n", a.rc.n, "dimension (2 or 3)");
        cmd->add_option("--k", a.rc.k, "sigma_k index");
        cmd->add_option("--mode", a.rc.mode, "hessian | curvature");
        cmd->add_option("--psi", a.rc.psi, "right-hand side, e.g. \"-1 + x1\"");
        cmd->add_option("--eps,--epsilon", a.rc.epsilon, "scaling parameter (default 0.1)");
        cmd->add_option("--grid", a.rc.grid, "points per axis, odd (default 21)");
        cmd->add_flag("--convex", a.convex, "use the convex seed (requires psi(0) > 0)");
        if (with_outputs) {
            cmd->add_option("--max-iter", a.rc.max_iter, "Picard iteration cap (default 50)");
            cmd->add_option("--tol", a.rc.tol, "residual max-norm target (default 1e-9)");
            cmd->add_option("--out-field", a.rc.out_field, "field CSV path");
            cmd->add_option("--out-report", a.rc.out_report, "report JSON path");
        }
    };

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "run the Picard iteration for psi");
    add_problem_flags(solve, solve_args, true);

    SolveArgs verify_args;
    CLI::App* verify =
        app.add_subcommand("verify", "re-derive sigma_k from a solve's u samples and compare");
    add_problem_flags(verify, verify_args, false);
    verify->add_option("--field", verify_args.field_path, "field CSV from solve")->required();
    verify->add_option("--bound", verify_args.bound, "acceptance bound (default 1e-3)");

    int ec_n = 0, ec_k = 0, ec_trials = 100;
    std::uint64_t ec_seed = 1;
    CLI::App* expand = app.add_subcommand(
        "expand-check", "randomized expansion-order and Newton-inequality diagnostics");
    expand->add_option("--n", ec_n, "dimension")->required();
    expand->add_option("--k", ec_k, "sigma_k index")->required();
    expand->add_option("--trials", ec_trials, "draws per check (default 100)");
    expand->add_option("--seed", ec_seed, "RNG seed; identical seeds repeat bit-identically");

    try {
        app.parse(argc, argv);
        if (mu->parsed()) return cmd_mu(mu_args);
        if (solve->parsed()) return cmd_solve(solve_args);
        if (verify->parsed()) return cmd_verify(verify_args);
        if (expand->parsed()) return cmd_expand_check(ec_n, ec_k, ec_trials, ec_seed);
        return exit_usage;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    } catch (const sigmak::unsupported_regime_error& e) {
        std::cerr << "unsupported regime: " << e.what() << "\n";
        return exit_unsupported;
    } catch (const sigmak::parse_error& e) {
        std::cerr << "psi syntax error: " << e.what() << "\n";
        return exit_usage;
    } catch (const sigmak::eval_error& e) {
        std::cerr << "psi evaluation error: " << e.what() << "\n";
        return exit_usage;
    } catch (const sigmak::data_format_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const sigmak::numeric_error& e) {
        std::cerr << "numeric failure: " << e.what() << " (achieved " << e.achieved() << ")\n";
        return exit_divergence;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
}
