#include "commands.hpp"

#include "lam/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace lamcli;

int main(int argc, char** argv) {
    CLI::App app{"Incidence-matrix search for order-10 planes containing a weight-19 codeword"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    RunConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "JSON config; its values override the flags")->check(CLI::ExistingFile);
    app.add_option("--case", cfg.cases, "case id (1-66), repeatable");
    app.add_option("--jobs", cfg.jobs, "parallel jobs")->check(CLI::PositiveNumber);
    app.add_option("--budget", cfg.conflict_budget, "conflicts per solve call, 0 = none (main default 100000)");
    app.add_option("--cube-floor", cfg.cube_floor, "split over-budget instances down to this many free variables");
    app.add_option("--solver", cfg.solver, "embedded or external:<command>");
    app.add_flag("--deterministic,!--random", cfg.deterministic, "reproducible solver runs (default on)");
    app.add_option("--out", cfg.out, std::string("output root (default $") + kOutEnv + " or ./out)");
    app.add_flag("--force", cfg.force, "regenerate instead of verifying existing artifacts");

    int order = 2, max_order = 4;
    std::string mode = "find";
    auto* plane = app.add_subcommand("plane", "find or classify a generic small plane");
    plane->add_option("--order", order, "plane order")->required();
    plane->add_option("--mode", mode, "find or enumerate-classes")->check(CLI::IsMember({"find", "enumerate-classes"}));
    plane->add_option("--max-order", max_order, "refuse orders above this");

    auto* a1 = app.add_subcommand("a1", "enumerate and classify the 6x19 A1 block");

    bool run_excluded = false, certify = false, cross_check = false;
    auto* a2 = app.add_subcommand("a2", "levelwise A2 generation per case");
    a2->add_flag("--run-excluded", run_excluded, "also run weight-16 and theoretical cases");
    a2->add_flag("--certify", certify, "check each level's DRAT proof");
    a2->add_flag("--cross-check", cross_check, "compare certificate sets with the lex-only enumeration");

    std::vector<std::string> a2_ids;
    std::size_t a2_limit = 0;
    auto* mainc = app.add_subcommand("main", "main-stage instances for recorded A2s");
    mainc->add_option("--a2", a2_ids, "recorded A2 id, repeatable (default all)");
    mainc->add_option("--a2-limit", a2_limit, "at most this many A2s per case");

    std::string what, a2_id, file;
    auto* encode = app.add_subcommand("encode", "write a formula as DIMACS with an origin sidecar");
    encode->add_option("target", what, "plane, a1, a2 or main")->required();
    encode->add_option("--order", order, "plane order");
    encode->add_option("--a2", a2_id, "recorded A2 id for main (default the first)");
    encode->add_option("--file", file, "output path (default inside the output root)");

    std::string cnf_path, drat_path;
    auto* solve = app.add_subcommand("solve", "solve a DIMACS file");
    solve->add_option("cnf", cnf_path, "DIMACS file")->required()->check(CLI::ExistingFile);
    solve->add_option("--drat", drat_path, "write a text DRAT proof here");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "check proofs, witnesses or stored artifacts");
    verify->add_option("--cnf", va.cnf, "DIMACS formula");
    verify->add_option("--drat", va.drat, "DRAT proof, text or binary");
    verify->add_option("--records", va.records, "solution records (JSON lines)");
    verify->add_option("--representatives", va.representatives, "records of the representatives");
    verify->add_flag("--augmented", va.augmented, "add one blocking clause per record before checking");
    verify->add_flag("--allow-partial", va.allow_partial, "accept a valid proof without the empty clause");
    verify->add_option("--stage", va.stage, "re-verify stored a1, a2 or main artifacts");

    auto* report = app.add_subcommand("report", "summarize the artifacts under the output root");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        if (cfg.solver != "embedded" && !cfg.external()) throw lam::InputError("--solver must be embedded or external:<command>");
        if (*plane) return cmd_plane(cfg, order, mode, max_order);
        if (*a1) return cmd_a1(cfg);
        if (*a2) return cmd_a2(cfg, run_excluded, certify, cross_check);
        if (*mainc) return cmd_main(cfg, a2_ids, a2_limit);
        if (*encode) return cmd_encode(cfg, what, order, a2_id, file);
        if (*solve) return cmd_solve(cfg, cnf_path, drat_path);
        if (*verify) return cmd_verify(cfg, va);
        if (*report) return cmd_report(cfg);
    } catch (const MissingStage& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const lam::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const lam::ParseError& e) {
        std::cerr << "malformed input: " << e.what() << "\n";
        return 2;
    } catch (const lam::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const lam::IntegrityError& e) {
        std::cerr << "integrity check failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
