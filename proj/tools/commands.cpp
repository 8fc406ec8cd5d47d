#include "commands.hpp"

#include "lam/certs.hpp"
#include "lam/drat.hpp"
#include "lam/errors.hpp"
#include "lam/pipeline.hpp"
#include "lam/plane.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace lamcli {

using namespace lam;

namespace {

std::mutex g_print;

void say(const std::string& line) {
    std::lock_guard lk(g_print);
    std::cout << line << std::endl;
}

void status(const std::string& line) {
    std::lock_guard lk(g_print);
    std::cerr << "\r\033[K" << line << std::flush;
}

void clear_status() {
    std::lock_guard lk(g_print);
    std::cerr << "\r\033[K" << std::flush;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Write to a sibling temp file, then rename, so a crashed run leaves no half file.
void write_file(const fs::path& p, const std::function<void(std::ostream&)>& fn) {
    fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp.string());
        fn(out);
        out.flush();
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, p);
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_instance(const fs::path& dir, const Cnf& cnf) {
    write_file(dir / "instance.cnf", [&](std::ostream& o) { emit_dimacs(cnf, o); });
    write_file(dir / "instance.origins", [&](std::ostream& o) { write_origin_tags(cnf, o); });
}

std::vector<SolutionRecord> load_records(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot read " + p.string());
    return read_records(in);
}

std::vector<SolutionRecord> representatives_of(const std::vector<SolutionRecord>& rs) {
    std::vector<SolutionRecord> out;
    for (const auto& r : rs)
        if (!r.witness) out.push_back(r);
    return out;
}

std::vector<json> load_manifest(const fs::path& p) {
    std::vector<json> out;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(json::parse(line));
    return out;
}

fs::path out_root(const RunConfig& cfg) { return cfg.out.empty() ? fs::path(default_out_root()) : fs::path(cfg.out); }
fs::path a1_dir(const RunConfig& cfg) { return out_root(cfg) / "a1" / "all"; }
fs::path a2_dir(const RunConfig& cfg, int id) { return out_root(cfg) / "a2" / std::to_string(id); }
fs::path main_dir(const RunConfig& cfg, int id, const std::string& a2) {
    return out_root(cfg) / "main" / std::to_string(id) / a2;
}

BinaryMatrix load_a1(const RunConfig& cfg, int id) {
    case_exclusion(id);  // range check
    const auto p = a1_dir(cfg) / "records.jsonl";
    if (!fs::exists(p)) throw MissingStage("no A1 artifacts at " + p.string() + "; run `lam a1` first");
    const std::string want = "a1-c" + std::to_string(id);
    for (const auto& r : load_records(p))
        if (r.id == want) return r.matrix();
    throw MissingStage("A1 records lack case " + std::to_string(id) + "; rerun `lam a1 --force`");
}

struct A2Final {
    std::vector<SolutionRecord> records;  // every record of the case
    std::vector<const SolutionRecord*> finals;  // representatives of the last level
};

int level_of(const SolutionRecord& r) {
    const std::string tag = "A2-level-";
    return r.stage.rfind(tag, 0) == 0 ? std::stoi(r.stage.substr(tag.size())) : 0;
}

A2Final load_a2(const RunConfig& cfg, int id) {
    const auto p = a2_dir(cfg, id) / "records.jsonl";
    if (!fs::exists(p))
        throw MissingStage("no A2 artifacts at " + p.string() + "; run `lam a2 --case " + std::to_string(id) + "` first");
    A2Final f;
    f.records = load_records(p);
    int last = 0;
    for (const auto& r : f.records) last = std::max(last, level_of(r));
    for (const auto& r : f.records)
        if (!r.witness && level_of(r) == last && last > 0) f.finals.push_back(&r);
    return f;
}

json stage_entry(const std::string& stage, int case_id, const std::string& a2, const std::string& verdict,
                 json counts, std::vector<std::string> artifacts, double wall) {
    json e;
    e["stage"] = stage;
    e["caseId"] = case_id;
    e["a2Id"] = a2;
    e["verdict"] = verdict;
    e["counts"] = std::move(counts);
    e["artifacts"] = std::move(artifacts);
    e["wallTime"] = std::round(wall * 1000) / 1000;
    return e;
}

std::string case_table(const std::vector<std::array<std::string, 4>>& rows) {
    std::ostringstream o;
    o << std::left << std::setw(6) << "Case" << std::setw(14) << "Exclusion" << std::right << std::setw(14)
      << "Inequivalent" << std::setw(12) << "Total" << "\n";
    for (const auto& r : rows)
        o << std::left << std::setw(6) << r[0] << std::setw(14) << r[1] << std::right << std::setw(14) << r[2]
          << std::setw(12) << r[3] << "\n";
    return o.str();
}

} // namespace

// ---- config, manifest, runner ----------------------------------------------

SolverFactory RunConfig::factory() const {
    SolverOptions o;
    o.deterministic = deterministic;
    o.seed = deterministic ? 0 : std::random_device{}();
    return [o](const Cnf& f) { return Solver::from_cnf(f, o); };
}

std::string default_out_root() {
    const char* env = std::getenv(kOutEnv);
    return env && *env ? env : "out";
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw InputError("config " + path + ": " + e.what());
    }
    if (!j.is_object()) throw InputError("config " + path + ": expected a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "activeCases") {
                cfg.cases = v.get<std::vector<int>>();
                for (int c : cfg.cases) case_exclusion(c);
            } else if (key == "conflictBudget") {
                cfg.conflict_budget = v.get<std::uint64_t>();
            } else if (key == "cubeFloor") {
                cfg.cube_floor = v.get<std::size_t>();
            } else if (key == "solverMode") {
                cfg.solver = v.get<std::string>();
                if (cfg.solver != "embedded" && !cfg.external())
                    throw InputError("solverMode must be embedded or external:<command>");
            } else if (key == "deterministic") {
                if (v.is_boolean()) {
                    cfg.deterministic = v.get<bool>();
                } else {
                    const auto s = v.get<std::string>();
                    if (s != "on" && s != "off") throw InputError("deterministic must be on or off");
                    cfg.deterministic = s == "on";
                }
            } else {
                throw InputError("config " + path + ": unknown key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw InputError("config " + path + ": " + e.what());
    }
}

void Manifest::append(const fs::path& dir, const json& entry) {
    std::lock_guard lk(mu_);
    const std::string line = entry.dump() + "\n";
    for (const auto& p : {root_ / "manifest.jsonl", dir / "manifest.jsonl"}) {
        fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::app);
        if (!out) throw IoError("cannot append to " + p.string());
        out << line;
    }
}

void run_jobs(int jobs, std::vector<std::function<void()>> work) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < work.size();) {
            try {
                work[i]();
            } catch (...) {
                std::lock_guard lk(mu);
                if (!first) first = std::current_exception();
            }
        }
    };
    const auto n = static_cast<std::size_t>(std::max(1, jobs));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::min(n, work.size()); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

// ---- plane -------------------------------------------------------------------

int cmd_plane(const RunConfig& cfg, int order, const std::string& mode, int max_order) {
    if (order < 2) throw InputError("plane order must be at least 2");
    if (order > max_order)
        throw InputError("order " + std::to_string(order) + " exceeds the bound " + std::to_string(max_order) +
                         " (raise it with --max-order)");
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = out_root(cfg) / "plane" / std::to_string(order);
    Manifest man(out_root(cfg));
    write_instance(dir, build_plane_cnf(order));
    if (mode == "find") {
        auto p = find_plane(order, cfg.factory());
        if (!p) {
            say("order " + std::to_string(order) + ": UNSAT");
            man.append(dir, stage_entry("plane", 0, "", "unsat", {{"order", order}}, {"instance.cnf"}, seconds_since(t0)));
            return 1;
        }
        const auto report = verify_plane_axioms(*p, PlaneParams::of_order(order));
        write_file(dir / "records.jsonl", [&](std::ostream& o) {
            write_records(o, {SolutionRecord::of("plane-" + std::to_string(order), "plane", 0, *p)});
        });
        say("order " + std::to_string(order) + ": SAT, axioms " + (report.ok ? "verified" : "VIOLATED"));
        for (const auto& row : p->to_strings()) say("  " + row);
        man.append(dir, stage_entry("plane", 0, "", report.ok ? "sat" : "reject", {{"order", order}},
                                    {"instance.cnf", "records.jsonl"}, seconds_since(t0)));
        return report.ok ? 0 : 1;
    }
    if (mode != "enumerate-classes") throw InputError("mode must be find or enumerate-classes");
    auto classes = enumerate_plane_classes(order, cfg.factory());
    std::vector<SolutionRecord> recs;
    for (std::size_t i = 0; i < classes.representatives.size(); ++i) {
        auto r = SolutionRecord::of("plane-" + std::to_string(order) + "-c" + std::to_string(i + 1), "plane", 0,
                                    classes.representatives[i]);
        r.certificate = classes.certificates[i].hex();
        recs.push_back(std::move(r));
    }
    write_file(dir / "records.jsonl", [&](std::ostream& o) { write_records(o, recs); });
    say("order " + std::to_string(order) + ": " + std::to_string(classes.solutions) + " solutions / " +
        std::to_string(classes.representatives.size()) + " classes");
    man.append(dir, stage_entry("plane", 0, "", "complete",
                                {{"order", order}, {"solutions", classes.solutions},
                                 {"classes", classes.representatives.size()}},
                                {"instance.cnf", "records.jsonl"}, seconds_since(t0)));
    return 0;
}

// ---- A1 ----------------------------------------------------------------------

namespace {

// Recomputes the A1 counts from disk and checks the witnesses and the proof.
int verify_a1_dir(const fs::path& dir) {
    const auto records = load_records(dir / "records.jsonl");
    const Cnf cnf = build_a1_cnf();
    std::ifstream cin(dir / "instance.cnf");
    if (!cin) throw MissingStage("missing " + (dir / "instance.cnf").string() + "; rerun `lam a1 --force`");
    if (!parse_dimacs(cin).same_clauses(cnf)) {
        say("A1 instance on disk differs from the rebuilt formula: REJECT");
        return 1;
    }
    const auto reps = representatives_of(records);
    say(std::to_string(records.size()) + " solutions / " + std::to_string(reps.size()) + " classes");
    const auto rc = verify_solution_records(records, reps);
    say("witnesses: " + std::to_string(rc.checked) + " checked, " +
        (rc.accepted ? "accepted" : "REJECTED at " + rc.failed_id + ": " + rc.message));
    std::vector<std::vector<int>> sols;
    for (const auto& r : records) sols.push_back(a1_true_cells(cnf, r.matrix()));
    const auto proof = read_drat_file((dir / "proof.drat").string());
    const auto dc = verify_augmented_unsat(cnf, sols, proof);
    say("enumeration proof (" + std::to_string(proof.steps.size()) + " steps): " +
        (dc.accepted && dc.refutation ? "accepted" : "REJECTED: " + dc.message));
    return rc.accepted && dc.accepted && dc.refutation ? 0 : 1;
}

} // namespace

int cmd_a1(const RunConfig& cfg) {
    if (cfg.external()) throw InputError("the A1 enumeration needs the embedded solver");
    const fs::path dir = a1_dir(cfg);
    if (fs::exists(dir / "records.jsonl") && !cfg.force) {
        say("A1 artifacts exist in " + dir.string() + "; verifying (use --force to regenerate)");
        return verify_a1_dir(dir);
    }
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(dir);
    A1StageResult r;
    write_file(dir / "proof.drat", [&](std::ostream& o) {
        DratStreamSink sink(o, false);
        A1Options opts;
        opts.factory = cfg.factory();
        opts.proof = &sink;
        r = run_a1_stage(opts);
    });
    write_instance(dir, r.cnf);
    write_file(dir / "records.jsonl", [&](std::ostream& o) { write_records(o, r.records); });
    const int code = verify_a1_dir(dir);
    Manifest(out_root(cfg))
        .append(dir, stage_entry("a1", 0, "", code == 0 ? "accept" : "reject",
                                 {{"solutions", r.solutions.size()}, {"classes", r.cases.size()}},
                                 {"instance.cnf", "proof.drat", "records.jsonl"}, seconds_since(t0)));
    return code;
}

// ---- A2 ----------------------------------------------------------------------

namespace {

struct A2Counts {
    std::string verdict;
    std::size_t inequivalent = 0;
    std::optional<std::size_t> total;
};

std::optional<std::size_t> stored_total(const fs::path& dir) {
    std::optional<std::size_t> t;
    for (const auto& e : load_manifest(dir / "manifest.jsonl"))
        if (e.value("stage", "") == "a2" && e.contains("counts") && e["counts"].contains("total"))
            t = e["counts"]["total"].get<std::size_t>();
    return t;
}

A2Counts verify_a2_dir(const RunConfig& cfg, int id) {
    A2Counts c;
    const auto f = load_a2(cfg, id);
    const auto rc = verify_solution_records(f.records, representatives_of(f.records));
    c.inequivalent = f.finals.size();
    c.total = stored_total(a2_dir(cfg, id));
    c.verdict = rc.accepted ? "accept" : "reject";
    if (!rc.accepted) say("case " + std::to_string(id) + ": witness REJECTED at " + rc.failed_id + ": " + rc.message);
    return c;
}

std::string a2_line(int id, const A2Counts& c) {
    return "case " + std::to_string(id) + ": " + std::to_string(c.inequivalent) + " inequivalent / " +
           (c.total ? std::to_string(*c.total) : "?") + " total";
}

} // namespace

int cmd_a2(const RunConfig& cfg, bool run_excluded, bool certify, bool cross_check) {
    if (cfg.cases.empty()) throw InputError("no cases selected: pass --case or set activeCases in the config");
    if (cfg.external()) throw InputError("the A2 generation needs the embedded solver");
    Manifest man(out_root(cfg));
    std::map<int, A2Counts> results;
    std::mutex mu;
    std::vector<std::function<void()>> work;
    for (int id : cfg.cases) {
        case_exclusion(id);
        work.emplace_back([&, id] {
            const fs::path dir = a2_dir(cfg, id);
            A2Counts counts;
            if (fs::exists(dir / "records.jsonl") && !cfg.force) {
                counts = verify_a2_dir(cfg, id);
            } else {
                const auto t0 = std::chrono::steady_clock::now();
                const auto ctx = make_case_context(id, load_a1(cfg, id));
                A2StageOptions opts;
                opts.run_excluded = run_excluded;
                opts.generation.factory = cfg.factory();
                opts.generation.certify = certify;
                opts.generation.on_level = [id](const LevelStats& s) {
                    status("case " + std::to_string(id) + " level " + std::to_string(s.level + 1) + ": " +
                           std::to_string(s.recorded) + " recorded, " + std::to_string(s.discarded) + " blocked");
                };
                auto log = run_a2_stage(ctx, opts);
                if (!log) {
                    counts.verdict = "skipped";
                    man.append(dir, stage_entry("a2", id, "", "skipped",
                                                {{"exclusion", std::string(exclusion_name(ctx.excluded))}}, {},
                                                seconds_since(t0)));
                } else {
                    std::size_t total = 0;
                    bool same = true;
                    json levels = json::array();
                    for (const auto& s : log->levels)
                        levels.push_back({{"level", s.level + 1}, {"recorded", s.recorded},
                                          {"blocked", s.discarded}, {"certified", s.certified}});
                    if (ctx.level_plan) {
                        status("case " + std::to_string(id) + ": lex-only enumeration");
                        LexOnlyOptions lo;
                        lo.factory = cfg.factory();
                        lo.keep = false;
                        lo.canonicalize = cross_check;
                        const auto lex = enumerate_lex_only(ctx.a1, *ctx.level_plan, lo);
                        total = lex.total;
                        if (cross_check) {
                            std::set<CanonicalCertificate> a(log->final_certificates().begin(),
                                                             log->final_certificates().end());
                            std::set<CanonicalCertificate> b(lex.certificates.begin(), lex.certificates.end());
                            same = a == b;
                        }
                        write_instance(dir, build_a2_instance(ctx.a1, *ctx.level_plan).cnf);
                    }
                    clear_status();
                    write_file(dir / "records.jsonl", [&](std::ostream& o) { write_records(o, log->records(id)); });
                    json cnt{{"inequivalent", log->recorded_a2s().size()}, {"total", total}, {"levels", levels}};
                    if (cross_check) cnt["certificateSetsEqual"] = same;
                    man.append(dir, stage_entry("a2", id, "", same ? "complete" : "reject", cnt,
                                                {"instance.cnf", "records.jsonl"}, seconds_since(t0)));
                    counts = verify_a2_dir(cfg, id);
                    if (!same) {
                        counts.verdict = "reject";
                        say("case " + std::to_string(id) + ": certificate sets of the two enumerations DIFFER");
                    }
                }
            }
            if (counts.verdict != "skipped") say(a2_line(id, counts));
            else say("case " + std::to_string(id) + ": skipped (" + std::string(exclusion_name(case_exclusion(id))) + ")");
            std::lock_guard lk(mu);
            results[id] = counts;
        });
    }
    run_jobs(cfg.jobs, std::move(work));
    int code = 0;
    std::vector<std::array<std::string, 4>> rows;
    for (const auto& [id, c] : results) {
        if (c.verdict == "reject") code = 1;
        const bool skipped = c.verdict == "skipped";
        rows.push_back({std::to_string(id), std::string(exclusion_name(case_exclusion(id))),
                        skipped ? "-" : std::to_string(c.inequivalent),
                        skipped || !c.total ? "-" : std::to_string(*c.total)});
    }
    if (rows.size() > 1) say(case_table(rows));
    return code;
}

// ---- main stage --------------------------------------------------------------

namespace {

constexpr std::uint64_t kDefaultMainBudget = 100000;

struct StoredMain {
    std::vector<std::pair<int, int>> cells;
    std::vector<std::vector<std::uint8_t>> completions;
    std::vector<std::vector<Lit>> derived;
};

void write_completions(const fs::path& p, const MainResult& r) {
    write_file(p, [&](std::ostream& o) {
        json head;
        head["cells"] = r.cells;
        o << head.dump() << "\n";
        for (std::size_t k = 0; k < r.completions.size(); ++k) {
            std::string bits;
            for (auto b : r.completions[k]) bits.push_back(b ? '1' : '0');
            json line{{"values", bits}};
            if (k < r.derived.size()) line["derived"] = r.derived[k];
            o << line.dump() << "\n";
        }
    });
}

StoredMain read_completions(const fs::path& p) {
    StoredMain s;
    std::ifstream in(p);
    if (!in) throw IoError("cannot read " + p.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing header", 1);
    s.cells = json::parse(line).at("cells").get<std::vector<std::pair<int, int>>>();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = json::parse(line);
        std::vector<std::uint8_t> bits;
        for (char ch : j.at("values").get<std::string>()) bits.push_back(ch == '1');
        s.completions.push_back(std::move(bits));
        if (j.contains("derived")) s.derived.push_back(j["derived"].get<std::vector<Lit>>());
    }
    return s;
}

struct MainJob {
    int case_id;
    std::string a2_id;
    BinaryMatrix a2;
};

std::string verify_main_dir(const CaseContext& ctx, const MainJob& job, const fs::path& dir) {
    std::string verdict;
    for (const auto& e : load_manifest(dir / "manifest.jsonl"))
        if (e.value("stage", "") == "main") verdict = e.value("verdict", "");
    if (verdict.empty()) throw MissingStage("no main-stage result in " + dir.string() + "; rerun with --force");
    const std::string unsat(main_status_name(MainStatus::unsat)), noext(main_status_name(MainStatus::no_extension)),
        signal(main_status_name(MainStatus::signal));
    if (verdict != unsat && verdict != noext && verdict != signal) return verdict;
    const auto inst = build_main_instance(ctx, job.a2, select_blocks(ctx, job.a2), job.a2_id);
    const auto stored = read_completions(dir / "completions.jsonl");
    Cnf formula = inst.cnf;
    formula.set_prune_fixed(false);
    for (const auto& bits : stored.completions) {
        std::vector<Lit> block;
        for (std::size_t i = 0; i < stored.cells.size(); ++i) {
            const int v = inst.cnf.cell(static_cast<std::size_t>(stored.cells[i].first),
                                        static_cast<std::size_t>(stored.cells[i].second));
            block.push_back(bits[i] ? -v : v);
        }
        formula.add_clause(block, ClauseOrigin::blocking);
    }
    const auto ec = check_drat(formula, read_drat_file((dir / "proof.drat").string()));
    if (!ec.accepted || !ec.refutation) return "reject";
    if (verdict == noext) {
        const Cnf ext = encode_main(extended_spec(ctx, inst));
        const auto xc = verify_incremental(ext, stored.derived, read_drat_file((dir / "extension.drat").string()));
        if (!xc.accepted) return "reject";
    }
    return verdict;
}

} // namespace

int cmd_main(const RunConfig& cfg, const std::vector<std::string>& a2_ids, std::size_t a2_limit) {
    if (cfg.cases.empty()) throw InputError("no cases selected: pass --case or set activeCases in the config");
    Manifest man(out_root(cfg));
    std::vector<std::function<void()>> work;
    std::map<std::string, int> tally;
    std::mutex mu;
    std::vector<std::shared_ptr<const CaseContext>> contexts;
    for (int id : cfg.cases) {
        auto ctx = std::make_shared<const CaseContext>(make_case_context(id, load_a1(cfg, id)));
        contexts.push_back(ctx);
        const auto f = load_a2(cfg, id);
        std::vector<MainJob> jobs;
        for (const auto* r : f.finals)
            if (a2_ids.empty() || std::find(a2_ids.begin(), a2_ids.end(), r->id) != a2_ids.end())
                jobs.push_back({id, r->id, r->matrix().rows_range(layout::kA1Rows, layout::kA2Rows)});
        if (a2_limit && jobs.size() > a2_limit) jobs.resize(a2_limit);
        if (jobs.empty()) say("case " + std::to_string(id) + ": no A2s selected");
        for (auto& job : jobs) {
            work.emplace_back([&, ctx, job] {
                const fs::path dir = main_dir(cfg, job.case_id, job.a2_id);
                const std::string tag = "case " + std::to_string(job.case_id) + " " + job.a2_id + ": ";
                std::string verdict;
                if (fs::exists(dir / "manifest.jsonl") && !cfg.force) {
                    verdict = verify_main_dir(*ctx, job, dir);
                    say(tag + verdict + " (existing artifacts re-verified)");
                } else {
                    const auto t0 = std::chrono::steady_clock::now();
                    const auto sel = select_blocks(*ctx, job.a2);
                    const auto inst = build_main_instance(*ctx, job.a2, sel, job.a2_id);
                    write_instance(dir, inst.cnf);
                    json counts{{"method", sel.method == BlockMethod::inside ? "inside" : "outside"},
                                {"blocks", sel.blocks},
                                {"vars", inst.cnf.var_count()},
                                {"clauses", inst.cnf.clause_count()}};
                    std::vector<std::string> artifacts{"instance.cnf", "instance.origins"};
                    if (cfg.external()) {
                        status(tag + "external solve");
                        const auto er = external_solve((dir / "instance.cnf").string(), cfg.external_command(),
                                                       (dir / "proof.drat").string());
                        clear_status();
                        if (er.verdict == Verdict::unsat) {
                            const auto dc = check_drat(inst.cnf, read_drat_file(er.proof_path));
                            verdict = dc.accepted && dc.refutation ? "unsat" : "reject";
                            artifacts.push_back("proof.drat");
                        } else {
                            // completions exist; enumerating and extending them needs the embedded solver
                            verdict = "sat_external";
                        }
                    } else {
                        MainOptions mo;
                        mo.factory = cfg.factory();
                        mo.conflict_budget = cfg.conflict_budget ? cfg.conflict_budget : kDefaultMainBudget;
                        mo.cube_floor = cfg.cube_floor;
                        status(tag + "enumerating");
                        const auto r = run_main_problem(inst.spec, extended_spec(*ctx, inst), mo);
                        clear_status();
                        verdict = std::string(main_status_name(r.status));
                        counts["completions"] = r.completions.size();
                        if (r.status == MainStatus::budget_exceeded) {
                            counts["cubes"] = r.cubes.size();
                            write_file(dir / "cubes.icnf", [&](std::ostream& o) { write_cubes(o, r.cubes); });
                            artifacts.push_back("cubes.icnf");
                        } else {
                            write_file(dir / "proof.drat", [&](std::ostream& o) { o << r.enumeration_proof; });
                            write_file(dir / "extension.drat", [&](std::ostream& o) { o << r.extension_proof; });
                            write_completions(dir / "completions.jsonl", r);
                            artifacts.insert(artifacts.end(), {"proof.drat", "extension.drat", "completions.jsonl"});
                        }
                    }
                    man.append(dir, stage_entry("main", job.case_id, job.a2_id, verdict, counts, artifacts,
                                                seconds_since(t0)));
                    say(tag + verdict);
                }
                std::lock_guard lk(mu);
                tally[verdict]++;
            });
        }
    }
    run_jobs(cfg.jobs, std::move(work));
    std::string summary;
    for (const auto& [v, n] : tally) summary += (summary.empty() ? "" : ", ") + std::to_string(n) + " " + v;
    if (!summary.empty()) say("main stage: " + summary);
    if (tally.count(std::string(main_status_name(MainStatus::signal)))) say("SIGNAL: a partial solution extends; inspect the artifacts");
    return tally.count("reject") ? 1 : 0;
}

// ---- encode / solve -----------------------------------------------------------

int cmd_encode(const RunConfig& cfg, const std::string& what, int order, const std::string& a2_id,
               const std::string& file) {
    Cnf cnf;
    fs::path dir;
    if (what == "plane") {
        cnf = build_plane_cnf(order);
        dir = out_root(cfg) / "plane" / std::to_string(order);
    } else if (what == "a1") {
        cnf = build_a1_cnf();
        dir = a1_dir(cfg);
    } else if (what == "a2" || what == "main") {
        if (cfg.cases.size() != 1) throw InputError("encode " + what + " needs exactly one --case");
        const int id = cfg.cases.front();
        const auto ctx = make_case_context(id, load_a1(cfg, id));
        if (what == "a2") {
            if (!ctx.level_plan) throw InputError("case " + std::to_string(id) + " has no A2 formula");
            cnf = build_a2_instance(ctx.a1, *ctx.level_plan).cnf;
            dir = a2_dir(cfg, id);
        } else {
            const auto f = load_a2(cfg, id);
            const SolutionRecord* pick = nullptr;
            for (const auto* r : f.finals)
                if (a2_id.empty() ? pick == nullptr : r->id == a2_id) pick = r;
            if (!pick) throw InputError("no recorded A2 '" + a2_id + "' in case " + std::to_string(id));
            const auto a2 = pick->matrix().rows_range(layout::kA1Rows, layout::kA2Rows);
            cnf = build_main_instance(ctx, a2, select_blocks(ctx, a2), pick->id).cnf;
            dir = main_dir(cfg, id, pick->id);
        }
    } else {
        throw InputError("encode target must be plane, a1, a2 or main");
    }
    const fs::path target = file.empty() ? dir / "instance.cnf" : fs::path(file);
    write_file(target, [&](std::ostream& o) { emit_dimacs(cnf, o); });
    write_file(target.string().substr(0, target.string().size() - target.extension().string().size()) + ".origins",
               [&](std::ostream& o) { write_origin_tags(cnf, o); });
    say(target.string() + ": " + std::to_string(cnf.var_count()) + " variables, " +
        std::to_string(cnf.clause_count()) + " clauses");
    for (int o = 0; o <= static_cast<int>(ClauseOrigin::external); ++o) {
        const auto n = cnf.count(static_cast<ClauseOrigin>(o));
        if (n) say("  " + std::string(origin_name(static_cast<ClauseOrigin>(o))) + " " + std::to_string(n));
    }
    return 0;
}

int cmd_solve(const RunConfig& cfg, const std::string& cnf_path, const std::string& drat_path) {
    if (cfg.external()) {
        const auto r = external_solve(cnf_path, cfg.external_command(), drat_path);
        say(r.verdict == Verdict::sat ? "s SATISFIABLE" : "s UNSATISFIABLE");
        return 0;
    }
    std::ifstream in(cnf_path);
    if (!in) throw IoError("cannot read " + cnf_path);
    const Cnf cnf = parse_dimacs(in);
    Solver s = cfg.factory()(cnf);
    std::ofstream proof;
    std::unique_ptr<DratStreamSink> sink;
    if (!drat_path.empty()) {
        proof.open(drat_path, std::ios::binary);
        if (!proof) throw IoError("cannot write " + drat_path);
        sink = std::make_unique<DratStreamSink>(proof, false);
        s.set_proof(sink.get());
    }
    if (cfg.conflict_budget) s.set_conflict_budget(cfg.conflict_budget);
    SolveResult r;
    try {
        r = s.solve();
    } catch (const BudgetExceeded&) {
        say("s UNKNOWN");
        return 0;
    }
    if (sink) sink->flush();
    if (!r.sat()) {
        say("s UNSATISFIABLE");
        return 0;
    }
    say("s SATISFIABLE");
    std::string line = "v";
    for (int v = 1; v <= cnf.var_count(); ++v) line += " " + std::to_string(r.value(v) ? v : -v);
    say(line + " 0");
    return 0;
}

// ---- verify / report ---------------------------------------------------------

int cmd_verify(const RunConfig& cfg, const VerifyArgs& a) {
    if (!a.stage.empty()) {
        if (a.stage == "a1") return verify_a1_dir(a1_dir(cfg));
        if (cfg.cases.empty()) throw InputError("verify --stage " + a.stage + " needs --case");
        int code = 0;
        for (int id : cfg.cases) {
            if (a.stage == "a2") {
                const auto c = verify_a2_dir(cfg, id);
                say(a2_line(id, c) + " (" + c.verdict + ")");
                code |= c.verdict == "reject";
            } else if (a.stage == "main") {
                const auto ctx = make_case_context(id, load_a1(cfg, id));
                const auto f = load_a2(cfg, id);
                for (const auto* r : f.finals) {
                    const fs::path dir = main_dir(cfg, id, r->id);
                    if (!fs::exists(dir / "manifest.jsonl")) continue;
                    const auto v = verify_main_dir(
                        ctx, {id, r->id, r->matrix().rows_range(layout::kA1Rows, layout::kA2Rows)}, dir);
                    say("case " + std::to_string(id) + " " + r->id + ": " + v);
                    code |= v == "reject";
                }
            } else {
                throw InputError("stage must be a1, a2 or main");
            }
        }
        return code;
    }
    if (!a.records.empty() && !a.augmented) {
        const auto recs = load_records(a.records);
        const auto reps = a.representatives.empty() ? representatives_of(recs) : load_records(a.representatives);
        const auto rc = verify_solution_records(recs, reps);
        say(std::to_string(rc.checked) + " witnesses checked: " +
            (rc.accepted ? "accepted" : "REJECTED at " + rc.failed_id + ": " + rc.message));
        return rc.accepted ? 0 : 1;
    }
    if (a.cnf.empty() || a.drat.empty()) throw InputError("verify needs --cnf and --drat, --records, or --stage");
    std::ifstream in(a.cnf);
    if (!in) throw IoError("cannot read " + a.cnf);
    const Cnf cnf = parse_dimacs(in);
    const auto proof = read_drat_file(a.drat);
    DratCheckResult r;
    if (a.augmented) {
        if (a.records.empty()) throw InputError("--augmented needs --records with the solutions");
        // solutions are matrices laid over the first rows x cols variables, row-major
        const auto recs = load_records(a.records);
        if (recs.empty()) throw InputError("no solution records in " + a.records);
        const auto shape = recs.front().matrix();
        Cnf grid = Cnf::with_cells(shape.rows(), shape.cols());
        if (grid.var_count() > cnf.var_count()) throw InputError("records are larger than the formula");
        if (grid.var_count() < cnf.var_count()) grid.new_aux(cnf.var_count() - grid.var_count());
        for (std::size_t i = 0; i < cnf.clause_count(); ++i) grid.add_clause(cnf.clause(i), cnf.origin(i));
        std::vector<std::vector<int>> sols;
        for (const auto& rec : recs) {
            const auto m = rec.matrix();
            if (m.rows() != shape.rows() || m.cols() != shape.cols()) throw InputError("records differ in shape");
            std::vector<int> cells;
            for (std::size_t i = 0; i < m.rows(); ++i)
                for (std::size_t j = 0; j < m.cols(); ++j)
                    if (m.at(i, j)) cells.push_back(grid.cell(i, j));
            sols.push_back(std::move(cells));
        }
        r = verify_augmented_unsat(grid, sols, proof);
    } else {
        r = check_drat(cnf, proof);
    }
    const bool ok = r.accepted && (r.refutation || a.allow_partial);
    if (ok)
        say("accepted: " + std::to_string(r.additions) + " additions, " + std::to_string(r.deletions) +
            " deletions" + (r.refutation ? ", refutation" : ""));
    else if (!r.accepted)
        say("rejected at step " + std::to_string(r.failed_step + 1) + ": " + r.message);
    else
        say("rejected: every step is valid but the proof does not refute the formula");
    return ok ? 0 : 1;
}

int cmd_report(const RunConfig& cfg) {
    const fs::path a1 = a1_dir(cfg) / "records.jsonl";
    if (fs::exists(a1)) {
        const auto recs = load_records(a1);
        say("A1: " + std::to_string(recs.size()) + " solutions / " + std::to_string(representatives_of(recs).size()) +
            " classes");
    } else {
        say("A1: not run");
    }
    std::vector<std::array<std::string, 4>> rows;
    std::size_t sum_ineq = 0, sum_total = 0;
    for (int id = 1; id <= kCaseCount; ++id) {
        const fs::path dir = a2_dir(cfg, id);
        if (!fs::exists(dir / "manifest.jsonl")) continue;
        const std::string excl(exclusion_name(case_exclusion(id)));
        if (!fs::exists(dir / "records.jsonl")) {
            rows.push_back({std::to_string(id), excl, "-", "-"});
            continue;
        }
        const auto f = load_a2(cfg, id);
        const auto total = stored_total(dir);
        sum_ineq += f.finals.size();
        sum_total += total.value_or(0);
        rows.push_back({std::to_string(id), excl, std::to_string(f.finals.size()),
                        total ? std::to_string(*total) : "?"});
    }
    if (rows.empty()) {
        say("A2: no cases run");
    } else {
        rows.push_back({"all", "", std::to_string(sum_ineq), std::to_string(sum_total)});
        say(case_table(rows));
    }
    std::map<std::string, int> verdicts;
    const fs::path mroot = out_root(cfg) / "main";
    if (fs::exists(mroot))
        for (const auto& e : fs::recursive_directory_iterator(mroot))
            if (e.path().filename() == "manifest.jsonl")
                for (const auto& j : load_manifest(e.path()))
                    if (j.value("stage", "") == "main") verdicts[j.value("verdict", "?")]++;
    if (!verdicts.empty()) {
        std::string line = "main:";
        for (const auto& [v, n] : verdicts) line += " " + std::to_string(n) + " " + v;
        say(line);
    }
    return 0;
}

} // namespace lamcli
