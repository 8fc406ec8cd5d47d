#include "lam/isogen.hpp"

#include "lam/drat.hpp"
#include "lam/encode.hpp"
#include "lam/errors.hpp"
#include "lam/incidence.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace lam {

namespace {

constexpr int kPrefixCols = 5;

Solver make_solver(const SolverFactory& f, const Cnf& cnf) {
    return f ? f(cnf) : Solver::from_cnf(cnf);
}

std::vector<int> range(int first, int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), first);
    return v;
}

} // namespace

LevelPlan build_level_plan(const BinaryMatrix& a1) {
    require_valid_a1(a1);
    for (int j = 0; j < layout::kWordCols; ++j)
        if (a1.at(0, static_cast<std::size_t>(j)) != (j < kPrefixCols))
            throw InputError("malformed case: first A1 row must be 1^5 0^14");
    const auto ks = word_column_classes(a1);
    LevelPlan plan;
    for (int k : ks) plan.column_sums.push_back(layout::word_column_sums(k).middle);
    plan.fixed_columns = BinaryMatrix(layout::kA2Rows, kPrefixCols);
    int at = 0;
    for (int j = 0; j < kPrefixCols; ++j) {
        const int s = plan.column_sums[static_cast<std::size_t>(j)];
        if (at + s > layout::kA2Rows) throw InfeasibleCase("first five A2 columns need more than 37 rows");
        for (int r = at; r < at + s; ++r) plan.fixed_columns.set(static_cast<std::size_t>(r), static_cast<std::size_t>(j), true);
        if (s > 0) plan.levels.push_back({at, s, j});
        at += s;
    }
    if (at < layout::kA2Rows) plan.levels.push_back({at, layout::kA2Rows - at, -1});
    return plan;
}

A2Instance build_a2_instance(const BinaryMatrix& a1, const LevelPlan& plan) {
    using namespace layout;
    A2Instance inst;
    Cnf& cnf = inst.cnf;
    cnf = Cnf::with_cells(kA1Rows + kA2Rows, kWordCols);
    cnf.set_prune_fixed(true);
    for (int i = 0; i < kA1Rows; ++i)
        for (int j = 0; j < kWordCols; ++j)
            cnf.fix_cell(static_cast<std::size_t>(i), static_cast<std::size_t>(j), a1.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
    for (int r = 0; r < kA2Rows; ++r)
        for (int j = 0; j < kPrefixCols; ++j)
            cnf.fix_cell(static_cast<std::size_t>(kA2First + r), static_cast<std::size_t>(j),
                         plan.fixed_columns.at(static_cast<std::size_t>(r), static_cast<std::size_t>(j)));
    std::vector<Lit> lits;
    for (int r = 0; r < kA2Rows; ++r) {
        lits.clear();
        for (int j = 0; j < kWordCols; ++j) lits.push_back(cnf.cell(static_cast<std::size_t>(kA2First + r), static_cast<std::size_t>(j)));
        add_exactly_k(cnf, lits, kWordRowSums.middle);
    }
    for (int j = 0; j < kWordCols; ++j) {
        lits.clear();
        for (int r = 0; r < kA2Rows; ++r) lits.push_back(cnf.cell(static_cast<std::size_t>(kA2First + r), static_cast<std::size_t>(j)));
        add_exactly_k(cnf, lits, plan.column_sums[static_cast<std::size_t>(j)]);
    }
    const auto rows = range(0, kA1Rows + kA2Rows);
    const auto cols = range(0, kWordCols);
    add_quadruple_clauses(cnf, rows, cols);
    // rows of different levels are already ordered by their fixed prefix
    for (const auto& lv : plan.levels)
        for (int r = lv.first; r + 1 < lv.last(); ++r) {
            std::vector<Lit> a, b;
            for (int j = 0; j < kWordCols; ++j) {
                a.push_back(cnf.cell(static_cast<std::size_t>(kA2First + r), static_cast<std::size_t>(j)));
                b.push_back(cnf.cell(static_cast<std::size_t>(kA2First + r + 1), static_cast<std::size_t>(j)));
            }
            add_lex_geq(cnf, a, b);
        }
    inst.free_cells.resize(kA2Rows);
    for (int r = 0; r < kA2Rows; ++r)
        for (int j = 0; j < kWordCols; ++j) {
            const int v = cnf.cell(static_cast<std::size_t>(kA2First + r), static_cast<std::size_t>(j));
            if (!cnf.fixed_value(v)) inst.free_cells[static_cast<std::size_t>(r)].push_back(v);
        }
    return inst;
}

BinaryMatrix assembly_from_model(const A2Instance& inst, std::span<const std::uint8_t> model, int a2_rows) {
    const auto& cnf = inst.cnf;
    BinaryMatrix m(static_cast<std::size_t>(layout::kA1Rows + a2_rows), cnf.grid_cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) m.set(r, c, model[static_cast<std::size_t>(cnf.cell(r, c))] != 0);
    return m;
}

BandStructure assembly_bands(int a2_rows, int cols) {
    BandStructure b;
    b.row_bands.push_back({0, layout::kA1Rows, false});
    if (a2_rows > 0) b.row_bands.push_back({layout::kA1Rows, a2_rows, true});
    b.col_bands.push_back({0, cols, false});
    return b;
}

std::vector<BinaryMatrix> GenerationLog::recorded_a2s() const {
    std::vector<BinaryMatrix> out;
    if (level_reps.empty()) return out;
    for (const auto& m : level_reps.back()) out.push_back(m.rows_range(layout::kA1Rows, m.rows() - layout::kA1Rows));
    return out;
}

std::vector<SolutionRecord> GenerationLog::records(int case_id) const {
    std::vector<SolutionRecord> out;
    auto rep_id = [&](std::size_t l, std::size_t i) {
        return "c" + std::to_string(case_id) + "-l" + std::to_string(l + 1) + "-r" + std::to_string(i);
    };
    for (std::size_t l = 0; l < level_reps.size(); ++l)
        for (std::size_t i = 0; i < level_reps[l].size(); ++i) {
            const auto& m = level_reps[l][i];
            auto r = SolutionRecord::of(rep_id(l, i), "A2-level-" + std::to_string(l + 1), case_id, m);
            r.certificate = level_certs[l][i].hex();
            r.bands = assembly_bands(static_cast<int>(m.rows()) - layout::kA1Rows, static_cast<int>(m.cols()));
            out.push_back(std::move(r));
        }
    for (std::size_t d = 0; d < discarded.size(); ++d) {
        const auto& e = discarded[d];
        auto r = SolutionRecord::of("c" + std::to_string(case_id) + "-l" + std::to_string(e.level + 1) + "-d" + std::to_string(d),
                                    "A2-level-" + std::to_string(e.level + 1), case_id, e.partial);
        r.bands = assembly_bands(static_cast<int>(e.partial.rows()) - layout::kA1Rows, static_cast<int>(e.partial.cols()));
        r.representative = rep_id(e.level, e.representative);
        r.witness = e.witness;
        out.push_back(std::move(r));
    }
    return out;
}

GenerationLog generate_levelwise(const BinaryMatrix& a1, const LevelPlan& plan, const GenerationOptions& opts) {
    const A2Instance inst = build_a2_instance(a1, plan);
    GenerationLog log;
    // parents of level 0: the bare A1, no assumptions
    std::vector<std::vector<Lit>> parent_assumptions{{}};
    for (std::size_t l = 0; l < plan.levels.size(); ++l) {
        const Level& lv = plan.levels[l];
        const int rows_now = lv.last();
        const BandStructure bands = assembly_bands(rows_now);
        std::vector<int> projection, level_cells;
        for (int r = 0; r < rows_now; ++r)
            for (int v : inst.free_cells[static_cast<std::size_t>(r)]) {
                projection.push_back(v);
                if (r >= lv.first) level_cells.push_back(v);
            }

        Solver solver = make_solver(opts.factory, inst.cnf);
        std::ostringstream proof_text;
        DratStreamSink sink(proof_text, false);
        if (opts.certify) solver.set_proof(&sink);
        solver.set_decision_priority(level_cells);

        std::vector<BinaryMatrix> reps;
        std::vector<CanonicalCertificate> certs;
        std::vector<std::vector<int>> labelings;
        std::unordered_map<CanonicalCertificate, std::size_t, CanonicalCertificateHash> registry;
        std::vector<std::vector<Lit>> blockers;
        std::vector<std::vector<Lit>> next_assumptions;
        LevelStats stats;
        stats.level = l;
        stats.parents = parent_assumptions.size();

        // Whole-level hook: a completion of level l is canonicalized here and
        // nowhere else, so removal never happens part-way through a level.
        auto on_model = [&](const EnumeratedModel& em, std::size_t) -> EnumerationDecision {
            ++stats.models;
            BinaryMatrix partial = assembly_from_model(inst, em.model, rows_now);
            CanonResult cr = canonical_form(build_incidence_graph(partial, bands));
            std::vector<Lit> truths;
            for (std::size_t i = 0; i < projection.size(); ++i)
                if (em.bits[i]) truths.push_back(projection[i]);
            if (opts.certify) {
                std::vector<Lit> b;
                for (Lit t : truths) b.push_back(-t);
                blockers.push_back(std::move(b));
            }
            auto [it, fresh] = registry.emplace(cr.certificate, reps.size());
            if (fresh) {
                reps.push_back(std::move(partial));
                certs.push_back(std::move(cr.certificate));
                labelings.push_back(std::move(cr.labeling));
                next_assumptions.push_back(std::move(truths));
                ++stats.recorded;
                return {EnumerationVerdict::record_and_block, {}};
            }
            const std::size_t rep = it->second;
            IsoWitness w = witness_from_labelings(partial.rows(), partial.cols(), cr.labeling, labelings[rep]);
            if (!witness_maps(partial, reps[rep], w, bands))
                throw IntegrityError("level " + std::to_string(l + 1) +
                                     ": equal certificates but the witness does not map the completion");
            ++stats.discarded;
            if (opts.keep_discarded) log.discarded.push_back({l, std::move(partial), rep, std::move(w)});
            return {EnumerationVerdict::block_only, {}};
        };

        EnumerationOptions eo;
        eo.mode = BlockingMode::positive;
        std::vector<std::vector<Lit>> expected;
        for (const auto& assumptions : parent_assumptions) {
            eo.assumptions = assumptions;
            auto res = enumerate_all(solver, projection, on_model, eo);
            if (res.error) std::rethrow_exception(res.error);
            if (!res.complete) throw IntegrityError("level enumeration stopped early");
            std::vector<Lit> neg;
            for (Lit a : assumptions) neg.push_back(-a);
            expected.push_back(std::move(neg));
        }
        if (opts.certify) {
            sink.flush();
            Cnf formula = inst.cnf;
            formula.set_prune_fixed(false);
            for (const auto& b : blockers)
                if (!b.empty()) formula.add_clause(b, ClauseOrigin::blocking);
            std::istringstream in(proof_text.str());
            auto check = verify_incremental(formula, expected, parse_drat_text(in));
            if (!check.accepted)
                throw IntegrityError("level " + std::to_string(l + 1) + " certificate rejected: " + check.message);
            stats.certified = true;
        }
        log.level_reps.push_back(std::move(reps));
        log.level_certs.push_back(std::move(certs));
        log.levels.push_back(stats);
        if (opts.on_level) opts.on_level(stats);
        parent_assumptions = std::move(next_assumptions);
        if (parent_assumptions.empty()) {
            // nothing to extend: later levels are empty
            for (std::size_t k = l + 1; k < plan.levels.size(); ++k) {
                log.level_reps.emplace_back();
                log.level_certs.emplace_back();
                LevelStats s;
                s.level = k;
                log.levels.push_back(s);
            }
            break;
        }
    }
    return log;
}

LexOnlyResult enumerate_lex_only(const BinaryMatrix& a1, const LevelPlan& plan, const LexOnlyOptions& opts) {
    const A2Instance inst = build_a2_instance(a1, plan);
    std::vector<int> projection;
    for (const auto& row : inst.free_cells) projection.insert(projection.end(), row.begin(), row.end());
    Solver solver = make_solver(opts.factory, inst.cnf);
    std::ostringstream proof_text;
    DratStreamSink sink(proof_text, false);
    if (opts.certify) solver.set_proof(&sink);
    solver.set_decision_priority(projection);

    LexOnlyResult out;
    std::set<CanonicalCertificate> certs;
    std::vector<std::vector<int>> solutions;
    const BandStructure bands = assembly_bands(layout::kA2Rows);
    auto on_model = [&](const EnumeratedModel& em, std::size_t) -> EnumerationDecision {
        ++out.total;
        if (opts.certify) {
            // every true cell, fixed ones included: cells left out count as false
            std::vector<int> truths;
            for (int v = 1; v <= inst.cnf.cell_var_count(); ++v)
                if (em.model[static_cast<std::size_t>(v)]) truths.push_back(v);
            solutions.push_back(std::move(truths));
        }
        if (opts.keep || opts.canonicalize || opts.on_a2) {
            BinaryMatrix full = assembly_from_model(inst, em.model, layout::kA2Rows);
            if (opts.canonicalize) certs.insert(canonical_form(build_incidence_graph(full, bands)).certificate);
            BinaryMatrix a2 = full.rows_range(layout::kA1Rows, layout::kA2Rows);
            if (opts.on_a2) opts.on_a2(a2);
            if (opts.keep) out.a2s.push_back(std::move(a2));
        }
        return {EnumerationVerdict::block_only, {}};
    };
    auto res = enumerate_all(solver, projection, on_model);
    if (res.error) std::rethrow_exception(res.error);
    out.certificates.assign(certs.begin(), certs.end());
    if (opts.certify) {
        sink.flush();
        Cnf base = inst.cnf;
        std::istringstream in(proof_text.str());
        auto check = verify_augmented_unsat(base, solutions, parse_drat_text(in));
        if (!check.accepted) throw IntegrityError("lex-only enumeration certificate rejected: " + check.message);
        out.certified = true;
    }
    return out;
}

bool verify_mutual_nonisomorphism(const SymmetryGroup& a1_group, const std::vector<BinaryMatrix>& recorded) {
    std::unordered_set<BinaryMatrix, BinaryMatrixHash> set;
    for (auto m : recorded) {
        m.sort_rows_desc();
        // a repeated entry is its own non-trivial orbit collision
        if (!set.insert(std::move(m)).second) return false;
    }
    for (const auto& m : recorded) {
        BinaryMatrix self = m;
        self.sort_rows_desc();
        for (const auto& img : apply_group_to_matrix(a1_group, m))
            if (img != self && set.count(img)) return false;
    }
    return true;
}

} // namespace lam
