#include "lam/drat.hpp"
#include "lam/errors.hpp"
#include "lam/pipeline.hpp"
#include "oracle.hpp"
#include "toy.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

using namespace lam;

namespace {

const A1StageResult& a1_stage() {
    static const A1StageResult r = run_a1_stage();
    return r;
}

const CaseContext& case_ctx(int id) { return a1_stage().cases.at(static_cast<std::size_t>(id - 1)); }

// Any A2 of the case, straight from the A2 formula.
BinaryMatrix first_a2(const CaseContext& c) {
    auto inst = build_a2_instance(c.a1, *c.level_plan);
    Solver s = Solver::from_cnf(inst.cnf);
    auto r = s.solve();
    if (!r.sat()) throw std::runtime_error("case without A2");
    return assembly_from_model(inst, r.model, layout::kA2Rows).rows_range(layout::kA1Rows, layout::kA2Rows);
}


} // namespace

TEST(Cases, ExclusionLists) {
    std::map<Exclusion, int> n;
    for (int id = 1; id <= kCaseCount; ++id) n[case_exclusion(id)]++;
    EXPECT_EQ(n[Exclusion::no_a2s], 15);
    EXPECT_EQ(n[Exclusion::weight16], 5);
    EXPECT_EQ(n[Exclusion::theoretical], 1);
    EXPECT_EQ(n[Exclusion::none], 45);
    EXPECT_EQ(case_exclusion(52), Exclusion::theoretical);
    EXPECT_EQ(case_exclusion(4), Exclusion::no_a2s);
    EXPECT_THROW(case_exclusion(0), InputError);
    EXPECT_THROW(case_exclusion(67), InputError);
    for (int id = 1; id <= kCaseCount; ++id) EXPECT_EQ(literature_case_numbers()[static_cast<std::size_t>(id - 1)], id);
}

TEST(A1Stage, CountsAndRepresentatives) {
    const auto& r = a1_stage();
    EXPECT_EQ(r.solutions.size(), 3366u);
    ASSERT_EQ(r.cases.size(), 66u);
    std::size_t witnessed = 0;
    for (const auto& rec : r.records) witnessed += rec.witness.has_value();
    EXPECT_EQ(witnessed, 3300u);
    for (const auto& s : r.solutions) {
        EXPECT_EQ(s.to_strings()[0], "1111100000000000000");
        for (std::size_t i = 0; i < s.rows(); ++i) {
            EXPECT_EQ(s.row_sum(i), 5u);
            for (std::size_t j = 0; j < i; ++j) EXPECT_LE(s.row_overlap(i, j), 1u);
        }
    }
    for (std::size_t k = 1; k < r.cases.size(); ++k) EXPECT_GT(r.cases[k - 1].a1, r.cases[k].a1);
    for (std::size_t s = 0; s < r.solutions.size(); ++s) EXPECT_LE(r.solutions[s], r.cases[r.class_of[s]].a1);
    for (const auto& c : r.cases) {
        EXPECT_EQ(c.a3, forced_a3(c.a1));
        EXPECT_EQ(c.a4.a4, complete_a4(c.a1).a4);
        EXPECT_TRUE(c.level_plan.has_value());
        EXPECT_EQ(c.excluded, case_exclusion(c.case_id));
    }
}

TEST(A1Stage, RecordsVerifyAndCorruptionIsCaught) {
    const auto& r = a1_stage();
    auto check = verify_solution_records(r.records, r.records);
    EXPECT_TRUE(check.accepted) << check.message;
    EXPECT_EQ(check.checked, 3300u);
    auto bad = r.records;
    auto it = std::find_if(bad.begin(), bad.end(), [](const SolutionRecord& x) { return x.witness.has_value(); });
    ASSERT_NE(it, bad.end());
    std::swap(it->witness->col_perm[5], it->witness->col_perm[6]);
    // a swap may still map by accident if both columns agree; then try another pair
    auto res = verify_solution_records(bad, r.records);
    if (res.accepted) {
        std::swap(it->witness->col_perm[5], it->witness->col_perm[6]);
        std::swap(it->witness->row_perm[0], it->witness->row_perm[5]);
        res = verify_solution_records(bad, r.records);
    }
    EXPECT_FALSE(res.accepted);
    EXPECT_EQ(res.failed_id, it->id);
}

TEST(A1Stage, EnumerationCertificateChecks) {
    std::ostringstream text;
    DratStreamSink sink(text, false);
    A1Options o;
    o.proof = &sink;
    auto r = run_a1_stage(o);
    std::vector<std::vector<int>> sols;
    for (const auto& s : r.solutions) sols.push_back(a1_true_cells(r.cnf, s));
    std::istringstream in(text.str());
    auto proof = parse_drat_text(in);
    auto check = verify_augmented_unsat(r.cnf, sols, proof);
    EXPECT_TRUE(check.accepted) << check.message;
    // leaving one solution out: the proof no longer refutes or the formula shows the model
    sols.pop_back();
    auto partial = verify_augmented_unsat(r.cnf, sols, proof);
    EXPECT_FALSE(partial.accepted && partial.refutation);
}

TEST(A1Stage, FirstCaseLevels) {
    // row 7, rows 8-10, 11-17, 18-24, 25-31 and 32-43
    const auto& plan = *case_ctx(1).level_plan;
    std::vector<std::pair<int, int>> got;
    for (const auto& l : plan.levels) got.emplace_back(l.first + 7, l.last() + 6);
    std::vector<std::pair<int, int>> want{{7, 7}, {8, 10}, {11, 17}, {18, 24}, {25, 31}, {32, 43}};
    EXPECT_EQ(got, want);
}

TEST(A2Stage, SkipsExcludedAndRunsNoA2Cases) {
    EXPECT_FALSE(run_a2_stage(case_ctx(52)).has_value());
    A2StageOptions o;
    o.generation.keep_discarded = false;
    auto log = run_a2_stage(case_ctx(4), o);
    ASSERT_TRUE(log.has_value());
    EXPECT_TRUE(log->recorded_a2s().empty());
}

TEST(BlockSelection, FigureThreeCase) {
    const auto& c = case_ctx(66);
    auto a2 = first_a2(c);
    ASSERT_EQ(block_method(c.a4), BlockMethod::inside);
    auto sel = select_blocks_inside(c, a2);
    EXPECT_EQ(sel.core_blocks, (std::vector<int>{0, 1, 4, 5}));
    ASSERT_TRUE(sel.ignored_block.has_value());
    EXPECT_EQ(*sel.ignored_block, 2);
    EXPECT_EQ(sel.blocks.size(), 5u);
    auto again = select_blocks_inside(c, a2);
    EXPECT_EQ(again.blocks, sel.blocks);
    EXPECT_THROW(select_blocks_outside(c, a2), InputError);
}

TEST(BlockSelection, ZeroIntersectionBlockIsIgnored) {
    int seen = 0;
    for (const auto& c : a1_stage().cases) {
        if (block_method(c.a4) != BlockMethod::inside || c.excluded == Exclusion::no_a2s) continue;
        std::vector<int> zero;
        for (int b = 0; b < 6; ++b)
            if (c.a4.intersections(b) == 0) zero.push_back(b);
        if (zero.size() != 1) continue;
        ++seen;
        auto sel = select_blocks_inside(c, first_a2(c));
        EXPECT_EQ(sel.ignored_block, zero[0]) << "case " << c.case_id;
    }
    EXPECT_GT(seen, 0);
}

TEST(BlockSelection, OutsideMethod) {
    int checked = 0;
    for (const auto& c : a1_stage().cases) {
        if (block_method(c.a4) != BlockMethod::outside || c.excluded == Exclusion::no_a2s) continue;
        auto a2 = first_a2(c);
        EXPECT_THROW(select_blocks_inside(c, a2), InputError);
        auto sel = select_blocks_outside(c, a2);
        ++checked;
        ASSERT_TRUE(sel.special_line.has_value());
        // no earlier line hits more blocks, none at all hits more
        for (int r = 0; r < layout::kA2Rows; ++r) {
            const auto h = blocks_hit(c.a1, a2, r).size();
            if (r < *sel.special_line) EXPECT_LT(h, sel.special_blocks.size());
            EXPECT_LE(h, sel.special_blocks.size());
        }
        EXPECT_EQ(sel.outside_columns.size(), 8 - sel.special_blocks.size());
        EXPECT_GE(sel.effective_blocks(), 4) << "case " << c.case_id;
        if (sel.dropped_block) {
            EXPECT_EQ(std::count(sel.blocks.begin(), sel.blocks.end(), *sel.dropped_block), 0);
        }
    }
    EXPECT_GT(checked, 10);
}

TEST(MainInstance, ForcedEntriesAndDeterminism) {
    const auto& c = case_ctx(66);
    auto a2 = first_a2(c);
    auto sel = select_blocks(c, a2);
    auto inst = build_main_instance(c, a2, sel, "a2-0");
    // the first row passes through each selected block it hits at the block's first single column
    const auto first = inst.row_reordering[0];
    for (int b : blocks_hit(c.a1, a2, first)) {
        if (std::find(sel.blocks.begin(), sel.blocks.end(), b) == sel.blocks.end()) continue;
        const int col = layout::kWordCols + c.a4.single_columns(b).front();
        EXPECT_EQ(inst.cnf.fixed_value(inst.cnf.cell(layout::kA2First, static_cast<std::size_t>(col))), true);
    }
    EXPECT_FALSE(inst.spec.forced_ones.empty());
    // the chosen rows come first and meet each other
    auto reo = reorder_a2_rows(c.a1, a2);
    EXPECT_EQ(reo, inst.row_reordering);
    EXPECT_EQ(a2.row_overlap(static_cast<std::size_t>(reo[0]), static_cast<std::size_t>(reo[1])), 1u);
    auto again = build_main_instance(c, a2, sel, "a2-0");
    EXPECT_TRUE(again.cnf.same_clauses(inst.cnf));
    // one column clause per known column and instance column, less those satisfied by known or forced 1s
    std::set<std::pair<int, int>> forced(inst.spec.forced_ones.begin(), inst.spec.forced_ones.end());
    std::size_t satisfied = 0;
    for (const auto& cj : inst.spec.ctx.columns_known)
        for (int k : inst.spec.instance_cols) {
            bool hit = false;
            for (int i : cj) hit = hit || (inst.spec.ctx.is_known(i, k) && inst.spec.ctx.value(i, k)) || forced.count({i, k});
            satisfied += hit;
        }
    EXPECT_EQ(inst.cnf.count(ClauseOrigin::incidence_col) + satisfied, 19 * inst.spec.instance_cols.size());
}

namespace {

void check_toy_soundness(const toy::Toy& t, const std::vector<int>& cols) {
    const auto spec = toy::spec(t, cols);
    const Cnf cnf = encode_main(spec);
    Solver s = Solver::from_cnf(cnf);
    const auto completions = oracle::plane_completions(t.partial, t.known, t.order);
    ASSERT_FALSE(completions.empty());
    std::size_t direct = 0;
    for (const auto& m : completions) {
        bool covered = false;
        for (const auto& img : toy::orbit_under_spec_group(m, spec))
            if (toy::satisfies_instance(s, cnf, img, cols)) {
                covered = true;
                break;
            }
        EXPECT_TRUE(covered) << m.to_string();
        direct += toy::satisfies_instance(s, cnf, m, cols);
    }
    // symmetry breaking removes some but not all completions
    EXPECT_GT(direct, 0u);
    // without the lex families every completion satisfies the instance outright
    toy::Features plain;
    plain.chains = plain.row_lex = false;
    const Cnf bare = encode_main(toy::spec(t, cols, plain));
    Solver sb = Solver::from_cnf(bare);
    for (const auto& m : completions) EXPECT_TRUE(toy::satisfies_instance(sb, bare, m, cols));
}

} // namespace

TEST(MainSoundness, FanoToys) {
    for (int k : {1, 2, 3}) {
        auto t = toy::plane_toy(2, k);
        auto cols = toy::unknown_cols(t);
        check_toy_soundness(t, cols);
        // a subset of the columns: block columns of the first known row
        std::vector<int> sub;
        for (int c : cols)
            if (t.partial.at(0, static_cast<std::size_t>(c))) sub.push_back(c);
        check_toy_soundness(t, sub);
    }
}

TEST(MainSoundness, OrderThreeToys) {
    for (int k : {2, 3}) {
        auto t = toy::plane_toy(3, k);
        auto cols = toy::unknown_cols(t);
        std::vector<int> sub;
        for (int c : cols)
            if (t.partial.at(0, static_cast<std::size_t>(c)) || t.partial.at(1, static_cast<std::size_t>(c))) sub.push_back(c);
        check_toy_soundness(t, sub);
    }
}


TEST(MainStage, UnsatToyGivesCheckedProof) {
    // Fano, two known rows; one known-column 1 moved to another row
    auto t = toy::plane_toy(2, 2);
    ASSERT_TRUE(t.partial.at(2, 2));
    ASSERT_FALSE(t.partial.at(4, 2));
    t.partial.set(2, 2, false);
    t.partial.set(4, 2, true);
    EXPECT_TRUE(oracle::plane_completions(t.partial, t.known, 2).empty());
    auto run = toy::toy_run(t);
    auto r = run_main_problem(run.base, run.ext);
    EXPECT_EQ(r.status, MainStatus::unsat);
    EXPECT_TRUE(r.completions.empty());
    EXPECT_TRUE(r.enumeration_checked);
    // the base instance has no model at all, by brute force over its cells
    const Cnf cnf = encode_main(run.base);
    std::istringstream in(r.enumeration_proof);
    auto check = check_drat(cnf, parse_drat_text(in));
    EXPECT_TRUE(check.accepted && check.refutation);
}

TEST(MainStage, PlantedPlaneRaisesSignal) {
    for (int q : {2, 3}) {
        auto run = toy::toy_run(toy::plane_toy(q, q == 2 ? 2 : 3));
        auto r = run_main_problem(run.base, run.ext);
        EXPECT_EQ(r.status, MainStatus::signal) << "q=" << q;
        ASSERT_TRUE(r.extending_completion.has_value());
        EXPECT_FALSE(r.completions.empty());
    }
}

TEST(MainStage, NonExtensionProofCoversEveryCompletion) {
    // order 3, three known rows; a point of the second known row moved outside the base columns
    auto t = toy::plane_toy(3, 3);
    ASSERT_TRUE(t.partial.at(1, 0));
    ASSERT_FALSE(t.partial.at(1, 9));
    t.partial.set(1, 0, false);
    t.partial.set(1, 9, true);
    EXPECT_TRUE(oracle::plane_completions(t.partial, t.known, 3).empty());
    auto run = toy::toy_run(t);
    auto r = run_main_problem(run.base, run.ext);
    EXPECT_EQ(r.status, MainStatus::no_extension);
    ASSERT_FALSE(r.completions.empty());
    EXPECT_TRUE(r.enumeration_checked);
    EXPECT_TRUE(r.extension_checked);
    ASSERT_EQ(r.derived.size(), r.completions.size());
    // each derived clause negates part of its completion, and the proof states it
    const Cnf ext = encode_main(run.ext);
    std::istringstream in(r.extension_proof);
    auto proof = parse_drat_text(in);
    for (std::size_t k = 0; k < r.completions.size(); ++k) {
        std::set<Lit> negation;
        for (std::size_t i = 0; i < r.cells.size(); ++i) {
            const int v = ext.cell(static_cast<std::size_t>(r.cells[i].first), static_cast<std::size_t>(r.cells[i].second));
            negation.insert(r.completions[k][i] ? -v : v);
        }
        const std::set<Lit> got(r.derived[k].begin(), r.derived[k].end());
        EXPECT_TRUE(std::includes(negation.begin(), negation.end(), got.begin(), got.end()));
        bool present = false;
        for (const auto& st : proof.steps)
            present = present || (!st.deletion && std::set<Lit>(st.lits.begin(), st.lits.end()) == got);
        EXPECT_TRUE(present || proof.has_empty_clause());
    }
    auto check = verify_incremental(ext, r.derived, proof);
    EXPECT_TRUE(check.accepted) << check.message;
}

TEST(MainStage, BudgetCubesCoverEveryCompletion) {
    // the whole unknown region as base, so the enumeration itself runs out of budget
    auto t = toy::plane_toy(3, 2);
    toy::ToyRun run;
    run.base = run.ext = toy::spec(t, toy::unknown_cols(t));
    const auto full = run_main_problem(run.base, run.ext);
    ASSERT_FALSE(full.completions.empty());
    MainOptions o;
    o.conflict_budget = 1;
    o.cube_floor = 10;
    o.cube_depth = 6;
    auto r = run_main_problem(run.base, run.ext, o);
    ASSERT_EQ(r.status, MainStatus::budget_exceeded);
    ASSERT_FALSE(r.cubes.empty());
    const Cnf cnf = encode_main(run.base);
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < full.cells.size(); ++i)
        index[cnf.cell(static_cast<std::size_t>(full.cells[i].first), static_cast<std::size_t>(full.cells[i].second))] = i;
    for (const auto& comp : full.completions) {
        bool covered = false;
        for (const auto& cube : r.cubes) {
            bool agrees = true;
            for (Lit l : cube) agrees = agrees && (comp[index.at(var_of(l))] != 0) == (l > 0);
            covered = covered || agrees;
        }
        EXPECT_TRUE(covered);
    }
}
