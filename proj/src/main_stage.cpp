#include "lam/pipeline.hpp"

#include "lam/drat.hpp"
#include "lam/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace lam {

namespace {

using namespace layout;

bool rows_meet(const BinaryMatrix& a, std::size_t r, const BinaryMatrix& b, std::size_t s) {
    for (std::size_t j = 0; j < a.cols(); ++j)
        if (a.at(r, j) && b.at(s, j)) return true;
    return false;
}

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

void require_a2(const BinaryMatrix& a2) {
    if (a2.rows() != kA2Rows || a2.cols() != kWordCols) throw InputError("A2 must be 37x19");
}

} // namespace

std::string_view main_status_name(MainStatus s) {
    switch (s) {
    case MainStatus::unsat: return "unsat";
    case MainStatus::no_extension: return "no-extension";
    case MainStatus::signal: return "SIGNAL";
    case MainStatus::budget_exceeded: return "budget-exceeded";
    }
    return "?";
}

BlockMethod block_method(const A4Completion& a4) {
    return a4.pair_count() >= 2 ? BlockMethod::inside : BlockMethod::outside;
}

std::vector<int> blocks_hit(const BinaryMatrix& a1, const BinaryMatrix& a2, int row) {
    std::vector<int> out;
    for (int i = 0; i < kA1Rows; ++i)
        if (!rows_meet(a1, sz(i), a2, sz(row))) out.push_back(i);
    return out;
}

BlockSelection select_blocks_inside(const CaseContext& c, const BinaryMatrix& a2) {
    require_a2(a2);
    if (c.a4.pair_count() < 2)
        throw InputError("wrong block-selection method: the inside method needs two or more column-sum-2 columns");
    BlockSelection sel;
    sel.method = BlockMethod::inside;
    std::array<int, kA1Rows> inter{};
    for (int i = 0; i < kA1Rows; ++i) inter[sz(i)] = c.a4.intersections(i);
    const int top = *std::max_element(inter.begin(), inter.end());
    std::set<int> most, core;
    for (int i = 0; i < kA1Rows; ++i)
        if (inter[sz(i)] == top) most.insert(i);
    core = most;
    for (int i : most)
        for (int n : c.a4.neighbours(i)) core.insert(n);
    sel.core_blocks.assign(core.begin(), core.end());

    std::vector<int> candidates;
    for (int i = 0; i < kA1Rows; ++i)
        if (!core.count(i)) candidates.push_back(i);
    if (candidates.empty())
        for (int i = 0; i < kA1Rows; ++i)
            if (!most.count(i)) candidates.push_back(i);
    if (candidates.empty())
        for (int i = 0; i < kA1Rows; ++i) candidates.push_back(i);
    // fewest intersections: zero if such a block exists, then one, ...
    int ignored = candidates.front();
    for (int i : candidates)
        if (inter[sz(i)] < inter[sz(ignored)]) ignored = i;
    sel.ignored_block = ignored;
    for (int i = 0; i < kA1Rows; ++i)
        if (i != ignored) sel.blocks.push_back(i);
    return sel;
}

BlockSelection select_blocks_outside(const CaseContext& c, const BinaryMatrix& a2) {
    require_a2(a2);
    if (c.a4.pair_count() > 1)
        throw InputError("wrong block-selection method: the outside method needs at most one column-sum-2 column");
    BlockSelection sel;
    sel.method = BlockMethod::outside;
    int special = 0;
    std::vector<int> hits = blocks_hit(c.a1, a2, 0);
    for (int r = 1; r < kA2Rows; ++r) {
        auto h = blocks_hit(c.a1, a2, r);
        if (h.size() > hits.size()) {
            special = r;
            hits = std::move(h);
        }
    }
    sel.special_line = special;
    sel.special_blocks = hits;
    // A2 rows avoid pair columns (their middle column sum is 0), so the line
    // spends one point per block and the rest outside.
    const int rest = kOffRowSums.middle - static_cast<int>(hits.size());
    const auto outside = c.a4.outside_columns();
    if (rest < 0 || static_cast<std::size_t>(rest) > outside.size())
        throw InfeasibleCase("special line cannot place its remaining points");
    sel.outside_columns.assign(outside.begin(), outside.begin() + rest);

    std::set<int> chosen(hits.begin(), hits.end());
    for (int i = 0; i < kA1Rows; ++i)
        if (c.a4.intersections(i) > 0) chosen.insert(i);
    sel.blocks.assign(chosen.begin(), chosen.end());

    if (sel.effective_blocks() - 1 >= 4) {
        // rows 7..111 with unassigned entries in a block: the rows that do not
        // meet that A1 row in the word columns
        const BinaryMatrix a3 = c.a3;
        auto unassigned = [&](int block, int row) {
            if (row < kA2Rows) return !rows_meet(c.a1, sz(block), a2, sz(row));
            return !rows_meet(c.a1, sz(block), a3, sz(row - kA2Rows));
        };
        int drop = -1, fewest = 0;
        for (int b : sel.blocks) {
            int shared = 0;
            for (int row = 0; row < kA2Rows + kA3Rows; ++row) {
                if (!unassigned(b, row)) continue;
                bool other = !sel.outside_columns.empty() && row != special;
                for (int o : sel.blocks)
                    if (o != b && unassigned(o, row)) other = true;
                if (other) ++shared;
            }
            if (drop < 0 || shared < fewest) {
                drop = b;
                fewest = shared;
            }
        }
        sel.dropped_block = drop;
        sel.blocks.erase(std::find(sel.blocks.begin(), sel.blocks.end(), drop));
    }
    return sel;
}

BlockSelection select_blocks(const CaseContext& c, const BinaryMatrix& a2) {
    return block_method(c.a4) == BlockMethod::inside ? select_blocks_inside(c, a2) : select_blocks_outside(c, a2);
}

std::vector<int> reorder_a2_rows(const BinaryMatrix& a1, const BinaryMatrix& a2, std::optional<int> first) {
    require_a2(a2);
    const int n = static_cast<int>(a2.rows());
    std::vector<int> order;
    std::vector<bool> used(sz(n), false);
    int start = 0;
    if (first) {
        start = *first;
        if (start < 0 || start >= n) throw InputError("first row out of range");
    } else {
        for (int r = 1; r < n; ++r)
            if (blocks_hit(a1, a2, r).size() > blocks_hit(a1, a2, start).size()) start = r;
    }
    order.push_back(start);
    used[sz(start)] = true;
    while (static_cast<int>(order.size()) < n) {
        int pick = -1, score = -1;
        for (int r = 0; r < n; ++r) {
            if (used[sz(r)]) continue;
            int s = 0;
            for (int o : order) s += a2.row_overlap(sz(r), sz(o)) > 0;
            if (s > score) {
                pick = r;
                score = s;
            }
        }
        order.push_back(pick);
        used[sz(pick)] = true;
    }
    return order;
}

Cnf encode_main(const MainSpec& spec) {
    const auto& ctx = spec.ctx;
    const std::size_t n = ctx.assembled.rows();
    std::vector<int> cols = spec.known_cols;
    cols.insert(cols.end(), spec.instance_cols.begin(), spec.instance_cols.end());
    BinaryMatrix mask(n, ctx.assembled.cols());
    for (std::size_t r = 0; r < n; ++r)
        for (int c : cols) mask.set(r, sz(c), true);
    Cnf cnf = Cnf::with_cells(mask);
    cnf.set_prune_fixed(true);
    for (std::size_t r = 0; r < n; ++r)
        for (int c : cols)
            if (ctx.known.at(r, sz(c))) cnf.fix_cell(r, sz(c), ctx.assembled.at(r, sz(c)));
    for (auto [r, c] : spec.forced_ones) {
        if (ctx.known.at(sz(r), sz(c)) && !ctx.assembled.at(sz(r), sz(c)))
            throw EncodingError("forced entry contradicts a known 0");
        if (!ctx.known.at(sz(r), sz(c))) cnf.fix_cell(sz(r), sz(c), true);
    }

    std::vector<int> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0);
    add_quadruple_clauses(cnf, all_rows, cols);
    add_incidence_clauses(cnf, ctx, spec.instance_cols, spec.blocks, spec.target_rows);

    if (!spec.column_sums.empty()) {
        if (spec.column_sums.size() != spec.instance_cols.size())
            throw EncodingError("one column sum per instance column expected");
        std::vector<Lit> lits;
        for (std::size_t k = 0; k < spec.instance_cols.size(); ++k) {
            if (spec.column_sums[k] < 0) continue;
            lits.clear();
            for (int r = spec.sum_rows.first; r < spec.sum_rows.last; ++r)
                lits.push_back(cnf.cell(sz(r), sz(spec.instance_cols[k])));
            add_exactly_k(cnf, lits, spec.column_sums[k]);
        }
    }
    for (const auto& chain : spec.column_chains)
        for (std::size_t p = 0; p + 1 < chain.size(); ++p) add_special_lex_column(cnf, chain, p, spec.lex_rows);
    const auto& lex_cols = spec.row_lex_cols.empty() ? spec.instance_cols : spec.row_lex_cols;
    for (const auto& g : spec.row_groups)
        for (std::size_t t = 0; t + 1 < g.size(); ++t) add_special_lex_rows(cnf, g[t], g[t + 1], lex_cols);
    return cnf;
}

namespace {

// Entries forced by the leading A2 rows: walking the rows in order, a row
// through block b that meets every earlier forced row of b (so cannot share
// their columns) takes the next single column of b. The first row through b
// that could share a column ends the walk for b.
void add_forced_block_entries(const CaseContext& c, const BinaryMatrix& a2r, int block,
                              std::vector<std::pair<int, int>>& forced) {
    const auto singles = c.a4.single_columns(block);
    std::vector<int> placed;
    std::size_t next = 0;
    for (int r = 0; r < kA2Rows && next < singles.size(); ++r) {
        if (rows_meet(c.a1, sz(block), a2r, sz(r))) continue;
        bool meets_all = true;
        for (int p : placed) meets_all = meets_all && a2r.row_overlap(sz(r), sz(p)) > 0;
        if (!meets_all) break;
        forced.emplace_back(kA2First + r, kWordCols + singles[next++]);
        placed.push_back(r);
    }
}

MainSpec spec_for(const CaseContext& c, const BinaryMatrix& a2r, const std::vector<int>& blocks,
                  const std::vector<int>& outside, std::optional<int> special_first,
                  const std::vector<int>* row_lex_cols) {
    MainSpec s;
    const BinaryMatrix a3 = complete_a3(c.a1, a2r);
    s.ctx = build_assembly_context(c.a1, a2r, a3, c.a4);
    s.known_cols.resize(kWordCols);
    std::iota(s.known_cols.begin(), s.known_cols.end(), 0);
    auto selected = [&](int b) { return std::find(blocks.begin(), blocks.end(), b) != blocks.end(); };
    for (std::size_t q = 0; q < c.a4.columns.size(); ++q) {
        const auto& col = c.a4.columns[q];
        bool take = false;
        if (col.kind == A4ColumnKind::outside)
            take = std::find(outside.begin(), outside.end(), static_cast<int>(q)) != outside.end();
        else
            take = selected(col.first) || (col.kind == A4ColumnKind::pair && selected(col.second));
        if (!take) continue;
        s.instance_cols.push_back(kWordCols + static_cast<int>(q));
        s.column_sums.push_back(off_column_sums(static_cast<int>(c.a4.a4.col_sum(q))).middle);
    }
    s.blocks = blocks;
    for (int r = kA2First; r < kSide; ++r) s.target_rows.push_back(r);
    s.sum_rows = {kA2First, kA3First};
    s.lex_rows = {kA2First, kA3First};
    for (int b : blocks) {
        std::vector<int> chain;
        for (int q : c.a4.single_columns(b)) chain.push_back(kWordCols + q);
        if (chain.size() >= 2) s.column_chains.push_back(std::move(chain));
        add_forced_block_entries(c, a2r, b, s.forced_ones);
    }
    if (special_first)
        for (int q : outside) s.forced_ones.emplace_back(kA2First, kWordCols + q);
    // A3 rows with the same word column are interchangeable
    for (int r = 0; r < kA3Rows;) {
        int e = r + 1;
        while (e < kA3Rows && a3.compare_rows(sz(r), sz(e)) == 0) ++e;
        if (e - r >= 2) {
            std::vector<int> g;
            for (int t = r; t < e; ++t) g.push_back(kA3First + t);
            s.row_groups.push_back(std::move(g));
        }
        r = e;
    }
    if (row_lex_cols) s.row_lex_cols = *row_lex_cols;
    return s;
}

} // namespace

MainInstance build_main_instance(const CaseContext& c, const BinaryMatrix& a2, const BlockSelection& sel,
                                 std::string a2_id) {
    require_a2(a2);
    MainInstance inst;
    inst.a2_id = std::move(a2_id);
    inst.selection = sel;
    inst.row_reordering = reorder_a2_rows(c.a1, a2, sel.method == BlockMethod::outside ? sel.special_line : std::nullopt);
    std::vector<int> perm(sz(kA2Rows));
    for (int t = 0; t < kA2Rows; ++t) perm[sz(inst.row_reordering[sz(t)])] = t;
    std::vector<int> id(kWordCols);
    std::iota(id.begin(), id.end(), 0);
    const BinaryMatrix a2r = a2.permuted(perm, id);
    const bool special = sel.method == BlockMethod::outside;
    inst.spec = spec_for(c, a2r, sel.blocks, sel.outside_columns, special ? std::optional<int>(0) : std::nullopt, nullptr);
    inst.cnf = encode_main(inst.spec);
    return inst;
}

MainSpec extended_spec(const CaseContext& c, const MainInstance& base) {
    const BinaryMatrix a2 = base.spec.ctx.assembled.sub(kA2First, kA2Rows, 0, kWordCols);
    std::vector<int> all(kA1Rows);
    std::iota(all.begin(), all.end(), 0);
    const bool special = base.selection.method == BlockMethod::outside;
    // the row order among A3 rows stays keyed to the base columns
    const auto& lex = base.spec.row_lex_cols.empty() ? base.spec.instance_cols : base.spec.row_lex_cols;
    return spec_for(c, a2, all, base.selection.outside_columns, special ? std::optional<int>(0) : std::nullopt, &lex);
}

MainResult run_main_problem(const MainSpec& base, const MainSpec& extended, const MainOptions& opts) {
    MainResult out;
    const Cnf cnf = encode_main(base);
    std::vector<int> projection;
    for (int r = 0; r < static_cast<int>(cnf.grid_rows()); ++r)
        for (int c : base.instance_cols) {
            const int v = cnf.cell(sz(r), sz(c));
            if (!cnf.fixed_value(v)) {
                projection.push_back(v);
                out.cells.emplace_back(r, c);
            }
        }
    auto make = [&](const Cnf& f) { return opts.factory ? opts.factory(f) : Solver::from_cnf(f); };

    Solver solver = make(cnf);
    std::ostringstream proof;
    DratStreamSink sink(proof, false);
    solver.set_proof(&sink);
    solver.set_decision_priority(projection);
    if (opts.conflict_budget) solver.set_conflict_budget(opts.conflict_budget);
    std::vector<std::vector<Lit>> blockers;
    try {
        if (projection.empty()) {
            if (solver.solve().sat()) out.completions.emplace_back();
        } else {
            EnumerationOptions eo;
            eo.mode = BlockingMode::full;  // no row sums here, so blocking must be exact
            auto res = enumerate_all(solver, projection, nullptr, eo);
            for (auto& em : res.recorded) {
                blockers.push_back(blocking_clause(projection, em.bits, BlockingMode::full));
                out.completions.push_back(std::move(em.bits));
            }
        }
    } catch (const BudgetExceeded&) {
        out.status = MainStatus::budget_exceeded;
        Solver fresh = make(cnf);
        out.cubes = split_cubes(fresh, opts.cube_floor, projection, opts.cube_depth);
        return out;
    }
    sink.flush();
    out.enumeration_proof = proof.str();
    if (opts.certify && (!projection.empty() || out.completions.empty())) {
        Cnf formula = cnf;
        formula.set_prune_fixed(false);
        for (const auto& b : blockers) formula.add_clause(b, ClauseOrigin::blocking);
        std::istringstream in(out.enumeration_proof);
        auto check = check_drat(formula, parse_drat_text(in));
        if (!check.accepted || !check.refutation)
            throw IntegrityError("main-stage enumeration certificate rejected: " + check.message);
        out.enumeration_checked = true;
    }
    if (out.completions.empty()) {
        out.status = MainStatus::unsat;
        return out;
    }

    const Cnf ext = encode_main(extended);
    Solver xs = make(ext);
    std::ostringstream xproof;
    DratStreamSink xsink(xproof, false);
    xs.set_proof(&xsink);
    if (opts.conflict_budget) xs.set_conflict_budget(opts.conflict_budget);
    out.status = MainStatus::no_extension;
    for (std::size_t k = 0; k < out.completions.size(); ++k) {
        std::vector<Lit> assumptions;
        for (std::size_t i = 0; i < out.cells.size(); ++i) {
            const auto [r, c] = out.cells[i];
            const int v = ext.cell(sz(r), sz(c));
            assumptions.push_back(out.completions[k][i] ? v : -v);
        }
        SolveResult res;
        try {
            res = xs.solve(assumptions);
        } catch (const BudgetExceeded&) {
            out.status = MainStatus::budget_exceeded;
            return out;
        }
        if (res.sat()) {
            out.status = MainStatus::signal;
            out.extending_completion = k;
            break;
        }
        out.derived.push_back(res.derived);
    }
    xsink.flush();
    out.extension_proof = xproof.str();
    if (opts.certify && out.status == MainStatus::no_extension) {
        std::istringstream in(out.extension_proof);
        auto check = verify_incremental(ext, out.derived, parse_drat_text(in));
        if (!check.accepted) throw IntegrityError("non-extension certificate rejected: " + check.message);
        out.extension_checked = true;
    }
    return out;
}

MainResult run_main_stage(const CaseContext& c, const BinaryMatrix& a2, const MainOptions& opts) {
    const auto sel = select_blocks(c, a2);
    const auto inst = build_main_instance(c, a2, sel);
    return run_main_problem(inst.spec, extended_spec(c, inst), opts);
}

} // namespace lam
