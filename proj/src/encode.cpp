#include "lam/encode.hpp"

#include "lam/errors.hpp"

#include <string>

namespace lam {

std::size_t add_quadruple_clauses(Cnf& cnf, std::span<const int> rows, std::span<const int> cols) {
    // Resolve every cell first so a missing variable fails before any clause is added.
    std::vector<int> vars(rows.size() * cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b)
            vars[a * cols.size() + b] = cnf.cell(static_cast<std::size_t>(rows[a]),
                                                 static_cast<std::size_t>(cols[b]));
    auto v = [&](std::size_t a, std::size_t b) { return vars[a * cols.size() + b]; };
    std::size_t added = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t i2 = i + 1; i2 < rows.size(); ++i2)
            for (std::size_t j = 0; j < cols.size(); ++j)
                for (std::size_t j2 = j + 1; j2 < cols.size(); ++j2)
                    added += cnf.add_clause({-v(i, j), -v(i, j2), -v(i2, j), -v(i2, j2)},
                                            ClauseOrigin::quadruple);
    return added;
}

namespace {

/// A counter register: constant or literal. Unused registers are never read.
struct Reg {
    enum Kind { f, t, lit, unused } kind = f;
    Lit l = 0;
};

} // namespace

std::vector<int> add_exactly_k(Cnf& cnf, std::span<const Lit> lits, int k) {
    const int n = static_cast<int>(lits.size());
    if (k < 0 || k > n)
        throw EncodingError("cardinality bound " + std::to_string(k) + " outside 0.." +
                            std::to_string(n));
    constexpr auto card = ClauseOrigin::cardinality;
    if (k == 0 || k == n) {
        for (Lit x : lits) cnf.add_clause({k == 0 ? -x : x}, card);
        return {};
    }
    std::vector<int> aux;
    std::vector<Reg> prev(static_cast<std::size_t>(k) + 1), cur(prev.size());
    prev[0] = {Reg::t, 0};
    for (int i = 0; i < n; ++i) {
        const Lit x = lits[static_cast<std::size_t>(i)];
        if (prev[static_cast<std::size_t>(k)].kind == Reg::lit)
            cnf.add_clause({-x, -prev[static_cast<std::size_t>(k)].l}, card);
        // Registers below this bound can no longer reach k by the end.
        const int lower = k - (n - 1 - i);
        cur[0] = {Reg::t, 0};
        for (int j = 1; j <= k; ++j) {
            auto& out = cur[static_cast<std::size_t>(j)];
            if (j > i + 1) {
                out = {Reg::f, 0};
                continue;
            }
            if (j < lower) {
                out = {Reg::unused, 0};
                continue;
            }
            const Reg pj = prev[static_cast<std::size_t>(j)];
            const Reg pj1 = prev[static_cast<std::size_t>(j - 1)];
            if (i == 0) {  // j == 1: the register is x itself
                out = {Reg::lit, x};
                continue;
            }
            const int r = cnf.new_aux();
            aux.push_back(r);
            if (pj.kind == Reg::lit) cnf.add_clause({-pj.l, r}, card);
            if (pj1.kind == Reg::t)
                cnf.add_clause({-x, r}, card);
            else
                cnf.add_clause({-x, -pj1.l, r}, card);
            if (pj.kind == Reg::lit)
                cnf.add_clause({-r, pj.l, x}, card);
            else
                cnf.add_clause({-r, x}, card);
            if (pj1.kind != Reg::t) {
                if (pj.kind == Reg::lit)
                    cnf.add_clause({-r, pj.l, pj1.l}, card);
                else
                    cnf.add_clause({-r, pj1.l}, card);
            }
            out = {Reg::lit, r};
        }
        std::swap(prev, cur);
    }
    cnf.add_clause({prev[static_cast<std::size_t>(k)].l}, card);
    return aux;
}

std::vector<int> add_lex_geq(Cnf& cnf, std::span<const Lit> a, std::span<const Lit> b) {
    if (a.size() != b.size())
        throw EncodingError("lex vectors differ in length (" + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()) + ")");
    constexpr auto lex = ClauseOrigin::lex_generic;
    std::vector<int> aux;
    Lit eq = 0;  // 0 means the constant true prefix
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (eq == 0)
            cnf.add_clause({a[i], -b[i]}, lex);
        else
            cnf.add_clause({-eq, a[i], -b[i]}, lex);
        if (i + 1 == a.size()) break;
        const int next = cnf.new_aux();
        aux.push_back(next);
        if (eq != 0) cnf.add_clause({-next, eq}, lex);
        cnf.add_clause({-next, -a[i], b[i]}, lex);
        cnf.add_clause({-next, a[i], -b[i]}, lex);
        if (eq == 0) {
            cnf.add_clause({-a[i], -b[i], next}, lex);
            cnf.add_clause({a[i], b[i], next}, lex);
        } else {
            cnf.add_clause({-eq, -a[i], -b[i], next}, lex);
            cnf.add_clause({-eq, a[i], b[i], next}, lex);
        }
        eq = next;
    }
    return aux;
}

std::size_t add_special_lex_column(Cnf& cnf, std::span<const int> block_cols, std::size_t pos,
                                   RowRange rows) {
    if (pos + 1 >= block_cols.size())
        throw EncodingError("special column order applied to the final column of a block");
    const auto j = static_cast<std::size_t>(block_cols[pos]);
    const auto j1 = static_cast<std::size_t>(block_cols[pos + 1]);
    std::size_t added = 0;
    for (int lo = rows.first; lo < rows.last; ++lo)
        for (int mid = lo + 1; mid < rows.last; ++mid)
            for (int hi = mid + 1; hi < rows.last; ++hi)
                added += cnf.add_clause({-cnf.cell(static_cast<std::size_t>(hi), j),
                                         -cnf.cell(static_cast<std::size_t>(mid), j),
                                         -cnf.cell(static_cast<std::size_t>(lo), j1)},
                                        ClauseOrigin::lex_special_col);
    return added;
}

std::size_t add_special_lex_rows(Cnf& cnf, int upper, int lower, std::span<const int> cols) {
    std::size_t added = 0;
    std::vector<Lit> cl;
    for (std::size_t t = 0; t < cols.size(); ++t) {
        cl.clear();
        cl.push_back(-cnf.cell(static_cast<std::size_t>(lower), static_cast<std::size_t>(cols[t])));
        for (std::size_t s = 0; s < t; ++s)
            cl.push_back(cnf.cell(static_cast<std::size_t>(upper), static_cast<std::size_t>(cols[s])));
        added += cnf.add_clause(cl, ClauseOrigin::lex_special_row);
    }
    return added;
}

IncidenceCounts add_incidence_clauses(Cnf& cnf, const AssemblyContext& ctx,
                                      std::span<const int> target_cols,
                                      std::span<const int> blocks,
                                      std::span<const int> target_rows) {
    IncidenceCounts out;
    std::vector<Lit> cl;
    for (std::size_t j = 0; j < ctx.columns_known.size(); ++j) {
        const auto& cj = ctx.columns_known[j];
        if (cj.empty()) throw EncodingError("known column " + std::to_string(j + 1) + " is empty");
        for (int k : target_cols) {
            cl.clear();
            for (int i : cj) cl.push_back(cnf.cell(static_cast<std::size_t>(i), static_cast<std::size_t>(k)));
            out.column_clauses += cnf.add_clause(cl, ClauseOrigin::incidence_col);
        }
    }
    for (int b : blocks) {
        if (b < 0 || static_cast<std::size_t>(b) >= ctx.rows_known.size())
            throw EncodingError("unknown block " + std::to_string(b + 1));
        const auto& rb = ctx.rows_known[static_cast<std::size_t>(b)];
        if (rb.empty()) throw EncodingError("known row " + std::to_string(b + 1) + " is empty");
        for (int r : target_rows) {
            cl.clear();
            for (int j : rb) cl.push_back(cnf.cell(static_cast<std::size_t>(r), static_cast<std::size_t>(j)));
            out.row_clauses += cnf.add_clause(cl, ClauseOrigin::incidence_row);
        }
    }
    return out;
}

std::size_t add_blocking_clause(Cnf& cnf, std::span<const int> true_cells) {
    if (true_cells.empty())
        throw EncodingError("blocking an assignment with no true cells would add the empty clause");
    std::vector<Lit> cl;
    cl.reserve(true_cells.size());
    for (int v : true_cells) {
        if (!cnf.is_cell_var(v))
            throw EncodingError("variable " + std::to_string(v) + " is not a cell variable");
        cl.push_back(-v);
    }
    cnf.add_clause(cl, ClauseOrigin::blocking);
    return cnf.clause_count() - 1;
}

} // namespace lam
