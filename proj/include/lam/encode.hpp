#pragma once

#include "lam/cnf.hpp"
#include "lam/incidence.hpp"

#include <span>
#include <vector>

namespace lam {

/// Half-open row interval [first, last).
struct RowRange {
    int first = 0;
    int last = 0;
    int size() const noexcept { return last - first; }
};

/// For every pair of rows and pair of columns adds
/// -a(i,j) | -a(i,j') | -a(i',j) | -a(i',j'), so no two rows meet twice.
/// Returns the number of clauses stored.
std::size_t add_quadruple_clauses(Cnf& cnf, std::span<const int> rows, std::span<const int> cols);

/// Sequential counter forcing exactly k of `lits` true. Register r(i,j) is
/// "at least j of the first i+1 literals" and is tied to its inputs in both
/// directions, so auxiliaries are functions of the inputs.
std::vector<int> add_exactly_k(Cnf& cnf, std::span<const Lit> lits, int k);

/// a >=lex b (first position most significant, 1 > 0), via a chain of
/// prefix-equality auxiliaries e_i <-> (a,b agree on positions < i).
std::vector<int> add_lex_geq(Cnf& cnf, std::span<const Lit> a, std::span<const Lit> b);

/// Within-block column order for columns that hold exactly two 1s in `rows`
/// and are pairwise disjoint there: if column `pos` has 1s at rows i' < i then
/// column `pos+1` is 0 on every row before i'. Throws EncodingError when `pos`
/// names the final column of the block.
std::size_t add_special_lex_column(Cnf& cnf, std::span<const int> block_cols, std::size_t pos,
                                   RowRange rows);

/// Row order for two rows that share no 1 in `cols`: a 1 of `lower` at a column
/// needs a 1 of `upper` at an earlier column of `cols`.
std::size_t add_special_lex_rows(Cnf& cnf, int upper, int lower, std::span<const int> cols);

struct IncidenceCounts {
    std::size_t column_clauses = 0;
    std::size_t row_clauses = 0;
};

/// Column clauses OR_{i in C_j} a(i,k) for each known column j and target
/// column k; row clauses OR_{j in R_b} a(r,j) for each selected block b and
/// target row r. Cells are looked up in `cnf` by their coordinates in the
/// assembly. Throws EncodingError on an empty C_j or R_b.
IncidenceCounts add_incidence_clauses(Cnf& cnf, const AssemblyContext& ctx,
                                      std::span<const int> target_cols,
                                      std::span<const int> blocks,
                                      std::span<const int> target_rows);

/// OR over the negations of the given true cell variables. Throws
/// EncodingError on an empty set or on auxiliary variables.
std::size_t add_blocking_clause(Cnf& cnf, std::span<const int> true_cells);

} // namespace lam
