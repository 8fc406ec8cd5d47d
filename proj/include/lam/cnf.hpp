#pragma once

#include "lam/matrix.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace lam {

/// Literals follow the DIMACS convention: variable v is `v`, its negation `-v`.
using Lit = int;

constexpr int var_of(Lit l) noexcept { return l < 0 ? -l : l; }

enum class ClauseOrigin : std::uint8_t {
    quadruple,
    cardinality,
    lex_generic,
    lex_special_row,
    lex_special_col,
    incidence_row,
    incidence_col,
    blocking,
    unit_fix,
    external,  // read from a file without an origin sidecar
};

std::string_view origin_name(ClauseOrigin o);
std::optional<ClauseOrigin> origin_from_name(std::string_view s);

/// Variable universe plus clause list. Cell variables (entries a_{i,j} of an
/// incidence region) come first in row-major order; auxiliaries follow in
/// creation order.
class Cnf {
public:
    Cnf() = default;

    /// Cell variables for every entry of a rows x cols region.
    static Cnf with_cells(std::size_t rows, std::size_t cols);
    /// Cell variables only where `mask` holds a 1.
    static Cnf with_cells(const BinaryMatrix& mask);
    /// Plain variables 1..n with no cell meaning (parsed or hand-built formulas).
    static Cnf with_vars(int n);

    int var_count() const noexcept { return var_count_; }
    std::size_t grid_rows() const noexcept { return grid_rows_; }
    std::size_t grid_cols() const noexcept { return grid_cols_; }
    int cell_var_count() const noexcept { return cell_vars_; }

    std::optional<int> cell_var(std::size_t r, std::size_t c) const;
    /// Like cell_var but throws EncodingError for entries without a variable.
    int cell(std::size_t r, std::size_t c) const;
    bool is_cell_var(int v) const noexcept { return v >= 1 && v <= cell_vars_; }
    /// Cell coordinates of a cell variable.
    std::pair<std::size_t, std::size_t> cell_of(int v) const;

    int new_aux();
    std::vector<int> new_aux(int n);
    bool is_aux(int v) const noexcept { return v > cell_vars_ && v <= var_count_; }

    /// Adds the unit clause fixing a cell and remembers the value for pruning.
    void fix_cell(std::size_t r, std::size_t c, bool value);
    std::optional<bool> fixed_value(int v) const;

    /// When set, clauses satisfied by fixed cells are dropped and falsified
    /// fixed literals are removed before storing.
    void set_prune_fixed(bool on) noexcept { prune_fixed_ = on; }
    bool prune_fixed() const noexcept { return prune_fixed_; }

    /// Stores a clause. Tautologies and (under pruning) satisfied clauses are
    /// skipped; returns whether a clause was stored. Throws EncodingError for
    /// out-of-range literals.
    bool add_clause(std::span<const Lit> lits, ClauseOrigin origin);
    bool add_clause(std::initializer_list<Lit> lits, ClauseOrigin origin) {
        return add_clause(std::span<const Lit>(lits.begin(), lits.size()), origin);
    }

    std::size_t clause_count() const noexcept { return origins_.size(); }
    std::span<const Lit> clause(std::size_t i) const {
        return {lits_.data() + starts_[i], starts_[i + 1] - starts_[i]};
    }
    ClauseOrigin origin(std::size_t i) const { return origins_[i]; }
    std::size_t count(ClauseOrigin o) const;
    std::size_t literal_count() const noexcept { return lits_.size(); }

    /// Structural equality: variable count and clause sequence.
    bool same_clauses(const Cnf& other) const;

private:
    int var_count_ = 0;
    int cell_vars_ = 0;
    std::size_t grid_rows_ = 0;
    std::size_t grid_cols_ = 0;
    std::vector<int> cell_index_;  // grid position -> var, 0 if none
    std::vector<std::uint32_t> cell_pos_;  // var-1 -> grid position
    std::vector<std::int8_t> fixed_;       // per var: -1 unknown, else value
    bool prune_fixed_ = false;
    std::vector<Lit> lits_;
    std::vector<std::size_t> starts_{0};
    std::vector<ClauseOrigin> origins_;
    std::vector<Lit> scratch_;
};

/// Writes "p cnf V C" followed by one 0-terminated clause per line.
/// Returns the number of bytes written; throws IoError on stream failure.
std::size_t emit_dimacs(const Cnf& cnf, std::ostream& out);
Cnf parse_dimacs(std::istream& in);

/// One origin tag per clause line, in clause order.
void write_origin_tags(const Cnf& cnf, std::ostream& out);
/// Returns the tags read from a sidecar written by write_origin_tags.
std::vector<ClauseOrigin> read_origin_tags(std::istream& in);

} // namespace lam
