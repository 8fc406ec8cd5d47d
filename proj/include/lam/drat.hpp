#pragma once

#include "lam/cnf.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lam {

struct DratStep {
    bool deletion = false;
    std::vector<Lit> lits;

    friend bool operator==(const DratStep&, const DratStep&) = default;
};

struct DratProof {
    std::vector<DratStep> steps;

    bool has_empty_clause() const;
    friend bool operator==(const DratProof&, const DratProof&) = default;
};

/// Text DRAT: "<lits> 0" and "d <lits> 0", comments with 'c'. Throws
/// ParseError with the 1-based line number of the offending line.
DratProof parse_drat_text(std::istream& in);
/// Binary DRAT: 'a'/'d', then literals as varints of 2|l|+sign, then 0.
/// ParseError reports the byte offset in place of a line number.
DratProof parse_drat_binary(std::string_view bytes);
/// Detects the encoding from the leading bytes.
DratProof parse_drat(std::string_view bytes);
DratProof read_drat_file(const std::string& path);

void write_drat_text(const DratProof& proof, std::ostream& out);
void write_drat_binary(const DratProof& proof, std::ostream& out);

struct DratCheckResult {
    bool accepted = false;
    /// Index of the first invalid step, or npos when accepted.
    std::size_t failed_step = static_cast<std::size_t>(-1);
    std::string message;
    /// The empty clause was derived (or the formula is refuted by propagation).
    bool refutation = false;
    std::size_t additions = 0;
    std::size_t deletions = 0;
    std::size_t rat_steps = 0;
    std::size_t ignored_deletions = 0;
};

/// Forward checker: every added clause must be RUP, or RAT on its first
/// literal, against the clauses present at that point. Deleting a clause that
/// is the reason of a root-level assignment is ignored. A proof without an
/// empty clause is accepted when all its steps are valid; `refutation` tells
/// whether it also refutes the formula.
DratCheckResult check_drat(const Cnf& formula, const DratProof& proof);

/// Adds one blocking clause per solution (negations of its true cells, every
/// other cell false) and requires a refutation. Each solution is first checked
/// against `base`; a violating one throws IntegrityError.
DratCheckResult verify_augmented_unsat(const Cnf& base,
                                       std::span<const std::vector<int>> true_cells,
                                       const DratProof& proof);

/// Accepts when the proof is valid and each expected clause occurs among its
/// additions (or the proof refutes the formula outright).
DratCheckResult verify_incremental(const Cnf& formula, std::span<const std::vector<Lit>> expected,
                                   const DratProof& proof);

/// Whether some extension of the given cell values satisfies `cnf`
/// (cells outside `true_cells` are false). Uses its own propagation and search.
bool cells_extend_to_model(const Cnf& cnf, std::span<const int> true_cells);

} // namespace lam
