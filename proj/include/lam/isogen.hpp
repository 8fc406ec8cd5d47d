#pragma once

#include "lam/canon.hpp"
#include "lam/certs.hpp"
#include "lam/cnf.hpp"
#include "lam/solver.hpp"

#include <functional>
#include <vector>

namespace lam {

/// A group of A2 rows sharing one pattern in the first five columns.
struct Level {
    int first = 0;        // A2-local row index
    int count = 0;
    int prefix_col = -1;  // column holding the row's 1 among the first five, -1 for none
    int last() const noexcept { return first + count; }
};

struct LevelPlan {
    std::vector<Level> levels;
    /// 37x5: the forced first five columns of A2.
    BinaryMatrix fixed_columns;
    /// A2 column sums 9-2k for all 19 columns.
    std::vector<int> column_sums;

    /// A2 rows covered by levels 0..l.
    int rows_through(std::size_t l) const { return levels.at(l).last(); }
};

/// Forces the first five A2 columns from the column sums and row order, then
/// groups rows by their five-column prefix, zero prefix last. Throws InputError
/// unless the first A1 row is 1^5 0^14, InfeasibleCase when the forced columns
/// need more than 37 rows.
LevelPlan build_level_plan(const BinaryMatrix& a1);

/// A2 search formula over a 43x19 grid: A1 rows and the forced columns are
/// fixed cells; A2 row sums 3, column sums 9-2k, no two rows meeting twice,
/// rows of a level in descending lex order.
struct A2Instance {
    Cnf cnf;
    /// Non-fixed cell variables of each A2 row.
    std::vector<std::vector<int>> free_cells;
};

A2Instance build_a2_instance(const BinaryMatrix& a1, const LevelPlan& plan);

/// A1 rows followed by the first `a2_rows` A2 rows, read from a model.
BinaryMatrix assembly_from_model(const A2Instance& inst, std::span<const std::uint8_t> model, int a2_rows);

/// Row bands of a partial assembly: A1 fixed, the A2 rows resortable.
BandStructure assembly_bands(int a2_rows, int cols = 19);

using SolverFactory = std::function<Solver(const Cnf&)>;

struct DiscardedEntry {
    std::size_t level = 0;
    BinaryMatrix partial;  // assembly of A1 and the rows of levels 0..level
    std::size_t representative = 0;
    IsoWitness witness;
};

struct LevelStats {
    std::size_t level = 0;
    std::size_t parents = 0;
    std::size_t models = 0;
    std::size_t recorded = 0;
    std::size_t discarded = 0;
    bool certified = false;
};

struct GenerationLog {
    /// Recorded partial assemblies per level; the last level holds full A2s.
    std::vector<std::vector<BinaryMatrix>> level_reps;
    std::vector<std::vector<CanonicalCertificate>> level_certs;
    std::vector<DiscardedEntry> discarded;
    std::vector<LevelStats> levels;

    /// Final recorded A2s (37x19), one per equivalence class.
    std::vector<BinaryMatrix> recorded_a2s() const;
    const std::vector<CanonicalCertificate>& final_certificates() const { return level_certs.back(); }
    /// Representatives of every level, then one record per discarded entry
    /// with its witness.
    std::vector<SolutionRecord> records(int case_id) const;
};

struct GenerationOptions {
    SolverFactory factory;  // default: Solver::from_cnf with default options
    /// Check each level's DRAT proof: the formula plus that level's blocking
    /// clauses must yield the negation of every parent's assumptions.
    bool certify = false;
    bool keep_discarded = true;
    std::function<void(const LevelStats&)> on_level;
};

/// Level-by-level recorded-objects generation. Every representative of level
/// l-1 is extended by all completions of level l; a completion is canonically
/// labelled only after its level is complete, recorded if its certificate is
/// new and otherwise discarded with a verified witness. Throws IntegrityError
/// when a repeated certificate comes without a valid witness or a level
/// certificate fails.
GenerationLog generate_levelwise(const BinaryMatrix& a1, const LevelPlan& plan, const GenerationOptions& opts = {});

struct LexOnlyOptions {
    SolverFactory factory;
    bool keep = true;           // store the A2s
    bool canonicalize = false;  // also collect their distinct certificates
    bool certify = false;       // check the augmented-UNSAT proof
    std::function<void(const BinaryMatrix&)> on_a2;
};

struct LexOnlyResult {
    std::size_t total = 0;
    std::vector<BinaryMatrix> a2s;
    std::vector<CanonicalCertificate> certificates;  // sorted, distinct
    bool certified = false;
};

/// Every A2 with rows in descending lex order, no other symmetry removal.
LexOnlyResult enumerate_lex_only(const BinaryMatrix& a1, const LevelPlan& plan, const LexOnlyOptions& opts = {});

/// True iff no recorded A2 lies in the orbit of another under the A1 symmetry
/// group. Uses only the group action, no certificates.
bool verify_mutual_nonisomorphism(const SymmetryGroup& a1_group, const std::vector<BinaryMatrix>& recorded);

} // namespace lam
