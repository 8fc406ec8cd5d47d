#pragma once

#include "lam/canon.hpp"
#include "lam/certs.hpp"
#include "lam/cnf.hpp"
#include "lam/encode.hpp"
#include "lam/incidence.hpp"
#include "lam/isogen.hpp"
#include "lam/solver.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lam {

inline constexpr int kCaseCount = 66;

enum class Exclusion { none, no_a2s, weight16, theoretical };

std::string_view exclusion_name(Exclusion e);
/// Static exclusion lists; throws InputError outside 1..66.
Exclusion case_exclusion(int case_id);
/// Literature case number for each of our case ids (index case_id-1).
const std::array<int, kCaseCount>& literature_case_numbers();

struct CaseContext {
    int case_id = 0;
    BinaryMatrix a1;
    BinaryMatrix a3;  // forced by A1 alone
    A4Completion a4;  // column kinds double as the block labels
    std::optional<LevelPlan> level_plan;  // empty when the forced columns overflow A2
    SymmetryGroup symmetry;
    Exclusion excluded = Exclusion::none;
};

/// Builds the context of one A1 representative.
CaseContext make_case_context(int case_id, const BinaryMatrix& a1);

/// 6x19 grid: row sums 5, no two rows meeting twice, rows and columns in
/// descending lex order.
Cnf build_a1_cnf();

struct A1Options {
    SolverFactory factory;
    ProofSink* proof = nullptr;  // receives the enumeration proof
    bool check_counts = true;    // throw IntegrityError unless 3366 / 66
};

struct A1StageResult {
    Cnf cnf;
    std::vector<BinaryMatrix> solutions;  // enumeration order
    std::vector<std::size_t> class_of;    // solution -> case id - 1
    std::vector<CaseContext> cases;       // ordered by representative, lex-largest first
    /// One representative record per class ("a1-c<case>"), then one record
    /// with a witness for every other solution ("a1-s<index>").
    std::vector<SolutionRecord> records;
};

/// Enumerates every A1, canonicalizes, keeps the lex-largest member of each
/// class as its representative and numbers the classes in descending order of
/// representatives.
A1StageResult run_a1_stage(const A1Options& opts = {});

/// Cell variables of every true cell of a solution of the A1 formula.
std::vector<int> a1_true_cells(const Cnf& cnf, const BinaryMatrix& a1);

struct A2StageOptions {
    GenerationOptions generation;
    /// Also run cases excluded as weight-16 or theoretical. Cases in the no-A2
    /// list always run: their empty result is the claim being checked.
    bool run_excluded = false;
};

/// Levelwise generation for one case; nullopt when the case is skipped.
/// A case whose forced columns overflow A2 yields an empty log.
std::optional<GenerationLog> run_a2_stage(const CaseContext& c, const A2StageOptions& opts = {});

// ---- main stage -------------------------------------------------------------

enum class BlockMethod { inside, outside };

struct BlockSelection {
    BlockMethod method = BlockMethod::inside;
    std::vector<int> blocks;       // A1 rows (0-based) whose columns enter the instance
    std::vector<int> core_blocks;  // inside: most-intersecting blocks and their neighbours
    std::optional<int> ignored_block;
    std::optional<int> special_line;      // A2-local row, original order
    std::vector<int> special_blocks;      // blocks the special line passes through
    std::vector<int> outside_columns;     // A4-local, the special line's remaining points
    std::optional<int> dropped_block;

    /// Inside blocks plus the outside block, if any.
    int effective_blocks() const { return static_cast<int>(blocks.size()) + (outside_columns.empty() ? 0 : 1); }
};

/// Two or more column-sum-2 columns select the inside method.
BlockMethod block_method(const A4Completion& a4);

/// Blocks of A1 the A2 row does not meet in the word columns: the row must
/// pass through one column of each.
std::vector<int> blocks_hit(const BinaryMatrix& a1, const BinaryMatrix& a2, int row);

/// Throws InputError (wrong method) with fewer than two pair columns.
BlockSelection select_blocks_inside(const CaseContext& c, const BinaryMatrix& a2);
/// Throws InputError (wrong method) with more than one pair column.
BlockSelection select_blocks_outside(const CaseContext& c, const BinaryMatrix& a2);
BlockSelection select_blocks(const CaseContext& c, const BinaryMatrix& a2);

/// Greedy A2 order: the row through the most blocks (or the special line)
/// first, then repeatedly the row meeting most of the chosen rows in the word
/// columns. Lowest index on ties. Entry t is the original index of new row t.
std::vector<int> reorder_a2_rows(const BinaryMatrix& a1, const BinaryMatrix& a2,
                                 std::optional<int> first = std::nullopt);

/// Declarative description of a partial incidence instance. All coordinates
/// are in the assembly of ctx.
struct MainSpec {
    AssemblyContext ctx;
    std::vector<int> known_cols;     // fully known columns, the cells of C_j
    std::vector<int> instance_cols;  // unknown columns, in instance order
    std::vector<int> blocks;         // indices into ctx.rows_known
    std::vector<int> target_rows;    // rows that get incidence row clauses
    /// Exactly `sum` ones over sum_rows, per instance column (-1 = none).
    std::vector<int> column_sums;
    RowRange sum_rows;
    /// Within-block chains of columns ordered by their two 1s in lex_rows.
    std::vector<std::vector<int>> column_chains;
    RowRange lex_rows;
    /// Groups of rows with disjoint supports on row_lex_cols, in descending
    /// order over those columns (instance_cols when empty).
    std::vector<std::vector<int>> row_groups;
    std::vector<int> row_lex_cols;
    std::vector<std::pair<int, int>> forced_ones;
};

/// Cells: every row times known and instance columns; known entries fixed.
Cnf encode_main(const MainSpec& spec);

struct MainInstance {
    Cnf cnf;
    MainSpec spec;
    std::string a2_id;
    BlockSelection selection;
    std::vector<int> row_reordering;  // new A2 row -> original A2 row
};

/// The A2 rows are reordered before anything is encoded.
MainInstance build_main_instance(const CaseContext& c, const BinaryMatrix& a2, const BlockSelection& sel,
                                 std::string a2_id = {});
/// Instance over all six blocks plus the given outside columns (A4-local),
/// with the same row order as `base`.
MainSpec extended_spec(const CaseContext& c, const MainInstance& base);

enum class MainStatus { unsat, no_extension, signal, budget_exceeded };
std::string_view main_status_name(MainStatus s);

struct MainOptions {
    SolverFactory factory;
    std::uint64_t conflict_budget = 0;  // per solve call, 0 = none
    std::size_t cube_floor = 0;         // when over budget, split to this many free variables
    std::size_t cube_depth = 10;        // ... or at most this many literals per cube
    bool certify = true;
};

struct MainResult {
    MainStatus status = MainStatus::unsat;
    /// Unknown instance cells (assembly coordinates) and each completion's values.
    std::vector<std::pair<int, int>> cells;
    std::vector<std::vector<std::uint8_t>> completions;
    std::string enumeration_proof;  // text DRAT of the base enumeration
    std::string extension_proof;    // text DRAT of the assumption solves
    std::vector<std::vector<Lit>> derived;  // clause proved per completion
    bool enumeration_checked = false;
    bool extension_checked = false;
    std::optional<std::size_t> extending_completion;  // set with SIGNAL
    std::vector<Cube> cubes;  // set with budget_exceeded
};

/// Enumerates the base instance; every completion is then solved in the
/// extended instance under its values as assumptions. An extending completion
/// is reported as SIGNAL.
MainResult run_main_problem(const MainSpec& base, const MainSpec& extended, const MainOptions& opts = {});

MainResult run_main_stage(const CaseContext& c, const BinaryMatrix& a2, const MainOptions& opts = {});

} // namespace lam
