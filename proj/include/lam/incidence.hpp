#pragma once

#include "lam/matrix.hpp"

#include <array>
#include <string>
#include <vector>

namespace lam {

struct AxiomReport {
    bool ok = true;
    std::vector<std::string> violations;

    explicit operator bool() const noexcept { return ok; }
};

/// Checks row/column sums n+1 and that every two distinct rows and every two
/// distinct columns share exactly one 1. Throws InputError on a shape mismatch.
AxiomReport verify_plane_axioms(const BinaryMatrix& m, PlaneParams p);

/// Layout of the 111x111 incidence matrix of an order-10 plane that contains a
/// primitive weight-19 codeword. Rows split 6/37/68, columns 19/92.
namespace layout {

inline constexpr int kA1Rows = 6;
inline constexpr int kA2Rows = 37;
inline constexpr int kA3Rows = 68;
inline constexpr int kWordCols = 19;
inline constexpr int kOffCols = 92;
inline constexpr int kSide = 111;
inline constexpr int kA2First = kA1Rows;            // row 7 in 1-based numbering
inline constexpr int kA3First = kA1Rows + kA2Rows;  // row 44

struct BandSums {
    int top;
    int middle;
    int bottom;
};

inline constexpr BandSums kWordRowSums{5, 3, 1};
inline constexpr BandSums kOffRowSums{6, 8, 10};

/// Column sums of a word column whose A1 column holds k ones.
constexpr BandSums word_column_sums(int k) { return {k, 9 - 2 * k, k + 2}; }
/// Column sums of an off-word column whose A4 column holds k ones.
constexpr BandSums off_column_sums(int k) { return {k, 4 - 2 * k, k + 7}; }

} // namespace layout

/// Column sums of A1 (the per-column k values). Throws InputError unless
/// every k lies in 0..4.
std::vector<int> word_column_classes(const BinaryMatrix& a1);

/// Throws InputError unless a1 is 6x19 with row sums 5 and pairwise row overlap at most 1.
void require_valid_a1(const BinaryMatrix& a1);

/// The unique 68x19 A3: weight-1 rows, k+2 of them per column, sorted.
/// Throws InfeasibleCase when a2 leaves a column deficit different from k+2.
BinaryMatrix complete_a3(const BinaryMatrix& a1, const BinaryMatrix& a2);

/// A3 implied by A1 alone, assuming A2 meets its column sums exactly.
BinaryMatrix forced_a3(const BinaryMatrix& a1);

enum class A4ColumnKind { pair, single, outside };

struct A4Column {
    A4ColumnKind kind = A4ColumnKind::outside;
    int first = -1;   // block (A1 row, 0-based) holding a 1
    int second = -1;  // second block for pair columns
};

struct A4Completion {
    BinaryMatrix a4;  // 6x92
    std::vector<A4Column> columns;

    std::size_t pair_count() const;
    /// A4-local indices of columns with a 1 in row `block`.
    std::vector<int> block_columns(int block) const;
    /// A4-local indices of the column-sum-1 columns of `block`, in order.
    std::vector<int> single_columns(int block) const;
    std::vector<int> outside_columns() const;
    /// Number of pair columns touching the block.
    int intersections(int block) const;
    /// Blocks that share a pair column with `block`.
    std::vector<int> neighbours(int block) const;
};

/// The unique A4 for a1: pair columns (one per pair of A1 rows that do not meet
/// in the word columns, pair-lex order), then single columns block by block,
/// then all-zero outside columns.
A4Completion complete_a4(const BinaryMatrix& a1);

/// Known entries of the full 111x111 matrix, plus the C_j / R_i index sets.
struct AssemblyContext {
    BinaryMatrix assembled;  // 111x111, 0 where unknown
    BinaryMatrix known;      // 1 where the entry is fixed
    std::vector<std::vector<int>> columns_known;  // C_j for j < 19
    std::vector<std::vector<int>> rows_known;     // R_i for i < 6

    bool is_known(int r, int c) const { return known.at(r, c); }
    bool value(int r, int c) const { return assembled.at(r, c); }
};

/// a2 rows appear in the given order (already reordered if needed).
AssemblyContext build_assembly_context(const BinaryMatrix& a1, const BinaryMatrix& a2,
                                       const BinaryMatrix& a3, const A4Completion& a4);

} // namespace lam
