#include "lam/incidence.hpp"

#include "lam/errors.hpp"

#include <algorithm>

namespace lam {

AxiomReport verify_plane_axioms(const BinaryMatrix& m, PlaneParams p) {
    const auto side = static_cast<std::size_t>(p.side());
    if (m.rows() != side || m.cols() != side)
        throw InputError("incidence matrix must be " + std::to_string(side) + "x" +
                         std::to_string(side));
    AxiomReport rep;
    auto fail = [&](std::string msg) {
        rep.ok = false;
        rep.violations.push_back(std::move(msg));
    };
    const auto line = static_cast<std::size_t>(p.line_size());
    for (std::size_t r = 0; r < side; ++r)
        if (m.row_sum(r) != line)
            fail("row " + std::to_string(r + 1) + " sum " + std::to_string(m.row_sum(r)));
    for (std::size_t c = 0; c < side; ++c)
        if (m.col_sum(c) != line)
            fail("column " + std::to_string(c + 1) + " sum " + std::to_string(m.col_sum(c)));
    for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = a + 1; b < side; ++b) {
            if (auto o = m.row_overlap(a, b); o != 1)
                fail("rows " + std::to_string(a + 1) + "," + std::to_string(b + 1) + " meet " +
                     std::to_string(o) + " times");
            if (auto o = m.col_overlap(a, b); o != 1)
                fail("columns " + std::to_string(a + 1) + "," + std::to_string(b + 1) + " meet " +
                     std::to_string(o) + " times");
        }
    return rep;
}

void require_valid_a1(const BinaryMatrix& a1) {
    if (a1.rows() != layout::kA1Rows || a1.cols() != layout::kWordCols)
        throw InputError("A1 must be 6x19");
    for (std::size_t r = 0; r < a1.rows(); ++r)
        if (a1.row_sum(r) != 5) throw InputError("A1 row sums must be 5");
    for (std::size_t a = 0; a < a1.rows(); ++a)
        for (std::size_t b = a + 1; b < a1.rows(); ++b)
            if (a1.row_overlap(a, b) > 1) throw InputError("A1 rows meet more than once");
}

std::vector<int> word_column_classes(const BinaryMatrix& a1) {
    if (a1.cols() != layout::kWordCols) throw InputError("A1 must have 19 columns");
    std::vector<int> ks(a1.cols());
    for (std::size_t c = 0; c < a1.cols(); ++c) {
        ks[c] = static_cast<int>(a1.col_sum(c));
        if (ks[c] > 4) throw InputError("word column with k > 4");
    }
    return ks;
}

namespace {

BinaryMatrix singleton_rows(const std::vector<int>& per_column, std::size_t expected_rows) {
    std::size_t total = 0;
    for (int d : per_column) total += static_cast<std::size_t>(d);
    if (total != expected_rows)
        throw InfeasibleCase("A3 would need " + std::to_string(total) + " rows, not " +
                             std::to_string(expected_rows));
    BinaryMatrix a3(expected_rows, per_column.size());
    std::size_t r = 0;
    // Descending lex order: rows with a 1 in column 0 come first.
    for (std::size_t c = 0; c < per_column.size(); ++c)
        for (int i = 0; i < per_column[c]; ++i) a3.set(r++, c, true);
    return a3;
}

} // namespace

BinaryMatrix complete_a3(const BinaryMatrix& a1, const BinaryMatrix& a2) {
    require_valid_a1(a1);
    if (a2.rows() != layout::kA2Rows || a2.cols() != layout::kWordCols)
        throw InputError("A2 must be 37x19");
    auto ks = word_column_classes(a1);
    std::vector<int> deficit(ks.size());
    for (std::size_t c = 0; c < ks.size(); ++c) {
        const int have = ks[c] + static_cast<int>(a2.col_sum(c));
        deficit[c] = 11 - have;
        if (deficit[c] != layout::word_column_sums(ks[c]).bottom)
            throw InfeasibleCase("column " + std::to_string(c + 1) + " of A2 has sum " +
                                 std::to_string(a2.col_sum(c)) + ", expected " +
                                 std::to_string(layout::word_column_sums(ks[c]).middle));
    }
    return singleton_rows(deficit, layout::kA3Rows);
}

BinaryMatrix forced_a3(const BinaryMatrix& a1) {
    require_valid_a1(a1);
    auto ks = word_column_classes(a1);
    std::vector<int> per(ks.size());
    for (std::size_t c = 0; c < ks.size(); ++c) per[c] = layout::word_column_sums(ks[c]).bottom;
    return singleton_rows(per, layout::kA3Rows);
}

std::size_t A4Completion::pair_count() const {
    return static_cast<std::size_t>(std::count_if(columns.begin(), columns.end(), [](const A4Column& c) {
        return c.kind == A4ColumnKind::pair;
    }));
}

std::vector<int> A4Completion::block_columns(int block) const {
    std::vector<int> out;
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (columns[c].first == block || columns[c].second == block) out.push_back(static_cast<int>(c));
    return out;
}

std::vector<int> A4Completion::single_columns(int block) const {
    std::vector<int> out;
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (columns[c].kind == A4ColumnKind::single && columns[c].first == block)
            out.push_back(static_cast<int>(c));
    return out;
}

std::vector<int> A4Completion::outside_columns() const {
    std::vector<int> out;
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (columns[c].kind == A4ColumnKind::outside) out.push_back(static_cast<int>(c));
    return out;
}

int A4Completion::intersections(int block) const {
    int n = 0;
    for (const auto& c : columns)
        if (c.kind == A4ColumnKind::pair && (c.first == block || c.second == block)) ++n;
    return n;
}

std::vector<int> A4Completion::neighbours(int block) const {
    std::vector<int> out;
    for (const auto& c : columns) {
        if (c.kind != A4ColumnKind::pair) continue;
        if (c.first == block) out.push_back(c.second);
        if (c.second == block) out.push_back(c.first);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

A4Completion complete_a4(const BinaryMatrix& a1) {
    require_valid_a1(a1);
    A4Completion out;
    out.a4 = BinaryMatrix(layout::kA1Rows, layout::kOffCols);
    out.columns.resize(layout::kOffCols);
    std::array<int, layout::kA1Rows> used{};
    int col = 0;
    for (int i = 0; i < layout::kA1Rows; ++i)
        for (int j = i + 1; j < layout::kA1Rows; ++j) {
            if (a1.row_overlap(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) != 0) continue;
            out.a4.set(static_cast<std::size_t>(i), static_cast<std::size_t>(col), true);
            out.a4.set(static_cast<std::size_t>(j), static_cast<std::size_t>(col), true);
            out.columns[static_cast<std::size_t>(col)] = {A4ColumnKind::pair, i, j};
            ++used[static_cast<std::size_t>(i)];
            ++used[static_cast<std::size_t>(j)];
            ++col;
        }
    for (int i = 0; i < layout::kA1Rows; ++i)
        for (int n = used[static_cast<std::size_t>(i)]; n < layout::kOffRowSums.top; ++n) {
            out.a4.set(static_cast<std::size_t>(i), static_cast<std::size_t>(col), true);
            out.columns[static_cast<std::size_t>(col)] = {A4ColumnKind::single, i, -1};
            ++col;
        }
    // remaining columns stay outside
    return out;
}

AssemblyContext build_assembly_context(const BinaryMatrix& a1, const BinaryMatrix& a2,
                                       const BinaryMatrix& a3, const A4Completion& a4) {
    using namespace layout;
    if (a1.rows() != kA1Rows || a2.rows() != kA2Rows || a3.rows() != kA3Rows ||
        a4.a4.rows() != kA1Rows || a4.a4.cols() != kOffCols)
        throw InputError("band shapes do not match the 6/37/68 x 19/92 layout");
    AssemblyContext ctx;
    ctx.assembled = BinaryMatrix(kSide, kSide);
    ctx.known = BinaryMatrix(kSide, kSide);
    auto place = [&](const BinaryMatrix& m, int r0, int c0) {
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c) {
                ctx.assembled.set(r0 + r, c0 + c, m.at(r, c));
                ctx.known.set(r0 + r, c0 + c, true);
            }
    };
    place(a1, 0, 0);
    place(a2, kA2First, 0);
    place(a3, kA3First, 0);
    place(a4.a4, 0, kWordCols);
    for (int j = 0; j < kWordCols; ++j) {
        std::vector<int> cj;
        for (int r = 0; r < kSide; ++r)
            if (ctx.assembled.at(r, j)) cj.push_back(r);
        ctx.columns_known.push_back(std::move(cj));
    }
    for (int i = 0; i < kA1Rows; ++i) {
        std::vector<int> ri;
        for (int c = 0; c < kSide; ++c)
            if (ctx.assembled.at(i, c)) ri.push_back(c);
        ctx.rows_known.push_back(std::move(ri));
    }
    return ctx;
}

} // namespace lam
