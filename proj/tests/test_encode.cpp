#include "lam/encode.hpp"
#include "lam/errors.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace lam;

namespace {

std::vector<int> all_cells(const Cnf& f) { return oracle::iota(1, f.cell_var_count()); }

BinaryMatrix from_bits(const std::vector<std::uint8_t>& bits, std::size_t rows, std::size_t cols) {
    BinaryMatrix m(rows, cols);
    for (std::size_t i = 0; i < bits.size(); ++i) m.set(i / cols, i % cols, bits[i] != 0);
    return m;
}

std::vector<std::uint8_t> bits_of(std::uint64_t mask, std::size_t n) {
    std::vector<std::uint8_t> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = (mask >> i) & 1u;
    return b;
}

} // namespace

TEST(Quadruple, TwoByTwoGivesOneClause) {
    auto f = Cnf::with_cells(2, 2);
    EXPECT_EQ(add_quadruple_clauses(f, oracle::iota(0, 2), oracle::iota(0, 2)), 1u);
    EXPECT_EQ(f.clause_count(), 1u);
}

TEST(Quadruple, A1CountMatchesFormula) {
    auto f = Cnf::with_cells(6, 19);
    auto n = add_quadruple_clauses(f, oracle::iota(0, 6), oracle::iota(0, 19));
    EXPECT_EQ(n, oracle::binomial(6, 2) * oracle::binomial(19, 2));
    EXPECT_EQ(n, 2565u);
}

TEST(Quadruple, ToyModelsAreMatricesWithSingleOverlaps) {
    auto f = Cnf::with_cells(3, 4);
    add_quadruple_clauses(f, oracle::iota(0, 3), oracle::iota(0, 4));
    auto models = oracle::projected_models(f, all_cells(f));
    std::size_t expected = 0;
    for (std::uint64_t m = 0; m < (1u << 12); ++m) {
        auto bits = bits_of(m, 12);
        auto mat = from_bits(bits, 3, 4);
        bool ok = mat.row_overlap(0, 1) <= 1 && mat.row_overlap(0, 2) <= 1 && mat.row_overlap(1, 2) <= 1;
        EXPECT_EQ(ok, models.count(bits) == 1) << mat.to_string();
        expected += ok;
    }
    EXPECT_EQ(models.size(), expected);
}

TEST(Quadruple, FixedSharedOneLeavesShortClauses) {
    auto f = Cnf::with_cells(3, 4);
    f.set_prune_fixed(true);
    f.fix_cell(0, 0, true);
    f.fix_cell(1, 0, true);
    add_quadruple_clauses(f, oracle::iota(0, 3), oracle::iota(0, 4));
    // rows 0 and 1 may not share any other column
    for (std::size_t j = 1; j < 4; ++j) {
        bool found = false;
        for (std::size_t i = 0; i < f.clause_count(); ++i) {
            auto c = f.clause(i);
            if (c.size() == 2 && c[0] == -f.cell(0, j) && c[1] == -f.cell(1, j)) found = true;
        }
        EXPECT_TRUE(found) << j;
    }
    auto models = oracle::projected_models(f, all_cells(f));
    for (std::uint64_t m = 0; m < (1u << 12); ++m) {
        auto bits = bits_of(m, 12);
        auto mat = from_bits(bits, 3, 4);
        bool ok = mat.at(0, 0) && mat.at(1, 0) && mat.row_overlap(0, 1) <= 1 &&
                  mat.row_overlap(0, 2) <= 1 && mat.row_overlap(1, 2) <= 1;
        EXPECT_EQ(ok, models.count(bits) == 1);
    }
}

TEST(Quadruple, MissingCellThrows) {
    BinaryMatrix mask(2, 2);
    mask.set(0, 0, true);
    auto f = Cnf::with_cells(mask);
    EXPECT_THROW(add_quadruple_clauses(f, oracle::iota(0, 2), oracle::iota(0, 2)), EncodingError);
}

TEST(ExactlyK, ExactlyOneOfThree) {
    auto f = Cnf::with_cells(1, 3);
    add_exactly_k(f, all_cells(f), 1);
    auto models = oracle::projected_models(f, all_cells(f));
    std::set<std::vector<std::uint8_t>> want{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    EXPECT_EQ(models, want);
}

TEST(ExactlyK, SaturatedForcesAll) {
    auto f = Cnf::with_cells(1, 5);
    auto aux = add_exactly_k(f, all_cells(f), 5);
    EXPECT_TRUE(aux.empty());
    auto models = oracle::projected_models(f, all_cells(f));
    ASSERT_EQ(models.size(), 1u);
    EXPECT_EQ(*models.begin(), std::vector<std::uint8_t>(5, 1));
}

TEST(ExactlyK, AllBoundsOnEightVariables) {
    for (int k = 0; k <= 8; ++k) {
        auto f = Cnf::with_cells(1, 8);
        add_exactly_k(f, all_cells(f), k);
        auto models = oracle::projected_models(f, all_cells(f));
        EXPECT_EQ(models.size(), oracle::binomial(8, k)) << k;
        for (const auto& m : models) EXPECT_EQ(std::count(m.begin(), m.end(), 1), k);
        // auxiliaries are functions of the inputs: one full model per projection
        EXPECT_EQ(oracle::count_models(f), oracle::binomial(8, k)) << k;
    }
}

TEST(ExactlyK, OutOfRangeThrows) {
    auto f = Cnf::with_cells(1, 3);
    EXPECT_THROW(add_exactly_k(f, all_cells(f), 4), EncodingError);
    EXPECT_THROW(add_exactly_k(f, all_cells(f), -1), EncodingError);
}

TEST(Lex, SingleBitIsOneClause) {
    auto f = Cnf::with_cells(2, 1);
    std::vector<Lit> a{f.cell(0, 0)}, b{f.cell(1, 0)};
    auto aux = add_lex_geq(f, a, b);
    EXPECT_TRUE(aux.empty());
    ASSERT_EQ(f.clause_count(), 1u);
    auto c = f.clause(0);
    EXPECT_EQ(std::vector<Lit>(c.begin(), c.end()), (std::vector<Lit>{a[0], -b[0]}));
}

TEST(Lex, FixedUpperVector) {
    auto f = Cnf::with_cells(2, 3);
    std::vector<Lit> a{f.cell(0, 0), f.cell(0, 1), f.cell(0, 2)};
    std::vector<Lit> b{f.cell(1, 0), f.cell(1, 1), f.cell(1, 2)};
    add_lex_geq(f, a, b);
    f.fix_cell(0, 0, false);
    f.fix_cell(0, 1, true);
    f.fix_cell(0, 2, false);
    auto models = oracle::projected_models(f, b);
    std::set<std::vector<std::uint8_t>> want{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
    EXPECT_EQ(models, want);
}

TEST(Lex, AdjacentRowsGiveSortedMatrices) {
    auto f = Cnf::with_cells(4, 3);
    for (std::size_t r = 0; r + 1 < 4; ++r) {
        std::vector<Lit> a, b;
        for (std::size_t c = 0; c < 3; ++c) {
            a.push_back(f.cell(r, c));
            b.push_back(f.cell(r + 1, c));
        }
        add_lex_geq(f, a, b);
    }
    auto models = oracle::projected_models(f, all_cells(f));
    std::size_t sorted = 0;
    for (std::uint64_t m = 0; m < (1u << 12); ++m) {
        auto bits = bits_of(m, 12);
        auto mat = from_bits(bits, 4, 3);
        bool ok = mat.rows_sorted_desc(0, 4);
        EXPECT_EQ(ok, models.count(bits) == 1);
        sorted += ok;
    }
    // non-increasing sequences of four 3-bit values
    EXPECT_EQ(sorted, oracle::binomial(8 + 4 - 1, 4));
}

TEST(Lex, LengthMismatchThrows) {
    auto f = Cnf::with_cells(1, 3);
    std::vector<Lit> a{1, 2}, b{3};
    EXPECT_THROW(add_lex_geq(f, a, b), EncodingError);
}

TEST(SpecialLexColumn, ClauseCountIsTripleCount) {
    auto f = Cnf::with_cells(43, 2);
    std::vector<int> block{0, 1};
    auto n = add_special_lex_column(f, block, 0, RowRange{6, 43});
    EXPECT_EQ(n, oracle::binomial(37, 3));
    std::size_t direct = 0;
    for (int a = 6; a < 43; ++a)
        for (int b = a + 1; b < 43; ++b)
            for (int c = b + 1; c < 43; ++c) ++direct;
    EXPECT_EQ(n, direct);
}

TEST(SpecialLexColumn, FinalColumnRejected) {
    auto f = Cnf::with_cells(43, 2);
    std::vector<int> block{0, 1};
    EXPECT_THROW(add_special_lex_column(f, block, 1, RowRange{6, 43}), EncodingError);
}

TEST(SpecialLexColumn, FixedOnesGiveUnit) {
    auto f = Cnf::with_cells(43, 2);
    f.set_prune_fixed(true);
    for (std::size_t r = 6; r < 43; ++r) f.fix_cell(r, 0, r == 7 || r == 11);
    std::vector<int> block{0, 1};
    add_special_lex_column(f, block, 0, RowRange{6, 43});
    bool unit = false;
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
        auto c = f.clause(i);
        if (f.origin(i) == ClauseOrigin::lex_special_col && c.size() == 1 && c[0] == -f.cell(6, 1)) unit = true;
    }
    EXPECT_TRUE(unit);
    EXPECT_EQ(f.count(ClauseOrigin::lex_special_col), 1u);
}

TEST(SpecialLexColumn, ToyBlockPlacements) {
    const std::size_t rows = 5;
    auto f = Cnf::with_cells(rows, 2);
    for (std::size_t c = 0; c < 2; ++c) {
        std::vector<Lit> col;
        for (std::size_t r = 0; r < rows; ++r) col.push_back(f.cell(r, c));
        add_exactly_k(f, col, 2);
    }
    for (std::size_t r = 0; r < rows; ++r) f.add_clause({-f.cell(r, 0), -f.cell(r, 1)}, ClauseOrigin::external);
    std::vector<int> block{0, 1};
    add_special_lex_column(f, block, 0, RowRange{0, static_cast<int>(rows)});
    auto models = oracle::projected_models(f, all_cells(f));
    std::size_t expected = 0;
    for (std::uint64_t m = 0; m < (1u << (2 * rows)); ++m) {
        auto bits = bits_of(m, 2 * rows);
        auto mat = from_bits(bits, rows, 2);
        auto t = mat.transposed();
        bool ok = t.row_sum(0) == 2 && t.row_sum(1) == 2 && t.row_overlap(0, 1) == 0 &&
                  t.compare_rows(0, 1) == std::strong_ordering::greater;
        EXPECT_EQ(ok, models.count(bits) == 1);
        expected += ok;
    }
    EXPECT_EQ(expected, 15u);
    EXPECT_EQ(models.size(), expected);
}

TEST(SpecialLexRows, DisjointRowsOrdered) {
    auto f = Cnf::with_cells(2, 4);
    std::vector<int> cols{0, 1, 2, 3};
    for (std::size_t c = 0; c < 4; ++c) f.add_clause({-f.cell(0, c), -f.cell(1, c)}, ClauseOrigin::external);
    add_special_lex_rows(f, 0, 1, cols);
    auto models = oracle::projected_models(f, all_cells(f));
    for (std::uint64_t m = 0; m < 256; ++m) {
        auto bits = bits_of(m, 8);
        auto mat = from_bits(bits, 2, 4);
        bool ok = mat.row_overlap(0, 1) == 0 && mat.compare_rows(0, 1) != std::strong_ordering::less;
        EXPECT_EQ(ok, models.count(bits) == 1) << mat.to_string();
    }
}

TEST(Incidence, SingleKnownColumn) {
    auto f = Cnf::with_cells(10, 4);
    AssemblyContext ctx;
    ctx.columns_known = {{1, 4, 8}};
    std::vector<int> target{3};
    auto n = add_incidence_clauses(f, ctx, target, {}, {});
    EXPECT_EQ(n.column_clauses, 1u);
    auto c = f.clause(0);
    EXPECT_EQ(std::vector<Lit>(c.begin(), c.end()),
              (std::vector<Lit>{f.cell(1, 3), f.cell(4, 3), f.cell(8, 3)}));
}

TEST(Incidence, ProductCount) {
    auto f = Cnf::with_cells(111, 49);
    AssemblyContext ctx;
    for (int j = 0; j < 19; ++j) ctx.columns_known.push_back({j, j + 20});
    auto target = oracle::iota(19, 30);
    auto n = add_incidence_clauses(f, ctx, target, {}, {});
    EXPECT_EQ(n.column_clauses, 570u);
}

TEST(Incidence, EmptyKnownSetThrows) {
    auto f = Cnf::with_cells(4, 4);
    AssemblyContext ctx;
    ctx.columns_known = {{}};
    std::vector<int> target{1};
    EXPECT_THROW(add_incidence_clauses(f, ctx, target, {}, {}), EncodingError);
    ctx.columns_known.clear();
    ctx.rows_known = {{}};
    std::vector<int> blocks{0}, rows{1};
    EXPECT_THROW(add_incidence_clauses(f, ctx, {}, blocks, rows), EncodingError);
}

TEST(Incidence, ToyTwoLinesMeetEveryNewLine) {
    // Known lines (columns 0,1) through points {0,1} and {2,3}; new lines are
    // columns 2,3 and rows 4,5 hold a known block row.
    auto f = Cnf::with_cells(6, 4);
    AssemblyContext ctx;
    ctx.columns_known = {{0, 1}, {2, 3}};
    ctx.rows_known = {{0, 1}};
    std::vector<int> target{2, 3}, blocks{0}, rows{4, 5};
    add_incidence_clauses(f, ctx, target, blocks, rows);
    std::vector<int> proj;
    for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t c = 0; c < 4; ++c) proj.push_back(f.cell(r, c));
    // restrict the oracle to the variables the clauses mention
    std::vector<int> used;
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 2; c < 4; ++c) used.push_back(f.cell(r, c));
    for (std::size_t r = 4; r < 6; ++r)
        for (std::size_t c = 0; c < 2; ++c) used.push_back(f.cell(r, c));
    auto models = oracle::projected_models(f, used);
    std::size_t ok_count = 0;
    for (std::uint64_t m = 0; m < (1u << used.size()); ++m) {
        auto bits = bits_of(m, used.size());
        auto at = [&](std::size_t r, std::size_t c) {
            auto v = f.cell(r, c);
            auto it = std::find(used.begin(), used.end(), v);
            return bits[static_cast<std::size_t>(it - used.begin())] != 0;
        };
        bool ok = true;
        for (std::size_t c = 2; c < 4; ++c) ok = ok && (at(0, c) || at(1, c)) && (at(2, c) || at(3, c));
        for (std::size_t r = 4; r < 6; ++r) ok = ok && (at(r, 0) || at(r, 1));
        EXPECT_EQ(ok, models.count(bits) == 1);
        ok_count += ok;
    }
    EXPECT_EQ(models.size(), ok_count);
}

TEST(Blocking, TwoTrueCells) {
    auto f = Cnf::with_cells(2, 3);
    std::vector<int> cells{f.cell(0, 0), f.cell(1, 2)};
    add_blocking_clause(f, cells);
    auto c = f.clause(0);
    EXPECT_EQ(std::vector<Lit>(c.begin(), c.end()), (std::vector<Lit>{-f.cell(0, 0), -f.cell(1, 2)}));
    EXPECT_EQ(f.origin(0), ClauseOrigin::blocking);
}

TEST(Blocking, GuardsEmptyAndAuxiliary) {
    auto f = Cnf::with_cells(2, 3);
    EXPECT_THROW(add_blocking_clause(f, {}), EncodingError);
    int aux = f.new_aux();
    std::vector<int> cells{aux};
    EXPECT_THROW(add_blocking_clause(f, cells), EncodingError);
}

TEST(Dimacs, SmallestInstance) {
    auto f = Cnf::with_vars(1);
    f.add_clause({1}, ClauseOrigin::external);
    std::ostringstream out;
    auto bytes = emit_dimacs(f, out);
    EXPECT_EQ(out.str(), "p cnf 1 1\n1 0\n");
    EXPECT_EQ(bytes, out.str().size());
}

TEST(Dimacs, RoundTripAndDeterminism) {
    auto build = [] {
        auto f = Cnf::with_cells(6, 19);
        add_quadruple_clauses(f, oracle::iota(0, 6), oracle::iota(0, 19));
        for (std::size_t r = 0; r < 6; ++r) {
            std::vector<Lit> row;
            for (std::size_t c = 0; c < 19; ++c) row.push_back(f.cell(r, c));
            add_exactly_k(f, row, 5);
        }
        return f;
    };
    auto f = build();
    std::ostringstream a, b;
    emit_dimacs(f, a);
    emit_dimacs(build(), b);
    EXPECT_EQ(a.str(), b.str());
    std::istringstream in(a.str());
    auto g = parse_dimacs(in);
    EXPECT_TRUE(f.same_clauses(g));
    std::ostringstream tags;
    write_origin_tags(f, tags);
    std::istringstream tin(tags.str());
    auto t = read_origin_tags(tin);
    ASSERT_EQ(t.size(), f.clause_count());
    EXPECT_EQ(t.front(), ClauseOrigin::quadruple);
    EXPECT_EQ(t.back(), ClauseOrigin::cardinality);
}

TEST(Dimacs, MalformedInputReportsLine) {
    std::istringstream in("p cnf 2 1\n1 x 0\n");
    try {
        parse_dimacs(in);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}
