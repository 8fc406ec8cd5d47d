#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lam {

/// Rectangular 0/1 matrix stored row-major, one byte per cell.
class BinaryMatrix {
public:
    BinaryMatrix() = default;
    BinaryMatrix(std::size_t rows, std::size_t cols);

    /// Builds a matrix from equal-length strings of '0'/'1'.
    static BinaryMatrix from_strings(std::span<const std::string> rows);
    static BinaryMatrix from_strings(std::initializer_list<std::string_view> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return cells_.empty(); }

    bool at(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c] != 0; }
    void set(std::size_t r, std::size_t c, bool v) { cells_[r * cols_ + c] = v ? 1 : 0; }

    std::span<const std::uint8_t> row(std::size_t r) const {
        return {cells_.data() + r * cols_, cols_};
    }
    std::vector<std::uint8_t> column(std::size_t c) const;

    std::size_t row_sum(std::size_t r) const;
    std::size_t col_sum(std::size_t c) const;
    std::size_t ones() const;

    /// Number of columns where rows r1 and r2 both hold a 1.
    std::size_t row_overlap(std::size_t r1, std::size_t r2) const;
    std::size_t col_overlap(std::size_t c1, std::size_t c2) const;

    /// Positions of the 1s in a row or column.
    std::vector<std::size_t> row_support(std::size_t r) const;
    std::vector<std::size_t> col_support(std::size_t c) const;

    BinaryMatrix transposed() const;
    BinaryMatrix sub(std::size_t r0, std::size_t nrows, std::size_t c0, std::size_t ncols) const;
    BinaryMatrix rows_range(std::size_t r0, std::size_t nrows) const { return sub(r0, nrows, 0, cols_); }

    /// Vertical concatenation; column counts must agree.
    static BinaryMatrix stack(const BinaryMatrix& top, const BinaryMatrix& bottom);

    /// result(row_perm[i], col_perm[j]) = this(i, j).
    BinaryMatrix permuted(std::span<const int> row_perm, std::span<const int> col_perm) const;

    /// Rows in [r0, r0+n) sorted into descending lexicographic order (1 > 0).
    void sort_rows_desc(std::size_t r0, std::size_t n);
    void sort_rows_desc() { sort_rows_desc(0, rows_); }

    /// Lexicographic comparison of two rows, 1 > 0.
    std::strong_ordering compare_rows(std::size_t r1, std::size_t r2) const;
    bool rows_sorted_desc(std::size_t r0, std::size_t n) const;

    std::vector<std::string> to_strings() const;
    std::string to_string() const;

    /// Row-major bit string packed into bytes, used as a hashable key.
    std::string packed() const;

    std::span<const std::uint8_t> cells() const noexcept { return cells_; }

    friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;
    /// Orders by shape, then row-major cell string.
    friend std::strong_ordering operator<=>(const BinaryMatrix& a, const BinaryMatrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> cells_;
};

struct BinaryMatrixHash {
    std::size_t operator()(const BinaryMatrix& m) const noexcept;
};

/// Order-n projective plane dimensions.
struct PlaneParams {
    int order = 0;

    static PlaneParams of_order(int n);
    int side() const noexcept { return order * order + order + 1; }
    int line_size() const noexcept { return order + 1; }
};

} // namespace lam
