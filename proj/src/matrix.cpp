#include "lam/matrix.hpp"

#include "lam/errors.hpp"

#include <algorithm>
#include <numeric>

namespace lam {

BinaryMatrix::BinaryMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}

BinaryMatrix BinaryMatrix::from_strings(std::span<const std::string> rows) {
    if (rows.empty()) return {};
    BinaryMatrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols_) throw InputError("ragged matrix rows");
        for (std::size_t c = 0; c < m.cols_; ++c) {
            char ch = rows[r][c];
            if (ch != '0' && ch != '1') throw InputError("matrix cell must be 0 or 1");
            m.set(r, c, ch == '1');
        }
    }
    return m;
}

BinaryMatrix BinaryMatrix::from_strings(std::initializer_list<std::string_view> rows) {
    std::vector<std::string> tmp(rows.begin(), rows.end());
    return from_strings(std::span<const std::string>(tmp));
}

std::vector<std::uint8_t> BinaryMatrix::column(std::size_t c) const {
    std::vector<std::uint8_t> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = cells_[r * cols_ + c];
    return out;
}

std::size_t BinaryMatrix::row_sum(std::size_t r) const {
    auto rw = row(r);
    return static_cast<std::size_t>(std::count(rw.begin(), rw.end(), 1));
}

std::size_t BinaryMatrix::col_sum(std::size_t c) const {
    std::size_t s = 0;
    for (std::size_t r = 0; r < rows_; ++r) s += cells_[r * cols_ + c];
    return s;
}

std::size_t BinaryMatrix::ones() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), 1));
}

std::size_t BinaryMatrix::row_overlap(std::size_t r1, std::size_t r2) const {
    std::size_t s = 0;
    for (std::size_t c = 0; c < cols_; ++c) s += cells_[r1 * cols_ + c] & cells_[r2 * cols_ + c];
    return s;
}

std::size_t BinaryMatrix::col_overlap(std::size_t c1, std::size_t c2) const {
    std::size_t s = 0;
    for (std::size_t r = 0; r < rows_; ++r) s += cells_[r * cols_ + c1] & cells_[r * cols_ + c2];
    return s;
}

std::vector<std::size_t> BinaryMatrix::row_support(std::size_t r) const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < cols_; ++c)
        if (at(r, c)) out.push_back(c);
    return out;
}

std::vector<std::size_t> BinaryMatrix::col_support(std::size_t c) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < rows_; ++r)
        if (at(r, c)) out.push_back(r);
    return out;
}

BinaryMatrix BinaryMatrix::transposed() const {
    BinaryMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t.set(c, r, at(r, c));
    return t;
}

BinaryMatrix BinaryMatrix::sub(std::size_t r0, std::size_t nrows, std::size_t c0,
                               std::size_t ncols) const {
    if (r0 + nrows > rows_ || c0 + ncols > cols_) throw InputError("submatrix out of range");
    BinaryMatrix s(nrows, ncols);
    for (std::size_t r = 0; r < nrows; ++r)
        for (std::size_t c = 0; c < ncols; ++c) s.set(r, c, at(r0 + r, c0 + c));
    return s;
}

BinaryMatrix BinaryMatrix::stack(const BinaryMatrix& top, const BinaryMatrix& bottom) {
    if (top.empty()) return bottom;
    if (bottom.empty()) return top;
    if (top.cols_ != bottom.cols_) throw InputError("stacking matrices with different widths");
    BinaryMatrix m(top.rows_ + bottom.rows_, top.cols_);
    std::copy(top.cells_.begin(), top.cells_.end(), m.cells_.begin());
    std::copy(bottom.cells_.begin(), bottom.cells_.end(),
              m.cells_.begin() + static_cast<std::ptrdiff_t>(top.cells_.size()));
    return m;
}

BinaryMatrix BinaryMatrix::permuted(std::span<const int> row_perm,
                                    std::span<const int> col_perm) const {
    if (row_perm.size() != rows_ || col_perm.size() != cols_)
        throw InputError("permutation size does not match matrix");
    BinaryMatrix out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            out.set(static_cast<std::size_t>(row_perm[r]), static_cast<std::size_t>(col_perm[c]),
                    at(r, c));
    return out;
}

std::strong_ordering BinaryMatrix::compare_rows(std::size_t r1, std::size_t r2) const {
    auto a = row(r1);
    auto b = row(r2);
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

void BinaryMatrix::sort_rows_desc(std::size_t r0, std::size_t n) {
    std::vector<std::vector<std::uint8_t>> rws;
    rws.reserve(n);
    for (std::size_t r = r0; r < r0 + n; ++r) {
        auto rw = row(r);
        rws.emplace_back(rw.begin(), rw.end());
    }
    std::sort(rws.begin(), rws.end(), std::greater<>());
    for (std::size_t i = 0; i < n; ++i)
        std::copy(rws[i].begin(), rws[i].end(),
                  cells_.begin() + static_cast<std::ptrdiff_t>((r0 + i) * cols_));
}

bool BinaryMatrix::rows_sorted_desc(std::size_t r0, std::size_t n) const {
    for (std::size_t r = r0; r + 1 < r0 + n; ++r)
        if (compare_rows(r, r + 1) < 0) return false;
    return true;
}

std::vector<std::string> BinaryMatrix::to_strings() const {
    std::vector<std::string> out(rows_, std::string(cols_, '0'));
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (at(r, c)) out[r][c] = '1';
    return out;
}

std::string BinaryMatrix::to_string() const {
    std::string s;
    for (const auto& r : to_strings()) {
        s += r;
        s += '\n';
    }
    return s;
}

std::string BinaryMatrix::packed() const {
    std::string out((cells_.size() + 7) / 8 + 4, '\0');
    out[0] = static_cast<char>(rows_ & 0xff);
    out[1] = static_cast<char>(rows_ >> 8);
    out[2] = static_cast<char>(cols_ & 0xff);
    out[3] = static_cast<char>(cols_ >> 8);
    for (std::size_t i = 0; i < cells_.size(); ++i)
        if (cells_[i]) out[4 + i / 8] = static_cast<char>(out[4 + i / 8] | (1 << (i % 8)));
    return out;
}

std::strong_ordering operator<=>(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (auto c = a.rows_ <=> b.rows_; c != 0) return c;
    if (auto c = a.cols_ <=> b.cols_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.cells_.begin(), a.cells_.end(),
                                                  b.cells_.begin(), b.cells_.end());
}

std::size_t BinaryMatrixHash::operator()(const BinaryMatrix& m) const noexcept {
    return std::hash<std::string>{}(m.packed());
}

PlaneParams PlaneParams::of_order(int n) {
    if (n < 1) throw InputError("plane order must be positive");
    return PlaneParams{n};
}

} // namespace lam
