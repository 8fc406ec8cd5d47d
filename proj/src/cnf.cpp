#include "lam/cnf.hpp"

#include "lam/errors.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace lam {

namespace {

constexpr std::array<std::string_view, 10> kOriginNames{
    "quadruple",      "cardinality", "lexGeneric",  "lexSpecialRow", "lexSpecialCol",
    "incidenceRow",   "incidenceCol", "blocking",   "unitFix",       "external"};

} // namespace

std::string_view origin_name(ClauseOrigin o) { return kOriginNames[static_cast<std::size_t>(o)]; }

std::optional<ClauseOrigin> origin_from_name(std::string_view s) {
    for (std::size_t i = 0; i < kOriginNames.size(); ++i)
        if (kOriginNames[i] == s) return static_cast<ClauseOrigin>(i);
    return std::nullopt;
}

Cnf Cnf::with_cells(std::size_t rows, std::size_t cols) {
    BinaryMatrix mask(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) mask.set(r, c, true);
    return with_cells(mask);
}

Cnf Cnf::with_cells(const BinaryMatrix& mask) {
    Cnf f;
    f.grid_rows_ = mask.rows();
    f.grid_cols_ = mask.cols();
    f.cell_index_.assign(mask.rows() * mask.cols(), 0);
    for (std::size_t r = 0; r < mask.rows(); ++r)
        for (std::size_t c = 0; c < mask.cols(); ++c)
            if (mask.at(r, c)) {
                const auto pos = r * mask.cols() + c;
                f.cell_index_[pos] = ++f.var_count_;
                f.cell_pos_.push_back(static_cast<std::uint32_t>(pos));
            }
    f.cell_vars_ = f.var_count_;
    f.fixed_.assign(static_cast<std::size_t>(f.var_count_) + 1, -1);
    return f;
}

Cnf Cnf::with_vars(int n) {
    Cnf f;
    f.var_count_ = n;
    f.fixed_.assign(static_cast<std::size_t>(n) + 1, -1);
    return f;
}

std::optional<int> Cnf::cell_var(std::size_t r, std::size_t c) const {
    if (r >= grid_rows_ || c >= grid_cols_) return std::nullopt;
    int v = cell_index_[r * grid_cols_ + c];
    if (v == 0) return std::nullopt;
    return v;
}

int Cnf::cell(std::size_t r, std::size_t c) const {
    auto v = cell_var(r, c);
    if (!v)
        throw EncodingError("no variable for cell (" + std::to_string(r + 1) + "," +
                            std::to_string(c + 1) + ")");
    return *v;
}

std::pair<std::size_t, std::size_t> Cnf::cell_of(int v) const {
    if (!is_cell_var(v)) throw EncodingError("variable " + std::to_string(v) + " is not a cell");
    auto pos = cell_pos_[static_cast<std::size_t>(v - 1)];
    return {pos / grid_cols_, pos % grid_cols_};
}

int Cnf::new_aux() {
    ++var_count_;
    fixed_.push_back(-1);
    return var_count_;
}

std::vector<int> Cnf::new_aux(int n) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(new_aux());
    return out;
}

void Cnf::fix_cell(std::size_t r, std::size_t c, bool value) {
    const int v = cell(r, c);
    const Lit l = value ? v : -v;
    fixed_[static_cast<std::size_t>(v)] = value ? 1 : 0;
    lits_.push_back(l);
    starts_.push_back(lits_.size());
    origins_.push_back(ClauseOrigin::unit_fix);
}

std::optional<bool> Cnf::fixed_value(int v) const {
    if (v < 1 || v > var_count_) return std::nullopt;
    auto f = fixed_[static_cast<std::size_t>(v)];
    if (f < 0) return std::nullopt;
    return f == 1;
}

bool Cnf::add_clause(std::span<const Lit> lits, ClauseOrigin origin) {
    scratch_.assign(lits.begin(), lits.end());
    for (Lit l : scratch_)
        if (l == 0 || var_of(l) > var_count_)
            throw EncodingError("literal " + std::to_string(l) + " outside the variable range");
    if (prune_fixed_) {
        std::size_t keep = 0;
        for (Lit l : scratch_) {
            auto fv = fixed_[static_cast<std::size_t>(var_of(l))];
            if (fv < 0) {
                scratch_[keep++] = l;
                continue;
            }
            if ((fv == 1) == (l > 0)) return false;  // satisfied
        }
        scratch_.resize(keep);
    }
    // Order-preserving dedup; a literal next to its negation makes a tautology.
    std::size_t out = 0;
    for (std::size_t i = 0; i < scratch_.size(); ++i) {
        const Lit l = scratch_[i];
        bool dup = false;
        for (std::size_t j = 0; j < out; ++j) {
            if (scratch_[j] == l) dup = true;
            if (scratch_[j] == -l) return false;
        }
        if (!dup) scratch_[out++] = l;
    }
    scratch_.resize(out);
    lits_.insert(lits_.end(), scratch_.begin(), scratch_.end());
    starts_.push_back(lits_.size());
    origins_.push_back(origin);
    return true;
}

std::size_t Cnf::count(ClauseOrigin o) const {
    return static_cast<std::size_t>(std::count(origins_.begin(), origins_.end(), o));
}

bool Cnf::same_clauses(const Cnf& other) const {
    return var_count_ == other.var_count_ && lits_ == other.lits_ && starts_ == other.starts_;
}

std::size_t emit_dimacs(const Cnf& cnf, std::ostream& out) {
    std::string buf;
    buf.reserve(64);
    std::size_t bytes = 0;
    auto put = [&](const std::string& s) {
        out << s;
        bytes += s.size();
    };
    put("p cnf " + std::to_string(cnf.var_count()) + " " + std::to_string(cnf.clause_count()) +
        "\n");
    for (std::size_t i = 0; i < cnf.clause_count(); ++i) {
        buf.clear();
        for (Lit l : cnf.clause(i)) {
            buf += std::to_string(l);
            buf += ' ';
        }
        buf += "0\n";
        put(buf);
    }
    out.flush();
    if (!out) throw IoError("failed writing DIMACS output");
    return bytes;
}

Cnf parse_dimacs(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<Cnf> cnf;
    std::size_t declared_clauses = 0;
    std::vector<Lit> cur;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
        std::istringstream is(line);
        if (line[0] == 'p') {
            std::string p, fmt;
            int vars = 0;
            is >> p >> fmt >> vars >> declared_clauses;
            if (!is || fmt != "cnf" || vars < 0) throw ParseError("bad DIMACS header", lineno);
            cnf = Cnf::with_vars(vars);
            continue;
        }
        if (!cnf) throw ParseError("clause before header", lineno);
        long long v = 0;
        while (is >> v) {
            if (v == 0) {
                cnf->add_clause(cur, ClauseOrigin::external);
                cur.clear();
            } else {
                if (std::llabs(v) > cnf->var_count()) throw ParseError("literal out of range", lineno);
                cur.push_back(static_cast<Lit>(v));
            }
        }
        if (!is.eof()) throw ParseError("non-numeric token", lineno);
    }
    if (!cnf) throw ParseError("missing DIMACS header", lineno);
    if (!cur.empty()) throw ParseError("unterminated clause", lineno);
    return std::move(*cnf);
}

void write_origin_tags(const Cnf& cnf, std::ostream& out) {
    for (std::size_t i = 0; i < cnf.clause_count(); ++i) out << origin_name(cnf.origin(i)) << '\n';
    if (!out) throw IoError("failed writing origin tags");
}

std::vector<ClauseOrigin> read_origin_tags(std::istream& in) {
    std::vector<ClauseOrigin> tags;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto o = origin_from_name(line);
        if (!o) throw ParseError("unknown origin tag '" + line + "'", lineno);
        tags.push_back(*o);
    }
    return tags;
}

} // namespace lam
