#include "lam/drat.hpp"

#include "lam/errors.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace lam {

bool DratProof::has_empty_clause() const {
    return std::any_of(steps.begin(), steps.end(),
                       [](const DratStep& s) { return !s.deletion && s.lits.empty(); });
}

// ---------------------------------------------------------------------------
// formats

DratProof parse_drat_text(std::istream& in) {
    DratProof proof;
    std::string line;
    std::size_t lineno = 0;
    DratStep cur;
    bool open = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream is(line);
        std::string tok;
        while (is >> tok) {
            if (tok[0] == 'c' && !open) break;
            if (tok == "d") {
                if (open) throw ParseError("'d' inside a clause", lineno);
                cur.deletion = true;
                open = true;
                continue;
            }
            long long v = 0;
            try {
                std::size_t used = 0;
                v = std::stoll(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ParseError("unexpected token '" + tok + "'", lineno);
            }
            if (v > 0x3fffffff || v < -0x3fffffff) throw ParseError("literal out of range", lineno);
            if (v == 0) {
                proof.steps.push_back(std::move(cur));
                cur = DratStep{};
                open = false;
            } else {
                cur.lits.push_back(static_cast<Lit>(v));
                open = true;
            }
        }
    }
    if (open) throw ParseError("unterminated proof step", lineno);
    return proof;
}

DratProof parse_drat_binary(std::string_view bytes) {
    DratProof proof;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        const char tag = bytes[pos];
        if (tag != 'a' && tag != 'd') throw ParseError("bad binary step tag", pos);
        DratStep step;
        step.deletion = tag == 'd';
        ++pos;
        for (;;) {
            unsigned long long u = 0;
            int shift = 0;
            for (;;) {
                if (pos >= bytes.size()) throw ParseError("truncated binary step", pos);
                const auto b = static_cast<unsigned char>(bytes[pos++]);
                u |= static_cast<unsigned long long>(b & 127u) << shift;
                if (!(b & 128u)) break;
                shift += 7;
                if (shift > 35) throw ParseError("oversized literal", pos);
            }
            if (u == 0) break;
            if (u < 2) throw ParseError("literal 0 encoded", pos);
            const auto var = static_cast<Lit>(u >> 1);
            step.lits.push_back((u & 1u) ? -var : var);
        }
        proof.steps.push_back(std::move(step));
    }
    return proof;
}

DratProof parse_drat(std::string_view bytes) {
    const bool binary = !bytes.empty() && (bytes[0] == 'a' || bytes.find('\0') != std::string_view::npos);
    if (binary) return parse_drat_binary(bytes);
    std::istringstream in{std::string(bytes)};
    return parse_drat_text(in);
}

DratProof read_drat_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open proof " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_drat(bytes);
}

void write_drat_text(const DratProof& proof, std::ostream& out) {
    for (const auto& s : proof.steps) {
        if (s.deletion) out << "d ";
        for (Lit l : s.lits) out << l << ' ';
        out << "0\n";
    }
    if (!out) throw IoError("failed writing proof");
}

void write_drat_binary(const DratProof& proof, std::ostream& out) {
    for (const auto& s : proof.steps) {
        out.put(s.deletion ? 'd' : 'a');
        for (Lit l : s.lits) {
            auto u = 2ull * static_cast<unsigned long long>(var_of(l)) + (l < 0 ? 1u : 0u);
            while (u > 127) {
                out.put(static_cast<char>((u & 127u) | 128u));
                u >>= 7;
            }
            out.put(static_cast<char>(u));
        }
        out.put('\0');
    }
    if (!out) throw IoError("failed writing proof");
}

// ---------------------------------------------------------------------------
// checking engine, deliberately separate from the solver's clause database

namespace {

class Engine {
public:
    explicit Engine(int nvars)
        : val_(static_cast<std::size_t>(nvars) + 1, 0),
          reason_(static_cast<std::size_t>(nvars) + 1, -1),
          watch_(2 * (static_cast<std::size_t>(nvars) + 1)) {}

    bool inconsistent() const { return inconsistent_; }

    void add(std::span<const Lit> in) {
        auto c = normalized(in);
        for (std::size_t k = 1; k < c.size(); ++k)
            if (var_of(c[k]) == var_of(c[k - 1])) return;  // tautology: never useful, never reason
        const auto idx = static_cast<std::int32_t>(cls_.size());
        index_[key(c)].push_back(idx);
        cls_.push_back({static_cast<std::uint32_t>(lits_.size()), static_cast<std::uint32_t>(c.size()), false});
        lits_.insert(lits_.end(), c.begin(), c.end());
        if (inconsistent_) return;
        if (c.empty()) {
            inconsistent_ = true;
            return;
        }
        Lit* L = &lits_[cls_.back().start];
        const auto n = c.size();
        // move non-false literals to the front, true ones first
        std::stable_partition(L, L + n, [&](Lit l) { return value(l) > 0; });
        std::stable_partition(L, L + n, [&](Lit l) { return value(l) >= 0; });
        if (value(L[0]) < 0) {
            inconsistent_ = true;
            return;
        }
        if (n == 1 || (value(L[0]) == 0 && value(L[1]) < 0)) {
            if (value(L[0]) == 0) {
                assign(L[0], idx);
                if (!propagate()) inconsistent_ = true;
            }
            if (n == 1) return;
        }
        watch_[code(L[0])].push_back(static_cast<std::uint32_t>(idx));
        watch_[code(L[1])].push_back(static_cast<std::uint32_t>(idx));
    }

    /// 1 deleted, 0 ignored because the clause is a root reason, -1 unknown clause.
    int remove(std::span<const Lit> in) {
        auto c = normalized(in);
        auto it = index_.find(key(c));
        if (it == index_.end()) return -1;
        auto& ids = it->second;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const auto idx = ids[k];
            auto& cl = cls_[static_cast<std::size_t>(idx)];
            if (cl.deleted) continue;
            for (std::uint32_t t = 0; t < cl.size; ++t) {
                const Lit l = lits_[cl.start + t];
                if (reason_[static_cast<std::size_t>(var_of(l))] == idx && value(l) > 0) return 0;
            }
            cl.deleted = true;
            ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(k));
            return 1;
        }
        return -1;
    }

    bool rup(std::span<const Lit> c) {
        if (inconsistent_) return true;
        const auto mark = trail_.size();
        bool conflict = false;
        for (Lit l : c) {
            const int v = value(l);
            if (v > 0) {
                conflict = true;
                break;
            }
            if (v == 0) assign(-l, -1);
        }
        if (!conflict) conflict = !propagate();
        undo(mark);
        return conflict;
    }

    bool rat(std::span<const Lit> c) {
        if (c.empty()) return false;
        const Lit pivot = c[0];
        std::vector<Lit> resolvent;
        for (std::size_t i = 0; i < cls_.size(); ++i) {
            const auto& d = cls_[i];
            if (d.deleted) continue;
            const Lit* D = &lits_[d.start];
            if (std::find(D, D + d.size, -pivot) == D + d.size) continue;
            resolvent.assign(c.begin(), c.end());
            bool taut = false;
            for (std::uint32_t t = 0; t < d.size; ++t) {
                if (D[t] == -pivot) continue;
                if (std::find(c.begin(), c.end(), -D[t]) != c.end()) taut = true;
                resolvent.push_back(D[t]);
            }
            if (taut) continue;
            if (!rup(resolvent)) return false;
        }
        return true;
    }

    // temporary assignments for model search
    std::size_t mark() const { return trail_.size(); }
    bool assume(Lit l) {
        const int v = value(l);
        if (v > 0) return true;
        if (v < 0) return false;
        assign(l, -1);
        return propagate();
    }
    void undo(std::size_t mark) {
        for (std::size_t i = mark; i < trail_.size(); ++i) {
            const auto v = static_cast<std::size_t>(var_of(trail_[i]));
            val_[v] = 0;
            reason_[v] = -1;
        }
        trail_.resize(mark);
        head_ = mark;
    }
    /// First unassigned literal of a clause not yet satisfied, 0 if all satisfied.
    Lit open_literal() const {
        for (const auto& cl : cls_) {
            if (cl.deleted) continue;
            bool sat = false;
            Lit open = 0;
            for (std::uint32_t t = 0; t < cl.size; ++t) {
                const Lit l = lits_[cl.start + t];
                const int v = value(l);
                if (v > 0) {
                    sat = true;
                    break;
                }
                if (v == 0 && open == 0) open = l;
            }
            if (!sat) return open == 0 ? var_of(lits_[cl.start]) : open;
        }
        return 0;
    }

    int value(Lit l) const {
        const int v = val_[static_cast<std::size_t>(var_of(l))];
        return l > 0 ? v : -v;
    }

private:
    struct Cls {
        std::uint32_t start;
        std::uint32_t size;
        bool deleted;
    };

    static std::vector<Lit> normalized(std::span<const Lit> in) {
        std::vector<Lit> c(in.begin(), in.end());
        std::sort(c.begin(), c.end(), [](Lit a, Lit b) {
            return var_of(a) != var_of(b) ? var_of(a) < var_of(b) : a < b;
        });
        c.erase(std::unique(c.begin(), c.end()), c.end());
        return c;
    }
    static std::size_t code(Lit l) { return 2 * static_cast<std::size_t>(var_of(l)) + (l < 0 ? 1 : 0); }
    static std::string key(const std::vector<Lit>& sorted) {
        return {reinterpret_cast<const char*>(sorted.data()), sorted.size() * sizeof(Lit)};
    }

    void assign(Lit l, std::int32_t why) {
        const auto v = static_cast<std::size_t>(var_of(l));
        val_[v] = static_cast<std::int8_t>(l > 0 ? 1 : -1);
        reason_[v] = why;
        trail_.push_back(l);
    }

    bool propagate() {
        while (head_ < trail_.size()) {
            const Lit f = -trail_[head_++];
            auto& ws = watch_[code(f)];
            std::size_t j = 0;
            for (std::size_t i = 0; i < ws.size(); ++i) {
                const auto idx = ws[i];
                const auto& cl = cls_[idx];
                if (cl.deleted) continue;
                Lit* L = &lits_[cl.start];
                if (L[0] == f) std::swap(L[0], L[1]);
                if (value(L[0]) > 0) {
                    ws[j++] = idx;
                    continue;
                }
                bool moved = false;
                for (std::uint32_t k = 2; k < cl.size; ++k)
                    if (value(L[k]) >= 0) {
                        std::swap(L[1], L[k]);
                        watch_[code(L[1])].push_back(idx);
                        moved = true;
                        break;
                    }
                if (moved) continue;
                ws[j++] = idx;
                if (value(L[0]) < 0) {
                    for (++i; i < ws.size(); ++i) ws[j++] = ws[i];
                    ws.resize(j);
                    head_ = trail_.size();
                    return false;
                }
                assign(L[0], static_cast<std::int32_t>(idx));
            }
            ws.resize(j);
        }
        return true;
    }

    std::vector<std::int8_t> val_;
    std::vector<std::int32_t> reason_;
    std::vector<std::vector<std::uint32_t>> watch_;
    std::vector<Lit> lits_;
    std::vector<Cls> cls_;
    std::unordered_map<std::string, std::vector<std::int32_t>> index_;
    std::vector<Lit> trail_;
    std::size_t head_ = 0;
    bool inconsistent_ = false;
};

int max_var(const Cnf& f, const DratProof& p) {
    int m = f.var_count();
    for (const auto& s : p.steps)
        for (Lit l : s.lits) m = std::max(m, var_of(l));
    return m;
}

std::string render(std::span<const Lit> c) {
    std::string s;
    for (Lit l : c) s += std::to_string(l) + " ";
    return s + "0";
}

bool search_model(Engine& e) {
    const Lit l = e.open_literal();
    if (l == 0) return true;
    for (Lit choice : {l, -l}) {
        const auto m = e.mark();
        if (e.assume(choice) && search_model(e)) return true;
        e.undo(m);
    }
    return false;
}

} // namespace

DratCheckResult check_drat(const Cnf& formula, const DratProof& proof) {
    DratCheckResult res;
    Engine e(max_var(formula, proof));
    for (std::size_t i = 0; i < formula.clause_count(); ++i) e.add(formula.clause(i));
    for (std::size_t i = 0; i < proof.steps.size(); ++i) {
        const auto& s = proof.steps[i];
        if (s.deletion) {
            ++res.deletions;
            if (e.remove(s.lits) != 1) ++res.ignored_deletions;
            continue;
        }
        ++res.additions;
        if (!e.rup(s.lits)) {
            if (!e.rat(s.lits)) {
                res.failed_step = i;
                res.message = "step " + std::to_string(i + 1) + " (" + render(s.lits) +
                              ") is neither RUP nor RAT";
                return res;
            }
            ++res.rat_steps;
        }
        e.add(s.lits);
    }
    res.accepted = true;
    res.refutation = e.inconsistent();
    return res;
}

bool cells_extend_to_model(const Cnf& cnf, std::span<const int> true_cells) {
    Engine e(cnf.var_count());
    for (std::size_t i = 0; i < cnf.clause_count(); ++i) e.add(cnf.clause(i));
    if (e.inconsistent()) return false;
    std::vector<std::uint8_t> on(static_cast<std::size_t>(cnf.var_count()) + 1, 0);
    for (int v : true_cells) {
        if (!cnf.is_cell_var(v)) throw InputError("variable " + std::to_string(v) + " is not a cell");
        on[static_cast<std::size_t>(v)] = 1;
    }
    for (int v = 1; v <= cnf.cell_var_count(); ++v)
        if (!e.assume(on[static_cast<std::size_t>(v)] ? v : -v)) return false;
    return search_model(e);
}

DratCheckResult verify_augmented_unsat(const Cnf& base, std::span<const std::vector<int>> true_cells,
                                       const DratProof& proof) {
    Cnf augmented = base;
    for (std::size_t i = 0; i < true_cells.size(); ++i) {
        if (!cells_extend_to_model(base, true_cells[i]))
            throw IntegrityError("solution " + std::to_string(i + 1) + " does not satisfy the base formula");
        if (true_cells[i].empty()) throw IntegrityError("solution " + std::to_string(i + 1) + " has no true cell");
        std::vector<Lit> block;
        for (int v : true_cells[i]) block.push_back(-v);
        augmented.add_clause(block, ClauseOrigin::blocking);
    }
    auto res = check_drat(augmented, proof);
    if (res.accepted && !res.refutation) {
        res.accepted = false;
        res.message = "proof does not derive the empty clause";
    }
    return res;
}

DratCheckResult verify_incremental(const Cnf& formula, std::span<const std::vector<Lit>> expected,
                                   const DratProof& proof) {
    auto res = check_drat(formula, proof);
    if (!res.accepted || res.refutation) return res;
    std::set<std::vector<Lit>> added;
    for (const auto& s : proof.steps) {
        if (s.deletion) continue;
        auto c = s.lits;
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        added.insert(std::move(c));
    }
    for (const auto& want : expected) {
        auto c = want;
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        if (!added.count(c)) {
            res.accepted = false;
            res.message = "proof never derives " + render(want);
            return res;
        }
    }
    return res;
}

} // namespace lam
