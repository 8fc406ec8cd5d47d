#include "lam/solver.hpp"

#include "lam/errors.hpp"

#include <algorithm>
#include <cstring>
#include <ostream>
#include <random>

namespace lam {

// ---------------------------------------------------------------------------
// proof sinks

DratStreamSink::DratStreamSink(std::ostream& out, bool binary) : out_(out), binary_(binary) {}

void DratStreamSink::write(char tag, std::span<const Lit> clause) {
    buf_.clear();
    if (binary_) {
        buf_ += tag;
        for (Lit l : clause) {
            auto u = 2u * static_cast<unsigned>(var_of(l)) + (l < 0 ? 1u : 0u);
            while (u > 127) {
                buf_ += static_cast<char>((u & 127u) | 128u);
                u >>= 7;
            }
            buf_ += static_cast<char>(u);
        }
        buf_ += '\0';
    } else {
        if (tag == 'd') buf_ += "d ";
        for (Lit l : clause) {
            buf_ += std::to_string(l);
            buf_ += ' ';
        }
        buf_ += "0\n";
    }
    out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out_) throw IoError("failed writing proof");
    bytes_ += buf_.size();
}

void DratStreamSink::add(std::span<const Lit> clause) { write('a', clause); }
void DratStreamSink::remove(std::span<const Lit> clause) { write('d', clause); }
void DratStreamSink::flush() {
    out_.flush();
    if (!out_) throw IoError("failed writing proof");
}

void TeeSink::add(std::span<const Lit> clause) {
    for (auto* s : sinks_) s->add(clause);
}
void TeeSink::remove(std::span<const Lit> clause) {
    for (auto* s : sinks_) s->remove(clause);
}
void TeeSink::flush() {
    for (auto* s : sinks_) s->flush();
}

// ---------------------------------------------------------------------------
// solver core
//
// Internal literal code: 2*(v-1) + (negative ? 1 : 0). Values: 0 false,
// 1 true, 2 unassigned; value(lit) = assigns[var] ^ sign.

namespace {

constexpr std::uint32_t kNoRef = 0xffffffffu;
constexpr std::uint8_t kFalse = 0, kTrue = 1, kUndef = 2;

inline int ivar(int lit) { return lit >> 1; }
inline int ineg(int lit) { return lit ^ 1; }
inline int isign(int lit) { return lit & 1; }
inline int to_internal(Lit l) { return 2 * (var_of(l) - 1) + (l < 0 ? 1 : 0); }
inline Lit to_external(int lit) { return isign(lit) ? -(ivar(lit) + 1) : ivar(lit) + 1; }

double luby(double y, int x) {
    int size = 1, seq = 0;
    while (size < x + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x = x % size;
    }
    double r = 1;
    for (int i = 0; i < seq; ++i) r *= y;
    return r;
}

struct Watch {
    std::uint32_t cref;
    int blocker;
};

} // namespace

struct Solver::Impl {
    SolverOptions opts;
    SolverStats stats;
    int nvars = 0;
    bool ok = true;
    bool empty_emitted = false;
    ProofSink* proof = nullptr;

    // clause arena: [size, flags, activity-bits, lits...]; flags bit0 learnt, bit1 deleted, lbd << 2
    std::vector<std::uint32_t> mem;
    std::size_t wasted = 0;
    std::vector<std::uint32_t> clauses, learnts;

    std::vector<std::vector<Watch>> watches;  // by literal: clauses watching it
    std::vector<std::uint8_t> assigns;
    std::vector<std::uint8_t> polarity;
    std::vector<std::uint32_t> reason;
    std::vector<int> level;
    std::vector<int> trail;
    std::vector<int> trail_lim;
    std::size_t qhead = 0;

    std::vector<double> activity;
    double var_inc = 1.0;
    double cla_inc = 1.0;
    std::vector<std::uint8_t> prio;
    std::vector<int> heap;
    std::vector<int> heap_pos;  // -1 when absent

    std::vector<std::uint8_t> seen;
    std::vector<std::uint8_t> aux;
    std::vector<std::uint32_t> occurrences;
    std::vector<int> assumptions;
    double max_learnts = 0;
    std::uint64_t budget = 0;
    std::uint64_t call_conflicts = 0;
    std::mt19937_64 rng;

    // clause access
    std::uint32_t csize(std::uint32_t c) const { return mem[c]; }
    int* clits(std::uint32_t c) { return reinterpret_cast<int*>(&mem[c + 3]); }
    bool learnt(std::uint32_t c) const { return mem[c + 1] & 1u; }
    bool deleted(std::uint32_t c) const { return mem[c + 1] & 2u; }
    std::uint32_t lbd(std::uint32_t c) const { return mem[c + 1] >> 2; }
    float cact(std::uint32_t c) const {
        float f;
        std::memcpy(&f, &mem[c + 2], sizeof f);
        return f;
    }
    void set_cact(std::uint32_t c, float f) { std::memcpy(&mem[c + 2], &f, sizeof f); }

    std::uint8_t value(int lit) const {
        auto a = assigns[static_cast<std::size_t>(ivar(lit))];
        return a == kUndef ? kUndef : static_cast<std::uint8_t>(a ^ isign(lit));
    }
    int decision_level() const { return static_cast<int>(trail_lim.size()); }

    // heap ----------------------------------------------------------------
    bool before(int a, int b) const {
        if (prio[static_cast<std::size_t>(a)] != prio[static_cast<std::size_t>(b)])
            return prio[static_cast<std::size_t>(a)] > prio[static_cast<std::size_t>(b)];
        if (activity[static_cast<std::size_t>(a)] != activity[static_cast<std::size_t>(b)])
            return activity[static_cast<std::size_t>(a)] > activity[static_cast<std::size_t>(b)];
        return a < b;
    }
    void heap_up(std::size_t i) {
        int v = heap[i];
        while (i > 0) {
            std::size_t p = (i - 1) / 2;
            if (!before(v, heap[p])) break;
            heap[i] = heap[p];
            heap_pos[static_cast<std::size_t>(heap[i])] = static_cast<int>(i);
            i = p;
        }
        heap[i] = v;
        heap_pos[static_cast<std::size_t>(v)] = static_cast<int>(i);
    }
    void heap_down(std::size_t i) {
        int v = heap[i];
        const std::size_t n = heap.size();
        for (;;) {
            std::size_t c = 2 * i + 1;
            if (c >= n) break;
            if (c + 1 < n && before(heap[c + 1], heap[c])) ++c;
            if (!before(heap[c], v)) break;
            heap[i] = heap[c];
            heap_pos[static_cast<std::size_t>(heap[i])] = static_cast<int>(i);
            i = c;
        }
        heap[i] = v;
        heap_pos[static_cast<std::size_t>(v)] = static_cast<int>(i);
    }
    void heap_insert(int v) {
        if (heap_pos[static_cast<std::size_t>(v)] >= 0) return;
        heap.push_back(v);
        heap_up(heap.size() - 1);
    }
    int heap_pop() {
        int top = heap[0];
        heap_pos[static_cast<std::size_t>(top)] = -1;
        int last = heap.back();
        heap.pop_back();
        if (!heap.empty()) {
            heap[0] = last;
            heap_down(0);
        }
        return top;
    }
    void heap_rebuild() {
        std::vector<int> vs;
        for (int v = 0; v < nvars; ++v)
            if (assigns[static_cast<std::size_t>(v)] == kUndef) vs.push_back(v);
        for (int v : heap) heap_pos[static_cast<std::size_t>(v)] = -1;
        heap.clear();
        for (int v : vs) heap_insert(v);
    }

    void bump_var(int v) {
        auto& a = activity[static_cast<std::size_t>(v)];
        a += var_inc;
        if (a > 1e100) {
            for (auto& x : activity) x *= 1e-100;
            var_inc *= 1e-100;
        }
        if (heap_pos[static_cast<std::size_t>(v)] >= 0) heap_up(static_cast<std::size_t>(heap_pos[static_cast<std::size_t>(v)]));
    }
    void bump_clause(std::uint32_t c) {
        float a = cact(c) + static_cast<float>(cla_inc);
        set_cact(c, a);
        if (a > 1e20f) {
            for (auto l : learnts) set_cact(l, cact(l) * 1e-20f);
            cla_inc *= 1e-20;
        }
    }

    // setup ---------------------------------------------------------------
    void grow(int n) {
        if (n <= nvars) return;
        const auto un = static_cast<std::size_t>(n);
        watches.resize(2 * un);
        assigns.resize(un, kUndef);
        polarity.resize(un, 0);
        reason.resize(un, kNoRef);
        level.resize(un, 0);
        activity.resize(un, 0.0);
        prio.resize(un, 0);
        heap_pos.resize(un, -1);
        seen.resize(un, 0);
        aux.resize(un, 0);
        occurrences.resize(un, 0);
        for (int v = nvars; v < n; ++v) heap_insert(v);
        nvars = n;
    }

    void emit_add(std::span<const int> lits) {
        if (!proof) return;
        std::vector<Lit> ext;
        ext.reserve(lits.size());
        for (int l : lits) ext.push_back(to_external(l));
        proof->add(ext);
    }
    void emit_delete(std::uint32_t c) {
        if (!proof) return;
        std::vector<Lit> ext;
        for (std::uint32_t i = 0; i < csize(c); ++i) ext.push_back(to_external(clits(c)[i]));
        proof->remove(ext);
    }
    void emit_empty() {
        if (empty_emitted) return;
        empty_emitted = true;
        if (proof) proof->add({});
    }

    std::uint32_t alloc(std::span<const int> lits, bool is_learnt, std::uint32_t glue) {
        auto c = static_cast<std::uint32_t>(mem.size());
        mem.push_back(static_cast<std::uint32_t>(lits.size()));
        mem.push_back((is_learnt ? 1u : 0u) | (glue << 2));
        mem.push_back(0);
        for (int l : lits) mem.push_back(static_cast<std::uint32_t>(l));
        return c;
    }
    void attach(std::uint32_t c) {
        int* l = clits(c);
        watches[static_cast<std::size_t>(l[0])].push_back({c, l[1]});
        watches[static_cast<std::size_t>(l[1])].push_back({c, l[0]});
    }

    void enqueue(int lit, std::uint32_t from) {
        const auto v = static_cast<std::size_t>(ivar(lit));
        assigns[v] = static_cast<std::uint8_t>(isign(lit) ? kFalse : kTrue);
        level[v] = decision_level();
        reason[v] = from;
        trail.push_back(lit);
    }

    void cancel_until(int lvl) {
        if (decision_level() <= lvl) return;
        const auto stop = static_cast<std::size_t>(trail_lim[static_cast<std::size_t>(lvl)]);
        for (std::size_t i = trail.size(); i-- > stop;) {
            const auto v = static_cast<std::size_t>(ivar(trail[i]));
            polarity[v] = assigns[v];
            assigns[v] = kUndef;
            reason[v] = kNoRef;
            heap_insert(static_cast<int>(v));
        }
        trail.resize(stop);
        trail_lim.resize(static_cast<std::size_t>(lvl));
        qhead = trail.size();
    }

    std::uint32_t propagate() {
        std::uint32_t confl = kNoRef;
        while (qhead < trail.size()) {
            const int p = trail[qhead++];
            const int fl = ineg(p);
            auto& ws = watches[static_cast<std::size_t>(fl)];
            ++stats.propagations;
            std::size_t i = 0, j = 0;
            const std::size_t n = ws.size();
            while (i < n) {
                Watch w = ws[i++];
                if (value(w.blocker) == kTrue) {
                    ws[j++] = w;
                    continue;
                }
                int* c = clits(w.cref);
                if (c[0] == fl) std::swap(c[0], c[1]);
                const int first = c[0];
                if (first != w.blocker && value(first) == kTrue) {
                    ws[j++] = {w.cref, first};
                    continue;
                }
                const std::uint32_t sz = csize(w.cref);
                bool moved = false;
                for (std::uint32_t k = 2; k < sz; ++k)
                    if (value(c[k]) != kFalse) {
                        std::swap(c[1], c[k]);
                        watches[static_cast<std::size_t>(c[1])].push_back({w.cref, first});
                        moved = true;
                        break;
                    }
                if (moved) continue;
                ws[j++] = {w.cref, first};
                if (value(first) == kFalse) {
                    confl = w.cref;
                    qhead = trail.size();
                    while (i < n) ws[j++] = ws[i++];
                } else {
                    enqueue(first, w.cref);
                }
            }
            ws.resize(j);
            if (confl != kNoRef) break;
        }
        return confl;
    }

    bool reason_redundant(int lit) {
        const auto r = reason[static_cast<std::size_t>(ivar(lit))];
        if (r == kNoRef) return false;
        const int* c = clits(r);
        for (std::uint32_t k = 1; k < csize(r); ++k) {
            const auto v = static_cast<std::size_t>(ivar(c[k]));
            if (!seen[v] && level[v] > 0) return false;
        }
        return true;
    }

    void analyze(std::uint32_t confl, std::vector<int>& out, int& back_level, std::uint32_t& glue) {
        out.clear();
        out.push_back(-1);
        int path = 0;
        int p = -1;
        std::size_t idx = trail.size();
        std::vector<int> touched;
        do {
            if (learnt(confl)) bump_clause(confl);
            int* c = clits(confl);
            for (std::uint32_t k = (p == -1 ? 0u : 1u); k < csize(confl); ++k) {
                const int q = c[k];
                const auto v = static_cast<std::size_t>(ivar(q));
                if (seen[v] || level[v] == 0) continue;
                bump_var(static_cast<int>(v));
                seen[v] = 1;
                touched.push_back(static_cast<int>(v));
                if (level[v] >= decision_level())
                    ++path;
                else
                    out.push_back(q);
            }
            while (!seen[static_cast<std::size_t>(ivar(trail[--idx]))]) {}
            p = trail[idx];
            confl = reason[static_cast<std::size_t>(ivar(p))];
            seen[static_cast<std::size_t>(ivar(p))] = 0;
            --path;
        } while (path > 0);
        out[0] = ineg(p);

        // drop literals whose reason is covered by the rest of the clause
        std::size_t keep = 1;
        for (std::size_t k = 1; k < out.size(); ++k)
            if (!reason_redundant(out[k])) out[keep++] = out[k];
        out.resize(keep);
        for (int v : touched) seen[static_cast<std::size_t>(v)] = 0;

        back_level = 0;
        if (out.size() > 1) {
            std::size_t best = 1;
            for (std::size_t k = 2; k < out.size(); ++k)
                if (level[static_cast<std::size_t>(ivar(out[k]))] > level[static_cast<std::size_t>(ivar(out[best]))]) best = k;
            std::swap(out[1], out[best]);
            back_level = level[static_cast<std::size_t>(ivar(out[1]))];
        }
        std::vector<int> levels;
        for (int l : out) levels.push_back(level[static_cast<std::size_t>(ivar(l))]);
        std::sort(levels.begin(), levels.end());
        glue = static_cast<std::uint32_t>(std::unique(levels.begin(), levels.end()) - levels.begin());
    }

    bool locked(std::uint32_t c) {
        const int l0 = clits(c)[0];
        const auto v = static_cast<std::size_t>(ivar(l0));
        return reason[v] == c && value(l0) == kTrue;
    }

    void reduce_db() {
        std::vector<std::uint32_t> cand;
        for (auto c : learnts)
            if (csize(c) > 2 && lbd(c) > 2 && !locked(c)) cand.push_back(c);
        std::stable_sort(cand.begin(), cand.end(), [&](std::uint32_t a, std::uint32_t b) {
            return cact(a) < cact(b);
        });
        const std::size_t drop = cand.size() / 2;
        if (drop == 0) return;
        for (std::size_t k = 0; k < drop; ++k) {
            emit_delete(cand[k]);
            mem[cand[k] + 1] |= 2u;
            wasted += csize(cand[k]) + 3;
        }
        stats.learnts_deleted += drop;
        learnts.erase(std::remove_if(learnts.begin(), learnts.end(), [&](std::uint32_t c) { return deleted(c); }),
                      learnts.end());
        for (auto& ws : watches)
            ws.erase(std::remove_if(ws.begin(), ws.end(), [&](const Watch& w) { return deleted(w.cref); }),
                     ws.end());
        if (wasted * 2 > mem.size()) collect_garbage();
    }

    void collect_garbage() {
        std::vector<std::uint32_t> fresh;
        fresh.reserve(mem.size() - wasted);
        auto move = [&](std::uint32_t c) {
            auto n = static_cast<std::uint32_t>(fresh.size());
            fresh.insert(fresh.end(), mem.begin() + c, mem.begin() + c + 3 + csize(c));
            mem[c + 2] = n;  // forwarding pointer
            return n;
        };
        for (auto& c : clauses) c = move(c);
        for (auto& c : learnts) c = move(c);
        for (auto& r : reason)
            if (r != kNoRef) r = mem[r + 2];
        for (auto& ws : watches)
            for (auto& w : ws) w.cref = mem[w.cref + 2];
        mem.swap(fresh);
        wasted = 0;
    }

    int pick_branch() {
        if (!opts.deterministic && !heap.empty() && std::uniform_real_distribution<double>(0, 1)(rng) < 0.01) {
            int v = heap[std::uniform_int_distribution<std::size_t>(0, heap.size() - 1)(rng)];
            if (assigns[static_cast<std::size_t>(v)] == kUndef)
                return 2 * v + (polarity[static_cast<std::size_t>(v)] == kTrue ? 0 : 1);
        }
        while (!heap.empty()) {
            int v = heap_pop();
            if (assigns[static_cast<std::size_t>(v)] == kUndef)
                return 2 * v + (polarity[static_cast<std::size_t>(v)] == kTrue ? 0 : 1);
        }
        return -1;
    }

    enum class Status { sat, unsat, unsat_assumptions, restart };

    Status search(std::uint64_t nof_conflicts) {
        std::uint64_t local = 0;
        std::vector<int> learnt_clause;
        for (;;) {
            std::uint32_t confl = propagate();
            if (confl != kNoRef) {
                ++stats.conflicts;
                ++local;
                ++call_conflicts;
                if (decision_level() == 0) return Status::unsat;
                int back = 0;
                std::uint32_t glue = 0;
                analyze(confl, learnt_clause, back, glue);
                cancel_until(back);
                emit_add(learnt_clause);
                if (learnt_clause.size() == 1) {
                    enqueue(learnt_clause[0], kNoRef);
                } else {
                    auto c = alloc(learnt_clause, true, glue);
                    learnts.push_back(c);
                    attach(c);
                    bump_clause(c);
                    enqueue(learnt_clause[0], c);
                }
                var_inc /= 0.95;
                cla_inc /= 0.999;
                if (budget != 0 && call_conflicts >= budget) {
                    cancel_until(0);
                    throw BudgetExceeded("conflict budget of " + std::to_string(budget) + " exhausted");
                }
                continue;
            }
            if (local >= nof_conflicts) {
                cancel_until(0);
                ++stats.restarts;
                return Status::restart;
            }
            if (static_cast<double>(learnts.size()) - static_cast<double>(trail.size()) >= max_learnts) {
                reduce_db();
                max_learnts *= 1.1;
            }
            int next = -1;
            while (decision_level() < static_cast<int>(assumptions.size())) {
                const int a = assumptions[static_cast<std::size_t>(decision_level())];
                const auto va = value(a);
                if (va == kTrue) {
                    trail_lim.push_back(static_cast<int>(trail.size()));
                } else if (va == kFalse) {
                    return Status::unsat_assumptions;
                } else {
                    next = a;
                    break;
                }
            }
            if (next == -1) {
                next = pick_branch();
                if (next == -1) return Status::sat;
                ++stats.decisions;
            }
            trail_lim.push_back(static_cast<int>(trail.size()));
            enqueue(next, kNoRef);
        }
    }

    void check_lit(Lit l) const {
        if (l == 0 || var_of(l) > nvars)
            throw InputError("literal " + std::to_string(l) + " outside the variable range");
    }

    // Normalises and stores a clause at the root; returns false on root conflict.
    bool add_root_clause(std::span<const Lit> lits, bool count_occurrences) {
        if (!ok) return false;
        cancel_until(0);
        std::vector<int> c;
        c.reserve(lits.size());
        for (Lit l : lits) {
            check_lit(l);
            c.push_back(to_internal(l));
        }
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        for (std::size_t k = 1; k < c.size(); ++k)
            if (c[k] == ineg(c[k - 1])) return true;  // tautology
        if (count_occurrences)
            for (int l : c) ++occurrences[static_cast<std::size_t>(ivar(l))];
        // order: true, then unassigned, then false (stable within groups)
        std::stable_sort(c.begin(), c.end(), [&](int a, int b) {
            auto rank = [&](int l) { auto v = value(l); return v == kTrue ? 0 : v == kUndef ? 1 : 2; };
            return rank(a) < rank(b);
        });
        if (c.empty() || value(c[0]) == kFalse) {
            ok = false;
            return false;
        }
        if (value(c[0]) == kTrue) return true;  // satisfied at the root for good
        if (c.size() == 1 || value(c[1]) == kFalse) {
            enqueue(c[0], kNoRef);
            if (propagate() != kNoRef) ok = false;
            return ok;
        }
        auto ref = alloc(c, false, 0);
        clauses.push_back(ref);
        attach(ref);
        return true;
    }
};

Solver::Solver(int var_count, SolverOptions opts) : impl_(std::make_unique<Impl>()) {
    if (var_count < 0) throw InputError("negative variable count");
    impl_->opts = opts;
    impl_->budget = opts.conflict_budget;
    impl_->rng.seed(opts.seed);
    impl_->grow(var_count);
}

Solver Solver::from_cnf(const Cnf& cnf, SolverOptions opts) {
    Solver s(cnf.var_count(), opts);
    for (std::size_t i = 0; i < cnf.clause_count(); ++i) s.impl_->add_root_clause(cnf.clause(i), true);
    for (int v = cnf.cell_var_count() + 1; v <= cnf.var_count(); ++v) s.mark_aux(v);
    return s;
}

Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;
Solver::~Solver() = default;

int Solver::var_count() const noexcept { return impl_->nvars; }
void Solver::reserve_vars(int n) { impl_->grow(n); }
void Solver::set_proof(ProofSink* sink) { impl_->proof = sink; }

bool Solver::add_clause(std::span<const Lit> lits) { return impl_->add_root_clause(lits, true); }

bool Solver::add_blocking_clause(std::span<const Lit> lits) {
    auto& s = *impl_;
    for (Lit l : lits) s.check_lit(l);
    if (s.proof) s.proof->add(lits);
    if (!s.ok) return false;
    return s.add_root_clause(lits, false);
}

SolveResult Solver::solve(std::span<const Lit> assumptions) {
    auto& s = *impl_;
    ++s.stats.solves;
    SolveResult res;
    s.cancel_until(0);
    s.assumptions.clear();
    for (Lit l : assumptions) {
        s.check_lit(l);
        s.assumptions.push_back(to_internal(l));
    }
    auto fail = [&](bool refuted) {
        res.verdict = Verdict::unsat;
        for (Lit l : assumptions) res.derived.push_back(-l);
        if (!assumptions.empty() && s.proof) s.proof->add(res.derived);
        if (refuted) {
            s.ok = false;
            s.emit_empty();
            res.derived.clear();
        }
        s.cancel_until(0);
        return res;
    };
    if (!s.ok) return fail(true);
    if (s.propagate() != kNoRef) return fail(true);
    if (s.max_learnts == 0)
        s.max_learnts = std::max(2000.0, static_cast<double>(s.clauses.size()) / 3.0);
    s.call_conflicts = 0;
    for (int round = 0;; ++round) {
        const auto limit = static_cast<std::uint64_t>(luby(2, round) * s.opts.restart_base);
        switch (s.search(limit)) {
        case Impl::Status::restart:
            continue;
        case Impl::Status::unsat:
            return fail(true);
        case Impl::Status::unsat_assumptions:
            return fail(false);
        case Impl::Status::sat: {
            res.verdict = Verdict::sat;
            res.model.assign(static_cast<std::size_t>(s.nvars) + 1, 0);
            for (int v = 0; v < s.nvars; ++v)
                res.model[static_cast<std::size_t>(v) + 1] = s.assigns[static_cast<std::size_t>(v)] == kTrue ? 1 : 0;
            s.cancel_until(0);
            return res;
        }
        }
    }
}

void Solver::set_decision_priority(std::span<const int> vars) {
    auto& s = *impl_;
    std::fill(s.prio.begin(), s.prio.end(), 0);
    for (int v : vars) {
        if (v < 1 || v > s.nvars) throw InputError("priority variable out of range");
        s.prio[static_cast<std::size_t>(v - 1)] = 1;
    }
    s.cancel_until(0);
    s.heap_rebuild();
}

void Solver::set_conflict_budget(std::uint64_t budget) noexcept { impl_->budget = budget; }

void Solver::mark_aux(int v) {
    if (v < 1 || v > impl_->nvars) throw InputError("variable out of range");
    impl_->aux[static_cast<std::size_t>(v - 1)] = 1;
}

bool Solver::is_aux(int v) const {
    if (v < 1 || v > impl_->nvars) return false;
    return impl_->aux[static_cast<std::size_t>(v - 1)] != 0;
}

ProbeResult Solver::probe(std::span<const Lit> assumptions) {
    auto& s = *impl_;
    ProbeResult out;
    s.cancel_until(0);
    auto snapshot = [&] {
        out.values.assign(static_cast<std::size_t>(s.nvars) + 1, kUndef);
        for (int v = 0; v < s.nvars; ++v) out.values[static_cast<std::size_t>(v) + 1] = s.assigns[static_cast<std::size_t>(v)];
    };
    if (!s.ok || s.propagate() != kNoRef) {
        s.ok = false;
        s.emit_empty();
        out.conflict = true;
        snapshot();
        return out;
    }
    for (Lit l : assumptions) {
        s.check_lit(l);
        const int a = to_internal(l);
        const auto va = s.value(a);
        if (va == kTrue) continue;
        if (va == kFalse) {
            out.conflict = true;
            break;
        }
        s.trail_lim.push_back(static_cast<int>(s.trail.size()));
        s.enqueue(a, kNoRef);
        if (s.propagate() != kNoRef) {
            out.conflict = true;
            break;
        }
    }
    snapshot();
    s.cancel_until(0);
    return out;
}

std::vector<std::uint32_t> Solver::occurrence_counts() const {
    std::vector<std::uint32_t> out(static_cast<std::size_t>(impl_->nvars) + 1, 0);
    std::copy(impl_->occurrences.begin(), impl_->occurrences.end(), out.begin() + 1);
    return out;
}

const SolverStats& Solver::stats() const noexcept { return impl_->stats; }
bool Solver::inconsistent() const noexcept { return !impl_->ok; }

// ---------------------------------------------------------------------------
// enumeration

std::vector<Lit> blocking_clause(std::span<const int> projection, std::span<const std::uint8_t> bits,
                                 BlockingMode mode) {
    std::vector<Lit> out;
    for (std::size_t i = 0; i < projection.size(); ++i) {
        if (bits[i])
            out.push_back(-projection[i]);
        else if (mode == BlockingMode::full)
            out.push_back(projection[i]);
    }
    return out;
}

EnumerationResult enumerate_all(Solver& solver, std::span<const int> projection,
                                const EnumerationCallback& callback, const EnumerationOptions& opts) {
    for (int v : projection)
        if (v < 1 || v > solver.var_count()) throw InputError("projection variable out of range");
    EnumerationResult res;
    for (;;) {
        if (opts.limit != 0 && res.models >= opts.limit) {
            res.complete = false;
            break;
        }
        auto r = solver.solve(opts.assumptions);
        if (!r.sat()) break;
        EnumeratedModel m;
        m.bits.reserve(projection.size());
        for (int v : projection) m.bits.push_back(r.model[static_cast<std::size_t>(v)]);
        m.model = std::move(r.model);
        EnumerationDecision d;
        if (callback) {
            try {
                d = callback(m, res.models);
            } catch (...) {
                res.complete = false;
                res.error = std::current_exception();
                return res;
            }
        }
        ++res.models;
        auto clause = d.block.empty() ? blocking_clause(projection, m.bits, opts.mode) : d.block;
        if (clause.empty())
            throw EncodingError("model has no true projected variable; positive blocking would add the empty clause");
        solver.add_blocking_clause(clause);
        if (d.verdict == EnumerationVerdict::record_and_block)
            res.recorded.push_back(std::move(m));
        else
            ++res.blocked_only;
    }
    return res;
}

// ---------------------------------------------------------------------------
// cubes

namespace {

void split_rec(Solver& solver, std::size_t floor, std::size_t max_depth, const std::vector<int>& cand,
               const std::vector<std::uint32_t>& occ, Cube& cube, std::vector<Cube>& out) {
    auto pr = solver.probe(cube);
    if (pr.conflict) return;
    std::size_t free = 0;
    for (int v = 1; v <= solver.var_count(); ++v)
        if (pr.values[static_cast<std::size_t>(v)] == kUndef && !solver.is_aux(v)) ++free;
    if (free < floor || free == 0 || (max_depth != 0 && cube.size() >= max_depth)) {
        out.push_back(cube);
        return;
    }
    int best = 0;
    for (int v : cand)
        if (pr.values[static_cast<std::size_t>(v)] == kUndef &&
            (best == 0 || occ[static_cast<std::size_t>(v)] > occ[static_cast<std::size_t>(best)]))
            best = v;
    if (best == 0) {
        out.push_back(cube);
        return;
    }
    cube.push_back(best);
    split_rec(solver, floor, max_depth, cand, occ, cube, out);
    cube.back() = -best;
    split_rec(solver, floor, max_depth, cand, occ, cube, out);
    cube.pop_back();
}

} // namespace

std::vector<Cube> split_cubes(Solver& solver, std::size_t free_floor, std::span<const int> candidates,
                              std::size_t max_depth) {
    std::vector<int> cand(candidates.begin(), candidates.end());
    if (cand.empty())
        for (int v = 1; v <= solver.var_count(); ++v)
            if (!solver.is_aux(v)) cand.push_back(v);
    std::sort(cand.begin(), cand.end());
    const auto occ = solver.occurrence_counts();
    std::vector<Cube> out;
    Cube cube;
    split_rec(solver, free_floor, max_depth, cand, occ, cube, out);
    return out;
}

bool model_satisfies(const Cnf& cnf, std::span<const std::uint8_t> model) {
    if (model.size() < static_cast<std::size_t>(cnf.var_count()) + 1) return false;
    for (std::size_t i = 0; i < cnf.clause_count(); ++i) {
        bool sat = false;
        for (Lit l : cnf.clause(i))
            if ((model[static_cast<std::size_t>(var_of(l))] != 0) == (l > 0)) {
                sat = true;
                break;
            }
        if (!sat) return false;
    }
    return true;
}

} // namespace lam
