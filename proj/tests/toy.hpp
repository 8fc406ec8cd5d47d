#pragma once

// Small partial planes in the shape of the main stage: the first K rows and a
// few columns are known, the rest is to be filled.

#include "lam/pipeline.hpp"
#include "oracle.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace toy {

struct Toy {
    lam::BinaryMatrix plane;  // the source plane
    lam::BinaryMatrix partial;
    lam::BinaryMatrix known;
    int order = 0;
    int known_rows = 0;
    std::vector<int> known_cols;
};

inline Toy make(const lam::BinaryMatrix& plane, int order, int known_rows, std::vector<int> known_cols) {
    Toy t;
    t.plane = plane;
    t.order = order;
    t.known_rows = known_rows;
    t.known_cols = std::move(known_cols);
    const std::size_t v = plane.rows();
    t.partial = lam::BinaryMatrix(v, v);
    t.known = lam::BinaryMatrix(v, v);
    for (std::size_t r = 0; r < v; ++r)
        for (std::size_t c = 0; c < v; ++c) {
            const bool k = static_cast<int>(r) < known_rows ||
                           std::find(t.known_cols.begin(), t.known_cols.end(), static_cast<int>(c)) != t.known_cols.end();
            t.known.set(r, c, k);
            if (k) t.partial.set(r, c, plane.at(r, c));
        }
    return t;
}

struct Features {
    bool sums = true;
    bool chains = true;  // only meaningful for order 2 (two 1s per column below the known rows)
    bool row_lex = true;
};

/// Instance over `cols`; blocks are the known rows whose unknown points all lie in cols.
inline lam::MainSpec spec(const Toy& t, const std::vector<int>& cols, Features f = {},
                          const std::vector<int>* row_lex_cols = nullptr) {
    const int v = static_cast<int>(t.partial.rows());
    lam::MainSpec s;
    s.ctx.assembled = t.partial;
    s.ctx.known = t.known;
    for (int j : t.known_cols) {
        std::vector<int> cj;
        for (int r = 0; r < v; ++r)
            if (t.partial.at(static_cast<std::size_t>(r), static_cast<std::size_t>(j))) cj.push_back(r);
        s.ctx.columns_known.push_back(std::move(cj));
    }
    auto is_known_col = [&](int c) { return std::find(t.known_cols.begin(), t.known_cols.end(), c) != t.known_cols.end(); };
    auto in_cols = [&](int c) { return std::find(cols.begin(), cols.end(), c) != cols.end(); };
    for (int i = 0; i < t.known_rows; ++i) {
        std::vector<int> ri;
        bool covered = true;
        for (int c = 0; c < v; ++c)
            if (t.partial.at(static_cast<std::size_t>(i), static_cast<std::size_t>(c))) {
                ri.push_back(c);
                covered = covered && (is_known_col(c) || in_cols(c));
            }
        s.ctx.rows_known.push_back(std::move(ri));
        if (covered) s.blocks.push_back(i);
    }
    s.known_cols = t.known_cols;
    s.instance_cols = cols;
    for (int r = t.known_rows; r < v; ++r) s.target_rows.push_back(r);
    s.sum_rows = {t.known_rows, v};
    s.lex_rows = {t.known_rows, v};
    if (f.sums)
        for (int c : cols) {
            int above = 0;
            for (int r = 0; r < t.known_rows; ++r) above += t.partial.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            s.column_sums.push_back(t.order + 1 - above);
        }
    if (f.chains && t.order == 2)
        for (int i = 0; i < t.known_rows; ++i) {
            std::vector<int> chain;
            for (int c : cols) {
                bool only_i = true;
                for (int r = 0; r < t.known_rows; ++r)
                    only_i = only_i && (t.partial.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) == (r == i));
                if (only_i) chain.push_back(c);
            }
            if (chain.size() >= 2) s.column_chains.push_back(std::move(chain));
        }
    if (f.row_lex) {
        // unknown rows with the same known-column pattern share a 1 there
        std::vector<bool> used(static_cast<std::size_t>(v), false);
        for (int r = t.known_rows; r < v; ++r) {
            if (used[static_cast<std::size_t>(r)]) continue;
            std::vector<int> g{r};
            bool any = false;
            for (int j : t.known_cols) any = any || t.partial.at(static_cast<std::size_t>(r), static_cast<std::size_t>(j));
            if (!any) continue;
            for (int o = r + 1; o < v; ++o) {
                bool same = true;
                for (int j : t.known_cols)
                    same = same && t.partial.at(static_cast<std::size_t>(r), static_cast<std::size_t>(j)) ==
                                       t.partial.at(static_cast<std::size_t>(o), static_cast<std::size_t>(j));
                if (same) {
                    g.push_back(o);
                    used[static_cast<std::size_t>(o)] = true;
                }
            }
            if (g.size() >= 2) s.row_groups.push_back(std::move(g));
        }
        if (row_lex_cols) s.row_lex_cols = *row_lex_cols;
    }
    return s;
}

inline std::vector<int> unknown_cols(const Toy& t) {
    std::vector<int> out;
    for (int c = 0; c < static_cast<int>(t.plane.cols()); ++c)
        if (std::find(t.known_cols.begin(), t.known_cols.end(), c) == t.known_cols.end()) out.push_back(c);
    return out;
}

// Points of the last line are the known columns.
inline Toy plane_toy(int q, int known_rows) {
    auto p = oracle::desarguesian_plane(q);
    std::vector<int> kc;
    for (int c = 0; c < static_cast<int>(p.cols()); ++c)
        if (p.at(p.rows() - 1, static_cast<std::size_t>(c))) kc.push_back(c);
    return make(p, q, known_rows, kc);
}

// Row permutations inside each row group times column permutations inside each chain.
inline std::vector<lam::BinaryMatrix> orbit_under_spec_group(const lam::BinaryMatrix& m, const lam::MainSpec& s) {
    std::vector<lam::BinaryMatrix> cur{m};
    auto expand_rows = [&](const std::vector<int>& g) {
        std::vector<lam::BinaryMatrix> next;
        for (const auto& x : cur) {
            std::vector<int> p = g;
            std::sort(p.begin(), p.end());
            do {
                std::vector<int> rp(x.rows()), cp(x.cols());
                std::iota(rp.begin(), rp.end(), 0);
                std::iota(cp.begin(), cp.end(), 0);
                for (std::size_t i = 0; i < g.size(); ++i) rp[static_cast<std::size_t>(g[i])] = p[i];
                next.push_back(x.permuted(rp, cp));
            } while (std::next_permutation(p.begin(), p.end()));
        }
        cur = std::move(next);
    };
    auto expand_cols = [&](const std::vector<int>& g) {
        std::vector<lam::BinaryMatrix> next;
        for (const auto& x : cur) {
            std::vector<int> p = g;
            std::sort(p.begin(), p.end());
            do {
                std::vector<int> rp(x.rows()), cp(x.cols());
                std::iota(rp.begin(), rp.end(), 0);
                std::iota(cp.begin(), cp.end(), 0);
                for (std::size_t i = 0; i < g.size(); ++i) cp[static_cast<std::size_t>(g[i])] = p[i];
                next.push_back(x.permuted(rp, cp));
            } while (std::next_permutation(p.begin(), p.end()));
        }
        cur = std::move(next);
    };
    for (const auto& g : s.row_groups) expand_rows(g);
    for (const auto& g : s.column_chains) expand_cols(g);
    return cur;
}

inline bool satisfies_instance(lam::Solver& s, const lam::Cnf& cnf, const lam::BinaryMatrix& m, const std::vector<int>& cols) {
    std::vector<lam::Lit> as;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (int c : cols)
            if (auto v = cnf.cell_var(r, static_cast<std::size_t>(c))) as.push_back(m.at(r, static_cast<std::size_t>(c)) ? *v : -*v);
    return s.solve(as).sat();
}

struct ToyRun {
    lam::MainSpec base, ext;
};

// Base over the block of the first known row, extension over all unknown columns.
inline ToyRun toy_run(const Toy& t) {
    ToyRun r;
    std::vector<int> base, rest;
    for (int c : unknown_cols(t)) (t.partial.at(0, static_cast<std::size_t>(c)) ? base : rest).push_back(c);
    std::vector<int> all = base;
    all.insert(all.end(), rest.begin(), rest.end());
    r.base = spec(t, base);
    r.ext = spec(t, all, {}, &base);
    return r;
}

} // namespace toy
