#include "lam/canon.hpp"

#include "lam/errors.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <numeric>
#include <set>
#include <unordered_set>

namespace lam {

LabeledGraph::LabeledGraph(int n)
    : n_(n), words_(static_cast<std::size_t>((n + 63) / 64)),
      adj_(static_cast<std::size_t>(n) * words_, 0), colors_(static_cast<std::size_t>(n), 0) {
    if (n < 0) throw InputError("negative vertex count");
}

void LabeledGraph::add_edge(int u, int v) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) throw InputError("edge endpoint out of range");
    if (u == v) throw InputError("self loop");
    adj_[static_cast<std::size_t>(u) * words_ + static_cast<std::size_t>(v) / 64] |= std::uint64_t{1} << (v % 64);
    adj_[static_cast<std::size_t>(v) * words_ + static_cast<std::size_t>(u) / 64] |= std::uint64_t{1} << (u % 64);
}

std::size_t LabeledGraph::edge_count() const {
    std::size_t deg = 0;
    for (auto w : adj_) deg += static_cast<std::size_t>(std::popcount(w));
    return deg / 2;
}

std::size_t LabeledGraph::color_count() const {
    std::set<int> s(colors_.begin(), colors_.end());
    return s.size();
}

LabeledGraph LabeledGraph::relabeled(std::span<const int> perm) const {
    if (perm.size() != static_cast<std::size_t>(n_)) throw InputError("relabeling has wrong size");
    LabeledGraph out(n_);
    for (int u = 0; u < n_; ++u) {
        out.colors_[static_cast<std::size_t>(perm[static_cast<std::size_t>(u)])] = colors_[static_cast<std::size_t>(u)];
        for (int v = u + 1; v < n_; ++v)
            if (adjacent(u, v)) out.add_edge(perm[static_cast<std::size_t>(u)], perm[static_cast<std::size_t>(v)]);
    }
    return out;
}

BandStructure BandStructure::whole(std::size_t rows, std::size_t cols, bool resortable) {
    BandStructure b;
    b.row_bands.push_back({0, static_cast<int>(rows), resortable});
    b.col_bands.push_back({0, static_cast<int>(cols), false});
    return b;
}

namespace {

void check_tiling(const std::vector<Band>& bands, std::size_t total, const char* what) {
    int at = 0;
    for (const auto& b : bands) {
        if (b.first != at || b.count <= 0) throw InputError(std::string(what) + " bands do not tile the matrix");
        at += b.count;
    }
    if (static_cast<std::size_t>(at) != total) throw InputError(std::string(what) + " bands do not tile the matrix");
}

} // namespace

void BandStructure::validate(std::size_t rows, std::size_t cols) const {
    check_tiling(row_bands, rows, "row");
    check_tiling(col_bands, cols, "column");
}

LabeledGraph build_incidence_graph(const BinaryMatrix& m, const BandStructure& bands_in) {
    BandStructure bands = bands_in.row_bands.empty() && bands_in.col_bands.empty()
                              ? BandStructure::whole(m.rows(), m.cols(), false)
                              : bands_in;
    bands.validate(m.rows(), m.cols());
    const int r = static_cast<int>(m.rows());
    LabeledGraph g(r + static_cast<int>(m.cols()));
    for (std::size_t b = 0; b < bands.row_bands.size(); ++b)
        for (int i = 0; i < bands.row_bands[b].count; ++i) g.set_color(bands.row_bands[b].first + i, static_cast<int>(b));
    const int off = static_cast<int>(bands.row_bands.size());
    for (std::size_t b = 0; b < bands.col_bands.size(); ++b)
        for (int j = 0; j < bands.col_bands[b].count; ++j)
            g.set_color(r + bands.col_bands[b].first + j, off + static_cast<int>(b));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m.at(i, j)) g.add_edge(static_cast<int>(i), r + static_cast<int>(j));
    return g;
}

std::string CanonicalCertificate::hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 15]);
    }
    return out;
}

CanonicalCertificate CanonicalCertificate::from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw InputError("bad hex digit in certificate");
    };
    if (hex.size() % 2) throw InputError("odd-length certificate");
    CanonicalCertificate c;
    for (std::size_t i = 0; i < hex.size(); i += 2)
        c.bytes.push_back(static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
    return c;
}

std::size_t CanonicalCertificateHash::operator()(const CanonicalCertificate& c) const noexcept {
    return std::hash<std::string>{}(c.bytes);
}

namespace {

// Ordered partition: `order` lists the vertices, `starts` the first position of
// each cell in increasing order.
struct Partition {
    std::vector<int> order;
    std::vector<int> starts;

    int cell_end(std::size_t ci) const {
        return ci + 1 < starts.size() ? starts[ci + 1] : static_cast<int>(order.size());
    }
    bool discrete() const { return starts.size() == order.size(); }
};

Partition initial_partition(const LabeledGraph& g) {
    Partition p;
    p.order.resize(static_cast<std::size_t>(g.size()));
    std::iota(p.order.begin(), p.order.end(), 0);
    std::stable_sort(p.order.begin(), p.order.end(), [&](int a, int b) { return g.color(a) < g.color(b); });
    for (std::size_t i = 0; i < p.order.size(); ++i)
        if (i == 0 || g.color(p.order[i]) != g.color(p.order[i - 1])) p.starts.push_back(static_cast<int>(i));
    return p;
}

class Refiner {
public:
    explicit Refiner(const LabeledGraph& g) : g_(g), w_(g.words()) {}

    // Splits cells by neighbour counts into every cell until the partition is
    // equitable. New cells are ordered by their count vectors, so the result
    // depends only on the graph and the incoming ordered partition. Returns an
    // invariant of the final partition: cell sizes and the quotient matrix.
    std::uint64_t refine(Partition& p) {
        const std::size_t n = p.order.size();
        while (true) {
            const std::size_t nc = p.starts.size();
            if (nc == n) break;
            bits_.assign(nc * w_, 0);
            for (std::size_t ci = 0; ci < nc; ++ci)
                for (int pos = p.starts[ci]; pos < p.cell_end(ci); ++pos) {
                    const int v = p.order[static_cast<std::size_t>(pos)];
                    bits_[ci * w_ + static_cast<std::size_t>(v) / 64] |= std::uint64_t{1} << (v % 64);
                }
            next_order_.clear();
            next_starts_.clear();
            bool changed = false;
            for (std::size_t ci = 0; ci < nc; ++ci) {
                const int s = p.starts[ci], e = p.cell_end(ci);
                const auto len = static_cast<std::size_t>(e - s);
                if (len == 1) {
                    next_starts_.push_back(static_cast<int>(next_order_.size()));
                    next_order_.push_back(p.order[static_cast<std::size_t>(s)]);
                    continue;
                }
                sig_.assign(len * nc, 0);
                for (std::size_t k = 0; k < len; ++k) {
                    const int v = p.order[static_cast<std::size_t>(s) + k];
                    for (std::size_t cj = 0; cj < nc; ++cj) sig_[k * nc + cj] = count(v, cj);
                }
                idx_.resize(len);
                std::iota(idx_.begin(), idx_.end(), 0);
                auto sig_less = [&](std::size_t a, std::size_t b) {
                    return std::lexicographical_compare(sig_.begin() + static_cast<std::ptrdiff_t>(a * nc),
                                                        sig_.begin() + static_cast<std::ptrdiff_t>((a + 1) * nc),
                                                        sig_.begin() + static_cast<std::ptrdiff_t>(b * nc),
                                                        sig_.begin() + static_cast<std::ptrdiff_t>((b + 1) * nc));
                };
                std::stable_sort(idx_.begin(), idx_.end(), sig_less);
                for (std::size_t k = 0; k < len; ++k) {
                    if (k == 0 || sig_less(idx_[k - 1], idx_[k])) {
                        if (k > 0) changed = true;
                        next_starts_.push_back(static_cast<int>(next_order_.size()));
                    }
                    next_order_.push_back(p.order[static_cast<std::size_t>(s) + idx_[k]]);
                }
            }
            p.order.swap(next_order_);
            p.starts.swap(next_starts_);
            if (!changed) break;
        }
        return invariant(p);
    }

private:
    int count(int v, std::size_t cell) const {
        const std::uint64_t* r = g_.row(v);
        const std::uint64_t* b = bits_.data() + cell * w_;
        int c = 0;
        for (std::size_t i = 0; i < w_; ++i) c += std::popcount(r[i] & b[i]);
        return c;
    }

    std::uint64_t invariant(const Partition& p) {
        const std::size_t nc = p.starts.size();
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&](std::uint64_t x) {
            h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        };
        mix(nc);
        bits_.assign(nc * w_, 0);
        for (std::size_t ci = 0; ci < nc; ++ci) {
            mix(static_cast<std::uint64_t>(p.cell_end(ci) - p.starts[ci]));
            const int v = p.order[static_cast<std::size_t>(p.starts[ci])];
            mix(static_cast<std::uint64_t>(g_.color(v)));
            for (int pos = p.starts[ci]; pos < p.cell_end(ci); ++pos) {
                const int u = p.order[static_cast<std::size_t>(pos)];
                bits_[ci * w_ + static_cast<std::size_t>(u) / 64] |= std::uint64_t{1} << (u % 64);
            }
        }
        // in an equitable partition the first vertex of a cell is representative
        if (nc < p.order.size()) {
            for (std::size_t ci = 0; ci < nc; ++ci) {
                const int v = p.order[static_cast<std::size_t>(p.starts[ci])];
                for (std::size_t cj = 0; cj < nc; ++cj) mix(static_cast<std::uint64_t>(count(v, cj)));
            }
        }
        return h;
    }

    const LabeledGraph& g_;
    std::size_t w_;
    std::vector<std::uint64_t> bits_;
    std::vector<int> next_order_, next_starts_, sig_;
    std::vector<std::size_t> idx_;
};

// The cell at index ci with v moved to its front as a singleton.
Partition individualize(const Partition& p, std::size_t ci, int v) {
    Partition q = p;
    const int s = p.starts[ci], e = p.cell_end(ci);
    auto first = q.order.begin() + s, last = q.order.begin() + e;
    auto it = std::find(first, last, v);
    std::rotate(first, it, it + 1);
    q.starts.insert(q.starts.begin() + static_cast<std::ptrdiff_t>(ci) + 1, s + 1);
    return q;
}

std::size_t first_nonsingleton(const Partition& p) {
    for (std::size_t ci = 0; ci < p.starts.size(); ++ci)
        if (p.cell_end(ci) - p.starts[ci] > 1) return ci;
    return p.starts.size();
}

std::string leaf_certificate(const LabeledGraph& g, const std::vector<int>& order) {
    const int n = g.size();
    std::string out;
    auto put32 = [&](std::uint32_t x) {
        for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<char>((x >> s) & 0xff));
    };
    put32(static_cast<std::uint32_t>(n));
    // colour classes appear in order of colour value along `order`
    std::vector<std::pair<int, std::uint32_t>> classes;
    for (int v : order) {
        if (classes.empty() || classes.back().first != g.color(v)) classes.emplace_back(g.color(v), 0);
        ++classes.back().second;
    }
    put32(static_cast<std::uint32_t>(classes.size()));
    for (auto [c, sz] : classes) {
        put32(static_cast<std::uint32_t>(c));
        put32(sz);
    }
    unsigned char acc = 0;
    int nbits = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            acc = static_cast<unsigned char>((acc << 1) | (g.adjacent(order[static_cast<std::size_t>(i)],
                                                                     order[static_cast<std::size_t>(j)]) ? 1 : 0));
            if (++nbits == 8) {
                out.push_back(static_cast<char>(acc));
                acc = 0;
                nbits = 0;
            }
        }
    if (nbits) out.push_back(static_cast<char>(acc << (8 - nbits)));
    return out;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

// Orbits of the group generated by the automorphisms that fix every vertex of
// `prefix`.
UnionFind stabilizer_orbits(std::size_t n, const std::vector<std::vector<int>>& auts, const std::vector<int>& prefix) {
    UnionFind uf(n);
    for (const auto& a : auts) {
        bool fixes = std::all_of(prefix.begin(), prefix.end(),
                                 [&](int v) { return a[static_cast<std::size_t>(v)] == v; });
        if (!fixes) continue;
        for (std::size_t v = 0; v < n; ++v) uf.unite(static_cast<int>(v), a[v]);
    }
    return uf;
}

constexpr std::size_t kMaxStoredAutomorphisms = 512;

class CanonSearch {
public:
    explicit CanonSearch(const LabeledGraph& g) : g_(g), refiner_(g) {}

    CanonResult run() {
        Partition p = initial_partition(g_);
        std::vector<int> prefix;
        dfs(std::move(p), prefix);
        CanonResult r;
        r.certificate.bytes = best_cert_;
        r.labeling.assign(static_cast<std::size_t>(g_.size()), 0);
        for (std::size_t i = 0; i < best_order_.size(); ++i) r.labeling[static_cast<std::size_t>(best_order_[i])] = static_cast<int>(i);
        r.leaves = leaves_;
        return r;
    }

private:
    // -1: current path is already smaller than the best path, 0: equal so far,
    // 1: larger (prune).
    int compare_path() const {
        if (!have_best_) return -1;
        const std::size_t d = path_inv_.size();
        for (std::size_t i = 0; i < d; ++i) {
            if (i >= best_inv_.size()) return 1;
            if (path_inv_[i] != best_inv_[i]) return path_inv_[i] < best_inv_[i] ? -1 : 1;
        }
        return 0;
    }

    void dfs(Partition p, std::vector<int>& prefix) {
        path_inv_.push_back(refiner_.refine(p));
        const int rel = compare_path();
        if (rel > 0) {
            path_inv_.pop_back();
            return;
        }
        if (p.discrete()) {
            leaf(p.order, rel, prefix);
            path_inv_.pop_back();
            return;
        }
        const std::size_t ci = first_nonsingleton(p);
        std::vector<int> cands(p.order.begin() + p.starts[ci], p.order.begin() + p.cell_end(ci));
        std::sort(cands.begin(), cands.end());
        std::vector<int> explored;
        for (int v : cands) {
            if (!explored.empty() && !auts_.empty()) {
                UnionFind uf = stabilizer_orbits(static_cast<std::size_t>(g_.size()), auts_, prefix);
                const int rv = uf.find(v);
                if (std::any_of(explored.begin(), explored.end(), [&](int u) { return uf.find(u) == rv; })) continue;
            }
            explored.push_back(v);
            prefix.push_back(v);
            dfs(individualize(p, ci, v), prefix);
            prefix.pop_back();
            if (jump_to_ >= 0) {
                if (static_cast<int>(prefix.size()) > jump_to_) break;
                jump_to_ = -1;
            }
        }
        path_inv_.pop_back();
    }

    void leaf(const std::vector<int>& order, int rel, const std::vector<int>& prefix) {
        ++leaves_;
        std::string cert = leaf_certificate(g_, order);
        if (rel < 0 || cert < best_cert_) {
            best_cert_ = std::move(cert);
            best_order_ = order;
            best_inv_ = path_inv_;
            best_prefix_ = prefix;
            have_best_ = true;
            return;
        }
        if (cert != best_cert_) return;
        // The automorphism maps the best leaf's branch at the node where the two
        // paths split onto the current branch, so the rest of this branch holds
        // nothing new.
        std::size_t split = 0;
        while (split < prefix.size() && split < best_prefix_.size() && prefix[split] == best_prefix_[split]) ++split;
        jump_to_ = static_cast<int>(split);
        std::vector<int> a(order.size());
        bool identity = true;
        for (std::size_t i = 0; i < order.size(); ++i) {
            a[static_cast<std::size_t>(best_order_[i])] = order[i];
            identity = identity && best_order_[i] == order[i];
        }
        if (!identity && auts_.size() < kMaxStoredAutomorphisms) auts_.push_back(std::move(a));
    }

    const LabeledGraph& g_;
    Refiner refiner_;
    std::vector<std::uint64_t> path_inv_, best_inv_;
    std::string best_cert_;
    std::vector<int> best_order_, best_prefix_;
    bool have_best_ = false;
    int jump_to_ = -1;
    std::vector<std::vector<int>> auts_;
    std::size_t leaves_ = 0;
};

// Stabiliser chain along the first path of the search tree. At each depth the
// orbit of the base point in the pointwise stabiliser of the earlier base
// points is computed exactly: every cell member not yet reached by known
// generators is tested by searching its subtree for a leaf equivalent to the
// reference leaf.
class AutomorphismSearch {
public:
    explicit AutomorphismSearch(const LabeledGraph& g) : g_(g), refiner_(g) {}

    void run() {
        const std::size_t n = static_cast<std::size_t>(g_.size());
        Partition p = initial_partition(g_);
        std::vector<Partition> nodes;
        std::vector<std::size_t> cells;
        while (true) {
            ref_inv_.push_back(refiner_.refine(p));
            nodes.push_back(p);
            if (p.discrete()) break;
            const std::size_t ci = first_nonsingleton(p);
            cells.push_back(ci);
            const int v = *std::min_element(p.order.begin() + p.starts[ci], p.order.begin() + p.cell_end(ci));
            base_.push_back(v);
            p = individualize(p, ci, v);
        }
        ref_order_ = p.order;
        ref_cert_ = leaf_certificate(g_, ref_order_);
        orbit_sizes_.assign(base_.size(), 1);
        for (std::size_t d = base_.size(); d-- > 0;) {
            std::vector<int> prefix(base_.begin(), base_.begin() + static_cast<std::ptrdiff_t>(d));
            const Partition& node = nodes[d];
            const std::size_t ci = cells[d];
            std::vector<int> cell(node.order.begin() + node.starts[ci], node.order.begin() + node.cell_end(ci));
            std::sort(cell.begin(), cell.end());
            for (int w : cell) {
                UnionFind uf = stabilizer_orbits(n, gens_, prefix);
                if (uf.find(w) == uf.find(base_[d])) continue;
                std::vector<int> found;
                if (find_equivalent(individualize(node, ci, w), d + 1, found)) gens_.push_back(std::move(found));
            }
            UnionFind uf = stabilizer_orbits(n, gens_, prefix);
            const int root = uf.find(base_[d]);
            std::uint64_t size = 0;
            for (int w : cell)
                if (uf.find(w) == root) ++size;
            orbit_sizes_[d] = size;
        }
    }

    const std::vector<std::vector<int>>& generators() const { return gens_; }
    const std::vector<std::uint64_t>& orbit_sizes() const { return orbit_sizes_; }

private:
    bool find_equivalent(Partition p, std::size_t depth, std::vector<int>& out) {
        const std::uint64_t inv = refiner_.refine(p);
        if (depth >= ref_inv_.size() || inv != ref_inv_[depth]) return false;
        if (p.discrete()) {
            if (leaf_certificate(g_, p.order) != ref_cert_) return false;
            out.assign(p.order.size(), 0);
            for (std::size_t i = 0; i < p.order.size(); ++i) out[static_cast<std::size_t>(ref_order_[i])] = p.order[i];
            return true;
        }
        const std::size_t ci = first_nonsingleton(p);
        std::vector<int> cands(p.order.begin() + p.starts[ci], p.order.begin() + p.cell_end(ci));
        std::sort(cands.begin(), cands.end());
        for (int v : cands)
            if (find_equivalent(individualize(p, ci, v), depth + 1, out)) return true;
        return false;
    }

    const LabeledGraph& g_;
    Refiner refiner_;
    std::vector<std::uint64_t> ref_inv_;
    std::vector<int> base_;
    std::vector<int> ref_order_;
    std::string ref_cert_;
    std::vector<std::vector<int>> gens_;
    std::vector<std::uint64_t> orbit_sizes_;
};

std::vector<int> band_of_rows(const BandStructure& b, std::size_t rows) {
    std::vector<int> out(rows, 0);
    for (std::size_t k = 0; k < b.row_bands.size(); ++k)
        for (int i = 0; i < b.row_bands[k].count; ++i) out[static_cast<std::size_t>(b.row_bands[k].first + i)] = static_cast<int>(k);
    return out;
}

std::vector<int> band_of_cols(const BandStructure& b, std::size_t cols) {
    std::vector<int> out(cols, 0);
    for (std::size_t k = 0; k < b.col_bands.size(); ++k)
        for (int i = 0; i < b.col_bands[k].count; ++i) out[static_cast<std::size_t>(b.col_bands[k].first + i)] = static_cast<int>(k);
    return out;
}

bool is_permutation_of(const std::vector<int>& p, std::size_t n) {
    if (p.size() != n) return false;
    std::vector<char> seen(n, 0);
    for (int x : p) {
        if (x < 0 || static_cast<std::size_t>(x) >= n || seen[static_cast<std::size_t>(x)]) return false;
        seen[static_cast<std::size_t>(x)] = 1;
    }
    return true;
}

BandStructure effective(const BandStructure& b, const BinaryMatrix& m) {
    if (b.row_bands.empty() && b.col_bands.empty()) return BandStructure::whole(m.rows(), m.cols(), false);
    return b;
}

} // namespace

CanonResult canonical_form(const LabeledGraph& g) {
    return CanonSearch(g).run();
}

IsoWitness IsoWitness::identity(std::size_t rows, std::size_t cols) {
    IsoWitness w;
    w.row_perm.resize(rows);
    w.col_perm.resize(cols);
    std::iota(w.row_perm.begin(), w.row_perm.end(), 0);
    std::iota(w.col_perm.begin(), w.col_perm.end(), 0);
    return w;
}

void resort_bands(BinaryMatrix& m, const BandStructure& bands) {
    for (const auto& b : bands.row_bands)
        if (b.resortable) m.sort_rows_desc(static_cast<std::size_t>(b.first), static_cast<std::size_t>(b.count));
}

BinaryMatrix apply_witness(const BinaryMatrix& m, const IsoWitness& w, const BandStructure& bands_in) {
    const BandStructure bands = effective(bands_in, m);
    bands.validate(m.rows(), m.cols());
    if (!is_permutation_of(w.row_perm, m.rows())) throw InputError("row_perm is not a permutation of the rows");
    if (!is_permutation_of(w.col_perm, m.cols())) throw InputError("col_perm is not a permutation of the columns");
    const auto rb = band_of_rows(bands, m.rows());
    const auto cb = band_of_cols(bands, m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (rb[i] != rb[static_cast<std::size_t>(w.row_perm[i])]) throw InputError("row_perm moves a row across bands");
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (cb[j] != cb[static_cast<std::size_t>(w.col_perm[j])]) throw InputError("col_perm moves a column across bands");
    BinaryMatrix out = m.permuted(w.row_perm, w.col_perm);
    resort_bands(out, bands);
    return out;
}

bool witness_maps(const BinaryMatrix& source, const BinaryMatrix& target, const IsoWitness& w,
                  const BandStructure& bands_in) {
    if (source.rows() != target.rows() || source.cols() != target.cols()) return false;
    const BandStructure bands = effective(bands_in, source);
    BinaryMatrix img;
    try {
        img = apply_witness(source, w, bands);
    } catch (const InputError&) {
        return false;
    }
    BinaryMatrix t = target;
    resort_bands(t, bands);
    return img == t;
}

IsoWitness witness_from_labelings(std::size_t rows, std::size_t cols, std::span<const int> labeling_a,
                                  std::span<const int> labeling_b) {
    const std::size_t n = rows + cols;
    if (labeling_a.size() != n || labeling_b.size() != n) throw InputError("labeling size does not match the matrix");
    std::vector<int> inv_b(n);
    for (std::size_t v = 0; v < n; ++v) inv_b[static_cast<std::size_t>(labeling_b[v])] = static_cast<int>(v);
    IsoWitness w;
    const int r = static_cast<int>(rows);
    for (std::size_t i = 0; i < rows; ++i) w.row_perm.push_back(inv_b[static_cast<std::size_t>(labeling_a[i])]);
    for (std::size_t j = 0; j < cols; ++j) w.col_perm.push_back(inv_b[static_cast<std::size_t>(labeling_a[rows + j])] - r);
    return w;
}

std::optional<IsoWitness> isomorphism(const BinaryMatrix& a, const BinaryMatrix& b, const BandStructure& bands_in) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return std::nullopt;
    const BandStructure bands = effective(bands_in, a);
    const auto ca = canonical_form(build_incidence_graph(a, bands));
    const auto cb = canonical_form(build_incidence_graph(b, bands));
    if (ca.certificate != cb.certificate) return std::nullopt;
    IsoWitness w = witness_from_labelings(a.rows(), a.cols(), ca.labeling, cb.labeling);
    if (!witness_maps(a, b, w, bands)) throw IntegrityError("isomorphism witness does not map the matrices");
    return w;
}

SymmetryGroup symmetry_group(const BinaryMatrix& m) {
    const auto bands = BandStructure::whole(m.rows(), m.cols(), false);
    const LabeledGraph g = build_incidence_graph(m, bands);
    AutomorphismSearch search(g);
    search.run();
    SymmetryGroup out;
    out.rows = m.rows();
    out.cols = m.cols();
    const int r = static_cast<int>(m.rows());
    for (const auto& a : search.generators()) {
        IsoWitness w;
        for (std::size_t i = 0; i < m.rows(); ++i) w.row_perm.push_back(a[i]);
        for (std::size_t j = 0; j < m.cols(); ++j) w.col_perm.push_back(a[m.rows() + j] - r);
        if (!is_permutation_of(w.row_perm, m.rows()) || !is_permutation_of(w.col_perm, m.cols()) ||
            m.permuted(w.row_perm, w.col_perm) != m)
            throw IntegrityError("automorphism generator does not fix the matrix");
        out.generators.push_back(std::move(w));
    }
    out.orbit_sizes = search.orbit_sizes();
    for (auto s : out.orbit_sizes) out.order *= s;
    return out;
}

namespace {

std::vector<int> flat(const IsoWitness& w, std::size_t rows) {
    std::vector<int> v(w.row_perm);
    for (int c : w.col_perm) v.push_back(c + static_cast<int>(rows));
    return v;
}

IsoWitness unflat(const std::vector<int>& v, std::size_t rows) {
    IsoWitness w;
    w.row_perm.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rows));
    for (std::size_t j = rows; j < v.size(); ++j) w.col_perm.push_back(v[j] - static_cast<int>(rows));
    return w;
}

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept {
        std::size_t h = 0;
        for (int x : v) h = h * 1000003u + static_cast<std::size_t>(x);
        return h;
    }
};

} // namespace

std::vector<IsoWitness> group_elements(const SymmetryGroup& group, std::size_t limit) {
    if (group.order > limit) throw InputError("group order " + std::to_string(group.order) + " exceeds closure limit");
    const std::size_t n = group.rows + group.cols;
    std::vector<int> id(n);
    std::iota(id.begin(), id.end(), 0);
    std::vector<std::vector<int>> gens;
    for (const auto& g : group.generators) gens.push_back(flat(g, group.rows));
    std::unordered_set<std::vector<int>, VecHash> seen{id};
    std::vector<std::vector<int>> elems{id};
    for (std::size_t at = 0; at < elems.size(); ++at) {
        for (const auto& g : gens) {
            std::vector<int> c(n);
            for (std::size_t v = 0; v < n; ++v) c[v] = g[static_cast<std::size_t>(elems[at][v])];
            if (seen.insert(c).second) {
                if (elems.size() >= limit) throw InputError("group closure exceeds limit");
                elems.push_back(std::move(c));
            }
        }
    }
    if (elems.size() != group.order)
        throw IntegrityError("closure has " + std::to_string(elems.size()) + " elements, expected " +
                             std::to_string(group.order));
    std::vector<IsoWitness> out;
    out.reserve(elems.size());
    for (const auto& e : elems) out.push_back(unflat(e, group.rows));
    return out;
}

std::vector<BinaryMatrix> apply_group_to_matrix(const SymmetryGroup& group, const BinaryMatrix& m) {
    if (m.cols() != group.cols) throw InputError("matrix has " + std::to_string(m.cols()) + " columns, group acts on " +
                                                 std::to_string(group.cols));
    std::vector<int> rows_id(m.rows());
    std::iota(rows_id.begin(), rows_id.end(), 0);
    auto image = [&](const BinaryMatrix& x, const std::vector<int>& cp) {
        BinaryMatrix y = x.permuted(rows_id, cp);
        y.sort_rows_desc();
        return y;
    };
    std::set<BinaryMatrix> orbit;
    BinaryMatrix start = m;
    start.sort_rows_desc();
    if (group.order <= 100000) {
        for (const auto& e : group_elements(group)) orbit.insert(image(m, e.col_perm));
    } else {
        std::deque<BinaryMatrix> todo{start};
        orbit.insert(start);
        while (!todo.empty()) {
            BinaryMatrix x = std::move(todo.front());
            todo.pop_front();
            for (const auto& g : group.generators) {
                BinaryMatrix y = image(x, g.col_perm);
                if (orbit.insert(y).second) todo.push_back(std::move(y));
            }
        }
    }
    return {orbit.begin(), orbit.end()};
}

} // namespace lam
