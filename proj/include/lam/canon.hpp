#pragma once

#include "lam/matrix.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lam {

/// Undirected simple graph with an initial vertex colouring. Adjacency rows
/// are bitsets of 64-bit words.
class LabeledGraph {
public:
    LabeledGraph() = default;
    explicit LabeledGraph(int n);

    int size() const noexcept { return n_; }
    std::size_t words() const noexcept { return words_; }

    void add_edge(int u, int v);
    bool adjacent(int u, int v) const {
        return (adj_[static_cast<std::size_t>(u) * words_ + static_cast<std::size_t>(v) / 64] >> (v % 64)) & 1u;
    }
    const std::uint64_t* row(int v) const { return adj_.data() + static_cast<std::size_t>(v) * words_; }
    std::size_t edge_count() const;

    void set_color(int v, int c) { colors_[static_cast<std::size_t>(v)] = c; }
    int color(int v) const { return colors_[static_cast<std::size_t>(v)]; }
    const std::vector<int>& colors() const noexcept { return colors_; }
    std::size_t color_count() const;

    /// The graph with vertex v renamed to perm[v].
    LabeledGraph relabeled(std::span<const int> perm) const;

private:
    int n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> adj_;
    std::vector<int> colors_;
};

/// Row or column band of an incidence matrix. Rows of a resortable band are
/// sorted in descending lex order after a permutation is applied.
struct Band {
    int first = 0;
    int count = 0;
    bool resortable = false;
};

struct BandStructure {
    std::vector<Band> row_bands;
    std::vector<Band> col_bands;

    /// One row band and one column band covering the whole matrix.
    static BandStructure whole(std::size_t rows, std::size_t cols, bool resortable);
    /// Throws InputError unless the bands tile rows x cols in order.
    void validate(std::size_t rows, std::size_t cols) const;
};

/// One vertex per row (0..rows-1) then one per column; edge iff the cell is 1.
/// Row band b gets colour b, column band c gets colour (#row bands + c).
LabeledGraph build_incidence_graph(const BinaryMatrix& m, const BandStructure& bands);

/// Canonical byte string: vertex count, colour-class sizes (by colour value),
/// then the upper-triangle adjacency bits under the canonical labeling.
struct CanonicalCertificate {
    std::string bytes;

    std::string hex() const;
    static CanonicalCertificate from_hex(std::string_view hex);

    friend bool operator==(const CanonicalCertificate&, const CanonicalCertificate&) = default;
    friend std::strong_ordering operator<=>(const CanonicalCertificate& a, const CanonicalCertificate& b) {
        return a.bytes <=> b.bytes;
    }
};

struct CanonicalCertificateHash {
    std::size_t operator()(const CanonicalCertificate& c) const noexcept;
};

struct CanonResult {
    CanonicalCertificate certificate;
    /// labeling[v] = canonical position of vertex v.
    std::vector<int> labeling;
    std::size_t leaves = 0;
};

/// Colour refinement to an equitable partition, individualisation of the
/// first non-singleton cell, smallest leaf certificate wins. Subtrees equivalent
/// under automorphisms found so far are skipped.
CanonResult canonical_form(const LabeledGraph& g);

/// result(row_perm[i], col_perm[j]) = source(i, j), followed by row resorting
/// within resortable bands.
struct IsoWitness {
    std::vector<int> row_perm;
    std::vector<int> col_perm;

    static IsoWitness identity(std::size_t rows, std::size_t cols);
    friend bool operator==(const IsoWitness&, const IsoWitness&) = default;
};

/// Applies the permutations and resorts resortable row bands. Throws
/// InputError when the witness is not a pair of permutations of the right size
/// or does not respect the bands.
BinaryMatrix apply_witness(const BinaryMatrix& m, const IsoWitness& w, const BandStructure& bands);

/// Sorts rows of every resortable band into descending lex order.
void resort_bands(BinaryMatrix& m, const BandStructure& bands);

/// Whether w maps `source` onto `target` exactly (after band resorting).
bool witness_maps(const BinaryMatrix& source, const BinaryMatrix& target, const IsoWitness& w,
                  const BandStructure& bands);

/// Witness from two canonical labelings of equal-certificate incidence graphs
/// of rows x cols matrices: vertex v of a goes to the vertex of b with the same
/// canonical position.
IsoWitness witness_from_labelings(std::size_t rows, std::size_t cols, std::span<const int> labeling_a,
                                  std::span<const int> labeling_b);

/// Witness mapping a onto b, or nullopt when their certificates differ. The
/// returned witness is always verified.
std::optional<IsoWitness> isomorphism(const BinaryMatrix& a, const BinaryMatrix& b, const BandStructure& bands);

/// Permutations fixing a matrix: generators plus the group order.
struct SymmetryGroup {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<IsoWitness> generators;
    std::uint64_t order = 1;
    /// Orbit sizes along the base, whose product is `order`.
    std::vector<std::uint64_t> orbit_sizes;
};

/// Automorphisms of the matrix with rows and columns as separate colour
/// classes. Each generator is checked to fix the matrix; the order comes from
/// the orbit sizes of a stabiliser chain. Throws IntegrityError if a generator
/// fails its check.
SymmetryGroup symmetry_group(const BinaryMatrix& m);

/// All group elements, by closure of the generators. Throws InputError if the
/// group order exceeds `limit`.
std::vector<IsoWitness> group_elements(const SymmetryGroup& group, std::size_t limit = 100000);

/// The orbit of m (a matrix with the same columns as the group's matrix) under
/// the column action of the group, each image row-resorted. Uses the closure
/// when the order is at most 10^5, otherwise a breadth-first orbit walk over
/// the generators.
std::vector<BinaryMatrix> apply_group_to_matrix(const SymmetryGroup& group, const BinaryMatrix& m);

} // namespace lam
