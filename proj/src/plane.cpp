#include "lam/plane.hpp"

#include "lam/encode.hpp"
#include "lam/errors.hpp"

#include <numeric>
#include <set>

namespace lam {

Cnf build_plane_cnf(int order) {
    const auto p = PlaneParams::of_order(order);
    const int v = p.side();
    const auto n = static_cast<std::size_t>(v);
    Cnf cnf = Cnf::with_cells(n, n);
    std::vector<Lit> a, b;
    for (std::size_t i = 0; i < n; ++i) {
        a.clear();
        b.clear();
        for (std::size_t j = 0; j < n; ++j) {
            a.push_back(cnf.cell(i, j));
            b.push_back(cnf.cell(j, i));
        }
        add_exactly_k(cnf, a, p.line_size());
        add_exactly_k(cnf, b, p.line_size());
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    add_quadruple_clauses(cnf, idx, idx);
    // row and column lex orders can be imposed together
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::vector<Lit> r0, r1, c0, c1;
        for (std::size_t j = 0; j < n; ++j) {
            r0.push_back(cnf.cell(i, j));
            r1.push_back(cnf.cell(i + 1, j));
            c0.push_back(cnf.cell(j, i));
            c1.push_back(cnf.cell(j, i + 1));
        }
        add_lex_geq(cnf, r0, r1);
        add_lex_geq(cnf, c0, c1);
    }
    return cnf;
}

namespace {

BinaryMatrix read_cells(const Cnf& cnf, std::span<const std::uint8_t> model) {
    BinaryMatrix m(cnf.grid_rows(), cnf.grid_cols());
    for (int v = 1; v <= cnf.cell_var_count(); ++v) {
        const auto [r, c] = cnf.cell_of(v);
        m.set(r, c, model[static_cast<std::size_t>(v)] != 0);
    }
    return m;
}

} // namespace

std::optional<BinaryMatrix> find_plane(int order, const SolverFactory& factory) {
    const Cnf cnf = build_plane_cnf(order);
    Solver s = factory ? factory(cnf) : Solver::from_cnf(cnf);
    auto r = s.solve();
    if (!r.sat()) return std::nullopt;
    return read_cells(cnf, r.model);
}

PlaneClasses enumerate_plane_classes(int order, const SolverFactory& factory) {
    const Cnf cnf = build_plane_cnf(order);
    Solver s = factory ? factory(cnf) : Solver::from_cnf(cnf);
    std::vector<int> cells(static_cast<std::size_t>(cnf.cell_var_count()));
    std::iota(cells.begin(), cells.end(), 1);
    s.set_decision_priority(cells);
    PlaneClasses out;
    std::set<CanonicalCertificate> seen;
    auto res = enumerate_all(s, cells, [&](const EnumeratedModel& em, std::size_t) {
        ++out.solutions;
        auto m = read_cells(cnf, em.model);
        auto cert = canonical_form(build_incidence_graph(m, {})).certificate;
        if (seen.insert(cert).second) {
            out.representatives.push_back(std::move(m));
            out.certificates.push_back(std::move(cert));
        }
        return EnumerationDecision{EnumerationVerdict::block_only, {}};
    });
    if (!res.complete) {
        if (res.error) std::rethrow_exception(res.error);
        throw IntegrityError("plane enumeration stopped early");
    }
    return out;
}

} // namespace lam
