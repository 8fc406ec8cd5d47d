#include "lam/pipeline.hpp"

#include "lam/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

namespace lam {

namespace {

constexpr std::array<int, 15> kNoA2{4, 10, 14, 19, 28, 29, 30, 31, 35, 40, 44, 45, 59, 61, 62};
constexpr std::array<int, 5> kWeight16{32, 38, 54, 57, 64};
constexpr std::array<int, 1> kTheoretical{52};

template <std::size_t N>
bool listed(const std::array<int, N>& a, int id) {
    return std::find(a.begin(), a.end(), id) != a.end();
}

constexpr std::size_t kA1Solutions = 3366;
constexpr std::size_t kA1Classes = 66;

} // namespace

std::string_view exclusion_name(Exclusion e) {
    switch (e) {
    case Exclusion::none: return "none";
    case Exclusion::no_a2s: return "no-a2s";
    case Exclusion::weight16: return "weight16";
    case Exclusion::theoretical: return "theoretical";
    }
    return "?";
}

Exclusion case_exclusion(int case_id) {
    if (case_id < 1 || case_id > kCaseCount) throw InputError("case id must lie in 1..66");
    if (listed(kNoA2, case_id)) return Exclusion::no_a2s;
    if (listed(kWeight16, case_id)) return Exclusion::weight16;
    if (listed(kTheoretical, case_id)) return Exclusion::theoretical;
    return Exclusion::none;
}

const std::array<int, kCaseCount>& literature_case_numbers() {
    // Our numbering (representatives in descending lex order) coincides with
    // the published table; kept as data so a different order can be mapped.
    static const std::array<int, kCaseCount> table = [] {
        std::array<int, kCaseCount> t{};
        std::iota(t.begin(), t.end(), 1);
        return t;
    }();
    return table;
}

CaseContext make_case_context(int case_id, const BinaryMatrix& a1) {
    require_valid_a1(a1);
    CaseContext c;
    c.case_id = case_id;
    c.a1 = a1;
    c.a3 = forced_a3(a1);
    c.a4 = complete_a4(a1);
    try {
        c.level_plan = build_level_plan(a1);
    } catch (const InfeasibleCase&) {
        c.level_plan.reset();
    }
    c.symmetry = symmetry_group(a1);
    c.excluded = case_exclusion(case_id);
    return c;
}

Cnf build_a1_cnf() {
    using namespace layout;
    Cnf cnf = Cnf::with_cells(kA1Rows, kWordCols);
    std::vector<Lit> lits;
    for (int r = 0; r < kA1Rows; ++r) {
        lits.clear();
        for (int j = 0; j < kWordCols; ++j) lits.push_back(cnf.cell(static_cast<std::size_t>(r), static_cast<std::size_t>(j)));
        add_exactly_k(cnf, lits, kWordRowSums.top);
    }
    std::vector<int> rows(kA1Rows), cols(kWordCols);
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    add_quadruple_clauses(cnf, rows, cols);
    for (int r = 0; r + 1 < kA1Rows; ++r) {
        std::vector<Lit> a, b;
        for (int j = 0; j < kWordCols; ++j) {
            a.push_back(cnf.cell(static_cast<std::size_t>(r), static_cast<std::size_t>(j)));
            b.push_back(cnf.cell(static_cast<std::size_t>(r + 1), static_cast<std::size_t>(j)));
        }
        add_lex_geq(cnf, a, b);
    }
    for (int j = 0; j + 1 < kWordCols; ++j) {
        std::vector<Lit> a, b;
        for (int r = 0; r < kA1Rows; ++r) {
            a.push_back(cnf.cell(static_cast<std::size_t>(r), static_cast<std::size_t>(j)));
            b.push_back(cnf.cell(static_cast<std::size_t>(r), static_cast<std::size_t>(j + 1)));
        }
        add_lex_geq(cnf, a, b);
    }
    return cnf;
}

std::vector<int> a1_true_cells(const Cnf& cnf, const BinaryMatrix& a1) {
    std::vector<int> out;
    for (std::size_t r = 0; r < a1.rows(); ++r)
        for (std::size_t c = 0; c < a1.cols(); ++c)
            if (a1.at(r, c)) out.push_back(cnf.cell(r, c));
    return out;
}

A1StageResult run_a1_stage(const A1Options& opts) {
    A1StageResult out;
    out.cnf = build_a1_cnf();
    Solver solver = opts.factory ? opts.factory(out.cnf) : Solver::from_cnf(out.cnf);
    if (opts.proof) solver.set_proof(opts.proof);
    std::vector<int> projection(static_cast<std::size_t>(out.cnf.cell_var_count()));
    std::iota(projection.begin(), projection.end(), 1);
    solver.set_decision_priority(projection);
    auto res = enumerate_all(solver, projection, nullptr);
    if (opts.proof) opts.proof->flush();

    std::vector<CanonicalCertificate> certs;
    std::unordered_map<CanonicalCertificate, std::size_t, CanonicalCertificateHash> class_index;
    std::vector<std::size_t> raw_class;
    std::vector<std::size_t> best;  // per raw class, index of its lex-largest member
    for (const auto& em : res.recorded) {
        BinaryMatrix m(layout::kA1Rows, layout::kWordCols);
        for (std::size_t i = 0; i < projection.size(); ++i) {
            const auto [r, c] = out.cnf.cell_of(projection[i]);
            m.set(r, c, em.bits[i] != 0);
        }
        auto cert = canonical_form(build_incidence_graph(m, {})).certificate;
        auto [it, fresh] = class_index.emplace(cert, certs.size());
        if (fresh) {
            certs.push_back(cert);
            best.push_back(out.solutions.size());
        } else if (m > out.solutions[best[it->second]]) {
            best[it->second] = out.solutions.size();
        }
        raw_class.push_back(it->second);
        out.solutions.push_back(std::move(m));
    }
    if (opts.check_counts && (out.solutions.size() != kA1Solutions || certs.size() != kA1Classes))
        throw IntegrityError("A1 stage found " + std::to_string(out.solutions.size()) + " solutions in " +
                             std::to_string(certs.size()) + " classes, expected 3366 / 66");

    // number classes by representative, lex-largest first
    std::vector<std::size_t> order(certs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out.solutions[best[a]] > out.solutions[best[b]];
    });
    std::vector<std::size_t> case_of_raw(certs.size());
    for (std::size_t k = 0; k < order.size(); ++k) case_of_raw[order[k]] = k;

    for (std::size_t k = 0; k < order.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        const auto& rep = out.solutions[best[order[k]]];
        out.cases.push_back(make_case_context(id, rep));
        auto r = SolutionRecord::of("a1-c" + std::to_string(id), "A1", id, rep);
        r.certificate = certs[order[k]].hex();
        out.records.push_back(std::move(r));
    }
    for (std::size_t s = 0; s < out.solutions.size(); ++s) {
        const std::size_t k = case_of_raw[raw_class[s]];
        out.class_of.push_back(k);
        if (s == best[raw_class[s]]) continue;
        const auto& rep = out.cases[k].a1;
        auto w = isomorphism(out.solutions[s], rep, {});
        if (!w) throw IntegrityError("A1 solution " + std::to_string(s) + " has its class certificate but no isomorphism");
        const int id = static_cast<int>(k) + 1;
        auto r = SolutionRecord::of("a1-s" + std::to_string(s), "A1", id, out.solutions[s]);
        r.certificate = certs[raw_class[s]].hex();
        r.representative = "a1-c" + std::to_string(id);
        r.witness = std::move(*w);
        out.records.push_back(std::move(r));
    }
    return out;
}

std::optional<GenerationLog> run_a2_stage(const CaseContext& c, const A2StageOptions& opts) {
    if (!opts.run_excluded && (c.excluded == Exclusion::weight16 || c.excluded == Exclusion::theoretical))
        return std::nullopt;
    if (!c.level_plan) {
        GenerationLog empty;
        empty.level_reps.emplace_back();
        empty.level_certs.emplace_back();
        return empty;
    }
    return generate_levelwise(c.a1, *c.level_plan, opts.generation);
}

} // namespace lam
