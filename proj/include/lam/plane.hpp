#pragma once

#include "lam/canon.hpp"
#include "lam/cnf.hpp"
#include "lam/isogen.hpp"

#include <optional>
#include <vector>

namespace lam {

/// Generic order-n plane: v x v cells with row and column sums n+1, no two
/// rows meeting twice, rows and columns in descending lex order.
Cnf build_plane_cnf(int order);

/// One plane of the given order, or nullopt if the formula is unsatisfiable.
std::optional<BinaryMatrix> find_plane(int order, const SolverFactory& factory = {});

struct PlaneClasses {
    std::size_t solutions = 0;  // lex-sorted incidence matrices
    std::vector<BinaryMatrix> representatives;
    std::vector<CanonicalCertificate> certificates;
};

/// Every lex-sorted solution, deduplicated by canonical certificate.
PlaneClasses enumerate_plane_classes(int order, const SolverFactory& factory = {});

} // namespace lam
