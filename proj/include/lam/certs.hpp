#pragma once

#include "lam/canon.hpp"
#include "lam/matrix.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lam {

/// One line of a solution-record file. A record either is a representative
/// (no witness) or points at one and carries the permutation that maps its
/// matrix onto the representative.
struct SolutionRecord {
    std::string id;
    std::string stage;  // "A1", "A2-level-<l>", "main"
    int case_id = 0;
    std::vector<std::string> rows;  // '0'/'1' strings
    std::string certificate;        // hex, may be empty
    BandStructure bands;            // empty means one fixed band
    std::optional<std::string> representative;
    std::optional<IsoWitness> witness;

    BinaryMatrix matrix() const { return BinaryMatrix::from_strings(rows); }
    static SolutionRecord of(std::string id, std::string stage, int case_id, const BinaryMatrix& m);

    friend bool operator==(const SolutionRecord&, const SolutionRecord&);
};

std::string record_to_json(const SolutionRecord& r);
/// Throws InputError for malformed records.
SolutionRecord record_from_json(std::string_view line);

void write_records(std::ostream& out, const std::vector<SolutionRecord>& records);
/// Skips blank lines. Throws ParseError with the 1-based line number.
std::vector<SolutionRecord> read_records(std::istream& in);

struct RecordCheck {
    bool accepted = true;
    std::string failed_id;
    std::string message;
    std::size_t checked = 0;
};

/// For each record with a witness: apply the witness to its matrix, resort
/// rows within resortable bands, and compare bit-for-bit with the referenced
/// representative. Uses no certificate data.
RecordCheck verify_solution_records(const std::vector<SolutionRecord>& records,
                                    const std::vector<SolutionRecord>& representatives);

} // namespace lam
