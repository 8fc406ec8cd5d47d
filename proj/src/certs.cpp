#include "lam/certs.hpp"

#include "lam/errors.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>
#include <unordered_map>

namespace lam {

using nlohmann::json;

SolutionRecord SolutionRecord::of(std::string id, std::string stage, int case_id, const BinaryMatrix& m) {
    SolutionRecord r;
    r.id = std::move(id);
    r.stage = std::move(stage);
    r.case_id = case_id;
    r.rows = m.to_strings();
    return r;
}

namespace {

bool same_bands(const std::vector<Band>& a, const std::vector<Band>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].first != b[i].first || a[i].count != b[i].count || a[i].resortable != b[i].resortable) return false;
    return true;
}

json bands_json(const std::vector<Band>& bands) {
    json arr = json::array();
    for (const auto& b : bands) arr.push_back({b.first, b.count, b.resortable});
    return arr;
}

std::vector<Band> bands_from(const json& arr) {
    std::vector<Band> out;
    for (const auto& b : arr) {
        if (!b.is_array() || b.size() != 3) throw InputError("band must be [first, count, resortable]");
        out.push_back({b[0].get<int>(), b[1].get<int>(), b[2].get<bool>()});
    }
    return out;
}

} // namespace

bool operator==(const SolutionRecord& a, const SolutionRecord& b) {
    return a.id == b.id && a.stage == b.stage && a.case_id == b.case_id && a.rows == b.rows &&
           a.certificate == b.certificate && same_bands(a.bands.row_bands, b.bands.row_bands) &&
           same_bands(a.bands.col_bands, b.bands.col_bands) && a.representative == b.representative &&
           a.witness == b.witness;
}

std::string record_to_json(const SolutionRecord& r) {
    json j;
    j["id"] = r.id;
    j["stage"] = r.stage;
    j["case"] = r.case_id;
    j["rows"] = r.rows;
    if (!r.certificate.empty()) j["certificate"] = r.certificate;
    if (!r.bands.row_bands.empty() || !r.bands.col_bands.empty()) {
        j["row_bands"] = bands_json(r.bands.row_bands);
        j["col_bands"] = bands_json(r.bands.col_bands);
    }
    if (r.representative) j["representative"] = *r.representative;
    if (r.witness) j["witness"] = {{"row_perm", r.witness->row_perm}, {"col_perm", r.witness->col_perm}};
    return j.dump();
}

SolutionRecord record_from_json(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw InputError(std::string("bad record JSON: ") + e.what());
    }
    try {
        SolutionRecord r;
        r.id = j.at("id").get<std::string>();
        r.stage = j.at("stage").get<std::string>();
        r.case_id = j.at("case").get<int>();
        r.rows = j.at("rows").get<std::vector<std::string>>();
        if (j.contains("certificate")) r.certificate = j["certificate"].get<std::string>();
        if (j.contains("row_bands")) r.bands.row_bands = bands_from(j["row_bands"]);
        if (j.contains("col_bands")) r.bands.col_bands = bands_from(j["col_bands"]);
        if (j.contains("representative")) r.representative = j["representative"].get<std::string>();
        if (j.contains("witness")) {
            IsoWitness w;
            w.row_perm = j["witness"].at("row_perm").get<std::vector<int>>();
            w.col_perm = j["witness"].at("col_perm").get<std::vector<int>>();
            r.witness = std::move(w);
        }
        for (const auto& row : r.rows)
            if (row.find_first_not_of("01") != std::string::npos) throw InputError("row is not a 0/1 string");
        return r;
    } catch (const json::exception& e) {
        throw InputError(std::string("bad record field: ") + e.what());
    }
}

void write_records(std::ostream& out, const std::vector<SolutionRecord>& records) {
    for (const auto& r : records) out << record_to_json(r) << '\n';
    if (!out) throw IoError("failed writing solution records");
}

std::vector<SolutionRecord> read_records(std::istream& in) {
    std::vector<SolutionRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(record_from_json(line));
        } catch (const InputError& e) {
            throw ParseError(e.what(), n);
        }
    }
    return out;
}

RecordCheck verify_solution_records(const std::vector<SolutionRecord>& records,
                                    const std::vector<SolutionRecord>& representatives) {
    std::unordered_map<std::string, const SolutionRecord*> reps;
    for (const auto& r : representatives) reps.emplace(r.id, &r);
    RecordCheck res;
    auto reject = [&](const SolutionRecord& r, std::string msg) {
        res.accepted = false;
        res.failed_id = r.id;
        res.message = std::move(msg);
        return res;
    };
    for (const auto& r : records) {
        if (!r.witness) {
            if (r.representative) return reject(r, "representative reference without witness");
            continue;
        }
        if (!r.representative) return reject(r, "witness without representative reference");
        auto it = reps.find(*r.representative);
        if (it == reps.end()) return reject(r, "unknown representative " + *r.representative);
        BinaryMatrix src, target;
        try {
            src = r.matrix();
            target = it->second->matrix();
        } catch (const InputError& e) {
            return reject(r, e.what());
        }
        if (!witness_maps(src, target, *r.witness, r.bands))
            return reject(r, "witness does not map the record onto " + *r.representative);
        ++res.checked;
    }
    return res;
}

} // namespace lam
