#pragma once

#include "lam/isogen.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace lamcli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kOutEnv = "LAM_OUT_DIR";

struct RunConfig {
    std::vector<int> cases;
    std::uint64_t conflict_budget = 0;
    std::size_t cube_floor = 0;
    std::string solver = "embedded";  // or external:<command>
    bool deterministic = true;
    std::string out;
    int jobs = 1;
    bool force = false;

    bool external() const { return solver.rfind("external:", 0) == 0; }
    std::string external_command() const { return solver.substr(9); }
    lam::SolverFactory factory() const;
};

/// Applies a JSON config file on top of cfg. Throws lam::InputError on unknown
/// keys or wrong types.
void apply_config_file(RunConfig& cfg, const std::string& path);
/// Output root: --out, else $LAM_OUT_DIR, else ./out.
std::string default_out_root();

/// Append-only job log, one JSON object per line, shared by concurrent jobs.
class Manifest {
public:
    explicit Manifest(fs::path root) : root_(std::move(root)) {}
    /// Writes the entry to <root>/manifest.jsonl and to <dir>/manifest.jsonl.
    void append(const fs::path& dir, const json& entry);

private:
    fs::path root_;
    std::mutex mu_;
};

/// Runs the jobs on at most `jobs` threads; the first exception is rethrown
/// after all jobs finish.
void run_jobs(int jobs, std::vector<std::function<void()>> work);

/// Thrown when an earlier stage's artifacts are missing.
struct MissingStage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exit codes: 0 accept, 1 reject, 2 malformed input.
int cmd_plane(const RunConfig& cfg, int order, const std::string& mode, int max_order);
int cmd_a1(const RunConfig& cfg);
int cmd_a2(const RunConfig& cfg, bool run_excluded, bool certify, bool cross_check);
int cmd_main(const RunConfig& cfg, const std::vector<std::string>& a2_ids, std::size_t a2_limit);
int cmd_encode(const RunConfig& cfg, const std::string& what, int order, const std::string& a2_id,
               const std::string& file);
int cmd_solve(const RunConfig& cfg, const std::string& cnf_path, const std::string& drat_path);
struct VerifyArgs {
    std::string cnf, drat, records, representatives;
    bool augmented = false;
    bool allow_partial = false;  // accept a valid proof without the empty clause
    std::string stage;           // re-verify stored artifacts of a1 / a2 / main
};
int cmd_verify(const RunConfig& cfg, const VerifyArgs& args);
int cmd_report(const RunConfig& cfg);

} // namespace lamcli
