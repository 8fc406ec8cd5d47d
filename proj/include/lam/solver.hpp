#pragma once

#include "lam/cnf.hpp"

#include <cstdint>
#include <exception>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lam {

/// Receives clause additions and deletions as the solver produces them.
class ProofSink {
public:
    virtual ~ProofSink() = default;
    virtual void add(std::span<const Lit> clause) = 0;
    virtual void remove(std::span<const Lit> clause) = 0;
    virtual void flush() {}
};

/// Writes DRAT to a stream, either text ("1 -2 0", "d 1 -2 0") or binary
/// ('a'/'d' bytes followed by variable-length literals).
class DratStreamSink : public ProofSink {
public:
    DratStreamSink(std::ostream& out, bool binary);
    void add(std::span<const Lit> clause) override;
    void remove(std::span<const Lit> clause) override;
    void flush() override;
    std::size_t bytes() const noexcept { return bytes_; }

private:
    void write(char tag, std::span<const Lit> clause);
    std::ostream& out_;
    bool binary_;
    std::size_t bytes_ = 0;
    std::string buf_;
};

/// Forwards every step to several sinks.
class TeeSink : public ProofSink {
public:
    explicit TeeSink(std::vector<ProofSink*> sinks) : sinks_(std::move(sinks)) {}
    void add(std::span<const Lit> clause) override;
    void remove(std::span<const Lit> clause) override;
    void flush() override;

private:
    std::vector<ProofSink*> sinks_;
};

struct SolverOptions {
    /// Deterministic mode never uses random decisions; runs are reproducible.
    bool deterministic = true;
    std::uint64_t seed = 0;
    /// Conflicts allowed per solve call; 0 means unlimited.
    std::uint64_t conflict_budget = 0;
    int restart_base = 100;
};

struct SolverStats {
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t restarts = 0;
    std::uint64_t learnts_deleted = 0;
    std::uint64_t solves = 0;
};

enum class Verdict { sat, unsat };

struct SolveResult {
    Verdict verdict = Verdict::unsat;
    /// model[v] is 1 or 0 for v in 1..var_count; empty after UNSAT.
    std::vector<std::uint8_t> model;
    /// For UNSAT: the clause the solver proved, the negation of the assumptions
    /// (empty when solved without assumptions).
    std::vector<Lit> derived;

    bool sat() const noexcept { return verdict == Verdict::sat; }
    bool value(int v) const { return model.at(static_cast<std::size_t>(v)) != 0; }
};

/// Result of propagating a set of assumptions without searching.
struct ProbeResult {
    bool conflict = false;
    /// 1 true, 0 false, 2 unassigned; indexed by variable.
    std::vector<std::uint8_t> values;
};

/// CDCL solver: two watched literals, first-UIP learning with minimisation,
/// VSIDS with phase saving, Luby restarts, activity-based learnt deletion.
class Solver {
public:
    explicit Solver(int var_count, SolverOptions opts = {});
    /// Loads every clause of `cnf` and marks its auxiliaries.
    static Solver from_cnf(const Cnf& cnf, SolverOptions opts = {});

    Solver(Solver&&) noexcept;
    Solver& operator=(Solver&&) noexcept;
    ~Solver();

    int var_count() const noexcept;
    /// Grows the variable universe to n.
    void reserve_vars(int n);

    /// The sink receives learnt clauses, deletions, blocking clauses and final
    /// UNSAT clauses. Attach before the first solve.
    void set_proof(ProofSink* sink);

    /// Adds an input clause (not written to the proof). Returns false once the
    /// clause set is known to be unsatisfiable at the root.
    bool add_clause(std::span<const Lit> lits);
    bool add_clause(std::initializer_list<Lit> lits) {
        return add_clause(std::span<const Lit>(lits.begin(), lits.size()));
    }
    /// Adds a clause that is not implied by the formula and writes it to the
    /// proof as an addition, as done for blocking clauses.
    bool add_blocking_clause(std::span<const Lit> lits);

    /// Solves under the given assumptions. Throws BudgetExceeded when the
    /// conflict budget of this call runs out; the solver remains usable.
    SolveResult solve(std::span<const Lit> assumptions = {});

    /// Variables decided before all others, in activity order among themselves.
    void set_decision_priority(std::span<const int> vars);
    void set_conflict_budget(std::uint64_t budget) noexcept;

    /// Auxiliary variables are excluded from free-variable counts.
    void mark_aux(int v);
    bool is_aux(int v) const;

    ProbeResult probe(std::span<const Lit> assumptions);

    /// Occurrences of each variable in the input clauses (index = variable).
    std::vector<std::uint32_t> occurrence_counts() const;

    const SolverStats& stats() const noexcept;
    /// True once the input clauses are known to be unsatisfiable.
    bool inconsistent() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

enum class EnumerationVerdict { record_and_block, block_only };

struct EnumerationDecision {
    EnumerationVerdict verdict = EnumerationVerdict::record_and_block;
    /// Clause to add instead of the default blocking clause; empty = default.
    std::vector<Lit> block;
};

/// How the default blocking clause is formed from a projected model.
enum class BlockingMode {
    /// Negations of the true projected variables only. Exact when no solution's
    /// true set contains another's (fixed row sums guarantee this).
    positive,
    /// Negations of every projected literal; excludes exactly one projection.
    full,
};

struct EnumerationOptions {
    BlockingMode mode = BlockingMode::positive;
    std::vector<Lit> assumptions;
    /// Stop after this many models (0 = no limit); the result is then incomplete.
    std::size_t limit = 0;
};

struct EnumeratedModel {
    /// Values of the projection variables, in projection order.
    std::vector<std::uint8_t> bits;
    /// The full model the solver returned.
    std::vector<std::uint8_t> model;
};

using EnumerationCallback =
    std::function<EnumerationDecision(const EnumeratedModel&, std::size_t index)>;

struct EnumerationResult {
    std::vector<EnumeratedModel> recorded;
    std::size_t models = 0;
    std::size_t blocked_only = 0;
    /// False when the callback threw or a limit cut the run short.
    bool complete = true;
    std::exception_ptr error;
};

/// Solve/block loop until UNSAT. The solver keeps its learnt clauses and
/// heuristics between models. A null callback records every model.
EnumerationResult enumerate_all(Solver& solver, std::span<const int> projection,
                                const EnumerationCallback& callback,
                                const EnumerationOptions& opts = {});

/// Blocking clause for a projected model under the given mode.
std::vector<Lit> blocking_clause(std::span<const int> projection,
                                 std::span<const std::uint8_t> bits, BlockingMode mode);

using Cube = std::vector<Lit>;

/// Splits on the most frequent unassigned candidate variable (lowest id on
/// ties) until fewer than `free_floor` non-auxiliary variables are unassigned
/// or no candidate is left. Cubes refuted by propagation are dropped.
/// Candidates default to every non-auxiliary variable. A non-zero max_depth
/// also stops splitting at cubes of that many literals.
std::vector<Cube> split_cubes(Solver& solver, std::size_t free_floor,
                              std::span<const int> candidates = {}, std::size_t max_depth = 0);

/// "a <lits> 0" per cube.
void write_cubes(std::ostream& out, std::span<const Cube> cubes);
std::vector<Cube> read_cubes(std::istream& in);

struct ExternalResult {
    Verdict verdict = Verdict::unsat;
    std::vector<std::uint8_t> model;  // indexed by variable, empty on UNSAT
    std::string proof_path;           // retained DRAT file when UNSAT
    int exit_code = 0;
};

/// Runs an external solver. `command` may contain {cnf} and {proof}
/// placeholders; without them the paths are appended as arguments. The solver
/// must print "s SATISFIABLE"/"s UNSATISFIABLE" and, when SAT, "v" lines.
ExternalResult external_solve(const std::string& dimacs_path, const std::string& command,
                              const std::string& drat_path);

/// Parses solver output in the s/v line convention.
ExternalResult parse_solver_output(const std::string& text, int var_count);

/// True when the full model satisfies every clause of `cnf`.
bool model_satisfies(const Cnf& cnf, std::span<const std::uint8_t> model);

} // namespace lam
