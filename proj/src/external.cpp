#include "lam/errors.hpp"
#include "lam/solver.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <sys/wait.h>

namespace lam {

void write_cubes(std::ostream& out, std::span<const Cube> cubes) {
    for (const auto& c : cubes) {
        out << 'a';
        for (Lit l : c) out << ' ' << l;
        out << " 0\n";
    }
    if (!out) throw IoError("failed writing cubes");
}

std::vector<Cube> read_cubes(std::istream& in) {
    std::vector<Cube> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream is(line);
        std::string tag;
        is >> tag;
        if (tag != "a") throw ParseError("cube line must start with 'a'", lineno);
        Cube c;
        long long v = 0;
        bool closed = false;
        while (is >> v) {
            if (v == 0) {
                closed = true;
                break;
            }
            c.push_back(static_cast<Lit>(v));
        }
        if (!closed) throw ParseError("cube not terminated by 0", lineno);
        out.push_back(std::move(c));
    }
    return out;
}

ExternalResult parse_solver_output(const std::string& text, int var_count) {
    ExternalResult res;
    std::istringstream in(text);
    std::string line;
    bool have_verdict = false;
    bool have_values = false;
    std::vector<std::uint8_t> model(static_cast<std::size_t>(var_count) + 1, 0);
    while (std::getline(in, line)) {
        if (line.rfind("s ", 0) == 0) {
            if (line.find("UNSATISFIABLE") != std::string::npos) {
                res.verdict = Verdict::unsat;
                have_verdict = true;
            } else if (line.find("SATISFIABLE") != std::string::npos) {
                res.verdict = Verdict::sat;
                have_verdict = true;
            } else {
                throw AdapterError("solver gave no verdict: " + line);
            }
        } else if (line.rfind("v ", 0) == 0 || line == "v") {
            std::istringstream vs(line.substr(1));
            std::string tok;
            while (vs >> tok) {
                long long v = 0;
                try {
                    std::size_t used = 0;
                    v = std::stoll(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument(tok);
                } catch (const std::exception&) {
                    throw AdapterError("malformed value token '" + tok + "'");
                }
                if (v == 0) continue;
                if (std::llabs(v) > var_count) throw AdapterError("value for unknown variable " + tok);
                model[static_cast<std::size_t>(std::llabs(v))] = v > 0 ? 1 : 0;
                have_values = true;
            }
        }
    }
    if (!have_verdict) throw AdapterError("solver output has no 's' line");
    if (res.verdict == Verdict::sat) {
        if (!have_values && var_count > 0) throw AdapterError("SAT verdict without 'v' lines");
        res.model = std::move(model);
    }
    return res;
}

namespace {

int header_vars(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("p ", 0) != 0) continue;
        std::istringstream is(line);
        std::string p, fmt;
        int vars = 0;
        is >> p >> fmt >> vars;
        if (!is) break;
        return vars;
    }
    throw AdapterError(path + " has no DIMACS header");
}

std::string substitute(std::string cmd, const std::string& key, const std::string& value, bool& used) {
    for (std::size_t pos; (pos = cmd.find(key)) != std::string::npos;) {
        cmd.replace(pos, key.size(), value);
        used = true;
    }
    return cmd;
}

} // namespace

ExternalResult external_solve(const std::string& dimacs_path, const std::string& command,
                              const std::string& drat_path) {
    const int vars = header_vars(dimacs_path);
    bool used_cnf = false, used_proof = false;
    std::string cmd = substitute(command, "{cnf}", dimacs_path, used_cnf);
    cmd = substitute(cmd, "{proof}", drat_path, used_proof);
    if (!used_cnf) cmd += " '" + dimacs_path + "'";
    if (!used_proof && !drat_path.empty()) cmd += " '" + drat_path + "'";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw AdapterError("cannot start '" + cmd + "'");
    std::string text;
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) text.append(buf.data(), n);
    const int status = pclose(pipe);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    ExternalResult res;
    try {
        res = parse_solver_output(text, vars);
    } catch (const AdapterError& e) {
        throw AdapterError(std::string(e.what()) + " (exit code " + std::to_string(code) + ")");
    }
    res.exit_code = code;
    if (res.verdict == Verdict::unsat && !drat_path.empty() && std::filesystem::exists(drat_path))
        res.proof_path = drat_path;
    return res;
}

} // namespace lam
