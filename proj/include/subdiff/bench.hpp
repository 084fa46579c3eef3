#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "subdiff/solver.hpp"

namespace subdiff {

enum class CaseId { Example1Case1, Example1Case2, Custom };
enum class SourceMode { Auto, ClosedG, ClosedF, SampledF };

std::string case_name(CaseId id);
CaseId parse_case(const std::string& name);
SourceMode parse_source(const std::string& name);
std::string source_name(SourceMode mode);

// Example 1 on (0,1) x (0,3], tau = b = 1, spatial factor sin(pi x).
ProblemSpec make_case(CaseId id, double alpha, SourceMode source = SourceMode::Auto);

// Time levels 2kN+1 .. 2lN. k == l selects the single level 2lN.
struct Window {
    int k = 0;
    int l = 1;
    bool operator==(const Window&) const = default;
};

// Either the exact solution or a finer run that nests the coarse meshes.
using Truth = std::variant<SeparableSolution, const SolveRecord*>;

double error_max(const SolveRecord& record, const Truth& truth, Window w);
double rate(double e_coarse, double e_fine);

struct ReferencePolicy {
    int time_factor = 32;   // N_ref = time_factor * max N
    int space_factor = 16;  // M_ref = space_factor * max M
    std::string truth = "auto"; // auto | exact | reference
};

struct SliceSpec {
    std::vector<double> times;
    std::vector<double> x;
};

// r entries may be "1/alpha", resolved per alpha.
struct GradingEntry {
    double value = 1.0;
    bool inverse_alpha = false;
    double resolve(double alpha) const { return inverse_alpha ? 1.0 / alpha : value; }
};

// User-defined problem with spatial factor sin(mode pi x / L). Either a source
// (f or G temporal factor) or a manufactured cumulative solution is given.
struct CustomProblem {
    double p = 1.0;
    double a = 0.0;
    double b = 1.0;
    double tau = 1.0;
    int K = 1;
    double L = 1.0;
    int mode = 1;
    PowerExpansion history;
    std::optional<PowerExpansion> f;
    std::optional<PowerExpansion> G;
    std::optional<CumulativeSolution> solution;
};

struct RunConfig {
    CaseId case_id = CaseId::Example1Case1;
    std::optional<CustomProblem> custom;
    std::vector<double> alphas{0.5};
    std::vector<GradingEntry> rs{GradingEntry{}};
    std::vector<int> Ns{200, 400, 800, 1600};
    std::vector<int> Ms{1000};
    std::vector<Window> windows{{0, 1}, {1, 3}};
    ReferencePolicy reference;
    SourceMode source = SourceMode::Auto;
    WeightPath weights = WeightPath::Auto;
    int threads = 0;
    bool full = false;
    SliceSpec slices;

    void validate() const;
    std::string canonical_json() const;
    std::uint64_t hash() const;
};

ProblemSpec make_problem(const RunConfig& cfg, double alpha);

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
// Named replicas of the published experiments (table1 .. table8).
RunConfig preset(const std::string& name, bool full = false);

struct ErrorRow {
    std::string case_name;
    double alpha = 0.0;
    double r = 1.0;
    int M = 0;
    int N = 0;
    int k = 0;
    int l = 0;
    double E = 0.0;
    std::optional<double> rate;
};

struct ErrorTable {
    std::string case_name;
    std::uint64_t spec_hash = 0;
    std::string timestamp;
    std::vector<ErrorRow> rows;
};

// Rates in N: consecutive N = N_prev * 2 with the same (alpha, r, M, k, l).
ErrorTable run_temporal_table(const RunConfig& cfg);
// Rates in M at fixed N.
ErrorTable run_spatial_table(const RunConfig& cfg);

SolveRecord run_reference(const ProblemSpec& spec, double r, int N_ref, int M,
                          std::span<const int> ladder, SolveOptions opts = {});

struct VerifyEntry {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyEntry> entries;
    bool all_pass() const;
};

struct VerifyConfig {
    std::vector<double> alphas{0.3, 0.5, 0.7};
    std::vector<double> rs{1.0, 2.0, 3.0};
    int max_level = 200;
    std::vector<int> probe_ladder{64, 128, 256, 512};
};

VerifyReport verify_kernels(const VerifyConfig& cfg = {});

// Sorted copy: alpha, r, N, M, k, l ascending.
ErrorTable sorted(const ErrorTable& t);
void emit_csv(const ErrorTable& table, const std::filesystem::path& path);
std::string format_csv(const ErrorTable& table);
ErrorTable parse_csv(const std::string& text);
void emit_metadata(const ErrorTable& table, const RunConfig& cfg, const std::filesystem::path& path);
void emit_verify(const VerifyReport& report, const std::filesystem::path& dir);
// Columns t,x,u. Times snap to the nearest level, u is linear in x between nodes.
void emit_solution_slices(const SolveRecord& record, std::span<const double> times,
                          std::span<const double> xs, const std::filesystem::path& path);

} // namespace subdiff
