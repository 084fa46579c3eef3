#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "subdiff/bench.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/simd.hpp"

namespace fs = std::filesystem;
using namespace subdiff;

namespace {

struct Common {
    std::string config;
    std::string preset;
    std::string out = ".";
    bool full = false;
};

RunConfig resolve(const Common& c)
{
    if (c.config.empty() && c.preset.empty())
        throw ValidationError("give --config <path> or --preset <name>");
    RunConfig cfg = c.config.empty() ? preset(c.preset, c.full) : load_run_config(c.config);
    if (!c.config.empty() && !c.preset.empty())
        throw ValidationError("--config and --preset are mutually exclusive");
    if (c.full)
        cfg.full = true;
    if (cfg.full)
        std::cerr << "warning: full ladders carry the O(N^2) history cost; runs may take hours\n";
    cfg.validate();
    return cfg;
}

void print_table(const ErrorTable& t)
{
    std::cout << format_csv(t);
}

int run_solve(const Common& c)
{
    const RunConfig cfg = resolve(c);
    const double alpha = cfg.alphas.front();
    const double r = cfg.rs.front().resolve(alpha);
    const int N = cfg.Ns.front();
    const int M = cfg.Ms.front();
    const ProblemSpec spec = make_problem(cfg, alpha);
    SolveOptions opts;
    opts.weights = cfg.weights;
    const SolveRecord rec = solve(spec, build_temporal(spec.tau, spec.K, N, r), build_spatial(spec.L, M), opts);

    std::vector<double> times = cfg.slices.times;
    if (times.empty())
        for (int i = 0; i <= spec.K; ++i)
            times.push_back(i * spec.tau);
    std::vector<double> xs = cfg.slices.x;
    if (xs.empty())
        xs = {0.5 * spec.L};
    fs::create_directories(c.out);
    emit_solution_slices(rec, times, xs, fs::path(c.out) / "solution_slices.csv");

    double peak = 0.0;
    for (double v : rec.max_norm)
        peak = std::max(peak, v);
    std::printf("solved %s alpha=%g r=%g N=%d M=%d levels=%d peak sup-norm=%.6g\n", case_name(cfg.case_id).c_str(),
                alpha, r, N, M, rec.last_level(), peak);
    if (spec.exact)
        for (const auto& w : cfg.windows)
            std::printf("E(%d,%d) = %.5e\n", w.k, w.l, error_max(rec, *spec.exact, w));
    return 0;
}

int run_table(const Common& c, bool in_time)
{
    const RunConfig cfg = resolve(c);
    const ErrorTable t = in_time ? run_temporal_table(cfg) : run_spatial_table(cfg);
    const std::string stem = in_time ? "table_time" : "table_space";
    fs::create_directories(c.out);
    emit_csv(t, fs::path(c.out) / (stem + ".csv"));
    emit_metadata(t, cfg, fs::path(c.out) / (stem + ".meta.json"));
    print_table(t);
    return 0;
}

int run_verify(const Common& c)
{
    VerifyConfig vc;
    if (!c.config.empty()) {
        const RunConfig cfg = load_run_config(c.config);
        vc.alphas = cfg.alphas;
        vc.rs.clear();
        for (const auto& g : cfg.rs)
            vc.rs.push_back(g.resolve(cfg.alphas.front()));
    }
    const VerifyReport rep = verify_kernels(vc);
    fs::create_directories(c.out);
    emit_verify(rep, c.out);
    for (const auto& e : rep.entries)
        std::printf("[%s] %s: %.4e (limit %.4e) %s\n", e.pass ? "PASS" : "FAIL", e.name.c_str(), e.value,
                    e.threshold, e.detail.c_str());
    return rep.all_pass() ? 0 : 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Solver and benchmark harness for delayed subdiffusion with a Riemann-Liouville derivative"};
    app.require_subcommand(1);
    std::string simd_choice;
    app.add_option("--simd", simd_choice, "Kernel backend: scalar or avx2 (default: detected)");

    Common common;
    auto add_common = [&](CLI::App* sub, bool config_only) {
        sub->add_option("--config", common.config, "JSON run configuration");
        sub->add_option("--out", common.out, "Output directory");
        if (!config_only) {
            sub->add_option("--preset", common.preset, "Built-in experiment (table1..table8, figure1)");
            sub->add_flag("--full", common.full, "Use the full published ladders");
        }
    };
    CLI::App* solve_cmd = app.add_subcommand("solve", "One run; writes solution slices");
    CLI::App* ttime = app.add_subcommand("table-time", "Temporal convergence table");
    CLI::App* tspace = app.add_subcommand("table-space", "Spatial convergence table");
    CLI::App* verify = app.add_subcommand("verify", "Discrete kernel identities and truncation probes");
    add_common(solve_cmd, false);
    add_common(ttime, false);
    add_common(tspace, false);
    add_common(verify, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (simd_choice == "scalar")
            simd::set_active_backend(simd::Backend::Scalar);
        else if (simd_choice == "avx2")
            simd::set_active_backend(simd::Backend::Avx2);
        else if (!simd_choice.empty())
            throw ValidationError("--simd must be scalar or avx2");

        if (*solve_cmd)
            return run_solve(common);
        if (*ttime)
            return run_table(common, true);
        if (*tspace)
            return run_table(common, false);
        return run_verify(common);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
}
