#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <thread>

#include "subdiff/bench.hpp"
#include "subdiff/errors.hpp"

namespace subdiff {

namespace {

constexpr double kPi = std::numbers::pi;

bool power_of_two(int v)
{
    return v > 0 && (v & (v - 1)) == 0;
}

// Runs fn(i) for i < count on up to `threads` workers; rethrows the first failure.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn fn)
{
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, hw);
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!failure)
                        failure = std::current_exception();
                    next.store(count);
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

CumulativeSolution case1_solution(double alpha)
{
    CumulativeSolution T;
    T.tau = 1.0;
    T.history = {{1.0, -1.0, 1.0}}; // 1 + t
    T.windows = {PowerExpansion{{1.0, 0.0, alpha}},
                 PowerExpansion{{1.0, 1.0, alpha + 1.0}},
                 PowerExpansion{{1.0, 2.0, alpha + 2.0}}};
    return T;
}

std::string now_utc()
{
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool use_exact(const RunConfig& cfg, const ProblemSpec& spec)
{
    if (cfg.reference.truth == "reference")
        return false;
    if (cfg.reference.truth == "exact" && !spec.exact)
        throw ValidationError("truth 'exact' requested but the case has no exact solution");
    return spec.exact.has_value();
}

SolveOptions options(const RunConfig& cfg)
{
    SolveOptions o;
    o.weights = cfg.weights;
    return o;
}

void fill_rates(ErrorTable& t, bool in_space)
{
    std::map<std::tuple<double, double, int, int, int, int>, double> index;
    for (const auto& row : t.rows)
        index[{row.alpha, row.r, row.M, row.N, row.k, row.l}] = row.E;
    for (auto& row : t.rows) {
        const int Mc = in_space ? row.M / 2 : row.M;
        const int Nc = in_space ? row.N : row.N / 2;
        if ((in_space ? row.M % 2 : row.N % 2) != 0)
            continue;
        auto it = index.find({row.alpha, row.r, Mc, Nc, row.k, row.l});
        if (it != index.end() && it->second > 0.0 && row.E > 0.0)
            row.rate = rate(it->second, row.E);
    }
}

} // namespace

ProblemSpec make_case(CaseId id, double alpha, SourceMode source)
{
    ProblemSpec s;
    s.alpha = alpha;
    s.tau = 1.0;
    s.K = 3;
    s.L = 1.0;
    s.b = 1.0;
    s.source_profile = [](double x) { return std::sin(kPi * x); };
    const double lambda = kPi * kPi;
    if (id == CaseId::Example1Case1) {
        s.p = 1.0 / (kPi * kPi);
        s.a = -2.0;
        s.phi = [](double x, double t) { return (1.0 + t) * std::sin(kPi * x); };
        const CumulativeSolution T = case1_solution(alpha);
        s.exact = SeparableSolution{[](double x) { return std::sin(kPi * x); }, [T](double t) { return T(t); }};
        switch (source) {
        case SourceMode::Auto:
        case SourceMode::ClosedG: s.source = ClosedG{manufacture_G(alpha, s.p, s.a, s.b, lambda, T)}; break;
        case SourceMode::ClosedF: s.source = ClosedF{manufacture_f(alpha, s.p, s.a, s.b, lambda, T)}; break;
        case SourceMode::SampledF: {
            const PowerExpansion f = manufacture_f(alpha, s.p, s.a, s.b, lambda, T);
            s.source = SampledF{[f](double t) { return f(t); }};
            break;
        }
        }
    } else if (id == CaseId::Example1Case2) {
        s.p = 0.2;
        s.a = -1.0;
        s.phi = [](double x, double t) { return (1.0 + kPi * t) * std::sin(kPi * x); };
        const PowerExpansion f{{1.0, 0.0, 2.0}};
        switch (source) {
        case SourceMode::Auto:
        case SourceMode::ClosedF: s.source = ClosedF{f}; break;
        case SourceMode::ClosedG: s.source = ClosedG{rlint_of_power(1.0 - alpha, f)}; break;
        case SourceMode::SampledF: s.source = SampledF{[](double t) { return t * t; }}; break;
        }
    } else {
        throw ValidationError("make_case: custom problems need make_problem");
    }
    return s;
}

ProblemSpec make_problem(const RunConfig& cfg, double alpha)
{
    if (cfg.case_id != CaseId::Custom)
        return make_case(cfg.case_id, alpha, cfg.source);
    const CustomProblem& c = *cfg.custom;
    ProblemSpec s;
    s.p = c.p;
    s.a = c.a;
    s.b = c.b;
    s.alpha = alpha;
    s.tau = c.tau;
    s.K = c.K;
    s.L = c.L;
    const double k = c.mode * kPi / c.L;
    auto X = [k](double x) { return std::sin(k * x); };
    s.source_profile = X;
    const PowerExpansion hist = c.history;
    s.phi = [X, hist](double x, double t) { return X(x) * hist(t); };
    PowerExpansion f, G;
    bool have_f = false;
    if (c.solution) {
        CumulativeSolution T = *c.solution;
        T.tau = c.tau;
        if (static_cast<int>(T.windows.size()) > c.K)
            throw ValidationError("problem.solution has more windows than K");
        G = manufacture_G(alpha, c.p, c.a, c.b, k * k, T);
        f = manufacture_f(alpha, c.p, c.a, c.b, k * k, T);
        have_f = true;
        s.exact = SeparableSolution{X, [T](double t) { return T(t); }};
    } else if (c.G) {
        G = *c.G;
    } else {
        f = *c.f;
        have_f = true;
        G = rlint_of_power(1.0 - alpha, f);
    }
    switch (cfg.source) {
    case SourceMode::Auto:
    case SourceMode::ClosedG: s.source = ClosedG{G}; break;
    case SourceMode::ClosedF:
        if (!have_f)
            throw ValidationError("source closed-f needs f (or a manufactured solution)");
        s.source = ClosedF{f};
        break;
    case SourceMode::SampledF:
        if (!have_f)
            throw ValidationError("source sampled-f needs f (or a manufactured solution)");
        s.source = SampledF{[f](double t) { return f(t); }};
        break;
    }
    return s;
}

double rate(double e_coarse, double e_fine)
{
    if (!(e_coarse > 0.0) || !(e_fine > 0.0))
        throw ValidationError("rate: errors must be positive");
    return std::log2(e_coarse / e_fine);
}

double error_max(const SolveRecord& record, const Truth& truth, Window w)
{
    const TemporalMesh& tm = record.tmesh;
    const int N = tm.N();
    if (w.k < 0 || w.k > w.l || w.l > tm.K() || w.l < 1)
        throw ValidationError("error_max: bad window");
    const int first = w.k == w.l ? 2 * w.l * N : 2 * w.k * N + 1;
    const int last = 2 * w.l * N;
    const std::size_t m = static_cast<std::size_t>(record.m);

    if (const auto* exact = std::get_if<SeparableSolution>(&truth)) {
        const TriDiag mass = assemble_mass(record.smesh);
        std::vector<double> X(m), diff(m);
        for (std::size_t j = 0; j < m; ++j)
            X[j] = exact->X(record.smesh.nodes[j + 1]);
        double worst = 0.0;
        for (int n = first; n <= last; ++n) {
            const double T = exact->T(tm.t(n));
            auto u = record.level(n);
            for (std::size_t j = 0; j < m; ++j)
                diff[j] = u[j] - X[j] * T;
            worst = std::max(worst, l2_norm(diff, mass));
        }
        return worst;
    }

    const SolveRecord& ref = *std::get<const SolveRecord*>(truth);
    const TemporalMesh& rm = ref.tmesh;
    if (rm.tau() != tm.tau() || rm.K() != tm.K() || rm.r() != tm.r())
        throw ValidationError("error_max: reference uses a different tau, K or r");
    if (rm.N() % N != 0 || !power_of_two(rm.N() / N))
        throw ValidationError("error_max: reference N is not a power-of-two multiple");
    const int tstride = rm.N() / N;
    if (ref.smesh.L != record.smesh.L || ref.smesh.M % record.smesh.M != 0
        || !power_of_two(ref.smesh.M / record.smesh.M))
        throw ValidationError("error_max: reference spatial mesh does not nest the coarse one");
    const int sstride = ref.smesh.M / record.smesh.M;
    const std::size_t mf = static_cast<std::size_t>(ref.m);
    const TriDiag mass = assemble_mass(ref.smesh);
    std::vector<double> diff(mf);
    double worst = 0.0;
    for (int n = first; n <= last; ++n) {
        if (std::abs(rm.t(n * tstride) - tm.t(n)) > 1e-13 * std::max(1.0, std::abs(tm.t(n))))
            throw ValidationError("error_max: reference time levels do not coincide");
        auto u = record.level(n);
        auto v = ref.level(n * tstride);
        // prolong the coarse P1 function onto the fine nodes
        for (std::size_t jf = 1; jf <= mf; ++jf) {
            const std::size_t jc = jf / static_cast<std::size_t>(sstride);
            const double frac = static_cast<double>(jf % static_cast<std::size_t>(sstride)) / sstride;
            const double left = jc == 0 ? 0.0 : u[jc - 1];
            const double right = jc + 1 > m ? 0.0 : (frac == 0.0 ? 0.0 : u[jc]);
            diff[jf - 1] = v[jf - 1] - (frac == 0.0 ? left : (1.0 - frac) * left + frac * right);
        }
        worst = std::max(worst, l2_norm(diff, mass));
    }
    return worst;
}

SolveRecord run_reference(const ProblemSpec& spec, double r, int N_ref, int M, std::span<const int> ladder,
                          SolveOptions opts)
{
    if (ladder.empty())
        throw ValidationError("run_reference: empty ladder");
    const int nmax = *std::max_element(ladder.begin(), ladder.end());
    if (N_ref % nmax != 0 || !power_of_two(N_ref / nmax) || N_ref / nmax < 4)
        throw ValidationError("run_reference: N_ref must be 2^m * max N with m >= 2");
    for (int n : ladder)
        if (N_ref % n != 0 || !power_of_two(N_ref / n))
            throw ValidationError("run_reference: ladder entry " + std::to_string(n) + " does not nest");
    return solve(spec, build_temporal(spec.tau, spec.K, N_ref, r), build_spatial(spec.L, M), opts);
}

ErrorTable run_temporal_table(const RunConfig& cfg)
{
    cfg.validate();
    struct Group {
        double alpha, r;
        int M;
        ProblemSpec spec;
        bool exact;
        std::shared_ptr<SolveRecord> ref;
    };
    std::vector<Group> groups;
    for (double alpha : cfg.alphas)
        for (const auto& g : cfg.rs)
            for (int M : cfg.Ms) {
                Group gr{alpha, g.resolve(alpha), M, make_problem(cfg, alpha), false, nullptr};
                gr.exact = use_exact(cfg, gr.spec);
                groups.push_back(std::move(gr));
            }

    const int nmax = *std::max_element(cfg.Ns.begin(), cfg.Ns.end());
    std::vector<std::size_t> need_ref;
    for (std::size_t i = 0; i < groups.size(); ++i)
        if (!groups[i].exact)
            need_ref.push_back(i);
    parallel_for(need_ref.size(), cfg.threads, [&](std::size_t i) {
        Group& g = groups[need_ref[i]];
        g.ref = std::make_shared<SolveRecord>(
            run_reference(g.spec, g.r, cfg.reference.time_factor * nmax, g.M, cfg.Ns, options(cfg)));
    });

    struct Cell {
        std::size_t group;
        int N;
    };
    std::vector<Cell> cells;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int N : cfg.Ns)
            cells.push_back({g, N});

    ErrorTable table;
    table.case_name = case_name(cfg.case_id);
    table.spec_hash = cfg.hash();
    table.timestamp = now_utc();
    std::vector<std::vector<ErrorRow>> out(cells.size());
    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
        const Group& g = groups[cells[i].group];
        const int N = cells[i].N;
        const SolveRecord rec = solve(g.spec, build_temporal(g.spec.tau, g.spec.K, N, g.r),
                                      build_spatial(g.spec.L, g.M), options(cfg));
        const Truth truth = g.exact ? Truth{*g.spec.exact} : Truth{g.ref.get()};
        for (const auto& w : cfg.windows)
            out[i].push_back({table.case_name, g.alpha, g.r, g.M, N, w.k, w.l, error_max(rec, truth, w), {}});
    });
    for (auto& v : out)
        table.rows.insert(table.rows.end(), v.begin(), v.end());
    fill_rates(table, false);
    return sorted(table);
}

ErrorTable run_spatial_table(const RunConfig& cfg)
{
    cfg.validate();
    struct Group {
        double alpha, r;
        int N;
        ProblemSpec spec;
        bool exact;
        std::shared_ptr<SolveRecord> ref;
    };
    std::vector<Group> groups;
    for (double alpha : cfg.alphas)
        for (const auto& g : cfg.rs)
            for (int N : cfg.Ns) {
                Group gr{alpha, g.resolve(alpha), N, make_problem(cfg, alpha), false, nullptr};
                gr.exact = use_exact(cfg, gr.spec);
                groups.push_back(std::move(gr));
            }
    const int mmax = *std::max_element(cfg.Ms.begin(), cfg.Ms.end());
    std::vector<std::size_t> need_ref;
    for (std::size_t i = 0; i < groups.size(); ++i)
        if (!groups[i].exact)
            need_ref.push_back(i);
    parallel_for(need_ref.size(), cfg.threads, [&](std::size_t i) {
        Group& g = groups[need_ref[i]];
        g.ref = std::make_shared<SolveRecord>(solve(g.spec, build_temporal(g.spec.tau, g.spec.K, g.N, g.r),
                                                    build_spatial(g.spec.L, cfg.reference.space_factor * mmax),
                                                    options(cfg)));
    });

    struct Cell {
        std::size_t group;
        int M;
    };
    std::vector<Cell> cells;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (int M : cfg.Ms)
            cells.push_back({g, M});

    ErrorTable table;
    table.case_name = case_name(cfg.case_id);
    table.spec_hash = cfg.hash();
    table.timestamp = now_utc();
    std::vector<std::vector<ErrorRow>> out(cells.size());
    parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
        const Group& g = groups[cells[i].group];
        const int M = cells[i].M;
        const SolveRecord rec = solve(g.spec, build_temporal(g.spec.tau, g.spec.K, g.N, g.r),
                                      build_spatial(g.spec.L, M), options(cfg));
        const Truth truth = g.exact ? Truth{*g.spec.exact} : Truth{g.ref.get()};
        for (const auto& w : cfg.windows)
            out[i].push_back({table.case_name, g.alpha, g.r, M, g.N, w.k, w.l, error_max(rec, truth, w), {}});
    });
    for (auto& v : out)
        table.rows.insert(table.rows.end(), v.begin(), v.end());
    fill_rates(table, true);
    return sorted(table);
}

} // namespace subdiff
