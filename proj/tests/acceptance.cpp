#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "subdiff/bench.hpp"
#include "subdiff/fracops.hpp"

using namespace subdiff;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string summary;
};

void detail(bool ok, const char* fmt, ...) __attribute__((format(printf, 2, 3)));
void detail(bool ok, const char* fmt, ...)
{
    va_list ap;
    va_start(ap, fmt);
    std::printf("    %s ", ok ? "ok  " : "MISS");
    std::vprintf(fmt, ap);
    std::printf("\n");
    va_end(ap);
}

void info(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void info(const char* fmt, ...)
{
    va_list ap;
    va_start(ap, fmt);
    std::printf("    info ");
    std::vprintf(fmt, ap);
    std::printf("\n");
    va_end(ap);
}

const ErrorRow* find(const ErrorTable& t, double alpha, double r, int M, int N, int k, int l)
{
    for (const auto& row : t.rows)
        if (row.alpha == alpha && std::abs(row.r - r) < 1e-12 && row.M == M && row.N == N && row.k == k && row.l == l)
            return &row;
    return nullptr;
}

bool within(double got, double target, double tol) { return std::abs(got - target) <= tol; }

// Checks one E value and one rate, records misses.
struct Tally {
    bool pass = true;
    int checks = 0;
    int misses = 0;
    void add(bool ok)
    {
        ++checks;
        if (!ok) {
            pass = false;
            ++misses;
        }
    }
    std::string text() const { return std::to_string(checks - misses) + "/" + std::to_string(checks) + " checks"; }
};

double rate_or_nan(const ErrorRow* row) { return row && row->rate ? *row->rate : std::nan(""); }

// Table 1 shape on one spatial resolution; returns the tally.
Tally table1_checks(int M, bool report)
{
    RunConfig cfg = preset("table1");
    cfg.Ms = {M};
    const ErrorTable t = run_temporal_table(cfg);
    const std::map<double, std::vector<double>> published_E{
        {0.5, {6.6964e-03, 4.9043e-03, 3.5577e-03, 2.5627e-03}},
        {0.7, {1.8911e-03, 1.1894e-03, 7.3507e-04, 4.5539e-04}}};
    const std::map<double, std::vector<double>> published_rate{{0.5, {0.4493, 0.4631, 0.4733}},
                                                           {0.7, {0.6775, 0.6858, 0.6908}}};
    Tally tally;
    auto note = [&](bool ok, const std::string& s) {
        tally.add(ok);
        if (report)
            detail(ok, "%s", s.c_str());
        else
            info("%s %s", ok ? "ok  " : "MISS", s.c_str());
    };
    char buf[256];
    for (double alpha : {0.5, 0.7}) {
        for (std::size_t i = 0; i < cfg.Ns.size(); ++i) {
            const int N = cfg.Ns[i];
            const ErrorRow* e01 = find(t, alpha, 1.0, M, N, 0, 1);
            const ErrorRow* e13 = find(t, alpha, 1.0, M, N, 1, 3);
            const double E = e01 ? e01->E : std::nan("");
            const double want = published_E.at(alpha)[i];
            std::snprintf(buf, sizeof buf, "M=%d alpha=%.1f N=%d E(0,1)=%.4e published %.4e (within 10%%)", M, alpha, N, E,
                          want);
            note(std::abs(E - want) <= 0.1 * want, buf);
            if (i == 0)
                continue;
            const double r01 = rate_or_nan(e01), r13 = rate_or_nan(e13);
            const double wr = published_rate.at(alpha)[i - 1];
            std::snprintf(buf, sizeof buf, "M=%d alpha=%.1f N=%d rate(0,1]=%.4f published %.4f (+-0.05)", M, alpha, N, r01,
                          wr);
            note(within(r01, wr, 0.05), buf);
            std::snprintf(buf, sizeof buf, "M=%d alpha=%.1f N=%d rate(1,3]=%.4f target 1.0 (+-0.06) E=%.4e", M, alpha,
                          N, r13, e13 ? e13->E : std::nan(""));
            note(within(r13, 1.0, 0.06), buf);
        }
    }
    return tally;
}

Outcome ac1()
{
    const Tally t = table1_checks(512, true);
    const Tally ref = table1_checks(1000, false);
    info("at the published M = 1000: %s passing", ref.text().c_str());
    return {t.pass, "Table 1 at M=512: " + t.text()};
}

Tally graded_checks(const char* name, int M, bool report)
{
    RunConfig cfg = preset(name);
    cfg.Ms = {M};
    const ErrorTable t = run_temporal_table(cfg);
    Tally tally;
    const double alpha = cfg.alphas.front();
    const int Nf = cfg.Ns.back();
    for (const auto& g : cfg.rs) {
        const double r = g.resolve(alpha);
        const ErrorRow* row = find(t, alpha, r, M, Nf, 0, 3);
        const double got = rate_or_nan(row);
        const double want = std::min(r * alpha, 1.0);
        const bool ok = within(got, want, 0.06);
        tally.add(ok);
        if (report)
            detail(ok, "%s M=%d alpha=%.1f r=%.4f N=%d rate(0,3]=%.4f target %.4f (+-0.06) E=%.4e", name, M, alpha, r,
                   Nf, got, want, row ? row->E : std::nan(""));
        else
            info("%s %s M=%d r=%.4f rate(0,3]=%.4f target %.4f", ok ? "ok  " : "MISS", name, M, r, got, want);
    }
    return tally;
}

Outcome ac2()
{
    Tally t3 = graded_checks("table3", 512, true);
    Tally t4 = graded_checks("table4", 512, true);
    const Tally i3 = graded_checks("table3", 1000, false);
    const Tally i4 = graded_checks("table4", 1000, false);
    info("at the published M = 1000: table3 %s, table4 %s passing", i3.text().c_str(), i4.text().c_str());
    Tally all;
    all.pass = t3.pass && t4.pass;
    all.checks = t3.checks + t4.checks;
    all.misses = t3.misses + t4.misses;
    return {all.pass, "Tables 3/4 at M=512: " + all.text()};
}

Outcome ac3()
{
    const RunConfig cfg = preset("table2");
    const ErrorTable t = run_spatial_table(cfg);
    const std::map<double, double> published_M8{{0.5, 3.6113e-02}, {0.6, 3.6126e-02}, {0.8, 3.6155e-02}};
    Tally tally;
    const int N = cfg.Ns.front();
    for (double alpha : cfg.alphas) {
        const ErrorRow* e8 = find(t, alpha, 1.0, 8, N, 3, 3);
        const double E = e8 ? e8->E : std::nan("");
        const double want = published_M8.at(alpha);
        const bool okE = std::abs(E - want) <= 0.1 * want;
        tally.add(okE);
        detail(okE, "alpha=%.1f N=%d M=8 E(t_6N)=%.4e published %.4e (within 10%%)", alpha, N, E, want);
        for (int M : {16, 32, 64}) {
            const ErrorRow* row = find(t, alpha, 1.0, M, N, 3, 3);
            const double got = rate_or_nan(row);
            if (alpha == 0.5 && M == 64) {
                info("alpha=0.5 M=64 rate_s=%.4f excluded (published cell flagged as erratum)", got);
                continue;
            }
            const bool ok = within(got, 2.0, 0.05);
            tally.add(ok);
            detail(ok, "alpha=%.1f N=%d M=%d rate_s=%.4f target 2.00 (+-0.05) E=%.4e", alpha, N, M, got,
                   row ? row->E : std::nan(""));
        }
    }
    return {tally.pass, "Table 2 (N=2000): " + tally.text()};
}

Outcome ac4()
{
    Tally tally;
    {
        const RunConfig cfg = preset("table5");
        const ErrorTable t = run_temporal_table(cfg);
        const int Nf = cfg.Ns.back();
        for (double alpha : cfg.alphas) {
            const double r01 = rate_or_nan(find(t, alpha, 1.0, 16, Nf, 0, 1));
            const double r13 = rate_or_nan(find(t, alpha, 1.0, 16, Nf, 1, 3));
            tally.add(within(r01, alpha, 0.08));
            detail(within(r01, alpha, 0.08), "table5 alpha=%.1f N=%d rate(0,1]=%.4f target %.1f (+-0.08)", alpha, Nf,
                   r01, alpha);
            tally.add(within(r13, 1.0, 0.08));
            detail(within(r13, 1.0, 0.08), "table5 alpha=%.1f N=%d rate(1,3]=%.4f target 1.0 (+-0.08)", alpha, Nf, r13);
        }
    }
    {
        const RunConfig cfg = preset("table7");
        const ErrorTable t = run_temporal_table(cfg);
        const int Nf = cfg.Ns.back();
        const double alpha = cfg.alphas.front();
        for (const auto& g : cfg.rs) {
            const double r = g.resolve(alpha);
            const double got = rate_or_nan(find(t, alpha, r, 16, Nf, 0, 3));
            const double want = std::min(r * alpha, 1.0);
            tally.add(within(got, want, 0.08));
            detail(within(got, want, 0.08), "table7 alpha=%.1f r=%.4f N=%d rate(0,3]=%.4f target %.4f (+-0.08)", alpha,
                   r, Nf, got, want);
        }
    }
    {
        const RunConfig cfg = preset("table8");
        const ErrorTable t = run_spatial_table(cfg);
        const int N = cfg.Ns.front();
        for (double alpha : cfg.alphas) {
            for (int M : {16, 32, 64}) {
                const double got = rate_or_nan(find(t, alpha, 1.0 / alpha, M, N, 0, 3));
                tally.add(within(got, 2.0, 0.08));
                detail(within(got, 2.0, 0.08), "table8 alpha=%.1f r=1/alpha N=%d M=%d rate_s=%.4f target 2.0 (+-0.08)",
                       alpha, N, M, got);
            }
        }
    }
    return {tally.pass, "case 2 rate shapes (Tables 5/7/8): " + tally.text()};
}

Outcome ac5()
{
    VerifyConfig vc;
    vc.alphas = {0.3, 0.5, 0.7};
    vc.rs = {1.0, 2.0, 3.0};
    vc.max_level = 200;
    vc.probe_ladder = {64, 128};
    const VerifyReport rep = verify_kernels(vc);
    Tally tally;
    for (const auto& e : rep.entries) {
        if (e.name.find("probe") != std::string::npos || e.name.find("exactness") != std::string::npos)
            continue;
        tally.add(e.pass);
        detail(e.pass, "%s: %.3e (limit %.1e) %s", e.name.c_str(), e.value, e.threshold, e.detail.c_str());
    }
    return {tally.pass, "kernel identities, n <= 200, r in {1,2,3}: " + tally.text()};
}

Outcome ac6()
{
    Tally tally;
    const std::vector<int> ladder{128, 256, 512, 1024};
    for (double alpha : {0.3, 0.5, 0.7}) {
        const ProbeReport l1 = truncation_probe_l1(alpha, 1.0, ladder, PowerExpansion{{1.0, 0.0, alpha}});
        const double got = l1.orders.back();
        const double want = std::min(2.0 - alpha, 1.0 + alpha);
        tally.add(within(got, want, 0.1));
        detail(within(got, want, 0.1), "L1 probe on t^alpha, alpha=%.1f: order %.4f target %.4f (+-0.1)", alpha, got,
               want);
        const ProbeReport fi = truncation_probe_fracint(alpha, 1.0, ladder, PowerExpansion{{1.0, 0.0, 0.0}, {2.0, 0.0, 1.0}});
        const double go = fi.orders.back();
        tally.add(within(go, 1.0, 0.1));
        detail(within(go, 1.0, 0.1), "right-rectangle probe on 1+2t, alpha=%.1f: order %.4f target 1.0 (+-0.1)", alpha,
               go);

        const TemporalMesh mesh = build_temporal(1.0, 3, 50, 1.0);
        double worst = 0.0;
        for (int n = 1; n <= mesh.last_level(); ++n) {
            const WeightRow w = weight_row(mesh, alpha, n);
            std::vector<double> u(static_cast<std::size_t>(n) + 1);
            for (int k = 0; k <= n; ++k)
                u[static_cast<std::size_t>(k)] = -1.0 + 4.0 * mesh.t(k);
            const double exact = 4.0 * omega(2.0 - alpha, mesh.t(n));
            worst = std::max(worst, std::abs(l1_apply(w, u) - exact) / exact);
        }
        tally.add(worst <= 1e-12);
        detail(worst <= 1e-12, "L1 on affine data, alpha=%.1f: max relative error %.3e (limit 1e-12)", alpha, worst);
    }
    return {tally.pass, "truncation probes and affine exactness: " + tally.text()};
}

template <class F>
double rl_integral(double g, double t, F v)
{
    boost::math::quadrature::tanh_sinh<double> integ;
    double total = 0.0, a = 0.0;
    for (double b : {1.0, 2.0, t}) {
        if (b <= a || b > t)
            continue;
        total += integ.integrate(
            [&](double x, double xc) {
                const double d = (b == t && xc > 0.0) ? xc : t - x;
                return std::pow(d, g - 1.0) * v(x);
            },
            a, b);
        a = b;
    }
    return total / std::tgamma(g);
}

Outcome ac7()
{
    Tally tally;
    const double alpha = 0.5, p = 1.0 / (pi * pi), a = -2.0, b = 1.0, lambda = pi * pi;
    const ProblemSpec spec = make_case(CaseId::Example1Case1, alpha, SourceMode::ClosedG);
    const PowerExpansion& G = std::get<ClosedG>(spec.source).G;
    // u_t for T = (1+t) + t^a + (t-1)^(a+1) + (t-2)^(a+2) and its delayed copy
    auto Tp = [&](double s) {
        return 1.0 + alpha * std::pow(s, alpha - 1.0) + (s > 1.0 ? (alpha + 1.0) * std::pow(s - 1.0, alpha) : 0.0)
               + (s > 2.0 ? (alpha + 2.0) * std::pow(s - 2.0, alpha + 1.0) : 0.0);
    };
    auto T = [&](double s) {
        return 1.0 + s + (s > 0.0 ? std::pow(s, alpha) : 0.0) + (s > 1.0 ? std::pow(s - 1.0, alpha + 1.0) : 0.0)
               + (s > 2.0 ? std::pow(s - 2.0, alpha + 2.0) : 0.0);
    };
    auto Td = [&](double s) { return s <= 1.0 ? s : T(s - 1.0); };
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.01, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double t = U(rng);
        const double q = rl_integral(1.0 - alpha, t, Tp) + (p * lambda - a) * T(t) - b * rl_integral(1.0 - alpha, t, Td);
        worst = std::max(worst, std::abs(G(t) - q));
    }
    tally.add(worst <= 1e-8);
    detail(worst <= 1e-8, "analytic G vs tanh-sinh quadrature at 20 times: max difference %.3e (limit 1e-8)", worst);

    RunConfig cfg = preset("table1");
    cfg.Ms = {512};
    cfg.source = SourceMode::ClosedG;
    const ErrorTable closed = run_temporal_table(cfg);
    cfg.source = SourceMode::SampledF;
    const ErrorTable sampled = run_temporal_table(cfg);
    double change = 0.0;
    std::string where;
    for (const auto& row : closed.rows) {
        const ErrorRow* s = find(sampled, row.alpha, row.r, row.M, row.N, row.k, row.l);
        const double c = s ? std::abs(s->E - row.E) / row.E : INFINITY;
        if (c > change) {
            change = c;
            where = "alpha=" + std::to_string(row.alpha).substr(0, 3) + " N=" + std::to_string(row.N) + " (" +
                    std::to_string(row.k) + "," + std::to_string(row.l) + "]";
        }
    }
    tally.add(change < 0.02);
    detail(change < 0.02, "closed G vs sampled f on Table 1 cells (M=512): max relative change %.3e at %s (limit 2e-2)",
           change, where.c_str());
    return {tally.pass, "source oracles: " + tally.text()};
}

Outcome ac8()
{
    const ProblemSpec spec = make_case(CaseId::Example1Case1, 0.5);
    const TemporalMesh tm = build_temporal(1.0, 3, 100, 1.0);
    const SpatialMesh sm = build_spatial(1.0, 64);
    SolveOptions u, g;
    u.weights = WeightPath::Uniform;
    g.weights = WeightPath::Graded;
    const SolveRecord a = solve(spec, tm, sm, u);
    const SolveRecord b = solve(spec, tm, sm, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.U.size(); ++i)
        worst = std::max(worst, std::abs(a.U[i] - b.U[i]));
    const bool ok = worst <= 1e-13;
    detail(ok, "uniform vs graded r=1 path, N=100 M=64: max difference %.3e (limit 1e-13)", worst);
    char buf[96];
    std::snprintf(buf, sizeof buf, "uniform/graded degeneracy: max difference %.3e", worst);
    return {ok, buf};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::function<Outcome()>> criteria{ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8};
    std::vector<int> pick;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            pick.push_back(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: acceptance [--criterion N]...\n");
            return 2;
        }
    }
    if (pick.empty())
        for (int i = 1; i <= 8; ++i)
            pick.push_back(i);

    bool all = true;
    for (int c : pick) {
        if (c < 1 || c > 8) {
            std::fprintf(stderr, "criterion must be 1..8\n");
            return 2;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[static_cast<std::size_t>(c - 1)]();
        } catch (const std::exception& e) {
            o = {false, std::string("aborted: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] AC%d %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c, o.summary.c_str(), secs);
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
