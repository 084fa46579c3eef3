#include <algorithm>
#include <cmath>
#include <sstream>

#include "subdiff/bench.hpp"
#include "subdiff/errors.hpp"

namespace subdiff {

namespace {

std::string tag(double alpha, double r)
{
    std::ostringstream os;
    os << "alpha=" << alpha << " r=" << r;
    return os.str();
}

struct Worst {
    double value = -INFINITY;
    std::string where;
    void update(double v, const std::string& w)
    {
        if (v > value || std::isnan(v)) {
            value = v;
            where = w;
        }
    }
};

VerifyEntry entry(const std::string& name, const Worst& w, double threshold)
{
    return {name, w.value, threshold, w.value <= threshold, "worst at " + w.where};
}

} // namespace

bool VerifyReport::all_pass() const
{
    return std::all_of(entries.begin(), entries.end(), [](const VerifyEntry& e) { return e.pass; });
}

VerifyReport verify_kernels(const VerifyConfig& cfg)
{
    if (cfg.max_level < 8 || cfg.max_level % 4 != 0)
        throw ValidationError("verify: max_level must be a positive multiple of 4");
    const int K = 2;
    const int N = cfg.max_level / (2 * K);
    VerifyReport rep;

    Worst tele, mono, pid, pbound, gbound, l1lin, fconst;
    for (double alpha : cfg.alphas) {
        for (double r : cfg.rs) {
            const TemporalMesh mesh = build_temporal(1.0, K, N, r);
            std::vector<WeightRow> rows;
            for (int n = 1; n <= cfg.max_level; ++n)
                rows.push_back(weight_row(mesh, alpha, n));

            for (const auto& w : rows) {
                const double target = omega(2.0 - alpha, mesh.t(w.n));
                double s = 0.0;
                for (std::size_t k = 0; k < w.a.size(); ++k)
                    s += w.rho[k] * w.a[k];
                tele.update(std::abs(s - target) / target, tag(alpha, r) + " n=" + std::to_string(w.n));

                std::vector<double> u(static_cast<std::size_t>(w.n) + 1);
                for (int k = 0; k <= w.n; ++k)
                    u[static_cast<std::size_t>(k)] = 2.0 + 3.0 * mesh.t(k);
                // scaled by sum a_k (|u_k| + |u_{k-1}|): rounding in the samples themselves is not the operator's
                double scale = 0.0;
                for (int k = 1; k <= w.n; ++k)
                    scale += w.a[static_cast<std::size_t>(k - 1)]
                             * (std::abs(u[static_cast<std::size_t>(k)]) + std::abs(u[static_cast<std::size_t>(k - 1)]));
                l1lin.update(std::abs(l1_apply(w, u) - 3.0 * target) / std::max(3.0 * target, scale),
                             tag(alpha, r) + " n=" + std::to_string(w.n));
                const std::vector<double> ones(static_cast<std::size_t>(w.n), 1.0);
                fconst.update(std::abs(fracint_apply(w, ones) - target) / target,
                              tag(alpha, r) + " n=" + std::to_string(w.n));
            }

            for (int n = 1; n <= cfg.max_level; ++n) {
                const KernelSeq P = p_sequence_graded(std::span<const WeightRow>(rows).first(static_cast<std::size_t>(n)));
                for (int k = 1; 2 * (k - 1) * N + 1 <= n && k <= K; ++k) {
                    double s = 0.0;
                    for (int j = 2 * (k - 1) * N + 1; j <= n; ++j)
                        s += P.values[static_cast<std::size_t>(n - j)] * omega(1.0 - alpha, mesh.t(j) - (k - 1));
                    gbound.update(s - 1.0, tag(alpha, r) + " n=" + std::to_string(n) + " k=" + std::to_string(k));
                }
            }
        }

        const double rho = 1.0 / (2.0 * N);
        const std::vector<double> a = uniform_weights(alpha, rho, cfg.max_level);
        double violations = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j)
            if (!(a[j] > 0.0) || (j > 0 && !(a[j] < a[j - 1])))
                violations += 1.0;
        mono.update(violations, tag(alpha, 1.0));

        const KernelSeq P = p_sequence_uniform(a, alpha);
        for (int n = 1; n <= cfg.max_level; ++n) {
            for (int k = 1; k <= n; ++k) {
                double s = 0.0;
                for (int j = k; j <= n; ++j)
                    s += P.values[static_cast<std::size_t>(n - j)] * a[static_cast<std::size_t>(j - k)];
                pid.update(std::abs(s - 1.0), tag(alpha, 1.0) + " n=" + std::to_string(n) + " k=" + std::to_string(k));
            }
            double s = 0.0;
            for (int j = 1; j <= n; ++j)
                s += P.values[static_cast<std::size_t>(n - j)];
            pbound.update(s - omega(1.0 + alpha, n * rho), tag(alpha, 1.0) + " n=" + std::to_string(n));
        }
    }

    rep.entries.push_back(entry("telescoping weight identity (relative)", tele, 1e-12));
    rep.entries.push_back(entry("uniform weight monotonicity (violations)", mono, 0.0));
    rep.entries.push_back(entry("uniform kernel identity sum P a = 1", pid, 1e-10));
    rep.entries.push_back(entry("uniform kernel bound sum P - omega_{1+alpha}(t_n)", pbound, 1e-10));
    rep.entries.push_back(entry("graded kernel bound weighted sum - 1", gbound, 1e-10));
    rep.entries.push_back(entry("L1 exactness on affine data (relative to data scale)", l1lin, 1e-12));
    rep.entries.push_back(entry("right-rectangle exactness on constants (relative)", fconst, 1e-12));

    for (double alpha : cfg.alphas) {
        const ProbeReport l1 = truncation_probe_l1(alpha, 1.0, cfg.probe_ladder, PowerExpansion{{1.0, 0.0, alpha}});
        const double got = l1.orders.empty() ? 0.0 : l1.orders.back();
        std::ostringstream d;
        d << "predicted " << l1.predicted << ", orders";
        for (double o : l1.orders)
            d << ' ' << o;
        rep.entries.push_back({"L1 probe order on t^alpha, " + tag(alpha, 1.0), got, 0.1,
                               std::abs(got - l1.predicted) <= 0.1, d.str()});
    }
    for (double r : {1.0, 2.0}) {
        for (double alpha : cfg.alphas) {
            const ProbeReport fi = truncation_probe_fracint(alpha, r, cfg.probe_ladder,
                                                            PowerExpansion{{1.0, 0.0, 0.0}, {1.0, 0.0, 1.0}}, 1);
            const double got = fi.orders.empty() ? 0.0 : fi.orders.back();
            std::ostringstream d;
            d << "predicted 1, orders";
            for (double o : fi.orders)
                d << ' ' << o;
            rep.entries.push_back({"right-rectangle probe order on 1+t, " + tag(alpha, r), got, 0.1,
                                   std::abs(got - 1.0) <= 0.1, d.str()});
        }
    }
    return rep;
}

} // namespace subdiff
