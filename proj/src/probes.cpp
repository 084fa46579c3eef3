#include <algorithm>
#include <cmath>
#include <vector>

#include "subdiff/errors.hpp"
#include "subdiff/fracops.hpp"

namespace subdiff {

namespace {

void check_ladder(std::span<const int> ladder)
{
    if (ladder.empty())
        throw ValidationError("probe: empty N ladder");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (ladder[i] != 2 * ladder[i - 1])
            throw ValidationError("probe: N ladder must double");
}

void fit_orders(ProbeReport& rep)
{
    for (std::size_t i = 1; i < rep.levels.size(); ++i) {
        const double c = rep.levels[i - 1].monitored;
        const double f = rep.levels[i].monitored;
        rep.orders.push_back(c > 0.0 && f > 0.0 ? std::log2(c / f) : 0.0);
    }
}

} // namespace

ProbeReport truncation_probe_l1(double alpha, double r, std::span<const int> ladder,
                                const PowerExpansion& target, double tau)
{
    check_ladder(ladder);
    const PowerExpansion exact = caputo_of_power(alpha, target);
    const double q = std::min((2.0 - alpha) / r, 1.0 + alpha);

    ProbeReport rep;
    rep.predicted = r * q;
    for (int N : ladder) {
        const TemporalMesh mesh = build_temporal(tau, 1, N, r);
        const int last = mesh.last_level();
        std::vector<double> u(static_cast<std::size_t>(last) + 1);
        for (int k = 0; k <= last; ++k)
            u[static_cast<std::size_t>(k)] = target(mesh.t(k));

        ProbeLevel lvl;
        lvl.N = N;
        double worst = 0.0, weighted = 0.0;
        for (int n = 1; n <= last; ++n) {
            const WeightRow w = weight_row(mesh, alpha, n);
            const double err = std::abs(l1_apply(w, std::span<const double>(u).first(static_cast<std::size_t>(n) + 1))
                                        - exact(mesh.t(n)));
            worst = std::max(worst, err);
            weighted = std::max(weighted, std::pow(mesh.t(n), q) * err);
        }
        lvl.window_error.push_back(worst);
        lvl.monitored = weighted;
        rep.levels.push_back(lvl);
    }
    fit_orders(rep);
    return rep;
}

ProbeReport truncation_probe_fracint(double alpha, double r, std::span<const int> ladder,
                                     const PowerExpansion& history, int K, double tau)
{
    check_ladder(ladder);
    const PowerExpansion exact = rlint_of_power(1.0 - alpha, history);

    ProbeReport rep;
    rep.predicted = 1.0;
    for (int N : ladder) {
        const TemporalMesh mesh = build_temporal(tau, K, N, r);
        const int last = mesh.last_level();
        std::vector<double> v(static_cast<std::size_t>(last));
        for (int k = 1; k <= last; ++k)
            v[static_cast<std::size_t>(k - 1)] = history(mesh.t(k));

        ProbeLevel lvl;
        lvl.N = N;
        lvl.window_error.assign(static_cast<std::size_t>(K), 0.0);
        for (int n = 1; n <= last; ++n) {
            const WeightRow w = weight_row(mesh, alpha, n);
            const double err = std::abs(fracint_apply(w, std::span<const double>(v).first(static_cast<std::size_t>(n)))
                                        - exact(mesh.t(n)));
            auto& slot = lvl.window_error[static_cast<std::size_t>((n - 1) / (2 * N))];
            slot = std::max(slot, err);
        }
        lvl.monitored = *std::max_element(lvl.window_error.begin(), lvl.window_error.end());
        rep.levels.push_back(lvl);
    }
    fit_orders(rep);
    return rep;
}

} // namespace subdiff
