#include "subdiff/fracops.hpp"

#include <cmath>
#include <string>

#include "subdiff/errors.hpp"
#include "subdiff/simd.hpp"

namespace subdiff {

double omega(double alpha, double t)
{
    if (!(alpha > 0.0))
        throw ValidationError("omega: alpha must be positive");
    if (!(t > 0.0))
        throw ValidationError("omega: t must be positive, got " + std::to_string(t));
    return std::pow(t, alpha - 1.0) * inv_gamma(alpha);
}

void fill_weight_row(const TemporalMesh& mesh, double alpha, int n, double* a, double* work)
{
    const double g = inv_gamma(2.0 - alpha);
    mesh.gaps_to(n, 0, work);
    simd::active().pow_pos(work, static_cast<std::size_t>(n), 1.0 - alpha, work);
    work[n] = 0.0;
    for (int k = 1; k <= n; ++k)
        a[k - 1] = (work[k - 1] - work[k]) * g / mesh.step(k);
}

WeightRow weight_row(const TemporalMesh& mesh, double alpha, int n)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("weight_row: alpha must lie in (0,1)");
    if (n < 1 || n > mesh.last_level())
        throw ValidationError("weight_row: level " + std::to_string(n) + " outside 1.."
                              + std::to_string(mesh.last_level()));
    WeightRow w;
    w.n = n;
    w.alpha = alpha;
    w.a.resize(static_cast<std::size_t>(n));
    w.rho.resize(static_cast<std::size_t>(n));
    std::vector<double> work(static_cast<std::size_t>(n) + 1);
    fill_weight_row(mesh, alpha, n, w.a.data(), work.data());
    for (int k = 1; k <= n; ++k)
        w.rho[static_cast<std::size_t>(k - 1)] = mesh.step(k);
    return w;
}

std::vector<double> uniform_weights(double alpha, double rho, int count)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("uniform_weights: alpha must lie in (0,1)");
    if (!(rho > 0.0) || count < 0)
        throw ValidationError("uniform_weights: bad step or count");
    std::vector<double> c(static_cast<std::size_t>(count) + 1);
    for (int j = 0; j <= count; ++j)
        c[static_cast<std::size_t>(j)] = j * rho;
    simd::active().pow_pos(c.data(), c.size(), 1.0 - alpha, c.data());
    const double g = inv_gamma(2.0 - alpha);
    std::vector<double> a(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j)
        a[static_cast<std::size_t>(j)] = (c[static_cast<std::size_t>(j + 1)] - c[static_cast<std::size_t>(j)]) * g / rho;
    return a;
}

double l1_apply(const WeightRow& w, std::span<const double> u)
{
    if (u.size() != static_cast<std::size_t>(w.n) + 1)
        throw ValidationError("l1_apply: expected " + std::to_string(w.n + 1) + " values, got "
                              + std::to_string(u.size()));
    double s = 0.0;
    for (int k = 1; k <= w.n; ++k)
        s += w.a[static_cast<std::size_t>(k - 1)] * (u[static_cast<std::size_t>(k)] - u[static_cast<std::size_t>(k - 1)]);
    return s;
}

double fracint_apply(const WeightRow& w, std::span<const double> v)
{
    if (v.size() != static_cast<std::size_t>(w.n))
        throw ValidationError("fracint_apply: expected " + std::to_string(w.n) + " values, got "
                              + std::to_string(v.size()));
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k)
        s += w.rho[k] * w.a[k] * v[k];
    return s;
}

KernelSeq p_sequence_uniform(std::span<const double> a, double alpha)
{
    if (a.empty())
        throw ValidationError("p_sequence_uniform: empty weights");
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (!(a[j] > 0.0))
            throw ValidationError("p_sequence_uniform: weights must be positive");
        if (j > 0 && !(a[j] < a[j - 1]))
            throw ValidationError("p_sequence_uniform: weights must be strictly decreasing");
    }
    const std::size_t n = a.size();
    KernelSeq P;
    P.alpha = alpha;
    P.n = static_cast<int>(n);
    P.values.assign(n, 0.0);
    P.values[0] = 1.0 / a[0];
    for (std::size_t m = 1; m < n; ++m) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            s += P.values[i] * (a[m - 1 - i] - a[m - i]);
        P.values[m] = s / a[0];
    }
    return P;
}

KernelSeq p_sequence_graded(std::span<const WeightRow> rows)
{
    if (rows.empty())
        throw ValidationError("p_sequence_graded: no rows");
    const int n = static_cast<int>(rows.size());
    for (int i = 1; i <= n; ++i) {
        const WeightRow& w = rows[static_cast<std::size_t>(i - 1)];
        if (w.n != i || w.a.size() != static_cast<std::size_t>(i) || w.alpha != rows[0].alpha)
            throw ValidationError("p_sequence_graded: row " + std::to_string(i) + " is inconsistent");
        if (i > 1 && w.rho[0] != rows[0].rho[0])
            throw ValidationError("p_sequence_graded: rows come from different meshes");
    }
    // a^{(i)}_{i-k} = rows[i-1].a[k-1]
    auto coef = [&](int i, int k) { return rows[static_cast<std::size_t>(i - 1)].a[static_cast<std::size_t>(k - 1)]; };

    KernelSeq P;
    P.alpha = rows[0].alpha;
    P.n = n;
    P.values.assign(static_cast<std::size_t>(n), 0.0);
    P.values[0] = 1.0 / coef(n, n);
    for (int j = n - 1; j >= 1; --j) {
        double s = 0.0;
        for (int i = j + 1; i <= n; ++i)
            s += P.values[static_cast<std::size_t>(n - i)] * (coef(i, j + 1) - coef(i, j));
        P.values[static_cast<std::size_t>(n - j)] = s / coef(j, j);
    }
    return P;
}

} // namespace subdiff
