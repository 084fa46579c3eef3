#include "subdiff/fem1d.hpp"

#include <cmath>
#include <string>

#include "subdiff/errors.hpp"

namespace subdiff {

void TriDiag::apply(std::span<const double> x, std::span<double> y) const
{
    const std::size_t m = diag.size();
    if (x.size() != m || y.size() != m)
        throw ValidationError("TriDiag::apply: dimension mismatch");
    if (m == 0)
        return;
    if (m == 1) {
        y[0] = diag[0] * x[0];
        return;
    }
    y[0] = diag[0] * x[0] + off[0] * x[1];
    for (std::size_t i = 1; i + 1 < m; ++i)
        y[i] = off[i - 1] * x[i - 1] + diag[i] * x[i] + off[i] * x[i + 1];
    y[m - 1] = off[m - 2] * x[m - 2] + diag[m - 1] * x[m - 1];
}

NodalVector TriDiag::apply(std::span<const double> x) const
{
    NodalVector y(diag.size());
    apply(x, y);
    return y;
}

TriDiag assemble_mass(const SpatialMesh& m)
{
    const std::size_t n = static_cast<std::size_t>(m.interior());
    TriDiag A;
    A.diag.assign(n, 4.0 * m.h / 6.0);
    A.off.assign(n - 1, m.h / 6.0);
    return A;
}

TriDiag assemble_stiffness(const SpatialMesh& m)
{
    const std::size_t n = static_cast<std::size_t>(m.interior());
    TriDiag A;
    A.diag.assign(n, 2.0 / m.h);
    A.off.assign(n - 1, -1.0 / m.h);
    return A;
}

TriDiag combine(double c1, const TriDiag& A, double c2, const TriDiag& B)
{
    if (A.size() != B.size())
        throw ValidationError("combine: dimension mismatch");
    TriDiag C;
    C.diag.resize(A.size());
    C.off.resize(A.off.size());
    for (std::size_t i = 0; i < A.diag.size(); ++i)
        C.diag[i] = c1 * A.diag[i] + c2 * B.diag[i];
    for (std::size_t i = 0; i < A.off.size(); ++i)
        C.off[i] = c1 * A.off[i] + c2 * B.off[i];
    return C;
}

TriDiag assemble_B(double p, double a, const TriDiag& mass, const TriDiag& stiff)
{
    if (!(p > 0.0))
        throw ValidationError("assemble_B: p must be positive");
    if (!(a <= 0.0))
        throw ValidationError("assemble_B: a must be <= 0");
    return combine(p, stiff, -a, mass);
}

NodalVector load_vector(const std::function<double(double)>& profile, const SpatialMesh& m)
{
    static const double xi[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static const double wt[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    NodalVector F(static_cast<std::size_t>(m.interior()), 0.0);
    const double half = 0.5 * m.h;
    for (int e = 0; e < m.M; ++e) {
        const double xl = m.nodes[static_cast<std::size_t>(e)];
        double left = 0.0, right = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double fx = profile(xl + half * (1.0 + xi[q])) * wt[q] * half;
            left += fx * 0.5 * (1.0 - xi[q]);
            right += fx * 0.5 * (1.0 + xi[q]);
        }
        // interior node j sits at index j - 1
        if (e >= 1)
            F[static_cast<std::size_t>(e - 1)] += left;
        if (e + 1 <= m.M - 1)
            F[static_cast<std::size_t>(e)] += right;
    }
    return F;
}

NodalVector interpolate(const std::function<double(double)>& fn, const SpatialMesh& m)
{
    NodalVector v(static_cast<std::size_t>(m.interior()));
    for (int j = 1; j < m.M; ++j)
        v[static_cast<std::size_t>(j - 1)] = fn(m.nodes[static_cast<std::size_t>(j)]);
    return v;
}

double mass_inner(std::span<const double> u, std::span<const double> v, const TriDiag& mass)
{
    const std::size_t m = mass.size();
    if (u.size() != m || v.size() != m)
        throw ValidationError("mass_inner: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double mv = mass.diag[i] * v[i];
        if (i > 0)
            mv += mass.off[i - 1] * v[i - 1];
        if (i + 1 < m)
            mv += mass.off[i] * v[i + 1];
        s += u[i] * mv;
    }
    return s;
}

double l2_norm(std::span<const double> v, const TriDiag& mass)
{
    return std::sqrt(std::max(0.0, mass_inner(v, v, mass)));
}

void tridiag_solve(const TriDiag& A, std::span<const double> rhs, std::span<double> x,
                   std::vector<double>& scratch)
{
    const std::size_t m = A.size();
    if (rhs.size() != m || x.size() != m)
        throw ValidationError("tridiag_solve: dimension mismatch");
    for (std::size_t i = 0; i < m; ++i) {
        double offsum = 0.0;
        if (i > 0)
            offsum += std::abs(A.off[i - 1]);
        if (i + 1 < m)
            offsum += std::abs(A.off[i]);
        if (!(std::abs(A.diag[i]) > offsum))
            throw NumericalError("tridiag_solve: row " + std::to_string(i)
                                 + " is not strictly diagonally dominant");
    }
    scratch.resize(m);
    double denom = A.diag[0];
    x[0] = rhs[0] / denom;
    for (std::size_t i = 1; i < m; ++i) {
        scratch[i - 1] = A.off[i - 1] / denom;
        denom = A.diag[i] - A.off[i - 1] * scratch[i - 1];
        x[i] = (rhs[i] - A.off[i - 1] * x[i - 1]) / denom;
    }
    for (std::size_t i = m - 1; i-- > 0;)
        x[i] -= scratch[i] * x[i + 1];
}

NodalVector tridiag_solve(const TriDiag& A, std::span<const double> rhs)
{
    NodalVector x(A.size());
    std::vector<double> scratch;
    tridiag_solve(A, rhs, x, scratch);
    return x;
}

} // namespace subdiff
