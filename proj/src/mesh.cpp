#include "subdiff/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subdiff/errors.hpp"

namespace subdiff {

TemporalMesh build_temporal(double tau, int K, int N, double r)
{
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw ValidationError("temporal mesh: tau must be positive, got " + std::to_string(tau));
    if (K < 1)
        throw ValidationError("temporal mesh: K must be >= 1, got " + std::to_string(K));
    if (N < 2)
        throw ValidationError("temporal mesh: N must be >= 2, got " + std::to_string(N));
    if (!(r >= 1.0) || !std::isfinite(r))
        throw ValidationError("temporal mesh: r must be >= 1, got " + std::to_string(r));

    TemporalMesh m;
    m.tau_ = tau;
    m.K_ = K;
    m.N_ = N;
    m.r_ = r;
    const int per = 2 * N;
    const std::size_t count = static_cast<std::size_t>((K + 1) * per + 1);
    m.points_.resize(count);
    m.win_.resize(count);
    m.pos_.resize(count);
    m.lo_.assign(count, 0.0);
    m.lo_err_.assign(count, 0.0);
    m.hi_.assign(count, 0.0);
    m.hi_err_.assign(count, 0.0);
    m.mid_.resize(count);
    const long double half = 0.5L * tau;

    // window i = 0 is the history window [-tau, 0]; index 0 is its left end
    for (std::size_t p = 0; p < count; ++p) {
        const int i = p == 0 ? 0 : static_cast<int>((p - 1) / static_cast<std::size_t>(per));
        const int j = static_cast<int>(p) - i * per;
        const bool left = j <= N;
        const int d = left ? j : per - j;
        const long double off = half * std::pow(static_cast<long double>(d) / N, static_cast<long double>(r));
        const double od = static_cast<double>(off);
        const double oe = static_cast<double>(off - od);
        if (left) {
            m.lo_[p] = od;
            m.lo_err_[p] = oe;
            m.hi_[p] = tau - od;
        } else {
            m.hi_[p] = od;
            m.hi_err_[p] = oe;
            m.lo_[p] = tau - od;
        }
        m.mid_[p] = static_cast<double>(-half * std::expm1(r * std::log1p(-static_cast<long double>(N - d) / N)));
        double t;
        if (j == per)
            t = i * tau;
        else if (j < N)
            t = od + (i - 1) * tau;
        else
            t = i * tau - od;
        m.points_[p] = t;
        m.win_[p] = i;
        m.pos_[p] = j;
    }
    m.steps_.assign(count, 0.0);
    for (int n = m.first_level() + 1; n <= m.last_level(); ++n)
        m.steps_[static_cast<std::size_t>(n + per)] = m.gap(n, n - 1);
    return m;
}

// Offsets inside a window are differenced with their error terms, which keeps
// small gaps accurate where the stored times have lost the digits.
void TemporalMesh::gaps_to(int n, int k0, double* out) const
{
    const int per = 2 * N_;
    const std::size_t p = static_cast<std::size_t>(n + per);
    const int wp = win_[p];
    const int jp = pos_[p];
    const int kstart = std::max(k0, std::min(n, n - jp + 1));
    const double* lo = lo_.data() + per;
    const double* loe = lo_err_.data() + per;
    const double* hi = hi_.data() + per;
    const double* hie = hi_err_.data() + per;
    const double* mid = mid_.data() + per;
    const int* win = win_.data() + per;
    const double lop = lo_[p];

    for (int k = k0; k < kstart; ++k)
        out[k - k0] = (hi[k] + lop) + static_cast<double>(wp - 1 - win[k]) * tau_;
    if (jp <= N_) {
        const double le = lo_err_[p];
        for (int k = kstart; k < n; ++k)
            out[k - k0] = (lop - lo[k]) + (le - loe[k]);
        return;
    }
    // k in the left half of the window, then the right half
    const int kmid = std::max(kstart, n - jp + N_);
    const double midp = mid_[p], hip = hi_[p], hep = hi_err_[p];
    for (int k = kstart; k < kmid; ++k)
        out[k - k0] = mid[k] + midp;
    for (int k = kmid; k < n; ++k)
        out[k - k0] = (hi[k] - hip) + (hie[k] - hep);
}

double TemporalMesh::gap(int n, int k) const
{
    if (n == k)
        return 0.0;
    const int per = 2 * N_;
    const std::size_t p = static_cast<std::size_t>(n + per), q = static_cast<std::size_t>(k + per);
    if (win_[p] != win_[q])
        return (hi_[q] + lo_[p]) + static_cast<double>(win_[p] - 1 - win_[q]) * tau_;
    if (pos_[p] <= N_)
        return (lo_[p] - lo_[q]) + (lo_err_[p] - lo_err_[q]);
    if (pos_[q] < N_)
        return mid_[q] + mid_[p];
    return (hi_[q] - hi_[p]) + (hi_err_[q] - hi_err_[p]);
}

SpatialMesh build_spatial(double L, int M)
{
    if (!(L > 0.0) || !std::isfinite(L))
        throw ValidationError("spatial mesh: L must be positive, got " + std::to_string(L));
    if (M < 2)
        throw ValidationError("spatial mesh: M must be >= 2, got " + std::to_string(M));
    SpatialMesh s;
    s.L = L;
    s.M = M;
    s.h = L / M;
    s.nodes.resize(static_cast<std::size_t>(M + 1));
    for (int j = 0; j <= M; ++j)
        s.nodes[static_cast<std::size_t>(j)] = L * j / M;
    s.nodes[static_cast<std::size_t>(M)] = L;
    return s;
}

} // namespace subdiff
