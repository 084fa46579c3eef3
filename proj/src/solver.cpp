#include "subdiff/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "subdiff/errors.hpp"
#include "subdiff/simd.hpp"

namespace subdiff {

namespace {

constexpr double kBoundaryTol = 1e-12;

void check_consistency(const ProblemSpec& spec, const TemporalMesh& tmesh, const SpatialMesh& smesh)
{
    if (std::abs(tmesh.tau() - spec.tau) > 1e-14 * spec.tau || tmesh.K() != spec.K)
        throw ValidationError("temporal mesh was not built from the problem's tau and K");
    if (std::abs(smesh.L - spec.L) > 1e-14 * spec.L)
        throw ValidationError("spatial mesh length differs from the problem's L");
}

PowerExpansion closed_source(const ProblemSpec& spec)
{
    if (const auto* g = std::get_if<ClosedG>(&spec.source))
        return g->G;
    if (const auto* f = std::get_if<ClosedF>(&spec.source))
        return rlint_of_power(1.0 - spec.alpha, f->f);
    return {};
}

} // namespace

void ProblemSpec::validate() const
{
    if (!(p > 0.0))
        throw ValidationError("problem: p must be positive");
    if (!(a <= 0.0))
        throw ValidationError("problem: a must be <= 0");
    if (b == 0.0 || !std::isfinite(b))
        throw ValidationError("problem: b must be nonzero");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("problem: alpha must lie in (0,1)");
    if (!(tau > 0.0))
        throw ValidationError("problem: tau must be positive");
    if (K < 1)
        throw ValidationError("problem: K must be >= 1");
    if (!(L > 0.0))
        throw ValidationError("problem: L must be positive");
    if (!phi)
        throw ValidationError("problem: history phi is missing");
    if (!source_profile)
        throw ValidationError("problem: source profile is missing");
    if (const auto* s = std::get_if<SampledF>(&source); s && !s->f)
        throw ValidationError("problem: sampled source has no function");
}

std::span<const double> SolveRecord::level(int n) const
{
    assert(n >= first_level() && n <= last_level());
    return {U.data() + static_cast<std::size_t>(n - first_level()) * static_cast<std::size_t>(m),
            static_cast<std::size_t>(m)};
}

std::span<double> SolveRecord::level(int n)
{
    assert(n >= first_level() && n <= last_level());
    return {U.data() + static_cast<std::size_t>(n - first_level()) * static_cast<std::size_t>(m),
            static_cast<std::size_t>(m)};
}

SolveRecord init_history(const ProblemSpec& spec, const TemporalMesh& tmesh, const SpatialMesh& smesh)
{
    spec.validate();
    check_consistency(spec, tmesh, smesh);

    SolveRecord rec;
    rec.tmesh = tmesh;
    rec.smesh = smesh;
    rec.m = smesh.interior();
    const std::size_t levels = static_cast<std::size_t>(tmesh.last_level() - tmesh.first_level() + 1);
    rec.U.assign(levels * static_cast<std::size_t>(rec.m), 0.0);
    rec.max_norm.assign(levels, 0.0);

    for (int n = tmesh.first_level(); n <= 0; ++n) {
        const double t = tmesh.t(n);
        if (std::abs(spec.phi(0.0, t)) > kBoundaryTol || std::abs(spec.phi(spec.L, t)) > kBoundaryTol)
            throw ValidationError("history violates the homogeneous boundary condition at t = "
                                  + std::to_string(t));
        auto u = rec.level(n);
        double mx = 0.0;
        for (int j = 1; j < smesh.M; ++j) {
            u[static_cast<std::size_t>(j - 1)] = spec.phi(smesh.nodes[static_cast<std::size_t>(j)], t);
            mx = std::max(mx, std::abs(u[static_cast<std::size_t>(j - 1)]));
        }
        rec.max_norm[static_cast<std::size_t>(n - tmesh.first_level())] = mx;
    }
    return rec;
}

double source_value(const ProblemSpec& spec, const TemporalMesh& tmesh, const WeightRow& w)
{
    if (const auto* s = std::get_if<SampledF>(&spec.source)) {
        std::vector<double> v(static_cast<std::size_t>(w.n));
        for (int k = 1; k <= w.n; ++k)
            v[static_cast<std::size_t>(k - 1)] = s->f(tmesh.t(k));
        return fracint_apply(w, v);
    }
    return closed_source(spec)(tmesh.t(w.n));
}

NodalVector step(int n, const SolveRecord& state, const ProblemSpec& spec, const WeightRow& w)
{
    if (w.n != n)
        throw ValidationError("step: weight row belongs to another level");
    const int N = state.tmesh.N();
    const std::size_t m = static_cast<std::size_t>(state.m);
    const TriDiag mass = assemble_mass(state.smesh);
    const TriDiag stiff = assemble_stiffness(state.smesh);

    const double a0 = w.a0();
    std::vector<double> r(m, 0.0);
    auto prev = state.level(n - 1);
    for (std::size_t i = 0; i < m; ++i)
        r[i] = a0 * prev[i];
    for (int k = 1; k <= n - 1; ++k) {
        const double c = w.a[static_cast<std::size_t>(k - 1)];
        auto uk = state.level(k);
        auto ukm = state.level(k - 1);
        for (std::size_t i = 0; i < m; ++i)
            r[i] -= c * (uk[i] - ukm[i]);
    }
    for (int k = 1; k <= n; ++k) {
        const double c = spec.b * w.rho[static_cast<std::size_t>(k - 1)] * w.a[static_cast<std::size_t>(k - 1)];
        auto ud = state.level(k - 2 * N);
        for (std::size_t i = 0; i < m; ++i)
            r[i] += c * ud[i];
    }
    NodalVector rhs = mass.apply(r);
    const double g = source_value(spec, state.tmesh, w);
    const NodalVector F = load_vector(spec.source_profile, state.smesh);
    for (std::size_t i = 0; i < m; ++i)
        rhs[i] += g * F[i];
    const TriDiag A = combine(a0 - spec.a, mass, spec.p, stiff);
    return tridiag_solve(A, rhs);
}

struct Stepper::Impl {
    ProblemSpec spec;
    SolveOptions opts;
    SolveRecord rec;
    TriDiag mass, stiff, A;
    double A_a0 = std::numeric_limits<double>::quiet_NaN();
    NodalVector F;
    PowerExpansion G;
    bool sampled = false;
    std::vector<double> fs;

    bool uniform_path = false;
    double rho = 0.0;
    std::vector<double> ucache;

    int N = 0, m = 0, last = 0, next = 1;
    std::vector<double> D;

    int block_start = 0, block_len = 0, stride = 0;
    std::vector<double> rows, wq, H, Q, gvals;
    std::vector<double> work, r, rhs, scratch;

    double* diff(int k) { return D.data() + static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(m); }

    void prepare_block(int n0)
    {
        const simd::Kernels& kern = simd::active();
        const int want = opts.block > 0 ? opts.block : (m >= 64 ? 32 : 8);
        const int B = std::min({want, 2 * N, last - n0 + 1});
        block_start = n0;
        block_len = B;
        stride = n0 + B - 1;
        // the delay sum of the last row reads level stride - 2N, which must already be solved
        if (stride - 2 * N > n0 - 1)
            throw NumericalError("stepper: delay term would read an unsolved level");

        const std::size_t sz = static_cast<std::size_t>(B) * static_cast<std::size_t>(stride);
        rows.assign(sz, 0.0);
        wq.assign(sz, 0.0);
        work.resize(static_cast<std::size_t>(stride) + 1);
        for (int b = 0; b < B; ++b) {
            const int n = n0 + b;
            double* row = rows.data() + static_cast<std::size_t>(b) * stride;
            double* q = wq.data() + static_cast<std::size_t>(b) * stride;
            if (uniform_path) {
                for (int k = 1; k <= n; ++k)
                    row[k - 1] = ucache[static_cast<std::size_t>(n - k)];
                for (int k = 1; k <= n; ++k)
                    q[k - 1] = rho * row[k - 1];
            } else {
                fill_weight_row(rec.tmesh, spec.alpha, n, row, work.data());
                for (int k = 1; k <= n; ++k)
                    q[k - 1] = rec.tmesh.step(k) * row[k - 1];
            }
        }

        const std::size_t bm = static_cast<std::size_t>(B) * static_cast<std::size_t>(m);
        H.assign(bm, 0.0);
        Q.assign(bm, 0.0);
        if (n0 > 1)
            kern.gemm_acc(static_cast<std::size_t>(B), static_cast<std::size_t>(m),
                          static_cast<std::size_t>(n0 - 1), rows.data(), static_cast<std::size_t>(stride),
                          D.data(), static_cast<std::size_t>(m), H.data(), static_cast<std::size_t>(m));
        kern.gemm_acc(static_cast<std::size_t>(B), static_cast<std::size_t>(m), static_cast<std::size_t>(stride),
                      wq.data(), static_cast<std::size_t>(stride), rec.level(1 - 2 * N).data(),
                      static_cast<std::size_t>(m), Q.data(), static_cast<std::size_t>(m));

        gvals.assign(static_cast<std::size_t>(B), 0.0);
        for (int b = 0; b < B; ++b) {
            const int n = n0 + b;
            if (sampled) {
                const double* q = wq.data() + static_cast<std::size_t>(b) * stride;
                double s = 0.0;
                for (int k = 1; k <= n; ++k)
                    s += q[k - 1] * fs[static_cast<std::size_t>(k - 1)];
                gvals[static_cast<std::size_t>(b)] = s;
            } else {
                gvals[static_cast<std::size_t>(b)] = G(rec.tmesh.t(n));
            }
        }
    }

    std::span<const double> advance()
    {
        if (next > last)
            throw ValidationError("stepper: all levels already solved");
        if (next >= block_start + block_len)
            prepare_block(next);
        const int n = next;
        const int b = n - block_start;
        const std::size_t um = static_cast<std::size_t>(m);
        const double* row = rows.data() + static_cast<std::size_t>(b) * stride;
        double* h = H.data() + static_cast<std::size_t>(b) * um;
        const double* q = Q.data() + static_cast<std::size_t>(b) * um;

        if (n > block_start)
            simd::active().gemm_acc(1, um, static_cast<std::size_t>(n - block_start), row + (block_start - 1),
                                    static_cast<std::size_t>(stride), diff(block_start), um, h, um);

        const double a0 = row[n - 1];
        auto prev = rec.level(n - 1);
        for (std::size_t i = 0; i < um; ++i)
            r[i] = a0 * prev[i] - h[i] + spec.b * q[i];
        mass.apply(r, rhs);
        const double g = gvals[static_cast<std::size_t>(b)];
        for (std::size_t i = 0; i < um; ++i)
            rhs[i] += g * F[i];
        if (a0 != A_a0) {
            A = combine(a0 - spec.a, mass, spec.p, stiff);
            A_a0 = a0;
        }
        auto u = rec.level(n);
        tridiag_solve(A, rhs, u, scratch);

        double* d = diff(n);
        double mx = 0.0;
        for (std::size_t i = 0; i < um; ++i) {
            d[i] = u[i] - prev[i];
            mx = std::max(mx, std::abs(u[i]));
        }
        if (!std::isfinite(mx) || mx > opts.divergence_limit)
            throw NumericalError("solver diverged at level " + std::to_string(n) + " (sup norm "
                                 + std::to_string(mx) + ")");
        rec.max_norm[static_cast<std::size_t>(n - rec.first_level())] = mx;
        ++next;
        return u;
    }
};

Stepper::Stepper(const ProblemSpec& spec, const TemporalMesh& tmesh, const SpatialMesh& smesh,
                 SolveOptions opts)
    : impl_(std::make_unique<Impl>())
{
    Impl& s = *impl_;
    s.spec = spec;
    s.opts = opts;
    s.rec = init_history(spec, tmesh, smesh);
    s.N = tmesh.N();
    s.m = s.rec.m;
    s.last = tmesh.last_level();
    s.mass = assemble_mass(smesh);
    s.stiff = assemble_stiffness(smesh);
    (void)assemble_B(spec.p, spec.a, s.mass, s.stiff);
    s.F = load_vector(spec.source_profile, smesh);

    if (const auto* sf = std::get_if<SampledF>(&spec.source)) {
        s.sampled = true;
        s.fs.resize(static_cast<std::size_t>(s.last));
        for (int k = 1; k <= s.last; ++k)
            s.fs[static_cast<std::size_t>(k - 1)] = sf->f(tmesh.t(k));
    } else {
        s.G = closed_source(spec);
    }

    switch (opts.weights) {
    case WeightPath::Auto: s.uniform_path = tmesh.uniform(); break;
    case WeightPath::Uniform:
        if (!tmesh.uniform())
            throw ValidationError("uniform weight path requested on a graded mesh");
        s.uniform_path = true;
        break;
    case WeightPath::Graded: s.uniform_path = false; break;
    }
    if (s.uniform_path) {
        s.rho = tmesh.tau() / (2.0 * s.N);
        s.ucache = uniform_weights(spec.alpha, s.rho, s.last);
    }

    s.D.assign(static_cast<std::size_t>(s.last) * static_cast<std::size_t>(s.m), 0.0);
    s.r.resize(static_cast<std::size_t>(s.m));
    s.rhs.resize(static_cast<std::size_t>(s.m));
}

Stepper::~Stepper() = default;

bool Stepper::done() const { return impl_->next > impl_->last; }
int Stepper::next_level() const { return impl_->next; }
std::span<const double> Stepper::advance() { return impl_->advance(); }
const SolveRecord& Stepper::record() const { return impl_->rec; }
SolveRecord Stepper::take() { return std::move(impl_->rec); }

SolveRecord solve(const ProblemSpec& spec, const TemporalMesh& tmesh, const SpatialMesh& smesh,
                  SolveOptions opts)
{
    Stepper s(spec, tmesh, smesh, opts);
    while (!s.done())
        s.advance();
    return s.take();
}

} // namespace subdiff
