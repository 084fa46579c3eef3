#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "subdiff/fem1d.hpp"
#include "subdiff/fracops.hpp"
#include "subdiff/mesh.hpp"
#include "subdiff/powcalc.hpp"

namespace subdiff {

using SpaceTimeFn = std::function<double(double x, double t)>;
using ScalarFn = std::function<double(double)>;

// Source given as X(x) * temporal factor.
struct ClosedG { PowerExpansion G; };
struct ClosedF { PowerExpansion f; };
struct SampledF { ScalarFn f; };
using TemporalSource = std::variant<ClosedG, ClosedF, SampledF>;

struct SeparableSolution {
    ScalarFn X;
    ScalarFn T;
    double operator()(double x, double t) const { return X(x) * T(t); }
};

//   u_t = D^{1-alpha}(p u_xx + a u) + b u(t - tau) + f  on (0, L) x (0, K tau]
//   u = phi on [-tau, 0],  u = 0 at x = 0, L
struct ProblemSpec {
    double p = 1.0;
    double a = 0.0;
    double b = 1.0;
    double alpha = 0.5;
    double tau = 1.0;
    int K = 1;
    double L = 1.0;
    SpaceTimeFn phi;
    ScalarFn source_profile;
    TemporalSource source = ClosedG{};
    std::optional<SeparableSolution> exact;

    void validate() const;
};

enum class WeightPath { Auto, Uniform, Graded };

struct SolveOptions {
    WeightPath weights = WeightPath::Auto;
    int block = 0; // levels per history block; 0 picks one from the spatial size
    double divergence_limit = 1e10;
};

struct SolveRecord {
    TemporalMesh tmesh;
    SpatialMesh smesh;
    int m = 0;                     // interior nodes per level
    std::vector<double> U;         // levels -2N..2KN, row-major
    std::vector<double> max_norm;  // sup norm per level

    std::span<const double> level(int n) const;
    std::span<double> level(int n);
    int first_level() const { return tmesh.first_level(); }
    int last_level() const { return tmesh.last_level(); }
};

// Levels -2N..0 filled with the interpolated history; later levels zero.
SolveRecord init_history(const ProblemSpec& spec, const TemporalMesh& tmesh,
                         const SpatialMesh& smesh);

// Temporal factor of G at t_n (the value the scheme uses at level n).
double source_value(const ProblemSpec& spec, const TemporalMesh& tmesh, const WeightRow& w);

// One level done the plain way: U^k for k < n must already be in `state`.
NodalVector step(int n, const SolveRecord& state, const ProblemSpec& spec, const WeightRow& w);

// Blocked time stepper. Levels are produced strictly in order.
class Stepper {
public:
    Stepper(const ProblemSpec& spec, const TemporalMesh& tmesh, const SpatialMesh& smesh,
            SolveOptions opts = {});
    ~Stepper();
    Stepper(const Stepper&) = delete;
    Stepper& operator=(const Stepper&) = delete;

    bool done() const;
    int next_level() const;
    std::span<const double> advance();
    const SolveRecord& record() const;
    SolveRecord take();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SolveRecord solve(const ProblemSpec& spec, const TemporalMesh& tmesh, const SpatialMesh& smesh,
                  SolveOptions opts = {});

} // namespace subdiff
