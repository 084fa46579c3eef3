#pragma once

#include <span>
#include <vector>

#include "subdiff/mesh.hpp"
#include "subdiff/powcalc.hpp"

namespace subdiff {

// omega_alpha(t) = t^{alpha-1} / Gamma(alpha)
double omega(double alpha, double t);

// L1 / right-rectangle coefficients of one time level n.
//   a[k-1]   = a^{(n)}_{n-k}
//   rho[k-1] = rho_k,  k = 1..n
struct WeightRow {
    int n = 0;
    double alpha = 0.0;
    std::vector<double> a;
    std::vector<double> rho;

    double a0() const { return a.back(); }
};

WeightRow weight_row(const TemporalMesh& mesh, double alpha, int n);
// Raw form used by the stepper: a[k-1] = a^{(n)}_{n-k}; work holds n + 1 doubles.
void fill_weight_row(const TemporalMesh& mesh, double alpha, int n, double* a, double* work);

// a_0 .. a_{count-1} of a uniform mesh with step rho.
std::vector<double> uniform_weights(double alpha, double rho, int count);

// u holds u^0..u^n
double l1_apply(const WeightRow& w, std::span<const double> u);
// v holds v^1..v^n
double fracint_apply(const WeightRow& w, std::span<const double> v);

// values[m] = P_m (uniform) or Pbar^{(n)}_m (graded), m = 0..n-1
struct KernelSeq {
    double alpha = 0.0;
    int n = 0;
    std::vector<double> values;
};

KernelSeq p_sequence_uniform(std::span<const double> a, double alpha);
// rows[i] must be the weight row of level i+1 on one mesh, i = 0..n-1
KernelSeq p_sequence_graded(std::span<const WeightRow> rows);

struct ProbeLevel {
    int N = 0;
    std::vector<double> window_error; // max |error| per delay window
    double monitored = 0.0;           // quantity the order is fitted on
};

struct ProbeReport {
    std::vector<ProbeLevel> levels;
    std::vector<double> orders; // log2 ratio of `monitored` per doubling
    double predicted = 0.0;
};

// L1 on `target` against its exact Caputo derivative over the first window.
// monitored = max_{n <= 2N} t_n^q |error| with q = min(2 - alpha, 1 + alpha).
ProbeReport truncation_probe_l1(double alpha, double r, std::span<const int> ladder,
                                const PowerExpansion& target, double tau = 1.0);

// Right-rectangle rule on `history` (shifts >= 0) against I^{1-alpha} history,
// over all n <= 2KN. monitored = max |error|.
ProbeReport truncation_probe_fracint(double alpha, double r, std::span<const int> ladder,
                                     const PowerExpansion& history, int K = 1,
                                     double tau = 1.0);

} // namespace subdiff
