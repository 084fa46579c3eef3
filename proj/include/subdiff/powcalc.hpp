#pragma once

#include <span>
#include <vector>

namespace subdiff {

// c * (t - s)^beta, switched on at t = s.
struct PowerTerm {
    double c = 0.0;
    double s = 0.0;
    double beta = 0.0;

    double value(double t) const;
};

struct PowerExpansion {
    std::vector<PowerTerm> terms;

    PowerExpansion() = default;
    PowerExpansion(std::initializer_list<PowerTerm> list) : terms(list) {}

    double operator()(double t) const;
    bool empty() const { return terms.empty(); }
};

double eval_expansion(const PowerExpansion& e, double t);

// 1/Gamma(x); zero at the poles.
double inv_gamma(double x);
double gamma_fn(double x);

PowerExpansion operator+(const PowerExpansion& lhs, const PowerExpansion& rhs);
PowerExpansion operator*(double k, const PowerExpansion& e);
// Merges terms sharing (s, beta) and drops zero coefficients.
PowerExpansion simplify(const PowerExpansion& e);
// Rewrites c (t - s)^beta as c (t - s - ds)^beta.
PowerExpansion shift_by(const PowerExpansion& e, double ds);
// Moves terms with s < s0 to shift s0 via the binomial theorem (valid for t >= s0).
// Needs non-negative integer exponents on those terms.
PowerExpansion rebase(const PowerExpansion& e, double s0 = 0.0);

// Caputo derivative from 0, term by term.
PowerExpansion caputo_of_power(double alpha, const PowerExpansion& e);
// Riemann-Liouville integral from 0.
PowerExpansion rlint_of_power(double alpha, const PowerExpansion& e);
// Riemann-Liouville derivative from 0, 0 < gamma <= 1.
PowerExpansion rl_derivative_of_power(double gamma, const PowerExpansion& e);
PowerExpansion derivative_of_power(const PowerExpansion& e);

// Temporal profile in cumulative form. `history` describes T on [-tau, 0] and
// keeps describing its continuation for t > 0; windows[w] adds terms switched on
// inside [w tau, (w+1) tau).
struct CumulativeSolution {
    PowerExpansion history;
    std::vector<PowerExpansion> windows;
    double tau = 1.0;

    void validate() const;
    double operator()(double t) const;
    // T on (0, K tau] with every shift >= 0.
    PowerExpansion on_positive() const;
    // T(t - tau) on (0, K tau] with every shift >= 0.
    PowerExpansion delayed() const;
};

PowerExpansion delayed_history_expansion(std::span<const PowerExpansion> windows,
                                         const PowerExpansion& phi_temporal, double tau);

// Temporal factor of G = I^{1-alpha} f for u = X(x) T(t), -X'' = lambda X:
//   D^alpha T + (p lambda - a) T - b I^{1-alpha} T(t - tau).
PowerExpansion manufacture_G(double alpha, double p, double a, double b, double lambda,
                             const CumulativeSolution& T);
// Temporal factor of f itself: T' + (p lambda - a) D_RL^{1-alpha} T - b T(t - tau).
PowerExpansion manufacture_f(double alpha, double p, double a, double b, double lambda,
                             const CumulativeSolution& T);

} // namespace subdiff
