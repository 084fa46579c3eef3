#include "subdiff/powcalc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "subdiff/errors.hpp"

namespace subdiff {

namespace {

bool is_nonneg_integer(double x)
{
    return x >= 0.0 && std::floor(x) == x;
}

double binomial(int n, int k)
{
    double c = 1.0;
    for (int i = 1; i <= k; ++i)
        c = c * (n - k + i) / i;
    return c;
}

void require_nonneg_shifts(const PowerExpansion& e, const char* what)
{
    for (const auto& term : e.terms)
        if (term.s < 0.0)
            throw ValidationError(std::string(what) + ": negative shift " + std::to_string(term.s)
                                  + " (rebase the expansion first)");
}

} // namespace

double PowerTerm::value(double t) const
{
    if (t > s)
        return beta == 0.0 ? c : c * std::pow(t - s, beta);
    if (t < s)
        return 0.0;
    if (beta == 0.0)
        return c;
    if (beta > 0.0)
        return 0.0;
    throw ValidationError("singular power term evaluated at its shift s = " + std::to_string(s));
}

double PowerExpansion::operator()(double t) const
{
    double sum = 0.0;
    for (const auto& term : terms)
        sum += term.value(t);
    return sum;
}

double eval_expansion(const PowerExpansion& e, double t)
{
    return e(t);
}

double inv_gamma(double x)
{
    if (x <= 0.0 && std::floor(x) == x)
        return 0.0;
    if (x > 0.0)
        return std::exp(-std::lgamma(x));
    return 1.0 / std::tgamma(x);
}

double gamma_fn(double x)
{
    if (x <= 0.0 && std::floor(x) == x)
        throw ValidationError("Gamma pole at " + std::to_string(x));
    if (x > 0.0)
        return std::exp(std::lgamma(x));
    return std::tgamma(x);
}

PowerExpansion operator+(const PowerExpansion& lhs, const PowerExpansion& rhs)
{
    PowerExpansion out = lhs;
    out.terms.insert(out.terms.end(), rhs.terms.begin(), rhs.terms.end());
    return out;
}

PowerExpansion operator*(double k, const PowerExpansion& e)
{
    PowerExpansion out = e;
    for (auto& term : out.terms)
        term.c *= k;
    return out;
}

PowerExpansion simplify(const PowerExpansion& e)
{
    std::map<std::pair<double, double>, double> merged;
    for (const auto& term : e.terms)
        merged[{term.s, term.beta}] += term.c;
    PowerExpansion out;
    for (const auto& [key, c] : merged)
        if (c != 0.0)
            out.terms.push_back({c, key.first, key.second});
    return out;
}

PowerExpansion shift_by(const PowerExpansion& e, double ds)
{
    PowerExpansion out = e;
    for (auto& term : out.terms)
        term.s += ds;
    return out;
}

PowerExpansion rebase(const PowerExpansion& e, double s0)
{
    PowerExpansion out;
    for (const auto& term : e.terms) {
        if (term.s >= s0) {
            out.terms.push_back(term);
            continue;
        }
        if (!is_nonneg_integer(term.beta))
            throw ValidationError("cannot rebase term with non-integer exponent "
                                  + std::to_string(term.beta));
        const int n = static_cast<int>(term.beta);
        const double d = s0 - term.s;
        // (t - s)^n = sum_j C(n,j) d^{n-j} (t - s0)^j
        for (int j = 0; j <= n; ++j)
            out.terms.push_back({term.c * binomial(n, j) * std::pow(d, n - j), s0,
                                 static_cast<double>(j)});
    }
    return simplify(out);
}

PowerExpansion caputo_of_power(double alpha, const PowerExpansion& e)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("caputo_of_power: alpha must lie in (0,1)");
    require_nonneg_shifts(e, "caputo_of_power");
    PowerExpansion out;
    for (const auto& term : e.terms) {
        if (term.beta == 0.0) {
            if (term.s > 0.0)
                throw ValidationError("caputo_of_power: jump term at s > 0 has no classical derivative");
            continue;
        }
        if (term.beta < 0.0)
            throw ValidationError("caputo_of_power: negative exponent");
        const double k = std::exp(std::lgamma(term.beta + 1.0)) * inv_gamma(term.beta + 1.0 - alpha);
        out.terms.push_back({term.c * k, term.s, term.beta - alpha});
    }
    return out;
}

PowerExpansion rlint_of_power(double alpha, const PowerExpansion& e)
{
    if (!(alpha > 0.0))
        throw ValidationError("rlint_of_power: alpha must be positive");
    require_nonneg_shifts(e, "rlint_of_power");
    PowerExpansion out;
    for (const auto& term : e.terms) {
        if (!(term.beta > -1.0))
            throw ValidationError("rlint_of_power: exponent must exceed -1");
        const double k = std::exp(std::lgamma(term.beta + 1.0) - std::lgamma(term.beta + 1.0 + alpha));
        out.terms.push_back({term.c * k, term.s, term.beta + alpha});
    }
    return out;
}

PowerExpansion rl_derivative_of_power(double gamma, const PowerExpansion& e)
{
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw ValidationError("rl_derivative_of_power: order must lie in (0,1]");
    require_nonneg_shifts(e, "rl_derivative_of_power");
    PowerExpansion out;
    for (const auto& term : e.terms) {
        if (!(term.beta > -1.0))
            throw ValidationError("rl_derivative_of_power: exponent must exceed -1");
        const double k = std::exp(std::lgamma(term.beta + 1.0)) * inv_gamma(term.beta + 1.0 - gamma);
        if (k != 0.0)
            out.terms.push_back({term.c * k, term.s, term.beta - gamma});
    }
    return out;
}

PowerExpansion derivative_of_power(const PowerExpansion& e)
{
    PowerExpansion out;
    for (const auto& term : e.terms)
        if (term.beta != 0.0)
            out.terms.push_back({term.c * term.beta, term.s, term.beta - 1.0});
    return out;
}

void CumulativeSolution::validate() const
{
    if (!(tau > 0.0))
        throw ValidationError("cumulative solution: tau must be positive");
    for (const auto& term : history.terms)
        if (term.s > -tau)
            throw ValidationError("cumulative solution: history terms must be switched on at s <= -tau");
    for (std::size_t w = 0; w < windows.size(); ++w)
        for (const auto& term : windows[w].terms)
            if (term.s < w * tau || term.s >= (w + 1) * tau)
                throw ValidationError("cumulative solution: window " + std::to_string(w + 1)
                                      + " term switched on outside its window");
}

double CumulativeSolution::operator()(double t) const
{
    double v = history(t);
    for (const auto& w : windows)
        v += w(t);
    return v;
}

PowerExpansion CumulativeSolution::on_positive() const
{
    validate();
    PowerExpansion out = rebase(history, 0.0);
    for (const auto& w : windows)
        out = out + w;
    return simplify(out);
}

PowerExpansion CumulativeSolution::delayed() const
{
    validate();
    PowerExpansion out = rebase(shift_by(history, tau), 0.0);
    for (const auto& w : windows)
        out = out + shift_by(w, tau);
    return simplify(out);
}

PowerExpansion delayed_history_expansion(std::span<const PowerExpansion> windows,
                                         const PowerExpansion& phi_temporal, double tau)
{
    CumulativeSolution T;
    T.history = phi_temporal;
    T.windows.assign(windows.begin(), windows.end());
    T.tau = tau;
    return T.delayed();
}

PowerExpansion manufacture_G(double alpha, double p, double a, double b, double lambda,
                             const CumulativeSolution& T)
{
    const PowerExpansion pos = T.on_positive();
    PowerExpansion g = caputo_of_power(alpha, pos) + (p * lambda - a) * pos;
    g = g + (-b) * rlint_of_power(1.0 - alpha, T.delayed());
    return simplify(g);
}

PowerExpansion manufacture_f(double alpha, double p, double a, double b, double lambda,
                             const CumulativeSolution& T)
{
    const PowerExpansion pos = T.on_positive();
    PowerExpansion f = derivative_of_power(pos) + (p * lambda - a) * rl_derivative_of_power(1.0 - alpha, pos);
    f = f + (-b) * T.delayed();
    return simplify(f);
}

} // namespace subdiff
