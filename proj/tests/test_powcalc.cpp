#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "subdiff/errors.hpp"
#include "subdiff/powcalc.hpp"

using namespace subdiff;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

CumulativeSolution case1(double alpha)
{
    CumulativeSolution T;
    T.history = {{1.0, -1.0, 1.0}};
    T.windows = {PowerExpansion{{1.0, 0.0, alpha}}, PowerExpansion{{1.0, 1.0, alpha + 1.0}},
                 PowerExpansion{{1.0, 2.0, alpha + 2.0}}};
    return T;
}

// (1/Gamma(g)) int_0^t (t-s)^{g-1} v(s) ds, split at the breakpoints below t
template <class F>
double rl_integral_oracle(double g, double t, F v)
{
    boost::math::quadrature::tanh_sinh<double> integ;
    double total = 0.0, a = 0.0;
    for (double b : {1.0, 2.0, t}) {
        if (b <= a || b > t)
            continue;
        total += integ.integrate(
            [&](double x, double xc) {
                const double d = (b == t && xc > 0.0) ? xc : t - x;
                return std::pow(d, g - 1.0) * v(x);
            },
            a, b);
        a = b;
    }
    return total / std::tgamma(g);
}

} // namespace

TEST_CASE("power term semantics")
{
    CHECK(eval_expansion(PowerExpansion{{1.0, 0.0, 0.0}}, 0.3) == 1.0);
    CHECK(eval_expansion(PowerExpansion{{1.0, 0.0, 0.0}, {1.0, 0.0, 1.0}, {1.0, 0.0, 0.5}}, 1.0) == Approx(3.0));
    CHECK(eval_expansion(PowerExpansion{{1.0, 1.0, 1.5}}, 0.5) == 0.0);
    CHECK(PowerTerm{2.0, 1.0, 0.0}.value(1.0) == 2.0);
    CHECK(PowerTerm{2.0, 1.0, 0.7}.value(1.0) == 0.0);
    CHECK_THROWS_AS(PowerTerm({2.0, 1.0, -0.3}).value(1.0), ValidationError);
}

TEST_CASE("Caputo derivative of powers")
{
    const PowerExpansion d = caputo_of_power(0.5, PowerExpansion{{1.0, 0.0, 1.0}});
    REQUIRE(d.terms.size() == 1);
    CHECK(d.terms[0].c == Approx(1.12838).epsilon(1e-5));
    CHECK(d.terms[0].beta == Approx(0.5));
    CHECK(caputo_of_power(0.3, PowerExpansion{{5.0, 0.0, 0.0}}).empty());
    const PowerExpansion e = caputo_of_power(0.5, PowerExpansion{{1.0, 1.0, 1.5}});
    CHECK(e.terms[0].c == Approx(1.32934).epsilon(1e-5));
    CHECK(e.terms[0].beta == Approx(1.0));
    CHECK(e.terms[0].s == 1.0);
    CHECK_THROWS_AS(caputo_of_power(0.5, PowerExpansion{{1.0, -1.0, 1.0}}), ValidationError);
}

TEST_CASE("Riemann-Liouville integral of powers")
{
    const PowerExpansion g = rlint_of_power(0.5, PowerExpansion{{1.0, 0.0, 2.0}});
    CHECK(g.terms[0].c == Approx(0.60180).epsilon(1e-5));
    CHECK(g.terms[0].beta == Approx(2.5));
    for (double a : {0.2, 0.7, 1.3}) {
        const PowerExpansion one = rlint_of_power(a, PowerExpansion{{1.0, 0.0, 0.0}});
        CHECK(one.terms[0].c == Approx(1.0 / std::tgamma(1.0 + a)).epsilon(1e-13));
    }
    const PowerExpansion h = rlint_of_power(0.5, PowerExpansion{{1.0, 1.0, 0.0}});
    CHECK(h.terms[0].c == Approx(1.0 / std::tgamma(1.5)).epsilon(1e-13));
    CHECK(h.terms[0].s == 1.0);
    CHECK_THROWS_AS(rlint_of_power(0.5, PowerExpansion{{1.0, -0.5, 1.0}}), ValidationError);
}

TEST_CASE("semigroup and inversion identities")
{
    const PowerExpansion e{{1.3, 0.0, 0.4}, {-2.0, 0.5, 1.7}, {0.25, 1.0, 3.0}};
    const PowerExpansion ab = rlint_of_power(0.3, rlint_of_power(0.45, e));
    const PowerExpansion c = rlint_of_power(0.75, e);
    for (std::size_t i = 0; i < e.terms.size(); ++i) {
        CHECK(ab.terms[i].c == Approx(c.terms[i].c).epsilon(1e-12));
        CHECK(ab.terms[i].beta == Approx(c.terms[i].beta).epsilon(1e-14));
    }
    const PowerExpansion back = rlint_of_power(0.4, caputo_of_power(0.4, PowerExpansion{{1.3, 0.0, 0.9}, {2.0, 1.0, 2.5}}));
    CHECK(back.terms[0].c == Approx(1.3).epsilon(1e-12));
    CHECK(back.terms[0].beta == Approx(0.9).epsilon(1e-14));
    CHECK(back.terms[1].c == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("closed forms agree with adaptive quadrature at random times")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.05, 3.0);
    const PowerExpansion e{{1.0, 0.0, 0.6}, {0.5, 1.0, 1.4}, {-0.3, 2.0, 2.0}};
    const PowerExpansion I = rlint_of_power(0.35, e);
    const PowerExpansion D = caputo_of_power(0.35, e);
    const PowerExpansion de = derivative_of_power(e);
    for (int i = 0; i < 20; ++i) {
        const double t = U(rng);
        CHECK(I(t) == Approx(rl_integral_oracle(0.35, t, [&](double s) { return e(s); })).margin(1e-8));
        CHECK(D(t) == Approx(rl_integral_oracle(0.65, t, [&](double s) { return de(s); })).margin(1e-8));
    }
}

TEST_CASE("rebasing and cumulative solutions")
{
    const PowerExpansion r = rebase(PowerExpansion{{2.0, -1.0, 2.0}});
    for (double t : {0.0, 0.4, 2.5})
        CHECK(r(t) == Approx(2.0 * (t + 1.0) * (t + 1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(rebase(PowerExpansion{{1.0, -1.0, 0.5}}), ValidationError);

    const double alpha = 0.4;
    const CumulativeSolution T = case1(alpha);
    const PowerExpansion pos = T.on_positive();
    for (double t : {0.1, 1.0, 1.7, 2.9})
        CHECK(pos(t) == Approx(T(t)).epsilon(1e-14));

    const PowerExpansion d = T.delayed();
    bool has_t = false;
    for (const auto& term : d.terms)
        if (term.s == 0.0 && term.beta == 1.0 && term.c == 1.0)
            has_t = true;
    CHECK(has_t);
    for (double t : {0.2, 1.0, 1.5, 2.5, 3.0}) {
        const double expect = t + (t > 1.0 ? std::pow(t - 1.0, alpha) : 0.0) + (t > 2.0 ? std::pow(t - 2.0, alpha + 1.0) : 0.0);
        CHECK(d(t) == Approx(expect).epsilon(1e-14));
    }

    const PowerExpansion windows[] = {PowerExpansion{}, PowerExpansion{{1.0, 1.0, 0.8}}};
    const PowerExpansion one = delayed_history_expansion(windows, PowerExpansion{{1.0, -1.0, 0.0}}, 1.0);
    CHECK(one(0.5) == 1.0);
    bool shifted = false;
    for (const auto& term : one.terms)
        if (term.s == 2.0 && term.beta == 0.8)
            shifted = true;
    CHECK(shifted);

    CumulativeSolution bad = T;
    bad.windows[0].terms.push_back({1.0, 1.5, 1.0});
    CHECK_THROWS_AS(bad.delayed(), ValidationError);
}

TEST_CASE("manufactured sources")
{
    CumulativeSolution one;
    one.history = {{1.0, -1.0, 0.0}};
    const PowerExpansion g0 = manufacture_G(0.5, 0.3, -1.0, 0.0, 2.0, one);
    CHECK(g0(0.7) == Approx(0.3 * 2.0 + 1.0).epsilon(1e-14));

    const double alpha = 0.5, p = 1.0 / (pi * pi), a = -2.0, b = 1.0, lambda = pi * pi;
    const CumulativeSolution T = case1(alpha);
    const PowerExpansion G = manufacture_G(alpha, p, a, b, lambda, T);
    const PowerExpansion f = manufacture_f(alpha, p, a, b, lambda, T);
    const PowerExpansion If = rlint_of_power(1.0 - alpha, f);
    for (double t : {0.05, 0.5, 1.0, 1.3, 2.2, 3.0})
        CHECK(If(t) == Approx(G(t)).epsilon(1e-12));

    auto Tp = [&](double s) {
        return 1.0 + alpha * std::pow(s, alpha - 1.0) + (s > 1.0 ? (alpha + 1.0) * std::pow(s - 1.0, alpha) : 0.0)
               + (s > 2.0 ? (alpha + 2.0) * std::pow(s - 2.0, alpha + 1.0) : 0.0);
    };
    auto Td = [&](double s) {
        return s <= 1.0 ? s : 1.0 + (s - 1.0) + std::pow(s - 1.0, alpha) + (s > 2.0 ? std::pow(s - 2.0, alpha + 1.0) : 0.0);
    };
    auto oracle = [&](double t) {
        return rl_integral_oracle(1.0 - alpha, t, Tp) + (p * lambda - a) * T(t) - b * rl_integral_oracle(1.0 - alpha, t, Td);
    };
    CHECK(G(0.5) == Approx(oracle(0.5)).margin(1e-8));
}

TEST_CASE("reciprocal gamma")
{
    CHECK(inv_gamma(0.0) == 0.0);
    CHECK(inv_gamma(-2.0) == 0.0);
    CHECK(inv_gamma(0.5) == Approx(1.0 / std::sqrt(pi)).epsilon(1e-14));
    CHECK(inv_gamma(-0.5) == Approx(1.0 / std::tgamma(-0.5)).epsilon(1e-14));
    CHECK(gamma_fn(5.0) == Approx(24.0).epsilon(1e-13));
}
