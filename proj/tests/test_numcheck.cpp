#include <doctest.h>

#include "nibsym/detsys.hpp"
#include "nibsym/numcheck.hpp"

#include <cmath>

using namespace nibsym;

TEST_CASE("eval basics") {
    Binding b;
    b.set("u", 3.0);
    CHECK(b.eval(mul_rat(Rational(2), sym("u"))) == doctest::Approx(6.0));
    CHECK_THROWS_AS(b.eval(sym("zz")), EvalError);
}

TEST_CASE("eval is compositional on quotients") {
    Rng rng(7);
    auto f = EquationSpec::generic_f_atom();
    auto g = EquationSpec::generic_g_atom();
    Binding b;
    b.instantiate_opaque(f, rng);
    b.instantiate_opaque(g, rng);
    for (int i = 0; i < 20; ++i) {
        b.set("x", rng.uniform(0.3, 1.8));
        b.set("u", rng.uniform(0.3, 1.8));
        double lhs, fa, ga;
        try {
            lhs = b.eval(div(f, g));
            fa = b.eval(f);
            ga = b.eval(g);
        } catch (const EvalError&) {
            continue;
        }
        CHECK(lhs == doctest::Approx(fa / ga).epsilon(1e-12));
    }
}

TEST_CASE("lambertw satisfies its defining identity") {
    for (double x : {0.5, 1.0, 2.0}) {
        double w = lambertw(x);
        CHECK(std::fabs(w * std::exp(w) - x) < 1e-12);
    }
    CHECK(std::fabs(lambertw(0.0)) < 1e-15);
    CHECK_THROWS_AS(lambertw(-1.0), EvalError);
}

TEST_CASE("fd_check on simple expressions") {
    Binding b;
    b.set("u", 3.0);
    CHECK(fd_check(pow_rat(sym("u"), rat(2)), "u", b) < 1e-8);
}

TEST_CASE("on-shell samples satisfy the equation and are deterministic") {
    EquationSpec spec = EquationSpec::generic();
    auto samples = sample_onshell(OnshellSpec{spec.f, spec.g}, 50, 123);
    CHECK(samples.size() == 50);
    Expr residual = spec.lhs();
    for (Binding& b : samples) CHECK(std::fabs(b.eval(residual)) < 1e-12);
    auto again = sample_onshell(OnshellSpec{spec.f, spec.g}, 50, 123);
    for (size_t i = 0; i < samples.size(); ++i) {
        for (const char* s : {"t", "x", "u", "u_x", "u_t"})
            CHECK(samples[i].get(s) == again[i].get(s));  // bit identical
    }
}

TEST_CASE("quadrature integrates smooth functions") {
    double v = integrate([](double s) { return std::exp(s); }, 0.0, 1.0);
    CHECK(std::fabs(v - (std::exp(1.0) - 1.0)) < 1e-9);
    double w = integrate([](double s) { return s * s; }, 0.0, 2.0);
    CHECK(std::fabs(w - 8.0 / 3.0) < 1e-9);
}
