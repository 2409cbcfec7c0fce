#include <doctest.h>

#include "nibsym/context.hpp"
#include "support/random_expr.hpp"

using namespace nibsym;

namespace {

Context nib_context() {
    Context ctx;
    ctx.declare_symbols({"t", "x", "u", "u_t", "u_x", "u_tt", "u_tx", "u_xx"});
    ctx.declare_function("f", {"x", "u"});
    ctx.declare_function("g", {"x", "u"});
    return ctx;
}

}  // namespace

TEST_CASE("parses the NIB equation") {
    Context ctx = nib_context();
    Expr e = ctx.parse("u_t + g(x,u)*u_x - f(x,u)");
    CHECK(e.terms().size() == 3);
    Expr back = ctx.parse(render(e));
    CHECK(back == e);
}

TEST_CASE("zero literal") {
    Context ctx = nib_context();
    CHECK(ctx.parse("0").is_zero());
    CHECK(render(zero()) == "0");
}

TEST_CASE("precedence and associativity") {
    Context ctx = nib_context();
    CHECK(ctx.parse("2^3^2") == num(512));
    CHECK(ctx.parse("-x^2") == neg(pow_rat(sym("x"), rat(2))));
    CHECK(ctx.parse("2*x + 3*x") == mul_rat(Rational(5), sym("x")));
    CHECK(ctx.parse("1/2*x") == mul_rat(rat(1, 2), sym("x")));
    CHECK(ctx.parse("x - - x") == mul_rat(Rational(2), sym("x")));
    CHECK(ctx.parse("x^(-2)") == pow_rat(sym("x"), rat(-2)));
}

TEST_CASE("derivative suffixes resolve through the registry") {
    Context ctx = nib_context();
    Expr gx = ctx.parse("g_x(x,u)");
    CHECK(gx == diff(ctx.parse("g(x,u)"), "x"));
    CHECK(ctx.parse("g_xu(x,u)") == ctx.parse("g_ux(x,u)"));
    // bare reference applies the declared parameters
    CHECK(ctx.parse("g_x") == gx);
}

TEST_CASE("builtins") {
    Context ctx = nib_context();
    CHECK(ctx.parse("exp(0)") == one());
    CHECK(ctx.parse("ln(1)").is_zero());
    CHECK(ctx.parse("exp(u)*exp(-u)") == one());
    CHECK(ctx.parse("x^(1/2)*x^(1/2)") == sym("x"));
    Expr lw = ctx.parse("lambertw(x)");
    CHECK(lw == lambertw_of(sym("x")));
}

TEST_CASE("errors carry positions and kinds") {
    Context ctx = nib_context();
    CHECK_THROWS_AS(ctx.parse("u_t + "), ParseError);
    CHECK_THROWS_AS(ctx.parse("nosuch(x)"), ParseError);
    CHECK_THROWS(ctx.parse("g(x)"));  // arity mismatch
    CHECK_THROWS_AS(ctx.parse("g_q(x,u)"), ParseError);
    try {
        ctx.parse("x + %");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.position == 4);
    }
}

TEST_CASE("random round trip: parse(render(e)) == e for 1000 expressions") {
    testing::RandomExprGen gen(0xc0ffee);
    Context ctx = testing::round_trip_context();
    int done = 0;
    int failures = 0;
    while (done < 1000) {
        Expr e = gen.gen_nonzero(3);
        std::string text = render(e);
        Expr back = ctx.parse(text);
        if (back != e) {
            ++failures;
            MESSAGE("failed round trip: ", text);
        }
        ++done;
    }
    CHECK(failures == 0);
}
