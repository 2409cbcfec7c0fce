#include <doctest.h>

#include "nibsym/equiv.hpp"

using namespace nibsym;

namespace {

Context equiv_ctx() {
    Context ctx = Chart::equivalence()->base_context();
    ctx.declare_function("xi", {"t", "x", "u"});
    ctx.declare_function("tau", {"t", "x", "u"});
    ctx.declare_function("phi", {"t", "x", "u"});
    ctx.declare_function("chi", {"t", "x", "u", "f", "g"});
    ctx.declare_function("eta", {"t", "x", "u", "f", "g"});
    return ctx;
}

}  // namespace

TEST_CASE("extended prolongation components") {
    Context ctx = equiv_ctx();
    SUBCASE("generic field") {
        EquivProlongation p = equiv_prolong(generic_equiv_field());
        Expr expect_chi = ctx.parse("chi_t - f_x*tau_t - f_u*phi_t");
        CHECK(is_zero_cleared(sub(p.chi_t, expect_chi)));
        Expr expect_eta = ctx.parse("eta_t - g_x*tau_t - g_u*phi_t");
        CHECK(is_zero_cleared(sub(p.eta_t, expect_eta)));
    }
    SUBCASE("t-independent coefficients give zero extended components") {
        VectorField v{Chart::equivalence(), {}};
        v.coeffs["x"] = ctx.parse("x*u");
        v.coeffs["u"] = ctx.parse("u^2");
        v.coeffs["f"] = ctx.parse("f*g + x");
        v.coeffs["g"] = ctx.parse("g^2*u");
        EquivProlongation p = equiv_prolong(EquivField{v});
        CHECK(p.chi_t.is_zero());
        CHECK(p.eta_t.is_zero());
    }
    SUBCASE("pure time translation prolongs to zero") {
        VectorField v{Chart::equivalence(), {}};
        v.coeffs["t"] = one();
        EquivProlongation p = equiv_prolong(EquivField{v});
        CHECK(p.phi_t.is_zero());
        CHECK(p.phi_x.is_zero());
        CHECK(p.chi_t.is_zero());
        CHECK(p.eta_t.is_zero());
    }
    SUBCASE("role violation is rejected") {
        VectorField v{Chart::equivalence(), {}};
        v.coeffs["u"] = sym("f");
        CHECK_THROWS_AS(equiv_prolong(EquivField{v}), ChartMismatch);
    }
}

TEST_CASE("equivalence determining system for the generic field") {
    Context ctx = equiv_ctx();
    EquivConditions cond = equiv_conditions(generic_equiv_field());
    // the t-derivative split reproduces tau_t = phi_t = chi_t = eta_t = 0
    std::vector<Expr> expect = {ctx.parse("tau_t"), ctx.parse("phi_t"), ctx.parse("chi_t"), ctx.parse("eta_t")};
    CHECK(cond.t_split.size() == expect.size());
    for (const Expr& e : expect) {
        bool found = false;
        for (const Expr& g : cond.t_split)
            if (is_zero_cleared(sub(g, e)) || is_zero_cleared(add(g, e))) found = true;
        CHECK_MESSAGE(found, "missing t-condition ", render(e));
    }
    // the equation split gives the printed u_x coefficient and constant part
    Expr eq18 = ctx.parse("f*g*xi_u + g*xi_t - f*tau_u - g*tau_x + g^2*xi_x + eta");
    Expr eq19 = ctx.parse("-chi + f*phi_u - f*xi_t - f^2*xi_u + g*phi_x - f*g*xi_x");
    CHECK(is_zero_cleared(sub(cond.ux_coefficient, eq18)));
    CHECK(is_zero_cleared(sub(cond.constant_part, eq19)));
}

TEST_CASE("the general solution satisfies the conditions exactly") {
    // The closed chi/eta forms solve the equation conditions identically for
    // any xi(t,x,u). The f_t/g_t conditions additionally force xi_t to be
    // constant (chi_t = 0), so the true generic coefficient is c*t + b(x,u);
    // the displayed solution with unrestricted xi(t,x,u) fails that part.
    Context ctx;
    ctx.declare_symbols({"t", "x", "u", "f", "g", "c"});
    ctx.declare_function("xi", {"t", "x", "u"});
    ctx.declare_function("b", {"x", "u"});
    ctx.declare_function("tau", {"x", "u"});
    ctx.declare_function("phi", {"x", "u"});
    auto solution_field = [&](const std::string& xi_text) {
        Context c2 = ctx;
        VectorField v{Chart::equivalence(), {}};
        Expr xi = c2.parse(xi_text);
        Expr xi_t = diff(xi, "t"), xi_x = diff(xi, "x"), xi_u = diff(xi, "u");
        v.coeffs["t"] = xi;
        v.coeffs["x"] = c2.parse("tau(x,u)");
        v.coeffs["u"] = c2.parse("phi(x,u)");
        Expr f = sym("f"), g = sym("g");
        v.coeffs["f"] = add({mul(g, c2.parse("phi_x")), neg(mul({f, g, xi_x})), neg(mul(f, xi_t)),
                             mul(f, c2.parse("phi_u")), neg(mul(pow_rat(f, rat(2)), xi_u))});
        v.coeffs["g"] = add({mul(f, c2.parse("tau_u")), mul(g, c2.parse("tau_x")), neg(mul(g, xi_t)),
                             neg(mul(pow_rat(g, rat(2)), xi_x)), neg(mul({f, g, xi_u}))});
        return EquivField{v};
    };
    SUBCASE("xi = c*t + b(x,u) passes every condition") {
        EquivConditions cond = equiv_conditions(solution_field("c*t + b(x,u)"));
        CHECK(cond.all_zero());
    }
    SUBCASE("unrestricted xi(t,x,u) solves the equation conditions only") {
        EquivConditions cond = equiv_conditions(solution_field("xi(t,x,u)"));
        CHECK(is_zero_cleared(cond.ux_coefficient));
        CHECK(is_zero_cleared(cond.constant_part));
        CHECK_FALSE(cond.all_zero());  // chi_t = 0 fails for t-nonlinear xi
    }
}

TEST_CASE("the zero field trivially satisfies the conditions") {
    VectorField v{Chart::equivalence(), {}};
    EquivConditions cond = equiv_conditions(EquivField{v});
    CHECK(cond.all_zero());
}

TEST_CASE("build_Y produces the three families") {
    Context ctx;
    ctx.declare_symbols({"t", "x", "u", "f", "g"});
    ctx.declare_function("tau", {"x", "u"});
    ctx.declare_function("phi", {"x", "u"});
    ctx.declare_function("xi", {"t", "x", "u"});
    SUBCASE("Y2") {
        EquivField y2 = build_Y(2, ctx.parse("tau(x,u)"));
        CHECK(y2.tau() == ctx.parse("tau(x,u)"));
        CHECK(is_zero_cleared(sub(y2.eta(), ctx.parse("g*tau_x + f*tau_u"))));
        CHECK(equiv_conditions(y2).all_zero());
    }
    SUBCASE("Y3") {
        EquivField y3 = build_Y(3, ctx.parse("phi(x,u)"));
        CHECK(is_zero_cleared(sub(y3.chi(), ctx.parse("g*phi_x + f*phi_u"))));
        CHECK(equiv_conditions(y3).all_zero());
    }
    SUBCASE("Y1 with an admissible coefficient (xi_t constant)") {
        Context c3;
        c3.declare_symbols({"t", "x", "u", "f", "g", "c"});
        c3.declare_function("b", {"x", "u"});
        EquivField y1 = build_Y(1, c3.parse("c*t + b(x,u)"));
        CHECK(equiv_conditions(y1).all_zero());
    }
    SUBCASE("Y1 with unrestricted xi(t,x,u) solves the equation part only") {
        EquivField y1 = build_Y(1, ctx.parse("xi(t,x,u)"));
        EquivConditions cond = equiv_conditions(y1);
        CHECK(is_zero_cleared(cond.ux_coefficient));
        CHECK(is_zero_cleared(cond.constant_part));
        CHECK_FALSE(cond.all_zero());
    }
    SUBCASE("bracket of Y1 and Y2 decomposes as -Y1 with coefficient tau*xi_x") {
        EquivField y1 = build_Y(1, ctx.parse("xi(t,x,u)"));
        EquivField y2 = build_Y(2, ctx.parse("tau(x,u)"));
        VectorField lhs = bracket(y1.field, y2.field);
        VectorField rhs = vf_scale(num(-1), build_Y(1, ctx.parse("tau(x,u)*xi_x(t,x,u)")).field);
        for (const std::string& c : lhs.chart->coords())
            CHECK(is_zero_cleared(sub(lhs.coeff(c), rhs.coeff(c))));
    }
}

TEST_CASE("the L10 basis") {
    LieBasis b = l10_basis();
    Context ctx = Chart::equivalence()->base_context();
    REQUIRE(b.size() == 10);
    // X7 = x d_x + g d_g as printed
    CHECK(b.fields[6].coeff("x") == ctx.parse("x"));
    CHECK(b.fields[6].coeff("g") == ctx.parse("g"));
    // every member satisfies the determining system exactly
    for (const VectorField& f : b.fields) CHECK(equiv_conditions(EquivField{f}).all_zero());
    // each is an instance of the Y families
    Context c2;
    c2.declare_symbols({"t", "x", "u", "f", "g"});
    CHECK(vf_equal(b.fields[3], build_Y(1, c2.parse("t")).field));   // X4
    CHECK(vf_equal(b.fields[4], build_Y(1, c2.parse("x")).field));   // X5
    CHECK(vf_equal(b.fields[5], build_Y(1, c2.parse("u")).field));   // X6
    CHECK(vf_equal(b.fields[7], build_Y(2, c2.parse("u")).field));   // X8
    CHECK(vf_equal(b.fields[8], build_Y(3, c2.parse("x")).field));   // X9
    CHECK(vf_equal(b.fields[9], build_Y(3, c2.parse("u")).field));   // X10
    // [X2, X5] = X1
    CHECK(vf_equal(bracket(b.fields[1], b.fields[4]), b.fields[0]));
}

TEST_CASE("projection") {
    LieBasis b = l10_basis();
    SUBCASE("X2 projects to d_x") {
        Projection p = project_xufg(EquivField{b.fields[1]});
        CHECK(p.field.coeff("x") == one());
        CHECK(p.dropped.empty());
    }
    SUBCASE("X1 projects to zero with the d_t coefficient recorded") {
        Projection p = project_xufg(EquivField{b.fields[0]});
        CHECK(p.field.is_zero());
        REQUIRE(p.dropped.count("t") == 1);
        CHECK(p.dropped.at("t") == one());
    }
    SUBCASE("A10 = X4 + X10 projects to u d_u - g d_g") {
        VectorField a10 = vf_add(b.fields[3], b.fields[9]);
        Projection p = project_xufg(EquivField{a10});
        Context ctx = Chart::xufg()->base_context();
        CHECK(p.field.coeff("u") == ctx.parse("u"));
        CHECK(p.field.coeff("g") == ctx.parse("-g"));
        CHECK(p.field.coeff("f").is_zero());  // f d_f cancels between X4 and X10
        CHECK(p.field.coeff("x").is_zero());
    }
    SUBCASE("projection is linear and idempotent on its image") {
        VectorField v = vf_add(b.fields[4], vf_scale(num(3), b.fields[7]));
        Projection p = project_xufg(EquivField{v});
        Projection p1 = project_xufg(EquivField{b.fields[4]});
        Projection p2 = project_xufg(EquivField{b.fields[7]});
        CHECK(vf_equal(p.field, vf_add(p1.field, vf_scale(num(3), p2.field))));
    }
}
