#include "nibsym/equiv.hpp"

#include <algorithm>

namespace nibsym {

namespace {

FunctionSpecPtr make_spec(const std::string& name, std::vector<std::string> params) {
    auto s = std::make_shared<FunctionSpec>();
    s->name = name;
    s->params = std::move(params);
    return s;
}

Expr app(const FunctionSpecPtr& s) {
    std::vector<Expr> args;
    for (const std::string& p : s->params) args.push_back(sym(p));
    return func_app(s, {}, args);
}

void drop_zero(std::map<std::string, Expr>& coeffs) {
    for (auto it = coeffs.begin(); it != coeffs.end();)
        it = it->second.is_zero() ? coeffs.erase(it) : std::next(it);
}

}  // namespace

void EquivField::check_roles() const {
    if (field.chart != Chart::equivalence()) throw ChartMismatch("equivalence field on wrong chart");
    for (const char* role : {"t", "x", "u"}) {
        Expr e = field.coeff(role);
        if (contains_symbol(e, "f") || contains_symbol(e, "g"))
            throw ChartMismatch(std::string("coefficient of d_") + role + " may depend on (t,x,u) only");
    }
    for (const auto& [c, e] : field.coeffs)
        for (const std::string& s : free_symbols(e))
            if (field.chart->is_jet(s)) throw ChartMismatch("equivalence field coefficient contains jet " + s);
}

EquivProlongation equiv_prolong(const EquivField& Y) {
    Y.check_roles();
    Expr xi = Y.xi(), tau = Y.tau(), phi = Y.phi(), chi = Y.chi(), eta = Y.eta();
    EquivProlongation p;
    p.base = Y;
    // point part, exactly as on the point chart
    Expr Q = sub(phi, add(mul(xi, sym("u_t")), mul(tau, sym("u_x"))));
    p.phi_t = add(total_derivative(Q, "t"), add(mul(xi, sym("u_tt")), mul(tau, sym("u_tx"))));
    p.phi_x = add(total_derivative(Q, "x"), add(mul(xi, sym("u_tx")), mul(tau, sym("u_xx"))));
    // extended part with D~_t = d_t (f_t = g_t = 0 imposed)
    p.chi_t = sub(diff(chi, "t"), add(mul(sym("f_x"), diff(tau, "t")), mul(sym("f_u"), diff(phi, "t"))));
    p.eta_t = sub(diff(eta, "t"), add(mul(sym("g_x"), diff(tau, "t")), mul(sym("g_u"), diff(phi, "t"))));
    return p;
}

namespace {

void push_distinct(std::vector<Expr>& out, const Expr& e) {
    if (e.is_zero()) return;
    for (const Expr& seen : out) {
        if (seen == e) return;
        if (seen == neg(e)) return;
    }
    out.push_back(e);
}

}  // namespace

EquivConditions equiv_conditions(const EquivField& Y) {
    EquivProlongation p = equiv_prolong(Y);
    EquivConditions out;

    // Y[f_t] = chi^t and Y[g_t] = eta^t must vanish for every f, g: split by
    // the first-order jets of f and g.
    for (const Expr& e : {p.chi_t, p.eta_t}) {
        for (const char* jet : {"f_x", "f_u", "g_x", "g_u"}) {
            std::map<long, Expr> byj = collect_powers(e, jet);
            for (auto& [k, coeffe] : byj)
                if (k != 0) push_distinct(out.t_split, coeffe);
        }
        // jet-free part
        Expr rest = e;
        for (const char* jet : {"f_x", "f_u", "g_x", "g_u"}) {
            std::map<long, Expr> byj = collect_powers(rest, jet);
            rest = byj.count(0) ? byj[0] : Expr();
        }
        push_distinct(out.t_split, rest);
    }

    // Equation residual: phi^t + eta u_x + g phi^x - chi on-shell, with the
    // t-independence facts substituted first (they are separate members of
    // the system and the split below assumes them).
    Expr r = add(sub(add(p.phi_t, mul(sym("g"), p.phi_x)), Y.chi()), mul(Y.eta(), sym("u_x")));
    r = substitute(r, {{sym("u_t"), sub(sym("f"), mul(sym("g"), sym("u_x")))}});
    SubstMap facts;
    for (const Expr& role : {Y.tau(), Y.phi(), Y.chi(), Y.eta()}) {
        Expr d = diff(role, "t");
        const TermList& ts = d.terms();
        if (ts.size() == 1 && ts[0].coeff == 1 && ts[0].factors.size() == 1 && ts[0].factors[0].exponent == 1)
            facts.push_back({d, zero()});
    }
    r = substitute(r, facts);
    std::map<long, Expr> by_ux = collect_powers(r, "u_x");
    for (auto& [k, e] : by_ux) {
        if (k == 0)
            out.constant_part = e;
        else if (k == 1)
            out.ux_coefficient = e;
        else
            throw Error("equivalence residual has an unexpected u_x power " + std::to_string(k));
    }
    return out;
}

bool EquivConditions::all_zero() const {
    for (const Expr& e : t_split)
        if (!is_zero_cleared(e)) return false;
    return is_zero_cleared(ux_coefficient) && is_zero_cleared(constant_part);
}

EquivField build_Y(int kind, const Expr& coefficient) {
    Expr f = sym("f"), g = sym("g");
    VectorField v{Chart::equivalence(), {}};
    if (kind == 1) {
        Expr xi = coefficient;
        Expr xi_t = diff(xi, "t"), xi_x = diff(xi, "x"), xi_u = diff(xi, "u");
        v.coeffs["t"] = xi;
        v.coeffs["f"] = neg(mul(f, add({mul(g, xi_x), xi_t, mul(f, xi_u)})));
        v.coeffs["g"] = neg(mul(g, add({mul(f, xi_u), xi_t, mul(g, xi_x)})));
    } else if (kind == 2) {
        if (contains_symbol(coefficient, "t")) throw ChartMismatch("Y2 coefficient must be tau(x,u)");
        Expr tau = coefficient;
        v.coeffs["x"] = tau;
        v.coeffs["g"] = add(mul(g, diff(tau, "x")), mul(f, diff(tau, "u")));
    } else if (kind == 3) {
        if (contains_symbol(coefficient, "t")) throw ChartMismatch("Y3 coefficient must be phi(x,u)");
        Expr phi = coefficient;
        v.coeffs["u"] = phi;
        v.coeffs["f"] = add(mul(g, diff(phi, "x")), mul(f, diff(phi, "u")));
    } else {
        throw Error("build_Y kind must be 1, 2 or 3");
    }
    drop_zero(v.coeffs);
    return EquivField{v};
}

LieBasis l10_basis() {
    Expr t = sym("t"), x = sym("x"), u = sym("u"), f = sym("f"), g = sym("g");
    auto mk = [](std::map<std::string, Expr> coeffs) {
        drop_zero(coeffs);
        return VectorField{Chart::equivalence(), std::move(coeffs)};
    };
    LieBasis b;
    b.chart = Chart::equivalence();
    b.names = {"X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8", "X9", "X10"};
    b.fields = {
        mk({{"t", one()}}),
        mk({{"x", one()}}),
        mk({{"u", one()}}),
        mk({{"t", t}, {"f", neg(f)}, {"g", neg(g)}}),
        mk({{"t", x}, {"f", neg(mul(f, g))}, {"g", neg(mul(g, g))}}),
        mk({{"t", u}, {"f", neg(mul(f, f))}, {"g", neg(mul(f, g))}}),
        mk({{"x", x}, {"g", g}}),
        mk({{"x", u}, {"g", f}}),
        mk({{"u", x}, {"f", g}}),
        mk({{"u", u}, {"f", f}}),
    };
    return b;
}

Projection project(const EquivField& v, const std::vector<std::string>& target) {
    ChartPtr chart;
    if (target == std::vector<std::string>{"x", "u", "f", "g"})
        chart = Chart::xufg();
    else if (target == std::vector<std::string>{"t", "x", "u"})
        chart = Chart::point();
    else
        throw ChartMismatch("unsupported projection target");
    Projection p;
    p.field = VectorField{chart, {}};
    for (const auto& [c, e] : v.field.coeffs) {
        if (e.is_zero()) continue;
        if (std::find(target.begin(), target.end(), c) != target.end())
            p.field.coeffs[c] = e;
        else
            p.dropped[c] = e;
    }
    return p;
}

Projection project_xufg(const EquivField& v) { return project(v, {"x", "u", "f", "g"}); }
Projection project_txu(const EquivField& v) { return project(v, {"t", "x", "u"}); }

EquivField generic_equiv_field() {
    static FunctionSpecPtr xi = make_spec("xi", {"t", "x", "u"});
    static FunctionSpecPtr tau = make_spec("tau", {"t", "x", "u"});
    static FunctionSpecPtr phi = make_spec("phi", {"t", "x", "u"});
    static FunctionSpecPtr chi = make_spec("chi", {"t", "x", "u", "f", "g"});
    static FunctionSpecPtr eta = make_spec("eta", {"t", "x", "u", "f", "g"});
    VectorField v{Chart::equivalence(), {}};
    v.coeffs["t"] = app(xi);
    v.coeffs["x"] = app(tau);
    v.coeffs["u"] = app(phi);
    v.coeffs["f"] = app(chi);
    v.coeffs["g"] = app(eta);
    return EquivField{v};
}

}  // namespace nibsym
