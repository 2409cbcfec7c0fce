#include "nibsym/chart.hpp"

#include <json.hpp>

#include <algorithm>

namespace nibsym {

std::shared_ptr<const Chart> Chart::point() {
    static std::shared_ptr<const Chart> c = [] {
        auto ch = std::make_shared<Chart>();
        ch->name_ = "point";
        ch->coords_ = {"t", "x", "u"};
        ch->jets_ = {"u_t", "u_x", "u_tt", "u_tx", "u_xx"};
        ch->all_ = ch->coords_;
        ch->all_.insert(ch->all_.end(), ch->jets_.begin(), ch->jets_.end());
        return std::shared_ptr<const Chart>(ch);
    }();
    return c;
}

std::shared_ptr<const Chart> Chart::equivalence() {
    static std::shared_ptr<const Chart> c = [] {
        auto ch = std::make_shared<Chart>();
        ch->name_ = "equivalence";
        ch->coords_ = {"t", "x", "u", "f", "g"};
        ch->jets_ = {"u_t", "u_x", "u_tt", "u_tx", "u_xx", "f_t", "f_x", "f_u", "g_t", "g_x", "g_u"};
        ch->all_ = ch->coords_;
        ch->all_.insert(ch->all_.end(), ch->jets_.begin(), ch->jets_.end());
        return std::shared_ptr<const Chart>(ch);
    }();
    return c;
}

std::shared_ptr<const Chart> Chart::xufg() {
    static std::shared_ptr<const Chart> c = [] {
        auto ch = std::make_shared<Chart>();
        ch->name_ = "xufg";
        ch->coords_ = {"x", "u", "f", "g"};
        ch->all_ = ch->coords_;
        return std::shared_ptr<const Chart>(ch);
    }();
    return c;
}

bool Chart::has_coord(const std::string& c) const {
    return std::find(coords_.begin(), coords_.end(), c) != coords_.end();
}

bool Chart::is_jet(const std::string& s) const {
    return std::find(jets_.begin(), jets_.end(), s) != jets_.end();
}

Context Chart::base_context() const {
    Context ctx;
    for (const auto& s : all_) ctx.declare_symbol(s);
    return ctx;
}

Expr VectorField::coeff(const std::string& c) const {
    auto it = coeffs.find(c);
    return it == coeffs.end() ? Expr() : it->second;
}

bool VectorField::is_zero() const {
    for (const auto& [_, e] : coeffs)
        if (!e.is_zero()) return false;
    return true;
}

VectorField vf_add(const VectorField& a, const VectorField& b) {
    if (a.chart != b.chart) throw ChartMismatch("vector field chart mismatch");
    VectorField r{a.chart, a.coeffs};
    for (const auto& [c, e] : b.coeffs) r.coeffs[c] = add(r.coeffs.count(c) ? r.coeffs[c] : Expr(), e);
    for (auto it = r.coeffs.begin(); it != r.coeffs.end();)
        it = it->second.is_zero() ? r.coeffs.erase(it) : std::next(it);
    return r;
}

VectorField vf_scale(const Expr& c, const VectorField& a) {
    VectorField r{a.chart, {}};
    for (const auto& [k, e] : a.coeffs) {
        Expr s = mul(c, e);
        if (!s.is_zero()) r.coeffs[k] = s;
    }
    return r;
}

bool vf_equal(const VectorField& a, const VectorField& b) {
    if (a.chart != b.chart) return false;
    for (const std::string& c : a.chart->coords())
        if (a.coeff(c) != b.coeff(c)) return false;
    return true;
}

Expr apply(const VectorField& v, const Expr& e) {
    Expr r;
    for (const auto& [c, coeff] : v.coeffs) {
        if (!v.chart->has_coord(c)) throw ChartMismatch("coefficient on unknown coordinate " + c);
        r = add(r, mul(coeff, diff(e, c)));
    }
    return r;
}

VectorField bracket(const VectorField& v, const VectorField& w) {
    if (v.chart != w.chart) throw ChartMismatch("bracket across charts");
    VectorField r{v.chart, {}};
    for (const std::string& c : v.chart->coords()) {
        Expr e = sub(apply(v, w.coeff(c)), apply(w, v.coeff(c)));
        if (!e.is_zero()) r.coeffs[c] = e;
    }
    return r;
}

Expr total_derivative(const Expr& e, const std::string& J) {
    if (J != "t" && J != "x") throw ChartMismatch("total derivative only along t or x");
    for (const char* second : {"u_tt", "u_tx", "u_xx"})
        if (contains_symbol(e, second))
            throw ChartMismatch("total derivative of a second-order jet expression");
    // u_tx = u_xt identified
    std::string u_tJ = (J == "t") ? "u_tt" : "u_tx";
    std::string u_xJ = (J == "t") ? "u_tx" : "u_xx";
    std::string u_J = "u_" + J;
    Expr r = diff(e, J);
    r = add(r, mul(sym(u_J), diff(e, "u")));
    r = add(r, mul(sym(u_tJ), diff(e, "u_t")));
    r = add(r, mul(sym(u_xJ), diff(e, "u_x")));
    return r;
}

ProlongedField prolong1(const VectorField& v) {
    if (v.chart != Chart::point()) throw ChartMismatch("prolong1 needs the point chart");
    for (const auto& [c, e] : v.coeffs)
        for (const char* jet : {"u_t", "u_x", "u_tt", "u_tx", "u_xx"})
            if (contains_symbol(e, jet))
                throw ChartMismatch("field coefficient depends on jet coordinate " + std::string(jet));
    Expr xi = v.coeff("t"), tau = v.coeff("x"), phi = v.coeff("u");
    Expr Q = sub(phi, add(mul(xi, sym("u_t")), mul(tau, sym("u_x"))));
    ProlongedField p;
    p.base = v;
    p.characteristic = Q;
    p.phi_t = add(total_derivative(Q, "t"), add(mul(xi, sym("u_tt")), mul(tau, sym("u_tx"))));
    p.phi_x = add(total_derivative(Q, "x"), add(mul(xi, sym("u_tx")), mul(tau, sym("u_xx"))));
    return p;
}

Expr apply_prolonged(const ProlongedField& p, const Expr& e) {
    Expr r = apply(p.base, e);
    r = add(r, mul(p.phi_t, diff(e, "u_t")));
    r = add(r, mul(p.phi_x, diff(e, "u_x")));
    return r;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

VectorField vf_parse(const ChartPtr& chart, const std::map<std::string, std::string>& coeffs) {
    Context ctx = chart->base_context();
    VectorField v{chart, {}};
    for (const auto& [c, text] : coeffs) {
        if (!chart->has_coord(c)) throw ChartMismatch("unknown coordinate '" + c + "' in vector field");
        Expr e = ctx.parse(text);
        if (!e.is_zero()) v.coeffs[c] = e;
    }
    return v;
}

VectorField vf_from_json_string(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    std::vector<std::string> chart_coords = j.value("chart", std::vector<std::string>{"t", "x", "u"});
    ChartPtr chart;
    if (chart_coords == std::vector<std::string>{"t", "x", "u"})
        chart = Chart::point();
    else if (chart_coords == std::vector<std::string>{"t", "x", "u", "f", "g"})
        chart = Chart::equivalence();
    else if (chart_coords == std::vector<std::string>{"x", "u", "f", "g"})
        chart = Chart::xufg();
    else
        throw ChartMismatch("unsupported chart in vector field JSON");
    std::map<std::string, std::string> coeffs;
    if (j.contains("coeffs"))
        for (auto& [k, val] : j["coeffs"].items()) coeffs[k] = val.get<std::string>();
    return vf_parse(chart, coeffs);
}

std::string vf_to_json_string(const VectorField& v) {
    nlohmann::ordered_json j;
    j["chart"] = v.chart->coords();
    nlohmann::ordered_json c = nlohmann::ordered_json::object();
    for (const std::string& coord : v.chart->coords()) {
        Expr e = v.coeff(coord);
        if (!e.is_zero()) c[coord] = render(e);
    }
    j["coeffs"] = c;
    return j.dump();
}

}  // namespace nibsym
