#include "nibsym/quasipoly.hpp"

namespace nibsym {

void QuasiPoly::put(const Key& k, const Rational& c) {
    if (c == 0) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        terms_.emplace(k, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

QuasiPoly QuasiPoly::constant(const Rational& c) { return monomial(c, 0, Rational(0)); }

QuasiPoly QuasiPoly::monomial(const Rational& c, long k, const Rational& m) {
    QuasiPoly p;
    p.put({k, m}, c);
    return p;
}

QuasiPoly QuasiPoly::operator+(const QuasiPoly& o) const {
    QuasiPoly r = *this;
    for (const auto& [k, c] : o.terms_) r.put(k, c);
    return r;
}

QuasiPoly QuasiPoly::operator-(const QuasiPoly& o) const {
    QuasiPoly r = *this;
    for (const auto& [k, c] : o.terms_) r.put(k, -c);
    return r;
}

QuasiPoly QuasiPoly::operator*(const QuasiPoly& o) const {
    QuasiPoly r;
    for (const auto& [ka, ca] : terms_)
        for (const auto& [kb, cb] : o.terms_) r.put({ka.first + kb.first, ka.second + kb.second}, ca * cb);
    return r;
}

QuasiPoly QuasiPoly::scaled(const Rational& c) const {
    QuasiPoly r;
    for (const auto& [k, v] : terms_) r.put(k, v * c);
    return r;
}

QuasiPoly QuasiPoly::negate_s() const {
    QuasiPoly r;
    for (const auto& [k, c] : terms_) {
        Rational sign = (k.first % 2 == 0) ? Rational(1) : Rational(-1);
        r.put({k.first, -k.second}, c * sign);
    }
    return r;
}

Rational QuasiPoly::at_zero() const {
    Rational r(0);
    for (const auto& [k, c] : terms_)
        if (k.first == 0) r += c;
    return r;
}

QuasiPoly QuasiPoly::deriv() const {
    QuasiPoly r;
    for (const auto& [k, c] : terms_) {
        if (k.first > 0) r.put({k.first - 1, k.second}, c * Rational(k.first));
        if (k.second != 0) r.put({k.first, k.second}, c * k.second);
    }
    return r;
}

Expr QuasiPoly::to_expr(const std::string& s_name) const {
    Expr s = sym(s_name);
    Expr r;
    for (const auto& [k, c] : terms_) {
        Expr t = num(c);
        if (k.first > 0) t = mul(t, pow_rat(s, Rational(k.first)));
        if (k.second != 0) t = mul(t, exp_of(mul(num(k.second), s)));
        r = add(r, t);
    }
    return r;
}

QuasiPoly QuasiPoly::from_expr(const Expr& e, const std::string& s_name) {
    QuasiPoly p;
    for (const Term& t : e.terms()) {
        long k = 0;
        Rational m(0);
        for (const Factor& f : t.factors) {
            if (f.atom->kind == AtomKind::Symbol && f.atom->name == s_name) {
                if (!rat_is_integer(f.exponent) || f.exponent < 0)
                    throw Error("not a quasi-polynomial: bad power of " + s_name);
                k = rat_to_long(f.exponent);
                continue;
            }
            if (f.atom->kind == AtomKind::Exp) {
                const TermList& arg = f.atom->arg.terms();
                bool pure_s = arg.size() == 1 && arg[0].coeff == 1 && arg[0].factors.size() == 1 &&
                              arg[0].factors[0].exponent == 1 &&
                              arg[0].factors[0].atom->kind == AtomKind::Symbol &&
                              arg[0].factors[0].atom->name == s_name;
                if (pure_s) {
                    m = f.exponent;
                    continue;
                }
            }
            throw Error("not a quasi-polynomial in " + s_name);
        }
        p.put({k, m}, t.coeff);
    }
    return p;
}

Expr QuasiPoly::substitute_s(const Expr& value) const {
    Expr r;
    for (const auto& [k, c] : terms_) {
        Expr t = num(c);
        if (k.first > 0) t = mul(t, pow_rat(value, Rational(k.first)));
        if (k.second != 0) t = mul(t, exp_of(mul(num(k.second), value)));
        r = add(r, t);
    }
    return r;
}

std::string QuasiPoly::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        std::string piece;
        Rational ac = c < 0 ? Rational(-c) : c;
        bool something = false;
        if (ac != 1) {
            piece += rat_str(ac);
            something = true;
        }
        if (k.first > 0) {
            if (something) piece += "*";
            piece += "s";
            if (k.first > 1) piece += "^" + std::to_string(k.first);
            something = true;
        }
        if (k.second != 0) {
            if (something) piece += "*";
            piece += "exp(" + rat_str(k.second) + "s)";
            something = true;
        }
        if (!something) piece = "1";
        if (first) {
            out += (c < 0 ? "-" : "") + piece;
        } else {
            out += (c < 0 ? " - " : " + ") + piece;
        }
        first = false;
    }
    return out;
}

}  // namespace nibsym
