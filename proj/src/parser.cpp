#include "nibsym/context.hpp"

#include <cctype>

namespace nibsym {

Context& Context::declare_symbol(const std::string& name) {
    if (functions_.count(name)) throw Error("identifier already declared as function: " + name);
    symbols_[name] = true;
    return *this;
}

Context& Context::declare_symbols(std::initializer_list<std::string> names) {
    for (const auto& n : names) declare_symbol(n);
    return *this;
}

FunctionSpecPtr Context::declare_function(const std::string& name, std::vector<std::string> params) {
    return declare_function(name, std::move(params), {});
}

FunctionSpecPtr Context::declare_function(const std::string& name, std::vector<std::string> params,
                                          std::vector<PartialRule> partials) {
    if (name == "exp" || name == "ln" || name == "lambertw") throw Error("cannot redeclare builtin " + name);
    if (symbols_.count(name)) throw Error("identifier already declared as symbol: " + name);
    auto spec = std::make_shared<FunctionSpec>();
    spec->name = name;
    spec->params = std::move(params);
    spec->partials = std::move(partials);
    FunctionSpecPtr p = spec;
    functions_[name] = p;
    return p;
}

FunctionSpecPtr Context::function(const std::string& name) const {
    auto it = functions_.find(name);
    return it == functions_.end() ? nullptr : it->second;
}

std::vector<std::string> Context::symbol_names() const {
    std::vector<std::string> out;
    for (const auto& [n, _] : symbols_) out.push_back(n);
    return out;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser. Precedence: ^ (right) > unary - > * / > + -.
// ---------------------------------------------------------------------------

namespace {

struct Parser {
    const Context& ctx;
    const std::string& s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    Expr parse_expr() {
        Expr r = parse_term();
        while (true) {
            char c = peek();
            if (c == '+') {
                ++pos;
                r = add(r, parse_term());
            } else if (c == '-') {
                ++pos;
                r = sub(r, parse_term());
            } else {
                return r;
            }
        }
    }

    Expr parse_term() {
        Expr r = parse_unary();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos;
                r = mul(r, parse_unary());
            } else if (c == '/') {
                ++pos;
                r = div(r, parse_unary());
            } else {
                return r;
            }
        }
    }

    Expr parse_unary() {
        if (peek() == '-') {
            ++pos;
            return neg(parse_unary());
        }
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (peek() == '^') {
            ++pos;
            Expr e = parse_unary();  // right-associative; exponent may be signed
            return pow_expr(base, e);
        }
        return base;
    }

    Expr parse_primary() {
        char c = peek();
        if (c == '(') {
            ++pos;
            Expr r = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        fail("unexpected character");
    }

    Expr parse_number() {
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        mpz_class n(s.substr(start, pos - start));
        return num(Rational(n));
    }

    std::vector<Expr> parse_args() {
        std::vector<Expr> args;
        if (!eat('(')) fail("expected '('");
        if (eat(')')) return args;
        args.push_back(parse_expr());
        while (eat(',')) args.push_back(parse_expr());
        if (!eat(')')) fail("expected ')' or ','");
        return args;
    }

    Expr apply_function(const FunctionSpecPtr& spec, std::vector<int> derivs) {
        std::vector<Expr> args;
        if (peek() == '(') {
            args = parse_args();
        } else {
            // bare reference: apply to the declared parameter symbols
            for (const std::string& p : spec->params) args.push_back(sym(p));
        }
        if (args.size() != spec->params.size()) fail("wrong number of arguments for " + spec->name);
        return func_app(spec, std::move(derivs), std::move(args));
    }

    Expr parse_identifier() {
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        std::string name = s.substr(start, pos - start);
        if (name == "exp" || name == "ln" || name == "lambertw") {
            std::vector<Expr> args = parse_args();
            if (args.size() != 1) fail(name + " takes one argument");
            if (name == "exp") return exp_of(args[0]);
            if (name == "ln") return ln_of(args[0]);
            return lambertw_of(args[0]);
        }
        if (ctx.has_symbol(name)) return sym(name);
        if (FunctionSpecPtr spec = ctx.function(name)) return apply_function(spec, {});
        // derivative suffix: base_xyz with base a declared function
        size_t us = name.find('_');
        if (us != std::string::npos && us > 0) {
            std::string base = name.substr(0, us);
            if (FunctionSpecPtr spec = ctx.function(base)) {
                std::string suffix = name.substr(us + 1);
                std::vector<int> derivs;
                size_t i = 0;
                while (i < suffix.size()) {
                    // greedy longest parameter-name match
                    int best = -1;
                    size_t best_len = 0;
                    for (size_t p = 0; p < spec->params.size(); ++p) {
                        const std::string& pn = spec->params[p];
                        if (pn.size() > best_len && suffix.compare(i, pn.size(), pn) == 0) {
                            best = static_cast<int>(p);
                            best_len = pn.size();
                        }
                    }
                    if (best < 0) {
                        pos = start;
                        fail("cannot resolve derivative suffix '" + suffix + "' of " + base);
                    }
                    derivs.push_back(best);
                    i += best_len;
                }
                return apply_function(spec, std::move(derivs));
            }
        }
        pos = start;
        fail("undeclared identifier '" + name + "'");
    }
};

}  // namespace

Expr Context::parse(const std::string& text) const {
    Parser p{*this, text};
    Expr r = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("trailing input", p.pos);
    return r;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

std::string render_atom(const AtomNode& a);

std::string render_factor(const Factor& f) {
    std::string base = render_atom(*f.atom);
    if (f.exponent == 1) return base;
    std::string e;
    if (rat_is_integer(f.exponent) && f.exponent > 0)
        e = rat_str(f.exponent);
    else
        e = "(" + rat_str(f.exponent) + ")";
    return base + "^" + e;
}

std::string render_term_magnitude(const Term& t) {
    Rational c = t.coeff < 0 ? Rational(-t.coeff) : t.coeff;
    std::string s;
    bool need_coeff = (c != 1) || t.factors.empty();
    if (need_coeff) s = rat_str(c);
    for (const Factor& f : t.factors) {
        if (!s.empty()) s += "*";
        s += render_factor(f);
    }
    return s;
}

std::string render_atom(const AtomNode& a) {
    switch (a.kind) {
        case AtomKind::Symbol:
            return a.name;
        case AtomKind::FuncApp: {
            std::string s = func_atom_name(a) + "(";
            for (size_t i = 0; i < a.args.size(); ++i) {
                if (i) s += ",";
                s += render(a.args[i]);
            }
            return s + ")";
        }
        case AtomKind::Exp:
            return "exp(" + render(a.arg) + ")";
        case AtomKind::Ln:
            return "ln(" + render(a.arg) + ")";
        case AtomKind::LambertW:
            return "lambertw(" + render(a.arg) + ")";
        case AtomKind::SumBase:
            return "(" + render(a.arg) + ")";
    }
    return "?";
}

}  // namespace

std::string render(const Expr& e) {
    if (e.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const Term& t : e.terms()) {
        bool negative = t.coeff < 0;
        if (first) {
            if (negative) s += "-";
        } else {
            s += negative ? " - " : " + ";
        }
        s += render_term_magnitude(t);
        first = false;
    }
    return s;
}

}  // namespace nibsym
