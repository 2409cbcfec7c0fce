#include "nibsym/expr.hpp"

#include <algorithm>
#include <cassert>

namespace nibsym {

namespace {

const TermList kEmpty{};

int rat_cmp(const Rational& a, const Rational& b) { return cmp(a, b); }

int int_vec_cmp(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    return 0;
}

}  // namespace

Expr::Expr(TermList terms) {
    if (!terms.empty()) rep_ = std::make_shared<const TermList>(std::move(terms));
}

const TermList& Expr::terms() const { return rep_ ? *rep_ : kEmpty; }

bool Expr::is_rational() const {
    return terms().empty() || (terms().size() == 1 && terms()[0].factors.empty());
}

Rational Expr::rational_value() const {
    if (terms().empty()) return Rational(0);
    if (terms().size() == 1 && terms()[0].factors.empty()) return terms()[0].coeff;
    throw Error("expression is not a rational constant");
}

bool Expr::operator==(const Expr& o) const { return expr_cmp(*this, o) == 0; }

// ---------------------------------------------------------------------------
// Ordering
// ---------------------------------------------------------------------------

static int kind_rank(AtomKind k) {
    switch (k) {
        case AtomKind::Symbol: return 0;
        case AtomKind::FuncApp: return 1;
        case AtomKind::Exp: return 2;
        case AtomKind::Ln: return 3;
        case AtomKind::LambertW: return 4;
        case AtomKind::SumBase: return 5;
    }
    return 6;
}

int atom_cmp(const Atom& a, const Atom& b) {
    if (a == b) return 0;
    int ra = kind_rank(a->kind), rb = kind_rank(b->kind);
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a->kind) {
        case AtomKind::Symbol:
            return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
        case AtomKind::FuncApp: {
            if (int c = a->spec->name.compare(b->spec->name); c != 0) return c < 0 ? -1 : 1;
            if (int c = int_vec_cmp(a->derivs, b->derivs); c != 0) return c;
            if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
            for (size_t i = 0; i < a->args.size(); ++i)
                if (int c = expr_cmp(a->args[i], b->args[i]); c != 0) return c;
            return 0;
        }
        default:
            return expr_cmp(a->arg, b->arg);
    }
}

static int factor_cmp(const Factor& a, const Factor& b) {
    if (int c = atom_cmp(a.atom, b.atom); c != 0) return c;
    return rat_cmp(a.exponent, b.exponent);
}

int term_factors_cmp(const Term& a, const Term& b) {
    size_t n = std::min(a.factors.size(), b.factors.size());
    for (size_t i = 0; i < n; ++i)
        if (int c = factor_cmp(a.factors[i], b.factors[i]); c != 0) return c;
    if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size() ? -1 : 1;
    return 0;
}

int expr_cmp(const Expr& a, const Expr& b) {
    const TermList& ta = a.terms();
    const TermList& tb = b.terms();
    size_t n = std::min(ta.size(), tb.size());
    for (size_t i = 0; i < n; ++i) {
        if (int c = term_factors_cmp(ta[i], tb[i]); c != 0) return c;
        if (int c = rat_cmp(ta[i].coeff, tb[i].coeff); c != 0) return c;
    }
    if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
    return 0;
}

std::string func_atom_name(const AtomNode& a) {
    std::string s = a.spec->name;
    if (!a.derivs.empty()) {
        s += "_";
        for (int p : a.derivs) s += a.spec->params.at(static_cast<size_t>(p));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Construction helpers
// ---------------------------------------------------------------------------

Expr num(const Rational& q) {
    if (q == 0) return Expr();
    return Expr(TermList{Term{q, {}}});
}
Expr num(long n, long d) { return num(rat(n, d)); }
Expr zero() { return Expr(); }
Expr one() { return num(1); }

Expr atom_expr(const Atom& a) { return Expr(TermList{Term{Rational(1), {Factor{a, Rational(1)}}}}); }

Expr sym(const std::string& name) {
    auto node = std::make_shared<AtomNode>();
    node->kind = AtomKind::Symbol;
    node->name = name;
    return atom_expr(node);
}

Expr func_app(const FunctionSpecPtr& spec, std::vector<int> derivs, std::vector<Expr> args) {
    if (args.size() != spec->params.size())
        throw Error("arity mismatch applying " + spec->name + ": expected " +
                    std::to_string(spec->params.size()) + " arguments, got " + std::to_string(args.size()));
    std::sort(derivs.begin(), derivs.end());
    auto node = std::make_shared<AtomNode>();
    node->kind = AtomKind::FuncApp;
    node->spec = spec;
    node->derivs = std::move(derivs);
    node->args = std::move(args);
    return atom_expr(node);
}

static Atom make_unary_atom(AtomKind k, Expr arg) {
    auto node = std::make_shared<AtomNode>();
    node->kind = k;
    node->arg = std::move(arg);
    return node;
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

Expr add(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const TermList& ta = a.terms();
    const TermList& tb = b.terms();
    TermList out;
    out.reserve(ta.size() + tb.size());
    size_t i = 0, j = 0;
    while (i < ta.size() && j < tb.size()) {
        int c = term_factors_cmp(ta[i], tb[j]);
        if (c < 0) {
            out.push_back(ta[i++]);
        } else if (c > 0) {
            out.push_back(tb[j++]);
        } else {
            Term t = ta[i++];
            t.coeff += tb[j++].coeff;
            if (t.coeff != 0) out.push_back(std::move(t));
        }
    }
    for (; i < ta.size(); ++i) out.push_back(ta[i]);
    for (; j < tb.size(); ++j) out.push_back(tb[j]);
    return Expr(std::move(out));
}

Expr add(std::initializer_list<Expr> es) {
    Expr r;
    for (const Expr& e : es) r = add(r, e);
    return r;
}

Expr neg(const Expr& a) { return mul_rat(Rational(-1), a); }

Expr sub(const Expr& a, const Expr& b) { return add(a, neg(b)); }

Expr mul_rat(const Rational& c, const Expr& a) {
    if (c == 0 || a.is_zero()) return Expr();
    TermList out = a.terms();
    for (auto& t : out) t.coeff *= c;
    return Expr(std::move(out));
}

// True when the Exp atom argument is exactly ln(h) (single factor, exponent 1).
static bool exp_atom_is_pure_log(const AtomNode& a, Expr* h_out) {
    if (a.kind != AtomKind::Exp) return false;
    const TermList& ts = a.arg.terms();
    if (ts.size() != 1 || ts[0].coeff != 1 || ts[0].factors.size() != 1) return false;
    const Factor& f = ts[0].factors[0];
    if (f.atom->kind != AtomKind::Ln || f.exponent != 1) return false;
    if (h_out) *h_out = f.atom->arg;
    return true;
}

// Multiplies two canonical terms. Expansions (positive powers of inverted
// sums, integer powers of exp(ln h)) can turn the product into a full
// polynomial, hence the Expr return type.
static Expr term_mul(const Term& x, const Term& y) {
    Term base;
    base.coeff = x.coeff * y.coeff;
    std::vector<Expr> pending;
    auto classify = [&](const Atom& atom, const Rational& e) {
        if (e == 0) return;
        if (atom->kind == AtomKind::SumBase && rat_is_integer(e) && e > 0) {
            pending.push_back(pow_rat(atom->arg, e));
            return;
        }
        Expr h;
        if (rat_is_integer(e) && exp_atom_is_pure_log(*atom, &h)) {
            pending.push_back(pow_rat(h, e));
            return;
        }
        base.factors.push_back(Factor{atom, e});
    };
    size_t i = 0, j = 0;
    const auto& fx = x.factors;
    const auto& fy = y.factors;
    while (i < fx.size() && j < fy.size()) {
        int c = atom_cmp(fx[i].atom, fy[j].atom);
        if (c < 0) {
            classify(fx[i].atom, fx[i].exponent);
            ++i;
        } else if (c > 0) {
            classify(fy[j].atom, fy[j].exponent);
            ++j;
        } else {
            classify(fx[i].atom, fx[i].exponent + fy[j].exponent);
            ++i;
            ++j;
        }
    }
    for (; i < fx.size(); ++i) classify(fx[i].atom, fx[i].exponent);
    for (; j < fy.size(); ++j) classify(fy[j].atom, fy[j].exponent);

    Expr r(TermList{std::move(base)});
    for (const Expr& p : pending) r = mul(r, p);
    return r;
}

Expr mul(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr();
    if (a.is_rational()) return mul_rat(a.rational_value(), b);
    if (b.is_rational()) return mul_rat(b.rational_value(), a);
    Expr acc;
    for (const Term& tx : a.terms())
        for (const Term& ty : b.terms()) acc = add(acc, term_mul(tx, ty));
    return acc;
}

Expr mul(std::initializer_list<Expr> es) {
    Expr r = one();
    for (const Expr& e : es) r = mul(r, e);
    return r;
}

// Extracts rational content and normalizes the sign of the leading term, so
// inverted sums have a canonical base. Returns the content c with e = c*prim.
static Rational extract_content(const TermList& terms, TermList& prim) {
    Rational c(0);
    for (const auto& t : terms) c = rat_content_gcd(c, t.coeff);
    if (terms[0].coeff < 0) c = -c;
    prim = terms;
    for (auto& t : prim) t.coeff /= c;
    return c;
}

namespace {
struct AtomLess {
    bool operator()(const Atom& a, const Atom& b) const { return atom_cmp(a, b) < 0; }
};
}  // namespace

// Multiplies away every negative atom power; *denom_out (if given) receives
// the product of the clearing monomials.
static Expr clear_negatives(const Expr& a, Expr* denom_out) {
    Expr cleared = a;
    Expr denom = one();
    for (int guard = 0;; ++guard) {
        std::map<Atom, Rational, AtomLess> mins;
        for (const Term& t : cleared.terms())
            for (const Factor& f : t.factors)
                if (f.exponent < 0) {
                    auto it = mins.find(f.atom);
                    if (it == mins.end())
                        mins.emplace(f.atom, f.exponent);
                    else if (f.exponent < it->second)
                        it->second = f.exponent;
                }
        if (mins.empty()) break;
        if (guard >= 64) throw Error("could not clear denominators");
        Term d;
        d.coeff = 1;
        for (auto& [atom, e] : mins) d.factors.push_back(Factor{atom, -e});
        Expr dd(TermList{d});
        cleared = mul(cleared, dd);
        denom = mul(denom, dd);
    }
    if (denom_out) *denom_out = denom;
    return cleared;
}

Expr clear_denominators(const Expr& e) { return clear_negatives(e, nullptr); }

Expr inverse(const Expr& a) {
    if (a.is_zero()) throw Error("division by zero expression");
    if (a.is_rational()) return num(Rational(1) / a.rational_value());
    if (a.terms().size() == 1) {
        const Term& t = a.terms()[0];
        Term inv;
        inv.coeff = Rational(1) / t.coeff;
        Expr extra = one();
        for (const Factor& f : t.factors) {
            Rational e = -f.exponent;
            Expr h;
            if (f.atom->kind == AtomKind::SumBase && rat_is_integer(e) && e > 0)
                extra = mul(extra, pow_rat(f.atom->arg, e));
            else if (rat_is_integer(e) && exp_atom_is_pure_log(*f.atom, &h))
                extra = mul(extra, pow_rat(h, e));
            else
                inv.factors.push_back(Factor{f.atom, e});
        }
        return mul(Expr(TermList{std::move(inv)}), extra);
    }
    // Multi-term: clear internal negative powers first, then invert the
    // remaining primitive polynomial as a SumBase atom.
    Expr denom = one();
    Expr cleared = clear_negatives(a, &denom);
    if (cleared.is_zero()) throw Error("division by zero expression");
    if (cleared.terms().size() == 1) return mul(denom, inverse(cleared));
    TermList prim;
    Rational content = extract_content(cleared.terms(), prim);
    Atom sb = make_unary_atom(AtomKind::SumBase, Expr(std::move(prim)));
    Expr inv_atom(TermList{Term{Rational(1) / content, {Factor{sb, Rational(-1)}}}});
    return mul(denom, inv_atom);
}

Expr div(const Expr& a, const Expr& b) { return mul(a, inverse(b)); }

Expr pow_rat(const Expr& base, const Rational& q) {
    if (q == 0) return one();
    if (q == 1) return base;
    if (base.is_zero()) {
        if (q < 0) throw Error("zero to a negative power");
        return Expr();
    }
    if (base.is_rational() && rat_is_integer(q)) return num(rat_pow(base.rational_value(), rat_to_long(q)));
    if (rat_is_integer(q)) {
        long k = rat_to_long(q);
        if (k > 0) {
            if (base.terms().size() == 1) {
                // termwise power avoids the repeated-multiplication blowup
                const Term& t = base.terms()[0];
                Term r;
                r.coeff = rat_pow(t.coeff, k);
                Expr extra = one();
                for (const Factor& f : t.factors) {
                    Rational e = f.exponent * q;
                    Expr h;
                    if (rat_is_integer(e) && exp_atom_is_pure_log(*f.atom, &h))
                        extra = mul(extra, pow_rat(h, e));
                    else
                        r.factors.push_back(Factor{f.atom, e});
                }
                return mul(Expr(TermList{std::move(r)}), extra);
            }
            Expr r = base;
            for (long i = 1; i < k; ++i) r = mul(r, base);
            return r;
        }
        return pow_rat(inverse(base), -q);
    }
    // Fractional exponent: scale atom exponents directly when that is exact,
    // otherwise fall back to exp(q*ln(base)).
    if (base.terms().size() == 1) {
        const Term& t = base.terms()[0];
        bool simple = t.coeff == 1;
        for (const Factor& f : t.factors)
            if (f.atom->kind == AtomKind::SumBase) simple = false;
        if (simple) {
            Term r;
            r.coeff = 1;
            Expr extra = one();
            for (const Factor& f : t.factors) {
                Rational e = f.exponent * q;
                Expr h;
                if (rat_is_integer(e) && exp_atom_is_pure_log(*f.atom, &h))
                    extra = mul(extra, pow_rat(h, e));
                else
                    r.factors.push_back(Factor{f.atom, e});
            }
            return mul(Expr(TermList{std::move(r)}), extra);
        }
    }
    return exp_of(mul(num(q), ln_of(base)));
}

Expr pow_expr(const Expr& base, const Expr& exponent) {
    if (exponent.is_rational()) return pow_rat(base, exponent.rational_value());
    return exp_of(mul(exponent, ln_of(base)));
}

Expr exp_of(const Expr& e) {
    if (e.is_zero()) return one();
    Expr r = one();
    for (const Term& t : e.terms()) {
        // exp(c*ln h) with integer c collapses to h^c
        if (rat_is_integer(t.coeff) && t.factors.size() == 1 && t.factors[0].atom->kind == AtomKind::Ln &&
            t.factors[0].exponent == 1) {
            r = mul(r, pow_rat(t.factors[0].atom->arg, t.coeff));
            continue;
        }
        Term monic;
        monic.coeff = 1;
        monic.factors = t.factors;
        Atom a = make_unary_atom(AtomKind::Exp, Expr(TermList{std::move(monic)}));
        r = mul(r, Expr(TermList{Term{Rational(1), {Factor{a, t.coeff}}}}));
    }
    return r;
}

Expr ln_of(const Expr& e) {
    if (e == one()) return Expr();
    return atom_expr(make_unary_atom(AtomKind::Ln, e));
}

Expr lambertw_of(const Expr& e) { return atom_expr(make_unary_atom(AtomKind::LambertW, e)); }

// ---------------------------------------------------------------------------
// Structural queries
// ---------------------------------------------------------------------------

static void collect_symbols(const Expr& e, std::set<std::string>& out);

static void collect_symbols_atom(const AtomNode& a, std::set<std::string>& out) {
    switch (a.kind) {
        case AtomKind::Symbol: out.insert(a.name); break;
        case AtomKind::FuncApp:
            for (const Expr& x : a.args) collect_symbols(x, out);
            break;
        default: collect_symbols(a.arg, out); break;
    }
}

static void collect_symbols(const Expr& e, std::set<std::string>& out) {
    for (const Term& t : e.terms())
        for (const Factor& f : t.factors) collect_symbols_atom(*f.atom, out);
}

std::set<std::string> free_symbols(const Expr& e) {
    std::set<std::string> out;
    collect_symbols(e, out);
    return out;
}

bool contains_symbol(const Expr& e, const std::string& name) {
    return any_atom(e, [&](const AtomNode& a) { return a.kind == AtomKind::Symbol && a.name == name; });
}

std::vector<Atom> top_atoms(const Expr& e) {
    std::vector<Atom> out;
    for (const Term& t : e.terms())
        for (const Factor& f : t.factors) {
            bool seen = false;
            for (const Atom& a : out)
                if (atom_cmp(a, f.atom) == 0) {
                    seen = true;
                    break;
                }
            if (!seen) out.push_back(f.atom);
        }
    return out;
}

bool any_atom(const Expr& e, const std::function<bool(const AtomNode&)>& pred) {
    for (const Term& t : e.terms())
        for (const Factor& f : t.factors) {
            const AtomNode& a = *f.atom;
            if (pred(a)) return true;
            switch (a.kind) {
                case AtomKind::Symbol: break;
                case AtomKind::FuncApp:
                    for (const Expr& x : a.args)
                        if (any_atom(x, pred)) return true;
                    break;
                default:
                    if (any_atom(a.arg, pred)) return true;
                    break;
            }
        }
    return false;
}

}  // namespace nibsym
