#include "nibsym/expr.hpp"

#include <algorithm>
#include <cmath>

namespace nibsym {

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

static Expr diff_atom(const Atom& a, const std::string& v) {
    switch (a->kind) {
        case AtomKind::Symbol:
            return a->name == v ? one() : zero();
        case AtomKind::FuncApp: {
            Expr r;
            for (size_t i = 0; i < a->args.size(); ++i) {
                Expr da = diff(a->args[i], v);
                if (da.is_zero()) continue;
                const PartialRule& rule = a->spec->partial(i);
                Expr partial;
                switch (rule.kind) {
                    case PartialKind::Derived: {
                        std::vector<int> d = a->derivs;
                        d.push_back(static_cast<int>(i));
                        partial = func_app(a->spec, std::move(d), a->args);
                        break;
                    }
                    case PartialKind::Template: {
                        if (!a->derivs.empty())
                            throw DerivativeUnavailable("cannot derive " + func_atom_name(*a) +
                                                        ": mixed template/derived partials");
                        SubstMap m;
                        for (size_t k = 0; k < a->spec->params.size(); ++k)
                            m.push_back({sym(a->spec->params[k]), a->args[k]});
                        partial = substitute(*rule.templ, m);
                        break;
                    }
                    case PartialKind::Unknown:
                        throw DerivativeUnavailable("derivative of " + a->spec->name + " with respect to argument '" +
                                                    a->spec->params[i] + "' is not defined");
                }
                r = add(r, mul(partial, da));
            }
            return r;
        }
        case AtomKind::Exp:
            return mul(atom_expr(a), diff(a->arg, v));
        case AtomKind::Ln:
            return mul(inverse(a->arg), diff(a->arg, v));
        case AtomKind::LambertW:
            if (contains_symbol(a->arg, v))
                throw DerivativeUnavailable("symbolic differentiation of lambertw is not supported");
            return zero();
        case AtomKind::SumBase:
            return diff(a->arg, v);
    }
    return zero();
}

Expr diff(const Expr& e, const std::string& v) {
    Expr r;
    for (const Term& t : e.terms()) {
        for (size_t i = 0; i < t.factors.size(); ++i) {
            const Factor& fi = t.factors[i];
            Expr da = diff_atom(fi.atom, v);
            if (da.is_zero()) continue;
            Expr piece = num(t.coeff * fi.exponent);
            piece = mul(piece, pow_rat(atom_expr(fi.atom), fi.exponent - 1));
            for (size_t j = 0; j < t.factors.size(); ++j) {
                if (j == i) continue;
                piece = mul(piece, pow_rat(atom_expr(t.factors[j].atom), t.factors[j].exponent));
            }
            r = add(r, mul(piece, da));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

static const Expr* lookup(const SubstMap& m, const Atom& a) {
    for (const Binding1& b : m) {
        const TermList& kt = b.key.terms();
        if (kt.size() != 1 || kt[0].coeff != 1 || kt[0].factors.size() != 1 || kt[0].factors[0].exponent != 1)
            throw Error("substitution key must be a single symbol or function application");
        if (atom_cmp(kt[0].factors[0].atom, a) == 0) return &b.value;
    }
    return nullptr;
}

static Expr subst_atom(const Atom& a, const SubstMap& m) {
    if (const Expr* rep = lookup(m, a)) return *rep;
    switch (a->kind) {
        case AtomKind::Symbol:
            return atom_expr(a);
        case AtomKind::FuncApp: {
            std::vector<Expr> args;
            args.reserve(a->args.size());
            bool changed = false;
            for (const Expr& x : a->args) {
                args.push_back(substitute(x, m));
                if (args.back() != x) changed = true;
            }
            if (!changed) return atom_expr(a);
            return func_app(a->spec, a->derivs, std::move(args));
        }
        case AtomKind::Exp:
            return exp_of(substitute(a->arg, m));
        case AtomKind::Ln:
            return ln_of(substitute(a->arg, m));
        case AtomKind::LambertW:
            return lambertw_of(substitute(a->arg, m));
        case AtomKind::SumBase:
            return substitute(a->arg, m);
    }
    return atom_expr(a);
}

Expr substitute(const Expr& e, const SubstMap& m) {
    if (m.empty()) return e;
    Expr r;
    for (const Term& t : e.terms()) {
        Expr piece = num(t.coeff);
        for (const Factor& f : t.factors) piece = mul(piece, pow_rat(subst_atom(f.atom, m), f.exponent));
        r = add(r, piece);
    }
    return r;
}

Expr substitute_symbol(const Expr& e, const std::string& name, const Expr& value) {
    return substitute(e, SubstMap{{sym(name), value}});
}

// ---------------------------------------------------------------------------
// Power collection
// ---------------------------------------------------------------------------

std::map<long, Expr> collect_atom_powers(const Expr& e, const Atom& a) {
    std::map<long, Expr> out;
    for (const Term& t : e.terms()) {
        long k = 0;
        Term rest;
        rest.coeff = t.coeff;
        for (const Factor& f : t.factors) {
            if (atom_cmp(f.atom, a) == 0) {
                if (!rat_is_integer(f.exponent))
                    throw NotPolynomial("fractional power of collection variable");
                k = rat_to_long(f.exponent);
            } else {
                rest.factors.push_back(f);
            }
        }
        auto it = out.find(k);
        Expr piece(TermList{std::move(rest)});
        if (it == out.end())
            out.emplace(k, piece);
        else
            it->second = add(it->second, piece);
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

std::map<long, Expr> collect_powers(const Expr& e, const std::string& name) {
    // The collection variable may not hide inside any atom argument.
    Atom target;
    for (const Term& t : e.terms())
        for (const Factor& f : t.factors) {
            const AtomNode& a = *f.atom;
            if (a.kind == AtomKind::Symbol && a.name == name) {
                target = f.atom;
                continue;
            }
            bool inside = false;
            switch (a.kind) {
                case AtomKind::Symbol: break;
                case AtomKind::FuncApp:
                    for (const Expr& x : a.args) inside = inside || contains_symbol(x, name);
                    break;
                default: inside = contains_symbol(a.arg, name); break;
            }
            if (inside) throw NotPolynomial("symbol " + name + " occurs inside an opaque argument");
        }
    if (!target) {
        std::map<long, Expr> out;
        if (!e.is_zero()) out.emplace(0, e);
        return out;
    }
    return collect_atom_powers(e, target);
}

// ---------------------------------------------------------------------------
// Equality
// ---------------------------------------------------------------------------

bool zero_test_conclusive(const Expr& e) {
    return !any_atom(e, [](const AtomNode& a) {
        switch (a.kind) {
            case AtomKind::LambertW:
                return true;
            case AtomKind::Ln: {
                const TermList& ts = a.arg.terms();
                bool plain_symbol = ts.size() == 1 && ts[0].coeff == 1 && ts[0].factors.size() == 1 &&
                                    ts[0].factors[0].exponent == 1 &&
                                    ts[0].factors[0].atom->kind == AtomKind::Symbol;
                return !plain_symbol;
            }
            case AtomKind::FuncApp:
                for (const Expr& x : a.args) {
                    const TermList& ts = x.terms();
                    bool plain_symbol = ts.size() == 1 && ts[0].coeff == 1 && ts[0].factors.size() == 1 &&
                                        ts[0].factors[0].exponent == 1 &&
                                        ts[0].factors[0].atom->kind == AtomKind::Symbol;
                    if (!plain_symbol) return true;
                }
                return false;
            default:
                return false;
        }
    });
}

bool is_zero_cleared(const Expr& e) {
    if (e.is_zero()) return true;
    return clear_denominators(e).is_zero();
}

namespace {

// splitmix64: deterministic cross-platform generator for probing and sampling
struct Splitmix {
    uint64_t state;
    explicit Splitmix(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }
};

// Random cubic polynomial in n variables used to instantiate opaque atoms
// during probing; derivative requests differentiate it analytically.
struct ProbeCubic {
    std::vector<double> c;  // dense coeffs over exponent tuples with |alpha| <= 3
    std::vector<std::vector<int>> expts;
    static ProbeCubic make(size_t nargs, Splitmix& rng) {
        ProbeCubic p;
        std::vector<int> cur(nargs, 0);
        std::function<void(size_t, int)> gen = [&](size_t i, int left) {
            if (i == nargs) {
                p.expts.push_back(cur);
                p.c.push_back(rng.uniform(-1.0, 1.0));
                return;
            }
            for (int k = 0; k <= left; ++k) {
                cur[i] = k;
                gen(i + 1, left - k);
            }
            cur[i] = 0;
        };
        gen(0, 3);
        // keep the top-degree coefficients away from zero so nonconstancy holds
        for (size_t t = 0; t < p.expts.size(); ++t) {
            int deg = 0;
            for (int k : p.expts[t]) deg += k;
            if (deg == 3 && std::fabs(p.c[t]) < 0.1) p.c[t] += p.c[t] >= 0 ? 0.35 : -0.35;
        }
        return p;
    }
    double value(const std::vector<int>& derivs, const std::vector<double>& args) const {
        std::vector<int> dcount(args.size(), 0);
        for (int d : derivs) dcount[static_cast<size_t>(d)]++;
        double sum = 0;
        for (size_t t = 0; t < expts.size(); ++t) {
            double term = c[t];
            for (size_t i = 0; i < args.size(); ++i) {
                int e = expts[t][i];
                int d = dcount[i];
                if (d > e) {
                    term = 0;
                    break;
                }
                for (int k = 0; k < d; ++k) term *= e - k;
                term *= std::pow(args[i], e - d);
            }
            sum += term;
        }
        return sum;
    }
};

}  // namespace

EqResult equals(const Expr& a, const Expr& b, unsigned probe_seed) {
    Expr z = sub(a, b);
    if (z.is_zero()) return {Verdict::ProvenEqual, z};
    Expr cleared = clear_denominators(z);
    if (cleared.is_zero()) return {Verdict::ProvenEqual, cleared};
    if (zero_test_conclusive(cleared)) return {Verdict::ProvenUnequal, cleared};

    // Opaque nesting: probe numerically at 32 sample points. Every opaque
    // function is instantiated once (per equals call) as a random cubic.
    std::set<std::string> syms = free_symbols(z);
    Splitmix rng(0x9127f00dULL ^ probe_seed);
    std::map<std::string, ProbeCubic> fns;
    any_atom(z, [&](const AtomNode& n) {
        if (n.kind == AtomKind::FuncApp && !fns.count(n.spec->name))
            fns.emplace(n.spec->name, ProbeCubic::make(n.args.size(), rng));
        return false;
    });
    EvalEnv env;
    for (auto& [name, cubic] : fns) {
        ProbeCubic* pc = &cubic;
        env.functions[name] = [pc](const std::vector<int>& d, const std::vector<double>& x) {
            return pc->value(d, x);
        };
    }
    bool all_small = true;
    int evaluated = 0;
    for (int trial = 0; trial < 400 && evaluated < 32 && all_small; ++trial) {
        for (const std::string& s : syms) env.symbols[s] = rng.uniform(0.25, 2.0);
        try {
            double v = eval(z, env);
            if (!std::isfinite(v)) continue;
            ++evaluated;
            if (std::fabs(v) > 1e-7) all_small = false;
        } catch (const EvalError&) {
            continue;
        }
    }
    if (evaluated == 0) return {Verdict::ProbableUnequal, cleared};
    return {all_small ? Verdict::ProbableEqual : Verdict::ProbableUnequal, cleared};
}

// ---------------------------------------------------------------------------
// Numeric evaluation
// ---------------------------------------------------------------------------

double lambertw(double x) {
    const double inv_e = -0.36787944117144233;
    if (x < inv_e - 1e-12) throw EvalError("lambertw argument below -1/e");
    if (x < inv_e) x = inv_e;
    double w;
    if (x < -0.25)
        w = -1.0 + std::sqrt(2.0 * (1.0 + std::exp(1.0) * x));
    else if (x < 3.0)
        w = std::log(1.0 + x);
    else
        w = std::log(x) - std::log(std::log(x));
    for (int i = 0; i < 80; ++i) {
        double ew = std::exp(w);
        double f = w * ew - x;
        double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
        double step = f / denom;
        w -= step;
        if (std::fabs(step) < 1e-16 * (1.0 + std::fabs(w))) break;
    }
    return w;
}

static double eval_atom(const AtomNode& a, const EvalEnv& env) {
    switch (a.kind) {
        case AtomKind::Symbol: {
            auto it = env.symbols.find(a.name);
            if (it == env.symbols.end()) throw EvalError("unbound symbol " + a.name);
            return it->second;
        }
        case AtomKind::FuncApp: {
            auto it = env.functions.find(a.spec->name);
            if (it == env.functions.end()) throw EvalError("unbound function " + a.spec->name);
            std::vector<double> args;
            args.reserve(a.args.size());
            for (const Expr& x : a.args) args.push_back(eval(x, env));
            return it->second(a.derivs, args);
        }
        case AtomKind::Exp:
            return std::exp(eval(a.arg, env));
        case AtomKind::Ln: {
            double v = eval(a.arg, env);
            if (v <= 0) throw EvalError("ln of nonpositive value");
            return std::log(v);
        }
        case AtomKind::LambertW:
            return lambertw(eval(a.arg, env));
        case AtomKind::SumBase:
            return eval(a.arg, env);
    }
    throw EvalError("unknown atom");
}

double eval(const Expr& e, const EvalEnv& env) {
    double sum = 0;
    for (const Term& t : e.terms()) {
        double prod = rat_double(t.coeff);
        for (const Factor& f : t.factors) {
            double base = eval_atom(*f.atom, env);
            double ex = rat_double(f.exponent);
            double p;
            if (rat_is_integer(f.exponent)) {
                p = std::pow(base, ex);
            } else {
                if (base < 0) throw EvalError("fractional power of negative value");
                p = std::pow(base, ex);
            }
            if (!std::isfinite(p)) throw EvalError("non-finite power");
            prod *= p;
        }
        sum += prod;
    }
    return sum;
}

}  // namespace nibsym
