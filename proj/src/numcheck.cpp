#include "nibsym/numcheck.hpp"

#include <cmath>

namespace nibsym {

uint64_t Rng::next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
    double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

namespace {

// Dense multivariate cubic with analytic partial derivatives.
struct Cubic {
    std::vector<double> c;
    std::vector<std::vector<int>> expts;

    static Cubic make(size_t nargs, Rng& rng) {
        Cubic p;
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

void Binding::set(const std::string& symbol, double value) { symbols_[symbol] = value; }

double Binding::get(const std::string& symbol) const {
    auto it = symbols_.find(symbol);
    if (it == symbols_.end()) throw EvalError("unbound symbol " + symbol);
    return it->second;
}

void Binding::set_function(const std::string& name, Instantiation f) { functions_[name] = std::move(f); }

bool Binding::has_function(const std::string& name) const { return functions_.count(name) != 0; }

void Binding::instantiate_opaque(const Expr& e, Rng& rng) {
    any_atom(e, [&](const AtomNode& a) {
        if (a.kind == AtomKind::FuncApp && !functions_.count(a.spec->name)) {
            auto cubic = std::make_shared<Cubic>(Cubic::make(a.args.size(), rng));
            functions_[a.spec->name] = [cubic](const std::vector<int>& d, const std::vector<double>& x) {
                return cubic->value(d, x);
            };
        }
        return false;
    });
}

double Binding::eval(const Expr& e) const {
    EvalEnv env;
    env.symbols = symbols_;
    for (const auto& [name, f] : functions_) env.functions[name] = f;
    return nibsym::eval(e, env);
}

double fd_check(const Expr& e, const std::string& v, const Binding& b) {
    Expr de = diff(e, v);
    double symbolic = b.eval(de);
    double x0 = b.get(v);
    auto at = [&](double x) {
        Binding shifted = b;
        shifted.set(v, x);
        return shifted.eval(e);
    };
    auto central = [&](double h) { return (at(x0 + h) - at(x0 - h)) / (2.0 * h); };
    double h = 1e-6 * std::max(1.0, std::fabs(x0));
    double d1 = central(h);
    double d2 = central(h / 2.0);
    double richardson = (4.0 * d2 - d1) / 3.0;
    return std::fabs(symbolic - richardson) / std::max(1.0, std::fabs(symbolic));
}

static double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

static double adaptive(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, m, fa, flm, fm);
    double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = simpson(a, b, fa, fm, fb);
    return adaptive(f, a, b, fa, fm, fb, whole, tol, 24);
}

std::vector<Binding> sample_onshell(const OnshellSpec& spec, int n, uint64_t seed) {
    Rng rng(seed);
    Binding proto;
    proto.instantiate_opaque(spec.f, rng);
    proto.instantiate_opaque(spec.g, rng);
    std::vector<Binding> out;
    int rejects = 0;
    while (static_cast<int>(out.size()) < n) {
        if (++rejects > 200 * n + 1000) throw EvalError("rejection overflow while sampling on-shell points");
        Binding b = proto;
        b.set("t", rng.uniform(-2.0, 2.0));
        b.set("x", rng.uniform(-2.0, 2.0));
        b.set("u", rng.uniform(-2.0, 2.0));
        b.set("u_x", rng.uniform(-2.0, 2.0));
        try {
            double fv = b.eval(spec.f);
            double gv = b.eval(spec.g);
            if (!std::isfinite(fv) || !std::isfinite(gv) || std::fabs(fv) > 1e6 || std::fabs(gv) > 1e6) continue;
            b.set("u_t", fv - gv * b.get("u_x"));
        } catch (const EvalError&) {
            continue;
        }
        out.push_back(std::move(b));
    }
    return out;
}

double max_onshell_residual(const Expr& e, const OnshellSpec& spec, int n, uint64_t seed) {
    std::vector<Binding> samples = sample_onshell(spec, n, seed);
    double worst = 0;
    for (Binding& b : samples) {
        Rng aux(seed ^ 0xabcdef12345ull);
        b.instantiate_opaque(e, aux);
        double v = std::fabs(b.eval(e));
        if (v > worst) worst = v;
    }
    return worst;
}

}  // namespace nibsym
