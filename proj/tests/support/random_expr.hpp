#ifndef NIBSYM_TESTS_RANDOM_EXPR_HPP
#define NIBSYM_TESTS_RANDOM_EXPR_HPP

#include "nibsym/context.hpp"
#include "nibsym/expr.hpp"
#include "nibsym/numcheck.hpp"

#include <string>
#include <vector>

namespace nibsym::testing {

/// Random normalized expressions over a fixed vocabulary of symbols and one
/// opaque binary function. Depth-bounded so sizes stay testable.
class RandomExprGen {
  public:
    explicit RandomExprGen(uint64_t seed) : rng_(seed) {
        auto s = std::make_shared<FunctionSpec>();
        s->name = "h";
        s->params = {"x", "u"};
        spec_ = s;
    }

    Expr gen(int depth = 3) {
        switch (rng_.next() % (depth <= 0 ? 3 : 7)) {
            case 0: return num(static_cast<long>(rng_.next() % 19) - 9, static_cast<long>(rng_.next() % 4) + 1);
            case 1: return sym(symbols_[rng_.next() % symbols_.size()]);
            case 2: return func_app(spec_, {}, {sym("x"), sym("u")});
            case 3: return add(gen(depth - 1), gen(depth - 1));
            case 4: return mul(gen(depth - 1), gen(depth - 1));
            case 5: {
                long k = static_cast<long>(rng_.next() % 5) - 2;
                return pow_rat(gen(depth - 1), Rational(k));
            }
            default: {
                Expr inner = gen(depth - 1);
                return rng_.next() % 2 ? exp_of(inner) : add(inner, gen(depth - 1));
            }
        }
    }

    /// Nonzero variant (retries).
    Expr gen_nonzero(int depth = 3) {
        for (int i = 0; i < 64; ++i) {
            try {
                Expr e = gen(depth);
                if (!e.is_zero()) return e;
            } catch (const Error&) {
                continue;  // division by a zero subexpression etc.
            }
        }
        return sym("x");
    }

    Rng& rng() { return rng_; }

  private:
    Rng rng_;
    std::vector<std::string> symbols_ = {"x", "u", "t", "s"};
    FunctionSpecPtr spec_;
};

inline Context round_trip_context() {
    Context ctx;
    ctx.declare_symbols({"x", "u", "t", "s"});
    ctx.declare_function("h", {"x", "u"});
    return ctx;
}

}  // namespace nibsym::testing

#endif
