#ifndef NIBSYM_QUASIPOLY_HPP
#define NIBSYM_QUASIPOLY_HPP

#include "nibsym/expr.hpp"
#include "nibsym/rational.hpp"

#include <map>
#include <string>
#include <utility>

namespace nibsym {

/// Formal sums  c * s^k * e^{m s}  with rational c, integer k >= 0, rational
/// m. Covers every adjoint-table coefficient (including e^{-s}+s-1 cells);
/// equality is coefficient-wise.
class QuasiPoly {
  public:
    using Key = std::pair<long, Rational>;  // (power k, rate m)

    QuasiPoly() = default;
    static QuasiPoly constant(const Rational& c);
    static QuasiPoly monomial(const Rational& c, long k, const Rational& m);

    bool is_zero() const { return terms_.empty(); }
    const std::map<Key, Rational>& terms() const { return terms_; }

    QuasiPoly operator+(const QuasiPoly& o) const;
    QuasiPoly operator-(const QuasiPoly& o) const;
    QuasiPoly operator*(const QuasiPoly& o) const;
    QuasiPoly scaled(const Rational& c) const;
    bool operator==(const QuasiPoly& o) const { return terms_ == o.terms_; }
    bool operator!=(const QuasiPoly& o) const { return !(*this == o); }

    /// Substitutes s -> -s.
    QuasiPoly negate_s() const;
    /// Value at s = 0 (the constant part; e^{m*0} = 1).
    Rational at_zero() const;
    /// d/ds as a quasi-polynomial.
    QuasiPoly deriv() const;

    /// Expr form over a symbol (terms become c * s^k * exp(s)^m).
    Expr to_expr(const std::string& s_name = "s") const;
    /// Inverse of to_expr; throws if e is not a quasi-polynomial in s.
    static QuasiPoly from_expr(const Expr& e, const std::string& s_name = "s");
    /// Substitutes a symbolic value for s (s^k and exp(m*s) become Exprs).
    Expr substitute_s(const Expr& value) const;

    std::string str() const;

  private:
    std::map<Key, Rational> terms_;
    void put(const Key& k, const Rational& c);
};

}  // namespace nibsym

#endif
