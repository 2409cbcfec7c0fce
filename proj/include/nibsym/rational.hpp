#ifndef NIBSYM_RATIONAL_HPP
#define NIBSYM_RATIONAL_HPP

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace nibsym {

/// Exact rational scalar. All Expr coefficients and exponents use this type;
/// no floating point ever enters the symbolic layer.
using Rational = mpq_class;

inline Rational rat(long n, long d = 1) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(n, d);
    q.canonicalize();
    return q;
}

inline bool rat_is_integer(const Rational& q) { return q.get_den() == 1; }

inline long rat_to_long(const Rational& q) {
    if (!rat_is_integer(q) || !q.get_num().fits_slong_p())
        throw std::domain_error("rational does not fit a small integer: " + q.get_str());
    return q.get_num().get_si();
}

/// q^k for integer k (k may be negative; q must be nonzero then).
inline Rational rat_pow(const Rational& q, long k) {
    if (k == 0) return Rational(1);
    if (q == 0 && k < 0) throw std::domain_error("zero to a negative power");
    mpz_class num, den;
    unsigned long a = static_cast<unsigned long>(k < 0 ? -k : k);
    mpz_pow_ui(num.get_mpz_t(), q.get_num().get_mpz_t(), a);
    mpz_pow_ui(den.get_mpz_t(), q.get_den().get_mpz_t(), a);
    Rational r = (k > 0) ? Rational(num, den) : Rational(den, num);
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rational& q) { return q.get_str(); }

inline double rat_double(const Rational& q) { return q.get_d(); }

/// gcd of |a|, |b| as a positive rational (gcd of numerators over lcm of
/// denominators); used for content extraction.
inline Rational rat_content_gcd(const Rational& a, const Rational& b) {
    mpz_class gn, gd, l;
    mpz_gcd(gn.get_mpz_t(), a.get_num().get_mpz_t(), b.get_num().get_mpz_t());
    mpz_lcm(gd.get_mpz_t(), a.get_den().get_mpz_t(), b.get_den().get_mpz_t());
    Rational r(gn, gd);
    r.canonicalize();
    return r;
}

}  // namespace nibsym

#endif
