#ifndef NIBSYM_EXPR_HPP
#define NIBSYM_EXPR_HPP

#include "nibsym/rational.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace nibsym {

class Expr;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : Error {
    size_t position;
    ParseError(const std::string& msg, size_t pos)
        : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};
struct DerivativeUnavailable : Error {
    using Error::Error;
};
struct NotPolynomial : Error {
    using Error::Error;
};
struct EvalError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Function symbols
// ---------------------------------------------------------------------------

enum class PartialKind {
    Derived,   // d/d(arg i) introduces a derived symbol (g -> g_x)
    Template,  // d/d(arg i) is a fixed expression in the declared parameters
    Unknown,   // derivative deliberately undefined; taking it is an error
};

struct PartialRule {
    PartialKind kind = PartialKind::Derived;
    std::shared_ptr<const Expr> templ;  // set iff kind == Template
};

/// Declaration of an opaque function symbol family, e.g. g with parameters
/// (x,u). Derived symbols (g_x, g_xu, ...) share the spec and carry a sorted
/// multiset of derivative positions.
struct FunctionSpec {
    std::string name;
    std::vector<std::string> params;
    std::vector<PartialRule> partials;  // one per parameter; empty => all Derived
    const PartialRule& partial(size_t i) const {
        static const PartialRule derived{};
        return i < partials.size() ? partials[i] : derived;
    }
};
using FunctionSpecPtr = std::shared_ptr<const FunctionSpec>;

// ---------------------------------------------------------------------------
// Atoms, terms, expressions
// ---------------------------------------------------------------------------

enum class AtomKind { Symbol, FuncApp, Exp, Ln, LambertW, SumBase };

struct AtomNode;
using Atom = std::shared_ptr<const AtomNode>;

struct Factor {
    Atom atom;
    Rational exponent;
};

struct Term {
    Rational coeff;
    std::vector<Factor> factors;  // sorted by atom order, unique, exponent != 0
};

using TermList = std::vector<Term>;

/// Immutable symbolic expression in normal form: an expanded sum of terms,
/// each term a rational coefficient times a power product of atoms. Opaque
/// function applications, exp/ln/lambertw applications and inverted sums are
/// the atoms. Construction goes through the factory functions below, which
/// normalize eagerly; a default-constructed Expr is 0.
class Expr {
  public:
    Expr() = default;
    explicit Expr(TermList terms);

    const TermList& terms() const;
    bool is_zero() const { return terms().empty(); }
    bool is_rational() const;
    Rational rational_value() const;  // requires is_rational()

    bool operator==(const Expr& o) const;
    bool operator!=(const Expr& o) const { return !(*this == o); }

  private:
    std::shared_ptr<const TermList> rep_;
};

struct AtomNode {
    AtomKind kind;
    // Symbol
    std::string name;
    // FuncApp
    FunctionSpecPtr spec;
    std::vector<int> derivs;  // sorted multiset of parameter positions
    std::vector<Expr> args;
    // Exp (arg = monic single-term expr), Ln, LambertW, SumBase (arg = the sum)
    Expr arg;
};

int atom_cmp(const Atom& a, const Atom& b);
int expr_cmp(const Expr& a, const Expr& b);
int term_factors_cmp(const Term& a, const Term& b);

/// Derived symbol display name: base + "_" + param names by position ("g_xu").
std::string func_atom_name(const AtomNode& a);

// -- construction -----------------------------------------------------------

Expr num(const Rational& q);
Expr num(long n, long d = 1);
Expr zero();
Expr one();
Expr sym(const std::string& name);
Expr func_app(const FunctionSpecPtr& spec, std::vector<int> derivs, std::vector<Expr> args);
Expr atom_expr(const Atom& a);

Expr add(const Expr& a, const Expr& b);
Expr add(std::initializer_list<Expr> es);
Expr neg(const Expr& a);
Expr sub(const Expr& a, const Expr& b);
Expr mul(const Expr& a, const Expr& b);
Expr mul(std::initializer_list<Expr> es);
Expr mul_rat(const Rational& c, const Expr& a);
Expr inverse(const Expr& a);
Expr div(const Expr& a, const Expr& b);
Expr pow_rat(const Expr& base, const Rational& q);
Expr pow_expr(const Expr& base, const Expr& exponent);
Expr exp_of(const Expr& e);
Expr ln_of(const Expr& e);
Expr lambertw_of(const Expr& e);

// -- structural queries ------------------------------------------------------

/// Free symbol names, including symbols buried inside atom arguments.
std::set<std::string> free_symbols(const Expr& e);
/// True if the symbol occurs anywhere (also inside atom arguments).
bool contains_symbol(const Expr& e, const std::string& name);
/// All distinct atoms at top level of the power products (not recursive).
std::vector<Atom> top_atoms(const Expr& e);
/// True if any atom anywhere in e satisfies the predicate (recursive).
bool any_atom(const Expr& e, const std::function<bool(const AtomNode&)>& pred);

// ---------------------------------------------------------------------------
// Calculus on normal forms
// ---------------------------------------------------------------------------

/// Partial derivative with respect to a symbol. Symbols other than `name`
/// (jet coordinates included) are treated as mutually independent constants.
Expr diff(const Expr& e, const std::string& name);

/// One substitution binding: `key` must be a single-atom expression (a symbol
/// or a full function application); matched atoms are replaced by `value`.
struct Binding1 {
    Expr key;
    Expr value;
};
using SubstMap = std::vector<Binding1>;

/// Simultaneous substitution followed by normalization.
Expr substitute(const Expr& e, const SubstMap& map);
Expr substitute_symbol(const Expr& e, const std::string& name, const Expr& value);

/// Coefficients of the integer powers of `name`; throws NotPolynomial if the
/// symbol occurs inside an atom argument or with a fractional exponent.
std::map<long, Expr> collect_powers(const Expr& e, const std::string& name);
/// Same, collecting in an arbitrary atom (used for the f/g monomial split).
std::map<long, Expr> collect_atom_powers(const Expr& e, const Atom& a);

/// Multiplies away all negative atom powers (the "single quotient" step).
/// The result is zero iff the input is zero as a rational function, assuming
/// nonvanishing denominators.
Expr clear_denominators(const Expr& e);

/// True when a nonzero normal form certifies inequality: no LambertW atoms,
/// no ln of a composite argument, and no opaque application with composite
/// arguments anywhere in e.
bool zero_test_conclusive(const Expr& e);

enum class Verdict { ProvenEqual, ProvenUnequal, ProbableEqual, ProbableUnequal };

struct EqResult {
    Verdict verdict;
    Expr difference;  // cleared difference (zero iff proven equal)
    bool proven() const { return verdict == Verdict::ProvenEqual || verdict == Verdict::ProvenUnequal; }
    bool equal() const { return verdict == Verdict::ProvenEqual || verdict == Verdict::ProbableEqual; }
};

/// Structural equality after clearing denominators, with a randomized numeric
/// probe (32 points) when the nonzero normal form is inconclusive.
EqResult equals(const Expr& a, const Expr& b, unsigned probe_seed = 0x5eed);

/// Shorthand: proven zero after clearing.
bool is_zero_cleared(const Expr& e);

// ---------------------------------------------------------------------------
// Kernel-level numeric evaluation (numcheck builds Bindings on top of this)
// ---------------------------------------------------------------------------

/// Evaluation environment: symbol values plus one callable per function spec
/// name. The callable receives the derivative multiset and evaluated args.
struct EvalEnv {
    std::map<std::string, double> symbols;
    std::map<std::string, std::function<double(const std::vector<int>&, const std::vector<double>&)>> functions;
};

double eval(const Expr& e, const EvalEnv& env);

/// Principal-branch Lambert W by Halley iteration; x >= -1/e.
double lambertw(double x);

}  // namespace nibsym

#endif
