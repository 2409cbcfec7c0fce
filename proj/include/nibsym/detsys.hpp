#ifndef NIBSYM_DETSYS_HPP
#define NIBSYM_DETSYS_HPP

#include "nibsym/chart.hpp"
#include "nibsym/expr.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nibsym {

struct IndependenceUnavailable : Error {
    using Error::Error;
};

/// One equation u_t + g(x,u) u_x = f(x,u) of the class. f and g are
/// expressions over (x,u), possibly containing opaque atoms.
struct EquationSpec {
    Expr f;
    Expr g;
    bool f_is_zero = false;
    bool f_nonconstant = true;
    bool g_nonconstant = true;

    /// Generic class member: fully opaque nonconstant f(x,u), g(x,u).
    static EquationSpec generic();
    /// The opaque atoms of the generic spec (shared so splits can match them).
    static Expr generic_f_atom();
    static Expr generic_g_atom();

    Expr lhs() const;  // u_t + g*u_x - f
};

/// One residual with provenance: the coefficient of u_x^k f^i g^j.
struct Residual {
    Expr expr;
    long ux_power = 0;
    long f_power = 0;
    long g_power = 0;
    bool fg_split = false;  // false while only the u_x split has happened
};

struct DeterminingSystem {
    Expr unsplit;  // the on-shell invariance residual before any split
    std::vector<Residual> residuals;
    bool fg_split_done = false;

    /// Distinct nonzero residuals modulo a rational multiple.
    std::vector<Expr> distinct() const;
    /// Sum of provenance-monomial * residual; equals `unsplit` exactly.
    Expr reassemble(const EquationSpec& spec) const;
};

/// v^(1)[u_t + g u_x - f] with u_t -> f - g u_x substituted afterwards.
/// Raises if any second-order jet coordinate survives (prolongation bug).
Expr invariance_residual(const EquationSpec& spec, const VectorField& v);

/// Splits the residual by powers of u_x, then (when the spec's flags justify
/// independence and f, g are opaque atoms) by the f/g monomials.
DeterminingSystem split(const Expr& residual, const EquationSpec& spec);
DeterminingSystem determining_system(const EquationSpec& spec, const VectorField& v);

enum class SymmetryVerdict { ProvenSymmetry, ProvenNot, Probable };

std::string to_string(SymmetryVerdict v);

struct CandidateResult {
    SymmetryVerdict verdict;
    Expr residual;           // normalized on-shell residual
    double numeric_max = 0;  // max |residual| over probe samples when used
};

/// Proven-symmetry iff the residual normalizes (after clearing) to zero;
/// conclusive nonzero forms are proven-not; otherwise a numeric probe decides
/// between proven-not (clearly nonzero) and probable (numerically zero).
CandidateResult verify_candidate(const EquationSpec& spec, const VectorField& v, uint64_t seed = 20240901);

/// Max |residual| over seeded on-shell samples. Free symbols other than the
/// chart variables (classification parameters etc.) are bound to fixed
/// constants drawn from the seed; opaque atoms instantiate as random cubics.
/// Returns NaN when no sample point evaluates.
double onshell_probe(const Expr& residual, const EquationSpec& spec, int n, uint64_t seed);

/// Parametric family of candidate generators (coefficients may contain the
/// opaque F1..F4(u) atoms and the constants c1..c3).
struct GeneratorFamily {
    std::string name;
    VectorField field;
    std::string applicability;  // human-readable condition, e.g. "f = 0, g = g(u)"
    EquationSpec natural_spec;  // the class member the family belongs to
};

/// The corrected IBE generator family (F2 t + F1) d_t + (F4 g_u t + F2 x + F3) d_x + F4 d_u
/// on u_t + g(u) u_x = 0.
GeneratorFamily ibe_family();
/// The projective family (c1 t + F1) d_t + (c3 t + c1 x + c2) d_x + (c3/g_u) d_u, g_u != 0.
GeneratorFamily projective_family();
/// The g(u) = const variant of the projective family.
GeneratorFamily projective_family_const_g();
/// Homogeneous case f = 0, g = g(x,u):
/// (F2 t + F1) d_t + e^{-g} (F2 P + F3) d_x with P the antiderivative of e^g in x.
GeneratorFamily homogeneous_family(bool g_depends_on_u);

struct FamilyResult {
    SymmetryVerdict verdict;
    Expr residual;
    double numeric_max = 0;
    bool numeric_only = false;  // antiderivative atom forced quadrature checking
};

/// Symbolic verification when possible; the homogeneous family with
/// u-dependent g is checked numerically with quadrature for the
/// antiderivative atom.
FamilyResult verify_family(const EquationSpec& spec, const GeneratorFamily& fam, uint64_t seed = 20240902);

/// Polynomial-ansatz solver: substitutes total-degree <= degree polynomials
/// in (t,x,u) for xi, tau, phi, extracts exact linear constraints by
/// monomial matching (every distinct opaque monomial independent), and
/// returns a basis of the solution space. Every returned field passes
/// verify_candidate with proven-symmetry.
std::vector<VectorField> ansatz_solve(const EquationSpec& spec, int degree);

}  // namespace nibsym

#endif
