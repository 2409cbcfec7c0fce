#ifndef NIBSYM_LIEALG_HPP
#define NIBSYM_LIEALG_HPP

#include "nibsym/chart.hpp"
#include "nibsym/linsolve.hpp"
#include "nibsym/quasipoly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nibsym {

/// Ordered named vector fields on a common chart.
struct LieBasis {
    ChartPtr chart;
    std::vector<std::string> names;
    std::vector<VectorField> fields;

    size_t size() const { return fields.size(); }
    int index_of(const std::string& name) const;
};

/// One commutator-table cell: a rational decomposition over the basis, or a
/// non-closed marker with the residual field. Exactly one of the two states.
struct BracketCell {
    std::map<std::string, Rational> combo;
    bool closed = true;
    VectorField residual;  // nonzero iff !closed

    bool is_zero() const { return closed && combo.empty(); }
    std::string str() const;
};

/// Decomposes `field` over the basis by exact linear solving on coefficient
/// expressions (monomial matching over the union of atoms).
BracketCell decompose(const LieBasis& basis, const VectorField& field);

/// n x n table of bracket decompositions.
std::vector<std::vector<BracketCell>> commutator_table(const LieBasis& basis);

/// Bracket and adjoint machinery work through a structure table: basis names
/// plus rational structure constants.  Source is either a computed
/// commutator table (all cells must close) or a paper-encoded data file.
struct StructureTable {
    std::vector<std::string> names;
    // cells[i][j] = decomposition of [X_i, X_j]
    std::vector<std::vector<std::map<std::string, Rational>>> cells;
    std::string source;  // "computed" | "paper"

    size_t size() const { return names.size(); }
    int index_of(const std::string& name) const;
    /// ad_{X_i} as a matrix: column j holds the coordinates of [X_i, X_j].
    RatMat ad_matrix(size_t i) const;
};

StructureTable structure_table(const LieBasis& basis, const std::vector<std::vector<BracketCell>>& table,
                               const std::string& source);

enum class AdjointClosure { Nilpotent, Exponential, Truncated };

/// Ad(exp(s X_i)) X_j expanded over the basis; every coefficient is a
/// quasi-polynomial in s. Closure records how the Lie series terminated.
struct AdjointEntry {
    std::vector<QuasiPoly> coords;  // one per basis element
    AdjointClosure closure = AdjointClosure::Nilpotent;
    int truncation_order = 0;  // set when closure == Truncated

    QuasiPoly coord(const StructureTable& t, const std::string& name) const;
    std::string str(const StructureTable& t) const;
};

/// Sums the Lie series Ad(exp(s X_i)) X_j = X_j - s [X_i,X_j] + ... exactly,
/// via the minimal linear recurrence of the ad-iterates on the Krylov space.
/// Closes whenever the recurrence's characteristic roots are rational.
AdjointEntry adjoint_series(const StructureTable& t, size_t i, size_t j, int max_order = 24);

/// Full 10x10 (or nxn) adjoint matrix: column j of block i is adjoint_series(i,j).
std::vector<std::vector<AdjointEntry>> adjoint_table(const StructureTable& t);

// ---------------------------------------------------------------------------
// Table diffing
// ---------------------------------------------------------------------------

enum class CellMatch { Match, MatchUnderSNegation, Mismatch };

struct CellDiff {
    size_t row = 0, col = 0;
    CellMatch status = CellMatch::Match;
    std::string computed;
    std::string printed;
};

struct TableDiff {
    std::vector<CellDiff> cells;  // all cells, row-major
    int match_count = 0;
    int s_negation_count = 0;
    int mismatch_count = 0;
    std::vector<CellDiff> mismatches() const;
};

/// Computed vs paper-encoded bracket tables (cells rational combinations).
TableDiff compare_bracket_tables(const StructureTable& computed, const StructureTable& printed);

/// Computed vs paper-encoded adjoint tables; each cell may also match with
/// s -> -s (the published cells mix both sign conventions).
TableDiff compare_adjoint_tables(const StructureTable& names, const std::vector<std::vector<AdjointEntry>>& computed,
                                 const std::vector<std::vector<std::vector<QuasiPoly>>>& printed);

// ---------------------------------------------------------------------------
// Function-coefficient bases (Tables 1 and 2)
// ---------------------------------------------------------------------------

/// A family cell: sum of family instantiations with expression coefficients,
/// e.g. [v1,v2] = v1 with coefficient F1*F2.
struct PatternComponent {
    std::string family;  // "v1".."v4" or "Y1".."Y3"
    Expr coefficient;
};
using PatternCell = std::vector<PatternComponent>;

struct PatternDiffCell {
    size_t row = 0, col = 0;
    bool match = false;
    std::string computed;  // rendered field
    std::string printed;
};

struct PatternDiff {
    std::vector<PatternDiffCell> cells;
    int match_count = 0;
};

/// Instantiator maps one pattern component to a concrete vector field.
using FamilyInstantiator = std::function<VectorField(const PatternComponent&)>;

/// Compares computed brackets of `basis` against printed pattern cells by
/// exact field equality of the instantiated patterns.
PatternDiff compare_pattern_table(const LieBasis& basis, const std::vector<std::vector<PatternCell>>& printed,
                                  const FamilyInstantiator& instantiate);

/// The IBE point-symmetry basis v1..v4 with concrete opaque F1..F4(u), and
/// the instantiator for Table 1 patterns (v^k with an expression coefficient).
LieBasis ibe_basis();
FamilyInstantiator ibe_instantiator();

}  // namespace nibsym

#endif
