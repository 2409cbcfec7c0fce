#ifndef NIBSYM_CLASSIFY_HPP
#define NIBSYM_CLASSIFY_HPP

#include "nibsym/detsys.hpp"
#include "nibsym/equiv.hpp"
#include "nibsym/paperdata.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nibsym::classify {

using paperdata::OptimalEntry;
using paperdata::ReductionScript;
using paperdata::Table5Row;

/// The twenty optimal-system entries (paper-encoded); validated nonzero and
/// inside span{X1..X10}.
std::vector<OptimalEntry> optimal_system(const std::string& data_dir = "");

/// Computed (x,u,f,g)-projection of an optimal-system entry, with parameter
/// conditions substituted. `dropped` records the discarded d_t coefficient.
struct ProjectedOperator {
    std::string entry;
    VectorField field;  // on Chart::xufg()
    std::map<std::string, Expr> dropped;
};
ProjectedOperator project_entry(const OptimalEntry& entry, const SubstMap& conditions = {});

// ---------------------------------------------------------------------------
// Invariants
// ---------------------------------------------------------------------------

/// Pass iff apply(Z, I) normalizes (after clearing) to zero.
bool verify_invariant(const VectorField& Z, const Expr& I);

/// True when the invariant set cannot be solved for f and g as functions of
/// one base invariant: both x and u are themselves invariants. A zero field
/// is degenerate and reports false.
struct NonSolvable {
    bool flag = false;
    bool degenerate = false;
};
NonSolvable non_solvable(const VectorField& Z);

/// Candidate invariants of a projected operator, found by an exact linear
/// ansatz over a library of monomials in x, u, f, g, ln x, ln u, e^{+-x},
/// e^{+-u} with parameter multipliers, then validated with verify_invariant.
std::vector<Expr> invariant_candidates(const VectorField& Z, const std::vector<std::string>& params);

// ---------------------------------------------------------------------------
// Optimal-system reduction replay
// ---------------------------------------------------------------------------

struct ReplayResult {
    std::string script;
    bool pass = false;
    std::map<std::string, Expr> final_combo;
    std::string detail;
};

/// Applies the script's adjoint steps with exact symbolic parameters on the
/// chosen structure table and checks the target (annihilated coefficients or
/// an exact optimal-system entry).
ReplayResult replay_reduction(const ReductionScript& script, const StructureTable& computed_table,
                              const StructureTable& paper_table);

// ---------------------------------------------------------------------------
// Table 5 verification
// ---------------------------------------------------------------------------

struct OperatorVerdict {
    std::string rendered;    // the candidate X^(2)
    int sign = +1;           // pm substitution used
    SymmetryVerdict verdict = SymmetryVerdict::Probable;
    std::string residual;    // rendered residual on failure
    double numeric_max = 0;  // on-shell corroboration for proven rows
};

struct RowReport {
    int n = 0;
    std::string z_name;
    std::string entry;
    std::string conditions;
    // computed projection vs printed Z
    bool z_matches_printed = false;
    std::string z_computed;
    std::string z_printed;
    std::string dropped_dt;
    // invariance of the printed surfaces
    bool lambda_ok = false;
    bool f_form_ok = false;
    bool g_form_ok = false;
    bool numeric_lambda_only = false;  // row 21
    std::vector<std::string> numeric_lambda_notes;
    // symmetry verdicts for the printed operators (per sign where relevant)
    std::vector<OperatorVerdict> verdicts;
    bool printed_row_passes = false;
    // on failure: recomputed data
    std::vector<std::string> recomputed_invariants;
    std::string corrected_f;
    std::string corrected_g;
    std::vector<OperatorVerdict> corrected_verdicts;
    bool corrected_passes = false;
    std::string notes;
};

struct Table5Report {
    std::vector<RowReport> rows;
    int printed_pass_count = 0;
    int corrected_pass_count = 0;
    uint64_t seed = 0;
};

/// Verifies one row (printed forms, then corrections on failure).
RowReport verify_row(const Table5Row& row, const std::string& data_dir = "", uint64_t seed = 20240903);

/// The full 27-row report.
Table5Report table5_report(const std::string& data_dir = "", uint64_t seed = 20240903);

std::string report_to_json(const Table5Report& r);
std::string report_to_markdown(const Table5Report& r);

}  // namespace nibsym::classify

#endif
