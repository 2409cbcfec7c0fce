// Acceptance suite: one test case per criterion, each printing a single
// pass/fail line. Thresholds are pinned here, not configurable. Criteria
// that the printed tables cannot meet stay red with the computed evidence in
// the failure output; nothing is loosened to force them green.

#include <doctest.h>

#include "nibsym/classify.hpp"
#include "nibsym/detsys.hpp"
#include "nibsym/equiv.hpp"
#include "nibsym/liealg.hpp"
#include "nibsym/numcheck.hpp"
#include "nibsym/paperdata.hpp"

#include <cstdio>

using namespace nibsym;

namespace {

constexpr uint64_t kSeed = 20240901;

void line(int n, bool pass, const std::string& detail) {
    std::printf("[criterion %2d] %s  %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

StructureTable& computed_l10() {
    static StructureTable t = [] {
        LieBasis b = l10_basis();
        return structure_table(b, commutator_table(b), "computed");
    }();
    return t;
}

classify::Table5Report& table5() {
    static classify::Table5Report rep = classify::table5_report("", kSeed);
    return rep;
}

}  // namespace

TEST_CASE("criterion 1: determining system reproduces the printed equations") {
    EquationSpec spec = EquationSpec::generic();
    Context ctx = paperdata::generic_point_context();
    VectorField v{Chart::point(), {}};
    v.coeffs["t"] = ctx.parse("xi(t,x,u)");
    v.coeffs["x"] = ctx.parse("tau(t,x,u)");
    v.coeffs["u"] = ctx.parse("phi(t,x,u)");
    Expr residual = invariance_residual(spec, v);
    DeterminingSystem sys = split(residual, spec);
    paperdata::DeterminingPaper paper = paperdata::load_determining();

    auto by_ux = collect_powers(residual, "u_x");
    bool two_lines = by_ux.size() == 2 && by_ux.count(0) && by_ux.count(1);
    bool reassembly = is_zero_cleared(sub(sys.reassemble(spec), residual));
    bool line1 = two_lines && is_zero_cleared(sub(by_ux[1], paper.eq7_line1));
    bool line2 = two_lines && is_zero_cleared(sub(by_ux[0], paper.eq7_line2));
    std::vector<Expr> eqs = sys.distinct();
    int matched = 0;
    for (const Expr& pe : paper.eq8)
        for (const Expr& ce : eqs)
            if (is_zero_cleared(sub(ce, pe)) || is_zero_cleared(add(ce, pe))) {
                ++matched;
                break;
            }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "u_x split: %s; reassembly: %s; printed line1 %s, line2 %s; %d/8 printed equations reproduced "
                  "(the printed g_x terms differ from the computed system)",
                  two_lines ? "two lines" : "unexpected", reassembly ? "exact" : "broken",
                  line1 ? "matches" : "differs", line2 ? "matches" : "differs", matched);
    bool pass = two_lines && reassembly && line1 && line2 && matched == 8 && eqs.size() == 8;
    line(1, pass, buf);
    CHECK(two_lines);
    CHECK(reassembly);
    CHECK(eqs.size() == 8);
    CHECK_MESSAGE(line1, "computed u_x coefficient: ", render(by_ux[1]));
    CHECK(line2);
    CHECK_MESSAGE(matched == 8, "only ", matched, " of the printed equations are reproduced");
}

TEST_CASE("criterion 2: the principal algebra") {
    EquationSpec spec = EquationSpec::generic();
    VectorField dt{Chart::point(), {}};
    dt.coeffs["t"] = one();
    bool dt_proven = verify_candidate(spec, dt, kSeed).verdict == SymmetryVerdict::ProvenSymmetry;
    auto basis = ansatz_solve(spec, 2);
    bool one_dim = basis.size() == 1;
    bool spans_dt = one_dim && basis[0].coeff("x").is_zero() && basis[0].coeff("u").is_zero() &&
                    basis[0].coeff("t").is_rational();
    char buf[128];
    std::snprintf(buf, sizeof buf, "d_t verdict proven; ansatz degree 2 solution space: %zu-dimensional",
                  basis.size());
    line(2, dt_proven && spans_dt, buf);
    CHECK(dt_proven);
    CHECK(one_dim);
    CHECK(spans_dt);
}

TEST_CASE("criterion 3: commutator table vs the printed one") {
    LieBasis b = l10_basis();
    auto table = commutator_table(b);
    bool all_closed = true, antisym = true;
    for (size_t i = 0; i < 10; ++i)
        for (size_t j = 0; j < 10; ++j) {
            all_closed = all_closed && table[i][j].closed;
            for (const auto& [name, c] : table[i][j].combo) {
                auto it = table[j][i].combo.find(name);
                if (it == table[j][i].combo.end() || it->second != -c) antisym = false;
            }
        }
    bool jacobi = true;
    for (size_t i = 0; i < 10 && jacobi; ++i)
        for (size_t j = i + 1; j < 10 && jacobi; ++j)
            for (size_t k = j + 1; k < 10 && jacobi; ++k) {
                VectorField s = bracket(b.fields[i], bracket(b.fields[j], b.fields[k]));
                s = vf_add(s, bracket(b.fields[j], bracket(b.fields[k], b.fields[i])));
                s = vf_add(s, bracket(b.fields[k], bracket(b.fields[i], b.fields[j])));
                jacobi = s.is_zero();
            }
    TableDiff d = compare_bracket_tables(computed_l10(), paperdata::load_table3());
    bool x8x9_listed = false;
    for (const CellDiff& c : d.mismatches())
        if (c.row == 7 && c.col == 8 && c.computed == "X10 - X7" && c.printed == "X10 - X6") x8x9_listed = true;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "100 brackets computed; antisymmetry %s, Jacobi %s; %d/100 printed cells match (threshold 95); "
                  "(X8,X9) mismatch listed with correction: %s",
                  antisym ? "exact" : "broken", jacobi ? "exact" : "broken", d.match_count,
                  x8x9_listed ? "yes" : "no");
    line(3, all_closed && antisym && jacobi && x8x9_listed && d.match_count >= 95, buf);
    CHECK(all_closed);
    CHECK(antisym);
    CHECK(jacobi);
    CHECK(x8x9_listed);
    CHECK_MESSAGE(d.match_count >= 95,
                  "the printed table disagrees with the computed brackets in ", d.mismatch_count,
                  " cells; every mismatch is in the diff report");
}

TEST_CASE("criterion 4: adjoint table") {
    StructureTable paper = paperdata::load_table3();
    auto adj = adjoint_table(paper);
    bool all_closed = true, identity_ok = true, deriv_ok = true, group_ok = true;
    for (size_t i = 0; i < paper.size(); ++i)
        for (size_t j = 0; j < paper.size(); ++j) {
            const AdjointEntry& e = adj[i][j];
            if (e.closure == AdjointClosure::Truncated) all_closed = false;
            for (size_t k = 0; k < paper.size(); ++k) {
                if (e.coords[k].at_zero() != (k == j ? Rational(1) : Rational(0))) identity_ok = false;
                Rational expect(0);
                auto it = paper.cells[i][j].find(paper.names[k]);
                if (it != paper.cells[i][j].end()) expect = it->second;
                if (e.coords[k].deriv().at_zero() != -expect) deriv_ok = false;
            }
        }
    for (size_t i = 0; i < paper.size() && group_ok; ++i)
        for (size_t r = 0; r < paper.size() && group_ok; ++r)
            for (size_t c = 0; c < paper.size() && group_ok; ++c) {
                QuasiPoly sum;
                for (size_t k = 0; k < paper.size(); ++k)
                    sum = sum + adj[i][k].coords[r] * adj[i][c].coords[k].negate_s();
                group_ok = sum == (r == c ? QuasiPoly::constant(Rational(1)) : QuasiPoly());
            }
    auto printed = paperdata::load_table4(paper);
    TableDiff d = compare_adjoint_tables(paper, adj, printed);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "all 100 entries close; s=0 identity %s, derivative-at-zero %s, group law %s; "
                  "%d match + %d under s-negation (threshold 80), %d mismatch",
                  identity_ok ? "ok" : "broken", deriv_ok ? "ok" : "broken", group_ok ? "ok" : "broken",
                  d.match_count, d.s_negation_count, d.mismatch_count);
    bool pass = all_closed && identity_ok && deriv_ok && group_ok && d.match_count + d.s_negation_count >= 80;
    line(4, pass, buf);
    CHECK(all_closed);
    CHECK(identity_ok);
    CHECK(deriv_ok);
    CHECK(group_ok);
    CHECK(d.match_count + d.s_negation_count >= 80);
}

TEST_CASE("criterion 5: function-coefficient tables") {
    PatternDiff t1 = compare_pattern_table(ibe_basis(), paperdata::load_table1(), ibe_instantiator());

    Context ctx;
    ctx.declare_symbols({"t", "x", "u", "f", "g"});
    ctx.declare_function("xi", {"t", "x", "u"});
    ctx.declare_function("tau", {"x", "u"});
    ctx.declare_function("phi", {"x", "u"});
    LieBasis yb;
    yb.chart = Chart::equivalence();
    yb.names = {"Y1", "Y2", "Y3"};
    yb.fields = {build_Y(1, ctx.parse("xi(t,x,u)")).field, build_Y(2, ctx.parse("tau(x,u)")).field,
                 build_Y(3, ctx.parse("phi(x,u)")).field};
    FamilyInstantiator inst = [](const PatternComponent& pc) {
        int kind = pc.family == "Y1" ? 1 : pc.family == "Y2" ? 2 : 3;
        return build_Y(kind, pc.coefficient).field;
    };
    PatternDiff t2 = compare_pattern_table(yb, paperdata::load_table2(), inst);
    bool y2y3 = false, v1v2 = false;
    for (const PatternDiffCell& c : t2.cells)
        if (c.row == 1 && c.col == 2) y2y3 = c.match;
    for (const PatternDiffCell& c : t1.cells)
        if (c.row == 0 && c.col == 1) v1v2 = c.match;
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "Table 1: %d/16 printed cells match (threshold 12); Table 2: %d/9 match, [Y2,Y3] %s, "
                  "discrepancies logged",
                  t1.match_count, t2.match_count, y2y3 ? "as printed" : "differs");
    line(5, t1.match_count >= 12 && v1v2 && y2y3, buf);
    CHECK(t1.match_count >= 12);
    CHECK(v1v2);
    CHECK(y2y3);
}

TEST_CASE("criterion 6: equivalence machinery") {
    Context ctx;
    ctx.declare_symbols({"t", "x", "u", "f", "g"});
    ctx.declare_function("xi", {"t", "x", "u"});
    ctx.declare_function("tau", {"x", "u"});
    ctx.declare_function("phi", {"x", "u"});

    EquivConditions y1 = equiv_conditions(build_Y(1, ctx.parse("xi(t,x,u)")));
    EquivConditions y2 = equiv_conditions(build_Y(2, ctx.parse("tau(x,u)")));
    EquivConditions y3 = equiv_conditions(build_Y(3, ctx.parse("phi(x,u)")));
    bool l10_ok = true;
    for (const VectorField& f : l10_basis().fields) l10_ok = l10_ok && equiv_conditions(EquivField{f}).all_zero();

    // the t-independence facts from the generic field
    EquivConditions generic = equiv_conditions(generic_equiv_field());
    Context gctx = Chart::equivalence()->base_context();
    gctx.declare_function("xi", {"t", "x", "u"});
    gctx.declare_function("tau", {"t", "x", "u"});
    gctx.declare_function("phi", {"t", "x", "u"});
    gctx.declare_function("chi", {"t", "x", "u", "f", "g"});
    gctx.declare_function("eta", {"t", "x", "u", "f", "g"});
    int facts = 0;
    for (const char* want : {"tau_t", "phi_t", "chi_t", "eta_t"}) {
        Expr e = gctx.parse(want);
        for (const Expr& got : generic.t_split)
            if (is_zero_cleared(sub(got, e)) || is_zero_cleared(add(got, e))) {
                ++facts;
                break;
            }
    }
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Y2 %s, Y3 %s, all ten basis fields %s; t-independence facts reproduced %d/4; Y1 with unrestricted "
                  "xi(t,x,u) leaves the f_t/g_t conditions nonzero (xi_t must be constant)",
                  y2.all_zero() ? "zero" : "nonzero", y3.all_zero() ? "zero" : "nonzero",
                  l10_ok ? "zero" : "nonzero", facts);
    bool pass = y1.all_zero() && y2.all_zero() && y3.all_zero() && l10_ok && facts == 4;
    line(6, pass, buf);
    CHECK(y2.all_zero());
    CHECK(y3.all_zero());
    CHECK(l10_ok);
    CHECK(facts == 4);
    // equation-part residuals vanish even for the unrestricted coefficient
    CHECK(is_zero_cleared(y1.ux_coefficient));
    CHECK(is_zero_cleared(y1.constant_part));
    CHECK_MESSAGE(y1.all_zero(),
                  "the printed general solution admits xi(t,x,u) with nonconstant xi_t, which violates the "
                  "f_t = g_t = 0 invariance conditions");
}

TEST_CASE("criterion 7: optimal system and reduction replays") {
    auto entries = classify::optimal_system();
    bool twenty = entries.size() == 20;
    LieBasis b = l10_basis();
    StructureTable paper = paperdata::load_table3();
    int passed = 0;
    std::string failing;
    auto scripts = paperdata::load_reduction_scripts();
    for (const auto& script : scripts) {
        classify::ReplayResult r = classify::replay_reduction(script, computed_l10(), paper);
        if (r.pass)
            ++passed;
        else
            failing += script.name + " ";
    }
    char buf[192];
    std::snprintf(buf, sizeof buf, "%zu entries loaded; %d/%zu reduction replays reach their targets %s%s",
                  entries.size(), passed, scripts.size(), failing.empty() ? "" : "failing: ", failing.c_str());
    line(7, twenty && passed == static_cast<int>(scripts.size()), buf);
    CHECK(twenty);
    CHECK(passed == static_cast<int>(scripts.size()));
}

TEST_CASE("criterion 8: worked invariants and solvability flags") {
    Context ctx = Chart::xufg()->base_context();
    ctx.declare_symbol("gamma3");
    auto zf = [&](std::map<std::string, std::string> coeffs) {
        VectorField v{Chart::xufg(), {}};
        for (auto& [c, text] : coeffs) v.coeffs[c] = ctx.parse(text);
        return v;
    };
    VectorField z5 = zf({{"f", "f^2"}, {"g", "f*g"}});
    bool z5_ok = classify::verify_invariant(z5, ctx.parse("x")) && classify::verify_invariant(z5, ctx.parse("u")) &&
                 classify::verify_invariant(z5, ctx.parse("f/g"));
    VectorField z14 = zf({{"x", "x"}, {"f", "-gamma3*f^2"}, {"g", "(1-gamma3*f)*g"}});
    bool z14_i1 = classify::verify_invariant(z14, ctx.parse("u"));
    bool z14_i2 = classify::verify_invariant(z14, ctx.parse("f - 1/(gamma3*ln(x))"));
    bool z14_i3 = classify::verify_invariant(z14, ctx.parse("g*exp((gamma3*f-1)*ln(x))"));
    VectorField z14z = zf({{"x", "x"}, {"g", "g"}});
    bool z14_zero = classify::verify_invariant(z14z, ctx.parse("u")) &&
                    classify::verify_invariant(z14z, ctx.parse("f")) &&
                    classify::verify_invariant(z14z, ctx.parse("g/x"));
    bool flags = classify::non_solvable(zf({{"f", "f"}, {"g", "g"}})).flag &&
                 classify::non_solvable(zf({{"f", "g*f"}, {"g", "g^2"}})).flag &&
                 classify::non_solvable(zf({{"f", "f^2"}, {"g", "f*g"}})).flag &&
                 !classify::non_solvable(zf({{"x", "1"}})).flag;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "Z5 triple %s; Z14(gamma3=0) forms %s; Z14(gamma3!=0) printed I2 %s, I3 %s (computed first "
                  "integrals 1/(gamma3*f)-ln(x) and g/(f*x) do verify); non-solvability flags %s",
                  z5_ok ? "pass" : "fail", z14_zero ? "pass" : "fail", z14_i2 ? "pass" : "fail",
                  z14_i3 ? "pass" : "fail", flags ? "correct" : "wrong");
    line(8, z5_ok && z14_i1 && z14_i2 && z14_i3 && z14_zero && flags, buf);
    CHECK(z5_ok);
    CHECK(z14_i1);
    CHECK(z14_zero);
    CHECK(flags);
    CHECK(classify::verify_invariant(z14, ctx.parse("1/(gamma3*f) - ln(x)")));
    CHECK(classify::verify_invariant(z14, ctx.parse("g/(f*x)")));
    CHECK_MESSAGE(z14_i2, "the printed invariant f - 1/(gamma3 ln x) is not annihilated by Z14");
    CHECK_MESSAGE(z14_i3, "the printed invariant g/x^(1-gamma3 f) is not annihilated by Z14");
}

TEST_CASE("criterion 9: the 27-row classification report") {
    classify::Table5Report& rep = table5();
    bool count = rep.rows.size() == 27;
    bool pinned = true;
    for (int n : {1, 2, 3, 13}) pinned = pinned && rep.rows[static_cast<size_t>(n - 1)].printed_row_passes;
    bool failing_documented = true;
    for (const classify::RowReport& r : rep.rows) {
        if (r.printed_row_passes || r.numeric_lambda_only) continue;
        bool has_residual = false;
        for (const classify::OperatorVerdict& v : r.verdicts)
            if (!v.residual.empty()) has_residual = true;
        bool documented = (has_residual || !r.lambda_ok || !r.f_form_ok || !r.g_form_ok) &&
                          !r.recomputed_invariants.empty();
        failing_documented = failing_documented && documented;
    }
    const classify::RowReport& r23 = rep.rows[22];
    bool row23 = r23.corrected_passes && r23.corrected_g == "u^(-1)*Psi(x)" && r23.corrected_f == "Phi(x)";
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%zu rows; rows 1,2,3,13 printed verdicts proven (%s); failing rows carry residuals and "
                  "recomputed invariants (%s); row 23 corrected to g = Psi(x)/u and passes (%s); %d rows pass "
                  "as printed, %d corrected",
                  rep.rows.size(), pinned ? "yes" : "no", failing_documented ? "yes" : "no",
                  row23 ? "yes" : "no", rep.printed_pass_count, rep.corrected_pass_count);
    line(9, count && pinned && failing_documented && row23, buf);
    CHECK(count);
    CHECK(pinned);
    CHECK(failing_documented);
    CHECK(row23);
}

TEST_CASE("criterion 10: numeric corroboration and determinism") {
    // every proven verdict in the classification report is corroborated
    classify::Table5Report& rep = table5();
    double worst = 0;
    int corroborated = 0;
    for (const classify::RowReport& r : rep.rows)
        for (const classify::OperatorVerdict& v : r.verdicts)
            if (v.verdict == SymmetryVerdict::ProvenSymmetry) {
                worst = std::max(worst, v.numeric_max);
                ++corroborated;
            }
    for (const classify::RowReport& r : rep.rows)
        for (const classify::OperatorVerdict& v : r.corrected_verdicts)
            if (v.verdict == SymmetryVerdict::ProvenSymmetry) {
                worst = std::max(worst, v.numeric_max);
                ++corroborated;
            }
    // the principal generator (criterion 2)
    EquationSpec spec = EquationSpec::generic();
    VectorField dt{Chart::point(), {}};
    dt.coeffs["t"] = one();
    double principal = max_onshell_residual(invariance_residual(spec, dt), OnshellSpec{spec.f, spec.g}, 100, kSeed);
    worst = std::max(worst, principal);

    // derivative corpus against finite differences
    Context ctx = paperdata::generic_point_context();
    std::vector<Expr> corpus = {ctx.parse("f*g"), ctx.parse("f/g"), ctx.parse("x^2*u + exp(u)"),
                                ctx.parse("g_x*f_u + g^2"), ctx.parse("ln(x)*f"), ctx.parse("f^2*g - x*u")};
    Rng rng(kSeed);
    double worst_fd = 0;
    for (const Expr& e : corpus)
        for (const char* v : {"x", "u"})
            for (int trial = 0; trial < 20; ++trial) {
                Binding b;
                b.set("t", rng.uniform(0.3, 1.7));
                b.set("x", rng.uniform(0.3, 1.7));
                b.set("u", rng.uniform(0.3, 1.7));
                b.instantiate_opaque(e, rng);
                try {
                    worst_fd = std::max(worst_fd, fd_check(e, v, b));
                } catch (const EvalError&) {
                }
            }

    // identical seeds give byte-identical reports
    classify::Table5Report again = classify::table5_report("", kSeed);
    bool deterministic = classify::report_to_json(rep) == classify::report_to_json(again);

    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%d proven verdicts corroborated, max on-shell residual %.2e (tol 1e-9); fd corpus worst "
                  "%.2e (tol 1e-6); reports byte-identical under the seed: %s",
                  corroborated + 1, worst, worst_fd, deterministic ? "yes" : "no");
    bool pass = worst < 1e-9 && worst_fd < 1e-6 && deterministic;
    line(10, pass, buf);
    CHECK(worst < 1e-9);
    CHECK(worst_fd < 1e-6);
    CHECK(deterministic);
}
