#include <doctest.h>

#include "nibsym/equiv.hpp"
#include "nibsym/liealg.hpp"
#include "nibsym/paperdata.hpp"

using namespace nibsym;

namespace {

StructureTable computed_l10() {
    static StructureTable t = [] {
        LieBasis b = l10_basis();
        return structure_table(b, commutator_table(b), "computed");
    }();
    return t;
}

}  // namespace

TEST_CASE("bracket examples on the L10 basis") {
    LieBasis b = l10_basis();
    Context ctx = Chart::equivalence()->base_context();
    // [X1, X4] = X1
    VectorField r = bracket(b.fields[0], b.fields[3]);
    CHECK(vf_equal(r, b.fields[0]));
    // [X2, X5] = X1
    CHECK(vf_equal(bracket(b.fields[1], b.fields[4]), b.fields[0]));
    // [X8, X9] = X10 - X7 (direct computation; the printed table has X10 - X6)
    VectorField x8x9 = bracket(b.fields[7], b.fields[8]);
    VectorField expect = vf_add(b.fields[9], vf_scale(num(-1), b.fields[6]));
    CHECK(vf_equal(x8x9, expect));
    // [v, v] = 0
    for (const VectorField& v : b.fields) CHECK(bracket(v, v).is_zero());
}

TEST_CASE("L10 commutator table closes, is antisymmetric, satisfies Jacobi") {
    LieBasis b = l10_basis();
    auto table = commutator_table(b);
    for (size_t i = 0; i < 10; ++i)
        for (size_t j = 0; j < 10; ++j) {
            CHECK(table[i][j].closed);
            // antisymmetry at the decomposition level
            for (const auto& [name, c] : table[i][j].combo) {
                auto it = table[j][i].combo.find(name);
                REQUIRE(it != table[j][i].combo.end());
                CHECK(it->second == -c);
            }
        }
    for (size_t i = 0; i < 10; ++i) CHECK(table[i][i].combo.empty());
    // Jacobi on all triples, directly on the fields
    for (size_t i = 0; i < 10; ++i)
        for (size_t j = i + 1; j < 10; ++j)
            for (size_t k = j + 1; k < 10; ++k) {
                VectorField s = bracket(b.fields[i], bracket(b.fields[j], b.fields[k]));
                s = vf_add(s, bracket(b.fields[j], bracket(b.fields[k], b.fields[i])));
                s = vf_add(s, bracket(b.fields[k], bracket(b.fields[i], b.fields[j])));
                CHECK(s.is_zero());
            }
}

TEST_CASE("computed vs printed bracket table") {
    StructureTable computed = computed_l10();
    StructureTable printed = paperdata::load_table3();
    TableDiff d = compare_bracket_tables(computed, printed);
    // the honest count: 82 printed cells coincide with the computed table
    CHECK(d.match_count == 82);
    bool found_x8x9 = false;
    for (const CellDiff& c : d.mismatches())
        if (c.row == 7 && c.col == 8) {
            found_x8x9 = true;
            CHECK(c.computed == "X10 - X7");
            CHECK(c.printed == "X10 - X6");
        }
    CHECK(found_x8x9);
}

TEST_CASE("adjoint series on the computed table") {
    StructureTable t = computed_l10();
    SUBCASE("Ad(exp(s X4)) X1 = e^s X1") {
        AdjointEntry e = adjoint_series(t, 3, 0);
        CHECK(e.closure == AdjointClosure::Exponential);
        CHECK(e.coords[0] == QuasiPoly::monomial(Rational(1), 0, Rational(1)));
        for (size_t k = 1; k < 10; ++k) CHECK(e.coords[k].is_zero());
    }
    SUBCASE("Ad(exp(s X)) X = X") {
        for (size_t i = 0; i < 10; ++i) {
            AdjointEntry e = adjoint_series(t, i, i);
            CHECK(e.coords[i] == QuasiPoly::constant(Rational(1)));
        }
    }
    SUBCASE("Ad(exp(s X9)) X8 = X8 - s (X7 - X10) - s^2 X9 with computed brackets") {
        AdjointEntry e = adjoint_series(t, 8, 7);
        CHECK(e.coords[7] == QuasiPoly::constant(Rational(1)));                    // X8
        CHECK(e.coords[6] == QuasiPoly::monomial(Rational(-1), 1, Rational(0)));   // X7
        CHECK(e.coords[9] == QuasiPoly::monomial(Rational(1), 1, Rational(0)));    // X10
        CHECK(e.coords[8] == QuasiPoly::monomial(Rational(-1), 2, Rational(0)));   // X9
    }
}

TEST_CASE("adjoint series seeded with the published structure constants") {
    StructureTable t = paperdata::load_table3();
    // Ad(exp(s X9)) X8 from the printed brackets:
    // X8 - s(X6 - X10) + (s^2/2)(X4 - X9)
    AdjointEntry e = adjoint_series(t, 8, 7);
    CHECK(e.coords[7] == QuasiPoly::constant(Rational(1)));
    CHECK(e.coords[5] == QuasiPoly::monomial(Rational(-1), 1, Rational(0)));
    CHECK(e.coords[9] == QuasiPoly::monomial(Rational(1), 1, Rational(0)));
    CHECK(e.coords[3] == QuasiPoly::monomial(rat(1, 2), 2, Rational(0)));
    CHECK(e.coords[8] == QuasiPoly::monomial(rat(-1, 2), 2, Rational(0)));
    // and the (X8, X9) cell sums the e^{-s}+s-1 coefficient on X7
    AdjointEntry e2 = adjoint_series(t, 7, 8);
    QuasiPoly x7 = QuasiPoly::monomial(Rational(1), 0, Rational(-1)) + QuasiPoly::monomial(Rational(1), 1, Rational(0)) -
                   QuasiPoly::constant(Rational(1));
    CHECK(e2.coords[6] == x7);
}

TEST_CASE("adjoint entries satisfy identity, derivative and group-law checks") {
    for (const StructureTable& t : {computed_l10(), paperdata::load_table3()}) {
        auto table = adjoint_table(t);
        for (size_t i = 0; i < t.size(); ++i)
            for (size_t j = 0; j < t.size(); ++j) {
                const AdjointEntry& e = table[i][j];
                CHECK(e.closure != AdjointClosure::Truncated);
                // s = 0: identity
                for (size_t k = 0; k < t.size(); ++k)
                    CHECK(e.coords[k].at_zero() == (k == j ? Rational(1) : Rational(0)));
                // d/ds at 0 = -[X_i, X_j]
                for (size_t k = 0; k < t.size(); ++k) {
                    Rational expect(0);
                    auto it = t.cells[i][j].find(t.names[k]);
                    if (it != t.cells[i][j].end()) expect = it->second;
                    CHECK(e.coords[k].deriv().at_zero() == -expect);
                }
            }
        // group law Ad(s) Ad(-s) = id, full matrix product
        for (size_t i = 0; i < t.size(); ++i) {
            for (size_t r = 0; r < t.size(); ++r)
                for (size_t c = 0; c < t.size(); ++c) {
                    QuasiPoly sum;
                    for (size_t k = 0; k < t.size(); ++k)
                        sum = sum + table[i][k].coords[r] * table[i][c].coords[k].negate_s();
                    CHECK(sum == (r == c ? QuasiPoly::constant(Rational(1)) : QuasiPoly()));
                }
        }
    }
}

TEST_CASE("adjoint diff against the printed adjoint table") {
    StructureTable paper = paperdata::load_table3();
    auto computed = adjoint_table(paper);  // paper-seeded: internal consistency audit
    auto printed = paperdata::load_table4(paper);
    TableDiff d = compare_adjoint_tables(paper, computed, printed);
    CHECK(d.match_count + d.s_negation_count >= 80);
    // The (X9, X8) printed cell flips the sign of the whole series tail: the
    // s term matches under s -> -s but the s^2 term does not, so the cell
    // lands in the mismatch class and the report shows both forms.
    bool found = false;
    for (const CellDiff& c : d.cells)
        if (c.row == 8 && c.col == 7 && c.status == CellMatch::Mismatch) found = true;
    CHECK(found);
    // identical inputs give a 100% match
    TableDiff self = compare_adjoint_tables(paper, computed, [&] {
        std::vector<std::vector<std::vector<QuasiPoly>>> copy(paper.size());
        for (size_t i = 0; i < paper.size(); ++i)
            for (size_t j = 0; j < paper.size(); ++j) copy[i].push_back(computed[i][j].coords);
        return copy;
    }());
    CHECK(self.match_count == 100);
}

TEST_CASE("Table 1: IBE pattern cells") {
    LieBasis b = ibe_basis();
    auto printed = paperdata::load_table1();
    PatternDiff d = compare_pattern_table(b, printed, ibe_instantiator());
    CHECK(d.match_count == 12);  // exactly four printed cells are off
    // the (v1, v2) cell matches as printed
    for (const PatternDiffCell& c : d.cells) {
        if (c.row == 0 && c.col == 1) CHECK(c.match);
        if (c.row == 0 && c.col == 3) CHECK_FALSE(c.match);  // F1 vs F1_u slip
        if (c.row == 2 && c.col == 3) CHECK_FALSE(c.match);  // sign slip
    }
}

TEST_CASE("Table 2: equivalence pattern cells") {
    Context ctx;
    ctx.declare_symbols({"t", "x", "u", "f", "g"});
    auto xi = ctx.declare_function("xi", {"t", "x", "u"});
    auto tau = ctx.declare_function("tau", {"x", "u"});
    auto phi = ctx.declare_function("phi", {"x", "u"});
    LieBasis b;
    b.chart = Chart::equivalence();
    b.names = {"Y1", "Y2", "Y3"};
    b.fields = {build_Y(1, ctx.parse("xi(t,x,u)")).field, build_Y(2, ctx.parse("tau(x,u)")).field,
                build_Y(3, ctx.parse("phi(x,u)")).field};
    auto printed = paperdata::load_table2();
    FamilyInstantiator inst = [](const PatternComponent& pc) {
        int kind = pc.family == "Y1" ? 1 : pc.family == "Y2" ? 2 : 3;
        return build_Y(kind, pc.coefficient).field;
    };
    PatternDiff d = compare_pattern_table(b, printed, inst);
    // [Y2,Y3] = Y3[tau phi_x] - Y2[phi tau_u] as printed
    for (const PatternDiffCell& c : d.cells)
        if (c.row == 1 && c.col == 2) CHECK(c.match);
    CHECK(d.match_count >= 7);  // diagonal + the verified off-diagonal cells
}
