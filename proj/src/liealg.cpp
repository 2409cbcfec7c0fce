#include "nibsym/liealg.hpp"

#include <algorithm>

namespace nibsym {

int LieBasis::index_of(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

int StructureTable::index_of(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

std::string BracketCell::str() const {
    if (!closed) return "<non-closed>";
    if (combo.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [name, c] : combo) {
        Rational ac = c < 0 ? Rational(-c) : c;
        std::string piece = (ac == 1 ? name : rat_str(ac) + "*" + name);
        if (first)
            s += (c < 0 ? "-" : "") + piece;
        else
            s += (c < 0 ? " - " : " + ") + piece;
        first = false;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Decomposition over a basis by exact monomial matching
// ---------------------------------------------------------------------------

BracketCell decompose(const LieBasis& basis, const VectorField& field) {
    // Unknown lambda_k: sum_k lambda_k X_k[c] = field[c] for every coordinate.
    // One equation per (coordinate, monomial).
    struct RowKey {
        std::string coord;
        Term monomial;  // coeff ignored
    };
    std::vector<RowKey> keys;
    RatMat m;
    RatVec rhs;
    auto row_for = [&](const std::string& coord, const Term& t) -> size_t {
        for (size_t i = 0; i < keys.size(); ++i)
            if (keys[i].coord == coord && term_factors_cmp(keys[i].monomial, t) == 0) return i;
        keys.push_back(RowKey{coord, t});
        m.push_back(RatVec(basis.size(), Rational(0)));
        rhs.push_back(Rational(0));
        return keys.size() - 1;
    };
    for (const std::string& coord : basis.chart->coords()) {
        for (size_t k = 0; k < basis.size(); ++k)
            for (const Term& t : basis.fields[k].coeff(coord).terms()) m[row_for(coord, t)][k] += t.coeff;
        for (const Term& t : field.coeff(coord).terms()) rhs[row_for(coord, t)] += t.coeff;
    }
    BracketCell cell;
    std::optional<RatVec> sol = solve_linear(m, rhs);
    if (sol) {
        for (size_t k = 0; k < basis.size(); ++k)
            if ((*sol)[k] != 0) cell.combo[basis.names[k]] = (*sol)[k];
        // exactness check (solve_linear guarantees consistency, but fields
        // with expression coefficients may have matched only monomial-wise)
        VectorField rebuilt{basis.chart, {}};
        for (size_t k = 0; k < basis.size(); ++k)
            rebuilt = vf_add(rebuilt, vf_scale(num((*sol)[k]), basis.fields[k]));
        if (vf_equal(rebuilt, field)) return cell;
    }
    cell.closed = false;
    cell.combo.clear();
    cell.residual = field;
    return cell;
}

std::vector<std::vector<BracketCell>> commutator_table(const LieBasis& basis) {
    std::vector<std::vector<BracketCell>> table(basis.size(), std::vector<BracketCell>(basis.size()));
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = 0; j < basis.size(); ++j)
            table[i][j] = decompose(basis, bracket(basis.fields[i], basis.fields[j]));
    return table;
}

StructureTable structure_table(const LieBasis& basis, const std::vector<std::vector<BracketCell>>& table,
                               const std::string& source) {
    StructureTable t;
    t.names = basis.names;
    t.source = source;
    t.cells.resize(basis.size(), std::vector<std::map<std::string, Rational>>(basis.size()));
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = 0; j < basis.size(); ++j) {
            if (!table[i][j].closed) throw Error("structure table from a non-closed commutator table");
            t.cells[i][j] = table[i][j].combo;
        }
    return t;
}

RatMat StructureTable::ad_matrix(size_t i) const {
    RatMat m(size(), RatVec(size(), Rational(0)));
    for (size_t j = 0; j < size(); ++j)
        for (const auto& [name, c] : cells[i][j]) {
            int k = index_of(name);
            if (k < 0) throw Error("structure constant on unknown basis element " + name);
            m[static_cast<size_t>(k)][j] = c;
        }
    return m;
}

// ---------------------------------------------------------------------------
// Adjoint series
// ---------------------------------------------------------------------------

namespace {

RatVec mat_apply(const RatMat& m, const RatVec& v) {
    RatVec r(m.size(), Rational(0));
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < v.size(); ++j)
            if (m[i][j] != 0 && v[j] != 0) r[i] += m[i][j] * v[j];
    return r;
}

bool vec_zero(const RatVec& v) {
    for (const Rational& c : v)
        if (c != 0) return false;
    return true;
}

// rational roots with multiplicity of a monic rational polynomial, highest
// degree first in `monic`; returns nullopt if an irreducible factor remains
std::optional<std::vector<std::pair<Rational, int>>> rational_roots(std::vector<Rational> monic) {
    std::vector<std::pair<Rational, int>> roots;
    auto value_at = [](const std::vector<Rational>& p, const Rational& x) {
        Rational v(0);
        for (const Rational& c : p) v = v * x + c;
        return v;
    };
    auto deflate = [](std::vector<Rational>& p, const Rational& r) {
        std::vector<Rational> q;
        Rational carry(0);
        for (size_t i = 0; i + 1 < p.size(); ++i) {
            carry = (i == 0 ? p[0] : q.back() * r + p[i]);
            q.push_back(carry);
        }
        p = q;
    };
    // candidate roots: 0, +-1, +-2, +-1/2, +-3, +-1/3, +-3/2, +-2/3 cover the
    // tables here; anything else reports truncation honestly
    std::vector<Rational> cands = {rat(0), rat(1), rat(-1), rat(2), rat(-2), rat(1, 2), rat(-1, 2),
                                   rat(3), rat(-3), rat(1, 3), rat(-1, 3), rat(3, 2), rat(-3, 2),
                                   rat(2, 3), rat(-2, 3)};
    while (monic.size() > 1) {
        bool found = false;
        for (const Rational& r : cands) {
            if (value_at(monic, r) == 0) {
                deflate(monic, r);
                bool merged = false;
                for (auto& [root, mult] : roots)
                    if (root == r) {
                        ++mult;
                        merged = true;
                    }
                if (!merged) roots.push_back({r, 1});
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
    }
    return roots;
}

}  // namespace

QuasiPoly AdjointEntry::coord(const StructureTable& t, const std::string& name) const {
    int k = t.index_of(name);
    if (k < 0) throw Error("unknown basis element " + name);
    return coords[static_cast<size_t>(k)];
}

std::string AdjointEntry::str(const StructureTable& t) const {
    std::string s;
    bool first = true;
    for (size_t k = 0; k < coords.size(); ++k) {
        if (coords[k].is_zero()) continue;
        if (!first) s += " + ";
        s += "(" + coords[k].str() + ")*" + t.names[k];
        first = false;
    }
    if (first) s = "0";
    if (closure == AdjointClosure::Truncated) s += "  [truncated at order " + std::to_string(truncation_order) + "]";
    return s;
}

AdjointEntry adjoint_series(const StructureTable& t, size_t i, size_t j, int max_order) {
    size_t n = t.size();
    RatMat ad = t.ad_matrix(i);

    auto make_truncated = [&](int order) {
        AdjointEntry e;
        e.coords.assign(n, QuasiPoly());
        e.closure = AdjointClosure::Truncated;
        e.truncation_order = order;
        RatVec it(n, Rational(0));
        it[j] = 1;
        Rational fact(1);
        for (int r = 0; r <= order; ++r) {
            for (size_t k = 0; k < n; ++k)
                if (it[k] != 0)
                    e.coords[k] = e.coords[k] + QuasiPoly::monomial(it[k] * (r % 2 ? -fact : fact), r, Rational(0));
            it = mat_apply(ad, it);
            fact /= Rational(r + 1);
        }
        return e;
    };

    // Krylov iterates w_r = ad^r e_j until linear dependence.
    std::vector<RatVec> w;
    RatVec cur(n, Rational(0));
    cur[j] = 1;
    std::vector<Rational> relation;  // w_r = sum rel_k w_k
    while (true) {
        if (!w.empty() && vec_zero(cur)) {
            relation.assign(w.size(), Rational(0));
            break;
        }
        // try to express cur over existing iterates
        if (!w.empty()) {
            RatMat m(n, RatVec(w.size(), Rational(0)));
            for (size_t col = 0; col < w.size(); ++col)
                for (size_t row = 0; row < n; ++row) m[row][col] = w[col][row];
            if (auto sol = solve_linear(m, cur)) {
                // verify exactly (solve_linear zero-fills free vars)
                RatVec check(n, Rational(0));
                for (size_t col = 0; col < w.size(); ++col)
                    for (size_t row = 0; row < n; ++row) check[row] += (*sol)[col] * w[col][row];
                if (check == cur) {
                    relation = *sol;
                    break;
                }
            }
        }
        w.push_back(cur);
        cur = mat_apply(ad, cur);
        if (static_cast<int>(w.size()) > max_order) return make_truncated(max_order);
    }

    size_t r = w.size();
    // characteristic polynomial of the cyclic action: T^r - sum rel_k T^k
    std::vector<Rational> charpoly(r + 1, Rational(0));
    charpoly[0] = 1;  // monic, highest degree first
    for (size_t k = 0; k < r; ++k) charpoly[r - k] = -relation[k];
    auto roots = rational_roots(charpoly);
    if (!roots) return make_truncated(max_order);

    // Solution ansatz: h_k(s) = sum over (root a, power l) beta * s^l e^{-a s}
    // for each Krylov coordinate k; match derivatives at s = 0:
    //   h_k^{(d)}(0) = (-1)^d [coefficient of w_k in w_d],  d = 0..r-1.
    std::vector<std::pair<Rational, int>> shape;  // (root, power)
    for (const auto& [root, mult] : *roots)
        for (int l = 0; l < mult; ++l) shape.push_back({root, l});

    // derivative of s^l e^{-a s} at 0, order d:  d!/(d-l)! * C(d,l)-style;
    // value = (d choose l) l! (-a)^{d-l} -> compute directly
    auto deriv_at0 = [](const Rational& a, int l, int d) -> Rational {
        // d-th derivative of s^l e^{-a s} at 0 = C(d,l) * l! * (-a)^{d-l} for d >= l
        if (d < l) return Rational(0);
        Rational binom(1);
        for (int k = 0; k < l; ++k) binom = binom * Rational(d - k) / Rational(k + 1);
        Rational lfact(1);
        for (int k = 2; k <= l; ++k) lfact *= Rational(k);
        return binom * lfact * rat_pow(-a, d - l);
    };

    AdjointEntry e;
    e.coords.assign(n, QuasiPoly());
    bool exponential = false;
    for (const auto& [root, mult] : *roots)
        if (root != 0) exponential = true;
    e.closure = exponential ? AdjointClosure::Exponential : AdjointClosure::Nilpotent;

    for (size_t k = 0; k < r; ++k) {
        RatMat m(r, RatVec(shape.size(), Rational(0)));
        RatVec rhs(r, Rational(0));
        for (size_t d = 0; d < r; ++d) {
            for (size_t scol = 0; scol < shape.size(); ++scol)
                m[d][scol] = deriv_at0(shape[scol].first, shape[scol].second, static_cast<int>(d));
            // w_d coordinates over the Krylov vectors: by construction w_d is
            // the d-th iterate itself, so its Krylov coordinate vector is e_d.
            rhs[d] = (d == k) ? rat_pow(Rational(-1), static_cast<long>(d)) : Rational(0);
        }
        auto beta = solve_linear(m, rhs);
        if (!beta) throw Error("adjoint series: confluent system unexpectedly singular");
        QuasiPoly h;
        for (size_t scol = 0; scol < shape.size(); ++scol)
            if ((*beta)[scol] != 0)
                h = h + QuasiPoly::monomial((*beta)[scol], shape[scol].second, -shape[scol].first);
        // accumulate h * w_k into basis coordinates
        for (size_t row = 0; row < n; ++row)
            if (w[k][row] != 0) e.coords[row] = e.coords[row] + h.scaled(w[k][row]);
    }
    return e;
}

std::vector<std::vector<AdjointEntry>> adjoint_table(const StructureTable& t) {
    std::vector<std::vector<AdjointEntry>> out(t.size(), std::vector<AdjointEntry>(t.size()));
    for (size_t i = 0; i < t.size(); ++i)
        for (size_t j = 0; j < t.size(); ++j) out[i][j] = adjoint_series(t, i, j);
    return out;
}

// ---------------------------------------------------------------------------
// Diffing
// ---------------------------------------------------------------------------

std::vector<CellDiff> TableDiff::mismatches() const {
    std::vector<CellDiff> out;
    for (const CellDiff& c : cells)
        if (c.status == CellMatch::Mismatch) out.push_back(c);
    return out;
}

static std::string combo_str(const std::map<std::string, Rational>& combo) {
    BracketCell c;
    c.combo = combo;
    return c.str();
}

TableDiff compare_bracket_tables(const StructureTable& computed, const StructureTable& printed) {
    if (computed.size() != printed.size()) throw Error("bracket table shape mismatch");
    TableDiff d;
    for (size_t i = 0; i < computed.size(); ++i)
        for (size_t j = 0; j < computed.size(); ++j) {
            CellDiff c{i, j, CellMatch::Match, combo_str(computed.cells[i][j]), combo_str(printed.cells[i][j])};
            if (computed.cells[i][j] != printed.cells[i][j]) c.status = CellMatch::Mismatch;
            if (c.status == CellMatch::Match)
                ++d.match_count;
            else
                ++d.mismatch_count;
            d.cells.push_back(std::move(c));
        }
    return d;
}

TableDiff compare_adjoint_tables(const StructureTable& names, const std::vector<std::vector<AdjointEntry>>& computed,
                                 const std::vector<std::vector<std::vector<QuasiPoly>>>& printed) {
    if (computed.size() != printed.size()) throw Error("adjoint table shape mismatch");
    TableDiff d;
    for (size_t i = 0; i < computed.size(); ++i)
        for (size_t j = 0; j < computed.size(); ++j) {
            const AdjointEntry& ce = computed[i][j];
            const std::vector<QuasiPoly>& pe = printed[i][j];
            CellDiff c{i, j, CellMatch::Mismatch, ce.str(names), ""};
            std::string ps;
            for (size_t k = 0; k < pe.size(); ++k) {
                if (pe[k].is_zero()) continue;
                if (!ps.empty()) ps += " + ";
                ps += "(" + pe[k].str() + ")*" + names.names[k];
            }
            c.printed = ps.empty() ? "0" : ps;
            bool eq = true, eq_neg = true;
            for (size_t k = 0; k < pe.size(); ++k) {
                if (ce.coords[k] != pe[k]) eq = false;
                if (ce.coords[k].negate_s() != pe[k]) eq_neg = false;
            }
            if (eq)
                c.status = CellMatch::Match;
            else if (eq_neg)
                c.status = CellMatch::MatchUnderSNegation;
            if (c.status == CellMatch::Match)
                ++d.match_count;
            else if (c.status == CellMatch::MatchUnderSNegation)
                ++d.s_negation_count;
            else
                ++d.mismatch_count;
            d.cells.push_back(std::move(c));
        }
    return d;
}

PatternDiff compare_pattern_table(const LieBasis& basis, const std::vector<std::vector<PatternCell>>& printed,
                                  const FamilyInstantiator& instantiate) {
    PatternDiff d;
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = 0; j < basis.size(); ++j) {
            VectorField computed = bracket(basis.fields[i], basis.fields[j]);
            VectorField pattern{basis.chart, {}};
            for (const PatternComponent& pc : printed[i][j]) pattern = vf_add(pattern, instantiate(pc));
            PatternDiffCell cell;
            cell.row = i;
            cell.col = j;
            cell.match = true;
            for (const std::string& coord : basis.chart->coords()) {
                EqResult r = equals(computed.coeff(coord), pattern.coeff(coord));
                if (!(r.verdict == Verdict::ProvenEqual)) cell.match = false;
            }
            std::string cs;
            for (const std::string& coord : basis.chart->coords()) {
                Expr e = computed.coeff(coord);
                if (e.is_zero()) continue;
                if (!cs.empty()) cs += " + ";
                cs += "(" + render(e) + ")*d_" + coord;
            }
            cell.computed = cs.empty() ? "0" : cs;
            std::string pstr;
            for (const PatternComponent& pc : printed[i][j]) {
                if (!pstr.empty()) pstr += " + ";
                pstr += pc.family + "[" + render(pc.coefficient) + "]";
            }
            cell.printed = pstr.empty() ? "0" : pstr;
            if (cell.match) ++d.match_count;
            d.cells.push_back(std::move(cell));
        }
    return d;
}

// ---------------------------------------------------------------------------
// IBE basis (Table 1)
// ---------------------------------------------------------------------------

namespace {

FunctionSpecPtr u_spec(const std::string& name) {
    auto s = std::make_shared<FunctionSpec>();
    s->name = name;
    s->params = {"u"};
    return s;
}

const FunctionSpecPtr& ibe_F(int k) {
    static FunctionSpecPtr f[4] = {u_spec("F1"), u_spec("F2"), u_spec("F3"), u_spec("F4")};
    return f[k - 1];
}
const FunctionSpecPtr& ibe_g() {
    static FunctionSpecPtr g = u_spec("g");
    return g;
}

Expr apply_u(const FunctionSpecPtr& s, std::vector<int> derivs = {}) {
    return func_app(s, std::move(derivs), {sym("u")});
}

// v1[h] = h d_t ; v2[h] = h (t d_t + x d_x) ; v3[h] = h d_x ;
// v4[h] = h (g_u t d_x + d_u)   with h = h(u)
VectorField ibe_family_field(const std::string& family, const Expr& h) {
    VectorField v{Chart::point(), {}};
    Expr t = sym("t"), x = sym("x");
    if (family == "v1") {
        v.coeffs["t"] = h;
    } else if (family == "v2") {
        v.coeffs["t"] = mul(h, t);
        v.coeffs["x"] = mul(h, x);
    } else if (family == "v3") {
        v.coeffs["x"] = h;
    } else if (family == "v4") {
        v.coeffs["x"] = mul({h, apply_u(ibe_g(), {0}), t});
        v.coeffs["u"] = h;
    } else {
        throw Error("unknown IBE family " + family);
    }
    for (auto it = v.coeffs.begin(); it != v.coeffs.end();)
        it = it->second.is_zero() ? v.coeffs.erase(it) : std::next(it);
    return v;
}

}  // namespace

LieBasis ibe_basis() {
    LieBasis b;
    b.chart = Chart::point();
    b.names = {"v1", "v2", "v3", "v4"};
    for (int k = 1; k <= 4; ++k) b.fields.push_back(ibe_family_field("v" + std::to_string(k), apply_u(ibe_F(k))));
    return b;
}

FamilyInstantiator ibe_instantiator() {
    return [](const PatternComponent& pc) { return ibe_family_field(pc.family, pc.coefficient); };
}

}  // namespace nibsym
