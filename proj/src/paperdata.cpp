#include "nibsym/paperdata.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>

namespace nibsym::paperdata {

namespace {

using nlohmann::json;

json load_json(const std::string& dir, const std::string& file) {
    std::string path = data_dir(dir) + "/" + file;
    std::ifstream in(path);
    if (!in) throw Error("cannot open paper data file " + path);
    json j;
    in >> j;
    return j;
}

const std::vector<std::string>& greek_params() {
    static std::vector<std::string> p = {"alpha1", "alpha2", "beta1",  "gamma1", "gamma2", "gamma3", "gamma4",
                                         "gamma5", "gamma6", "eta1",   "eta2",   "eta3",   "eta4",   "eta5"};
    return p;
}

Context combo_context() {
    Context ctx;
    for (int i = 1; i <= 10; ++i) ctx.declare_symbol("X" + std::to_string(i));
    for (const auto& p : greek_params()) ctx.declare_symbol(p);
    ctx.declare_symbol("s");
    return ctx;
}

}  // namespace

std::string data_dir(const std::string& override_dir) {
    if (!override_dir.empty()) return override_dir;
    if (const char* env = std::getenv("NIBSYM_PAPER_DATA")) return env;
#ifdef NIBSYM_PAPER_DATA_DIR
    return NIBSYM_PAPER_DATA_DIR;
#else
    return "paper-data";
#endif
}

StructureTable load_table3(const std::string& dir) {
    json j = load_json(dir, "table3_l10.json");
    StructureTable t;
    t.source = "paper";
    t.names = j["basis"].get<std::vector<std::string>>();
    Context ctx = combo_context();
    for (const auto& row : j["cells"]) {
        std::vector<std::map<std::string, Rational>> cells;
        for (const auto& cell : row) {
            Expr e = ctx.parse(cell.get<std::string>());
            std::map<std::string, Rational> combo;
            for (const Term& term : e.terms()) {
                if (term.factors.size() != 1 || term.factors[0].exponent != 1 ||
                    term.factors[0].atom->kind != AtomKind::Symbol)
                    throw Error("bracket cell is not a linear combination: " + cell.get<std::string>());
                combo[term.factors[0].atom->name] = term.coeff;
            }
            cells.push_back(std::move(combo));
        }
        t.cells.push_back(std::move(cells));
    }
    return t;
}

std::vector<std::vector<std::vector<QuasiPoly>>> load_table4(const StructureTable& names, const std::string& dir) {
    json j = load_json(dir, "table4_l10.json");
    Context ctx = combo_context();
    std::vector<std::vector<std::vector<QuasiPoly>>> out;
    for (const auto& row : j["cells"]) {
        std::vector<std::vector<QuasiPoly>> cells;
        for (const auto& cell : row) {
            Expr e = ctx.parse(cell.get<std::string>());
            std::vector<QuasiPoly> coords(names.size());
            for (const Term& term : e.terms()) {
                int which = -1;
                Term rest;
                rest.coeff = term.coeff;
                for (const Factor& f : term.factors) {
                    if (f.atom->kind == AtomKind::Symbol && f.atom->name.size() > 1 && f.atom->name[0] == 'X') {
                        if (which != -1 || f.exponent != 1)
                            throw Error("adjoint cell term is not linear in the basis: " + cell.get<std::string>());
                        which = names.index_of(f.atom->name);
                        continue;
                    }
                    rest.factors.push_back(f);
                }
                if (which < 0) throw Error("adjoint cell term without basis element: " + cell.get<std::string>());
                QuasiPoly q = QuasiPoly::from_expr(Expr(TermList{rest}), "s");
                coords[static_cast<size_t>(which)] = coords[static_cast<size_t>(which)] + q;
            }
            cells.push_back(std::move(coords));
        }
        out.push_back(std::move(cells));
    }
    return out;
}

namespace {

std::vector<std::vector<PatternCell>> load_pattern(const std::string& dir, const std::string& file,
                                                   Context (*make_ctx)()) {
    json j = load_json(dir, file);
    Context ctx = make_ctx();
    std::vector<std::vector<PatternCell>> out;
    for (const auto& row : j["cells"]) {
        std::vector<PatternCell> cells;
        for (const auto& cell : row) {
            PatternCell pc;
            for (const auto& comp : cell)
                pc.push_back(PatternComponent{comp["family"].get<std::string>(),
                                              ctx.parse(comp["coeff"].get<std::string>())});
            cells.push_back(std::move(pc));
        }
        out.push_back(std::move(cells));
    }
    return out;
}

Context table1_context() {
    Context ctx;
    ctx.declare_symbols({"t", "x", "u"});
    for (int k = 1; k <= 4; ++k) ctx.declare_function("F" + std::to_string(k), {"u"});
    ctx.declare_function("g", {"u"});
    return ctx;
}

Context table2_context() {
    Context ctx;
    ctx.declare_symbols({"t", "x", "u", "f", "g"});
    ctx.declare_function("xi", {"t", "x", "u"});
    ctx.declare_function("tau", {"x", "u"});
    ctx.declare_function("phi", {"x", "u"});
    return ctx;
}

}  // namespace

std::vector<std::vector<PatternCell>> load_table1(const std::string& dir) {
    return load_pattern(dir, "table1_ibe.json", table1_context);
}

std::vector<std::vector<PatternCell>> load_table2(const std::string& dir) {
    return load_pattern(dir, "table2_equiv.json", table2_context);
}

std::vector<PrintedZ> load_zlist(const std::string& dir) {
    json j = load_json(dir, "zlist.json");
    Context ctx = Chart::xufg()->base_context();
    for (const auto& p : greek_params()) ctx.declare_symbol(p);
    std::vector<PrintedZ> out;
    for (const auto& entry : j["entries"]) {
        PrintedZ z;
        z.name = entry["name"].get<std::string>();
        z.from = entry["from"].get<std::string>();
        z.field = VectorField{Chart::xufg(), {}};
        for (const auto& [coord, text] : entry["coeffs"].items()) {
            Expr e = ctx.parse(text.get<std::string>());
            if (!e.is_zero()) z.field.coeffs[coord] = e;
        }
        out.push_back(std::move(z));
    }
    return out;
}

std::vector<OptimalEntry> load_optimal_system(const std::string& dir) {
    json j = load_json(dir, "optimal_system.json");
    Context ctx = combo_context();
    std::vector<OptimalEntry> out;
    for (const auto& entry : j["entries"]) {
        OptimalEntry e;
        e.name = entry["name"].get<std::string>();
        for (const auto& [name, text] : entry["combo"].items()) e.combo[name] = ctx.parse(text.get<std::string>());
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Table5Row> load_table5(const std::string& dir) {
    json j = load_json(dir, "table5.json");
    std::vector<Table5Row> out;
    for (const auto& r : j["rows"]) {
        Table5Row row;
        row.n = r["n"].get<int>();
        row.z = r["z"].get<std::string>();
        if (r.contains("conditions"))
            for (const auto& [k, v] : r["conditions"].items()) row.conditions[k] = v.get<std::string>();
        if (r.contains("zero_params")) row.zero_params = r["zero_params"].get<std::vector<std::string>>();
        row.lambda = r["lambda"].get<std::string>();
        row.f_form = r["f"].get<std::string>();
        row.g_form = r["g"].get<std::string>();
        row.substitute_f = r.value("substitute_f", false);
        row.pm = r.value("pm", false);
        for (const auto& op : r["x2"]) {
            std::map<std::string, std::string> coeffs;
            for (const auto& [k, v] : op.items()) coeffs[k] = v.get<std::string>();
            row.x2.push_back(std::move(coeffs));
        }
        if (r.contains("lambda_b"))
            row.lambda_b = std::make_pair(r["lambda_b"]["printed"].get<std::string>(),
                                          r["lambda_b"]["row_params"].get<std::string>());
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<ReductionScript> load_reduction_scripts(const std::string& dir) {
    json j = load_json(dir, "reduction_scripts.json");
    std::vector<ReductionScript> out;
    for (const auto& s : j["scripts"]) {
        ReductionScript sc;
        sc.name = s["name"].get<std::string>();
        sc.table = s["table"].get<std::string>();
        sc.assumptions = s.value("assumptions", "");
        for (const auto& [k, v] : s["start"].items()) sc.start[k] = v.get<std::string>();
        for (const auto& st : s["steps"]) {
            ReductionStep step;
            if (st.contains("scale")) {
                step.is_scale = true;
                step.expr = st["scale"].get<std::string>();
            } else {
                step.op = st["op"].get<std::string>();
                step.expr = st["s"].get<std::string>();
            }
            sc.steps.push_back(std::move(step));
        }
        if (s["target"].contains("annihilate"))
            sc.annihilate = s["target"]["annihilate"].get<std::vector<std::string>>();
        if (s["target"].contains("entry")) {
            sc.target_entry = s["target"]["entry"].get<std::string>();
            for (const auto& [k, v] : s["target"]["combo"].items()) sc.target_combo[k] = v.get<std::string>();
        }
        out.push_back(std::move(sc));
    }
    return out;
}

Context generic_point_context() {
    Context ctx = Chart::point()->base_context();
    ctx.declare_function("f", {"x", "u"});
    ctx.declare_function("g", {"x", "u"});
    ctx.declare_function("xi", {"t", "x", "u"});
    ctx.declare_function("tau", {"t", "x", "u"});
    ctx.declare_function("phi", {"t", "x", "u"});
    return ctx;
}

DeterminingPaper load_determining(const std::string& dir) {
    json j = load_json(dir, "determining_paper.json");
    Context ctx = generic_point_context();
    DeterminingPaper d;
    d.eq6 = ctx.parse(j["eq6"].get<std::string>());
    d.eq7_line1 = ctx.parse(j["eq7_line1"].get<std::string>());
    d.eq7_line2 = ctx.parse(j["eq7_line2"].get<std::string>());
    for (const auto& e : j["eq8"]) d.eq8.push_back(ctx.parse(e.get<std::string>()));
    return d;
}

}  // namespace nibsym::paperdata
