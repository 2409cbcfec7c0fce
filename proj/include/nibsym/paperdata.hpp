#ifndef NIBSYM_PAPERDATA_HPP
#define NIBSYM_PAPERDATA_HPP

#include "nibsym/equiv.hpp"
#include "nibsym/liealg.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nibsym::paperdata {

/// Directory holding the paper-encoded JSON tables; resolution order:
/// explicit argument, NIBSYM_PAPER_DATA environment variable, compiled-in
/// source path, ./paper-data.
std::string data_dir(const std::string& override_dir = "");

StructureTable load_table3(const std::string& dir = "");

/// Printed adjoint cells as per-basis-element quasi-polynomials.
std::vector<std::vector<std::vector<QuasiPoly>>> load_table4(const StructureTable& names,
                                                             const std::string& dir = "");

std::vector<std::vector<PatternCell>> load_table1(const std::string& dir = "");
std::vector<std::vector<PatternCell>> load_table2(const std::string& dir = "");

/// Printed Z-projections on the chart (x,u,f,g).
struct PrintedZ {
    std::string name;
    std::string from;  // source optimal-system entry
    VectorField field;
};
std::vector<PrintedZ> load_zlist(const std::string& dir = "");

struct OptimalEntry {
    std::string name;
    std::map<std::string, Expr> combo;  // X-name -> parameter coefficient
};
std::vector<OptimalEntry> load_optimal_system(const std::string& dir = "");

struct Table5Row {
    int n = 0;
    std::string z;
    std::map<std::string, std::string> conditions;  // param -> "zero"|"nonzero"
    std::vector<std::string> zero_params;
    std::string lambda;
    std::string f_form;
    std::string g_form;
    bool substitute_f = false;
    bool pm = false;
    std::vector<std::map<std::string, std::string>> x2;
    std::optional<std::pair<std::string, std::string>> lambda_b;  // printed / row-param reading
};
std::vector<Table5Row> load_table5(const std::string& dir = "");

struct ReductionStep {
    bool is_scale = false;
    std::string op;  // basis name for adjoint steps
    std::string expr;  // s parameter or scale factor
};

struct ReductionScript {
    std::string name;
    std::string table;  // "paper" | "computed"
    std::string assumptions;
    std::map<std::string, std::string> start;
    std::vector<ReductionStep> steps;
    std::vector<std::string> annihilate;               // target kind 1
    std::optional<std::string> target_entry;           // target kind 2
    std::map<std::string, std::string> target_combo;
};
std::vector<ReductionScript> load_reduction_scripts(const std::string& dir = "");

struct DeterminingPaper {
    Expr eq6;
    Expr eq7_line1;
    Expr eq7_line2;
    std::vector<Expr> eq8;
};
DeterminingPaper load_determining(const std::string& dir = "");

/// Parser context for the generic determining machinery (xi/tau/phi/f/g
/// opaque over the point chart).
Context generic_point_context();

}  // namespace nibsym::paperdata

#endif
