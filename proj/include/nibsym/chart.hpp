#ifndef NIBSYM_CHART_HPP
#define NIBSYM_CHART_HPP

#include "nibsym/context.hpp"
#include "nibsym/expr.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace nibsym {

struct ChartMismatch : Error {
    using Error::Error;
};

/// Coordinate chart with first-order jet structure. Jet coordinate names are
/// generated here, never hand-declared. Two charts are used in this project:
/// the point chart (t,x) x (u) and the equivalence chart (t,x,u) x (f,g).
class Chart {
  public:
    /// Point chart: base (t,x), dependent u, jets u_t u_x u_tt u_tx u_xx.
    static std::shared_ptr<const Chart> point();
    /// Equivalence chart: coordinates (t,x,u,f,g) where f,g are differential
    /// variables over (t,x,u); adds jets f_t f_x f_u g_t g_x g_u.
    static std::shared_ptr<const Chart> equivalence();
    /// Projection target (x,u,f,g) used by the classification.
    static std::shared_ptr<const Chart> xufg();

    const std::string& name() const { return name_; }
    /// Field coordinates a VectorField may carry coefficients for.
    const std::vector<std::string>& coords() const { return coords_; }
    bool has_coord(const std::string& c) const;
    /// All symbols of the chart (coordinates plus jet coordinates).
    const std::vector<std::string>& all_symbols() const { return all_; }
    bool is_jet(const std::string& s) const;

    /// A parser context preloaded with every chart symbol.
    Context base_context() const;

  private:
    std::string name_;
    std::vector<std::string> coords_;
    std::vector<std::string> jets_;
    std::vector<std::string> all_;
};

using ChartPtr = std::shared_ptr<const Chart>;

/// Sparse vector field on a chart: absent coordinate means zero coefficient.
struct VectorField {
    ChartPtr chart;
    std::map<std::string, Expr> coeffs;

    Expr coeff(const std::string& c) const;
    bool is_zero() const;
};

VectorField vf_add(const VectorField& a, const VectorField& b);
VectorField vf_scale(const Expr& c, const VectorField& a);
bool vf_equal(const VectorField& a, const VectorField& b);

/// v acting on e as a derivation: sum of coeff_i * d(e)/d(coord_i).
Expr apply(const VectorField& v, const Expr& e);

/// Lie bracket [v,w]: coordinate-c coefficient v(w_c) - w(v_c).
VectorField bracket(const VectorField& v, const VectorField& w);

/// Total derivative D_J on the point chart, J in {t,x}:
///   D_J = d_J + u_J d_u + u_tJ d_{u_t} + u_xJ d_{u_x},  u_tx = u_xt.
/// e may contain first-order jets; second-order jets in e are an error.
Expr total_derivative(const Expr& e, const std::string& J);

/// First prolongation data for a point-chart field with roles
/// xi = d/dt, tau = d/dx, phi = d/du.
struct ProlongedField {
    VectorField base;
    Expr phi_t;  // coefficient of d/du_t
    Expr phi_x;  // coefficient of d/du_x
    Expr characteristic;  // Q = phi - xi u_t - tau u_x
};

/// Builds Q = phi - xi u_t - tau u_x and
///   phi^t = D_t(Q) + xi u_tt + tau u_tx,  phi^x = D_x(Q) + xi u_tx + tau u_xx.
/// Coefficients must not depend on jet coordinates.
ProlongedField prolong1(const VectorField& v);

/// Prolonged action on an expression over (t,x,u,u_t,u_x).
Expr apply_prolonged(const ProlongedField& p, const Expr& e);

// JSON wire format: {"chart": ["t","x","u"], "coeffs": {"t": "<expr>", ...}};
// omitted keys mean zero.
VectorField vf_from_json_string(const std::string& json_text);
std::string vf_to_json_string(const VectorField& v);
VectorField vf_parse(const ChartPtr& chart, const std::map<std::string, std::string>& coeffs);

}  // namespace nibsym

#endif
