#ifndef NIBSYM_EQUIV_HPP
#define NIBSYM_EQUIV_HPP

#include "nibsym/chart.hpp"
#include "nibsym/detsys.hpp"
#include "nibsym/liealg.hpp"

#include <string>
#include <vector>

namespace nibsym {

/// Field on the extended chart (t,x,u,f,g) with named roles
/// xi d_t + tau d_x + phi d_u + chi d_f + eta d_g.
/// chi, eta may depend on (t,x,u,f,g); xi, tau, phi on (t,x,u) only.
struct EquivField {
    VectorField field;  // on Chart::equivalence()

    Expr xi() const { return field.coeff("t"); }
    Expr tau() const { return field.coeff("x"); }
    Expr phi() const { return field.coeff("u"); }
    Expr chi() const { return field.coeff("f"); }
    Expr eta() const { return field.coeff("g"); }

    void check_roles() const;
};

/// Extended prolongation data: the point part's phi^t, phi^x plus
/// chi^t = D~_t(chi) - f_x D~_t(tau) - f_u D~_t(phi) with D~_t = d_t,
/// eta^t analogous.
struct EquivProlongation {
    EquivField base;
    Expr phi_t;
    Expr phi_x;
    Expr chi_t;
    Expr eta_t;
};

EquivProlongation equiv_prolong(const EquivField& Y);

/// Residuals of the invariance conditions for the system
/// { u_t + g u_x = f, f_t = g_t = 0 }:
/// the t-derivative split reproduces tau_t = phi_t = chi_t = eta_t = 0, and
/// the equation split (after imposing those facts) gives the u_x coefficient
/// and constant part whose generic solutions are the chi/eta closed forms.
struct EquivConditions {
    std::vector<Expr> t_split;  // from Y[f_t], Y[g_t]: tau_t, phi_t, chi_t, eta_t order
    Expr ux_coefficient;        // u_x part of Y[u_t + g u_x - f] on-shell
    Expr constant_part;
    bool all_zero() const;
};

EquivConditions equiv_conditions(const EquivField& Y);

/// The three generator families of the equivalence algebra:
///  Y1[xi]  = xi d_t - f (g xi_x + xi_t + f xi_u) d_f - g (f xi_u + xi_t + g xi_x) d_g
///  Y2[tau] = tau d_x + (g tau_x + f tau_u) d_g
///  Y3[phi] = phi d_u + (g phi_x + f phi_u) d_f
/// `coefficient` is an expression over (t,x,u) for kind 1, (x,u) for 2 and 3.
EquivField build_Y(int kind, const Expr& coefficient);

/// The ten-dimensional subalgebra X1..X10 selected for the classification.
LieBasis l10_basis();

/// Restriction of an equivalence field to (x,u,f,g) or (t,x,u); linear, and
/// the dropped coefficients are reported alongside.
struct Projection {
    VectorField field;                         // coefficients on the kept coordinates
    std::map<std::string, Expr> dropped;       // nonzero coefficients that were dropped
};

Projection project(const EquivField& v, const std::vector<std::string>& target);
Projection project_xufg(const EquivField& v);
Projection project_txu(const EquivField& v);

/// Generic opaque equivalence field (xi(t,x,u), tau(t,x,u), phi(t,x,u),
/// chi(t,x,u,f,g), eta(t,x,u,f,g)) for reproducing the determining system.
EquivField generic_equiv_field();

}  // namespace nibsym

#endif
