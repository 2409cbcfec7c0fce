#ifndef NIBSYM_NUMCHECK_HPP
#define NIBSYM_NUMCHECK_HPP

#include "nibsym/chart.hpp"
#include "nibsym/expr.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace nibsym {

/// Deterministic cross-platform generator (splitmix64); identical seeds give
/// bit-identical sample sequences on every platform.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}
    uint64_t next();
    double uniform(double lo, double hi);

  private:
    uint64_t state_;
};

/// Callable instantiation of an opaque function symbol: receives the
/// derivative position multiset and evaluated arguments.
using Instantiation = std::function<double(const std::vector<int>&, const std::vector<double>&)>;

/// Numeric binding: symbol values plus one instantiation per function name.
/// Opaque atoms default to seeded random cubic polynomials whose derivatives
/// are taken analytically.
class Binding {
  public:
    Binding() = default;

    void set(const std::string& symbol, double value);
    double get(const std::string& symbol) const;
    void set_function(const std::string& name, Instantiation f);
    bool has_function(const std::string& name) const;

    /// Registers random cubic instantiations for every function atom of e
    /// that has no instantiation yet.
    void instantiate_opaque(const Expr& e, Rng& rng);

    double eval(const Expr& e) const;

    const std::map<std::string, double>& symbols() const { return symbols_; }

  private:
    std::map<std::string, double> symbols_;
    std::map<std::string, Instantiation> functions_;
};

/// Relative error between the symbolic derivative and a central finite
/// difference (h = 1e-6, one Richardson step) at the binding.
double fd_check(const Expr& e, const std::string& v, const Binding& b);

/// Quadrature instantiation helper: adaptive Simpson of f over [0, x].
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

struct OnshellSpec {
    Expr f;  // over (x,u), may contain opaque atoms
    Expr g;
};

/// Random on-shell jet samples: t,x,u,u_x uniform in [-2,2] away from
/// singularities, u_t = f - g*u_x. Deterministic under the seed.
std::vector<Binding> sample_onshell(const OnshellSpec& spec, int n, uint64_t seed);

/// Max |e| over on-shell samples; used to corroborate proven-symmetry verdicts.
double max_onshell_residual(const Expr& e, const OnshellSpec& spec, int n, uint64_t seed);

}  // namespace nibsym

#endif
