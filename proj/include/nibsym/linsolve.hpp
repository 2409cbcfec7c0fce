#ifndef NIBSYM_LINSOLVE_HPP
#define NIBSYM_LINSOLVE_HPP

#include "nibsym/rational.hpp"

#include <optional>
#include <vector>

namespace nibsym {

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;  // row major

/// Reduced row echelon form in place; returns pivot column per pivot row.
std::vector<int> rref(RatMat& m);

/// Solves A x = b exactly. Returns nullopt if inconsistent; free variables
/// are set to zero.
std::optional<RatVec> solve_linear(const RatMat& a, const RatVec& b);

/// Basis of the nullspace of A (columns = unknowns).
std::vector<RatVec> nullspace(const RatMat& a);

}  // namespace nibsym

#endif
