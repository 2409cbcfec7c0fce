#ifndef NIBSYM_CONTEXT_HPP
#define NIBSYM_CONTEXT_HPP

#include "nibsym/expr.hpp"

#include <map>
#include <string>
#include <vector>

namespace nibsym {

/// Declaration table for the parser: which identifiers are symbols and which
/// are opaque function symbols. Expressions themselves carry everything they
/// need; the context only resolves names in source text.
class Context {
  public:
    Context& declare_symbol(const std::string& name);
    Context& declare_symbols(std::initializer_list<std::string> names);
    /// Declares an opaque function symbol; params are also used to render
    /// derivative suffixes (g -> g_x) and to auto-apply bare references.
    FunctionSpecPtr declare_function(const std::string& name, std::vector<std::string> params);
    /// Declares a function whose i-th partial is a fixed expression in the
    /// parameter symbols (e.g. an antiderivative atom).
    FunctionSpecPtr declare_function(const std::string& name, std::vector<std::string> params,
                                     std::vector<PartialRule> partials);

    bool has_symbol(const std::string& name) const { return symbols_.count(name) != 0; }
    FunctionSpecPtr function(const std::string& name) const;

    /// Parses the expression grammar. Unknown identifiers raise ParseError;
    /// `g_x` resolves through the derivative registry of a declared function;
    /// a bare function name applies it to its declared parameter symbols.
    Expr parse(const std::string& text) const;

    std::vector<std::string> symbol_names() const;

  private:
    std::map<std::string, bool> symbols_;
    std::map<std::string, FunctionSpecPtr> functions_;
};

/// Deterministic canonical rendering; parse(render(e)) == e on normal forms.
std::string render(const Expr& e);

inline PartialRule partial_derived() { return PartialRule{PartialKind::Derived, nullptr}; }
inline PartialRule partial_unknown() { return PartialRule{PartialKind::Unknown, nullptr}; }
inline PartialRule partial_template(const Expr& e) {
    return PartialRule{PartialKind::Template, std::make_shared<const Expr>(e)};
}

}  // namespace nibsym

#endif
