#pragma once

#include "eds/manifold.hpp"

#include <gmpxx.h>
#include <map>
#include <string>
#include <vector>

namespace eds {

/// Pullback of a form to a subspace, expressed in the dual basis of the
/// subspace basis; coefficients are exact rationals (evaluated at a point).
struct SubspaceForm {
    int degree = 0;
    std::map<IndexTuple, mpq_class> terms;
};

/// Differential form on a Manifold: canonical sum of coefficient * theta^I terms
/// over strictly increasing multi-indices. Immutable value semantics.
class DForm {
public:
    DForm() = default; // zero 0-form on no manifold; usable only as placeholder

    DForm(ManifoldPtr m, int degree, TermMap terms);

    const ManifoldPtr &manifold() const { return m_; }
    int degree() const { return degree_; }
    const TermMap &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    DForm operator+(const DForm &o) const;
    DForm operator-(const DForm &o) const;
    DForm operator-() const;
    DForm scale(const ScalarExpr &c) const;
    DForm wedge(const DForm &o) const;

    /// Exterior derivative using the manifold's structure equations and
    /// declared scalar differentials. Throws UnknownSymbol when a coefficient
    /// involves a symbol with no declared differential.
    DForm d() const;

    /// Interior product v -| form; degree drops by one. DegreeError on 0-forms.
    DForm hook(const TangentVector &v) const;

    /// Exact alternating evaluation on degree-many vectors at a point.
    mpq_class eval_on_vectors(const Point &p, const std::vector<TangentVector> &vs) const;

    /// Pullback to span(basis) at p, in the dual basis of `basis`.
    /// Throws DependentBasis when the basis is dependent at p.
    SubspaceForm restrict_to_subspace(const Point &p, const std::vector<TangentVector> &basis) const;

    /// Replace selected coframe 1-forms by linear combinations of others and
    /// re-expand. Replacement targets must not themselves be replaced.
    DForm substitute_basis(const std::map<int, std::vector<std::pair<int, ScalarExpr>>> &repl) const;

    /// Substitute symbols inside every coefficient.
    DForm substitute_scalars(const std::map<std::string, ScalarExpr> &bindings) const;

    /// Reinterpret on a manifold whose coframe begins with this manifold's coframe.
    DForm transfer(const ManifoldPtr &bigger) const;

    bool same_terms(const DForm &o) const { return degree_ == o.degree_ && terms_ == o.terms_; }

    std::string str() const;

private:
    ManifoldPtr m_;
    int degree_ = 0;
    TermMap terms_;
};

/// Sign of merging two strictly increasing index tuples; 0 if they collide.
/// On success `out` receives the merged tuple.
int merge_indices(const IndexTuple &a, const IndexTuple &b, IndexTuple &out);

} // namespace eds
