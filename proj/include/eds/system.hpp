#pragma once

#include "eds/dform.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eds {

/// Counterexample returned when a subspace fails to be integral.
struct IntegralWitness {
    int closure_index = -1;       // which closure form
    std::vector<int> subset;      // 1-based positions into the tested basis
    mpq_class value;              // the nonzero evaluation
    std::string describe(const class ExteriorSystem &s) const;
};

struct IntegralCheck {
    bool ok = false;
    std::optional<IntegralWitness> witness;
};

/// An exterior differential system: finite generators, closed under d, with all
/// forms of degree above the sought dimension p discarded (the last-character
/// convention makes them irrelevant).
class ExteriorSystem {
public:
    static ExteriorSystem make(ManifoldPtr m, std::vector<DForm> generators, int p,
                               std::vector<int> independence = {});

    const ManifoldPtr &manifold() const { return m_; }
    int p() const { return p_; }
    const std::vector<DForm> &generators() const { return generators_; }
    const std::vector<DForm> &closure() const { return closure_; }
    const std::vector<int> &independence() const { return independence_; }

    /// Degree-1 members of the closure.
    std::vector<DForm> one_forms() const;

    /// All closure forms of degree <= deg.
    std::vector<DForm> closure_up_to(int deg) const;

    IntegralCheck is_integral_element(const Point &p, const std::vector<TangentVector> &basis) const;

private:
    ManifoldPtr m_;
    int p_ = 0;
    std::vector<DForm> generators_;
    std::vector<DForm> closure_;
    std::vector<int> independence_;
};

/// A p-plane at a point, integral for a system; verified on construction.
struct IntegralElement {
    Point point;
    std::vector<TangentVector> basis;
    std::optional<std::vector<std::vector<mpq_class>>> chart_a;
};

/// Builds and verifies an integral element; throws Error with the witness when
/// the plane is not integral or DependentBasis when the basis is degenerate.
IntegralElement make_integral_element(const ExteriorSystem &s, const Point &p,
                                      std::vector<TangentVector> basis);

} // namespace eds
