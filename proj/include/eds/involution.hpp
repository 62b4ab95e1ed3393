#pragma once

#include "eds/system.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace eds {

/// Row space of the polar equations of an integral element, in reduced row
/// echelon form over the coframe components.
struct PolarSpace {
    std::vector<std::vector<mpq_class>> rows;
    int rank() const { return static_cast<int>(rows.size()); }
    /// True when the row space of `other` contains every row of this space.
    bool contained_in(const PolarSpace &other) const;
};

/// Polar equations of span(vecs) at pt: w -> form(w, e_{i1},...,e_{ik}) over all
/// closure forms and all k-subsets of vecs, reduced to an echelon basis.
PolarSpace polar_space(const ExteriorSystem &s, const Point &pt,
                       const std::vector<TangentVector> &vecs);

/// A full flag E_0 subset E_1 subset ... subset E_p inside an integral element,
/// with the polar space of each proper level.
struct Flag {
    Point point;
    std::vector<TangentVector> vectors;
    std::vector<PolarSpace> polar; // levels 0..p-1
    std::vector<int> rank_profile() const;
};

/// Random rational flag inside E, deterministic in the seed.
Flag build_flag(const ExteriorSystem &s, const IntegralElement &e, std::uint64_t seed);

/// Five seeded flags, keeping the one with the lexicographically maximal
/// polar-rank profile; random flags are generic with probability one and the
/// retry makes the choice deterministic in the seed.
Flag generic_flag(const ExteriorSystem &s, const IntegralElement &e, std::uint64_t seed);

/// Cartan characters s_0..s_p; s_p comes from the convention
/// sum s_k = dim M - p and NegativeLastCharacter is raised when it fails.
std::vector<int> characters(const ExteriorSystem &s, const Flag &flag);

long predicted_dimension(int dim_m, const std::vector<int> &chars);

/// A Grassmann chart: integral p-planes presented as graphs pi = a * omega after
/// the degree-1 part of the system has been solved for pivot coframe elements.
struct Chart {
    std::vector<int> omega;  // independence coframe indices (size p)
    std::vector<int> pivots; // coframe indices eliminated by the 1-form generators
    std::vector<int> pi;     // remaining coframe indices (size q)
    /// pivot index -> linear combination over omega+pi indices
    std::map<int, std::vector<std::pair<int, ScalarExpr>>> pivot_solve;
    std::vector<std::string> unknowns; // q*p symbols, row-major over (pi, omega)
    int q() const { return static_cast<int>(pi.size()); }
    const std::string &unknown(int i, int j, int p) const {
        return unknowns[static_cast<size_t>(i * p + j)];
    }
};

/// Builds the chart over the given independence condition. When a point is
/// supplied, pivot choices must survive evaluation there.
Chart make_chart(const ExteriorSystem &s, const std::vector<int> &omega, const Point *pt = nullptr);

/// Polynomial equations in the chart unknowns cutting out the integral
/// p-planes: coefficients of each omega-monomial of every closure form after
/// substituting the graph relations.
std::vector<ScalarExpr> chart_equations(const ExteriorSystem &s, const Chart &chart);

/// The p-plane of a chart matrix a (rows over pi, columns over omega).
IntegralElement element_from_chart(const ExteriorSystem &s, const Chart &chart, const Point &pt,
                                   const std::vector<std::vector<mpq_class>> &a);

/// Chart matrix of an integral element; NotAGraph when E is not a graph over omega.
std::vector<std::vector<mpq_class>> a_matrix_of(const ExteriorSystem &s, const Chart &chart,
                                                const IntegralElement &e);

struct ActualDimension {
    long dimension = 0;
    int jacobian_rank = 0;
    int equation_count = 0;
    bool linearity_caveat = false;
};

/// Dimension of the integral-element variety near E in the chart:
/// dim M + p*q - rank(Jacobian of the chart equations at E).
ActualDimension actual_dimension(const ExteriorSystem &s, const IntegralElement &e, const Chart &chart);

struct CartanReport {
    std::vector<int> characters;
    long predicted_dim = 0;
    int chart_equation_count = 0;
    int jacobian_rank = 0;
    long actual_dim = 0;
    bool involutive = false;
    bool linearity_caveat = false;
    std::string generality;
    std::string inequality_note; // non-empty when prediction fails
    int dim_m = 0;
    int p = 0;
};

/// The full Cartan test at an integral element. Re-samples five random flags
/// from the seed and keeps the lexicographically maximal rank profile.
CartanReport cartan_test(const ExteriorSystem &s, const IntegralElement &e, std::uint64_t seed);

/// Internal helper shared with the prolongation module: compose the chart's
/// substitution of every non-omega coframe element into omega combinations,
/// with pi elements mapped through the given expressions (one per pi row).
std::map<int, std::vector<std::pair<int, ScalarExpr>>>
chart_substitution(const Chart &chart, const std::vector<std::vector<ScalarExpr>> &pi_rows);

} // namespace eds
