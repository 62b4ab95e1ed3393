#pragma once

#include "eds/involution.hpp"

#include <vector>

namespace eds {

/// First-order data of a normal-bundle section at the base point: values and
/// x-derivatives of the normal components, sized q and q x p for the coordinate
/// split (x = independence coordinates, y = the rest).
struct NormalJet {
    std::vector<mpq_class> value;
    std::vector<std::vector<mpq_class>> deriv;
};

/// Covector on E in the dual basis of the adapted element basis; nonzero.
struct Covector {
    std::vector<mpq_class> xi;
};

/// The coordinate split adapted to an integral element on a coordinate
/// manifold: E is the graph of dy = A dx over the independence coordinates.
struct AdaptedSplit {
    std::vector<int> x_idx;                     // coframe indices of dx (size p)
    std::vector<int> y_idx;                     // coframe indices of dy (size q)
    std::vector<std::string> y_coord;           // matching coordinate names
    std::vector<std::vector<mpq_class>> graph_a; // A with dy^a = sum_j A[a][j] dx^j on E
    std::vector<TangentVector> e_basis;          // adapted tangent basis of E
    std::vector<TangentVector> normal_basis;     // coordinate normal directions d/dy^a
};

/// Builds the split; NotCoordinateManifold / NotAGraph on failure.
AdaptedSplit adapt_to_element(const ExteriorSystem &s, const IntegralElement &e);

/// The linearized operator of the Lemma, one form on E per closure generator:
///   dv^a/dx^j c_{Ia} dx^{Ij} + v^a dc_I/dy^a dx^I, evaluated at the base point.
std::vector<SubspaceForm> linearized_operator(const ExteriorSystem &s, const IntegralElement &e,
                                              const NormalJet &jet);

/// Tableau matrix: rows indexed by (closure form, increasing x-tuple), columns
/// by the q x p entries of A; entry = derivation action (A form)|_E.
struct TableauMap {
    std::vector<std::vector<mpq_class>> matrix;
    int cols = 0;
    int kernel_dim() const;
};
TableauMap tableau(const ExteriorSystem &s, const IntegralElement &e);

/// Stacked symbol sigma(xi) v = xi ^ (v -| form)|_E as a matrix over the normal
/// components of v.
struct SymbolMap {
    std::vector<std::vector<mpq_class>> matrix;
    int cols = 0;
    int kernel_dim() const;
};
SymbolMap symbol(const ExteriorSystem &s, const IntegralElement &e, const Covector &xi);

struct CharacteristicResult {
    bool characteristic = false;
    int kernel_dim = 0;
};
CharacteristicResult is_characteristic(const ExteriorSystem &s, const IntegralElement &e,
                                       const Covector &xi);

/// Independent reading of characteristicity: does the hyperplane {xi = 0} in E
/// extend to an integral p-plane other than E itself?
bool hyperplane_extends_nonuniquely(const ExteriorSystem &s, const IntegralElement &e,
                                    const Covector &xi);

} // namespace eds
