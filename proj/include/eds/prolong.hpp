#pragma once

#include "eds/involution.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eds {

/// Result of prolonging a system: the enlarged manifold with one new scalar per
/// surviving free chart parameter, the generators theta' = pi - a*omega, and the
/// torsion obstructions of the new system.
struct ProlongedSystem {
    ManifoldPtr manifold;                        // M'
    ExteriorSystem system;                       // I' on M'
    Chart base_chart;                            // chart on the original manifold
    std::vector<std::string> free_params;        // new scalar names, in column order
    std::vector<std::pair<int, int>> free_cols;  // (pi-row, omega-col) of each free param
    std::vector<std::vector<ScalarExpr>> a_entries; // solved a-matrix over the free params
    std::vector<DForm> new_generators;           // the theta' forms on M'
    std::vector<ScalarExpr> torsion;             // unabsorbable omega^omega obstructions
    bool originals_reduce = true;                // d(original 1-forms) == 0 mod new span
};

/// Prolongation in the given chart. The chart equations must be affine in the
/// unknowns (AffineOnly otherwise); inconsistent equations raise
/// BadIndependenceCondition.
ProlongedSystem prolong(const ExteriorSystem &s, const Chart &chart);

/// Torsion of a system with degree-1 generators: reduce each d(generator)
/// modulo the span of the degree-1 generators, then absorb every theta_k^omega_j
/// term by redefining the non-omega columns; the surviving omega^omega
/// coefficients are the torsion scalars (canonical, deterministically ordered).
std::vector<ScalarExpr> torsion_of(const ExteriorSystem &s);

/// Restrict a prolonged system to the zero locus of `equation`, solved for the
/// prolongation parameter `solve_for` (which must enter affinely with an
/// invertible coefficient). Restricting by the zero equation is the identity.
ProlongedSystem restrict_system(const ProlongedSystem &ps, const ScalarExpr &equation,
                                const std::string &solve_for);

/// Same restriction with an explicit substitution symbol := expr supplied by
/// the caller instead of being solved from an equation.
ProlongedSystem restrict_with_substitution(const ProlongedSystem &ps, const std::string &symbol,
                                           const ScalarExpr &expr);

enum class ProlongationStatus {
    Involutive,
    TorsionRequiresRestriction,
    AffineOnly,
    MaxSteps,
};

struct ProlongationStep {
    CartanReport report;
    std::optional<ProlongedSystem> prolonged;
    std::vector<ScalarExpr> torsion;
    ProlongationStatus status = ProlongationStatus::MaxSteps;
};

/// Cartan-Kuranishi style loop: test, prolong when the test fails, stop at the
/// first involutive step, at nonzero torsion (reported, never auto-restricted),
/// at non-affine chart equations, or after max_steps.
std::vector<ProlongationStep> iterate_prolongation(const ExteriorSystem &s, const Point &pt,
                                                   std::uint64_t seed, int max_steps);

} // namespace eds
