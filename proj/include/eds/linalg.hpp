#pragma once

#include "eds/scalar.hpp"

#include <gmpxx.h>
#include <optional>
#include <vector>

namespace eds {

inline bool field_zero(const mpq_class &x) { return x == 0; }
inline bool field_zero(const ScalarExpr &x) { return x.is_zero(); }

inline void set_one(mpq_class &x) { x = 1; }
inline void set_one(ScalarExpr &x) { x = ScalarExpr(1); }

/// In-place reduced row echelon form over an exact field.
/// Pivots on the first nonzero column of each remaining row block; pivots are
/// normalized to 1 and eliminated above and below. Zero rows are dropped.
/// Returns the pivot columns.
template <class F>
std::vector<int> rref(std::vector<std::vector<F>> &rows) {
    std::vector<int> pivots;
    if (rows.empty()) return pivots;
    const size_t ncols = rows[0].size();
    size_t r = 0;
    for (size_t c = 0; c < ncols && r < rows.size(); ++c) {
        size_t sel = r;
        while (sel < rows.size() && field_zero(rows[sel][c])) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        F pivot = rows[r][c];
        for (size_t j = c; j < ncols; ++j) rows[r][j] = rows[r][j] / pivot;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i == r || field_zero(rows[i][c])) continue;
            F f = rows[i][c];
            for (size_t j = c; j < ncols; ++j) rows[i][j] = rows[i][j] - f * rows[r][j];
        }
        pivots.push_back(static_cast<int>(c));
        ++r;
    }
    rows.resize(r);
    return pivots;
}

template <class F>
int rank_of(std::vector<std::vector<F>> rows) {
    return static_cast<int>(rref(rows).size());
}

template <class F>
struct LinearSolution {
    std::vector<F> particular;
    std::vector<std::vector<F>> kernel;
};

/// Solve A x = b exactly over ncols unknowns. Returns one particular solution
/// plus a kernel basis, or nullopt when inconsistent. Free columns map to
/// kernel vectors in column order. ncols defaults to the widest row.
template <class F>
std::optional<LinearSolution<F>> solve_linear(const std::vector<std::vector<F>> &a,
                                              const std::vector<F> &b, size_t ncols = SIZE_MAX) {
    const size_t m = a.size();
    size_t n = 0;
    for (auto &row : a) n = std::max(n, row.size());
    if (ncols != SIZE_MAX) n = ncols;
    std::vector<std::vector<F>> aug(m, std::vector<F>(n + 1, F()));
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < a[i].size(); ++j) aug[i][j] = a[i][j];
        aug[i][n] = b[i];
    }
    std::vector<int> piv = rref(aug);
    for (int p : piv)
        if (p == static_cast<int>(n)) return std::nullopt;
    LinearSolution<F> sol;
    sol.particular.assign(n, F());
    std::vector<bool> is_pivot(n, false);
    for (size_t k = 0; k < piv.size(); ++k) {
        is_pivot[static_cast<size_t>(piv[k])] = true;
        sol.particular[static_cast<size_t>(piv[k])] = aug[k][n];
    }
    for (size_t j = 0; j < n; ++j) {
        if (is_pivot[j]) continue;
        std::vector<F> v(n, F());
        set_one(v[j]);
        for (size_t k = 0; k < piv.size(); ++k) v[static_cast<size_t>(piv[k])] = F() - aug[k][j];
        sol.kernel.push_back(std::move(v));
    }
    return sol;
}

} // namespace eds
