#include "eds/linearize.hpp"
#include "eds/errors.hpp"
#include "eds/linalg.hpp"

#include <algorithm>
#include <functional>

namespace eds {

namespace {

void for_each_tuple(int n, int k, const std::function<void(const std::vector<int> &)> &fn) {
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == k) {
            fn(cur);
            return;
        }
        for (int i = start; i <= n; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(1);
}

} // namespace

AdaptedSplit adapt_to_element(const ExteriorSystem &s, const IntegralElement &e) {
    const ManifoldPtr &m = s.manifold();
    if (!m->is_coordinate()) throw NotCoordinateManifold();
    if (s.independence().empty())
        throw BadIndependenceCondition("linearization requires an independence condition");
    AdaptedSplit sp;
    sp.x_idx = s.independence();
    std::vector<bool> isx(static_cast<size_t>(m->dim() + 1), false);
    for (int i : sp.x_idx) isx[static_cast<size_t>(i)] = true;
    for (int i = 1; i <= m->dim(); ++i) {
        if (isx[static_cast<size_t>(i)]) continue;
        sp.y_idx.push_back(i);
        sp.y_coord.push_back(m->scalar_names()[static_cast<size_t>(i - 1)]);
    }
    const int p = static_cast<int>(sp.x_idx.size());
    const int q = static_cast<int>(sp.y_idx.size());

    // normalize the basis so that dx_k(e'_j) = delta_kj
    std::vector<std::vector<mpq_class>> comps;
    for (auto &v : e.basis) comps.push_back(v.numeric(e.point));
    std::vector<std::vector<mpq_class>> gt(static_cast<size_t>(p),
                                           std::vector<mpq_class>(static_cast<size_t>(p)));
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            gt[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                comps[static_cast<size_t>(j)][static_cast<size_t>(sp.x_idx[static_cast<size_t>(i)] - 1)];
    for (int k = 0; k < p; ++k) {
        std::vector<mpq_class> unit(static_cast<size_t>(p), mpq_class(0));
        unit[static_cast<size_t>(k)] = 1;
        auto sol = solve_linear(gt, unit);
        if (!sol || !sol->kernel.empty())
            throw NotAGraph("element is not a graph over the chosen x coordinates");
        TangentVector v;
        v.comps.assign(static_cast<size_t>(m->dim()), ScalarExpr());
        std::vector<mpq_class> vec(static_cast<size_t>(m->dim()), mpq_class(0));
        for (int j = 0; j < p; ++j)
            for (int c = 0; c < m->dim(); ++c)
                vec[static_cast<size_t>(c)] += sol->particular[static_cast<size_t>(j)] *
                                               comps[static_cast<size_t>(j)][static_cast<size_t>(c)];
        for (int c = 0; c < m->dim(); ++c)
            if (vec[static_cast<size_t>(c)] != 0)
                v.comps[static_cast<size_t>(c)] = ScalarExpr::rational(vec[static_cast<size_t>(c)]);
        sp.e_basis.push_back(std::move(v));
    }
    sp.graph_a.assign(static_cast<size_t>(q), std::vector<mpq_class>(static_cast<size_t>(p)));
    for (int a = 0; a < q; ++a)
        for (int j = 0; j < p; ++j)
            sp.graph_a[static_cast<size_t>(a)][static_cast<size_t>(j)] =
                sp.e_basis[static_cast<size_t>(j)].comps[static_cast<size_t>(sp.y_idx[static_cast<size_t>(a)] - 1)]
                    .is_zero()
                    ? mpq_class(0)
                    : sp.e_basis[static_cast<size_t>(j)]
                          .comps[static_cast<size_t>(sp.y_idx[static_cast<size_t>(a)] - 1)]
                          .eval(e.point);
    for (int a = 0; a < q; ++a)
        sp.normal_basis.push_back(TangentVector::basis(m->dim(), sp.y_idx[static_cast<size_t>(a)]));
    return sp;
}

namespace {

/// Rewrites a form in the adapted cobasis (dx, eta = dy - A dx) and splits each
/// term into its pure-x multi-index and y-index set, with the y indices moved to
/// the back (the Lemma's c_IA dx^I ^ dy^A convention).
struct SplitTerm {
    IndexTuple x_positions; // 1-based positions into the x list
    std::vector<int> y_positions; // 1-based positions into the y list
    ScalarExpr coeff;
};

std::vector<SplitTerm> split_form(const DForm &f, const AdaptedSplit &sp) {
    // substitute dy^a -> eta^a + sum_j A[a][j] dx^j (eta keeps the dy slot)
    std::map<int, std::vector<std::pair<int, ScalarExpr>>> repl;
    for (size_t a = 0; a < sp.y_idx.size(); ++a) {
        std::vector<std::pair<int, ScalarExpr>> combo;
        combo.emplace_back(sp.y_idx[a], ScalarExpr(1));
        for (size_t j = 0; j < sp.x_idx.size(); ++j) {
            const mpq_class &c = sp.graph_a[a][j];
            if (c != 0) combo.emplace_back(sp.x_idx[j], ScalarExpr::rational(c));
        }
        repl[sp.y_idx[a]] = std::move(combo);
    }
    DForm g = f.substitute_basis(repl);

    std::map<int, int> xpos, ypos;
    for (size_t j = 0; j < sp.x_idx.size(); ++j) xpos[sp.x_idx[j]] = static_cast<int>(j + 1);
    for (size_t a = 0; a < sp.y_idx.size(); ++a) ypos[sp.y_idx[a]] = static_cast<int>(a + 1);

    std::vector<SplitTerm> out;
    for (auto &[idx, c] : g.terms()) {
        SplitTerm t;
        t.coeff = c;
        int sign_flips = 0;
        int xs_seen_after = 0;
        // walk from the right: moving each y index past the x indices to its right
        for (int pos = static_cast<int>(idx.size()) - 1; pos >= 0; --pos) {
            if (xpos.count(idx[static_cast<size_t>(pos)])) {
                ++xs_seen_after;
            } else {
                sign_flips += xs_seen_after;
            }
        }
        for (int i : idx) {
            if (xpos.count(i))
                t.x_positions.push_back(xpos[i]);
            else
                t.y_positions.push_back(ypos[i]);
        }
        if (sign_flips % 2 == 1) t.coeff = -t.coeff;
        out.push_back(std::move(t));
    }
    return out;
}

void accumulate(SubspaceForm &form, const IndexTuple &idx, const mpq_class &v) {
    if (v == 0) return;
    auto it = form.terms.find(idx);
    if (it == form.terms.end()) {
        form.terms.emplace(idx, v);
    } else {
        it->second += v;
        if (it->second == 0) form.terms.erase(it);
    }
}

} // namespace

std::vector<SubspaceForm> linearized_operator(const ExteriorSystem &s, const IntegralElement &e,
                                              const NormalJet &jet) {
    AdaptedSplit sp = adapt_to_element(s, e);
    const int p = static_cast<int>(sp.x_idx.size());
    const int q = static_cast<int>(sp.y_idx.size());
    if (static_cast<int>(jet.value.size()) != q || static_cast<int>(jet.deriv.size()) != q)
        throw DegreeError("normal jet has the wrong shape");

    std::vector<SubspaceForm> out;
    for (auto &f : s.closure()) {
        SubspaceForm lf;
        lf.degree = f.degree();
        auto terms = split_form(f, sp);
        for (auto &t : terms) {
            if (t.y_positions.size() == 0) {
                // v^a dc_I/dy^a dx^I
                for (int a = 0; a < q; ++a) {
                    if (jet.value[static_cast<size_t>(a)] == 0) continue;
                    ScalarExpr dc = t.coeff.derivative(sp.y_coord[static_cast<size_t>(a)]);
                    if (dc.is_zero()) continue;
                    accumulate(lf, t.x_positions,
                               jet.value[static_cast<size_t>(a)] * dc.eval(e.point));
                }
            } else if (t.y_positions.size() == 1) {
                // dv^a/dx^j c_Ia dx^I ^ dx^j
                int a = t.y_positions[0] - 1;
                mpq_class c = t.coeff.eval(e.point);
                if (c == 0) continue;
                for (int j = 1; j <= p; ++j) {
                    const mpq_class &dv = jet.deriv[static_cast<size_t>(a)][static_cast<size_t>(j - 1)];
                    if (dv == 0) continue;
                    IndexTuple merged;
                    int sign = merge_indices(t.x_positions, IndexTuple{j}, merged);
                    if (sign == 0) continue;
                    accumulate(lf, merged, c * dv * sign);
                }
            }
            // terms with two or more eta factors vanish on E
        }
        out.push_back(std::move(lf));
    }
    return out;
}

int TableauMap::kernel_dim() const {
    if (matrix.empty()) return cols;
    return cols - rank_of(matrix);
}

TableauMap tableau(const ExteriorSystem &s, const IntegralElement &e) {
    AdaptedSplit sp = adapt_to_element(s, e);
    const int p = static_cast<int>(sp.x_idx.size());
    const int q = static_cast<int>(sp.y_idx.size());
    TableauMap tm;
    tm.cols = q * p;
    for (auto &f : s.closure()) {
        int k = f.degree();
        if (k > p) continue;
        for_each_tuple(p, k, [&](const std::vector<int> &tuple) {
            std::vector<mpq_class> row(static_cast<size_t>(q * p), mpq_class(0));
            bool any = false;
            for (int a = 0; a < q; ++a) {
                for (int j = 1; j <= p; ++j) {
                    // A e_{x_j} = d/dy^a: derivation action summed over slots holding x_j
                    mpq_class acc = 0;
                    for (size_t slot = 0; slot < tuple.size(); ++slot) {
                        if (tuple[slot] != j) continue;
                        std::vector<TangentVector> vs;
                        for (size_t t2 = 0; t2 < tuple.size(); ++t2)
                            vs.push_back(t2 == slot
                                             ? sp.normal_basis[static_cast<size_t>(a)]
                                             : sp.e_basis[static_cast<size_t>(tuple[t2] - 1)]);
                        acc += f.eval_on_vectors(e.point, vs);
                    }
                    if (acc != 0) {
                        row[static_cast<size_t>(a * p + (j - 1))] = acc;
                        any = true;
                    }
                }
            }
            if (any) tm.matrix.push_back(std::move(row));
        });
    }
    return tm;
}

int SymbolMap::kernel_dim() const {
    if (matrix.empty()) return cols;
    return cols - rank_of(matrix);
}

SymbolMap symbol(const ExteriorSystem &s, const IntegralElement &e, const Covector &xi) {
    AdaptedSplit sp = adapt_to_element(s, e);
    const int p = static_cast<int>(sp.x_idx.size());
    const int q = static_cast<int>(sp.y_idx.size());
    if (static_cast<int>(xi.xi.size()) != p) throw DegreeError("covector has the wrong length");
    bool allz = true;
    for (auto &c : xi.xi)
        if (c != 0) allz = false;
    if (allz) throw DegreeError("covector must be nonzero");

    SymbolMap sm;
    sm.cols = q;
    for (auto &f : s.closure()) {
        int k = f.degree(); // sigma output degree equals k on E
        if (k > p) continue;
        // mu_a = (v_a -| f) restricted to E, tabulated on (k-1)-tuples
        std::vector<std::map<IndexTuple, mpq_class>> mu(static_cast<size_t>(q));
        for (int a = 0; a < q; ++a) {
            DForm hooked = f.hook(sp.normal_basis[static_cast<size_t>(a)]);
            for_each_tuple(p, k - 1, [&](const std::vector<int> &tuple) {
                std::vector<TangentVector> vs;
                for (int t2 : tuple) vs.push_back(sp.e_basis[static_cast<size_t>(t2 - 1)]);
                mpq_class v = hooked.eval_on_vectors(e.point, vs);
                if (v != 0) mu[static_cast<size_t>(a)][tuple] = v;
            });
        }
        // rows of xi ^ mu_a over k-tuples
        for_each_tuple(p, k, [&](const std::vector<int> &tuple) {
            std::vector<mpq_class> row(static_cast<size_t>(q), mpq_class(0));
            bool any = false;
            for (int a = 0; a < q; ++a) {
                mpq_class acc = 0;
                for (size_t slot = 0; slot < tuple.size(); ++slot) {
                    IndexTuple rest;
                    for (size_t t2 = 0; t2 < tuple.size(); ++t2)
                        if (t2 != slot) rest.push_back(tuple[t2]);
                    auto it = mu[static_cast<size_t>(a)].find(rest);
                    if (it == mu[static_cast<size_t>(a)].end()) continue;
                    mpq_class term = xi.xi[static_cast<size_t>(tuple[slot] - 1)] * it->second;
                    if (slot % 2 == 1) term = -term;
                    acc += term;
                }
                if (acc != 0) {
                    row[static_cast<size_t>(a)] = acc;
                    any = true;
                }
            }
            if (any) sm.matrix.push_back(std::move(row));
        });
    }
    return sm;
}

CharacteristicResult is_characteristic(const ExteriorSystem &s, const IntegralElement &e,
                                       const Covector &xi) {
    SymbolMap sm = symbol(s, e, xi);
    CharacteristicResult r;
    r.kernel_dim = sm.kernel_dim();
    r.characteristic = r.kernel_dim > 0;
    return r;
}

bool hyperplane_extends_nonuniquely(const ExteriorSystem &s, const IntegralElement &e,
                                    const Covector &xi) {
    AdaptedSplit sp = adapt_to_element(s, e);
    const ManifoldPtr &m = s.manifold();
    const int n = m->dim();
    const int p = static_cast<int>(sp.x_idx.size());

    // hyperplane basis: kernel of xi within E
    std::vector<std::vector<mpq_class>> xirow(1, std::vector<mpq_class>(static_cast<size_t>(p)));
    for (int j = 0; j < p; ++j) xirow[0][static_cast<size_t>(j)] = xi.xi[static_cast<size_t>(j)];
    auto sol = solve_linear(xirow, {mpq_class(0)});
    std::vector<TangentVector> hbasis;
    for (auto &kv : sol->kernel) {
        TangentVector v;
        v.comps.assign(static_cast<size_t>(n), ScalarExpr());
        std::vector<mpq_class> vec(static_cast<size_t>(n), mpq_class(0));
        for (int j = 0; j < p; ++j) {
            if (kv[static_cast<size_t>(j)] == 0) continue;
            auto ec = sp.e_basis[static_cast<size_t>(j)].numeric(e.point);
            for (int c = 0; c < n; ++c) vec[static_cast<size_t>(c)] += kv[static_cast<size_t>(j)] * ec[static_cast<size_t>(c)];
        }
        for (int c = 0; c < n; ++c)
            if (vec[static_cast<size_t>(c)] != 0) v.comps[static_cast<size_t>(c)] = ScalarExpr::rational(vec[static_cast<size_t>(c)]);
        hbasis.push_back(std::move(v));
    }

    // conditions on w: form(w, subset of hyperplane basis) = 0
    std::vector<std::vector<mpq_class>> rows;
    const int hb = static_cast<int>(hbasis.size());
    for (auto &f : s.closure()) {
        int d = f.degree() - 1;
        if (d > hb) continue;
        for_each_tuple(hb, d, [&](const std::vector<int> &sub) {
            DForm mu = f;
            for (int i : sub) mu = mu.hook(hbasis[static_cast<size_t>(i - 1)]);
            std::vector<mpq_class> row(static_cast<size_t>(n), mpq_class(0));
            bool nz = false;
            for (auto &[idx, c] : mu.terms()) {
                mpq_class v = c.eval(e.point);
                if (v != 0) nz = true;
                row[static_cast<size_t>(idx[0] - 1)] = v;
            }
            if (nz) rows.push_back(std::move(row));
        });
    }
    int rank = rows.empty() ? 0 : rank_of(rows);
    int solution_dim = n - rank;
    return solution_dim > p;
}

} // namespace eds
