#include "eds/prolong.hpp"
#include "eds/errors.hpp"
#include "eds/linalg.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace eds {

namespace {

/// Candidate names for prolongation parameters, matching the usual hand
/// notation; "d" is reserved for the exterior derivative.
const char *kParamPool[] = {"a", "b", "c", "e", "f", "g", "h", "k", "l", "m", "n", "q", "r", "u", "v"};

bool name_taken(const ManifoldPtr &m, const std::string &name) {
    if (m->has_scalar(name)) return true;
    if (m->coframe_index(name) != 0) return true;
    if (m->coframe_index("d" + name) != 0) return true;
    return false;
}

std::string fresh_param_name(const ManifoldPtr &m, std::vector<std::string> &used, size_t &pool_pos) {
    while (pool_pos < sizeof(kParamPool) / sizeof(kParamPool[0])) {
        std::string cand = kParamPool[pool_pos++];
        if (!name_taken(m, cand) && std::find(used.begin(), used.end(), cand) == used.end()) {
            used.push_back(cand);
            return cand;
        }
    }
    for (int i = 1;; ++i) {
        std::string cand = "p" + std::to_string(i);
        if (!name_taken(m, cand) && std::find(used.begin(), used.end(), cand) == used.end()) {
            used.push_back(cand);
            return cand;
        }
    }
}

TermMap reindex_terms(const TermMap &tm, int removed) {
    TermMap out;
    for (auto &[idx, c] : tm) {
        IndexTuple ni;
        ni.reserve(idx.size());
        for (int i : idx) {
            if (i == removed) throw Error("internal: removed coframe index still referenced");
            ni.push_back(i > removed ? i - 1 : i);
        }
        out.emplace(std::move(ni), c);
    }
    return out;
}

/// Solve A x = b pivoting on the rightmost columns, so the leftmost unknowns
/// stay free; this matches how the chart relations are solved by hand (the
/// early a-entries become the surviving parameters).
std::optional<LinearSolution<ScalarExpr>> solve_affine_rightmost(
    const std::vector<std::vector<ScalarExpr>> &a, const std::vector<ScalarExpr> &b, size_t n) {
    std::vector<std::vector<ScalarExpr>> rev(a.size(), std::vector<ScalarExpr>(n, ScalarExpr()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) rev[i][n - 1 - j] = a[i][j];
    auto sol = solve_linear(rev, b, n);
    if (!sol) return std::nullopt;
    LinearSolution<ScalarExpr> out;
    out.particular.assign(n, ScalarExpr());
    for (size_t j = 0; j < n; ++j) out.particular[j] = sol->particular[n - 1 - j];
    for (auto &kv : sol->kernel) {
        std::vector<ScalarExpr> v(n, ScalarExpr());
        for (size_t j = 0; j < n; ++j) v[j] = kv[n - 1 - j];
        out.kernel.push_back(std::move(v));
    }
    std::reverse(out.kernel.begin(), out.kernel.end());
    return out;
}

} // namespace

ProlongedSystem prolong(const ExteriorSystem &s, const Chart &chart) {
    const int p = s.p();
    const int q = chart.q();
    std::vector<ScalarExpr> eqs = chart_equations(s, chart);
    std::set<std::string> unknowns(chart.unknowns.begin(), chart.unknowns.end());

    // affine system A x = b over the rational-function field
    std::vector<std::vector<ScalarExpr>> a;
    std::vector<ScalarExpr> b;
    for (auto &eq : eqs) {
        std::map<std::string, ScalarExpr> coeffs;
        ScalarExpr cpart;
        if (!eq.linear_in(unknowns, coeffs, cpart)) throw AffineOnly(eq.str());
        std::vector<ScalarExpr> row(chart.unknowns.size(), ScalarExpr());
        for (size_t u = 0; u < chart.unknowns.size(); ++u) {
            auto it = coeffs.find(chart.unknowns[u]);
            if (it != coeffs.end()) row[u] = it->second;
        }
        a.push_back(std::move(row));
        b.push_back(-cpart);
    }
    auto sol = solve_affine_rightmost(a, b, chart.unknowns.size());
    if (!sol)
        throw BadIndependenceCondition("chart equations are inconsistent; the chart carries no "
                                       "integral elements");

    // each kernel vector owns one free column (its unit entry); those columns
    // become the new parameters, named in ascending column order
    ProlongedSystem ps;
    ps.base_chart = chart;
    std::vector<std::string> used;
    size_t pool_pos = 0;
    std::vector<ScalarExpr> kernel_sym(sol->kernel.size(), ScalarExpr());
    std::vector<std::pair<size_t, size_t>> free_order; // (column, kernel index)
    for (size_t t = 0; t < sol->kernel.size(); ++t) {
        size_t own = SIZE_MAX;
        for (size_t u = 0; u < chart.unknowns.size(); ++u) {
            if (!sol->kernel[t][u].is_one()) continue;
            bool owner = true;
            for (size_t t2 = 0; t2 < sol->kernel.size(); ++t2)
                if (t2 != t && !sol->kernel[t2][u].is_zero()) owner = false;
            if (owner) {
                own = u;
                break;
            }
        }
        if (own == SIZE_MAX) throw Error("internal: kernel vector without a free column");
        free_order.emplace_back(own, t);
    }
    std::sort(free_order.begin(), free_order.end());
    for (auto &[col, t] : free_order) {
        std::string nm = fresh_param_name(s.manifold(), used, pool_pos);
        ps.free_params.push_back(nm);
        ps.free_cols.emplace_back(static_cast<int>(col) / p, static_cast<int>(col) % p);
        kernel_sym[t] = ScalarExpr::symbol(nm);
    }

    // a-matrix entries as expressions in the new parameters
    ps.a_entries.assign(static_cast<size_t>(q), std::vector<ScalarExpr>(static_cast<size_t>(p)));
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < p; ++j) {
            size_t col = static_cast<size_t>(i * p + j);
            ScalarExpr v = sol->particular[col];
            for (size_t t = 0; t < sol->kernel.size(); ++t) {
                const ScalarExpr &kc = sol->kernel[t][col];
                if (!kc.is_zero()) v = v + kc * kernel_sym[t];
            }
            ps.a_entries[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
        }
    }

    // M' = M x R^(free params); each parameter's differential is a new coframe element
    std::vector<std::string> coframe = s.manifold()->coframe();
    std::map<std::string, TermMap> structure;
    for (int i = 1; i <= s.manifold()->dim(); ++i) {
        DForm dth = s.manifold()->d_theta(i);
        if (!dth.is_zero()) structure[coframe[static_cast<size_t>(i - 1)]] = dth.terms();
    }
    std::vector<std::pair<std::string, TermMap>> scalars;
    for (auto &sn : s.manifold()->scalar_names())
        scalars.emplace_back(sn, s.manifold()->scalar_differential(sn).terms());
    int next_index = s.manifold()->dim();
    for (auto &prm : ps.free_params) {
        coframe.push_back("d" + prm);
        ++next_index;
        TermMap diff;
        diff[IndexTuple{next_index}] = ScalarExpr(1);
        scalars.emplace_back(prm, std::move(diff));
    }
    ps.manifold = Manifold::create(s.manifold()->name() + "_1", coframe, structure, scalars);

    // generators: originals pulled back, plus theta'_i = pi_i - sum a_ij omega_j
    std::vector<DForm> gens;
    for (auto &g : s.generators()) gens.push_back(g.transfer(ps.manifold));
    for (int i = 0; i < q; ++i) {
        DForm th = ps.manifold->coframe_form(chart.pi[static_cast<size_t>(i)]);
        for (int j = 0; j < p; ++j) {
            const ScalarExpr &c = ps.a_entries[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (c.is_zero()) continue;
            th = th - ps.manifold->coframe_form(chart.omega[static_cast<size_t>(j)]).scale(c);
        }
        ps.new_generators.push_back(th);
        gens.push_back(th);
    }
    ps.system = ExteriorSystem::make(ps.manifold, gens, p, s.independence());

    // check d(original 1-forms) vanish modulo the span of the new 1-form system
    Chart nchart = make_chart(ps.system, ps.system.independence());
    std::map<int, std::vector<std::pair<int, ScalarExpr>>> pivot_repl = nchart.pivot_solve;
    for (auto &g : s.generators()) {
        if (g.degree() != 1) continue;
        DForm dg = g.transfer(ps.manifold).d().substitute_basis(pivot_repl);
        if (!dg.is_zero()) ps.originals_reduce = false;
    }

    ps.torsion = torsion_of(ps.system);
    return ps;
}

std::vector<ScalarExpr> torsion_of(const ExteriorSystem &s) {
    if (s.independence().empty())
        throw BadIndependenceCondition("torsion requires an independence condition");
    Chart chart = make_chart(s, s.independence());
    const auto &repl = chart.pivot_solve;

    const int n = s.manifold()->dim();
    std::vector<int> kind(static_cast<size_t>(n + 1), 0); // 0 = neither, 1 = omega, 2 = pi
    for (int i : chart.omega) kind[static_cast<size_t>(i)] = 1;
    for (int i : chart.pi) kind[static_cast<size_t>(i)] = 2;

    // unknown shift p_{k,i} for k in pi, i in omega
    std::vector<std::pair<int, int>> shift_cols;
    for (int k : chart.pi)
        for (int i : chart.omega) shift_cols.emplace_back(k, i);
    auto shift_col_index = [&](int k, int i) {
        for (size_t t = 0; t < shift_cols.size(); ++t)
            if (shift_cols[t].first == k && shift_cols[t].second == i) return t;
        throw Error("internal: shift column not found");
    };

    std::vector<std::vector<ScalarExpr>> rows;
    std::vector<ScalarExpr> rhs;
    for (auto &g : s.generators()) {
        if (g.degree() != 1) continue;
        DForm f = g.d().substitute_basis(repl);
        // tableau coefficients and omega-omega residues of this generator
        std::map<std::pair<int, int>, ScalarExpr> tableau; // (pi k, omega i) -> coeff of theta_k ^ omega_i
        std::map<std::pair<int, int>, ScalarExpr> torsion_terms;
        for (auto &[idx, c] : f.terms()) {
            int x = idx[0], y = idx[1];
            int kx = kind[static_cast<size_t>(x)], ky = kind[static_cast<size_t>(y)];
            if (kx == 2 && ky == 2)
                throw Error("non-Pfaffian residue " + f.str() +
                            ": two non-independence directions in one term");
            if (kx == 2 && ky == 1) {
                tableau[{x, y}] = c;
            } else if (kx == 1 && ky == 2) {
                tableau[{y, x}] = -c;
            } else if (kx == 1 && ky == 1) {
                torsion_terms[{x, y}] = c;
            } else {
                throw Error("internal: unreduced pivot direction in " + f.str());
            }
        }
        // one absorption equation per omega pair (i < j):
        //   T_ij + sum_k (A_{k,j} p_{k,i} - A_{k,i} p_{k,j}) = 0
        for (size_t a = 0; a < chart.omega.size(); ++a) {
            for (size_t b = a + 1; b < chart.omega.size(); ++b) {
                int i = std::min(chart.omega[a], chart.omega[b]);
                int j = std::max(chart.omega[a], chart.omega[b]);
                std::vector<ScalarExpr> row(shift_cols.size(), ScalarExpr());
                bool any = false;
                for (int k : chart.pi) {
                    auto itj = tableau.find({k, j});
                    if (itj != tableau.end() && !itj->second.is_zero()) {
                        row[shift_col_index(k, i)] = row[shift_col_index(k, i)] + itj->second;
                        any = true;
                    }
                    auto iti = tableau.find({k, i});
                    if (iti != tableau.end() && !iti->second.is_zero()) {
                        row[shift_col_index(k, j)] = row[shift_col_index(k, j)] - iti->second;
                        any = true;
                    }
                }
                ScalarExpr t;
                auto itt = torsion_terms.find({i, j});
                if (itt != torsion_terms.end()) t = itt->second;
                if (any || !t.is_zero()) {
                    rows.push_back(std::move(row));
                    rhs.push_back(-t);
                }
            }
        }
    }

    // eliminate the shift columns; rows left without a pivot carry the torsion
    const size_t ncols = shift_cols.size();
    size_t r = 0;
    for (size_t c = 0; c < ncols && r < rows.size(); ++c) {
        size_t sel = r;
        while (sel < rows.size() && rows[sel][c].is_zero()) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        std::swap(rhs[r], rhs[sel]);
        ScalarExpr piv = rows[r][c];
        for (auto &x : rows[r]) x = x / piv;
        rhs[r] = rhs[r] / piv;
        for (size_t i2 = 0; i2 < rows.size(); ++i2) {
            if (i2 == r || rows[i2][c].is_zero()) continue;
            ScalarExpr f = rows[i2][c];
            for (size_t j2 = 0; j2 < ncols; ++j2) rows[i2][j2] = rows[i2][j2] - f * rows[r][j2];
            rhs[i2] = rhs[i2] - f * rhs[r];
        }
        ++r;
    }
    std::vector<ScalarExpr> torsion;
    for (size_t i2 = r; i2 < rows.size(); ++i2) {
        if (rhs[i2].is_zero()) continue;
        ScalarExpr t = -rhs[i2]; // residual of T_ij after absorption
        bool dup = false;
        for (auto &u : torsion)
            if (u == t || u == -t) dup = true;
        if (!dup) torsion.push_back(t);
    }
    std::sort(torsion.begin(), torsion.end(),
              [](const ScalarExpr &x, const ScalarExpr &y) { return x.compare(y) < 0; });
    return torsion;
}

ProlongedSystem restrict_system(const ProlongedSystem &ps, const ScalarExpr &equation,
                                const std::string &solve_for) {
    if (equation.is_zero()) return ps;
    std::map<std::string, ScalarExpr> coeffs;
    ScalarExpr cpart;
    if (!equation.linear_in({solve_for}, coeffs, cpart) || !coeffs.count(solve_for))
        throw NotSolvable(solve_for);
    ScalarExpr alpha = coeffs.at(solve_for);
    if (alpha.is_zero()) throw NotSolvable(solve_for);
    return restrict_with_substitution(ps, solve_for, -(cpart / alpha));
}

ProlongedSystem restrict_with_substitution(const ProlongedSystem &ps, const std::string &solve_for,
                                           const ScalarExpr &expr) {
    const ManifoldPtr &m = ps.manifold;
    if (expr.symbols().count(solve_for)) throw NotSolvable(solve_for);
    if (!m->has_scalar(solve_for)) throw NotSolvable(solve_for);
    DForm dsym = m->scalar_differential(solve_for);
    // the coframe element carrying the parameter differential
    if (dsym.terms().size() != 1 || !dsym.terms().begin()->second.is_one())
        throw NotSolvable(solve_for);
    int k0 = dsym.terms().begin()->first[0];

    std::map<std::string, ScalarExpr> bind{{solve_for, expr}};
    DForm dexpr = m->d_scalar(expr).substitute_scalars(bind);
    std::vector<std::pair<int, ScalarExpr>> combo;
    for (auto &[idx, c] : dexpr.terms()) {
        if (idx[0] == k0) throw Error("internal: eliminated differential reappears in d(" + expr.str() + ")");
        combo.emplace_back(idx[0], c);
    }
    std::map<int, std::vector<std::pair<int, ScalarExpr>>> brepl{{k0, combo}};

    auto rewrite = [&](const DForm &f) {
        return reindex_terms(f.substitute_scalars(bind).substitute_basis(brepl).terms(), k0);
    };

    std::vector<std::string> coframe;
    for (int i = 1; i <= m->dim(); ++i)
        if (i != k0) coframe.push_back(m->coframe()[static_cast<size_t>(i - 1)]);
    std::map<std::string, TermMap> structure;
    for (int i = 1; i <= m->dim(); ++i) {
        if (i == k0) continue;
        TermMap tm = rewrite(m->d_theta(i));
        if (!tm.empty()) structure[m->coframe()[static_cast<size_t>(i - 1)]] = tm;
    }
    std::vector<std::pair<std::string, TermMap>> scalars;
    for (auto &sn : m->scalar_names()) {
        if (sn == solve_for) continue;
        scalars.emplace_back(sn, rewrite(m->scalar_differential(sn)));
    }
    ManifoldPtr m0 = Manifold::create(m->name() + "0", coframe, structure, scalars);

    auto transfer_form = [&](const DForm &f) {
        return DForm(m0, f.degree(), rewrite(f));
    };

    std::vector<int> indep;
    for (int i : ps.system.independence()) {
        if (i == k0) throw BadIndependenceCondition("cannot restrict along an independence direction");
        indep.push_back(i > k0 ? i - 1 : i);
    }
    std::vector<DForm> gens;
    for (auto &g : ps.system.generators()) gens.push_back(transfer_form(g));

    ProlongedSystem out;
    out.manifold = m0;
    out.system = ExteriorSystem::make(m0, gens, ps.system.p(), indep);
    out.base_chart = ps.base_chart;
    for (size_t i = 0; i < ps.free_params.size(); ++i) {
        if (ps.free_params[i] == solve_for) continue;
        out.free_params.push_back(ps.free_params[i]);
        out.free_cols.push_back(ps.free_cols[i]);
    }
    out.a_entries.assign(ps.a_entries.size(), {});
    for (size_t i = 0; i < ps.a_entries.size(); ++i)
        for (auto &c : ps.a_entries[i]) out.a_entries[i].push_back(c.substitute(bind));
    for (auto &g : ps.new_generators) out.new_generators.push_back(transfer_form(g));
    out.originals_reduce = ps.originals_reduce;
    out.torsion = torsion_of(out.system);
    return out;
}

std::vector<ProlongationStep> iterate_prolongation(const ExteriorSystem &s, const Point &pt,
                                                   std::uint64_t seed, int max_steps) {
    std::vector<ProlongationStep> steps;
    ExteriorSystem current = s;
    Point point = pt;
    std::mt19937_64 rng(seed);
    auto dist = [&rng]() { return static_cast<int>(rng() % 11) - 5; };

    for (int step = 0; step <= max_steps; ++step) {
        ProlongationStep st;
        Chart chart = make_chart(current, current.independence(), &point);
        // generic element: particular solution plus a random kernel combination
        std::vector<ScalarExpr> eqs = chart_equations(current, chart);
        std::set<std::string> unknowns(chart.unknowns.begin(), chart.unknowns.end());
        std::vector<std::vector<ScalarExpr>> a;
        std::vector<ScalarExpr> b;
        bool affine = true;
        for (auto &eq : eqs) {
            std::map<std::string, ScalarExpr> coeffs;
            ScalarExpr cpart;
            if (!eq.linear_in(unknowns, coeffs, cpart)) {
                affine = false;
                break;
            }
            std::vector<ScalarExpr> row(chart.unknowns.size(), ScalarExpr());
            for (size_t u = 0; u < chart.unknowns.size(); ++u) {
                auto it = coeffs.find(chart.unknowns[u]);
                if (it != coeffs.end()) row[u] = it->second;
            }
            a.push_back(std::move(row));
            b.push_back(-cpart);
        }
        if (!affine) {
            st.status = ProlongationStatus::AffineOnly;
            steps.push_back(std::move(st));
            return steps;
        }
        auto sol = solve_linear(a, b, chart.unknowns.size());
        if (!sol)
            throw BadIndependenceCondition("no integral elements in the chart at this point");
        const int p = current.p();
        const int q = chart.q();
        std::vector<std::vector<mpq_class>> amat(static_cast<size_t>(q),
                                                 std::vector<mpq_class>(static_cast<size_t>(p)));
        std::vector<mpq_class> coeffs_rand;
        for (size_t t = 0; t < sol->kernel.size(); ++t) coeffs_rand.push_back(dist());
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < p; ++j) {
                size_t col = static_cast<size_t>(i * p + j);
                ScalarExpr v = sol->particular[col];
                for (size_t t = 0; t < sol->kernel.size(); ++t)
                    if (!sol->kernel[t][col].is_zero())
                        v = v + ScalarExpr::rational(coeffs_rand[t]) * sol->kernel[t][col];
                amat[static_cast<size_t>(i)][static_cast<size_t>(j)] = v.eval(point);
            }
        IntegralElement e = element_from_chart(current, chart, point, amat);
        st.report = cartan_test(current, e, seed + static_cast<std::uint64_t>(step));
        if (st.report.involutive) {
            st.status = ProlongationStatus::Involutive;
            steps.push_back(std::move(st));
            return steps;
        }
        ProlongedSystem ps = prolong(current, chart);
        st.torsion = ps.torsion;
        if (!ps.torsion.empty()) {
            st.status = ProlongationStatus::TorsionRequiresRestriction;
            st.prolonged = std::move(ps);
            steps.push_back(std::move(st));
            return steps;
        }
        // extend the point with the free-parameter values of the chosen element
        for (size_t t = 0; t < ps.free_params.size(); ++t) {
            auto [ri, cj] = ps.free_cols[t];
            point.set(ps.free_params[t], amat[static_cast<size_t>(ri)][static_cast<size_t>(cj)]);
        }
        ExteriorSystem next = ps.system;
        st.prolonged = std::move(ps);
        st.status = ProlongationStatus::MaxSteps;
        steps.push_back(std::move(st));
        current = next;
    }
    return steps;
}

} // namespace eds
