#include "eds/system.hpp"
#include "eds/errors.hpp"
#include "eds/linalg.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace eds {

std::string IntegralWitness::describe(const ExteriorSystem &s) const {
    std::ostringstream os;
    os << "form #" << closure_index << " (" << s.closure()[static_cast<size_t>(closure_index)].str()
       << ") evaluates to " << value.get_str() << " on basis vectors {";
    for (size_t i = 0; i < subset.size(); ++i) os << (i ? "," : "") << subset[i];
    os << "}";
    return os.str();
}

ExteriorSystem ExteriorSystem::make(ManifoldPtr m, std::vector<DForm> generators, int p,
                                    std::vector<int> independence) {
    ExteriorSystem s;
    s.m_ = std::move(m);
    s.p_ = p;
    s.independence_ = std::move(independence);
    if (p < 1 || p > s.m_->dim()) throw Error("p must satisfy 1 <= p <= dim M");
    for (auto &g : generators) {
        if (g.is_zero()) continue;
        if (g.degree() == 0) throw DegreeZeroGenerator();
        if (g.degree() > p) continue; // ignored under the degree cutoff
        s.generators_.push_back(g);
    }
    // closure: generators plus their exterior derivatives, degree-filtered, deduplicated
    std::vector<DForm> cl = s.generators_;
    for (auto &g : s.generators_) {
        DForm dg = g.d();
        if (!dg.is_zero() && dg.degree() <= p) cl.push_back(dg);
    }
    for (auto &f : cl) {
        bool dup = false;
        for (auto &h : s.closure_)
            if (h.same_terms(f)) {
                dup = true;
                break;
            }
        if (!dup) s.closure_.push_back(f);
    }
    std::stable_sort(s.closure_.begin(), s.closure_.end(),
                     [](const DForm &a, const DForm &b) { return a.degree() < b.degree(); });
    return s;
}

std::vector<DForm> ExteriorSystem::one_forms() const { return closure_up_to(1); }

std::vector<DForm> ExteriorSystem::closure_up_to(int deg) const {
    std::vector<DForm> out;
    for (auto &f : closure_)
        if (f.degree() <= deg) out.push_back(f);
    return out;
}

namespace {

void subsets_rec(int n, int k, int start, std::vector<int> &cur,
                 const std::function<bool(const std::vector<int> &)> &fn, bool &stop) {
    if (stop) return;
    if (static_cast<int>(cur.size()) == k) {
        if (!fn(cur)) stop = true;
        return;
    }
    for (int i = start; i <= n; ++i) {
        cur.push_back(i);
        subsets_rec(n, k, i + 1, cur, fn, stop);
        cur.pop_back();
        if (stop) return;
    }
}

/// Visit all k-subsets of {1..n}; fn returns false to stop early.
void for_each_subset(int n, int k, const std::function<bool(const std::vector<int> &)> &fn) {
    std::vector<int> cur;
    bool stop = false;
    subsets_rec(n, k, 1, cur, fn, stop);
}

} // namespace

IntegralCheck ExteriorSystem::is_integral_element(const Point &pt,
                                                  const std::vector<TangentVector> &basis) const {
    {
        std::vector<std::vector<mpq_class>> rows;
        for (auto &v : basis) rows.push_back(v.numeric(pt));
        if (rank_of(rows) != static_cast<int>(basis.size())) throw DependentBasis();
    }
    IntegralCheck chk;
    chk.ok = true;
    const int nb = static_cast<int>(basis.size());
    for (size_t ci = 0; ci < closure_.size(); ++ci) {
        const DForm &f = closure_[ci];
        int g = f.degree();
        if (g > nb) continue;
        for_each_subset(nb, g, [&](const std::vector<int> &sub) {
            std::vector<TangentVector> vs;
            vs.reserve(sub.size());
            for (int i : sub) vs.push_back(basis[static_cast<size_t>(i - 1)]);
            mpq_class v = f.eval_on_vectors(pt, vs);
            if (v != 0) {
                chk.ok = false;
                IntegralWitness w;
                w.closure_index = static_cast<int>(ci);
                w.subset = sub;
                w.value = v;
                chk.witness = std::move(w);
                return false;
            }
            return true;
        });
        if (!chk.ok) break;
    }
    return chk;
}

IntegralElement make_integral_element(const ExteriorSystem &s, const Point &p,
                                      std::vector<TangentVector> basis) {
    IntegralCheck chk = s.is_integral_element(p, basis);
    if (!chk.ok) throw Error("not an integral element: " + chk.witness->describe(s));
    IntegralElement e;
    e.point = p;
    e.basis = std::move(basis);
    return e;
}

} // namespace eds
