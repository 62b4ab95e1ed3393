#include "eds/dform.hpp"
#include "eds/errors.hpp"
#include "eds/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

namespace eds {

int merge_indices(const IndexTuple &a, const IndexTuple &b, IndexTuple &out) {
    out.clear();
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    int inversions = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return 0;
        if (a[i] < b[j]) {
            out.push_back(a[i++]);
        } else {
            // b[j] jumps over the remaining entries of a
            inversions += static_cast<int>(a.size() - i);
            out.push_back(b[j++]);
        }
    }
    while (i < a.size()) out.push_back(a[i++]);
    while (j < b.size()) out.push_back(b[j++]);
    return (inversions % 2 == 0) ? 1 : -1;
}

DForm::DForm(ManifoldPtr m, int degree, TermMap terms)
    : m_(std::move(m)), degree_(degree), terms_(std::move(terms)) {
    assert(m_ != nullptr);
    if (degree_ > m_->dim()) terms_.clear(); // degree beyond dim is identically zero
    for (auto it = terms_.begin(); it != terms_.end();) {
        const IndexTuple &idx = it->first;
        if (static_cast<int>(idx.size()) != degree_)
            throw Error("multi-index length does not match the form degree");
        for (size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] < 1 || idx[k] > m_->dim())
                throw Error("multi-index out of coframe range");
            if (k > 0 && idx[k - 1] >= idx[k])
                throw Error("multi-index must be strictly increasing");
        }
        if (it->second.is_zero())
            it = terms_.erase(it);
        else
            ++it;
    }
}

DForm DForm::operator+(const DForm &o) const {
    assert(degree_ == o.degree_);
    TermMap t = terms_;
    for (auto &[idx, c] : o.terms_) {
        auto it = t.find(idx);
        if (it == t.end()) {
            t.emplace(idx, c);
        } else {
            it->second = it->second + c;
            if (it->second.is_zero()) t.erase(it);
        }
    }
    return DForm(m_ ? m_ : o.m_, degree_, std::move(t));
}

DForm DForm::operator-(const DForm &o) const { return *this + (-o); }

DForm DForm::operator-() const {
    TermMap t;
    for (auto &[idx, c] : terms_) t.emplace(idx, -c);
    return DForm(m_, degree_, std::move(t));
}

DForm DForm::scale(const ScalarExpr &c) const {
    TermMap t;
    if (!c.is_zero())
        for (auto &[idx, k] : terms_) t.emplace(idx, k * c);
    return DForm(m_, degree_, std::move(t));
}

DForm DForm::wedge(const DForm &o) const {
    assert(m_ == o.m_ || !m_ || !o.m_);
    int deg = degree_ + o.degree_;
    TermMap t;
    if (deg <= m_->dim()) {
        for (auto &[ia, ca] : terms_) {
            for (auto &[ib, cb] : o.terms_) {
                IndexTuple merged;
                int sign = merge_indices(ia, ib, merged);
                if (sign == 0) continue;
                ScalarExpr c = ca * cb;
                if (sign < 0) c = -c;
                auto it = t.find(merged);
                if (it == t.end()) {
                    t.emplace(std::move(merged), c);
                } else {
                    it->second = it->second + c;
                    if (it->second.is_zero()) t.erase(it);
                }
            }
        }
    }
    return DForm(m_, deg, std::move(t));
}

DForm DForm::d() const {
    DForm acc = m_->zero_form(degree_ + 1);
    for (auto &[idx, c] : terms_) {
        // dc wedge theta^I
        DForm dc = m_->d_scalar(c);
        DForm theta_I = m_->scalar_form(ScalarExpr(1));
        for (int i : idx) theta_I = theta_I.wedge(m_->coframe_form(i));
        acc = acc + dc.wedge(theta_I);
        // c * sum_j (-1)^(j-1) theta^(I<j) ^ d theta_(i_j) ^ theta^(I>j)
        for (size_t j = 0; j < idx.size(); ++j) {
            DForm piece = m_->scalar_form((j % 2 == 0) ? c : -c);
            for (size_t k = 0; k < j; ++k) piece = piece.wedge(m_->coframe_form(idx[k]));
            piece = piece.wedge(m_->d_theta(idx[j]));
            for (size_t k = j + 1; k < idx.size(); ++k) piece = piece.wedge(m_->coframe_form(idx[k]));
            acc = acc + piece;
        }
    }
    return acc;
}

DForm DForm::hook(const TangentVector &v) const {
    if (degree_ == 0) throw DegreeError("interior product of a 0-form");
    assert(static_cast<int>(v.comps.size()) == m_->dim());
    TermMap t;
    DForm acc = m_->zero_form(degree_ - 1);
    for (auto &[idx, c] : terms_) {
        for (size_t j = 0; j < idx.size(); ++j) {
            const ScalarExpr &vc = v.comps[static_cast<size_t>(idx[j] - 1)];
            if (vc.is_zero()) continue;
            ScalarExpr coeff = (j % 2 == 0) ? c * vc : -(c * vc);
            IndexTuple rest;
            rest.reserve(idx.size() - 1);
            for (size_t k = 0; k < idx.size(); ++k)
                if (k != j) rest.push_back(idx[k]);
            TermMap single;
            single.emplace(std::move(rest), coeff);
            acc = acc + DForm(m_, degree_ - 1, std::move(single));
        }
    }
    return acc;
}

namespace {

mpq_class det_exact(std::vector<std::vector<mpq_class>> m) {
    const size_t n = m.size();
    mpq_class det = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t sel = c;
        while (sel < n && m[sel][c] == 0) ++sel;
        if (sel == n) return 0;
        if (sel != c) {
            std::swap(m[sel], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (size_t i = c + 1; i < n; ++i) {
            if (m[i][c] == 0) continue;
            mpq_class f = m[i][c] / m[c][c];
            for (size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
        }
    }
    return det;
}

} // namespace

mpq_class DForm::eval_on_vectors(const Point &p, const std::vector<TangentVector> &vs) const {
    if (static_cast<int>(vs.size()) != degree_)
        throw DegreeError("eval_on_vectors: expected " + std::to_string(degree_) + " vectors, got " +
                          std::to_string(vs.size()));
    std::vector<std::vector<mpq_class>> comps;
    comps.reserve(vs.size());
    for (auto &v : vs) comps.push_back(v.numeric(p));
    mpq_class acc = 0;
    for (auto &[idx, c] : terms_) {
        if (degree_ == 0) {
            acc += c.eval(p);
            continue;
        }
        std::vector<std::vector<mpq_class>> sub(idx.size(), std::vector<mpq_class>(idx.size()));
        for (size_t a = 0; a < idx.size(); ++a)
            for (size_t b = 0; b < idx.size(); ++b)
                sub[a][b] = comps[b][static_cast<size_t>(idx[a] - 1)];
        mpq_class dt = det_exact(std::move(sub));
        if (dt != 0) acc += c.eval(p) * dt;
    }
    return acc;
}

SubspaceForm DForm::restrict_to_subspace(const Point &p, const std::vector<TangentVector> &basis) const {
    std::vector<std::vector<mpq_class>> rows;
    for (auto &v : basis) rows.push_back(v.numeric(p));
    if (rank_of(rows) != static_cast<int>(basis.size())) throw DependentBasis();
    SubspaceForm out;
    out.degree = degree_;
    const int m = static_cast<int>(basis.size());
    if (degree_ > m) return out;
    // enumerate strictly increasing tuples of subspace indices
    IndexTuple pick(static_cast<size_t>(degree_));
    std::vector<TangentVector> sel(static_cast<size_t>(degree_));
    std::function<void(int, int)> rec = [&](int pos, int start) {
        if (pos == degree_) {
            for (int i = 0; i < degree_; ++i) sel[static_cast<size_t>(i)] = basis[static_cast<size_t>(pick[static_cast<size_t>(i)] - 1)];
            mpq_class v = eval_on_vectors(p, sel);
            if (v != 0) out.terms[pick] = v;
            return;
        }
        for (int i = start; i <= m; ++i) {
            pick[static_cast<size_t>(pos)] = i;
            rec(pos + 1, i + 1);
        }
    };
    if (degree_ == 0) {
        mpq_class v = eval_on_vectors(p, {});
        if (v != 0) out.terms[IndexTuple{}] = v;
    } else {
        rec(0, 1);
    }
    return out;
}

DForm DForm::substitute_basis(const std::map<int, std::vector<std::pair<int, ScalarExpr>>> &repl) const {
    DForm acc = m_->zero_form(degree_);
    for (auto &[idx, c] : terms_) {
        DForm piece = m_->scalar_form(c);
        for (int i : idx) {
            auto it = repl.find(i);
            if (it == repl.end()) {
                piece = piece.wedge(m_->coframe_form(i));
            } else {
                TermMap combo;
                for (auto &[k, coeff] : it->second) {
                    assert(repl.find(k) == repl.end() && "substitution target is itself replaced");
                    auto jt = combo.find(IndexTuple{k});
                    if (jt == combo.end())
                        combo.emplace(IndexTuple{k}, coeff);
                    else
                        jt->second = jt->second + coeff;
                }
                piece = piece.wedge(DForm(m_, 1, std::move(combo)));
            }
        }
        acc = acc + piece;
    }
    return acc;
}

DForm DForm::substitute_scalars(const std::map<std::string, ScalarExpr> &bindings) const {
    TermMap t;
    for (auto &[idx, c] : terms_) {
        ScalarExpr nc = c.substitute(bindings);
        if (!nc.is_zero()) t.emplace(idx, nc);
    }
    return DForm(m_, degree_, std::move(t));
}

DForm DForm::transfer(const ManifoldPtr &bigger) const {
    assert(bigger->dim() >= m_->dim());
    for (int i = 0; i < m_->dim(); ++i)
        assert(bigger->coframe()[static_cast<size_t>(i)] == m_->coframe()[static_cast<size_t>(i)]);
    return DForm(bigger, degree_, terms_);
}

std::string DForm::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto &[idx, c] : terms_) {
        std::string cs = c.str();
        bool neg = !cs.empty() && cs[0] == '-' && cs.find_first_of("+-", 1) == std::string::npos;
        if (!first) os << " + ";
        first = false;
        bool trivial = c.is_one();
        bool wrap = !trivial && (cs.find_first_of("+- ") != std::string::npos);
        if (idx.empty()) {
            os << (wrap && !neg ? "(" + cs + ")" : cs);
            continue;
        }
        if (!trivial) {
            os << (wrap ? "(" + cs + ")" : cs) << "*";
        }
        for (size_t k = 0; k < idx.size(); ++k) {
            if (k) os << "^";
            os << m_->coframe()[static_cast<size_t>(idx[k] - 1)];
        }
    }
    return os.str();
}

} // namespace eds
