#include "eds/manifold.hpp"
#include "eds/dform.hpp"
#include "eds/errors.hpp"

namespace eds {

TangentVector TangentVector::basis(int dim, int i) {
    TangentVector v;
    v.comps.assign(static_cast<size_t>(dim), ScalarExpr());
    v.comps[static_cast<size_t>(i - 1)] = ScalarExpr(1);
    return v;
}

std::vector<mpq_class> TangentVector::numeric(const Point &p) const {
    std::vector<mpq_class> out;
    out.reserve(comps.size());
    for (auto &c : comps) out.push_back(c.eval(p));
    return out;
}

ManifoldPtr Manifold::create(std::string name, std::vector<std::string> coframe,
                             std::map<std::string, TermMap> structure,
                             std::vector<std::pair<std::string, TermMap>> scalars) {
    auto m = std::shared_ptr<Manifold>(new Manifold());
    m->name_ = std::move(name);
    m->coframe_ = std::move(coframe);
    m->structure_.assign(m->coframe_.size(), TermMap{});
    for (auto &[cname, tm] : structure) {
        int idx = m->coframe_index(cname);
        if (idx == 0) throw UnknownSymbol(cname);
        m->structure_[static_cast<size_t>(idx - 1)] = tm;
    }
    for (auto &[sname, tm] : scalars) {
        if (m->scalar_diff_.count(sname)) throw Error("scalar declared twice: " + sname);
        if (m->coframe_index(sname) != 0) throw Error("scalar name collides with coframe: " + sname);
        m->scalar_names_.push_back(sname);
        m->scalar_diff_[sname] = tm;
    }
    m->validate();
    return m;
}

ManifoldPtr Manifold::coordinates(std::string name, const std::vector<std::string> &coords) {
    std::vector<std::string> coframe;
    std::vector<std::pair<std::string, TermMap>> scalars;
    for (size_t i = 0; i < coords.size(); ++i) {
        coframe.push_back("d" + coords[i]);
        TermMap df;
        df[IndexTuple{static_cast<int>(i + 1)}] = ScalarExpr(1);
        scalars.emplace_back(coords[i], std::move(df));
    }
    auto m = std::shared_ptr<Manifold>(new Manifold());
    m->name_ = std::move(name);
    m->coframe_ = std::move(coframe);
    m->structure_.assign(m->coframe_.size(), TermMap{});
    for (auto &[sname, tm] : scalars) {
        m->scalar_names_.push_back(sname);
        m->scalar_diff_[sname] = tm;
    }
    m->coordinate_ = true;
    m->validate();
    return m;
}

int Manifold::coframe_index(const std::string &name) const {
    for (size_t i = 0; i < coframe_.size(); ++i)
        if (coframe_[i] == name) return static_cast<int>(i + 1);
    return 0;
}

DForm Manifold::d_theta(int i) const {
    return DForm(shared_from_this(), 2, structure_[static_cast<size_t>(i - 1)]);
}

DForm Manifold::scalar_differential(const std::string &name) const {
    auto it = scalar_diff_.find(name);
    if (it == scalar_diff_.end()) throw UnknownSymbol(name);
    return DForm(shared_from_this(), 1, it->second);
}

DForm Manifold::d_scalar(const ScalarExpr &c) const {
    DForm acc = zero_form(1);
    for (auto &sym : c.symbols()) acc = acc + scalar_differential(sym).scale(c.derivative(sym));
    return acc;
}

DForm Manifold::zero_form(int degree) const { return DForm(shared_from_this(), degree, {}); }

DForm Manifold::coframe_form(int i) const {
    TermMap tm;
    tm[IndexTuple{i}] = ScalarExpr(1);
    return DForm(shared_from_this(), 1, std::move(tm));
}

DForm Manifold::scalar_form(const ScalarExpr &c) const {
    TermMap tm;
    if (!c.is_zero()) tm[IndexTuple{}] = c;
    return DForm(shared_from_this(), 0, std::move(tm));
}

DForm Manifold::form(int degree, TermMap terms) const {
    return DForm(shared_from_this(), degree, std::move(terms));
}

void Manifold::validate() const {
    for (int i = 1; i <= dim(); ++i) {
        DForm dd = d_theta(i).d();
        if (!dd.is_zero()) throw DSquaredNonzero(coframe_[static_cast<size_t>(i - 1)], dd.str());
    }
    for (auto &sname : scalar_names_) {
        DForm dd = scalar_differential(sname).d();
        if (!dd.is_zero()) throw DSquaredNonzero(sname, dd.str());
    }
}

} // namespace eds
