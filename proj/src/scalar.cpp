#include "eds/scalar.hpp"
#include "eds/errors.hpp"

#include <sstream>

namespace eds {

const mpq_class &Point::get(const std::string &sym) const {
    auto it = vals_.find(sym);
    if (it == vals_.end()) throw UnboundSymbol(sym);
    return it->second;
}

ScalarExpr ScalarExpr::make(Poly num, Poly den) {
    if (den.is_zero()) throw ZeroDivision();
    if (num.is_zero()) {
        den = Poly::constant(1);
    } else {
        Poly g = poly_gcd(num, den);
        if (!(g.is_constant() && g.constant_value() == 1)) {
            num = num.exact_div(g);
            den = den.exact_div(g);
        }
        if (den.leading_coeff() < 0) {
            num = -num;
            den = -den;
        }
    }
    auto impl = std::make_shared<Impl>();
    impl->num = std::move(num);
    impl->den = std::move(den);
    return ScalarExpr(std::move(impl));
}

ScalarExpr::ScalarExpr() {
    static const ScalarExpr z = make(Poly(), Poly::constant(1));
    impl_ = z.impl_;
}

ScalarExpr::ScalarExpr(long v) : ScalarExpr() {
    if (v != 0) *this = make(Poly::constant(mpz_class(v)), Poly::constant(1));
}

ScalarExpr ScalarExpr::integer(const mpz_class &v) { return make(Poly::constant(v), Poly::constant(1)); }

ScalarExpr ScalarExpr::rational(const mpz_class &num, const mpz_class &den) {
    return make(Poly::constant(num), Poly::constant(den));
}

ScalarExpr ScalarExpr::rational(const mpq_class &q) {
    return make(Poly::constant(q.get_num()), Poly::constant(q.get_den()));
}

ScalarExpr ScalarExpr::symbol(const std::string &name) {
    return make(Poly::variable(name), Poly::constant(1));
}

ScalarExpr ScalarExpr::fraction(Poly num, Poly den) { return make(std::move(num), std::move(den)); }

const Poly &ScalarExpr::num() const { return impl_->num; }
const Poly &ScalarExpr::den() const { return impl_->den; }

bool ScalarExpr::is_zero() const { return impl_->num.is_zero(); }

bool ScalarExpr::is_one() const {
    return impl_->num.is_constant() && impl_->num.constant_value() == 1 && impl_->den.is_constant() &&
           impl_->den.constant_value() == 1;
}

bool ScalarExpr::is_constant() const { return impl_->num.is_constant() && impl_->den.is_constant(); }

mpq_class ScalarExpr::constant_value() const {
    mpq_class q(impl_->num.constant_value(), impl_->den.constant_value());
    q.canonicalize();
    return q;
}

ScalarExpr ScalarExpr::operator-() const { return make(-impl_->num, impl_->den); }

ScalarExpr ScalarExpr::operator+(const ScalarExpr &o) const {
    return make(impl_->num * o.impl_->den + o.impl_->num * impl_->den, impl_->den * o.impl_->den);
}

ScalarExpr ScalarExpr::operator-(const ScalarExpr &o) const {
    return make(impl_->num * o.impl_->den - o.impl_->num * impl_->den, impl_->den * o.impl_->den);
}

ScalarExpr ScalarExpr::operator*(const ScalarExpr &o) const {
    return make(impl_->num * o.impl_->num, impl_->den * o.impl_->den);
}

ScalarExpr ScalarExpr::operator/(const ScalarExpr &o) const {
    if (o.is_zero()) throw ZeroDivision();
    return make(impl_->num * o.impl_->den, impl_->den * o.impl_->num);
}

ScalarExpr ScalarExpr::pow(long e) const {
    if (e == 0) return ScalarExpr(1);
    bool inv = e < 0;
    unsigned long k = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    if (inv && is_zero()) throw ZeroDivision();
    Poly n = impl_->num.pow(static_cast<unsigned>(k));
    Poly d = impl_->den.pow(static_cast<unsigned>(k));
    return inv ? make(std::move(d), std::move(n)) : make(std::move(n), std::move(d));
}

bool ScalarExpr::operator==(const ScalarExpr &o) const {
    return impl_->num == o.impl_->num && impl_->den == o.impl_->den;
}

int ScalarExpr::compare(const ScalarExpr &o) const {
    int c = impl_->num.compare(o.impl_->num);
    if (c != 0) return c;
    return impl_->den.compare(o.impl_->den);
}

mpq_class ScalarExpr::eval(const Point &p) const {
    mpq_class d = impl_->den.eval(p.values());
    if (d == 0) throw PoleAtPoint(str());
    mpq_class n = impl_->num.eval(p.values());
    mpq_class r = n / d;
    r.canonicalize();
    return r;
}

namespace {

ScalarExpr eval_poly_symbolic(const Poly &p, const std::map<std::string, ScalarExpr> &bindings) {
    ScalarExpr acc;
    for (auto &[m, c] : p.terms()) {
        ScalarExpr t = ScalarExpr::integer(c);
        for (auto &[v, e] : m) {
            auto it = bindings.find(v);
            ScalarExpr base = (it != bindings.end()) ? it->second : ScalarExpr::symbol(v);
            t = t * base.pow(static_cast<long>(e));
        }
        acc = acc + t;
    }
    return acc;
}

} // namespace

ScalarExpr ScalarExpr::substitute(const std::map<std::string, ScalarExpr> &bindings) const {
    ScalarExpr n = eval_poly_symbolic(impl_->num, bindings);
    ScalarExpr d = eval_poly_symbolic(impl_->den, bindings);
    return n / d;
}

ScalarExpr ScalarExpr::derivative(const std::string &var) const {
    // (n' d - n d') / d^2
    Poly n = impl_->num, d = impl_->den;
    return make(n.derivative(var) * d - n * d.derivative(var), d * d);
}

std::set<std::string> ScalarExpr::symbols() const {
    std::set<std::string> s = impl_->num.variables();
    auto t = impl_->den.variables();
    s.insert(t.begin(), t.end());
    return s;
}

int ScalarExpr::poly_degree_in(const std::set<std::string> &unknowns) const {
    for (auto &v : impl_->den.variables())
        if (unknowns.count(v)) return -1;
    int deg = 0;
    for (auto &[m, c] : impl_->num.terms()) {
        int d = 0;
        for (auto &[v, e] : m)
            if (unknowns.count(v)) d += static_cast<int>(e);
        deg = std::max(deg, d);
    }
    return deg;
}

bool ScalarExpr::linear_in(const std::set<std::string> &unknowns,
                           std::map<std::string, ScalarExpr> &coeffs, ScalarExpr &constant_part) const {
    coeffs.clear();
    constant_part = ScalarExpr();
    for (auto &v : impl_->den.variables())
        if (unknowns.count(v)) return false;
    Poly cpart;
    std::map<std::string, Poly> cs;
    for (auto &[m, c] : impl_->num.terms()) {
        std::string hit;
        int deg = 0;
        for (auto &[v, e] : m) {
            if (unknowns.count(v)) {
                deg += static_cast<int>(e);
                hit = v;
            }
        }
        if (deg == 0) {
            cpart.add_term(m, c);
        } else if (deg == 1) {
            Monomial rest = m;
            rest.erase(hit);
            cs[hit].add_term(rest, c);
        } else {
            return false;
        }
    }
    for (auto &[v, p] : cs) coeffs.emplace(v, make(p, impl_->den));
    constant_part = make(cpart, impl_->den);
    return true;
}

std::string ScalarExpr::str() const {
    if (impl_->den.is_constant() && impl_->den.constant_value() == 1) return impl_->num.str();
    std::ostringstream os;
    bool simple_num = impl_->num.terms().size() <= 1;
    bool simple_den = impl_->den.terms().size() <= 1 && impl_->den.variables().empty();
    if (simple_num && impl_->num.leading_coeff() >= 0)
        os << impl_->num.str();
    else
        os << "(" << impl_->num.str() << ")";
    os << "/";
    if (simple_den)
        os << impl_->den.str();
    else
        os << "(" << impl_->den.str() << ")";
    return os.str();
}

ScalarExpr operator*(long c, const ScalarExpr &e) { return ScalarExpr(c) * e; }

} // namespace eds
