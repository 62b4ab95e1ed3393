#include "eds/poly.hpp"
#include "eds/errors.hpp"

#include <cassert>
#include <stdexcept>
#include <sstream>

namespace eds {

unsigned total_degree(const Monomial &m) {
    unsigned d = 0;
    for (auto &[v, e] : m) d += e;
    return d;
}

bool MonoCmp::operator()(const Monomial &a, const Monomial &b) const {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    // lex: larger power of the lexicographically first differing variable wins
    auto ia = a.begin(), ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first != ib->first) {
            // the monomial owning the earlier variable is lex-larger
            return ia->first > ib->first; // a has later var => a smaller
        }
        if (ia->second != ib->second) return ia->second < ib->second;
        ++ia;
        ++ib;
    }
    // one is a prefix of the other; equal total degree forces both exhausted
    return ib != b.end();
}

Poly Poly::constant(const mpz_class &c) {
    Poly p;
    if (c != 0) p.terms_[Monomial{}] = c;
    return p;
}

Poly Poly::variable(const std::string &name, unsigned exp) {
    Poly p;
    if (exp == 0) return constant(1);
    p.terms_[Monomial{{name, exp}}] = 1;
    return p;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

const mpz_class &Poly::constant_value() const {
    static const mpz_class zero = 0;
    if (terms_.empty()) return zero;
    assert(is_constant());
    return terms_.begin()->second;
}

void Poly::add_term(const Monomial &m, const mpz_class &c) {
    if (c == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Poly Poly::operator-() const {
    Poly r;
    for (auto &[m, c] : terms_) r.terms_[m] = -c;
    return r;
}

Poly Poly::operator+(const Poly &o) const {
    Poly r = *this;
    for (auto &[m, c] : o.terms_) r.add_term(m, c);
    return r;
}

Poly Poly::operator-(const Poly &o) const {
    Poly r = *this;
    for (auto &[m, c] : o.terms_) r.add_term(m, -c);
    return r;
}

Poly Poly::operator*(const Poly &o) const {
    Poly r;
    for (auto &[ma, ca] : terms_) {
        for (auto &[mb, cb] : o.terms_) {
            Monomial m = ma;
            for (auto &[v, e] : mb) m[v] += e;
            r.add_term(m, ca * cb);
        }
    }
    return r;
}

Poly Poly::operator*(const mpz_class &c) const {
    Poly r;
    if (c == 0) return r;
    for (auto &[m, k] : terms_) r.terms_[m] = k * c;
    return r;
}

int Poly::compare(const Poly &o) const {
    auto ia = terms_.rbegin(), ib = o.terms_.rbegin();
    MonoCmp cmp;
    for (; ia != terms_.rend() && ib != o.terms_.rend(); ++ia, ++ib) {
        if (cmp(ia->first, ib->first)) return -1;
        if (cmp(ib->first, ia->first)) return 1;
        int c = ::cmp(ia->second, ib->second);
        if (c != 0) return c;
    }
    if (ia != terms_.rend()) return 1;
    if (ib != o.terms_.rend()) return -1;
    return 0;
}

Poly Poly::pow(unsigned e) const {
    Poly r = constant(1);
    Poly base = *this;
    while (e) {
        if (e & 1u) r = r * base;
        base = base * base;
        e >>= 1u;
    }
    return r;
}

std::set<std::string> Poly::variables() const {
    std::set<std::string> vs;
    for (auto &[m, c] : terms_)
        for (auto &[v, e] : m) vs.insert(v);
    return vs;
}

unsigned Poly::degree_in(const std::string &var) const {
    unsigned d = 0;
    for (auto &[m, c] : terms_) {
        auto it = m.find(var);
        if (it != m.end() && it->second > d) d = it->second;
    }
    return d;
}

unsigned Poly::total_deg() const {
    unsigned d = 0;
    for (auto &[m, c] : terms_) d = std::max(d, total_degree(m));
    return d;
}

Poly Poly::derivative(const std::string &var) const {
    Poly r;
    for (auto &[m, c] : terms_) {
        auto it = m.find(var);
        if (it == m.end()) continue;
        Monomial dm = m;
        unsigned e = it->second;
        if (e == 1)
            dm.erase(var);
        else
            dm[var] = e - 1;
        r.add_term(dm, c * e);
    }
    return r;
}

mpq_class Poly::eval(const std::map<std::string, mpq_class> &point) const {
    mpq_class acc = 0;
    for (auto &[m, c] : terms_) {
        mpq_class t = mpq_class(c);
        for (auto &[v, e] : m) {
            auto it = point.find(v);
            if (it == point.end()) throw UnboundSymbol(v);
            mpq_class base = it->second;
            for (unsigned k = 0; k < e; ++k) t *= base;
        }
        acc += t;
    }
    return acc;
}

mpz_class Poly::int_content() const {
    mpz_class g = 0;
    for (auto &[m, c] : terms_) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

mpz_class Poly::leading_coeff() const {
    if (terms_.empty()) return 0;
    return terms_.rbegin()->second;
}

std::map<unsigned, Poly> Poly::as_univariate(const std::string &var) const {
    std::map<unsigned, Poly> out;
    for (auto &[m, c] : terms_) {
        Monomial rest = m;
        unsigned e = 0;
        auto it = rest.find(var);
        if (it != rest.end()) {
            e = it->second;
            rest.erase(it);
        }
        out[e].add_term(rest, c);
    }
    return out;
}

Poly Poly::from_univariate(const std::string &var, const std::map<unsigned, Poly> &coeffs) {
    Poly r;
    for (auto &[e, p] : coeffs) {
        Poly xe = (e == 0) ? constant(1) : variable(var, e);
        r = r + p * xe;
    }
    return r;
}

namespace {

bool mono_divides(const Monomial &a, const Monomial &b, Monomial &quot) {
    quot.clear();
    auto ib = b.begin();
    Monomial q = b;
    for (auto &[v, e] : a) {
        auto it = q.find(v);
        if (it == q.end() || it->second < e) return false;
        if (it->second == e)
            q.erase(it);
        else
            it->second -= e;
    }
    (void)ib;
    quot = std::move(q);
    return true;
}

} // namespace

Poly Poly::exact_div(const Poly &d) const {
    assert(!d.is_zero());
    Poly rem = *this;
    Poly quot;
    const Monomial &lm = d.terms().rbegin()->first;
    const mpz_class &lc = d.terms().rbegin()->second;
    while (!rem.is_zero()) {
        const Monomial &rm = rem.terms().rbegin()->first;
        const mpz_class &rc = rem.terms().rbegin()->second;
        Monomial qm;
        if (!mono_divides(lm, rm, qm))
            throw std::logic_error("exact_div: leading monomial does not divide");
        mpz_class qc;
        mpz_class r;
        mpz_tdiv_qr(qc.get_mpz_t(), r.get_mpz_t(), rc.get_mpz_t(), lc.get_mpz_t());
        if (r != 0) throw std::logic_error("exact_div: leading coefficient does not divide");
        Poly t;
        t.terms_[qm] = qc;
        quot = quot + t;
        rem = rem - t * d;
    }
    return quot;
}

std::string Poly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // print highest-order terms first
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        mpz_class c = it->second;
        bool neg = c < 0;
        if (first) {
            if (neg) os << "-";
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        mpz_class a = abs(c);
        bool printed_coeff = false;
        if (a != 1 || it->first.empty()) {
            os << a.get_str();
            printed_coeff = true;
        }
        bool firstv = true;
        for (auto &[v, e] : it->first) {
            if (printed_coeff || !firstv) os << "*";
            os << v;
            if (e > 1) os << "^" << e;
            firstv = false;
        }
    }
    return os.str();
}

Poly poly_prem(const Poly &a, const Poly &b, const std::string &var) {
    unsigned da = a.degree_in(var), db = b.degree_in(var);
    assert(!b.is_zero());
    if (da < db) {
        // standard convention: prem(a,b) = lc(b)^(da-db+1) * a, but da<db means result is a
        return a;
    }
    auto bu = b.as_univariate(var);
    Poly blc = bu.rbegin()->second;
    Poly r = a;
    long n = long(da) - long(db) + 1;
    while (!r.is_zero() && r.degree_in(var) >= db) {
        auto ru = r.as_univariate(var);
        unsigned dr = ru.rbegin()->first;
        Poly rlc = ru.rbegin()->second;
        Poly shift = (dr == db) ? Poly::constant(1) : Poly::variable(var, dr - db);
        r = r * blc - b * rlc * shift;
        --n;
    }
    // multiply by remaining powers of lc(b) for the exact subresultant normalization
    for (; n > 0; --n) r = r * blc;
    return r;
}

namespace {

Poly content_wrt(const Poly &p, const std::string &var) {
    auto u = p.as_univariate(var);
    Poly g;
    for (auto &[e, c] : u) g = poly_gcd(g, c);
    return g;
}

Poly sign_normalize(const Poly &p) {
    if (p.leading_coeff() < 0) return -p;
    return p;
}

} // namespace

Poly poly_gcd(const Poly &a, const Poly &b) {
    if (a.is_zero()) return sign_normalize(b);
    if (b.is_zero()) return sign_normalize(a);
    if (a.is_constant() || b.is_constant()) {
        mpz_class g;
        mpz_class ca = a.int_content(), cb = b.int_content();
        mpz_gcd(g.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
        return Poly::constant(g);
    }
    // main variable: lexicographically first variable of either operand
    std::string var = *a.variables().begin();
    auto vb = b.variables();
    if (!vb.empty() && *vb.begin() < var) var = *vb.begin();

    unsigned da = a.degree_in(var), db = b.degree_in(var);
    if (da == 0) return poly_gcd(a, content_wrt(b, var));
    if (db == 0) return poly_gcd(content_wrt(a, var), b);

    Poly ca = content_wrt(a, var), cb = content_wrt(b, var);
    Poly pa = a.exact_div(ca), pb = b.exact_div(cb);
    Poly c = poly_gcd(ca, cb);

    Poly A = pa, B = pb;
    if (A.degree_in(var) < B.degree_in(var)) std::swap(A, B);
    Poly g = Poly::constant(1), h = Poly::constant(1);
    Poly result;
    for (;;) {
        unsigned dA = A.degree_in(var), dB = B.degree_in(var);
        unsigned delta = dA - dB;
        Poly R = poly_prem(A, B, var);
        if (R.is_zero()) {
            result = B.exact_div(content_wrt(B, var));
            break;
        }
        if (R.degree_in(var) == 0) {
            result = Poly::constant(1);
            break;
        }
        A = B;
        Poly divisor = g * h.pow(delta);
        B = R.exact_div(divisor);
        g = A.as_univariate(var).rbegin()->second;
        if (delta == 0) {
            // h unchanged
        } else if (delta == 1) {
            h = g;
        } else {
            h = g.pow(delta).exact_div(h.pow(delta - 1));
        }
    }
    return sign_normalize(c * result);
}

} // namespace eds
