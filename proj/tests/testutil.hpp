#pragma once

#include "eds/dform.hpp"
#include "eds/scalar.hpp"

#include <memory>
#include <random>
#include <vector>

// Shared helpers for the test suites. The RawExpr evaluator is an independent
// oracle: it evaluates unsanitized expression trees directly with big
// rationals, with no canonicalization anywhere on its path.

namespace edstest {

using eds::Point;
using eds::ScalarExpr;

struct RawExpr {
    enum Kind { Const, Sym, Add, Sub, Mul, Div, Neg } kind;
    mpq_class value;
    std::string sym;
    std::shared_ptr<RawExpr> a, b;

    static std::shared_ptr<RawExpr> constant(const mpq_class &v) {
        auto e = std::make_shared<RawExpr>();
        e->kind = Const;
        e->value = v;
        return e;
    }
    static std::shared_ptr<RawExpr> symbol(const std::string &s) {
        auto e = std::make_shared<RawExpr>();
        e->kind = Sym;
        e->sym = s;
        return e;
    }
    static std::shared_ptr<RawExpr> node(Kind k, std::shared_ptr<RawExpr> x,
                                         std::shared_ptr<RawExpr> y) {
        auto e = std::make_shared<RawExpr>();
        e->kind = k;
        e->a = std::move(x);
        e->b = std::move(y);
        return e;
    }
};

/// Direct big-rational evaluation of the raw tree; returns false on a pole.
inline bool raw_eval(const RawExpr &e, const Point &p, mpq_class &out) {
    mpq_class x, y;
    switch (e.kind) {
    case RawExpr::Const: out = e.value; return true;
    case RawExpr::Sym: out = p.get(e.sym); return true;
    case RawExpr::Neg:
        if (!raw_eval(*e.a, p, x)) return false;
        out = -x;
        return true;
    default: break;
    }
    if (!raw_eval(*e.a, p, x) || !raw_eval(*e.b, p, y)) return false;
    switch (e.kind) {
    case RawExpr::Add: out = x + y; break;
    case RawExpr::Sub: out = x - y; break;
    case RawExpr::Mul: out = x * y; break;
    case RawExpr::Div:
        if (y == 0) return false;
        out = x / y;
        break;
    default: return false;
    }
    return true;
}

/// Paired random expression: the same tree built both ways.
struct ExprPair {
    std::shared_ptr<RawExpr> raw;
    ScalarExpr cooked;
};

class ExprGen {
public:
    ExprGen(std::uint64_t seed, std::vector<std::string> symbols, bool with_division = true)
        : rng_(seed), symbols_(std::move(symbols)), with_division_(with_division) {}

    ExprPair gen(int depth) {
        if (depth <= 0 || pick(3) == 0) return leaf();
        int op = pick(with_division_ ? 4 : 3);
        ExprPair l = gen(depth - 1), r = gen(depth - 1);
        switch (op) {
        case 0:
            return {RawExpr::node(RawExpr::Add, l.raw, r.raw), l.cooked + r.cooked};
        case 1:
            return {RawExpr::node(RawExpr::Sub, l.raw, r.raw), l.cooked - r.cooked};
        case 2:
            return {RawExpr::node(RawExpr::Mul, l.raw, r.raw), l.cooked * r.cooked};
        default:
            if (r.cooked.is_zero()) return l;
            return {RawExpr::node(RawExpr::Div, l.raw, r.raw), l.cooked / r.cooked};
        }
    }

    mpq_class rational() {
        int num = static_cast<int>(pick(19)) - 9;
        int den = 1 + static_cast<int>(pick(4));
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    }

    Point random_point() {
        Point p;
        for (auto &s : symbols_) p.set(s, rational());
        return p;
    }

    std::uint64_t pick(std::uint64_t n) { return rng_() % n; }

private:
    ExprPair leaf() {
        if (!symbols_.empty() && pick(2) == 0) {
            const std::string &s = symbols_[pick(symbols_.size())];
            return {RawExpr::symbol(s), ScalarExpr::symbol(s)};
        }
        mpq_class q = rational();
        return {RawExpr::constant(q), ScalarExpr::rational(q)};
    }

    std::mt19937_64 rng_;
    std::vector<std::string> symbols_;
    bool with_division_;
};

/// Independent sign oracle for wedge products of basis 1-forms: concatenate the
/// two index tuples and bubble-sort, counting swaps; 0 on a repeated index.
inline int parity_sign_oracle(const std::vector<int> &a, const std::vector<int> &b) {
    std::vector<int> all = a;
    all.insert(all.end(), b.begin(), b.end());
    int swaps = 0;
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = 0; j + 1 < all.size() - i; ++j) {
            if (all[j] == all[j + 1]) return 0;
            if (all[j] > all[j + 1]) {
                std::swap(all[j], all[j + 1]);
                ++swaps;
            }
        }
    return swaps % 2 == 0 ? 1 : -1;
}

/// Plain Gaussian elimination rank, independent of eds::rref.
inline int naive_rank(std::vector<std::vector<mpq_class>> m) {
    int rank = 0;
    size_t rows = m.size();
    if (rows == 0) return 0;
    size_t cols = m[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t sel = r;
        while (sel < rows && m[sel][c] == 0) ++sel;
        if (sel == rows) continue;
        std::swap(m[sel], m[r]);
        for (size_t i = r + 1; i < rows; ++i) {
            if (m[i][c] == 0) continue;
            mpq_class f = m[i][c] / m[r][c];
            for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++rank;
        ++r;
    }
    return rank;
}

/// Random form of the given degree with small rational coefficients.
inline eds::DForm random_form(const eds::ManifoldPtr &m, int degree, ExprGen &gen,
                              bool symbolic_coeffs = false) {
    eds::TermMap terms;
    int n = m->dim();
    std::vector<int> idx(static_cast<size_t>(degree));
    // a handful of random strictly increasing tuples
    for (int t = 0; t < 4; ++t) {
        std::vector<int> pool;
        for (int i = 1; i <= n; ++i) pool.push_back(i);
        for (int k = 0; k < degree; ++k) {
            size_t j = gen.pick(pool.size() - static_cast<size_t>(k)) + static_cast<size_t>(k);
            std::swap(pool[static_cast<size_t>(k)], pool[j]);
        }
        std::vector<int> tuple(pool.begin(), pool.begin() + degree);
        std::sort(tuple.begin(), tuple.end());
        ScalarExpr c = symbolic_coeffs ? gen.gen(2).cooked : ScalarExpr::rational(gen.rational());
        if (c.is_zero()) continue;
        auto it = terms.find(tuple);
        if (it == terms.end())
            terms.emplace(tuple, c);
        else
            it->second = it->second + c;
    }
    for (auto it = terms.begin(); it != terms.end();)
        it = it->second.is_zero() ? terms.erase(it) : std::next(it);
    return m->form(degree, terms);
}

} // namespace edstest
