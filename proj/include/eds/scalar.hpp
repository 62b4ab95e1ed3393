#pragma once

#include "eds/poly.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

namespace eds {

/// Total assignment of exact rational values to base symbols.
class Point {
public:
    Point() = default;
    explicit Point(std::map<std::string, mpq_class> vals) : vals_(std::move(vals)) {}

    void set(const std::string &sym, const mpq_class &v) { vals_[sym] = v; }
    bool has(const std::string &sym) const { return vals_.count(sym) != 0; }
    const mpq_class &get(const std::string &sym) const; // throws UnboundSymbol
    const std::map<std::string, mpq_class> &values() const { return vals_; }

private:
    std::map<std::string, mpq_class> vals_;
};

/// Exact symbolic scalar: a multivariate rational function over arbitrary-precision
/// rationals, kept in a unique canonical form (coprime expanded numerator and
/// denominator, graded-lex monomial order, positive leading denominator coefficient).
/// Immutable value type; all operations canonicalize.
class ScalarExpr {
public:
    ScalarExpr(); // zero
    ScalarExpr(long v);
    static ScalarExpr integer(const mpz_class &v);
    static ScalarExpr rational(const mpz_class &num, const mpz_class &den); // ZeroDivision if den==0
    static ScalarExpr rational(const mpq_class &q);
    static ScalarExpr symbol(const std::string &name);
    static ScalarExpr fraction(Poly num, Poly den); // canonicalizes; ZeroDivision if den==0

    const Poly &num() const;
    const Poly &den() const;

    bool is_zero() const;
    bool is_one() const;
    bool is_constant() const; // rational constant
    mpq_class constant_value() const;

    ScalarExpr operator-() const;
    ScalarExpr operator+(const ScalarExpr &o) const;
    ScalarExpr operator-(const ScalarExpr &o) const;
    ScalarExpr operator*(const ScalarExpr &o) const;
    ScalarExpr operator/(const ScalarExpr &o) const; // ZeroDivision
    ScalarExpr pow(long e) const;                    // negative exponents invert

    bool operator==(const ScalarExpr &o) const;
    bool operator!=(const ScalarExpr &o) const { return !(*this == o); }
    int compare(const ScalarExpr &o) const;

    mpq_class eval(const Point &p) const; // PoleAtPoint / UnboundSymbol

    /// Simultaneous substitution of symbols by expressions, then canonicalization.
    ScalarExpr substitute(const std::map<std::string, ScalarExpr> &bindings) const;

    /// Formal partial derivative.
    ScalarExpr derivative(const std::string &var) const;

    std::set<std::string> symbols() const;

    /// True when the denominator is free of every symbol in `unknowns` and the
    /// numerator has joint degree <= 1 in them; on success fills the linear
    /// decomposition  expr = sum coeff[u]*u + constant_part.
    bool linear_in(const std::set<std::string> &unknowns,
                   std::map<std::string, ScalarExpr> &coeffs, ScalarExpr &constant_part) const;

    /// Joint polynomial degree of the numerator in the given symbols
    /// (denominator must be free of them; returns -1 otherwise).
    int poly_degree_in(const std::set<std::string> &unknowns) const;

    std::string str() const;

private:
    struct Impl {
        Poly num, den;
    };
    explicit ScalarExpr(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    static ScalarExpr make(Poly num, Poly den);
    std::shared_ptr<const Impl> impl_;
};

ScalarExpr operator*(long c, const ScalarExpr &e);

} // namespace eds
