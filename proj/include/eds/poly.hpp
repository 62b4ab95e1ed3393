#pragma once

#include <gmpxx.h>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace eds {

/// Monomial: variable name -> positive exponent. Empty map = 1.
using Monomial = std::map<std::string, unsigned>;

unsigned total_degree(const Monomial &m);

/// Graded lexicographic order; variables compared by name.
struct MonoCmp {
    bool operator()(const Monomial &a, const Monomial &b) const;
};

/// Sparse multivariate polynomial with arbitrary-precision integer coefficients.
/// Terms are kept in graded-lex order with no zero coefficients stored.
class Poly {
public:
    using Terms = std::map<Monomial, mpz_class, MonoCmp>;

    Poly() = default;
    static Poly constant(const mpz_class &c);
    static Poly variable(const std::string &name, unsigned exp = 1);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    const mpz_class &constant_value() const; // requires is_constant()

    const Terms &terms() const { return terms_; }

    Poly operator-() const;
    Poly operator+(const Poly &o) const;
    Poly operator-(const Poly &o) const;
    Poly operator*(const Poly &o) const;
    Poly operator*(const mpz_class &c) const;
    bool operator==(const Poly &o) const { return terms_ == o.terms_; }
    bool operator!=(const Poly &o) const { return !(*this == o); }

    /// Total order consistent with structural equality (used for deterministic sorting).
    int compare(const Poly &o) const;

    Poly pow(unsigned e) const;

    std::set<std::string> variables() const;
    unsigned degree_in(const std::string &var) const;
    unsigned total_deg() const;

    Poly derivative(const std::string &var) const;

    /// Evaluate with every variable bound to an exact rational.
    /// Throws UnboundSymbol if a variable is missing.
    mpq_class eval(const std::map<std::string, mpq_class> &point) const;

    /// Integer content (gcd of coefficients), always >= 0; 0 for the zero poly.
    mpz_class int_content() const;

    /// Leading coefficient in graded-lex order (0 for zero poly).
    mpz_class leading_coeff() const;

    /// View as univariate in `var`: x-degree -> coefficient poly (vars without `var`).
    std::map<unsigned, Poly> as_univariate(const std::string &var) const;
    static Poly from_univariate(const std::string &var, const std::map<unsigned, Poly> &coeffs);

    /// Exact division; asserts divisibility (logic error otherwise).
    Poly exact_div(const Poly &d) const;

    void add_term(const Monomial &m, const mpz_class &c); // fuses and drops zeros

    std::string str() const;

private:
    Terms terms_;
};

/// gcd with positive graded-lex leading coefficient; gcd(0,0) = 0.
Poly poly_gcd(const Poly &a, const Poly &b);

/// Pseudo-remainder of a by b with respect to var (subresultant normalization).
Poly poly_prem(const Poly &a, const Poly &b, const std::string &var);

} // namespace eds
