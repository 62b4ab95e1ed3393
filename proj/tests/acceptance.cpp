// Acceptance gate: every criterion below must hold exactly, in exact rational
// arithmetic, at desk scale. One PASS/FAIL line is printed per criterion.

#include "eds/commands.hpp"
#include "eds/linalg.hpp"
#include "eds/linearize.hpp"
#include "eds/prolong.hpp"
#include "fixtures.hpp"
#include "testutil.hpp"

#include <chrono>
#include <iostream>
#include <sstream>

using namespace eds;
using namespace edstest;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string &detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": " << detail << "\n";
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CartanReport test_fixture(const std::string &name, std::uint64_t seed = 1) {
    SpecFile spec = load_fixture(name);
    return cartan_test(*spec.system, element_of(spec), seed);
}

// --- criterion 1: Lagrangian n = 2, 3, 4 ------------------------------------

void criterion1() {
    bool ok = true;
    std::ostringstream os;
    for (int n = 2; n <= 4; ++n) {
        auto t0 = std::chrono::steady_clock::now();
        CartanReport rep = test_fixture("lagrangian-n" + std::to_string(n));
        double dt = seconds_since(t0);
        std::vector<int> expect(static_cast<size_t>(n + 1), 1);
        expect[0] = 0;
        long dim = 2L * n + n * (n + 1) / 2;
        bool good = rep.characters == expect && rep.predicted_dim == dim &&
                    rep.actual_dim == dim && rep.involutive && dt < 1.0;
        if (!good) ok = false;
        os << "n=" << n << " chars ok=" << (rep.characters == expect)
           << " predicted=" << rep.predicted_dim << " actual=" << rep.actual_dim
           << " involutive=" << rep.involutive << " (" << dt << "s); ";
    }
    report(1, ok, "Lagrangian n=2,3,4: " + os.str());
}

// --- criterion 2: harmonic ---------------------------------------------------

void criterion2() {
    CartanReport rep = test_fixture("harmonic");
    bool ok = rep.characters == std::vector<int>{1, 2, 0} && rep.predicted_dim == 7 &&
              rep.actual_dim == 7 && rep.involutive;
    std::ostringstream os;
    os << "harmonic characters (1,2,0) predicted 7 actual 7 involutive -> got (";
    for (size_t i = 0; i < rep.characters.size(); ++i) os << (i ? "," : "") << rep.characters[i];
    os << ") " << rep.predicted_dim << " " << rep.actual_dim << " " << rep.involutive;
    report(2, ok, os.str());
}

// --- criterion 3: triply orthogonal webs -------------------------------------

void criterion3() {
    CartanReport rep = test_fixture("webs");
    bool ok = rep.characters == std::vector<int>{0, 0, 3, 0} && rep.predicted_dim == 12 &&
              rep.actual_dim == 12 && rep.involutive;
    std::ostringstream os;
    os << "webs characters (0,0,3,0) predicted 12 actual 12 involutive -> got (";
    for (size_t i = 0; i < rep.characters.size(); ++i) os << (i ? "," : "") << rep.characters[i];
    os << ") " << rep.predicted_dim << " " << rep.actual_dim << " " << rep.involutive;
    report(3, ok, os.str());
}

// --- criterion 4: isometric immersion, unprolonged ----------------------------

void criterion4() {
    CartanReport rep = test_fixture("immersion");
    bool ok = rep.characters.size() == 4 && rep.characters[1] == 2 && rep.characters[2] == 1 &&
              !rep.involutive && rep.inequality_note == "s1 + 2*s2 = 4 > 3" &&
              rep.actual_dim - rep.dim_m == 3;
    std::ostringstream os;
    os << "immersion s1=2 s2=1 not involutive, '" << rep.inequality_note
       << "', element space dim " << (rep.actual_dim - rep.dim_m);
    report(4, ok, os.str());
}

// --- criterion 5: prolonged immersion torsion and restriction -----------------

void criterion5() {
    SpecFile spec = load_fixture("immersion");
    const ExteriorSystem &s = *spec.system;
    Chart chart = make_chart(s, s.independence(), &*spec.point);
    ProlongedSystem ps = prolong(s, chart);

    auto sym = [](const char *n) { return ScalarExpr::symbol(n); };
    ScalarExpr expected = sym("s") / ScalarExpr(4) - sym("R33") - sym("K") - sym("a") * sym("a") -
                          sym("b") * sym("c");
    bool torsion_ok = ps.torsion.size() == 1 && ps.torsion[0] == expected;

    ProlongedSystem rs = restrict_system(ps, ps.torsion.empty() ? expected : ps.torsion[0], "b");
    Point pt;
    pt.set("K", 0);
    pt.set("s", 4);
    pt.set("R33", 1);
    pt.set("a", 0);
    pt.set("c", 1);
    Chart rc = make_chart(rs.system, rs.system.independence(), &pt);
    auto eqs = chart_equations(rs.system, rc);
    std::set<std::string> unknowns(rc.unknowns.begin(), rc.unknowns.end());
    std::vector<std::vector<ScalarExpr>> rows;
    std::vector<ScalarExpr> rhs;
    bool affine = true;
    for (auto &eq : eqs) {
        std::map<std::string, ScalarExpr> cf;
        ScalarExpr cp;
        if (!eq.linear_in(unknowns, cf, cp)) {
            affine = false;
            break;
        }
        std::vector<ScalarExpr> row;
        for (auto &u : rc.unknowns) {
            auto it = cf.find(u);
            row.push_back(it == cf.end() ? ScalarExpr() : ScalarExpr::rational(it->second.eval(pt)));
        }
        rows.push_back(std::move(row));
        rhs.push_back(ScalarExpr::rational(-cp.eval(pt)));
    }
    bool restricted_ok = false;
    std::ostringstream os;
    if (affine) {
        auto sol = solve_linear(rows, rhs, rc.unknowns.size());
        if (sol) {
            std::vector<std::vector<mpq_class>> amat(static_cast<size_t>(rc.q()),
                                                     std::vector<mpq_class>(3));
            for (int i = 0; i < rc.q(); ++i)
                for (int j = 0; j < 3; ++j) {
                    const ScalarExpr &v = sol->particular[static_cast<size_t>(i * 3 + j)];
                    amat[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                        v.is_zero() ? mpq_class(0) : v.eval(pt);
                }
            IntegralElement e = element_from_chart(rs.system, rc, pt, amat);
            CartanReport rep = cartan_test(rs.system, e, 5);
            restricted_ok = rep.characters.size() == 4 && rep.characters[1] == 2 &&
                            rep.characters[2] == 0 && rep.involutive &&
                            rep.actual_dim - rep.dim_m == 2;
            os << "restricted: s1=" << rep.characters[1] << " s2=" << rep.characters[2]
               << " involutive=" << rep.involutive << " element space "
               << (rep.actual_dim - rep.dim_m);
        }
    }
    std::ostringstream head;
    head << "torsion == s/4 - R33 - K - a^2 - b*c: " << torsion_ok << "; " << os.str();
    report(5, torsion_ok && restricted_ok, head.str());
}

// --- criterion 6: characteristic-variety equivalence --------------------------

void criterion6() {
    bool ok = true;
    std::ostringstream os;
    for (auto *name : {"harmonic", "frobenius", "trivial-0", "trivial-5"}) {
        SpecFile spec = load_fixture(name);
        const ExteriorSystem &s = *spec.system;
        IntegralElement e = element_of(spec);
        ExprGen gen(4096, {});
        int agree = 0, total = 0;
        while (total < 20) {
            Covector xi;
            bool allz = true;
            for (int j = 0; j < s.p(); ++j) {
                mpq_class c = gen.rational();
                if (c != 0) allz = false;
                xi.xi.push_back(c);
            }
            if (allz) {
                xi.xi.clear();
                continue;
            }
            bool a = is_characteristic(s, e, xi).characteristic;
            bool b = hyperplane_extends_nonuniquely(s, e, xi);
            if (a == b) ++agree;
            ++total;
            xi.xi.clear();
        }
        if (agree != total) ok = false;
        os << name << " " << agree << "/" << total << "; ";
    }
    report(6, ok, "symbol kernel vs hyperplane double extension: " + os.str());
}

// --- criterion 7: property suites ---------------------------------------------

bool prop_d_squared_and_leibniz(std::string &msg) {
    auto m = Manifold::coordinates("R4", {"x1", "x2", "x3", "x4"});
    auto fb = Manifold::create("FB", {"w1", "w2", "g"},
                               {{"w1", {{{2, 3}, ScalarExpr(1)}}},
                                {"w2", {{{1, 3}, ScalarExpr(-1)}}},
                                {"g", {{{1, 2}, ScalarExpr::symbol("K")}}}},
                               {{"K", {}}});
    ExprGen gen(10001, {"x1", "x2", "x3", "x4"});
    ExprGen genf(10002, {"K"});
    int cases = 0;
    for (int t = 0; t < 100; ++t) {
        int k = 1 + static_cast<int>(gen.pick(2));
        int l = 1 + static_cast<int>(gen.pick(2));
        DForm a = random_form(m, k, gen, true);
        DForm b = random_form(m, l, gen, true);
        if (!a.d().d().is_zero()) return false;
        DForm lhs = a.wedge(b).d();
        DForm rhs = a.d().wedge(b) + ((k % 2 == 0) ? a.wedge(b.d()) : -(a.wedge(b.d())));
        if (!lhs.same_terms(rhs)) return false;
        DForm c = random_form(fb, 1 + static_cast<int>(genf.pick(2)), genf, true);
        if (!c.d().d().is_zero()) return false;
        ++cases;
    }
    msg = "d.d = 0 and Leibniz on " + std::to_string(cases) + " random forms";
    return cases >= 100;
}

bool prop_anticommutativity(std::string &msg) {
    auto m = Manifold::coordinates("R5", {"x1", "x2", "x3", "x4", "x5"});
    ExprGen gen(10003, {"x1", "x2"});
    int cases = 0;
    for (int t = 0; t < 100; ++t) {
        int k = 1 + static_cast<int>(gen.pick(3));
        int l = 1 + static_cast<int>(gen.pick(3));
        DForm a = random_form(m, k, gen);
        DForm b = random_form(m, l, gen);
        DForm ba = b.wedge(a);
        if ((k * l) % 2 == 1) ba = -ba;
        if (!a.wedge(b).same_terms(ba)) return false;
        ++cases;
    }
    msg = "graded anticommutativity on " + std::to_string(cases) + " random pairs";
    return cases >= 100;
}

bool prop_polar_monotonicity_and_sums(std::string &msg) {
    int cases = 0;
    for (auto *name : {"harmonic", "webs", "immersion", "lagrangian-n3"}) {
        SpecFile spec = load_fixture(name);
        const ExteriorSystem &s = *spec.system;
        IntegralElement e = element_of(spec);
        for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            Flag f = build_flag(s, e, seed);
            for (size_t k = 0; k + 1 < f.polar.size(); ++k)
                if (!f.polar[k].contained_in(f.polar[k + 1])) return false;
            std::vector<int> chars = characters(s, f);
            int sum = 0;
            for (int c : chars) sum += c;
            if (sum != s.manifold()->dim() - s.p()) return false;
            ++cases;
        }
    }
    msg = "polar monotonicity and sum s_k = dim M - p on " + std::to_string(cases) + " flags";
    return cases >= 100;
}

bool prop_flag_basis_invariance(std::string &msg) {
    SpecFile spec = load_fixture("harmonic");
    const ExteriorSystem &s = *spec.system;
    IntegralElement e = element_of(spec);
    Flag f = build_flag(s, e, 5);
    std::vector<int> base = characters(s, f);
    ExprGen gen(10004, {});
    int cases = 0;
    while (cases < 100) {
        mpq_class c11 = gen.rational(), c12 = gen.rational(), c22 = gen.rational();
        if (c11 == 0 || c22 == 0) continue;
        Flag g;
        g.point = f.point;
        TangentVector w1, w2;
        w1.comps.assign(5, ScalarExpr());
        w2.comps.assign(5, ScalarExpr());
        for (int i = 0; i < 5; ++i) {
            w1.comps[static_cast<size_t>(i)] =
                ScalarExpr::rational(c11) * f.vectors[0].comps[static_cast<size_t>(i)];
            w2.comps[static_cast<size_t>(i)] =
                ScalarExpr::rational(c12) * f.vectors[0].comps[static_cast<size_t>(i)] +
                ScalarExpr::rational(c22) * f.vectors[1].comps[static_cast<size_t>(i)];
        }
        g.vectors = {w1, w2};
        for (int k = 0; k < 2; ++k) {
            std::vector<TangentVector> level(g.vectors.begin(), g.vectors.begin() + k);
            g.polar.push_back(polar_space(s, g.point, level));
        }
        if (characters(s, g) != base) return false;
        ++cases;
    }
    msg = "characters invariant under 100 flag-preserving basis changes";
    return true;
}

bool prop_polar_witness(std::string &msg) {
    SpecFile spec = load_fixture("harmonic");
    const ExteriorSystem &s = *spec.system;
    Point p = *spec.point;
    ExprGen gen(10005, {});
    TangentVector e1;
    e1.comps.assign(5, ScalarExpr());
    e1.comps[0] = ScalarExpr(1);
    PolarSpace ps = polar_space(s, p, {e1});
    int cases = 0;
    while (cases < 100) {
        std::vector<mpq_class> w(5);
        for (auto &c : w) c = gen.rational();
        if (naive_rank({{1, 0, 0, 0, 0}, w}) != 2) continue;
        bool annihilated = true;
        for (auto &row : ps.rows) {
            mpq_class acc = 0;
            for (int i = 0; i < 5; ++i)
                acc += row[static_cast<size_t>(i)] * w[static_cast<size_t>(i)];
            if (acc != 0) annihilated = false;
        }
        TangentVector wv;
        wv.comps.assign(5, ScalarExpr());
        for (int i = 0; i < 5; ++i)
            if (w[static_cast<size_t>(i)] != 0)
                wv.comps[static_cast<size_t>(i)] = ScalarExpr::rational(w[static_cast<size_t>(i)]);
        if (annihilated != s.is_integral_element(p, {e1, wv}).ok) return false;
        ++cases;
    }
    msg = "polar rows vanish on w iff span(E, w) is integral, 100 samples";
    return true;
}

bool prop_canonicalizer(std::string &msg) {
    ExprGen gen(10006, {"x", "y", "z"});
    int cases = 0;
    for (int t = 0; t < 100; ++t) {
        ExprPair e = gen.gen(4);
        ScalarExpr again = ScalarExpr::fraction(e.cooked.num(), e.cooked.den());
        if (!(again == e.cooked)) return false;
        ScalarExpr zero = (e.cooked + e.cooked) - 2 * e.cooked;
        if (!zero.is_zero()) return false;
        Point p = gen.random_point();
        mpq_class raw;
        if (raw_eval(*e.raw, p, raw)) {
            if (e.cooked.eval(p) != raw) return false;
        }
        ++cases;
    }
    msg = "canonicalizer idempotent and oracle-consistent on " + std::to_string(cases) + " trees";
    return cases >= 100;
}

void criterion7() {
    std::ostringstream os;
    bool ok = true;
    std::string msg;
    for (auto *fn : {&prop_d_squared_and_leibniz, &prop_anticommutativity,
                     &prop_polar_monotonicity_and_sums, &prop_flag_basis_invariance,
                     &prop_polar_witness, &prop_canonicalizer}) {
        bool good = (*fn)(msg);
        if (!good) ok = false;
        os << msg << "; ";
    }
    report(7, ok, os.str());
}

} // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    try {
        criterion1();
        criterion2();
        criterion3();
        criterion4();
        criterion5();
        criterion6();
        criterion7();
    } catch (const std::exception &e) {
        std::cout << "FAIL: unexpected exception: " << e.what() << "\n";
        return 1;
    }
    double dt = seconds_since(t0);
    report(8, dt < 120.0, "full acceptance run in " + std::to_string(dt) + " s (< 120 s)");
    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : "FAILURES PRESENT") << "\n";
    return failures == 0 ? 0 : 1;
}
