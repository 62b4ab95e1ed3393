#include "eds/errors.hpp"
#include "eds/linalg.hpp"
#include "eds/prolong.hpp"
#include "fixtures.hpp"
#include "testutil.hpp"

#include <doctest.h>

using namespace eds;
using namespace edstest;

namespace {

ScalarExpr sym(const char *s) { return ScalarExpr::symbol(s); }

ScalarExpr immersion_torsion_expr() {
    return sym("s") / ScalarExpr(4) - sym("R33") - sym("K") - sym("a") * sym("a") -
           sym("b") * sym("c");
}

ProlongedSystem prolong_fixture(const char *name) {
    SpecFile spec = load_fixture(name);
    const ExteriorSystem &s = *spec.system;
    Chart chart = make_chart(s, s.independence(), spec.point ? &*spec.point : nullptr);
    return prolong(s, chart);
}

} // namespace

TEST_CASE("prolonging the immersion system reproduces the hand computation") {
    ProlongedSystem ps = prolong_fixture("immersion");
    REQUIRE(ps.free_params == std::vector<std::string>{"a", "b", "c"});
    CHECK(ps.manifold->dim() == 12);
    // solved a-matrix rows: (a, b, 0), (c, -a, 0), (0, 0, 1)
    CHECK(ps.a_entries[0][0] == sym("a"));
    CHECK(ps.a_entries[0][1] == sym("b"));
    CHECK(ps.a_entries[0][2].is_zero());
    CHECK(ps.a_entries[1][0] == sym("c"));
    CHECK(ps.a_entries[1][1] == -sym("a"));
    CHECK(ps.a_entries[1][2].is_zero());
    CHECK(ps.a_entries[2][0].is_zero());
    CHECK(ps.a_entries[2][1].is_zero());
    CHECK(ps.a_entries[2][2].is_one());
    // d(theta_1..3) vanish modulo the six 1-forms of the prolonged system
    CHECK(ps.originals_reduce);
    // the single torsion obstruction, in canonical form
    REQUIRE(ps.torsion.size() == 1);
    CHECK(ps.torsion[0] == immersion_torsion_expr());
}

TEST_CASE("the prolonged fixture file carries the same torsion") {
    SpecFile spec = load_fixture("immersion-prolonged");
    std::vector<ScalarExpr> t = torsion_of(*spec.system);
    REQUIRE(t.size() == 1);
    CHECK(t[0] == immersion_torsion_expr());
    // and it evaluates to zero at the fixture's reported point
    CHECK(t[0].eval(*spec.point) == 0);
}

TEST_CASE("prolong agrees with the hand-written prolonged fixture") {
    ProlongedSystem ps = prolong_fixture("immersion");
    SpecFile hand = load_fixture("immersion-prolonged");
    REQUIRE(ps.system.generators().size() == hand.system->generators().size());
    for (size_t i = 0; i < ps.system.generators().size(); ++i)
        CHECK(ps.system.generators()[i].same_terms(hand.system->generators()[i]));
    for (int i = 1; i <= 12; ++i)
        CHECK(ps.manifold->d_theta(i).same_terms(hand.system->manifold()->d_theta(i)));
}

TEST_CASE("harmonic and webs prolong without torsion") {
    for (auto *name : {"harmonic", "webs", "frobenius"}) {
        ProlongedSystem ps = prolong_fixture(name);
        CHECK(ps.torsion.empty());
        CHECK(ps.originals_reduce);
    }
}

TEST_CASE("harmonic prolongation keeps absorbed residues zero at random points") {
    // independent check of absorbability: over random base points the prolonged
    // chart stays consistent, so integral elements exist everywhere
    ProlongedSystem ps = prolong_fixture("harmonic");
    ExprGen gen(1212, {});
    Chart chart = make_chart(ps.system, ps.system.independence());
    auto eqs = chart_equations(ps.system, chart);
    std::set<std::string> unknowns(chart.unknowns.begin(), chart.unknowns.end());
    for (int t = 0; t < 20; ++t) {
        Point p;
        for (auto *c : {"x", "y", "u", "ux", "uy", "a", "b"}) p.set(c, gen.rational());
        // substitute the point into the affine system and solve
        std::vector<std::vector<ScalarExpr>> rows;
        std::vector<ScalarExpr> rhs;
        for (auto &eq : eqs) {
            std::map<std::string, ScalarExpr> cf;
            ScalarExpr cp;
            REQUIRE(eq.linear_in(unknowns, cf, cp));
            std::vector<ScalarExpr> row;
            for (auto &u : chart.unknowns) {
                auto it = cf.find(u);
                row.push_back(it == cf.end() ? ScalarExpr()
                                             : ScalarExpr::rational(it->second.eval(p)));
            }
            rows.push_back(std::move(row));
            rhs.push_back(ScalarExpr::rational(-cp.eval(p)));
        }
        auto sol = solve_linear(rows, rhs, chart.unknowns.size());
        CHECK(sol.has_value());
    }
}

TEST_CASE("lagrangian prolongation is involutive again") {
    SpecFile spec = load_fixture("lagrangian-n2");
    ProlongedSystem ps = prolong_fixture("lagrangian-n2");
    CHECK(ps.torsion.empty());
    REQUIRE(ps.free_params.size() == 3); // the symmetric matrix
    Point p = *spec.point;
    for (auto &prm : ps.free_params) p.set(prm, 0);
    Chart chart = make_chart(ps.system, ps.system.independence(), &p);
    std::vector<std::vector<mpq_class>> zero(static_cast<size_t>(chart.q()),
                                             std::vector<mpq_class>(2, mpq_class(0)));
    IntegralElement e = element_from_chart(ps.system, chart, p, zero);
    CartanReport rep = cartan_test(ps.system, e, 3);
    CHECK(rep.involutive);
    CHECK(rep.characters == std::vector<int>{2, 2, 1});
}

TEST_CASE("integral elements lift through torsion-free prolongations") {
    for (auto *name : {"harmonic", "lagrangian-n2", "webs"}) {
        SpecFile spec = load_fixture(name);
        const ExteriorSystem &s = *spec.system;
        IntegralElement e = element_of(spec);
        Chart chart = make_chart(s, s.independence(), &e.point);
        ProlongedSystem ps = prolong(s, chart);
        REQUIRE(ps.torsion.empty());
        // the lifted point: base point plus the element's free chart parameters
        auto a = e.chart_a ? *e.chart_a : a_matrix_of(s, chart, e);
        Point lifted = e.point;
        for (size_t t = 0; t < ps.free_params.size(); ++t) {
            auto [ri, cj] = ps.free_cols[t];
            lifted.set(ps.free_params[t], a[static_cast<size_t>(ri)][static_cast<size_t>(cj)]);
        }
        // solving the prolonged chart at the lifted point gives an integral
        // element of the prolongation projecting onto e
        Chart pchart = make_chart(ps.system, ps.system.independence(), &lifted);
        auto eqs = chart_equations(ps.system, pchart);
        std::set<std::string> unknowns(pchart.unknowns.begin(), pchart.unknowns.end());
        std::vector<std::vector<ScalarExpr>> rows;
        std::vector<ScalarExpr> rhs;
        for (auto &eq : eqs) {
            std::map<std::string, ScalarExpr> cf;
            ScalarExpr cp;
            REQUIRE(eq.linear_in(unknowns, cf, cp));
            std::vector<ScalarExpr> row;
            for (auto &u : pchart.unknowns) {
                auto it = cf.find(u);
                row.push_back(it == cf.end() ? ScalarExpr()
                                             : ScalarExpr::rational(it->second.eval(lifted)));
            }
            rows.push_back(std::move(row));
            rhs.push_back(ScalarExpr::rational(-cp.eval(lifted)));
        }
        auto sol = solve_linear(rows, rhs, pchart.unknowns.size());
        REQUIRE(sol.has_value());
        std::vector<std::vector<mpq_class>> amat(static_cast<size_t>(pchart.q()),
                                                 std::vector<mpq_class>(static_cast<size_t>(s.p())));
        for (int i = 0; i < pchart.q(); ++i)
            for (int j = 0; j < s.p(); ++j) {
                const ScalarExpr &v = sol->particular[static_cast<size_t>(i * s.p() + j)];
                amat[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    v.is_zero() ? mpq_class(0) : v.eval(lifted);
            }
        IntegralElement lift = element_from_chart(ps.system, pchart, lifted, amat);
        // projection: the base components of the lifted basis match the element
        for (int j = 0; j < s.p(); ++j) {
            auto lc = lift.basis[static_cast<size_t>(j)].numeric(lifted);
            auto ec = e.basis[static_cast<size_t>(j)].numeric(e.point);
            // both bases are omega-normalized, so they agree componentwise
            for (int c = 0; c < s.manifold()->dim(); ++c)
                CHECK(lc[static_cast<size_t>(c)] == ec[static_cast<size_t>(c)]);
        }
    }
}

TEST_CASE("theta-prime vanishes exactly on solved assignments") {
    ProlongedSystem ps = prolong_fixture("immersion");
    SpecFile spec = load_fixture("immersion");
    ExprGen gen(4242, {});
    // an assignment of the chart unknowns satisfies the chart equations exactly
    // when the corresponding values of the free parameters reproduce it
    auto eqs = chart_equations(*spec.system, ps.base_chart);
    std::set<std::string> unknowns(ps.base_chart.unknowns.begin(), ps.base_chart.unknowns.end());
    for (int t = 0; t < 40; ++t) {
        Point vals;
        vals.set("a", gen.rational());
        vals.set("b", gen.rational());
        vals.set("c", gen.rational());
        // evaluate the solved entries at the parameters
        Point assign;
        for (size_t i = 0; i < ps.a_entries.size(); ++i)
            for (size_t j = 0; j < ps.a_entries[i].size(); ++j)
                assign.set(ps.base_chart.unknown(static_cast<int>(i), static_cast<int>(j), 3),
                           ps.a_entries[i][j].is_zero() ? mpq_class(0)
                                                        : ps.a_entries[i][j].eval(vals));
        for (auto &eq : eqs) CHECK(eq.eval(assign) == 0);
        // perturb one solved entry: some equation must fail
        Point bad = assign;
        bad.set(ps.base_chart.unknown(2, 0, 3), bad.get(ps.base_chart.unknown(2, 0, 3)) + 1);
        bool all_zero = true;
        for (auto &eq : eqs)
            if (eq.eval(bad) != 0) all_zero = false;
        CHECK_FALSE(all_zero);
    }
}

TEST_CASE("torsion is stable under generator permutations") {
    SpecFile spec = load_fixture("immersion-prolonged");
    const ExteriorSystem &s = *spec.system;
    std::vector<ScalarExpr> base = torsion_of(s);
    REQUIRE(base.size() == 1);
    std::vector<DForm> gens = s.generators();
    std::vector<size_t> perm{3, 0, 5, 1, 4, 2};
    std::vector<DForm> shuffled;
    for (size_t i : perm) shuffled.push_back(gens[i]);
    ExteriorSystem s2 = ExteriorSystem::make(s.manifold(), shuffled, s.p(), s.independence());
    std::vector<ScalarExpr> t2 = torsion_of(s2);
    REQUIRE(t2.size() == 1);
    CHECK((t2[0] == base[0] || t2[0] == -base[0]));
}

TEST_CASE("restriction to the torsion-zero locus") {
    ProlongedSystem ps = prolong_fixture("immersion");
    REQUIRE(ps.torsion.size() == 1);

    SUBCASE("solving for b gives the involutive restricted system") {
        ProlongedSystem rs = restrict_system(ps, ps.torsion[0], "b");
        CHECK(rs.manifold->dim() == 11);
        CHECK(rs.torsion.empty());
        Point pt;
        pt.set("K", 0);
        pt.set("s", 4);
        pt.set("R33", 1);
        pt.set("a", 0);
        pt.set("c", 1);
        Chart chart = make_chart(rs.system, rs.system.independence(), &pt);
        auto eqs = chart_equations(rs.system, chart);
        std::set<std::string> unknowns(chart.unknowns.begin(), chart.unknowns.end());
        std::vector<std::vector<ScalarExpr>> rows;
        std::vector<ScalarExpr> rhs;
        for (auto &eq : eqs) {
            std::map<std::string, ScalarExpr> cf;
            ScalarExpr cp;
            REQUIRE(eq.linear_in(unknowns, cf, cp));
            std::vector<ScalarExpr> row;
            for (auto &u : chart.unknowns) {
                auto it = cf.find(u);
                row.push_back(it == cf.end() ? ScalarExpr()
                                             : ScalarExpr::rational(it->second.eval(pt)));
            }
            rows.push_back(std::move(row));
            rhs.push_back(ScalarExpr::rational(-cp.eval(pt)));
        }
        auto sol = solve_linear(rows, rhs, chart.unknowns.size());
        REQUIRE(sol.has_value());
        CHECK(sol->kernel.size() == 2); // two dimensions of elements per point
        std::vector<std::vector<mpq_class>> amat(static_cast<size_t>(chart.q()),
                                                 std::vector<mpq_class>(3));
        for (int i = 0; i < chart.q(); ++i)
            for (int j = 0; j < 3; ++j) {
                const ScalarExpr &v = sol->particular[static_cast<size_t>(i * 3 + j)];
                amat[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    v.is_zero() ? mpq_class(0) : v.eval(pt);
            }
        IntegralElement e = element_from_chart(rs.system, chart, pt, amat);
        CartanReport rep = cartan_test(rs.system, e, 11);
        CHECK(rep.involutive);
        REQUIRE(rep.characters.size() == 4);
        CHECK(rep.characters[1] == 2);
        CHECK(rep.characters[2] == 0);
        CHECK(rep.actual_dim - rep.dim_m == 2);
    }

    SUBCASE("restricting by zero is the identity") {
        ProlongedSystem same = restrict_system(ps, ScalarExpr(), "b");
        CHECK(same.manifold->dim() == ps.manifold->dim());
        CHECK(same.free_params == ps.free_params);
    }

    SUBCASE("an explicit substitution gives the same restriction") {
        ProlongedSystem solved = restrict_system(ps, ps.torsion[0], "b");
        ScalarExpr bexpr = (sym("s") / ScalarExpr(4) - sym("R33") - sym("K") - sym("a") * sym("a")) /
                           sym("c");
        ProlongedSystem direct = restrict_with_substitution(ps, "b", bexpr);
        REQUIRE(direct.system.generators().size() == solved.system.generators().size());
        for (size_t i = 0; i < solved.system.generators().size(); ++i)
            CHECK(direct.system.generators()[i].same_terms(solved.system.generators()[i]));
        // a substitution may not mention the eliminated symbol
        CHECK_THROWS_AS(restrict_with_substitution(ps, "b", sym("b") + ScalarExpr(1)), NotSolvable);
    }

    SUBCASE("the torsion is not solvable for its quadratic symbol") {
        CHECK_THROWS_AS(restrict_system(ps, ps.torsion[0], "a"), NotSolvable);
    }
}

TEST_CASE("iterate_prolongation drives the fixtures to their endpoints") {
    SUBCASE("harmonic is involutive at step zero") {
        SpecFile spec = load_fixture("harmonic");
        auto steps = iterate_prolongation(*spec.system, *spec.point, 17, 4);
        REQUIRE(steps.size() == 1);
        CHECK(steps[0].status == ProlongationStatus::Involutive);
        CHECK(steps[0].report.characters == std::vector<int>{1, 2, 0});
    }
    SUBCASE("webs and lagrangian are involutive at step zero") {
        for (auto *name : {"webs", "lagrangian-n2"}) {
            SpecFile spec = load_fixture(name);
            Point pt = spec.point ? *spec.point : Point();
            auto steps = iterate_prolongation(*spec.system, pt, 17, 4);
            REQUIRE(steps.size() == 1);
            CHECK(steps[0].status == ProlongationStatus::Involutive);
        }
    }
    SUBCASE("immersion stops at nonzero torsion") {
        SpecFile spec = load_fixture("immersion");
        auto steps = iterate_prolongation(*spec.system, *spec.point, 17, 4);
        REQUIRE(steps.size() == 1);
        CHECK(steps[0].status == ProlongationStatus::TorsionRequiresRestriction);
        REQUIRE(steps[0].torsion.size() == 1);
        CHECK(steps[0].torsion[0] == immersion_torsion_expr());
        CHECK_FALSE(steps[0].report.involutive);
    }
}

TEST_CASE("non-affine chart equations raise AffineOnly") {
    auto m = Manifold::coordinates("R4", {"x1", "x2", "y", "z"});
    auto f = m->coframe_form(3).wedge(m->coframe_form(4)); // dy ^ dz
    ExteriorSystem s = ExteriorSystem::make(m, {f}, 2, {1, 2});
    Point p;
    for (auto *c : {"x1", "x2", "y", "z"}) p.set(c, 0);
    Chart chart = make_chart(s, s.independence(), &p);
    auto eqs = chart_equations(s, chart);
    REQUIRE(eqs.size() == 1); // a1_1 a2_2 - a1_2 a2_1, quadratic
    CHECK_THROWS_AS(prolong(s, chart), AffineOnly);
    // and the cartan report carries the nonlinearity caveat
    std::vector<std::vector<mpq_class>> zero(2, std::vector<mpq_class>(2, mpq_class(0)));
    IntegralElement e = element_from_chart(s, chart, p, zero);
    ActualDimension ad = actual_dimension(s, e, chart);
    CHECK(ad.linearity_caveat);
}
