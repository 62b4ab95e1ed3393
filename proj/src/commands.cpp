#include "eds/commands.hpp"
#include "eds/errors.hpp"
#include "eds/linearize.hpp"
#include "eds/report.hpp"

#include <json.hpp>
#include <random>
#include <sstream>

namespace eds {

namespace {

using nlohmann::ordered_json;

const ExteriorSystem &need_system(const SpecFile &spec) {
    if (!spec.system) throw Error("file declares no system");
    return *spec.system;
}

Point need_point(const SpecFile &spec) {
    if (!spec.point) throw Error("command requires a point block");
    return *spec.point;
}

std::uint64_t seed_of(const SpecFile &spec, const CommandOptions &opts) {
    if (opts.seed) return *opts.seed;
    if (spec.seed) return *spec.seed;
    return 1;
}

std::vector<TangentVector> basis_from_rows(const ManifoldPtr &m,
                                           const std::vector<std::vector<mpq_class>> &rows) {
    std::vector<TangentVector> basis;
    for (auto &r : rows) {
        if (static_cast<int>(r.size()) != m->dim())
            throw Error("basis vector length does not match dim M");
        TangentVector v;
        v.comps.assign(r.size(), ScalarExpr());
        for (size_t i = 0; i < r.size(); ++i)
            if (r[i] != 0) v.comps[i] = ScalarExpr::rational(r[i]);
        basis.push_back(std::move(v));
    }
    return basis;
}

ordered_json xi_json(const std::vector<mpq_class> &xi) {
    ordered_json a = ordered_json::array();
    for (auto &c : xi) a.push_back(c.get_str());
    return a;
}

std::string render(const ordered_json &j, bool as_json, const std::string &text) {
    return as_json ? j.dump(2) + "\n" : text;
}

CommandResult cmd_check_element(const SpecFile &spec, const CommandOptions &opts) {
    const ExteriorSystem &s = need_system(spec);
    Point pt = need_point(spec);
    std::vector<TangentVector> basis;
    if (spec.element_basis) {
        basis = basis_from_rows(s.manifold(), *spec.element_basis);
    } else if (spec.element_a) {
        Chart chart = make_chart(s, s.independence(), &pt);
        // build the plane directly; integrality is what we are asked to decide
        const int p = s.p();
        if (static_cast<int>(spec.element_a->size()) != chart.q())
            throw Error("element a-matrix must have q = " + std::to_string(chart.q()) + " rows");
        for (int j = 0; j < p; ++j) {
            TangentVector v;
            v.comps.assign(static_cast<size_t>(s.manifold()->dim()), ScalarExpr());
            v.comps[static_cast<size_t>(chart.omega[static_cast<size_t>(j)] - 1)] = ScalarExpr(1);
            for (size_t i = 0; i < chart.pi.size(); ++i)
                v.comps[static_cast<size_t>(chart.pi[i] - 1)] =
                    ScalarExpr::rational((*spec.element_a)[i][static_cast<size_t>(j)]);
            basis.push_back(v);
        }
        for (auto &[pivot, combo] : chart.pivot_solve) {
            for (int j = 0; j < p; ++j) {
                mpq_class acc = 0;
                for (auto &[c, coeff] : combo)
                    acc += coeff.eval(pt) *
                           basis[static_cast<size_t>(j)].comps[static_cast<size_t>(c - 1)].eval(pt);
                basis[static_cast<size_t>(j)].comps[static_cast<size_t>(pivot - 1)] =
                    ScalarExpr::rational(acc);
            }
        }
    } else {
        throw Error("check-element requires an element block");
    }
    IntegralCheck chk = s.is_integral_element(pt, basis);
    ordered_json j;
    j["schema_version"] = 1;
    j["system"] = spec.system_name;
    j["integral"] = chk.ok;
    std::ostringstream text;
    text << "integral: " << (chk.ok ? "yes" : "no") << "\n";
    if (!chk.ok) {
        j["witness"] = chk.witness->describe(s);
        text << "witness: " << chk.witness->describe(s) << "\n";
    }
    return {0, render(j, opts.json, text.str()), ""};
}

CommandResult cmd_characters(const SpecFile &spec, const CommandOptions &opts) {
    const ExteriorSystem &s = need_system(spec);
    IntegralElement e = element_of(spec);
    Flag flag = generic_flag(s, e, seed_of(spec, opts));
    std::vector<int> chars = characters(s, flag);
    ordered_json j;
    j["schema_version"] = 1;
    j["system"] = spec.system_name;
    j["characters"] = chars;
    j["polar_ranks"] = flag.rank_profile();
    std::ostringstream text;
    text << "characters: (";
    for (size_t i = 0; i < chars.size(); ++i) text << (i ? ", " : "") << chars[i];
    text << ")\n";
    return {0, render(j, opts.json, text.str()), ""};
}

CommandResult cmd_cartan_test(const SpecFile &spec, const CommandOptions &opts) {
    const ExteriorSystem &s = need_system(spec);
    IntegralElement e = element_of(spec);
    CartanReport rep = cartan_test(s, e, seed_of(spec, opts));
    return {0, render(report_json(rep, spec.system_name), opts.json, report_text(rep, spec.system_name)), ""};
}

CommandResult cmd_torsion(const SpecFile &spec, const CommandOptions &opts) {
    const ExteriorSystem &s = need_system(spec);
    std::vector<ScalarExpr> t = torsion_of(s);
    ordered_json j;
    j["schema_version"] = 1;
    j["system"] = spec.system_name;
    ordered_json arr = ordered_json::array();
    for (auto &x : t) arr.push_back(x.str());
    j["torsion"] = arr;
    std::ostringstream text;
    if (t.empty()) {
        text << "torsion: none (all terms absorbable)\n";
    } else {
        text << "torsion:\n";
        for (auto &x : t) text << "  t = " << x.str() << "\n";
    }
    return {0, render(j, opts.json, text.str()), ""};
}

CommandResult cmd_prolong(const SpecFile &spec, const CommandOptions &opts) {
    const ExteriorSystem &s = need_system(spec);
    if (opts.max_steps) {
        Point pt = need_point(spec);
        auto steps = iterate_prolongation(s, pt, seed_of(spec, opts), *opts.max_steps);
        ordered_json j;
        j["schema_version"] = 1;
        j["system"] = spec.system_name;
        ordered_json arr = ordered_json::array();
        std::ostringstream text;
        for (size_t i = 0; i < steps.size(); ++i) {
            ordered_json st;
            st["step"] = i;
            switch (steps[i].status) {
            case ProlongationStatus::Involutive: st["status"] = "involutive"; break;
            case ProlongationStatus::TorsionRequiresRestriction:
                st["status"] = "torsion-requires-restriction";
                break;
            case ProlongationStatus::AffineOnly: st["status"] = "affine-only"; break;
            case ProlongationStatus::MaxSteps: st["status"] = "prolonged"; break;
            }
            if (!steps[i].report.characters.empty())
                st["report"] = report_json(steps[i].report, spec.system_name);
            ordered_json ta = ordered_json::array();
            for (auto &x : steps[i].torsion) ta.push_back(x.str());
            st["torsion"] = ta;
            arr.push_back(st);
            text << "step " << i << ": " << st["status"].get<std::string>() << "\n";
            if (!steps[i].report.characters.empty())
                text << report_text(steps[i].report, spec.system_name);
            for (auto &x : steps[i].torsion) text << "  torsion: " << x.str() << "\n";
        }
        j["steps"] = arr;
        return {0, render(j, opts.json, text.str()), ""};
    }

    Chart chart = make_chart(s, s.independence(), spec.point ? &*spec.point : nullptr);
    ProlongedSystem ps = prolong(s, chart);
    if (opts.solve_for) {
        if (ps.torsion.empty()) throw Error("no torsion to restrict by");
        ps = restrict_system(ps, ps.torsion.front(), *opts.solve_for);
    }
    SpecFile out;
    out.manifolds.push_back(ps.manifold);
    out.system_name = spec.system_name + "_prolonged";
    out.system = ps.system;
    if (spec.point) out.point = spec.point;
    std::string dsl = print_specfile(out);
    ordered_json j;
    j["schema_version"] = 1;
    j["system"] = spec.system_name;
    j["free_parameters"] = ps.free_params;
    ordered_json ta = ordered_json::array();
    for (auto &x : ps.torsion) ta.push_back(x.str());
    j["torsion"] = ta;
    j["originals_reduce"] = ps.originals_reduce;
    j["prolonged"] = dsl;
    std::ostringstream text;
    text << "// prolongation of " << spec.system_name << "; free parameters:";
    for (auto &pn : ps.free_params) text << " " << pn;
    text << "\n";
    for (auto &x : ps.torsion) text << "// torsion: " << x.str() << "\n";
    text << dsl;
    return {0, render(j, opts.json, text.str()), ""};
}

CommandResult cmd_symbol(const SpecFile &spec, const CommandOptions &opts) {
    const ExteriorSystem &s = need_system(spec);
    IntegralElement e = element_of(spec);
    if (!spec.covector) throw Error("symbol requires a covector block");
    Covector xi{*spec.covector};
    SymbolMap sm = symbol(s, e, xi);
    CharacteristicResult cr = is_characteristic(s, e, xi);
    ordered_json j;
    j["schema_version"] = 1;
    j["system"] = spec.system_name;
    j["xi"] = xi_json(xi.xi);
    j["rows"] = sm.matrix.size();
    j["normal_dim"] = sm.cols;
    j["kernel_dim"] = cr.kernel_dim;
    j["characteristic"] = cr.characteristic;
    std::ostringstream text;
    text << "symbol: " << sm.matrix.size() << " rows on a " << sm.cols << "-dimensional normal space\n";
    text << "kernel dimension: " << cr.kernel_dim << "\n";
    text << "characteristic: " << (cr.characteristic ? "yes" : "no") << "\n";
    return {0, render(j, opts.json, text.str()), ""};
}

CommandResult cmd_charvar(const SpecFile &spec, const CommandOptions &opts) {
    const ExteriorSystem &s = need_system(spec);
    IntegralElement e = element_of(spec);
    const int p = s.p();
    std::mt19937_64 rng(seed_of(spec, opts));
    auto dist = [&rng]() { return static_cast<int>(rng() % 19) - 9; };
    ordered_json results = ordered_json::array();
    int agree = 0;
    int total = 0;
    std::ostringstream text;
    for (int k = 0; k < opts.samples; ++k) {
        Covector xi;
        do {
            xi.xi.clear();
            for (int j = 0; j < p; ++j) xi.xi.push_back(dist());
        } while ([&] {
            for (auto &c : xi.xi)
                if (c != 0) return false;
            return true;
        }());
        CharacteristicResult cr = is_characteristic(s, e, xi);
        bool ext = hyperplane_extends_nonuniquely(s, e, xi);
        ordered_json r;
        r["xi"] = xi_json(xi.xi);
        r["characteristic"] = cr.characteristic;
        r["kernel_dim"] = cr.kernel_dim;
        r["extends_nonuniquely"] = ext;
        results.push_back(r);
        ++total;
        if (cr.characteristic == ext) ++agree;
        text << "xi #" << k << ": symbol " << (cr.characteristic ? "characteristic" : "regular")
             << " (kernel " << cr.kernel_dim << "), extension "
             << (ext ? "non-unique" : "unique") << "\n";
    }
    ordered_json j;
    j["schema_version"] = 1;
    j["system"] = spec.system_name;
    j["samples"] = total;
    j["agreement"] = agree;
    j["results"] = results;
    text << "agreement: " << agree << "/" << total << "\n";
    return {0, render(j, opts.json, text.str()), ""};
}

} // namespace

IntegralElement element_of(const SpecFile &spec) {
    const ExteriorSystem &s = need_system(spec);
    Point pt = need_point(spec);
    if (spec.element_basis)
        return make_integral_element(s, pt, basis_from_rows(s.manifold(), *spec.element_basis));
    if (spec.element_a) {
        Chart chart = make_chart(s, s.independence(), &pt);
        return element_from_chart(s, chart, pt, *spec.element_a);
    }
    throw Error("command requires an element block (a-matrix or basis)");
}

CommandResult run_command(const std::string &command, const std::string &file_text,
                          const CommandOptions &opts) {
    try {
        SpecFile spec = parse_specfile(file_text);
        if (command == "check-element") return cmd_check_element(spec, opts);
        if (command == "characters") return cmd_characters(spec, opts);
        if (command == "cartan-test") return cmd_cartan_test(spec, opts);
        if (command == "prolong") return cmd_prolong(spec, opts);
        if (command == "torsion") return cmd_torsion(spec, opts);
        if (command == "symbol") return cmd_symbol(spec, opts);
        if (command == "charvar") return cmd_charvar(spec, opts);
        return {1, "", "unknown command: " + command};
    } catch (const ParseError &pe) {
        return {2, "", pe.what()};
    } catch (const Error &e) {
        return {1, "", e.what()};
    }
}

} // namespace eds
