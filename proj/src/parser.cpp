#include "eds/parser.hpp"
#include "eds/errors.hpp"

#include <cctype>
#include <sstream>

namespace eds {

namespace {

enum class Tok {
    Ident,
    Int,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
    Caret,
    Plus,
    Minus,
    Star,
    Slash,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string &src) { tokenize(src); }

    const Token &peek(size_t ahead = 0) const {
        size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    Token take() {
        Token t = tokens_[pos_];
        if (pos_ + 1 < tokens_.size()) ++pos_;
        return t;
    }

private:
    void tokenize(const std::string &src) {
        size_t pos = 0;
        int line = 1, col = 1;
        auto advance = [&] {
            if (src[pos] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++pos;
        };
        for (;;) {
            for (;;) {
                while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
                    advance();
                if (pos + 1 < src.size() && src[pos] == '/' && src[pos + 1] == '/') {
                    while (pos < src.size() && src[pos] != '\n') advance();
                    continue;
                }
                break;
            }
            Token tok;
            tok.line = line;
            tok.col = col;
            if (pos >= src.size()) {
                tok.kind = Tok::End;
                tokens_.push_back(std::move(tok));
                return;
            }
            char c = src[pos];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (pos < src.size() &&
                       (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
                    id += src[pos];
                    advance();
                }
                tok.kind = Tok::Ident;
                tok.text = std::move(id);
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::string num;
                while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                    num += src[pos];
                    advance();
                }
                tok.kind = Tok::Int;
                tok.text = std::move(num);
            } else {
                advance();
                switch (c) {
                case '{': tok.kind = Tok::LBrace; break;
                case '}': tok.kind = Tok::RBrace; break;
                case '(': tok.kind = Tok::LParen; break;
                case ')': tok.kind = Tok::RParen; break;
                case '[': tok.kind = Tok::LBracket; break;
                case ']': tok.kind = Tok::RBracket; break;
                case '=': tok.kind = Tok::Eq; break;
                case ';': tok.kind = Tok::Semi; break;
                case ',': tok.kind = Tok::Comma; break;
                case '^': tok.kind = Tok::Caret; break;
                case '+': tok.kind = Tok::Plus; break;
                case '-': tok.kind = Tok::Minus; break;
                case '*': tok.kind = Tok::Star; break;
                case '/': tok.kind = Tok::Slash; break;
                default:
                    throw ParseError(tok.line, tok.col,
                                     std::string("unexpected character '") + c + "'");
                }
                tok.text = c;
            }
            tokens_.push_back(std::move(tok));
        }
    }

    std::vector<Token> tokens_;
    size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(const std::string &src) : lex_(src) {}

    SpecFile parse() {
        SpecFile spec;
        while (lex_.peek().kind != Tok::End) {
            Token t = expect(Tok::Ident, "top-level keyword");
            if (t.text == "manifold") {
                parse_manifold(spec);
            } else if (t.text == "system") {
                parse_system(spec);
            } else if (t.text == "point") {
                parse_point(spec);
            } else if (t.text == "element") {
                parse_element(spec);
            } else if (t.text == "covector") {
                parse_covector(spec);
            } else if (t.text == "seed") {
                expect(Tok::Eq, "'='");
                Token v = expect(Tok::Int, "seed value");
                spec.seed = std::stoull(v.text);
                expect(Tok::Semi, "';'");
            } else {
                throw ParseError(t.line, t.col, "expected manifold/system/point/element/covector/seed, got '" + t.text + "'");
            }
        }
        return spec;
    }

private:
    Token expect(Tok kind, const std::string &what) {
        Token t = lex_.take();
        if (t.kind != kind)
            throw ParseError(t.line, t.col, "expected " + what + ", got '" + t.text + "'");
        return t;
    }

    bool accept(Tok kind, Token *out = nullptr) {
        if (lex_.peek().kind != kind) return false;
        Token t = lex_.take();
        if (out) *out = t;
        return true;
    }

    // ----- manifold ---------------------------------------------------------

    void parse_manifold(SpecFile &spec) {
        Token name = expect(Tok::Ident, "manifold name");
        expect(Tok::LBrace, "'{'");
        std::vector<std::string> coords, coframe;

        // all names must be known before structure expressions can resolve, so
        // right-hand sides are captured as raw text and parsed in a second pass
        struct RawEq {
            std::string target; // coframe element or scalar
            bool is_scalar;
            std::string expr_text;
            int line, col;
        };
        std::vector<RawEq> eqs;

        auto collect_expr_text = [&]() {
            // capture raw text up to the matching ';' (brace-free expressions)
            std::string out;
            int depth = 0;
            for (;;) {
                const Token &t = lex_.peek();
                if (t.kind == Tok::End) throw ParseError(t.line, t.col, "unterminated expression");
                if (t.kind == Tok::Semi && depth == 0) break;
                if (t.kind == Tok::LParen) ++depth;
                if (t.kind == Tok::RParen) --depth;
                Token tok = lex_.take();
                if (tok.kind == Tok::Ident || tok.kind == Tok::Int)
                    out += " " + tok.text + " ";
                else
                    out += tok.text;
            }
            expect(Tok::Semi, "';'");
            return out;
        };

        while (!accept(Tok::RBrace)) {
            Token kw = expect(Tok::Ident, "manifold statement");
            if (kw.text == "coordinates") {
                while (lex_.peek().kind == Tok::Ident) coords.push_back(lex_.take().text);
                expect(Tok::Semi, "';'");
            } else if (kw.text == "coframe") {
                while (lex_.peek().kind == Tok::Ident) coframe.push_back(lex_.take().text);
                expect(Tok::Semi, "';'");
            } else if (kw.text == "d") {
                Token target = expect(Tok::Ident, "coframe element after 'd'");
                Token eq = expect(Tok::Eq, "'='");
                RawEq r{target.text, false, collect_expr_text(), eq.line, eq.col};
                eqs.push_back(std::move(r));
            } else if (kw.text == "scalar") {
                Token sname = expect(Tok::Ident, "scalar name");
                expect(Tok::LBrace, "'{'");
                Token dkw = expect(Tok::Ident, "'d' inside scalar block");
                std::string expected_one = "d";
                std::string expected_two = "d" + sname.text;
                std::string target = sname.text;
                if (dkw.text == expected_one) {
                    Token again = expect(Tok::Ident, "scalar name after 'd'");
                    if (again.text != sname.text)
                        throw ParseError(again.line, again.col,
                                         "differential of '" + again.text + "' inside block of '" + sname.text + "'");
                } else if (dkw.text != expected_two) {
                    throw ParseError(dkw.line, dkw.col, "expected d " + sname.text + " = ... ;");
                }
                Token eq = expect(Tok::Eq, "'='");
                RawEq r{target, true, collect_expr_text(), eq.line, eq.col};
                eqs.push_back(std::move(r));
                expect(Tok::RBrace, "'}'");
            } else {
                throw ParseError(kw.line, kw.col, "unknown manifold statement '" + kw.text + "'");
            }
        }

        if (!coords.empty() && !coframe.empty())
            throw ParseError(name.line, name.col, "manifold mixes 'coordinates' and 'coframe'");
        if (coords.empty() && coframe.empty())
            throw ParseError(name.line, name.col, "manifold declares no coframe");

        if (!coords.empty()) {
            if (!eqs.empty())
                throw ParseError(name.line, name.col,
                                 "coordinate manifolds take no structure equations");
            try {
                spec.manifolds.push_back(Manifold::coordinates(name.text, coords));
            } catch (const Error &err) {
                throw ParseError(name.line, name.col, err.what());
            }
            return;
        }

        // provisional manifold: all structure zero, declared scalars closed
        std::vector<std::pair<std::string, TermMap>> proto_scalars;
        for (auto &r : eqs)
            if (r.is_scalar) proto_scalars.emplace_back(r.target, TermMap{});
        ManifoldPtr proto = Manifold::create(name.text, coframe, {}, proto_scalars);

        std::map<std::string, TermMap> structure;
        std::vector<std::pair<std::string, TermMap>> scalars;
        for (auto &r : eqs) {
            Parser sub(r.expr_text);
            DForm f = sub.parse_expression_on(proto, /*allow_d=*/false);
            int want = r.is_scalar ? 1 : 2;
            if (!f.is_zero() && f.degree() != want)
                throw ParseError(r.line, r.col,
                                 "expected a degree-" + std::to_string(want) + " form for d " + r.target);
            if (r.is_scalar)
                scalars.emplace_back(r.target, f.is_zero() ? TermMap{} : f.terms());
            else {
                if (proto->coframe_index(r.target) == 0)
                    throw ParseError(r.line, r.col, "unknown coframe element '" + r.target + "'");
                if (!f.is_zero()) structure[r.target] = f.terms();
            }
        }
        try {
            spec.manifolds.push_back(Manifold::create(name.text, coframe, structure, scalars));
        } catch (const Error &err) {
            throw ParseError(name.line, name.col, err.what());
        }
    }

    // ----- system -----------------------------------------------------------

    void parse_system(SpecFile &spec) {
        Token name = expect(Tok::Ident, "system name");
        Token on = expect(Tok::Ident, "'on'");
        if (on.text != "on") throw ParseError(on.line, on.col, "expected 'on'");
        Token mname = expect(Tok::Ident, "manifold name");
        ManifoldPtr m = spec.manifold_by_name(mname.text);
        if (!m) throw ParseError(mname.line, mname.col, "unknown manifold '" + mname.text + "'");
        expect(Tok::LBrace, "'{'");
        std::optional<int> p;
        std::vector<int> independence;
        std::vector<DForm> generators;
        while (!accept(Tok::RBrace)) {
            Token kw = expect(Tok::Ident, "system statement");
            if (kw.text == "p") {
                expect(Tok::Eq, "'='");
                Token v = expect(Tok::Int, "integer");
                p = std::stoi(v.text);
                expect(Tok::Semi, "';'");
            } else if (kw.text == "independence") {
                expect(Tok::Eq, "'='");
                while (lex_.peek().kind == Tok::Ident) {
                    Token w = lex_.take();
                    int idx = m->coframe_index(w.text);
                    if (idx == 0)
                        throw ParseError(w.line, w.col, "unknown coframe element '" + w.text + "'");
                    independence.push_back(idx);
                }
                expect(Tok::Semi, "';'");
            } else if (kw.text == "generator") {
                DForm f = parse_expression_on(m, /*allow_d=*/true);
                expect(Tok::Semi, "';'");
                if (f.is_zero())
                    throw ParseError(kw.line, kw.col, "generator is identically zero");
                generators.push_back(std::move(f));
            } else {
                throw ParseError(kw.line, kw.col, "unknown system statement '" + kw.text + "'");
            }
        }
        if (!p) throw ParseError(name.line, name.col, "system requires p");
        if (spec.system) throw ParseError(name.line, name.col, "only one system per file");
        spec.system_name = name.text;
        try {
            spec.system = ExteriorSystem::make(m, generators, *p, independence);
        } catch (const Error &err) {
            throw ParseError(name.line, name.col, err.what());
        }
    }

    // ----- point / element / covector ---------------------------------------

    mpq_class parse_rational() {
        bool neg = accept(Tok::Minus);
        Token n = expect(Tok::Int, "number");
        mpz_class num(n.text);
        mpz_class den = 1;
        if (accept(Tok::Slash)) {
            Token d = expect(Tok::Int, "denominator");
            den = mpz_class(d.text);
            if (den == 0) throw ParseError(d.line, d.col, "zero denominator");
        }
        mpq_class q(num, den);
        q.canonicalize();
        if (neg) q = -q;
        return q;
    }

    std::vector<mpq_class> parse_vector() {
        expect(Tok::LBracket, "'['");
        std::vector<mpq_class> v;
        if (!accept(Tok::RBracket)) {
            v.push_back(parse_rational());
            while (accept(Tok::Comma)) v.push_back(parse_rational());
            expect(Tok::RBracket, "']'");
        }
        return v;
    }

    std::vector<std::vector<mpq_class>> parse_matrix() {
        expect(Tok::LBracket, "'['");
        std::vector<std::vector<mpq_class>> rows;
        if (!accept(Tok::RBracket)) {
            rows.push_back(parse_vector());
            while (accept(Tok::Comma)) rows.push_back(parse_vector());
            expect(Tok::RBracket, "']'");
        }
        return rows;
    }

    void parse_point(SpecFile &spec) {
        expect(Tok::LBrace, "'{'");
        Point pt;
        while (!accept(Tok::RBrace)) {
            Token sym = expect(Tok::Ident, "symbol");
            expect(Tok::Eq, "'='");
            pt.set(sym.text, parse_rational());
            expect(Tok::Semi, "';'");
        }
        spec.point = std::move(pt);
    }

    void parse_element(SpecFile &spec) {
        expect(Tok::LBrace, "'{'");
        while (!accept(Tok::RBrace)) {
            Token kw = expect(Tok::Ident, "'a' or 'basis'");
            expect(Tok::Eq, "'='");
            if (kw.text == "a")
                spec.element_a = parse_matrix();
            else if (kw.text == "basis")
                spec.element_basis = parse_matrix();
            else
                throw ParseError(kw.line, kw.col, "unknown element field '" + kw.text + "'");
            expect(Tok::Semi, "';'");
        }
    }

    void parse_covector(SpecFile &spec) {
        expect(Tok::LBrace, "'{'");
        while (!accept(Tok::RBrace)) {
            Token kw = expect(Tok::Ident, "'xi'");
            if (kw.text != "xi") throw ParseError(kw.line, kw.col, "expected 'xi'");
            expect(Tok::Eq, "'='");
            spec.covector = parse_vector();
            expect(Tok::Semi, "';'");
        }
    }

    // ----- expressions -------------------------------------------------------

public:
    DForm parse_expression_on(const ManifoldPtr &m, bool allow_d) {
        ctx_manifold_ = m;
        ctx_allow_d_ = allow_d;
        return parse_add();
    }

private:
    DForm parse_add() {
        DForm acc = parse_wedge();
        for (;;) {
            if (accept(Tok::Plus)) {
                acc = combine_add(acc, parse_wedge(), false);
            } else if (accept(Tok::Minus)) {
                acc = combine_add(acc, parse_wedge(), true);
            } else {
                break;
            }
        }
        return acc;
    }

    DForm combine_add(const DForm &a, const DForm &b, bool subtract) {
        const Token &t = lex_.peek();
        DForm bb = subtract ? -b : b;
        if (a.is_zero()) return bb;
        if (bb.is_zero()) return a;
        if (a.degree() != bb.degree())
            throw ParseError(t.line, t.col,
                             "cannot add forms of degree " + std::to_string(a.degree()) + " and " +
                                 std::to_string(bb.degree()));
        return a + bb;
    }

    DForm parse_wedge() {
        DForm acc = parse_mul();
        while (lex_.peek().kind == Tok::Caret) {
            lex_.take();
            DForm rhs = parse_mul();
            acc = acc.wedge(rhs);
        }
        return acc;
    }

    DForm parse_mul() {
        DForm acc = parse_postfix();
        for (;;) {
            if (accept(Tok::Star)) {
                DForm rhs = parse_postfix();
                acc = scalar_combine(acc, rhs, /*divide=*/false);
            } else if (lex_.peek().kind == Tok::Slash) {
                Token t = lex_.take();
                DForm rhs = parse_postfix();
                if (rhs.degree() != 0 || rhs.is_zero())
                    throw ParseError(t.line, t.col, "division requires a nonzero scalar divisor");
                ScalarExpr inv = ScalarExpr(1) / scalar_of(rhs);
                acc = acc.scale(inv);
            } else {
                break;
            }
        }
        return acc;
    }

    ScalarExpr scalar_of(const DForm &f) {
        if (f.is_zero()) return ScalarExpr();
        return f.terms().begin()->second;
    }

    DForm scalar_combine(const DForm &a, const DForm &b, bool divide) {
        (void)divide;
        const Token &t = lex_.peek();
        if (a.degree() == 0) return b.scale(scalar_of(a));
        if (b.degree() == 0) return a.scale(scalar_of(b));
        throw ParseError(t.line, t.col, "'*' needs a scalar operand; use '^' to wedge forms");
    }

    DForm parse_postfix() {
        DForm acc = parse_unary();
        // '^' immediately followed by an integer literal is a scalar power;
        // otherwise it is the wedge, handled one level up
        while (lex_.peek().kind == Tok::Caret && lex_.peek(1).kind == Tok::Int) {
            Token caret = lex_.take();
            Token e = lex_.take();
            if (acc.degree() != 0)
                throw ParseError(caret.line, caret.col,
                                 "integer power applies to scalars; use '*' for multiples of forms");
            acc = ctx_manifold_->scalar_form(scalar_of(acc).pow(std::stol(e.text)));
        }
        return acc;
    }

    DForm parse_unary() {
        if (accept(Tok::Minus)) return -parse_unary();
        return parse_primary();
    }

    DForm parse_primary() {
        Token t = lex_.take();
        switch (t.kind) {
        case Tok::Int:
            return ctx_manifold_->scalar_form(ScalarExpr::integer(mpz_class(t.text)));
        case Tok::LParen: {
            DForm e = parse_add();
            expect(Tok::RParen, "')'");
            return e;
        }
        case Tok::Ident: {
            if (t.text == "d" && lex_.peek().kind == Tok::LParen) {
                lex_.take();
                DForm inner = parse_add();
                expect(Tok::RParen, "')'");
                if (!ctx_allow_d_)
                    throw ParseError(t.line, t.col,
                                     "d(...) is not available inside manifold declarations");
                return inner.d();
            }
            int idx = ctx_manifold_->coframe_index(t.text);
            if (idx != 0) return ctx_manifold_->coframe_form(idx);
            if (ctx_manifold_->has_scalar(t.text))
                return ctx_manifold_->scalar_form(ScalarExpr::symbol(t.text));
            throw ParseError(t.line, t.col, "unknown symbol '" + t.text + "'");
        }
        default:
            throw ParseError(t.line, t.col, "unexpected token '" + t.text + "' in expression");
        }
    }

    Lexer lex_;
    ManifoldPtr ctx_manifold_;
    bool ctx_allow_d_ = false;
};

} // namespace

ManifoldPtr SpecFile::manifold_by_name(const std::string &name) const {
    for (auto &m : manifolds)
        if (m->name() == name) return m;
    return nullptr;
}

SpecFile parse_specfile(const std::string &text) { return Parser(text).parse(); }

namespace {

std::string form_expr(const DForm &f) {
    if (f.is_zero()) return "0";
    return f.str();
}

} // namespace

std::string print_manifold(const ManifoldPtr &m) {
    std::ostringstream os;
    os << "manifold " << m->name() << " {\n";
    if (m->is_coordinate()) {
        os << "  coordinates";
        for (auto &s : m->scalar_names()) os << " " << s;
        os << ";\n";
    } else {
        os << "  coframe";
        for (auto &c : m->coframe()) os << " " << c;
        os << ";\n";
        for (int i = 1; i <= m->dim(); ++i) {
            DForm dth = m->d_theta(i);
            if (!dth.is_zero())
                os << "  d " << m->coframe()[static_cast<size_t>(i - 1)] << " = " << form_expr(dth)
                   << ";\n";
        }
        for (auto &s : m->scalar_names())
            os << "  scalar " << s << " { d " << s << " = " << form_expr(m->scalar_differential(s))
               << "; }\n";
    }
    os << "}\n";
    return os.str();
}

std::string print_system(const std::string &name, const ExteriorSystem &s) {
    std::ostringstream os;
    os << "system " << name << " on " << s.manifold()->name() << " {\n";
    os << "  p = " << s.p() << ";\n";
    if (!s.independence().empty()) {
        os << "  independence =";
        for (int i : s.independence()) os << " " << s.manifold()->coframe()[static_cast<size_t>(i - 1)];
        os << ";\n";
    }
    for (auto &g : s.generators()) os << "  generator " << form_expr(g) << ";\n";
    os << "}\n";
    return os.str();
}

std::string print_point(const Point &p) {
    std::ostringstream os;
    os << "point {";
    bool first = true;
    for (auto &[k, v] : p.values()) {
        os << (first ? " " : " ") << k << " = " << v.get_str() << ";";
        first = false;
    }
    os << " }\n";
    return os.str();
}

std::string print_specfile(const SpecFile &spec) {
    std::ostringstream os;
    for (auto &m : spec.manifolds) os << print_manifold(m);
    if (spec.system) os << print_system(spec.system_name, *spec.system);
    if (spec.point) os << print_point(*spec.point);
    auto mat = [&os](const char *label, const std::vector<std::vector<mpq_class>> &rows) {
        os << "element { " << label << " = [";
        for (size_t i = 0; i < rows.size(); ++i) {
            os << (i ? ", [" : "[");
            for (size_t j = 0; j < rows[i].size(); ++j)
                os << (j ? ", " : "") << rows[i][j].get_str();
            os << "]";
        }
        os << "]; }\n";
    };
    if (spec.element_a) mat("a", *spec.element_a);
    if (spec.element_basis) mat("basis", *spec.element_basis);
    if (spec.covector) {
        os << "covector { xi = [";
        for (size_t j = 0; j < spec.covector->size(); ++j)
            os << (j ? ", " : "") << (*spec.covector)[j].get_str();
        os << "]; }\n";
    }
    if (spec.seed) os << "seed = " << *spec.seed << ";\n";
    return os.str();
}

} // namespace eds
