#pragma once

// Scenario files: lexer, recursive-descent parser, AST and canonical printer.

#include <cctype>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "cordfol/errors.hpp"
#include "cordfol/rational.hpp"

namespace cordfol::dsl {

struct Loc {
    int line = 1;
    int col = 1;
};

enum class Tok { ident, number, sym, newline, end };

struct Token {
    Tok kind;
    std::string text;
    Loc loc;
};

// Tokens of one scenario. Newlines inside brackets are dropped; '#' starts a comment.
// The UTF-8 symbols for wedge and minus are mapped to their ASCII spellings.
inline std::vector<Token> tokenize(const std::string& src)
{
    std::vector<Token> out;
    int line = 1, col = 1, depth = 0;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            unsigned char c = static_cast<unsigned char>(src[i]);
            if (c == '\n') {
                ++line;
                col = 1;
            } else if ((c & 0xC0) != 0x80) {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        Loc loc{line, col};
        if (c == ' ' || c == '\t' || c == '\r') {
            advance(1);
        } else if (c == '#') {
            while (i < src.size() && src[i] != '\n')
                advance(1);
        } else if (c == '\n') {
            if (depth == 0 && !out.empty() && out.back().kind != Tok::newline)
                out.push_back({Tok::newline, "\n", loc});
            advance(1);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            out.push_back({Tok::ident, src.substr(i, j - i), loc});
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            auto digits = [&] {
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])))
                    ++j;
            };
            digits();
            if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                digits();
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-'))
                    ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    j = k;
                    digits();
                }
            }
            out.push_back({Tok::number, src.substr(i, j - i), loc});
            advance(j - i);
        } else if (src.compare(i, 2, "/\\") == 0) {
            out.push_back({Tok::sym, "/\\", loc});
            advance(2);
        } else if (src.compare(i, 3, "\xE2\x88\xA7") == 0) {
            out.push_back({Tok::sym, "/\\", loc});
            advance(3);
        } else if (src.compare(i, 3, "\xE2\x88\x92") == 0) {
            out.push_back({Tok::sym, "-", loc});
            advance(3);
        } else if (std::string("()[]{},:=+-*^/").find(c) != std::string::npos) {
            if (c == '(' || c == '[' || c == '{')
                ++depth;
            if ((c == ')' || c == ']' || c == '}') && depth > 0)
                --depth;
            out.push_back({Tok::sym, std::string(1, c), loc});
            advance(1);
        } else {
            throw ParseError(line, col, "unexpected character '" + std::string(1, c) + "'");
        }
    }
    if (!out.empty() && out.back().kind != Tok::newline)
        out.push_back({Tok::newline, "\n", {line, col}});
    out.push_back({Tok::end, "", {line, col}});
    return out;
}

// ---- AST

enum class ExprKind { number, name, neg, add, sub, mul, wedge, pow, call, list };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    Loc loc;
    Rational value;          // number
    std::string name;        // name, call
    long exponent = 0;       // pow
    std::vector<ExprPtr> args; // operands, call arguments, list entries

    friend bool operator==(const Expr& a, const Expr& b)
    {
        if (a.kind != b.kind || !(a.value == b.value) || a.name != b.name || a.exponent != b.exponent ||
            a.args.size() != b.args.size())
            return false;
        for (std::size_t i = 0; i < a.args.size(); ++i)
            if (!(*a.args[i] == *b.args[i]))
                return false;
        return true;
    }
};

inline ExprPtr make_expr(ExprKind k, Loc loc, std::vector<ExprPtr> args = {})
{
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->loc = loc;
    e->args = std::move(args);
    return e;
}

struct ChartEntry {
    std::string name;
    bool periodic = false;
    Loc loc;
};

struct CocycleEntry {
    int a = 0;
    int b = 0;
    ExprPtr arrow;
    Loc loc;
};

enum class DeclKind { field, form, vector, jet, cord, gauge, loop, cover, cocycle };

inline const char* to_string(DeclKind k)
{
    switch (k) {
    case DeclKind::field: return "field";
    case DeclKind::form: return "form";
    case DeclKind::vector: return "vector";
    case DeclKind::jet: return "jet";
    case DeclKind::cord: return "cord";
    case DeclKind::gauge: return "gauge";
    case DeclKind::loop: return "loop";
    case DeclKind::cover: return "cover";
    case DeclKind::cocycle: return "cocycle";
    }
    return "?";
}

struct Decl {
    DeclKind kind;
    std::string name;
    Loc loc;
    ExprPtr value;                              // everything but cover and cocycle
    ExprPtr at;                                 // loop base point, optional
    std::vector<std::pair<ExprPtr, ExprPtr>> arcs; // cover
    std::string on;                             // cocycle cover
    Loc on_loc;
    std::vector<CocycleEntry> entries;          // cocycle
};

struct Param {
    std::string key;
    std::string value;
    Loc loc;
};

enum class TaskKind { verify, holonomy, gv, cohomology, cech, concord };

inline const char* to_string(TaskKind k)
{
    switch (k) {
    case TaskKind::verify: return "verify";
    case TaskKind::holonomy: return "holonomy";
    case TaskKind::gv: return "gv";
    case TaskKind::cohomology: return "cohomology";
    case TaskKind::cech: return "cech";
    case TaskKind::concord: return "concord";
    }
    return "?";
}

struct Task {
    TaskKind kind;
    Loc loc;
    std::vector<std::pair<std::string, Loc>> args;
    std::vector<Param> params;

    const Param* param(const std::string& key) const
    {
        for (auto& p : params)
            if (p.key == key)
                return &p;
        return nullptr;
    }
    std::string label() const
    {
        std::string s = to_string(kind);
        for (auto& a : args)
            s += " " + a.first;
        return s;
    }
};

struct Scenario {
    std::string name;
    std::vector<ChartEntry> chart;
    int codim = 1;
    std::vector<Decl> decls;
    std::vector<Task> tasks;

    const Decl* find(const std::string& n) const
    {
        for (auto& d : decls)
            if (d.name == n)
                return &d;
        return nullptr;
    }
};

// ---- parser

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

    Scenario scenario()
    {
        Scenario s;
        bool have_name = false, have_chart = false;
        while (peek().kind != Tok::end) {
            const Token& head = peek();
            if (head.kind != Tok::ident)
                fail(head, "expected a statement keyword");
            const std::string kw = head.text;
            if (kw == "scenario") {
                if (have_name)
                    fail(head, "duplicate scenario line");
                next();
                s.name = scenario_name();
                have_name = true;
            } else if (kw == "chart") {
                if (have_chart)
                    fail(head, "duplicate chart line");
                next();
                s.chart = chart_entries();
                have_chart = true;
            } else if (kw == "codim") {
                next();
                const Token& n = expect(Tok::number, "codimension");
                s.codim = small_int(n, 1, 4);
            } else if (kw == "task") {
                next();
                s.tasks.push_back(task());
            } else {
                s.decls.push_back(decl());
            }
            end_of_statement();
        }
        if (!have_name)
            throw ParseError(1, 1, "missing 'scenario <name>' line");
        if (!have_chart)
            throw ParseError(1, 1, "missing 'chart' line");
        return s;
    }

    ExprPtr expression_only()
    {
        ExprPtr e = expr();
        while (peek().kind == Tok::newline)
            next();
        if (peek().kind != Tok::end)
            fail(peek(), "unexpected '" + peek().text + "' after expression");
        return e;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] static void fail(const Token& t, const std::string& msg)
    {
        throw ParseError(t.loc.line, t.loc.col, msg);
    }
    static std::string describe(const Token& t)
    {
        switch (t.kind) {
        case Tok::newline: return "end of line";
        case Tok::end: return "end of input";
        default: return "'" + t.text + "'";
        }
    }
    bool at_sym(const char* s) const { return peek().kind == Tok::sym && peek().text == s; }
    bool at_word(const char* s) const { return peek().kind == Tok::ident && peek().text == s; }
    const Token& expect_sym(const char* s)
    {
        if (!at_sym(s))
            fail(peek(), std::string("expected '") + s + "', found " + describe(peek()));
        return next();
    }
    const Token& expect(Tok kind, const char* what)
    {
        if (peek().kind != kind)
            fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
        return next();
    }
    void end_of_statement()
    {
        if (peek().kind == Tok::end)
            return;
        if (peek().kind != Tok::newline)
            fail(peek(), "expected end of line, found " + describe(peek()));
        next();
    }
    static int small_int(const Token& t, int lo, int hi)
    {
        if (t.text.find_first_not_of("0123456789") != std::string::npos || t.text.size() > 6)
            fail(t, "expected an integer");
        int v = std::stoi(t.text);
        if (v < lo || v > hi)
            fail(t, "value " + t.text + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return v;
    }

    // Adjacent identifier, number and '-' tokens form the name, e.g. cylinder-gv.
    std::string scenario_name()
    {
        const Token& first = peek();
        if (first.kind != Tok::ident && first.kind != Tok::number)
            fail(first, "expected a scenario name");
        std::string name;
        Loc end = first.loc;
        while ((peek().kind == Tok::ident || peek().kind == Tok::number || at_sym("-")) &&
               (name.empty() || (peek().loc.line == end.line && peek().loc.col == end.col))) {
            const Token& t = next();
            name += t.text;
            end = {t.loc.line, t.loc.col + static_cast<int>(t.text.size())};
        }
        if (name.back() == '-')
            fail(first, "scenario name ends with '-'");
        return name;
    }

    std::vector<ChartEntry> chart_entries()
    {
        std::vector<ChartEntry> out;
        while (peek().kind == Tok::ident) {
            const Token& n = next();
            expect_sym(":");
            const Token& kind = expect(Tok::ident, "'periodic' or 'real'");
            if (kind.text != "periodic" && kind.text != "real")
                fail(kind, "coordinate kind must be 'periodic' or 'real', not '" + kind.text + "'");
            for (auto& e : out)
                if (e.name == n.text)
                    fail(n, "duplicate coordinate '" + n.text + "'");
            out.push_back({n.text, kind.text == "periodic", n.loc});
        }
        if (out.empty())
            fail(peek(), "chart needs at least one coordinate");
        if (out.size() > 6)
            fail(peek(), "chart has more than 6 coordinates");
        return out;
    }

    Decl decl()
    {
        static const std::pair<const char*, DeclKind> kinds[] = {
            {"field", DeclKind::field}, {"form", DeclKind::form},   {"vector", DeclKind::vector},
            {"jet", DeclKind::jet},     {"cord", DeclKind::cord},   {"gauge", DeclKind::gauge},
            {"loop", DeclKind::loop},   {"cover", DeclKind::cover}, {"cocycle", DeclKind::cocycle}};
        const Token& kw = next();
        Decl d{};
        bool known = false;
        for (auto& [word, kind] : kinds)
            if (kw.text == word) {
                d.kind = kind;
                known = true;
            }
        if (!known)
            fail(kw, "unknown statement '" + kw.text + "'");
        const Token& name = expect(Tok::ident, "a name");
        d.name = name.text;
        d.loc = name.loc;
        if (d.kind == DeclKind::cocycle) {
            if (!at_word("on"))
                fail(peek(), "expected 'on <cover>'");
            next();
            const Token& c = expect(Tok::ident, "a cover name");
            d.on = c.text;
            d.on_loc = c.loc;
        }
        expect_sym("=");
        if (d.kind == DeclKind::cover) {
            if (!at_word("arcs"))
                fail(peek(), "expected 'arcs'");
            next();
            while (at_sym("(")) {
                next();
                ExprPtr lo = expr();
                expect_sym(",");
                ExprPtr hi = expr();
                expect_sym(")");
                d.arcs.emplace_back(lo, hi);
            }
            if (d.arcs.empty())
                fail(peek(), "expected at least one arc '(start, end)'");
        } else if (d.kind == DeclKind::cocycle) {
            expect_sym("{");
            while (!at_sym("}")) {
                CocycleEntry e;
                const Token& a = expect(Tok::number, "a piece index");
                e.loc = a.loc;
                e.a = small_int(a, 0, 999);
                e.b = small_int(expect(Tok::number, "a piece index"), 0, 999);
                expect_sym(":");
                e.arrow = expr();
                d.entries.push_back(e);
                if (!at_sym(","))
                    break;
                next();
            }
            expect_sym("}");
        } else {
            d.value = expr();
            if (d.kind == DeclKind::loop && at_word("at")) {
                next();
                d.at = expr();
            }
        }
        return d;
    }

    Task task()
    {
        static const std::pair<const char*, TaskKind> kinds[] = {
            {"verify", TaskKind::verify}, {"holonomy", TaskKind::holonomy},     {"gv", TaskKind::gv},
            {"cohomology", TaskKind::cohomology}, {"cech", TaskKind::cech}, {"concord", TaskKind::concord}};
        const Token& kw = expect(Tok::ident, "a task kind");
        Task t{};
        t.loc = kw.loc;
        bool known = false;
        for (auto& [word, kind] : kinds)
            if (kw.text == word) {
                t.kind = kind;
                known = true;
            }
        if (!known)
            fail(kw, "unknown task kind '" + kw.text + "'");
        while (peek().kind == Tok::ident) {
            if (peek(1).kind == Tok::sym && peek(1).text == "=") {
                const Token& key = next();
                next();
                Param p{key.text, param_value(), key.loc};
                for (auto& q : t.params)
                    if (q.key == p.key)
                        fail(key, "duplicate parameter '" + p.key + "'");
                t.params.push_back(p);
            } else {
                if (!t.params.empty())
                    fail(peek(), "task arguments must precede key=value parameters");
                const Token& a = next();
                t.args.emplace_back(a.text, a.loc);
            }
        }
        return t;
    }

    // A number (p/q, decimal, optional sign) or an identifier.
    std::string param_value()
    {
        std::string v;
        if (at_sym("-")) {
            next();
            v = "-";
        }
        const Token& t = peek();
        if (t.kind == Tok::ident && v.empty())
            return next().text;
        if (t.kind != Tok::number)
            fail(t, "expected a parameter value, found " + describe(t));
        v += next().text;
        if (at_sym("/")) {
            next();
            v += "/" + expect(Tok::number, "a denominator").text;
        }
        return v;
    }

    // ---- expressions: sum := term (('+'|'-') term)*, term := unary (('*'|'/\'|wedge) unary)*,
    // unary := '-' unary | power, power := atom ('^' integer)?

    ExprPtr expr()
    {
        ExprPtr lhs = term();
        while (at_sym("+") || at_sym("-")) {
            const Token& op = next();
            lhs = make_expr(op.text == "+" ? ExprKind::add : ExprKind::sub, op.loc, {lhs, term()});
        }
        return lhs;
    }

    ExprPtr term()
    {
        ExprPtr lhs = unary();
        while (at_sym("*") || at_sym("/\\") || at_word("wedge")) {
            const Token& op = next();
            lhs = make_expr(op.text == "*" ? ExprKind::mul : ExprKind::wedge, op.loc, {lhs, unary()});
        }
        return lhs;
    }

    ExprPtr unary()
    {
        if (at_sym("-")) {
            const Token& op = next();
            return make_expr(ExprKind::neg, op.loc, {unary()});
        }
        return power();
    }

    ExprPtr power()
    {
        ExprPtr base = atom();
        if (at_sym("^")) {
            const Token& op = next();
            const Token& n = peek();
            if (n.kind != Tok::number || n.text.find_first_not_of("0123456789") != std::string::npos)
                fail(n, "exponent must be a non-negative integer literal");
            if (n.text.size() > 4)
                fail(n, "exponent " + n.text + " too large");
            next();
            auto e = make_expr(ExprKind::pow, op.loc, {base});
            std::const_pointer_cast<Expr>(e)->exponent = std::stol(n.text);
            return e;
        }
        return base;
    }

    ExprPtr atom()
    {
        const Token& t = peek();
        if (t.kind == Tok::number) {
            next();
            if (t.text.find_first_not_of("0123456789") != std::string::npos)
                fail(t, "decimal literal '" + t.text + "'; write rationals as p/q");
            Rational v = Rational::parse(t.text);
            if (at_sym("/")) {
                next();
                const Token& d = expect(Tok::number, "a denominator");
                if (d.text.find_first_not_of("0123456789") != std::string::npos)
                    fail(d, "denominator must be an integer");
                Rational den = Rational::parse(d.text);
                if (den.is_zero())
                    fail(d, "zero denominator");
                v = v / den;
            }
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::number;
            e->loc = t.loc;
            e->value = v;
            return e;
        }
        if (t.kind == Tok::ident) {
            next();
            if (t.text == "wedge")
                fail(t, "'wedge' needs a left operand");
            if (at_sym("(")) {
                next();
                std::vector<ExprPtr> args;
                if (!at_sym(")")) {
                    args.push_back(expr());
                    while (at_sym(",")) {
                        next();
                        args.push_back(expr());
                    }
                }
                expect_sym(")");
                auto e = make_expr(ExprKind::call, t.loc, std::move(args));
                std::const_pointer_cast<Expr>(e)->name = t.text;
                return e;
            }
            auto e = make_expr(ExprKind::name, t.loc);
            std::const_pointer_cast<Expr>(e)->name = t.text;
            return e;
        }
        if (t.kind == Tok::sym && t.text == "(") {
            next();
            ExprPtr e = expr();
            expect_sym(")");
            return e;
        }
        if (t.kind == Tok::sym && t.text == "[") {
            next();
            std::vector<ExprPtr> items;
            if (!at_sym("]")) {
                items.push_back(expr());
                while (at_sym(",")) {
                    next();
                    items.push_back(expr());
                }
            }
            expect_sym("]");
            return make_expr(ExprKind::list, t.loc, std::move(items));
        }
        fail(t, "expected an expression, found " + describe(t));
    }
};

inline Scenario parse_scenario(const std::string& text)
{
    return Parser(text).scenario();
}

inline ExprPtr parse_expression(const std::string& text)
{
    return Parser(text).expression_only();
}

// ---- canonical printer

namespace detail {

inline int precedence(ExprKind k)
{
    switch (k) {
    case ExprKind::add:
    case ExprKind::sub: return 1;
    case ExprKind::mul:
    case ExprKind::wedge: return 2;
    case ExprKind::neg: return 3;
    case ExprKind::pow: return 4;
    default: return 5;
    }
}

} // namespace detail

// Prints with the fewest parentheses that reparse to the same tree.
inline std::string print(const Expr& e, int context = 0)
{
    auto wrap = [&](const std::string& s) {
        return detail::precedence(e.kind) < context ? "(" + s + ")" : s;
    };
    auto list = [](const std::vector<ExprPtr>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i)
            s += (i ? ", " : "") + print(*xs[i]);
        return s;
    };
    switch (e.kind) {
    case ExprKind::number: {
        Rational m = e.value.sign() < 0 ? -e.value : e.value;
        std::string s = m.is_integer() || context < 5 ? m.str() : "(" + m.str() + ")";
        return e.value.sign() < 0 ? (context > 3 ? "(-" + s + ")" : "-" + s) : s;
    }
    case ExprKind::name: return e.name;
    case ExprKind::neg: return wrap("-" + print(*e.args[0], 3));
    case ExprKind::add: return wrap(print(*e.args[0], 1) + " + " + print(*e.args[1], 2));
    case ExprKind::sub: return wrap(print(*e.args[0], 1) + " - " + print(*e.args[1], 2));
    case ExprKind::mul: return wrap(print(*e.args[0], 2) + "*" + print(*e.args[1], 3));
    case ExprKind::wedge: return wrap(print(*e.args[0], 2) + " /\\ " + print(*e.args[1], 3));
    case ExprKind::pow: return wrap(print(*e.args[0], 5) + "^" + std::to_string(e.exponent));
    case ExprKind::call: return e.name + "(" + list(e.args) + ")";
    case ExprKind::list: return "[" + list(e.args) + "]";
    }
    return "?";
}

inline std::string print(const Scenario& s)
{
    std::ostringstream os;
    os << "scenario " << s.name << "\n";
    os << "chart";
    for (auto& c : s.chart)
        os << " " << c.name << ":" << (c.periodic ? "periodic" : "real");
    os << "\n";
    if (s.codim != 1)
        os << "codim " << s.codim << "\n";
    for (auto& d : s.decls) {
        os << to_string(d.kind) << " " << d.name;
        if (d.kind == DeclKind::cocycle)
            os << " on " << d.on;
        os << " = ";
        if (d.kind == DeclKind::cover) {
            os << "arcs";
            for (auto& [lo, hi] : d.arcs)
                os << " (" << print(*lo) << ", " << print(*hi) << ")";
        } else if (d.kind == DeclKind::cocycle) {
            os << "{";
            for (std::size_t i = 0; i < d.entries.size(); ++i)
                os << (i ? ", " : "") << d.entries[i].a << " " << d.entries[i].b << ": " << print(*d.entries[i].arrow);
            os << "}";
        } else {
            os << print(*d.value);
            if (d.at)
                os << " at " << print(*d.at);
        }
        os << "\n";
    }
    for (auto& t : s.tasks) {
        os << "task " << t.label();
        for (auto& p : t.params)
            os << " " << p.key << "=" << p.value;
        os << "\n";
    }
    return os.str();
}

inline bool same_structure(const Scenario& a, const Scenario& b)
{
    if (a.name != b.name || a.codim != b.codim || a.chart.size() != b.chart.size() ||
        a.decls.size() != b.decls.size() || a.tasks.size() != b.tasks.size())
        return false;
    for (std::size_t i = 0; i < a.chart.size(); ++i)
        if (a.chart[i].name != b.chart[i].name || a.chart[i].periodic != b.chart[i].periodic)
            return false;
    auto same = [](const ExprPtr& x, const ExprPtr& y) { return (!x && !y) || (x && y && *x == *y); };
    for (std::size_t i = 0; i < a.decls.size(); ++i) {
        const Decl &p = a.decls[i], &q = b.decls[i];
        if (p.kind != q.kind || p.name != q.name || p.on != q.on || !same(p.value, q.value) || !same(p.at, q.at) ||
            p.arcs.size() != q.arcs.size() || p.entries.size() != q.entries.size())
            return false;
        for (std::size_t j = 0; j < p.arcs.size(); ++j)
            if (!same(p.arcs[j].first, q.arcs[j].first) || !same(p.arcs[j].second, q.arcs[j].second))
                return false;
        for (std::size_t j = 0; j < p.entries.size(); ++j)
            if (p.entries[j].a != q.entries[j].a || p.entries[j].b != q.entries[j].b ||
                !same(p.entries[j].arrow, q.entries[j].arrow))
                return false;
    }
    for (std::size_t i = 0; i < a.tasks.size(); ++i) {
        const Task &p = a.tasks[i], &q = b.tasks[i];
        if (p.kind != q.kind || p.args.size() != q.args.size() || p.params.size() != q.params.size())
            return false;
        for (std::size_t j = 0; j < p.args.size(); ++j)
            if (p.args[j].first != q.args[j].first)
                return false;
        for (std::size_t j = 0; j < p.params.size(); ++j)
            if (p.params[j].key != q.params[j].key || p.params[j].value != q.params[j].value)
                return false;
    }
    return true;
}

} // namespace cordfol::dsl
