#pragma once

// Typed evaluation of a parsed scenario into library objects.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cordfol/cech.hpp"
#include "cordfol/chart.hpp"
#include "cordfol/constructions.hpp"
#include "cordfol/cord.hpp"
#include "cordfol/form.hpp"
#include "cordfol/integrate.hpp"
#include "cordfol/scenario.hpp"

namespace cordfol::dsl {

using JetCoeff = Series<ScalarField>;
using JetValue = Form<JetCoeff>;

class Model {
public:
    explicit Model(Scenario s) : s_(std::move(s))
    {
        std::vector<Coordinate> coords;
        for (auto& c : s_.chart)
            coords.push_back({c.name, c.periodic, -1.0, 1.0});
        chart_ = Chart(coords);
        for (std::size_t i = 0; i < s_.decls.size(); ++i) {
            const Decl& d = s_.decls[i];
            if (reserved(d.name))
                throw ParseError(d.loc.line, d.loc.col, "name '" + d.name + "' is reserved");
            if (index_.count(d.name))
                throw ParseError(d.loc.line, d.loc.col, "'" + d.name + "' is already declared");
            index_[d.name] = i;
        }
    }

    const Scenario& scenario() const { return s_; }
    const Chart& chart() const { return chart_; }
    int codim() const { return s_.codim; }

    // Evaluates every declaration and checks task signatures; errors carry source locations.
    void validate(int order) const
    {
        for (std::size_t i = 0; i < s_.decls.size(); ++i) {
            const Decl& d = s_.decls[i];
            located(d.loc, [&] {
                switch (d.kind) {
                case DeclKind::field: field(d.name); break;
                case DeclKind::form: form(d.name); break;
                case DeclKind::vector: vector(d.name); break;
                case DeclKind::jet: jet(d.name, order); break;
                case DeclKind::cord: cord(d.name, order); break;
                case DeclKind::gauge: gauge(d.name, order); break;
                case DeclKind::loop: loop(d.name); break;
                case DeclKind::cover: cover(d.name); break;
                case DeclKind::cocycle: cocycle(d.name, order); break;
                }
            });
        }
        for (auto& t : s_.tasks)
            check_task(t);
    }

    const Decl& decl(const std::string& name, Loc loc) const
    {
        auto it = index_.find(name);
        if (it == index_.end())
            throw ParseError(loc.line, loc.col, "unknown name '" + name + "'");
        return s_.decls[it->second];
    }
    bool is(const std::string& name, DeclKind k) const
    {
        auto it = index_.find(name);
        return it != index_.end() && s_.decls[it->second].kind == k;
    }

    ScalarField field(const std::string& name) const
    {
        const Decl& d = expect(name, DeclKind::field);
        return constant_in_t(*d.value, scalar(*d.value, -1, limit(d)));
    }

    ScalarForm form(const std::string& name) const
    {
        const Decl& d = expect(name, DeclKind::form);
        JetValue v = eval(*d.value, -1, limit(d));
        return v.map_coeffs([&](const JetCoeff& c) { return constant_in_t(*d.value, c); });
    }

    VectorField<ScalarField> vector(const std::string& name) const
    {
        const Decl& d = expect(name, DeclKind::vector);
        auto items = list_of(*d.value, chart_.dim(), "vector field components");
        VectorField<ScalarField> v;
        for (auto& e : items)
            v.comps.push_back(constant_in_t(*e, scalar(*e, -1, limit(d))));
        return v;
    }

    Cord jet(const std::string& name, int order) const
    {
        const Decl& d = expect(name, DeclKind::jet);
        JetCoeff c = scalar(*d.value, order, limit(d));
        if (codim() != 1)
            fail(d.value->loc, "jet functions are implemented in codimension one");
        std::vector<ScalarField> coeffs;
        for (int n = 0; n <= order; ++n)
            coeffs.push_back(c.coeff(MultiIndex{n}));
        return jetfunction_from_coefficients(chart_.dim(), coeffs);
    }

    Cord cord(const std::string& name, int order) const
    {
        const Decl& d = expect(name, DeclKind::cord);
        const Expr& e = *d.value;
        if (e.kind == ExprKind::call && (e.name == "gv" || e.name == "mc" || e.name == "gauge"))
            return constructed(d, e, order);
        std::vector<const Expr*> items;
        if (e.kind == ExprKind::list) {
            for (auto& x : list_of(e, codim(), "cord components"))
                items.push_back(x.get());
        } else {
            if (codim() != 1)
                fail(e.loc, "a cord in codimension " + std::to_string(codim()) + " is a list of " +
                                std::to_string(codim()) + " components");
            items.push_back(&e);
        }
        Cord a = Cord::zero_source(codim(), order, chart_.dim(), 1);
        for (int i = 0; i < codim(); ++i) {
            JetValue v = eval(*items[i], order, limit(d));
            if (v.degree() != 1)
                fail(items[i]->loc, "cord component is a " + std::to_string(v.degree()) + "-form, expected a 1-form");
            a.set_component(i, v);
        }
        return a;
    }

    GaugeSection<ScalarField> gauge(const std::string& name, int order) const
    {
        const Decl& d = expect(name, DeclKind::gauge);
        std::vector<ExprPtr> items;
        if (d.value->kind == ExprKind::list)
            items = list_of(*d.value, codim(), "gauge components");
        else if (codim() == 1)
            items.push_back(d.value);
        else
            fail(d.value->loc, "a gauge section in codimension " + std::to_string(codim()) + " is a list");
        SeriesVec<ScalarField> comps;
        for (auto& e : items)
            comps.push_back(scalar(*e, order, limit(d)));
        return located(d.value->loc, [&] {
            return GaugeSection<ScalarField>(chart_.dim(), std::vector<ScalarField>(codim()), comps);
        });
    }

    Loop loop(const std::string& name) const
    {
        const Decl& d = expect(name, DeclKind::loop);
        Loop l;
        for (auto& e : list_of(*d.value, chart_.dim(), "winding numbers")) {
            Rational w = constant(*e, limit(d));
            if (!w.is_integer())
                fail(e->loc, "winding number " + w.str() + " is not an integer");
            l.winding.push_back(static_cast<int>(w.to_long()));
        }
        if (d.at) {
            for (auto& e : list_of(*d.at, chart_.dim(), "base point coordinates"))
                l.base.push_back(constant(*e, limit(d)));
        } else {
            l.base.assign(chart_.dim(), Rational(0));
        }
        located(d.value->loc, [&] { l.validate(chart_); });
        return l;
    }

    Cover cover(const std::string& name) const
    {
        const Decl& d = expect(name, DeclKind::cover);
        if (chart_.dim() != 1 || !chart_.fully_periodic())
            fail(d.loc, "covers are implemented on the circle chart");
        std::vector<Arc> arcs;
        for (auto& [lo, hi] : d.arcs)
            arcs.push_back(located(lo->loc, [&] { return Arc(constant(*lo, limit(d)), constant(*hi, limit(d))); }));
        return located(d.loc, [&] { return Cover::circle(arcs); });
    }

    Cocycle cocycle(const std::string& name, int order) const
    {
        const Decl& d = expect(name, DeclKind::cocycle);
        if (!is(d.on, DeclKind::cover))
            fail(d.on_loc, "'" + d.on + "' is not a declared cover");
        if (index_.at(d.on) >= limit(d))
            fail(d.on_loc, "'" + d.on + "' is used before its declaration");
        if (codim() != 1)
            fail(d.loc, "cocycles are implemented in codimension one");
        Cover c = cover(d.on);
        const auto& overlaps = c.overlaps();
        std::vector<std::optional<GroupoidArrow>> arrows(overlaps.size());
        for (auto& e : d.entries) {
            if (e.a >= e.b)
                fail(e.loc, "list each overlap as 'a b' with a < b");
            std::size_t slot = overlaps.size();
            for (std::size_t i = 0; i < overlaps.size() && slot == overlaps.size(); ++i)
                if (overlaps[i].a == e.a && overlaps[i].b == e.b && !arrows[i])
                    slot = i;
            if (slot == overlaps.size())
                fail(e.loc, "no unassigned overlap between pieces " + std::to_string(e.a) + " and " +
                                std::to_string(e.b));
            JetCoeff s = scalar(*e.arrow, order, limit(d));
            Series<Rational> r(1, order);
            for (auto& [m, f] : s.terms()) {
                if (!f.is_constant())
                    fail(e.arrow->loc, "cocycle arrows have constant coefficients");
                r.set(m, f.constant_term());
            }
            if (!r.constant_term().is_zero())
                fail(e.arrow->loc, "cocycle arrows fix 0: the constant term must vanish");
            arrows[slot] = located(e.arrow->loc, [&] { return GroupoidArrow({Rational(0)}, {r}); });
        }
        std::vector<GroupoidArrow> all;
        for (auto& a : arrows)
            all.push_back(a ? *a : GroupoidArrow::identity(1, order, {Rational(0)}));
        Cocycle out(c, all);
        located(d.loc, [&] { out.verify(); });
        return out;
    }

    // The form and vector field behind a gv or mc cord, if any.
    std::optional<std::pair<ScalarForm, VectorField<ScalarField>>> foliation_data(const std::string& name) const
    {
        const Decl& d = expect(name, DeclKind::cord);
        const Expr& e = *d.value;
        if (e.kind != ExprKind::call || (e.name != "gv" && e.name != "mc"))
            return std::nullopt;
        return std::make_pair(form(e.args[0]->name), vector(e.args[1]->name));
    }
    // X for mc cords; the constant -1 for gv cords.
    std::optional<Cord> fiber_target(const std::string& name, int order) const
    {
        const Decl& d = expect(name, DeclKind::cord);
        const Expr& e = *d.value;
        if (e.kind != ExprKind::call)
            return std::nullopt;
        if (e.name == "mc")
            return jet(e.args[2]->name, order);
        if (e.name == "gv") {
            std::vector<ScalarField> c(order + 1);
            c[0] = ScalarField(-1);
            return jetfunction_from_coefficients(chart_.dim(), c);
        }
        return std::nullopt;
    }

    // Parameters each task accepts besides N, seed and trials.
    static std::vector<std::string> task_keys(TaskKind k)
    {
        switch (k) {
        case TaskKind::verify: return {};
        case TaskKind::holonomy: return {"step", "tol"};
        case TaskKind::gv: return {"expect"};
        case TaskKind::cohomology: return {"D", "expect"};
        case TaskKind::cech: return {"step", "tol", "expect"};
        case TaskKind::concord: return {};
        }
        return {};
    }

private:
    Scenario s_;
    Chart chart_;
    std::map<std::string, std::size_t> index_;

    [[noreturn]] static void fail(Loc loc, const std::string& msg) { throw ParseError(loc.line, loc.col, msg); }

    // Library errors raised while building a declaration are reported at its location.
    template <class F>
    static auto located(Loc loc, F&& f) -> decltype(f())
    {
        try {
            return f();
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            fail(loc, e.what());
        }
    }

    bool reserved(const std::string& n) const
    {
        static const char* words[] = {"t", "sin", "cos", "gv", "mc", "gauge", "wedge", "at", "on", "arcs"};
        for (auto w : words)
            if (n == w)
                return true;
        if (n.size() >= 2 && n[0] == 't' && n.find_first_not_of("0123456789", 1) == std::string::npos)
            return true;
        for (auto& c : s_.chart)
            if (n == c.name || n == "d" + c.name)
                return true;
        return false;
    }

    std::size_t limit(const Decl& d) const { return index_.at(d.name); }

    const Decl& expect(const std::string& name, DeclKind k) const
    {
        auto it = index_.find(name);
        if (it == index_.end())
            throw DomainError("unknown name '" + name + "'");
        const Decl& d = s_.decls[it->second];
        if (d.kind != k)
            fail(d.loc, "'" + name + "' is a " + to_string(d.kind) + ", expected a " + to_string(k));
        return d;
    }

    const Decl& lookup(const Expr& e, std::size_t lim) const
    {
        auto it = index_.find(e.name);
        if (it == index_.end())
            fail(e.loc, "unknown name '" + e.name + "'");
        if (it->second >= lim)
            fail(e.loc, "'" + e.name + "' is used before its declaration");
        return s_.decls[it->second];
    }

    std::vector<ExprPtr> list_of(const Expr& e, int n, const char* what) const
    {
        if (e.kind != ExprKind::list)
            fail(e.loc, std::string("expected a list of ") + std::to_string(n) + " " + what);
        if (static_cast<int>(e.args.size()) != n)
            fail(e.loc, std::string("expected ") + std::to_string(n) + " " + what + ", got " +
                            std::to_string(e.args.size()));
        return e.args;
    }

    ScalarField constant_in_t(const Expr& e, const JetCoeff& c) const
    {
        for (auto& [m, f] : c.terms())
            if (m.degree() > 0 && !f.is_zero())
                fail(e.loc, "depends on the jet variable");
        return c.constant_term();
    }

    JetCoeff scalar(const Expr& e, int order, std::size_t lim) const
    {
        JetValue v = eval(e, order, lim);
        if (v.degree() != 0)
            fail(e.loc, "expected a function, got a " + std::to_string(v.degree()) + "-form");
        const JetCoeff* c = v.find(0);
        return c ? *c : JetCoeff(codim(), std::max(order, 0));
    }

    Rational constant(const Expr& e, std::size_t lim) const
    {
        ScalarField f = constant_in_t(e, scalar(e, -1, lim));
        if (!f.is_constant())
            fail(e.loc, "expected a rational constant");
        return f.constant_term();
    }

    JetValue lift(const ScalarField& f, int order) const
    {
        return JetValue::scalar(chart_.dim(), JetCoeff::constant(codim(), std::max(order, 0), f));
    }

    JetValue eval(const Expr& e, int order, std::size_t lim) const
    {
        const int n = chart_.dim();
        switch (e.kind) {
        case ExprKind::number: return lift(ScalarField(e.value), order);
        case ExprKind::name: return name_value(e, order, lim);
        case ExprKind::neg: return -eval(*e.args[0], order, lim);
        case ExprKind::add:
        case ExprKind::sub: {
            JetValue a = eval(*e.args[0], order, lim), b = eval(*e.args[1], order, lim);
            if (a.degree() != b.degree())
                fail(e.loc, "cannot combine a " + std::to_string(a.degree()) + "-form and a " +
                                std::to_string(b.degree()) + "-form");
            return e.kind == ExprKind::add ? a + b : a - b;
        }
        case ExprKind::mul: {
            JetValue a = eval(*e.args[0], order, lim), b = eval(*e.args[1], order, lim);
            if (a.degree() > 0 && b.degree() > 0)
                fail(e.loc, "product of two forms; use /\\ for the wedge product");
            return wedge(a, b);
        }
        case ExprKind::wedge: {
            JetValue a = eval(*e.args[0], order, lim), b = eval(*e.args[1], order, lim);
            if (a.degree() + b.degree() > n)
                fail(e.loc, "form degree " + std::to_string(a.degree() + b.degree()) + " exceeds the chart dimension " +
                                std::to_string(n));
            return wedge(a, b);
        }
        case ExprKind::pow: {
            const Expr& base = *e.args[0];
            if (order >= 0 && base.kind == ExprKind::name && t_index(base.name) >= 0 && e.exponent > order)
                fail(e.loc, "jet degree " + std::to_string(e.exponent) + " exceeds the truncation order " +
                                std::to_string(order));
            JetValue b = eval(base, order, lim);
            if (b.degree() > 0 && e.exponent != 1)
                fail(e.loc, "powers apply to functions, not forms");
            JetValue r = lift(ScalarField(1), order);
            for (long i = 0; i < e.exponent; ++i)
                r = wedge(r, b);
            return r;
        }
        case ExprKind::call: {
            if (e.name != "sin" && e.name != "cos") {
                if (e.name == "gv" || e.name == "mc" || e.name == "gauge")
                    fail(e.loc, "'" + e.name + "(...)' is only allowed as the whole right-hand side of a cord");
                fail(e.loc, "unknown function '" + e.name + "'");
            }
            if (e.args.size() != 1)
                fail(e.loc, e.name + " takes one argument");
            std::vector<int> freq = frequencies(*e.args[0]);
            return lift(e.name == "sin" ? ScalarField::sin_of(freq) : ScalarField::cos_of(freq), order);
        }
        case ExprKind::list: fail(e.loc, "a list is not an expression here");
        }
        fail(e.loc, "bad expression");
    }

    int t_index(const std::string& name) const
    {
        if (codim() == 1)
            return name == "t" ? 0 : -1;
        if (name.size() == 2 && name[0] == 't' && name[1] >= '1' && name[1] < '1' + codim())
            return name[1] - '1';
        return -1;
    }

    JetValue name_value(const Expr& e, int order, std::size_t lim) const
    {
        const int n = chart_.dim();
        if (int i = t_index(e.name); i >= 0) {
            if (order < 0)
                fail(e.loc, "depends on the jet variable");
            return JetValue::scalar(n, JetCoeff::variable(codim(), order, i));
        }
        if (e.name == "t" || (e.name.size() >= 2 && e.name[0] == 't' && std::isdigit(static_cast<unsigned char>(e.name[1]))))
            fail(e.loc, codim() == 1 ? "the jet variable is 't'"
                                     : "jet variables are t1..t" + std::to_string(codim()));
        int j = chart_.index_of(e.name);
        if (j >= 0) {
            if (chart_[j].periodic)
                fail(e.loc, "periodic coordinate '" + e.name + "' is not a function on the chart; use sin/cos");
            return lift(ScalarField::coordinate(j), order);
        }
        if (e.name.size() > 1 && e.name[0] == 'd') {
            int b = chart_.index_of(e.name.substr(1));
            if (b >= 0)
                return JetValue::basis1(n, b, JetCoeff::constant(codim(), std::max(order, 0), ScalarField(1)));
        }
        const Decl& d = lookup(e, lim);
        if (order < 0 && (d.kind == DeclKind::jet || d.kind == DeclKind::cord))
            fail(e.loc, "depends on the jet variable through '" + e.name + "'");
        switch (d.kind) {
        case DeclKind::field:
        case DeclKind::form:
        case DeclKind::jet: return eval(*d.value, order, limit(d));
        case DeclKind::cord:
            if (codim() != 1)
                fail(e.loc, "cords enter expressions only in codimension one");
            return cord(d.name, order).component(0);
        default: fail(e.loc, "'" + e.name + "' is a " + to_string(d.kind) + " and cannot appear in an expression");
        }
    }

    // Integer frequency vector of an argument of sin/cos.
    std::vector<int> frequencies(const Expr& e) const
    {
        std::vector<Rational> c(chart_.dim());
        Rational shift;
        linear(e, Rational(1), c, shift);
        if (!shift.is_zero())
            fail(e.loc, "constant phase " + shift.str() + " inside sin/cos is outside the trigonometric ring");
        std::vector<int> f;
        for (int j = 0; j < chart_.dim(); ++j) {
            if (!c[j].is_integer())
                fail(e.loc, "non-integer frequency " + c[j].str() + " of '" + chart_[j].name + "'");
            if (c[j].to_long() > 1000 || c[j].to_long() < -1000)
                fail(e.loc, "frequency " + c[j].str() + " out of range");
            f.push_back(static_cast<int>(c[j].to_long()));
        }
        return f;
    }

    void linear(const Expr& e, const Rational& scale, std::vector<Rational>& c, Rational& shift) const
    {
        switch (e.kind) {
        case ExprKind::number: shift += scale * e.value; return;
        case ExprKind::name: {
            int j = chart_.index_of(e.name);
            if (j < 0)
                fail(e.loc, "sin/cos argument must combine periodic coordinates; '" + e.name + "' is not a coordinate");
            if (!chart_[j].periodic)
                fail(e.loc, "sin/cos of non-periodic coordinate '" + e.name + "'");
            c[j] += scale;
            return;
        }
        case ExprKind::neg: linear(*e.args[0], -scale, c, shift); return;
        case ExprKind::add:
        case ExprKind::sub:
            linear(*e.args[0], scale, c, shift);
            linear(*e.args[1], e.kind == ExprKind::add ? scale : -scale, c, shift);
            return;
        case ExprKind::mul: {
            std::optional<Rational> k0 = literal(*e.args[0]), k1 = literal(*e.args[1]);
            if (k0)
                linear(*e.args[1], scale * *k0, c, shift);
            else if (k1)
                linear(*e.args[0], scale * *k1, c, shift);
            else
                fail(e.loc, "sin/cos argument must be linear in the coordinates");
            return;
        }
        default: fail(e.loc, "sin/cos argument must be an integer combination of periodic coordinates");
        }
    }

    static std::optional<Rational> literal(const Expr& e)
    {
        if (e.kind == ExprKind::number)
            return e.value;
        if (e.kind == ExprKind::neg)
            if (auto v = literal(*e.args[0]))
                return -*v;
        return std::nullopt;
    }

    Cord constructed(const Decl& d, const Expr& e, int order) const
    {
        auto arg = [&](std::size_t i, DeclKind k) -> const std::string& {
            const Expr& a = *e.args[i];
            if (a.kind != ExprKind::name)
                fail(a.loc, "expected the name of a declared " + std::string(to_string(k)));
            const Decl& target = lookup(a, limit(d));
            if (target.kind != k)
                fail(a.loc, "'" + a.name + "' is a " + to_string(target.kind) + ", expected a " + to_string(k));
            return a.name;
        };
        auto arity = [&](std::size_t n) {
            if (e.args.size() != n)
                fail(e.loc, e.name + " takes " + std::to_string(n) + " arguments");
        };
        if (codim() != 1 && e.name != "gauge")
            fail(e.loc, e.name + " builds codimension-one cords");
        return located(e.loc, [&]() -> Cord {
            if (e.name == "gv") {
                arity(2);
                return gv_cord(form(arg(0, DeclKind::form)), vector(arg(1, DeclKind::vector)), order);
            }
            if (e.name == "mc") {
                arity(3);
                return mc_cord(form(arg(0, DeclKind::form)), vector(arg(1, DeclKind::vector)),
                               jet(arg(2, DeclKind::jet), order), order);
            }
            arity(2);
            auto y = gauge(arg(0, DeclKind::gauge), order + 1);
            auto a = cord(arg(1, DeclKind::cord), order + 1);
            return cordfol::gauge(y, a);
        });
    }

    void check_task(const Task& t) const
    {
        auto fail_task = [&](const std::string& msg) { fail(t.loc, "task " + std::string(to_string(t.kind)) + ": " + msg); };
        std::vector<DeclKind> kinds;
        for (auto& [name, loc] : t.args)
            kinds.push_back(decl(name, loc).kind);
        auto shape = [&](std::initializer_list<DeclKind> want) {
            return kinds == std::vector<DeclKind>(want);
        };
        switch (t.kind) {
        case TaskKind::verify:
        case TaskKind::gv:
            if (!shape({DeclKind::cord}))
                fail_task("expects one cord");
            break;
        case TaskKind::holonomy: {
            bool ok = kinds.size() >= 2 && kinds[0] == DeclKind::cord;
            for (std::size_t i = 1; i < kinds.size(); ++i)
                ok = ok && kinds[i] == DeclKind::loop;
            if (!ok)
                fail_task("expects a cord followed by loops");
            break;
        }
        case TaskKind::cohomology:
            if (!shape({DeclKind::form, DeclKind::vector}) && !shape({DeclKind::cord}))
                fail_task("expects a form and a vector field, or a cord");
            break;
        case TaskKind::cech:
            if (!shape({DeclKind::cord, DeclKind::cover}) && !shape({DeclKind::cocycle}) &&
                !shape({DeclKind::cocycle, DeclKind::cocycle}))
                fail_task("expects a cord and a cover, or one or two cocycles");
            break;
        case TaskKind::concord:
            if (!shape({DeclKind::cord, DeclKind::gauge}))
                fail_task("expects a cord and a gauge section");
            break;
        }
        auto keys = task_keys(t.kind);
        keys.insert(keys.end(), {"N", "seed", "trials"});
        for (auto& p : t.params) {
            if (std::find(keys.begin(), keys.end(), p.key) == keys.end())
                fail(p.loc, "task " + std::string(to_string(t.kind)) + " has no parameter '" + p.key + "'");
            check_param(p);
        }
    }

    static void check_param(const Param& p)
    {
        auto numeric = [&](bool integer) {
            try {
                std::size_t used = 0;
                if (integer) {
                    long v = std::stol(p.value, &used);
                    if (v < 0)
                        throw std::invalid_argument("negative");
                } else {
                    double v = std::stod(p.value, &used);
                    if (!(v > 0))
                        throw std::invalid_argument("non-positive");
                }
                if (used != p.value.size())
                    throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                fail(p.loc, "parameter " + p.key + " needs a " + (integer ? "non-negative integer" : "positive number") +
                                ", got '" + p.value + "'");
            }
        };
        if (p.key == "N" || p.key == "D" || p.key == "seed" || p.key == "trials")
            numeric(true);
        else if (p.key == "step" || p.key == "tol")
            numeric(false);
        else if (p.key == "expect") {
            bool word = p.value == "same" || p.value == "distinct" || p.value == "undetermined";
            if (!word) {
                try {
                    (void)Rational::parse(p.value);
                } catch (const std::exception&) {
                    fail(p.loc, "expect needs a rational or a class relation, got '" + p.value + "'");
                }
            }
        }
    }
};

} // namespace cordfol::dsl
