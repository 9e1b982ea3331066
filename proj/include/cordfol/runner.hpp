#pragma once

// Executes scenario tasks and assembles the report.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <new>
#include <string>
#include <thread>
#include <vector>

#include "cordfol/cech.hpp"
#include "cordfol/cohomology.hpp"
#include "cordfol/constructions.hpp"
#include "cordfol/generators.hpp"
#include "cordfol/holonomy.hpp"
#include "cordfol/model.hpp"
#include "cordfol/report.hpp"

namespace cordfol::dsl {

struct Options {
    int order = 8;
    int cutoff = 4;
    double step = 1e-3;
    double tol = 1e-6;
    std::uint64_t seed = 1;
    int trials = 3;
    bool timing = false;
    int workers = 1;
};

// Requests beyond these are reported as aborted tasks.
struct Limits {
    int max_order = 24;
    int max_cutoff = 12;
    int max_trials = 500;
    double min_step = 1e-5;
};

namespace detail {

using report::TaskReport;

struct TaskParams {
    int order;
    int cutoff;
    double step;
    double tol;
    std::uint64_t seed;
    int trials;
    std::string expect;
};

inline TaskParams resolve(const Task& t, const Options& o)
{
    TaskParams p{o.order, o.cutoff, o.step, o.tol, o.seed, o.trials, ""};
    if (auto* v = t.param("N"))
        p.order = std::stoi(v->value);
    if (auto* v = t.param("D"))
        p.cutoff = std::stoi(v->value);
    if (auto* v = t.param("step"))
        p.step = std::stod(v->value);
    if (auto* v = t.param("tol"))
        p.tol = std::stod(v->value);
    if (auto* v = t.param("seed"))
        p.seed = std::stoull(v->value);
    if (auto* v = t.param("trials"))
        p.trials = std::stoi(v->value);
    if (auto* v = t.param("expect"))
        p.expect = v->value;
    return p;
}

inline std::string exceeded(const TaskParams& p, const Limits& l)
{
    if (p.order > l.max_order)
        return "order " + std::to_string(p.order) + " exceeds the limit " + std::to_string(l.max_order);
    if (p.cutoff > l.max_cutoff)
        return "cutoff " + std::to_string(p.cutoff) + " exceeds the limit " + std::to_string(l.max_cutoff);
    if (p.trials > l.max_trials)
        return "trials " + std::to_string(p.trials) + " exceeds the limit " + std::to_string(l.max_trials);
    if (p.step < l.min_step)
        return "step " + report::format_double(p.step, 3) + " is below the limit " + report::format_double(l.min_step, 3);
    return "";
}

inline std::string multi_str(const MultiIndex& m)
{
    if (m.k == 1)
        return std::to_string(m.e[0]);
    std::string s;
    for (int i = 0; i < m.k; ++i)
        s += (i ? "," : "") + std::to_string(m.e[i]);
    return s;
}

// First non-zero coefficient of a jet form in graded order, or "".
inline std::string first_nonzero(const Cord& f, const std::vector<std::string>& names)
{
    for (auto& m : multi_indices(f.codim(), f.order()))
        for (int i = 0; i < f.codim(); ++i) {
            ScalarForm c = f.coefficient(i, m);
            if (!is_zero(c))
                return "component " + std::to_string(i) + ", t^" + multi_str(m) + ": " + c.str(names);
        }
    return "";
}

inline bool same_jet(const Cord& a, const Cord& b)
{
    try {
        return (a - b).is_zero_jetform();
    } catch (const StructuralError&) {
        return false;
    }
}

inline void flag_certificate(TaskReport& r, const std::string& what, Certificate c)
{
    if (c != Certificate::exact)
        r.flags.push_back(what + ": positivity " + to_string(c));
}

inline void run_verify(const Model& m, const Task& t, const TaskParams& p, TaskReport& r)
{
    const std::string& name = t.args[0].first;
    const Chart& ch = m.chart();
    const auto names = ch.names();
    Cord a = m.cord(name, p.order);
    r.add("codim", static_cast<long>(a.codim()));
    r.add("order", static_cast<long>(a.order()));
    const bool impotent = is_impotent(a);
    r.add("impotent", impotent);

    std::string first = first_nonzero(curvature(a), names);
    if (!r.check("flat", first.empty(), "first non-zero curvature coefficient at " + first))
        r.add("first_curvature", first);

    bool zero_source = true;
    for (auto& s : a.source())
        zero_source = zero_source && is_zero(s);
    if (a.codim() == 1 && zero_source && a.order() >= 1) {
        bool corrected = true, printed = true;
        int first_printed = -1;
        for (auto& res : flatness_recursion_residuals(a)) {
            corrected = corrected && is_zero(res.corrected);
            if (!is_zero(res.as_printed) && first_printed < 0)
                first_printed = res.m;
            printed = printed && is_zero(res.as_printed);
        }
        r.add("recursion_corrected_vanishes", corrected);
        r.add("recursion_as_printed_vanishes", printed);
        if (first_printed >= 0)
            r.flags.push_back("recursion cross-check: the as-printed (p-q) form is non-zero from order " +
                              std::to_string(first_printed) + "; the form with the factor 1/2 is the one checked");
    }

    if (auto data = m.foliation_data(name)) {
        const bool is_gv = m.scenario().find(name)->value->name == "gv";
        Cord x = *m.fiber_target(name, p.order);
        if (is_gv) {
            // gv cords satisfy contract(V, A) = -1 to every order; mc(a0, V, -1) is A(-t) up to sign
            r.check("contraction_normalized", same_jet(contract(data->second, a), x),
                    "contraction of the cord with V is not -1");
            Cord via_mc = mc_cord(data->first, data->second, x, p.order);
            bool match = true;
            for (int n = 0; n <= p.order; ++n)
                match = match && via_mc.coefficient(0, MultiIndex{n}) ==
                                     (n % 2 ? a.coefficient(0, MultiIndex{n}) : -a.coefficient(0, MultiIndex{n}));
            r.check("mc_reproduces_gv", match, "mc cord with X = -1 is not b_n = (-1)^(n+1) a_n");
        } else {
            r.check("contraction_normalized", (contract(data->second, a) + x).is_zero_jetform(),
                    "contraction of the cord with V does not cancel X");
        }
        if (impotent) {
            bool rejected = false;
            try {
                stabilizer_solve(a, data->second);
            } catch (const DomainError&) {
                rejected = true;
            }
            r.check("stabilizer_rejects_impotent", rejected, "stabilizer solver accepted an impotent cord");
        } else {
            GaugeSection<ScalarField> y = stabilizer_solve(a, data->second);
            flag_certificate(r, "stabilizer", y.certificate());
            r.check("stabilizer_identity", y.is_identity(), "stabilizer of the cord is not the identity");
        }
    }

    if (p.order >= 2 && p.trials > 0) {
        gen::Rng rng(p.seed);
        bool law = true, covariance = true;
        for (int trial = 0; trial < p.trials; ++trial) {
            auto s_y = gen::random_source(rng, ch, a.codim());
            auto s_z = gen::random_source(rng, ch, a.codim());
            auto y = gen::random_section(rng, ch, p.order, s_y, a.source(), 0.2);
            auto z = gen::random_section(rng, ch, p.order, s_z, s_y, 0.2);
            Cord ya = gauge(y, a);
            law = law && gauge(z.truncate(p.order - 1), ya) == gauge(compose_sections(z, y), a).truncate(p.order - 2);
            covariance = covariance && curvature(ya) == pushforward(y.truncate(p.order - 1), curvature(a));
        }
        r.add("gauge_trials", static_cast<long>(p.trials));
        r.check("gauge_group_law", law, "Z*(Y*A) differs from (Y o Z)*A");
        r.check("gauge_covariance", covariance, "curvature is not gauge covariant");
    }

    if (ch.dim() == 1 && !ch[0].periodic && a.codim() == 1) {
        try {
            GaugeSection<ScalarField> y = local_trivialization(a, ch);
            r.check("local_trivialization", true);
            r.add("trivialization_order", static_cast<long>(y.order()));
        } catch (const Error& e) {
            r.check("local_trivialization", false, e.what());
        }
        r.flags.push_back("note: only the jet-level trivialization is checked; germ-level obstructions are out of scope");
    }
}

// Restriction to the slice through the loops' base point where the non-periodic coordinates are fixed.
struct Slice {
    Chart chart;
    AffineMap map;
    std::vector<int> periodic;
};

inline Slice periodic_slice(const Chart& ch, const std::vector<Loop>& loops)
{
    Slice s;
    std::vector<Coordinate> coords;
    for (int j = 0; j < ch.dim(); ++j)
        if (ch[j].periodic) {
            s.periodic.push_back(j);
            coords.push_back(ch[j]);
        }
    if (coords.empty())
        throw DomainError("holonomy needs a periodic coordinate");
    s.chart = Chart(coords);
    s.map.w.assign(ch.dim(), std::vector<Rational>(coords.size()));
    s.map.offset.assign(ch.dim(), Rational(0));
    for (std::size_t i = 0; i < s.periodic.size(); ++i)
        s.map.w[s.periodic[i]][i] = Rational(1);
    for (int j = 0; j < ch.dim(); ++j)
        if (!ch[j].periodic) {
            for (auto& l : loops)
                if (!(l.base[j] == loops[0].base[j]))
                    throw DomainError("loops leave the slice of fixed '" + ch[j].name + "'");
            s.map.offset[j] = loops[0].base[j];
        }
    return s;
}

inline Loop restrict_loop(const Loop& l, const std::vector<int>& keep)
{
    Loop r;
    for (int j : keep) {
        r.base.push_back(l.base[j]);
        r.winding.push_back(l.winding[j]);
    }
    return r;
}

inline void run_holonomy(const Model& m, const Task& t, const TaskParams& p, TaskReport& r)
{
    Cord a = m.cord(t.args[0].first, p.order);
    Chart ch = m.chart();
    std::vector<Loop> loops;
    std::vector<std::string> names;
    for (std::size_t i = 1; i < t.args.size(); ++i) {
        loops.push_back(m.loop(t.args[i].first));
        names.push_back(t.args[i].first);
    }
    if (!is_impotent(a)) {
        Slice s = periodic_slice(ch, loops);
        a = pullback_cord(a, s.map, s.chart, ch);
        for (auto& l : loops)
            l = restrict_loop(l, s.periodic);
        std::string where;
        for (int j = 0; j < m.chart().dim(); ++j)
            if (!m.chart()[j].periodic)
                where += (where.empty() ? "" : ", ") + m.chart()[j].name + " = " + s.map.offset[j].str();
        r.flags.push_back("cord restricted to the slice " + where);
        ch = s.chart;
        if (!r.check("impotent_on_slice", is_impotent(a), "the slice " + where + " is not a union of leaves"))
            return;
    }
    StepControl ctl{p.step, p.tol};
    for (std::size_t i = 0; i < loops.size(); ++i) {
        try {
            HolonomyJet h = transport(a, ch, loops[i], ctl);
            for (int c = 0; c < h.codim(); ++c)
                for (auto& mi : multi_indices(a.codim(), a.order())) {
                    if (mi.degree() == 0)
                        continue;
                    std::string key = names[i] + (a.codim() > 1 ? "[" + std::to_string(c) + "]" : "") + ".t^" + multi_str(mi);
                    r.add(key, report::estimate(h.coeff(c, mi), h.coeff_error(c, mi)));
                }
            r.check(names[i] + ".converged", true);
        } catch (const NumericError& e) {
            r.check(names[i] + ".converged", false, e.what());
            continue;
        }
        if (a.codim() == 1) {
            FirstOrderReport f = first_order_check(a, ch, loops[i], ctl);
            r.add(names[i] + ".first_order.predicted", report::estimate(f.predicted, 0));
            if (f.exact_integral)
                r.add(names[i] + ".first_order.integral", *f.exact_integral);
            r.add(names[i] + ".first_order.relative_error", report::estimate(f.relative_error(), 0));
            r.check(names[i] + ".first_order", f.relative_error() <= p.tol,
                    "linear coefficient differs from exp of the integral of a_1");
        }
    }
    if (loops.size() >= 2) {
        Word w;
        for (std::size_t i = 0; i < loops.size(); ++i)
            w.push_back({static_cast<int>(i), 1});
        w.push_back({0, -1});
        double res = relative_distance(monodromy_word(a, ch, loops, w, ctl).value,
                                       transport_along_word(a, ch, loops, w, ctl).value);
        r.add("homomorphism_residual", report::estimate(res, 0));
        r.check("homomorphism", res <= p.tol, "monodromy of the word differs from transport along it");
    }
}

inline void run_gv(const Model& m, const Task& t, const TaskParams& p, TaskReport& r)
{
    Cord a = m.cord(t.args[0].first, std::max(p.order, 1));
    const Chart& ch = m.chart();
    TwoPiMultiple g = gv_integral(a, ch);
    r.add("gv", g);
    if (!p.expect.empty())
        r.check("expected", g == TwoPiMultiple{Rational::parse(p.expect), ch.dim()},
                "expected " + p.expect + "*(2pi)^" + std::to_string(ch.dim()));
    gen::Rng rng(p.seed);
    bool invariant = true;
    ScalarForm a1 = a.coefficient(0, MultiIndex{1});
    for (int trial = 0; trial < p.trials; ++trial) {
        ScalarField f = gen::random_scalar(rng, ch, 3, 2, 0);
        Cord b = a;
        b.set_coefficient(0, MultiIndex{1}, a1 + exterior_d(ScalarForm::scalar(ch.dim(), f)));
        invariant = invariant && gv_integral(b, ch) == g;
    }
    r.add("exact_shift_trials", static_cast<long>(p.trials));
    r.check("exact_shift_invariance", invariant, "a_1 + df changed the integral");
}

inline void run_cohomology(const Model& m, const Task& t, const TaskParams& p, TaskReport& r)
{
    const Chart& ch = m.chart();
    if (t.args.size() == 2) {
        ScalarForm a = m.form(t.args[0].first);
        VectorField<ScalarField> v = m.vector(t.args[1].first);
        auto h0 = h0_dimension(a, v, p.cutoff, ch);
        r.add("cutoff", static_cast<long>(p.cutoff));
        r.add("h0", static_cast<long>(h0));
        if (!p.expect.empty())
            r.check("expected", Rational(static_cast<long>(h0)) == Rational::parse(p.expect),
                    "expected H^0 dimension " + p.expect);
        TruncatedBott b = truncated_bott_ranks(a, v, p.cutoff, ch);
        auto betti = b.betti();
        for (std::size_t k = 0; k < betti.size(); ++k)
            r.add("truncated_betti_" + std::to_string(k), betti[k]);
        r.flags.push_back("truncated Betti numbers are diagnostics of the Fourier truncation");
        return;
    }
    Cord a = m.cord(t.args[0].first, p.order);
    if (!r.check("flat", is_flat(a), "the twisted differential squares to zero only for flat cords"))
        return;
    gen::Rng rng(p.seed);
    bool square = true, leibniz = true, chain = true;
    const int n = p.order;
    for (int trial = 0; trial < p.trials; ++trial) {
        Cord w = gen::random_jetform(rng, ch, a.codim(), n, trial % 2, a.source(), 0.5);
        square = square && nabla(a, nabla(a, w)).is_zero_jetform();

        const int k = rng.integer(0, 1), l = rng.integer(0, 1);
        Cord z = gen::random_jetform(rng, ch, a.codim(), n, k, a.source(), 0.5);
        Cord u = gen::random_jetform(rng, ch, a.codim(), n, l, a.source(), 0.5);
        Cord lhs = nabla(a, bracket(z, u));
        Cord r1 = bracket(nabla(a, z), u.truncate(n - 1));
        Cord r2 = bracket(z.truncate(n - 1), nabla(a, u));
        Cord rhs = k % 2 ? r1 - r2 : r1 + r2;
        leibniz = leibniz && truncate_to(lhs, rhs.order()) == rhs;

        auto y = gen::random_section(rng, ch, n, gen::random_source(rng, ch, a.codim()), a.source(), 0.3);
        Cord b = gauge(y, a);
        chain = chain && nabla(b, phi_transport(a, b, y, w)) == pushforward(y.truncate(n - 1), nabla(a, w));
    }
    r.add("trials", static_cast<long>(p.trials));
    r.check("nabla_squared_zero", square, "nabla_A^2 is non-zero on a random form");
    r.check("graded_leibniz", leibniz, "graded Leibniz identity fails");
    r.check("chain_map", chain, "Phi does not intertwine the twisted differentials");
}

inline double linear_coeff(const SeriesVec<double>& s) { return s.at(0).coeff(MultiIndex{1}); }

inline void add_comparison(TaskReport& r, const ClassComparison& c, const TaskParams& p)
{
    r.add("relation", std::string(to_string(c.relation)));
    r.add("residual", report::estimate(c.residual, 0));
    if (!p.expect.empty())
        r.check("expected", p.expect == to_string(c.relation), "expected the relation '" + p.expect + "'");
}

inline void run_cech(const Model& m, const Task& t, const TaskParams& p, TaskReport& r)
{
    StepControl ctl{p.step, p.tol};
    if (t.args.size() == 2 && m.is(t.args[1].first, DeclKind::cover)) {
        Cord a = m.cord(t.args[0].first, p.order);
        Cover cover = m.cover(t.args[1].first);
        ExtractedCocycle ext = extract_cocycle(a, m.chart(), cover, ctl);
        r.add("constancy", report::estimate(ext.constancy, 0));
        r.add("integration_error", report::estimate(ext.integration_error, 0));
        r.add("cocycle_residual", report::estimate(ext.cocycle_residual, 0));
        SeriesVec<double> prod = loop_product(ext);
        HolonomyJet h = transport(a, m.chart(), Loop::generator(m.chart(), 0), ctl);
        r.add("loop_product.linear", report::estimate(linear_coeff(prod), ext.integration_error));
        r.add("monodromy.linear", report::estimate(h.coeff(0, MultiIndex{1}), h.coeff_error(0, MultiIndex{1})));
        ClassComparison c = compare_classes(prod, h.value, p.tol * 10);
        add_comparison(r, c, p);
        if (p.expect.empty())
            r.check("matches_monodromy", c.relation == ClassRelation::same,
                    "loop product is not conjugate to the monodromy");
        return;
    }
    if (t.args.size() == 2) {
        Cocycle c1 = m.cocycle(t.args[0].first, p.order), c2 = m.cocycle(t.args[1].first, p.order);
        auto p1 = to_doubles(loop_product(c1)), p2 = to_doubles(loop_product(c2));
        r.add("linear_first", report::estimate(linear_coeff(p1), 0));
        r.add("linear_second", report::estimate(linear_coeff(p2), 0));
        add_comparison(r, compare_classes(p1, p2, p.tol), p);
        return;
    }
    Cocycle c = m.cocycle(t.args[0].first, p.order);
    RoundtripReport rr = roundtrip_class(c, ctl);
    const double before = linear_coeff(rr.before), after = linear_coeff(rr.after), mono = linear_coeff(rr.monodromy);
    r.add("reconstructed_order", static_cast<long>(rr.after.at(0).order()));
    r.add("loop_product.linear", report::estimate(before, 0));
    r.add("roundtrip.linear", report::estimate(after, rr.extracted.integration_error));
    r.add("monodromy.linear", report::estimate(mono, 0));
    add_comparison(r, rr.comparison, p);
    r.check("linear_part_matches", std::abs(mono - before) <= p.tol * std::max(1.0, std::abs(before)),
            "monodromy linear part of the glued cord differs from the loop product");
    if (p.expect.empty())
        r.check("same_class", rr.comparison.relation == ClassRelation::same,
                "roundtrip class is " + std::string(to_string(rr.comparison.relation)));
}

inline void run_concord(const Model& m, const Task& t, const TaskParams& p, TaskReport& r)
{
    Cord a = m.cord(t.args[0].first, p.order);
    GaugeSection<ScalarField> y = m.gauge(t.args[1].first, p.order);
    flag_certificate(r, "gauge " + t.args[1].first, y.certificate());
    Concord c = concord_from_gauge(a, y, m.chart());
    r.add("order", static_cast<long>(c.cord.order()));
    r.check("flat", is_flat(c.cord), "the concord is not flat");
    r.check("start_is_cord", c.restrict_to(Rational(0)) == to_rational_cord(a.truncate(p.order - 1)),
            "restriction to s = 0 differs from the cord");
    r.check("end_is_gauged_cord", c.restrict_to(Rational(1)) == to_rational_cord(gauge(y, a)),
            "restriction to s = 1 differs from Y * A");
    r.check("split_identity", concord_split_residual(c).is_zero_jetform(),
            "d/ds A_s differs from nabla_{A_s} B_s");
}

} // namespace detail

inline report::TaskReport run_task(const Model& m, const Task& t, const Options& o, const Limits& limits = {})
{
    report::TaskReport r;
    r.name = t.label();
    auto start = std::chrono::steady_clock::now();
    detail::TaskParams p = detail::resolve(t, o);
    if (std::string why = detail::exceeded(p, limits); !why.empty()) {
        r.status = report::Status::aborted;
        r.errors.push_back("resource limit: " + why);
        return r;
    }
    try {
        switch (t.kind) {
        case TaskKind::verify: detail::run_verify(m, t, p, r); break;
        case TaskKind::holonomy: detail::run_holonomy(m, t, p, r); break;
        case TaskKind::gv: detail::run_gv(m, t, p, r); break;
        case TaskKind::cohomology: detail::run_cohomology(m, t, p, r); break;
        case TaskKind::cech: detail::run_cech(m, t, p, r); break;
        case TaskKind::concord: detail::run_concord(m, t, p, r); break;
        }
    } catch (const std::bad_alloc&) {
        r.status = report::Status::aborted;
        r.errors.push_back("resource limit: out of memory");
    } catch (const Error& e) {
        r.status = report::Status::error;
        r.errors.push_back(std::string(to_string(e.kind())) + " error: " + e.what());
    } catch (const std::exception& e) {
        r.status = report::Status::error;
        r.errors.push_back(std::string("error: ") + e.what());
    }
    if (o.timing)
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

// Worker count from CORDFOL_WORKERS, defaulting to the hardware concurrency.
inline int workers_from_env()
{
    if (const char* v = std::getenv("CORDFOL_WORKERS")) {
        char* end = nullptr;
        long n = std::strtol(v, &end, 10);
        if (end != v && *end == '\0' && n >= 1)
            return static_cast<int>(std::min(n, 64L));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs the selected tasks concurrently; results keep the scenario order.
inline report::Report run_scenario(const Model& m, const Options& o, const std::vector<TaskKind>& only = {})
{
    std::vector<const Task*> tasks;
    for (auto& t : m.scenario().tasks)
        if (only.empty() || std::find(only.begin(), only.end(), t.kind) != only.end())
            tasks.push_back(&t);
    report::Report rep;
    rep.scenario = m.scenario().name;
    rep.tasks.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < tasks.size();)
            rep.tasks[i] = run_task(m, *tasks[i], o);
    };
    const int n = std::max(1, std::min<int>(o.workers, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i)
        pool.emplace_back(work);
    work();
    for (auto& th : pool)
        th.join();
    return rep;
}

} // namespace cordfol::dsl
