// cordfol: run scenario files.
//
//   cordfol verify cylinder-gv
//   cordfol holonomy scenarios/torus-words.scn --step 1e-3 --format text

#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cordfol/runner.hpp"
#include "cordfol/scenario.hpp"

namespace fs = std::filesystem;
using namespace cordfol;

namespace {

#ifndef CORDFOL_SCENARIO_DIR
#define CORDFOL_SCENARIO_DIR "scenarios"
#endif

// A path, or the name of a bundled scenario.
fs::path locate(const std::string& arg)
{
    fs::path p(arg);
    if (fs::exists(p))
        return p;
    for (const char* dir : std::array<const char*, 2>{std::getenv("CORDFOL_SCENARIOS"), CORDFOL_SCENARIO_DIR}) {
        if (!dir)
            continue;
        fs::path q = fs::path(dir) / (arg + ".scn");
        if (fs::exists(q))
            return q;
    }
    return p;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantum cords of foliations: scenario runner"};
    app.require_subcommand(1);
    app.fallthrough();

    dsl::Options opts;
    opts.workers = dsl::workers_from_env();
    std::string format = "json";
    long seed = 1;
    app.add_option("--order", opts.order, "truncation order N")->capture_default_str()->check(CLI::NonNegativeNumber);
    app.add_option("--cutoff", opts.cutoff, "Fourier cutoff D")->capture_default_str()->check(CLI::NonNegativeNumber);
    app.add_option("--step", opts.step, "integration step")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--tol", opts.tol, "tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed of the randomized identity checks")->capture_default_str();
    app.add_option("--trials", opts.trials, "random instances per identity")->capture_default_str()->check(CLI::NonNegativeNumber);
    app.add_option("--format", format, "output format")->capture_default_str()->check(CLI::IsMember({"json", "text"}));
    app.add_flag("--timing", opts.timing, "report wall-clock seconds per task");

    std::string path;
    std::vector<std::pair<CLI::App*, std::optional<dsl::TaskKind>>> subs;
    auto sub = [&](const char* name, const char* help, std::optional<dsl::TaskKind> kind) {
        CLI::App* s = app.add_subcommand(name, help);
        s->add_option("scenario", path, "scenario file or bundled scenario name")->required();
        subs.emplace_back(s, kind);
    };
    sub("verify", "run every task of the scenario", std::nullopt);
    sub("holonomy", "run the holonomy tasks", dsl::TaskKind::holonomy);
    sub("gv", "run the Godbillon-Vey tasks", dsl::TaskKind::gv);
    sub("cohomology", "run the cohomology tasks", dsl::TaskKind::cohomology);
    sub("cech", "run the Cech tasks", dsl::TaskKind::cech);
    sub("concord", "run the concordance tasks", dsl::TaskKind::concord);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    opts.seed = static_cast<std::uint64_t>(seed);

    std::vector<dsl::TaskKind> only;
    for (auto& [s, kind] : subs)
        if (s->parsed() && kind)
            only.push_back(*kind);

    fs::path file = locate(path);
    std::ifstream in(file);
    if (!in) {
        std::cerr << "cordfol: cannot open scenario '" << path << "'\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    try {
        dsl::Model model(dsl::parse_scenario(buf.str()));
        model.validate(opts.order);
        report::Report rep = dsl::run_scenario(model, opts, only);
        if (!only.empty() && rep.tasks.empty())
            std::cerr << "cordfol: scenario has no " << to_string(only[0]) << " tasks\n";
        std::cout << report::emit(rep, format);
        return rep.passed() ? 0 : 1;
    } catch (const ParseError& e) {
        std::cerr << file.string() << ":" << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "cordfol: " << e.what() << "\n";
        return 2;
    }
}
