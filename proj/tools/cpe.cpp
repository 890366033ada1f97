// cpe: lower-bound reports, seeded trial batches and instance generators.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cpe/experiment.hpp"

using namespace cpe;

namespace {

int cmd_lb(const std::string& path, bool verbose)
{
    const auto doc = load_instance(path);
    const auto rep = compute_lb_report(doc);
    write_lb_csv(std::cout, rep);
    if (verbose && doc.kind == InstanceDocument::Kind::best_set) {
        const auto low = solve_low_bestset(*doc.best_set);
        const auto hc = hardness_hc(*doc.best_set);
        std::cerr << "arm,tau,hc_term\n";
        for (std::size_t i = 0; i < doc.best_set->arms(); ++i)
            std::cerr << i << ',' << format_real(low.allocation.budget[i]) << ','
                      << (hc.per_arm[i] ? format_real(*hc.per_arm[i]) : "unconstrained") << '\n';
    }
    return 0;
}

int cmd_run(const std::string& path, const std::string& alg, ExperimentConfig cfg, const std::string& out)
{
    cfg.algorithm = parse_algorithm(alg);
    const auto doc = load_instance(path);
    const auto rep = run_experiment(doc, cfg);
    if (out.empty()) {
        write_csv(std::cout, rep);
    } else {
        std::ofstream f(out);
        if (!f) throw Error("cannot write " + out);
        write_csv(f, rep);
    }
    std::cerr << algorithm_name(cfg.algorithm) << ": trials=" << cfg.trials << " error_rate=" << rep.error_rate
              << " pulls p10/median/p90=" << rep.pulls_p10 << '/' << rep.pulls_median << '/' << rep.pulls_p90 << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Combinatorial pure exploration: lower bounds, experiments, generators"};
    app.require_subcommand(1);

    std::string lb_path;
    bool verbose = false;
    auto* lb = app.add_subcommand("lb", "Print Low, H_C (Best-Set), gap and ratio as CSV");
    lb->add_option("file", lb_path, "instance JSON")->required();
    lb->add_flag("--verbose", verbose, "per-arm allocation on stderr");

    std::string run_path, alg = "naive", out;
    ExperimentConfig cfg;
    bool no_timing = false;
    auto* run = app.add_subcommand("run", "Run seeded trials and write per-trial CSV");
    run->add_option("file", run_path, "instance JSON")->required();
    run->add_option("--alg", alg, "naive|efficient|lpsample|ball|wrapped-naive|wrapped-efficient|wrapped-lpsample")
        ->capture_default_str();
    run->add_option("--delta", cfg.delta, "confidence parameter")->capture_default_str();
    run->add_option("--trials", cfg.trials, "number of trials")->capture_default_str()->check(CLI::PositiveNumber);
    run->add_option("--seed", cfg.seed, "base seed")->capture_default_str();
    run->add_option("--out", out, "CSV path (stdout if omitted)");
    run->add_option("--scale", cfg.scale, "eps_1 multiplier for naive/efficient")->capture_default_str();
    run->add_option("--threads", cfg.threads, "worker threads (0: all cores)")->capture_default_str();
    run->add_flag("--no-timing", no_timing, "write wall_ms as 0 for byte-stable output");

    auto* gen = app.add_subcommand("gen", "Emit a hard instance as JSON");
    gen->require_subcommand(1);
    int dk = 4;
    double deps = 0.25;
    bool dpaths = false;
    auto* gdisj = gen->add_subcommand("disj-sets", "two disjoint k-sets, means eps and 0");
    gdisj->add_option("--k", dk)->capture_default_str()->check(CLI::PositiveNumber);
    gdisj->add_option("--eps", deps)->capture_default_str();
    gdisj->add_flag("--paths", dpaths, "s-t path oracle instead of an explicit list");

    int on = 8;
    double ogap = 0.2;
    std::optional<int> ospecial;
    auto* gor = gen->add_subcommand("or", "OR instance: all zero or one spike of height gap");
    gor->add_option("--n", on)->capture_default_str()->check(CLI::PositiveNumber);
    gor->add_option("--gap", ogap)->capture_default_str();
    gor->add_option("--special", ospecial, "spiked arm (omit for all zero)");

    int nn = 100, nm = 16;
    double neps = 0.1;
    std::uint64_t nseed = 1;
    auto* gnw = gen->add_subcommand("nw", "Best-Set instance over an NW design; the first set is optimal");
    gnw->add_option("--n", nn)->capture_default_str();
    gnw->add_option("--m", nm)->capture_default_str();
    gnw->add_option("--eps", neps, "mean of the first set's arms")->capture_default_str();
    gnw->add_option("--seed", nseed)->capture_default_str();

    int bn = 64;
    double br = 0.5;
    bool boutside = false;
    auto* gball = gen->add_subcommand("ball", "ball-case instance centred at zero");
    gball->add_option("--n", bn)->capture_default_str()->check(CLI::PositiveNumber);
    gball->add_option("--r", br)->capture_default_str();
    gball->add_flag("--outside", boutside, "put mass r on arm 0");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*lb) return cmd_lb(lb_path, verbose);
        if (*run) {
            cfg.timing = !no_timing;
            return cmd_run(run_path, alg, cfg, out);
        }
        Json doc;
        if (*gdisj) doc = to_json(dpaths ? disj_sets_path_instance(dk, deps) : disj_sets_instance(dk, deps));
        if (*gor) doc = to_json(or_instance(on, ogap, ospecial));
        if (*gnw) doc = to_json(design_instance(nw_design(nn, nm, nseed), neps));
        if (*gball) {
            std::vector<double> x(static_cast<std::size_t>(bn), 0.0);
            if (boutside) x[0] = br;
            doc = to_json(BallDocument{MeanProfile(x), {std::vector<double>(x.size(), 0.0), br}, !boutside});
        }
        std::cout << doc.dump() << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "cpe: " << e.what() << '\n';
        return 1;
    }
}
