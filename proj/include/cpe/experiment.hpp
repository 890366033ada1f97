#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "efficient_gap_elim.hpp"
#include "hard_instances.hpp"
#include "io.hpp"
#include "lower_bounds.hpp"
#include "lp_sample.hpp"
#include "meta_runner.hpp"
#include "naive_gap_elim.hpp"

namespace cpe {

enum class Algorithm { naive, efficient, lpsample, ball, wrapped_naive, wrapped_efficient, wrapped_lpsample };

inline Algorithm parse_algorithm(const std::string& s)
{
    if (s == "naive") return Algorithm::naive;
    if (s == "efficient") return Algorithm::efficient;
    if (s == "lpsample") return Algorithm::lpsample;
    if (s == "ball") return Algorithm::ball;
    if (s == "wrapped-naive") return Algorithm::wrapped_naive;
    if (s == "wrapped-efficient") return Algorithm::wrapped_efficient;
    if (s == "wrapped-lpsample") return Algorithm::wrapped_lpsample;
    throw Error("unknown algorithm \"" + s + "\"");
}

inline const char* algorithm_name(Algorithm a)
{
    switch (a) {
    case Algorithm::naive: return "naive";
    case Algorithm::efficient: return "efficient";
    case Algorithm::lpsample: return "lpsample";
    case Algorithm::ball: return "ball";
    case Algorithm::wrapped_naive: return "wrapped-naive";
    case Algorithm::wrapped_efficient: return "wrapped-efficient";
    case Algorithm::wrapped_lpsample: return "wrapped-lpsample";
    }
    return "?";
}

struct ExperimentConfig {
    Algorithm algorithm = Algorithm::naive;
    double delta = 0.005;
    int trials = 1;
    std::uint64_t seed = 0;
    double scale = 1.0;  // eps_1 multiplier for the gap-elimination schedules
    bool timing = true;  // false writes wall_ms = 0 (byte-stable output)
    int threads = 0;     // 0: hardware concurrency
};

struct TrialRow {
    int trial = 0;
    std::uint64_t seed = 0;
    std::string answer;  // "error" when the run gave up
    bool correct = false;
    std::uint64_t total_pulls = 0;
    int rounds = 0;
    double wall_ms = 0.0;
};

struct RunReport {
    std::vector<TrialRow> rows;
    double error_rate = 0.0;  // fraction of rows with correct == 0
    double pulls_p10 = 0.0;
    double pulls_median = 0.0;
    double pulls_p90 = 0.0;
};

inline const char* kCsvHeader = "trial,seed,answer,correct,total_pulls,rounds,wall_ms";

inline void write_csv(std::ostream& os, const RunReport& rep)
{
    os << kCsvHeader << '\n';
    for (const auto& r : rep.rows) {
        std::ostringstream wall;
        wall.setf(std::ios::fixed);
        wall.precision(3);
        wall << r.wall_ms;
        os << r.trial << ',' << r.seed << ',' << r.answer << ',' << (r.correct ? 1 : 0) << ',' << r.total_pulls << ','
           << r.rounds << ',' << wall.str() << '\n';
    }
}

// nearest-rank quantile
inline double quantile(std::vector<double> v, double q)
{
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    return v[std::min(v.size() - 1, k > 0 ? k - 1 : 0)];
}

inline void check_compatible(const InstanceDocument& doc, Algorithm a)
{
    using K = InstanceDocument::Kind;
    switch (a) {
    case Algorithm::naive:
    case Algorithm::efficient:
    case Algorithm::wrapped_naive:
    case Algorithm::wrapped_efficient:
        if (doc.kind != K::best_set) throw Error(std::string(algorithm_name(a)) + " needs a Best-Set instance (family)");
        break;
    case Algorithm::lpsample:
    case Algorithm::wrapped_lpsample:
        if (doc.kind == K::ball) throw Error(std::string(algorithm_name(a)) + " cannot run on a ball instance");
        break;
    case Algorithm::ball:
        if (doc.kind != K::ball) throw Error("ball needs a ball instance");
        break;
    }
}

// One trial on its own environment seeded with `seed`.
inline TrialRow run_trial(const InstanceDocument& doc, const ExperimentConfig& cfg, int trial, std::uint64_t seed)
{
    using K = InstanceDocument::Kind;
    TrialRow row;
    row.trial = trial;
    row.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();

    GapElimOptions nopt;
    nopt.scale = cfg.scale;
    EfficientOptions eopt;
    eopt.scale = cfg.scale;
    // Best-Set documents run lpsample through their top-set regions
    std::optional<GeneralSampInstance> general;
    if (cfg.algorithm == Algorithm::lpsample || cfg.algorithm == Algorithm::wrapped_lpsample)
        general = doc.kind == K::general ? *doc.general : to_general(*doc.best_set);

    auto record = [&](const Outcome& out, std::uint64_t pulls) {
        row.total_pulls = pulls;
        row.rounds = out.rounds;
        if (!out.ok) {
            row.answer = "error";
        } else if (general) {
            row.answer = std::to_string(out.region);
            row.correct = out.region == general->answer();
        } else {
            row.answer = set_to_string(out.set);
            row.correct = out.set == doc.best_set->optimum();
        }
    };

    switch (cfg.algorithm) {
    case Algorithm::naive:
    case Algorithm::efficient:
    case Algorithm::lpsample: {
        const MeanProfile& profile = general ? general->profile() : doc.best_set->profile();
        GaussianEnvironment env(profile, seed);
        Outcome out;
        if (cfg.algorithm == Algorithm::naive) out = naive_gap_elim(env, *doc.best_set, cfg.delta, nopt);
        else if (cfg.algorithm == Algorithm::efficient) out = efficient_gap_elim(env, *doc.best_set, cfg.delta, eopt);
        else out = lp_sample(env, *general, cfg.delta);
        record(out, env.total_pulls());
        break;
    }
    case Algorithm::wrapped_naive:
    case Algorithm::wrapped_efficient:
    case Algorithm::wrapped_lpsample: {
        ParallelSimulation::Factory factory;
        if (cfg.algorithm == Algorithm::wrapped_naive)
            factory = [&](double d) { return naive_gap_elim_task(*doc.best_set, d, nopt); };
        else if (cfg.algorithm == Algorithm::wrapped_efficient)
            factory = [&](double d) { return efficient_gap_elim_task(*doc.best_set, d, eopt); };
        else
            factory = [&](double d) { return lp_sample_task(*general, d); };
        const MeanProfile& profile = general ? general->profile() : doc.best_set->profile();
        const auto res = parallel_simulate(factory, cfg.delta, profile, seed);
        record(res.outcome, res.total_pulls);
        break;
    }
    case Algorithm::ball: {
        GaussianEnvironment env(doc.ball->profile, seed);
        const auto res = ball_case_test(env, doc.ball->config, cfg.delta);
        row.answer = res.inside ? "inside" : "outside";
        row.correct = res.inside == doc.ball->inside;
        row.total_pulls = res.pulls;
        row.rounds = res.stages_run;
        break;
    }
    }
    if (cfg.timing)
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

// Trials run on a worker pool; trial t uses seed mix_seed(cfg.seed, t) and
// lands in row t whatever thread ran it.
inline RunReport run_experiment(const InstanceDocument& doc, const ExperimentConfig& cfg)
{
    if (cfg.trials < 1) throw Error("trials must be at least 1");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw Error("delta must lie in (0,1)");
    check_compatible(doc, cfg.algorithm);

    RunReport rep;
    rep.rows.resize(static_cast<std::size_t>(cfg.trials));
    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, cfg.trials);
    std::atomic<int> next{0};
    std::mutex err_mu;
    std::string first_error;
    auto worker = [&] {
        for (int t; (t = next.fetch_add(1)) < cfg.trials;) {
            try {
                rep.rows[t] = run_trial(doc, cfg, t, mix_seed(cfg.seed, static_cast<std::uint64_t>(t)));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (first_error.empty()) first_error = e.what();
                next = cfg.trials;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (!first_error.empty()) throw Error(first_error);

    std::vector<double> pulls;
    int wrong = 0;
    for (const auto& r : rep.rows) {
        wrong += !r.correct;
        pulls.push_back(static_cast<double>(r.total_pulls));
    }
    rep.error_rate = wrong / static_cast<double>(cfg.trials);
    rep.pulls_p10 = quantile(pulls, 0.1);
    rep.pulls_median = quantile(pulls, 0.5);
    rep.pulls_p90 = quantile(pulls, 0.9);
    return rep;
}

struct LbReport {
    std::string kind;  // "best_set" or "general"
    double low = 0.0;
    std::optional<double> hc;  // Best-Set only
    double gap = 0.0;          // runner-up gap, or distance to Alt
    double ratio = 0.0;        // Low / H_C, or Low * gap^2
};

inline LbReport compute_lb_report(const InstanceDocument& doc)
{
    LbReport rep;
    if (doc.kind == InstanceDocument::Kind::best_set) {
        const auto& inst = *doc.best_set;
        rep.kind = "best_set";
        rep.low = solve_low_bestset(inst).value;
        rep.hc = hardness_hc(inst).value;
        rep.gap = best_set_gap(inst);
        rep.ratio = *rep.hc > 0.0 ? rep.low / *rep.hc : std::numeric_limits<double>::quiet_NaN();
    } else if (doc.kind == InstanceDocument::Kind::general) {
        const auto& inst = *doc.general;
        rep.kind = "general";
        rep.low = solve_low_general(inst).value;
        rep.gap = distance_to_alt(inst);
        rep.ratio = rep.low * rep.gap * rep.gap;
    } else {
        throw Error("lower bounds are not defined for ball instances");
    }
    return rep;
}

inline const char* kLbHeader = "kind,low,hc,gap,ratio";

inline std::string format_real(double v)
{
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

inline void write_lb_csv(std::ostream& os, const LbReport& r)
{
    os << kLbHeader << '\n'
       << r.kind << ',' << format_real(r.low) << ',' << (r.hc ? format_real(*r.hc) : "") << ',' << format_real(r.gap)
       << ',' << format_real(r.ratio) << '\n';
}

} // namespace cpe
