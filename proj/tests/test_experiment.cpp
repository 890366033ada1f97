#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "cpe/experiment.hpp"

using namespace cpe;

#ifndef CPE_GOLDEN_DIR
#define CPE_GOLDEN_DIR "tests/golden"
#endif

namespace {

InstanceDocument doc_of(const BestSetInstance& inst)
{
    return parse_instance(to_json(inst).dump());
}

std::string csv_of(const RunReport& rep)
{
    std::ostringstream os;
    write_csv(os, rep);
    return os.str();
}

} // namespace

TEST(InstanceJson, ExplicitRoundTrip)
{
    const auto inst = make_explicit_instance({0.5, 0.1, 0.3}, {{0, 2}, {1}, {1, 2}});
    const auto doc = parse_instance(to_json(inst).dump(2));
    ASSERT_EQ(doc.kind, InstanceDocument::Kind::best_set);
    EXPECT_EQ(doc.best_set->profile().values(), inst.profile().values());
    EXPECT_EQ(doc.best_set->family().enumerate(), inst.family().enumerate());
    EXPECT_EQ(doc.best_set->optimum(), (IndexSet{0, 2}));
}

TEST(InstanceJson, HandWrittenGraphFamilies)
{
    const auto tree = parse_instance(R"({"means": [1, 1, 1, 0.5],
        "family": {"oracle": "spanning_tree", "graph": {"vertices": 4, "edges": [[0,1],[1,2],[2,3],[3,0]]}}})");
    EXPECT_EQ(tree.best_set->family().kind(), FamilyKind::spanning_tree);
    EXPECT_EQ(tree.best_set->optimum(), (IndexSet{0, 1, 2}));

    const auto match = parse_instance(R"({"means": [0.9, 0.1, 0.2, 0.8],
        "family": {"oracle": "matching", "graph": {"left": 2, "right": 2, "edges": [[0,0],[0,1],[1,0],[1,1]]}}})");
    EXPECT_EQ(match.best_set->optimum(), (IndexSet{0, 3}));

    const auto path = parse_instance(R"({"means": [0.3, 0.3, 0.1, 0.4],
        "family": {"oracle": "path", "graph": {"vertices": 3, "s": 0, "t": 2, "edges": [[0,1],[1,2],[0,2],[0,2]]}}})");
    EXPECT_EQ(path.best_set->optimum(), (IndexSet{0, 1}));

    for (const auto* d : {&tree, &match, &path}) {
        const auto again = parse_instance(to_json(*d->best_set).dump());
        EXPECT_EQ(again.best_set->family().kind(), d->best_set->family().kind());
        EXPECT_EQ(again.best_set->optimum(), d->best_set->optimum());
        EXPECT_EQ(again.best_set->family().enumerate(), d->best_set->family().enumerate());
    }
}

TEST(InstanceJson, RegionsRoundTrip)
{
    const auto doc = parse_instance(R"({"means": [0.5, -0.5, 1.5],
        "regions": [{"count_above": {"theta": 0, "count": 0}},
                    {"count_above": {"theta": 0, "count": 1}},
                    {"count_above": {"theta": 0, "count": 2}},
                    {"count_above": {"theta": 0, "count": 3}}]})");
    ASSERT_EQ(doc.kind, InstanceDocument::Kind::general);
    EXPECT_EQ(doc.general->answer(), 2);

    const auto tops = to_general(make_explicit_instance({0.5, 0.1, 0.3}, {{0, 2}, {1}, {1, 2}}));
    const auto back = parse_instance(to_json(tops).dump());
    ASSERT_EQ(back.general->regions().size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(back.general->regions()[k].top(), tops.regions()[k].top());
        EXPECT_EQ(back.general->regions()[k].halfspaces().size(), 2u);
        for (std::size_t h = 0; h < 2; ++h)
            EXPECT_EQ(back.general->regions()[k].halfspaces()[h].a, tops.regions()[k].halfspaces()[h].a);
    }
    EXPECT_EQ(back.general->answer(), tops.answer());

    const auto orr = or_instance(4, 0.5, 1);
    const auto o2 = parse_instance(to_json(orr).dump());
    EXPECT_EQ(o2.general->answer(), 0);
    EXPECT_EQ(o2.general->regions()[0].points(), orr.regions()[0].points());

    const auto poly = parse_instance(R"({"means": [1, 0],
        "regions": [{"halfspaces": [{"a": [1, -1], "b": 0}]}, {"halfspaces": [{"a": [-1, 1], "b": 0.1}]}]})");
    EXPECT_EQ(poly.general->answer(), 0);
}

TEST(InstanceJson, BallDocuments)
{
    const auto in = parse_instance(R"({"means": [0, 0, 0], "ball": {"u": [0, 0, 0], "r": 0.5}})");
    EXPECT_TRUE(in.ball->inside);
    const auto out = parse_instance(R"({"means": [0.3, 0.4, 0], "ball": {"u": [0, 0, 0], "r": 0.5}})");
    EXPECT_FALSE(out.ball->inside);
    EXPECT_THROW(parse_instance(R"({"means": [0.1, 0, 0], "ball": {"u": [0, 0, 0], "r": 0.5}})"), Error);
    const auto again = parse_instance(to_json(*out.ball).dump());
    EXPECT_EQ(again.ball->config.u, out.ball->config.u);
    EXPECT_DOUBLE_EQ(again.ball->config.c2, 32.0);
}

TEST(InstanceJson, ParseErrorsCarryPosition)
{
    try {
        parse_instance("{\"means\": [1,\n  2,, 3]}");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 2);
        EXPECT_EQ(e.column, 5);
        EXPECT_NE(std::string(e.what()).find("line 2, column 5"), std::string::npos);
    }
    EXPECT_THROW(parse_instance(""), ParseError);
}

TEST(InstanceJson, SchemaErrors)
{
    EXPECT_THROW(parse_instance(R"({"family": {"explicit": [[0]]}})"), Error);
    EXPECT_THROW(parse_instance(R"({"means": [1], "family": {"oracle": "cycle", "graph": {}}})"), Error);
    EXPECT_THROW(parse_instance(R"({"means": [1, 2], "family": {"explicit": [[0]]}, "regions": []})"), Error);
    EXPECT_THROW(parse_instance(R"({"means": [1, 2], "family": {"explicit": [[0, 5]]}})"), Error);
    EXPECT_THROW(parse_instance(R"({"means": [1, 2], "family": {"explicit": [[0], [1]], "x": 1}, "ball": {}})"), Error);
    EXPECT_THROW(parse_instance(R"({"means": [1], "family": {"oracle": "spanning_tree",
        "graph": {"vertices": 2, "edges": [[0,1],[0,1]]}}})"), Error);
    EXPECT_THROW(parse_instance(R"({"means": ["a"], "family": {"explicit": [[0]]}})"), Error);
    EXPECT_THROW(parse_instance(R"([1, 2])"), Error);
    EXPECT_THROW(load_instance("/nonexistent/instance.json"), Error);
}

TEST(LbReport, ClosedForms)
{
    const auto disj = compute_lb_report(doc_of(disj_sets_instance(4, 0.5)));
    EXPECT_EQ(disj.kind, "best_set");
    EXPECT_NEAR(disj.low, 16.0, 1e-5);
    EXPECT_NEAR(*disj.hc, 2.0, 1e-12);
    EXPECT_NEAR(disj.ratio, 8.0, 1e-5);
    EXPECT_NEAR(disj.gap, 2.0, 1e-12);

    const auto two = compute_lb_report(doc_of(make_explicit_instance({1.0, 0.0}, {{0}, {1}})));
    EXPECT_NEAR(two.low, 4.0, 1e-6);
    EXPECT_NEAR(*two.hc, 2.0, 1e-12);

    const auto single = compute_lb_report(doc_of(make_explicit_instance({1.0, 0.0}, {{0}})));
    EXPECT_EQ(single.low, 0.0);
    std::ostringstream os;
    write_lb_csv(os, single);
    EXPECT_EQ(os.str(), "kind,low,hc,gap,ratio\nbest_set,0,0,inf,\n");

    const auto orr = compute_lb_report(parse_instance(to_json(or_instance(5, 0.5, 2)).dump()));
    EXPECT_EQ(orr.kind, "general");
    EXPECT_NEAR(orr.low, 4.0, 1e-4);
    EXPECT_NEAR(orr.gap, 0.5, 1e-9);
    EXPECT_THROW(compute_lb_report(parse_instance(R"({"means": [0, 0], "ball": {"u": [0, 0], "r": 1}})")), Error);
}

TEST(RunExperiment, DisjointSetsNaive)
{
    const auto doc = doc_of(disj_sets_instance(4, 0.5));
    ExperimentConfig cfg;
    cfg.algorithm = Algorithm::naive;
    cfg.delta = 0.005;
    cfg.trials = 100;
    cfg.seed = 7;
    const auto rep = run_experiment(doc, cfg);
    ASSERT_EQ(rep.rows.size(), 100u);
    EXPECT_LE(rep.error_rate, 0.01 + 3 * std::sqrt(0.01 * 0.99 / 100));
    int wrong = 0;
    for (std::size_t t = 0; t < rep.rows.size(); ++t) {
        EXPECT_EQ(rep.rows[t].trial, static_cast<int>(t));
        EXPECT_EQ(rep.rows[t].seed, mix_seed(7, t));
        wrong += !rep.rows[t].correct;
    }
    EXPECT_DOUBLE_EQ(rep.error_rate, wrong / 100.0);
    EXPECT_LE(rep.pulls_p10, rep.pulls_median);
    EXPECT_LE(rep.pulls_median, rep.pulls_p90);
}

TEST(RunExperiment, RowsMatchStandaloneRuns)
{
    const auto inst = make_explicit_instance({0.3, 0.0}, {{0}, {1}});
    ExperimentConfig cfg;
    cfg.trials = 6;
    cfg.seed = 11;
    cfg.threads = 3;
    const auto rep = run_experiment(doc_of(inst), cfg);
    for (int t = 0; t < 6; ++t) {
        GaussianEnvironment env(inst.profile(), mix_seed(11, t));
        const auto out = naive_gap_elim(env, inst, cfg.delta);
        EXPECT_EQ(rep.rows[t].total_pulls, env.total_pulls());
        EXPECT_EQ(rep.rows[t].rounds, out.rounds);
        EXPECT_EQ(rep.rows[t].answer, set_to_string(out.set));
    }
}

TEST(RunExperiment, DeterministicAcrossRunsAndThreads)
{
    const auto doc = doc_of(disj_sets_instance(2, 0.5));
    ExperimentConfig cfg;
    cfg.trials = 1;
    cfg.seed = 5;
    cfg.timing = false;
    EXPECT_EQ(csv_of(run_experiment(doc, cfg)), csv_of(run_experiment(doc, cfg)));
    cfg.trials = 12;
    cfg.threads = 1;
    const auto one = csv_of(run_experiment(doc, cfg));
    cfg.threads = 4;
    EXPECT_EQ(one, csv_of(run_experiment(doc, cfg)));
}

TEST(RunExperiment, GoldenCsv)
{
    auto check = [](const InstanceDocument& doc, Algorithm alg, const std::string& file) {
        ExperimentConfig cfg;
        cfg.algorithm = alg;
        cfg.delta = 0.005;
        cfg.trials = 8;
        cfg.seed = 2024;
        cfg.timing = false;
        const std::string got = csv_of(run_experiment(doc, cfg));
        std::ifstream in(std::string(CPE_GOLDEN_DIR) + "/" + file);
        ASSERT_TRUE(in) << "missing golden file " << file;
        std::stringstream want;
        want << in.rdbuf();
        EXPECT_EQ(got, want.str()) << file;
        EXPECT_EQ(got.substr(0, got.find('\n')), "trial,seed,answer,correct,total_pulls,rounds,wall_ms");
    };
    check(doc_of(make_explicit_instance({0.3, 0.05, 0.22}, {{0}, {1}, {2}})), Algorithm::naive, "naive_three_arm.csv");
    check(doc_of(make_explicit_instance({1.0, 0.0}, {{0}, {1}})), Algorithm::lpsample, "lpsample_two_arm.csv");
}

TEST(RunExperiment, EveryAlgorithmOnItsKind)
{
    ExperimentConfig cfg;
    cfg.trials = 4;
    cfg.seed = 3;
    cfg.delta = 0.05;
    const auto best = doc_of(make_explicit_instance({0.5, 0.0}, {{0}, {1}}));
    for (auto a : {Algorithm::naive, Algorithm::efficient, Algorithm::lpsample, Algorithm::wrapped_naive,
                   Algorithm::wrapped_efficient, Algorithm::wrapped_lpsample}) {
        cfg.algorithm = a;
        const auto rep = run_experiment(best, cfg);
        EXPECT_EQ(rep.error_rate, 0.0) << algorithm_name(a);
        EXPECT_EQ(parse_algorithm(algorithm_name(a)), a);
    }
    // lpsample on a Best-Set document answers with a region index
    cfg.algorithm = Algorithm::lpsample;
    EXPECT_EQ(run_experiment(best, cfg).rows[0].answer, "0");

    const auto ball = parse_instance(R"({"means": [0, 0, 0, 0], "ball": {"u": [0, 0, 0, 0], "r": 1}})");
    cfg.algorithm = Algorithm::ball;
    const auto rep = run_experiment(ball, cfg);
    EXPECT_EQ(rep.rows[0].answer, "inside");
    EXPECT_EQ(rep.error_rate, 0.0);
}

TEST(RunExperiment, RejectsBadConfigs)
{
    const auto best = doc_of(make_explicit_instance({0.5, 0.0}, {{0}, {1}}));
    const auto gen = parse_instance(to_json(or_instance(3, 0.5, 0)).dump());
    const auto ball = parse_instance(R"({"means": [0, 0], "ball": {"u": [0, 0], "r": 1}})");
    ExperimentConfig cfg;
    cfg.algorithm = Algorithm::naive;
    EXPECT_THROW(run_experiment(gen, cfg), Error);
    cfg.algorithm = Algorithm::ball;
    EXPECT_THROW(run_experiment(best, cfg), Error);
    cfg.algorithm = Algorithm::lpsample;
    EXPECT_THROW(run_experiment(ball, cfg), Error);
    cfg.algorithm = Algorithm::naive;
    cfg.trials = 0;
    EXPECT_THROW(run_experiment(best, cfg), Error);
    cfg.trials = 1;
    cfg.delta = 1.0;
    EXPECT_THROW(run_experiment(best, cfg), Error);
    EXPECT_THROW(parse_algorithm("ucb"), Error);
}

TEST(Quantile, NearestRank)
{
    EXPECT_EQ(quantile({5, 1, 3, 2, 4}, 0.5), 3.0);
    EXPECT_EQ(quantile({5, 1, 3, 2, 4}, 0.1), 1.0);
    EXPECT_EQ(quantile({5, 1, 3, 2, 4}, 0.9), 5.0);
    EXPECT_EQ(quantile({}, 0.5), 0.0);
}
