#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hard_instances.hpp"
#include "instance.hpp"
#include "regions.hpp"

namespace cpe {

using Json = nlohmann::json;

// Malformed document text; the message carries line and column.
struct ParseError : Error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& what, int l, int c) : Error(what), line(l), column(c) {}
};

// A ball-case document: arm a has mean x_a, the question is x = u or
// |x - u| >= r.
struct BallDocument {
    MeanProfile profile;
    BallCaseConfig config;
    bool inside = true;  // ground truth
};

struct InstanceDocument {
    enum class Kind { best_set, general, ball };
    Kind kind = Kind::best_set;
    std::optional<BestSetInstance> best_set;
    std::optional<GeneralSampInstance> general;
    std::optional<BallDocument> ball;
};

namespace detail {

inline const Json& field(const Json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) throw Error(where + ": missing field \"" + key + "\"");
    return j.at(key);
}

inline std::vector<double> real_vector(const Json& j, const std::string& where)
{
    if (!j.is_array()) throw Error(where + ": expected an array of numbers");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number()) throw Error(where + ": expected an array of numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

inline IndexSet index_set(const Json& j, const std::string& where)
{
    if (!j.is_array()) throw Error(where + ": expected an array of arm indices");
    IndexSet s;
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw Error(where + ": arm indices must be integers");
        s.push_back(x.get<int>());
    }
    return s;
}

inline std::vector<IndexSet> set_list(const Json& j, const std::string& where)
{
    if (!j.is_array()) throw Error(where + ": expected an array of sets");
    std::vector<IndexSet> out;
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(index_set(j[k], where + "[" + std::to_string(k) + "]"));
    return out;
}

inline int integer(const Json& j, const std::string& where)
{
    if (!j.is_number_integer()) throw Error(where + ": expected an integer");
    return j.get<int>();
}

inline Graph graph(const Json& j, bool bipartite)
{
    const std::string where = "family.graph";
    Graph g;
    if (bipartite) {
        g.left = integer(field(j, "left", where), where + ".left");
        g.right = integer(field(j, "right", where), where + ".right");
    } else {
        g.vertices = integer(field(j, "vertices", where), where + ".vertices");
        if (j.contains("s")) g.s = integer(j.at("s"), where + ".s");
        if (j.contains("t")) g.t = integer(j.at("t"), where + ".t");
    }
    const Json& edges = field(j, "edges", where);
    if (!edges.is_array()) throw Error(where + ".edges: expected an array of [u, v] pairs");
    for (const auto& e : edges) {
        if (!e.is_array() || e.size() != 2) throw Error(where + ".edges: expected an array of [u, v] pairs");
        g.edges.push_back({integer(e[0], where + ".edges"), integer(e[1], where + ".edges")});
    }
    return g;
}

inline FamilyOracle family(const Json& j, std::size_t n)
{
    if (j.contains("explicit")) return FamilyOracle::explicit_list(n, set_list(j.at("explicit"), "family.explicit"));
    const Json& o = field(j, "oracle", "family");
    if (!o.is_string()) throw Error("family.oracle: expected a string");
    const std::string kind = o.get<std::string>();
    FamilyOracle F = [&] {
        if (kind == "spanning_tree") return FamilyOracle::spanning_tree(graph(field(j, "graph", "family"), false));
        if (kind == "matching") return FamilyOracle::bipartite_matching(graph(field(j, "graph", "family"), true));
        if (kind == "path") return FamilyOracle::st_path(graph(field(j, "graph", "family"), false));
        throw Error("family.oracle: unknown oracle \"" + kind + "\"");
    }();
    if (F.arms() != n) throw Error("family: graph has " + std::to_string(F.arms()) + " edges but there are " +
                                   std::to_string(n) + " means");
    return F;
}

inline AnswerRegion region(const Json& j, std::size_t n, const std::string& where)
{
    if (j.contains("halfspaces")) {
        std::vector<Halfspace> hs;
        for (const auto& h : j.at("halfspaces"))
            hs.push_back({real_vector(field(h, "a", where), where + ".a"), field(h, "b", where).get<double>()});
        return AnswerRegion::polyhedron(std::move(hs), n);
    }
    if (j.contains("top_set"))
        return AnswerRegion::top_set(index_set(j.at("top_set"), where + ".top_set"),
                                     set_list(field(j, "among", where), where + ".among"), n);
    if (j.contains("count_above")) {
        const Json& c = j.at("count_above");
        return AnswerRegion::threshold_count(field(c, "theta", where).get<double>(),
                                             integer(field(c, "count", where), where + ".count"), n);
    }
    if (j.contains("points")) {
        std::vector<std::vector<double>> pts;
        for (const auto& p : j.at("points")) pts.push_back(real_vector(p, where + ".points"));
        return AnswerRegion::point_set(std::move(pts), n);
    }
    throw Error(where + ": expected one of halfspaces, top_set, count_above, points");
}

} // namespace detail

inline InstanceDocument instance_from_json(const Json& j)
{
    if (!j.is_object()) throw Error("instance document must be a JSON object");
    MeanProfile profile(detail::real_vector(detail::field(j, "means", "instance"), "means"));
    const std::size_t n = profile.size();
    InstanceDocument doc;
    const int kinds = j.contains("family") + j.contains("regions") + j.contains("ball");
    if (kinds != 1) throw Error("instance needs exactly one of family, regions, ball");
    if (j.contains("family")) {
        doc.kind = InstanceDocument::Kind::best_set;
        doc.best_set.emplace(profile, detail::family(j.at("family"), n));
    } else if (j.contains("regions")) {
        const Json& rs = j.at("regions");
        if (!rs.is_array()) throw Error("regions: expected an array");
        std::vector<AnswerRegion> regions;
        for (std::size_t k = 0; k < rs.size(); ++k)
            regions.push_back(detail::region(rs[k], n, "regions[" + std::to_string(k) + "]"));
        doc.kind = InstanceDocument::Kind::general;
        doc.general.emplace(profile, std::move(regions));
    } else {
        const Json& b = j.at("ball");
        BallDocument ball{profile, {}, true};
        ball.config.u = detail::real_vector(detail::field(b, "u", "ball"), "ball.u");
        ball.config.r = detail::field(b, "r", "ball").get<double>();
        if (b.contains("c1")) ball.config.c1 = b.at("c1").get<double>();
        if (b.contains("c2")) ball.config.c2 = b.at("c2").get<double>();
        if (ball.config.u.size() != n) throw Error("ball.u: length differs from means");
        if (!(ball.config.r > 0.0 && ball.config.r <= 1.0)) throw Error("ball.r: must lie in (0,1]");
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) d2 += (profile[i] - ball.config.u[i]) * (profile[i] - ball.config.u[i]);
        if (d2 == 0.0) ball.inside = true;
        else if (std::sqrt(d2) >= ball.config.r * (1 - 1e-12)) ball.inside = false;
        else throw Error("ball: means are neither at u nor at distance >= r");
        doc.kind = InstanceDocument::Kind::ball;
        doc.ball = std::move(ball);
    }
    return doc;
}

inline InstanceDocument parse_instance(const std::string& text)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        // byte offset to line and column
        const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
        int line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < pos; ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string why = e.what();
        if (auto at = why.find("column"); at != std::string::npos && why.find(": ", at) != std::string::npos)
            why = why.substr(why.find(": ", at) + 2);
        throw ParseError("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + why,
                         line, col);
    }
    try {
        return instance_from_json(j);
    } catch (const Json::exception& e) {
        throw Error(std::string("invalid instance: ") + e.what());
    }
}

inline InstanceDocument load_instance(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

namespace detail {

inline Json graph_json(const Graph& g, bool bipartite)
{
    Json j;
    if (bipartite) {
        j["left"] = g.left;
        j["right"] = g.right;
    } else {
        j["vertices"] = g.vertices;
    }
    Json edges = Json::array();
    for (const auto& e : g.edges) edges.push_back({e.u, e.v});
    j["edges"] = std::move(edges);
    return j;
}

} // namespace detail

inline Json to_json(const BestSetInstance& inst)
{
    Json j;
    j["means"] = inst.profile().values();
    const auto& F = inst.family();
    Json fam;
    switch (F.kind()) {
    case FamilyKind::explicit_list: fam["explicit"] = F.enumerate(); break;
    case FamilyKind::spanning_tree:
        fam["oracle"] = "spanning_tree";
        fam["graph"] = detail::graph_json(F.graph(), false);
        break;
    case FamilyKind::bipartite_matching:
        fam["oracle"] = "matching";
        fam["graph"] = detail::graph_json(F.graph(), true);
        break;
    case FamilyKind::st_path:
        fam["oracle"] = "path";
        fam["graph"] = detail::graph_json(F.graph(), false);
        fam["graph"]["s"] = F.graph().s;
        fam["graph"]["t"] = F.graph().t;
        break;
    }
    j["family"] = std::move(fam);
    return j;
}

inline Json to_json(const GeneralSampInstance& inst)
{
    Json j;
    j["means"] = inst.profile().values();
    Json rs = Json::array();
    for (const auto& r : inst.regions()) {
        Json o;
        switch (r.kind()) {
        case AnswerRegion::Kind::polyhedron: {
            Json hs = Json::array();
            for (const auto& h : r.halfspaces()) hs.push_back({{"a", h.a}, {"b", h.b}});
            o["halfspaces"] = std::move(hs);
            break;
        }
        case AnswerRegion::Kind::top_set: {
            // rebuild the family from the halfspace rows: row = 1_S - 1_T
            std::vector<IndexSet> among{r.top()};
            for (const auto& h : r.halfspaces()) {
                IndexSet t;
                for (std::size_t i = 0; i < h.a.size(); ++i) {
                    const bool in_s = contains(r.top(), static_cast<int>(i));
                    if ((in_s && h.a[i] == 0.0) || (!in_s && h.a[i] < 0.0)) t.push_back(static_cast<int>(i));
                }
                among.push_back(std::move(t));
            }
            o["top_set"] = r.top();
            o["among"] = std::move(among);
            break;
        }
        case AnswerRegion::Kind::threshold_count: o["count_above"] = {{"theta", r.theta()}, {"count", r.count()}}; break;
        case AnswerRegion::Kind::point_set: o["points"] = r.points(); break;
        }
        rs.push_back(std::move(o));
    }
    j["regions"] = std::move(rs);
    return j;
}

inline Json to_json(const BallDocument& b)
{
    Json j;
    j["means"] = b.profile.values();
    j["ball"] = {{"u", b.config.u}, {"r", b.config.r}, {"c1", b.config.c1}, {"c2", b.config.c2}};
    return j;
}

// Best-Set instance whose family is an NW design; the first set carries
// mean eps per arm, so every other set trails it by at least eps * ell / 2.
inline BestSetInstance design_instance(const DesignFamily& d, double eps)
{
    if (!(eps > 0.0)) throw Error("design instance needs eps > 0");
    std::vector<double> mu(static_cast<std::size_t>(d.n), 0.0);
    for (int i : d.sets.at(0)) mu[i] = eps;
    return make_explicit_instance(std::move(mu), d.sets);
}

} // namespace cpe
