#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace cpe {

struct Edge {
    int u = 0;
    int v = 0;
};

// Graph payload. Arms are edge indices. For matchings `u` is a left vertex in
// [0, left) and `v` a right vertex in [0, right); for paths edges are directed.
struct Graph {
    int vertices = 0;
    int left = 0;
    int right = 0;
    int s = 0;
    int t = 0;
    std::vector<Edge> edges;
};

enum class FamilyKind { explicit_list, spanning_tree, bipartite_matching, st_path };

inline const char* kind_name(FamilyKind k)
{
    switch (k) {
    case FamilyKind::explicit_list: return "explicit";
    case FamilyKind::spanning_tree: return "spanning_tree";
    case FamilyKind::bipartite_matching: return "matching";
    case FamilyKind::st_path: return "path";
    }
    return "?";
}

inline constexpr std::size_t kEnumerationCap = 1000000;

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a)
    {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    bool unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

// strict lexicographic comparison of sorted index sets
inline bool lex_less(const IndexSet& a, const IndexSet& b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace detail

// Feasible-set family over arms [0, arms()). Immutable; copies share state.
class FamilyOracle {
public:
    static FamilyOracle explicit_list(std::size_t n, std::vector<IndexSet> sets)
    {
        auto d = std::make_shared<Data>();
        d->kind = FamilyKind::explicit_list;
        d->n = n;
        for (auto& s : sets) {
            IndexSet c = make_set(s);
            if (c.size() != s.size()) throw Error("family set has repeated elements");
            for (int i : c)
                if (i < 0 || static_cast<std::size_t>(i) >= n) throw Error("family set element out of range");
            s = std::move(c);
        }
        {
            auto sorted = sets;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw Error("family contains duplicate sets");
        }
        d->sets = std::move(sets);
        d->enumerated = true;
        return FamilyOracle(std::move(d));
    }

    static FamilyOracle spanning_tree(Graph g)
    {
        if (g.vertices < 1) throw Error("spanning tree graph needs vertices");
        for (const auto& e : g.edges)
            if (e.u < 0 || e.v < 0 || e.u >= g.vertices || e.v >= g.vertices) throw Error("edge endpoint out of range");
        auto d = std::make_shared<Data>();
        d->kind = FamilyKind::spanning_tree;
        d->n = g.edges.size();
        d->graph = std::move(g);
        return FamilyOracle(std::move(d));
    }

    static FamilyOracle bipartite_matching(Graph g)
    {
        if (g.left < 1 || g.right < g.left) throw Error("matching graph needs 1 <= left <= right");
        for (const auto& e : g.edges)
            if (e.u < 0 || e.v < 0 || e.u >= g.left || e.v >= g.right) throw Error("edge endpoint out of range");
        auto d = std::make_shared<Data>();
        d->kind = FamilyKind::bipartite_matching;
        d->n = g.edges.size();
        d->graph = std::move(g);
        return FamilyOracle(std::move(d));
    }

    static FamilyOracle st_path(Graph g)
    {
        if (g.vertices < 2) throw Error("path graph needs at least two vertices");
        if (g.s < 0 || g.t < 0 || g.s >= g.vertices || g.t >= g.vertices || g.s == g.t) throw Error("invalid s/t");
        for (const auto& e : g.edges)
            if (e.u < 0 || e.v < 0 || e.u >= g.vertices || e.v >= g.vertices || e.u == e.v)
                throw Error("edge endpoint out of range");
        auto d = std::make_shared<Data>();
        d->kind = FamilyKind::st_path;
        d->n = g.edges.size();
        d->graph = std::move(g);
        d->topo = topological_order(d->graph);
        return FamilyOracle(std::move(d));
    }

    FamilyKind kind() const { return d_->kind; }
    std::size_t arms() const { return d_->n; }
    const Graph& graph() const { return d_->graph; }
    const std::vector<int>& topo() const { return d_->topo; }

    // Upper bound on ln |F|. Cayley's count for trees and R!/(R-L)! for
    // matchings hold on simple graphs; multigraphs also get the cruder
    // edge-choice counts, and the smaller bound is returned. Paths in a DAG
    // are counted exactly.
    double log_count_upper() const
    {
        const Graph& g = d_->graph;
        const double E = static_cast<double>(g.edges.size());
        switch (d_->kind) {
        case FamilyKind::explicit_list: return std::log(static_cast<double>(std::max<std::size_t>(1, d_->sets.size())));
        case FamilyKind::spanning_tree: {
            const int k = g.vertices - 1;
            double choose = 0.0;
            if (k <= E) choose = std::lgamma(E + 1) - std::lgamma(k + 1.0) - std::lgamma(E - k + 1);
            if (!simple_graph(false)) return choose;
            const double cayley = g.vertices <= 2 ? 0.0 : (g.vertices - 2) * std::log(static_cast<double>(g.vertices));
            return std::min(cayley, choose);
        }
        case FamilyKind::bipartite_matching: {
            std::vector<int> deg(g.left, 0);
            for (const auto& e : g.edges) ++deg[e.u];
            double per_left = 0.0;
            for (int c : deg) per_left += std::log(static_cast<double>(std::max(1, c)));
            if (!simple_graph(true)) return per_left;
            double s = 0.0;
            for (int k = g.right - g.left + 1; k <= g.right; ++k) s += std::log(static_cast<double>(k));
            return std::min(s, per_left);
        }
        case FamilyKind::st_path: {
            // log-sum-exp DP over the topological order
            const double ninf = -std::numeric_limits<double>::infinity();
            std::vector<double> lc(g.vertices, ninf);
            lc[g.s] = 0.0;
            std::vector<std::vector<int>> out(g.vertices);
            for (const auto& e : g.edges) out[e.u].push_back(e.v);
            for (int v : d_->topo) {
                if (lc[v] == ninf) continue;
                for (int w : out[v]) {
                    const double hi = std::max(lc[w], lc[v]);
                    lc[w] = hi + std::log(std::exp(lc[w] - hi) + std::exp(lc[v] - hi));
                }
            }
            return std::max(0.0, lc[g.t]);
        }
        }
        return 0.0;
    }

    // argmax_{A in F} w(A), skipping sets that use a banned arm.
    std::optional<IndexSet> max_weight(const std::vector<double>& w, const std::vector<char>* banned = nullptr) const
    {
        if (w.size() != arms()) throw Error("weight vector has wrong length");
        for (double v : w)
            if (!std::isfinite(v)) throw Error("weights must be finite");
        switch (d_->kind) {
        case FamilyKind::explicit_list: return scan_max(d_->sets, w, banned, nullptr);
        case FamilyKind::spanning_tree: return kruskal(w, banned);
        case FamilyKind::bipartite_matching: return hungarian(w, banned);
        case FamilyKind::st_path: return longest_path(w, banned);
        }
        return std::nullopt;
    }

    IndexSet argmax(const std::vector<double>& w) const
    {
        auto s = max_weight(w);
        if (!s) {
            switch (d_->kind) {
            case FamilyKind::spanning_tree: throw Error("graph is disconnected: no spanning tree");
            case FamilyKind::bipartite_matching: throw Error("no perfect matching");
            case FamilyKind::st_path: throw Error("no s-t path");
            default: throw Error("empty family");
            }
        }
        return *s;
    }

    // Best set other than argmax(w). Explicit lists are scanned directly
    // (their sets may be nested); for graph families every other set misses
    // some element of the best one, so banning each element in turn suffices.
    IndexSet second_best(const std::vector<double>& w) const
    {
        const IndexSet best = argmax(w);
        std::optional<IndexSet> out;
        if (d_->kind == FamilyKind::explicit_list) {
            out = scan_max(d_->sets, w, nullptr, &best);
        } else {
            std::vector<char> banned(arms(), 0);
            for (int a : best) {
                banned[a] = 1;
                auto c = max_weight(w, &banned);
                banned[a] = 0;
                if (c && (!out || better(*c, *out, w))) out = c;
            }
        }
        if (!out) throw Error("second_best needs at least two sets");
        return *out;
    }

    // Is there A in F with w(A) == V exactly (nonnegative integer weights)?
    bool exact_decide(const std::vector<long long>& w, long long V) const
    {
        if (w.size() != arms()) throw Error("weight vector has wrong length");
        long long total = 0;
        for (long long v : w) {
            if (v < 0) throw Error("exact_decide needs nonnegative weights");
            total += v;
        }
        if (V < 0 || V > total) return false;
        if (d_->kind == FamilyKind::st_path) return path_exact(w, V);
        for (const auto& s : enumerate()) {
            long long sum = 0;
            for (int i : s) sum += w[i];
            if (sum == V) return true;
        }
        return false;
    }

    // All members of F, in a deterministic order. Graph families are
    // enumerated once and cached; more than `cap` sets is an error.
    const std::vector<IndexSet>& enumerate(std::size_t cap = kEnumerationCap) const
    {
        std::lock_guard<std::mutex> lock(d_->mu);
        if (!d_->enumerated) {
            std::vector<IndexSet> sets;
            switch (d_->kind) {
            case FamilyKind::spanning_tree: enum_trees(sets, cap); break;
            case FamilyKind::bipartite_matching: enum_matchings(sets, cap); break;
            case FamilyKind::st_path: enum_paths(sets, cap); break;
            default: break;
            }
            for (auto& s : sets) std::sort(s.begin(), s.end());
            d_->sets = std::move(sets);
            d_->enumerated = true;
        }
        if (d_->sets.size() > cap) throw Error("family too large to enumerate");
        return d_->sets;
    }

private:
    struct Data {
        FamilyKind kind = FamilyKind::explicit_list;
        std::size_t n = 0;
        Graph graph;
        std::vector<int> topo;
        mutable std::vector<IndexSet> sets;
        mutable bool enumerated = false;
        mutable std::mutex mu;
    };

    explicit FamilyOracle(std::shared_ptr<Data> d) : d_(std::move(d)) {}

    bool simple_graph(bool directed) const
    {
        std::vector<std::pair<int, int>> seen;
        for (const auto& e : d_->graph.edges)
            seen.emplace_back(directed ? e.u : std::min(e.u, e.v), directed ? e.v : std::max(e.u, e.v));
        std::sort(seen.begin(), seen.end());
        return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
    }

    static bool better(const IndexSet& a, const IndexSet& b, const std::vector<double>& w)
    {
        const double wa = set_weight(w, a), wb = set_weight(w, b);
        if (wa != wb) return wa > wb;
        return detail::lex_less(a, b);
    }

    static bool uses_banned(const IndexSet& s, const std::vector<char>* banned)
    {
        if (!banned) return false;
        for (int i : s)
            if ((*banned)[i]) return true;
        return false;
    }

    static std::optional<IndexSet> scan_max(const std::vector<IndexSet>& sets, const std::vector<double>& w,
                                            const std::vector<char>* banned, const IndexSet* skip)
    {
        std::optional<IndexSet> best;
        for (const auto& s : sets) {
            if (uses_banned(s, banned) || (skip && s == *skip)) continue;
            if (!best || better(s, *best, w)) best = s;
        }
        return best;
    }

    static std::vector<int> topological_order(const Graph& g)
    {
        std::vector<int> indeg(g.vertices, 0);
        for (const auto& e : g.edges) ++indeg[e.v];
        std::vector<int> order, stack;
        for (int v = g.vertices - 1; v >= 0; --v)
            if (indeg[v] == 0) stack.push_back(v);
        std::vector<std::vector<int>> out(g.vertices);
        for (std::size_t k = 0; k < g.edges.size(); ++k) out[g.edges[k].u].push_back(static_cast<int>(k));
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            order.push_back(v);
            for (int k : out[v])
                if (--indeg[g.edges[k].v] == 0) stack.push_back(g.edges[k].v);
        }
        if (static_cast<int>(order.size()) != g.vertices) throw Error("path graph must be acyclic");
        return order;
    }

    std::optional<IndexSet> kruskal(const std::vector<double>& w, const std::vector<char>* banned) const
    {
        const Graph& g = d_->graph;
        std::vector<int> order(g.edges.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w[a] > w[b]; });
        detail::UnionFind uf(g.vertices);
        IndexSet tree;
        for (int k : order) {
            if (banned && (*banned)[k]) continue;
            if (uf.unite(g.edges[k].u, g.edges[k].v)) tree.push_back(k);
        }
        if (static_cast<int>(tree.size()) != g.vertices - 1) return std::nullopt;
        std::sort(tree.begin(), tree.end());
        return tree;
    }

    // Max-weight matching saturating the left side: Hungarian algorithm on
    // costs -w with potentials. Missing or banned edges are forbidden.
    std::optional<IndexSet> hungarian(const std::vector<double>& w, const std::vector<char>* banned) const
    {
        const Graph& g = d_->graph;
        const int L = g.left, R = g.right;
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<std::vector<double>> cost(L + 1, std::vector<double>(R + 1, inf));
        std::vector<std::vector<int>> edge_at(L + 1, std::vector<int>(R + 1, -1));
        for (std::size_t k = 0; k < g.edges.size(); ++k) {
            if (banned && (*banned)[k]) continue;
            const int i = g.edges[k].u + 1, j = g.edges[k].v + 1;
            const double c = -w[k];
            if (c < cost[i][j] || (c == cost[i][j] && edge_at[i][j] > static_cast<int>(k))) {
                cost[i][j] = c;
                edge_at[i][j] = static_cast<int>(k);
            }
        }
        std::vector<double> u(L + 1, 0.0), v(R + 1, 0.0);
        std::vector<int> p(R + 1, 0), way(R + 1, 0);
        for (int i = 1; i <= L; ++i) {
            p[0] = i;
            int j0 = 0;
            std::vector<double> minv(R + 1, inf);
            std::vector<char> used(R + 1, 0);
            do {
                used[j0] = 1;
                const int i0 = p[j0];
                double delta = inf;
                int j1 = -1;
                for (int j = 1; j <= R; ++j) {
                    if (used[j]) continue;
                    if (cost[i0][j] < inf) {
                        const double cur = cost[i0][j] - u[i0] - v[j];
                        if (cur < minv[j]) {
                            minv[j] = cur;
                            way[j] = j0;
                        }
                    }
                    if (minv[j] < delta) {
                        delta = minv[j];
                        j1 = j;
                    }
                }
                if (j1 < 0) return std::nullopt;
                for (int j = 0; j <= R; ++j) {
                    if (used[j]) {
                        u[p[j]] += delta;
                        v[j] -= delta;
                    } else if (minv[j] < inf) {
                        minv[j] -= delta;
                    }
                }
                j0 = j1;
            } while (p[j0] != 0);
            do {
                const int j1 = way[j0];
                p[j0] = p[j1];
                j0 = j1;
            } while (j0);
        }
        IndexSet out;
        for (int j = 1; j <= R; ++j)
            if (p[j] != 0) out.push_back(edge_at[p[j]][j]);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::optional<IndexSet> longest_path(const std::vector<double>& w, const std::vector<char>* banned) const
    {
        const Graph& g = d_->graph;
        const double ninf = -std::numeric_limits<double>::infinity();
        std::vector<double> best(g.vertices, ninf);
        std::vector<int> pred(g.vertices, -1);
        std::vector<std::vector<int>> out(g.vertices);
        for (std::size_t k = 0; k < g.edges.size(); ++k) out[g.edges[k].u].push_back(static_cast<int>(k));
        best[g.s] = 0.0;
        for (int v : d_->topo) {
            if (best[v] == ninf) continue;
            for (int k : out[v]) {
                if (banned && (*banned)[k]) continue;
                const int to = g.edges[k].v;
                const double cand = best[v] + w[k];
                if (cand > best[to]) {
                    best[to] = cand;
                    pred[to] = k;
                }
            }
        }
        if (best[g.t] == ninf) return std::nullopt;
        IndexSet path;
        for (int v = g.t; v != g.s; v = g.edges[pred[v]].u) path.push_back(pred[v]);
        std::sort(path.begin(), path.end());
        return path;
    }

    bool path_exact(const std::vector<long long>& w, long long V) const
    {
        const Graph& g = d_->graph;
        std::vector<std::vector<char>> reach(g.vertices, std::vector<char>(static_cast<std::size_t>(V) + 1, 0));
        std::vector<std::vector<int>> out(g.vertices);
        for (std::size_t k = 0; k < g.edges.size(); ++k) out[g.edges[k].u].push_back(static_cast<int>(k));
        reach[g.s][0] = 1;
        for (int v : d_->topo) {
            for (int k : out[v]) {
                const int to = g.edges[k].v;
                for (long long val = 0; val + w[k] <= V; ++val)
                    if (reach[v][val]) reach[to][val + w[k]] = 1;
            }
        }
        return reach[g.t][V] != 0;
    }

    void enum_trees(std::vector<IndexSet>& sets, std::size_t cap) const
    {
        const Graph& g = d_->graph;
        const int need = g.vertices - 1;
        IndexSet cur;
        std::vector<int> parent(g.vertices);
        std::iota(parent.begin(), parent.end(), 0);
        auto rec = [&](auto&& self, std::size_t k, std::vector<int> uf) -> void {
            if (static_cast<int>(cur.size()) == need) {
                if (sets.size() >= cap + 1) return;
                sets.push_back(cur);
                return;
            }
            if (k == g.edges.size() || static_cast<int>(g.edges.size() - k) < need - static_cast<int>(cur.size())) return;
            if (sets.size() > cap) return;
            auto find = [&](int a) {
                while (uf[a] != a) a = uf[a];
                return a;
            };
            const int a = find(g.edges[k].u), b = find(g.edges[k].v);
            if (a != b) {
                auto next = uf;
                next[b] = a;
                cur.push_back(static_cast<int>(k));
                self(self, k + 1, std::move(next));
                cur.pop_back();
            }
            self(self, k + 1, std::move(uf));
        };
        rec(rec, 0, parent);
        if (sets.size() > cap) throw Error("family too large to enumerate");
    }

    void enum_matchings(std::vector<IndexSet>& sets, std::size_t cap) const
    {
        const Graph& g = d_->graph;
        std::vector<std::vector<int>> by_left(g.left);
        for (std::size_t k = 0; k < g.edges.size(); ++k) by_left[g.edges[k].u].push_back(static_cast<int>(k));
        std::vector<char> used(g.right, 0);
        IndexSet cur;
        auto rec = [&](auto&& self, int i) -> void {
            if (sets.size() > cap) return;
            if (i == g.left) {
                sets.push_back(cur);
                return;
            }
            for (int k : by_left[i]) {
                const int j = g.edges[k].v;
                if (used[j]) continue;
                used[j] = 1;
                cur.push_back(k);
                self(self, i + 1);
                cur.pop_back();
                used[j] = 0;
            }
        };
        rec(rec, 0);
        if (sets.size() > cap) throw Error("family too large to enumerate");
    }

    void enum_paths(std::vector<IndexSet>& sets, std::size_t cap) const
    {
        const Graph& g = d_->graph;
        std::vector<std::vector<int>> out(g.vertices);
        for (std::size_t k = 0; k < g.edges.size(); ++k) out[g.edges[k].u].push_back(static_cast<int>(k));
        IndexSet cur;
        auto rec = [&](auto&& self, int v) -> void {
            if (sets.size() > cap) return;
            if (v == g.t) {
                sets.push_back(cur);
                return;
            }
            for (int k : out[v]) {
                cur.push_back(k);
                self(self, g.edges[k].v);
                cur.pop_back();
            }
        };
        rec(rec, g.s);
        if (sets.size() > cap) throw Error("family too large to enumerate");
    }

    std::shared_ptr<Data> d_;
};

} // namespace cpe
