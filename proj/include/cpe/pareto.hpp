#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "oracles.hpp"

namespace cpe {

struct ParetoPoint {
    IndexSet set;
    double f1 = 0.0;
    double f2 = 0.0;
};

// Cell grid used to thin labels. Additive cells have width `step`;
// multiplicative cells have ratio 1+step and require nonnegative values.
struct CellGrid {
    bool multiplicative = false;
    double step1 = 0.0;
    double step2 = 0.0;
};

namespace detail {

inline std::int64_t cell_key(double v, double step, bool multiplicative)
{
    if (multiplicative) {
        if (v < 0.0) throw Error("multiplicative Pareto grid needs nonnegative objectives");
        if (v == 0.0) return std::numeric_limits<std::int64_t>::min();
        return static_cast<std::int64_t>(std::floor(std::log(v) / std::log1p(step)));
    }
    return static_cast<std::int64_t>(std::floor(v / step));
}

struct Label {
    double f1;
    double f2;
    IndexSet set;
};

inline bool label_before(const Label& a, const Label& b)
{
    if (a.f1 != b.f1) return a.f1 > b.f1;
    if (a.f2 != b.f2) return a.f2 > b.f2;
    return lex_less(a.set, b.set);
}

// one representative per (cell1, cell2)
inline std::vector<Label> thin(std::vector<Label> labels, double s1, double s2, bool mult)
{
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> pick;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        auto key = std::make_pair(cell_key(labels[k].f1, s1, mult), cell_key(labels[k].f2, s2, mult));
        auto [it, fresh] = pick.emplace(key, k);
        if (!fresh && label_before(labels[k], labels[it->second])) it->second = k;
    }
    std::vector<Label> out;
    out.reserve(pick.size());
    for (const auto& [key, k] : pick) out.push_back(std::move(labels[k]));
    return out;
}

// drop labels weakly dominated in both objectives by another kept label
inline std::vector<Label> nondominated(std::vector<Label> labels)
{
    std::sort(labels.begin(), labels.end(), label_before);
    std::vector<Label> out;
    double best2 = -std::numeric_limits<double>::infinity();
    for (auto& l : labels) {
        if (l.f2 > best2) {
            best2 = l.f2;
            out.push_back(std::move(l));
        }
    }
    return out;
}

inline int longest_hop_count(const FamilyOracle& F)
{
    const Graph& g = F.graph();
    std::vector<int> hops(g.vertices, -1);
    std::vector<std::vector<int>> out(g.vertices);
    for (std::size_t k = 0; k < g.edges.size(); ++k) out[g.edges[k].u].push_back(static_cast<int>(k));
    hops[g.s] = 0;
    for (int v : F.topo()) {
        if (hops[v] < 0) continue;
        for (int k : out[v]) hops[g.edges[k].v] = std::max(hops[g.edges[k].v], hops[v] + 1);
    }
    return std::max(1, hops[g.t]);
}

} // namespace detail

// A set P of members of F such that every A in F has some p in P within one
// grid cell of it (or dominating it) in both objectives. Paths run a label DP
// over the DAG with the cell width split across the hops; other kinds thin
// their enumeration.
inline std::vector<ParetoPoint> pareto_front(const FamilyOracle& F, const std::vector<double>& f1,
                                             const std::vector<double>& f2, CellGrid grid)
{
    if (f1.size() != F.arms() || f2.size() != F.arms()) throw Error("objective vector has wrong length");
    if (!(grid.step1 > 0.0) || !(grid.step2 > 0.0)) throw Error("Pareto grid step must be positive");
    std::vector<detail::Label> labels;
    if (F.kind() == FamilyKind::st_path) {
        const Graph& g = F.graph();
        const int L = detail::longest_hop_count(F);
        double s1, s2;
        if (grid.multiplicative) {
            s1 = std::expm1(std::log1p(grid.step1) / L);
            s2 = std::expm1(std::log1p(grid.step2) / L);
        } else {
            s1 = grid.step1 / L;
            s2 = grid.step2 / L;
        }
        std::vector<std::vector<int>> out(g.vertices);
        for (std::size_t k = 0; k < g.edges.size(); ++k) out[g.edges[k].u].push_back(static_cast<int>(k));
        std::vector<std::vector<detail::Label>> at(g.vertices);
        at[g.s].push_back({0.0, 0.0, {}});
        for (int v : F.topo()) {
            if (at[v].empty()) continue;
            at[v] = detail::thin(std::move(at[v]), s1, s2, grid.multiplicative);
            if (v == g.t) continue;
            for (const auto& l : at[v])
                for (int k : out[v]) {
                    detail::Label nl{l.f1 + f1[k], l.f2 + f2[k], l.set};
                    nl.set.push_back(k);
                    at[g.edges[k].v].push_back(std::move(nl));
                }
            at[v].clear();
            at[v].shrink_to_fit();
        }
        labels = std::move(at[g.t]);
        for (auto& l : labels) std::sort(l.set.begin(), l.set.end());
    } else {
        for (const auto& s : F.enumerate()) labels.push_back({set_weight(f1, s), set_weight(f2, s), s});
        labels = detail::thin(std::move(labels), grid.step1, grid.step2, grid.multiplicative);
    }
    labels = detail::nondominated(std::move(labels));
    std::vector<ParetoPoint> pts;
    pts.reserve(labels.size());
    for (auto& l : labels) pts.push_back({std::move(l.set), l.f1, l.f2});
    return pts;
}

// (1+eps)-approximate Pareto curve for nonnegative objectives.
inline std::vector<ParetoPoint> pareto_eps(const FamilyOracle& F, const std::vector<double>& f1,
                                           const std::vector<double>& f2, double eps)
{
    if (!(eps > 0.0)) throw Error("pareto_eps needs eps > 0");
    return pareto_front(F, f1, f2, {true, eps, eps});
}

// A with mu(A) >= theta - feas_tol and w(A) >= max_{mu(B) >= theta} w(B) - val_tol.
inline IndexSet opt_approx(const FamilyOracle& F, const std::vector<double>& mu, double theta,
                           const std::vector<double>& w, double feas_tol, double val_tol)
{
    // the unconstrained maximizer answers whenever it is nearly feasible
    if (auto top = F.max_weight(w); top && set_weight(mu, *top) >= theta - feas_tol) return *top;
    const auto pts = pareto_front(F, mu, w, {false, feas_tol, val_tol});
    const ParetoPoint* best = nullptr;
    for (const auto& p : pts) {
        if (p.f1 < theta - feas_tol) continue;
        if (!best || p.f2 > best->f2 || (p.f2 == best->f2 && detail::lex_less(p.set, best->set))) best = &p;
    }
    if (!best) throw Error("no approximately feasible set above the threshold");
    return best->set;
}

inline IndexSet opt_approx(const FamilyOracle& F, const std::vector<double>& mu, double theta,
                           const std::vector<double>& w, double eps)
{
    return opt_approx(F, mu, theta, w, eps, eps);
}

// true if mu_hat(O) - mu_hat(A) >= 2 eps for every A with mu_k(A) < theta;
// false if some A with mu_k(A) < theta - eps has mu_hat(O) - mu_hat(A) <= eps.
// Scans a Pareto front of (-mu_k, mu_hat) with cells eps/2 and eps/4 and
// rejects on any point below theta within 1.5 eps of O.
inline bool check_approx(const FamilyOracle& F, const IndexSet& o_hat, const std::vector<double>& mu_k,
                         const std::vector<double>& mu_hat, double theta, double eps)
{
    if (!(eps > 0.0)) throw Error("check_approx needs eps > 0");
    std::vector<double> neg(mu_k.size());
    for (std::size_t i = 0; i < mu_k.size(); ++i) neg[i] = -mu_k[i];
    const double top = set_weight(mu_hat, o_hat);
    for (const auto& p : pareto_front(F, neg, mu_hat, {false, eps / 2.0, eps / 4.0}))
        if (-p.f1 < theta && top - p.f2 < 1.5 * eps) return false;
    return true;
}

// Exactly one A in F with mu(A) >= theta?
inline bool unique_above(const FamilyOracle& F, const std::vector<double>& mu, double theta)
{
    const IndexSet best = F.argmax(mu);
    if (set_weight(mu, best) < theta) return false;
    if (F.kind() == FamilyKind::explicit_list && F.enumerate().size() == 1) return true;
    IndexSet second;
    try {
        second = F.second_best(mu);
    } catch (const Error&) {
        return true;  // single-member family
    }
    return set_weight(mu, second) < theta;
}

} // namespace cpe
