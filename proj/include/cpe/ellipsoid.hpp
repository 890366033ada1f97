#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "oracles.hpp"
#include "pareto.hpp"

namespace cpe {

// {A in F : means(A) >= theta}, never materialized by the algorithms.
struct ThresholdFamily {
    std::vector<double> means;
    double theta = 0.0;

    bool contains(const IndexSet& a) const { return set_weight(means, a) >= theta; }
    std::vector<IndexSet> members(const FamilyOracle& F) const
    {
        std::vector<IndexSet> out;
        for (const auto& a : F.enumerate())
            if (contains(a)) out.push_back(a);
        return out;
    }
};

struct LinearCut {
    Eigen::VectorXd a;  // a . y <= beta
    double beta = 0.0;
};

struct EllipsoidOptions {
    double rel_gap = 0.02;
    double cap_factor = 16.0;  // iteration cap = cap_factor d^2 ln(1e6)
};

struct EllipsoidResult {
    std::vector<double> y;
    double value = 0.0;
    int iterations = 0;
    int cuts = 0;
    bool converged = false;
};

// min sum_i 1/y_i over {0 < y <= 1} intersected with whatever the oracle
// cuts away. The oracle sees a point in the box and returns a violated
// inequality or nothing. Deep cuts for constraints, central cuts on the
// objective gradient; stops once the linear lower bound at a feasible
// center is within rel_gap of its value.
inline EllipsoidResult minimize_inverse_sum(int d, const std::function<std::optional<LinearCut>(const Eigen::VectorXd&)>& oracle,
                                            EllipsoidOptions opt = {})
{
    if (d < 1) throw Error("ellipsoid needs at least one variable");
    EllipsoidResult res;
    const int cap = static_cast<int>(std::ceil(opt.cap_factor * d * d * std::log(1e6)));
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_y;

    auto box_cut = [d](const Eigen::VectorXd& c) -> std::optional<LinearCut> {
        for (int i = 0; i < d; ++i) {
            if (c(i) <= 0.0) {
                LinearCut cut{Eigen::VectorXd::Zero(d), 0.0};
                cut.a(i) = -1.0;
                return cut;
            }
            if (c(i) > 1.0) {
                LinearCut cut{Eigen::VectorXd::Zero(d), 1.0};
                cut.a(i) = 1.0;
                return cut;
            }
        }
        return std::nullopt;
    };

    if (d == 1) {
        double lo = 0.0, hi = 1.0;
        while (res.iterations < cap) {
            ++res.iterations;
            const double c = 0.5 * (lo + hi);
            Eigen::VectorXd y(1);
            y(0) = c;
            if (auto cut = oracle(y)) {
                ++res.cuts;
                const double a = cut->a(0);
                if (a > 0.0) hi = std::min(hi, cut->beta / a);
                else if (a < 0.0) lo = std::max(lo, cut->beta / a);
                else if (cut->beta < 0.0) throw Error("ellipsoid: no feasible point");
                if (hi <= lo) throw Error("ellipsoid: no feasible point");
                continue;
            }
            if (1.0 / c < best) {
                best = 1.0 / c;
                best_y = y;
            }
            lo = c;
            if (hi - lo <= opt.rel_gap * c) {
                res.converged = true;
                break;
            }
        }
    } else {
        Eigen::VectorXd c = Eigen::VectorXd::Constant(d, 1.0 / d);
        const double R = 10.0 * d;
        Eigen::MatrixXd P = Eigen::MatrixXd::Identity(d, d) * (R * R);
        const double dd = d;
        while (res.iterations < cap) {
            ++res.iterations;
            Eigen::VectorXd a;
            double alpha = 0.0;
            auto cut = box_cut(c);
            if (!cut) cut = oracle(c);
            if (cut) {
                ++res.cuts;
                a = cut->a;
                const double s = std::sqrt(std::max(0.0, a.dot(P * a)));
                if (!(s > 0.0)) throw Error("ellipsoid: degenerate cut");
                alpha = (a.dot(c) - cut->beta) / s;
                if (alpha >= 1.0) throw Error("ellipsoid: no feasible point");
                alpha = std::max(alpha, 0.0);
            } else {
                a = -c.array().square().inverse().matrix();  // objective gradient
                const double f = c.array().inverse().sum();
                if (f < best) {
                    best = f;
                    best_y = c;
                }
                const double s = std::sqrt(std::max(0.0, a.dot(P * a)));
                if (s <= opt.rel_gap * f) {
                    res.converged = true;
                    break;
                }
            }
            const Eigen::VectorXd Pa = P * a;
            const double s = std::sqrt(a.dot(Pa));
            const Eigen::VectorXd b = Pa / s;
            const double tau = (1.0 + dd * alpha) / (dd + 1.0);
            const double sigma = 2.0 * (1.0 + dd * alpha) / ((dd + 1.0) * (1.0 + alpha));
            const double scale = dd * dd * (1.0 - alpha * alpha) / (dd * dd - 1.0);
            c -= tau * b;
            P = scale * (P - sigma * b * b.transpose());
            P = 0.5 * (P + P.transpose());
        }
    }
    if (!std::isfinite(best)) throw Error("ellipsoid: iteration cap reached without a feasible point");
    res.y.assign(best_y.data(), best_y.data() + d);
    res.value = best;
    return res;
}

// Outcome of one separation query. `cut` is the one-sided difference whose
// inverse-count sum exceeded the tightened bound.
struct Separation {
    bool violated = false;
    IndexSet a, b;
    IndexSet cut;
    double value = 0.0;  // larger of the two one-sided maxima found
};

namespace detail {

inline double inverse_sum(const std::vector<double>& inv, const IndexSet& s)
{
    double t = 0.0;
    for (int i : s) t += inv[i];
    return t;
}

// O = argmax mu; O1 approximately maximizes inv(O \ O1), O2 approximately
// maximizes inv(O2 \ O), both over sets with mu >= theta_high (relaxed to
// theta_low). The cut bound is limit = bound/4 - bound/400.
inline Separation separate_inverse(const FamilyOracle& F, const std::vector<double>& mu, double theta_high,
                                   double theta_low, const std::vector<double>& inv, double bound)
{
    if (!(theta_low < theta_high)) throw Error("separation needs theta_low < theta_high");
    const IndexSet O = F.argmax(mu);
    if (set_weight(mu, O) < theta_high) throw Error("no set clears the upper threshold");
    const std::size_t n = F.arms();
    const double val_tol = bound / 400.0;
    const double limit = bound / 4.0 - val_tol;
    std::vector<char> in_o(n, 0);
    for (int i : O) in_o[i] = 1;
    std::vector<double> w1(n), w2(n);
    for (std::size_t i = 0; i < n; ++i) {
        w1[i] = in_o[i] ? -inv[i] : 0.0;
        w2[i] = in_o[i] ? 0.0 : inv[i];
    }
    const double tol = theta_high - theta_low;
    Separation s;
    const IndexSet O1 = opt_approx(F, mu, theta_high, w1, tol, val_tol);
    const IndexSet d1 = set_minus(O, O1);
    const double a1 = inverse_sum(inv, d1);
    const IndexSet O2 = opt_approx(F, mu, theta_high, w2, tol, val_tol);
    const IndexSet d2 = set_minus(O2, O);
    const double a2 = inverse_sum(inv, d2);
    s.value = std::max(a1, a2);
    if (a1 > limit && a1 >= a2) {
        s.violated = true;
        s.a = O;
        s.b = O1;
        s.cut = d1;
    } else if (a2 > limit) {
        s.violated = true;
        s.a = O;
        s.b = O2;
        s.cut = d2;
    }
    return s;
}

// Arms that differ between two members of the relaxed family (or between
// `anchor` and a member, when an anchor is given).
inline std::vector<int> constrained_arms(const FamilyOracle& F, const std::vector<double>& mu, double theta_high,
                                         double theta_low, const IndexSet* anchor)
{
    const std::size_t n = F.arms();
    const double tol = theta_high - theta_low;
    std::vector<int> out;
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = 1.0;
        const bool can_have = contains(opt_approx(F, mu, theta_high, w, tol, 0.5), static_cast<int>(i));
        w[i] = -1.0;
        const bool can_miss = !contains(opt_approx(F, mu, theta_high, w, tol, 0.5), static_cast<int>(i));
        w[i] = 0.0;
        bool used;
        if (anchor) used = contains(*anchor, static_cast<int>(i)) ? can_miss : can_have;
        else used = can_have && can_miss;
        if (used) out.push_back(static_cast<int>(i));
    }
    return out;
}

} // namespace detail

// Approximate separation for the pairwise program over {mu >= theta_high}.
// `m` is a candidate allocation; arms with m_i = 0 count as unconstrained.
// A feasible verdict guarantees sum_{A xor B} 1/m_i <= bound for every pair
// clearing theta_high. A violation is reported whenever some pair of the
// relaxed family {mu >= theta_low} exceeds about bound/4 on one side.
inline Separation separation_2approx(const FamilyOracle& F, const std::vector<double>& mu, double theta_high,
                                     double theta_low, const std::vector<double>& m, double bound)
{
    if (m.size() != F.arms() || mu.size() != F.arms()) throw Error("separation: vector length mismatch");
    if (!(bound > 0.0)) throw Error("separation needs a positive bound");
    std::vector<double> inv(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] < 0.0) throw Error("separation: negative sample count");
        if (m[i] > 0.0) inv[i] = 1.0 / m[i];
    }
    return detail::separate_inverse(F, mu, theta_high, theta_low, inv, bound);
}

// Solution of the pairwise program with bound 1, in inverse-count units
// (y_i = 1/m_i); zero for arms no pair separates. Any bound b rescales it:
// m_i = 1 / (b y_i).
struct NormalizedAllocation {
    std::vector<double> y;
    int iterations = 0;
    int cuts = 0;

    Allocation scaled(double bound) const
    {
        Allocation a;
        a.budget.assign(y.size(), 0.0);
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] > 0.0) a.budget[i] = 1.0 / (bound * y[i]);
        return a;
    }
};

inline NormalizedAllocation ellipsoid_simult(const FamilyOracle& F, const std::vector<double>& mu, double theta_high,
                                             double theta_low, EllipsoidOptions opt = {})
{
    NormalizedAllocation out;
    out.y.assign(F.arms(), 0.0);
    const auto arms = detail::constrained_arms(F, mu, theta_high, theta_low, nullptr);
    if (arms.empty()) return out;
    const int d = static_cast<int>(arms.size());
    std::vector<int> slot(F.arms(), -1);
    for (int j = 0; j < d; ++j) slot[arms[j]] = j;
    std::vector<double> inv(F.arms(), 0.0);
    auto oracle = [&](const Eigen::VectorXd& y) -> std::optional<LinearCut> {
        for (int j = 0; j < d; ++j) inv[arms[j]] = y(j);
        const auto s = detail::separate_inverse(F, mu, theta_high, theta_low, inv, 1.0);
        if (!s.violated) return std::nullopt;
        LinearCut cut{Eigen::VectorXd::Zero(d), 1.0 / 4.0 - 1.0 / 400.0};
        for (int i : s.cut)
            if (slot[i] >= 0) cut.a(slot[i]) = 1.0;
        return cut;
    };
    const auto res = minimize_inverse_sum(d, oracle, opt);
    for (int j = 0; j < d; ++j) out.y[arms[j]] = res.y[j];
    out.iterations = res.iterations;
    out.cuts = res.cuts;
    return out;
}

// One round's worth of Verify constraints: every A in {mu >= theta_high}
// (relaxed to theta_low) needs sum_{O xor A} 1/m_i <= bound.
struct VerifyBlock {
    ThresholdFamily family;
    double theta_low = 0.0;
    double bound = 0.0;
};

inline Allocation ellipsoid_verify(const FamilyOracle& F, const IndexSet& o_hat, const std::vector<VerifyBlock>& blocks,
                                   EllipsoidOptions opt = {}, int* iterations = nullptr)
{
    Allocation out;
    out.budget.assign(F.arms(), 0.0);
    if (blocks.empty()) return out;
    double bmax = 0.0;
    for (const auto& b : blocks) {
        if (!(b.bound > 0.0)) throw Error("verify: bounds must be positive");
        bmax = std::max(bmax, b.bound);
    }
    std::vector<char> used(F.arms(), 0);
    for (const auto& b : blocks)
        for (int i : detail::constrained_arms(F, b.family.means, b.family.theta, b.theta_low, &o_hat)) used[i] = 1;
    std::vector<int> arms;
    for (std::size_t i = 0; i < F.arms(); ++i)
        if (used[i]) arms.push_back(static_cast<int>(i));
    if (arms.empty()) return out;
    const int d = static_cast<int>(arms.size());
    std::vector<char> in_o(F.arms(), 0);
    for (int i : o_hat) in_o[i] = 1;
    std::vector<double> w(F.arms(), 0.0);
    auto oracle = [&](const Eigen::VectorXd& y) -> std::optional<LinearCut> {
        double base = 0.0;
        std::fill(w.begin(), w.end(), 0.0);
        for (int j = 0; j < d; ++j) {
            const int i = arms[j];
            w[i] = in_o[i] ? -y(j) : y(j);
            if (in_o[i]) base += y(j);
        }
        for (const auto& b : blocks) {
            const double beta = b.bound / bmax;
            const IndexSet A = opt_approx(F, b.family.means, b.family.theta, w, b.family.theta - b.theta_low, 0.01 * beta);
            if (base + set_weight(w, A) <= 0.99 * beta) continue;
            LinearCut cut{Eigen::VectorXd::Zero(d), 0.99 * beta};
            for (int i : symmetric_difference(o_hat, A)) {
                const auto it = std::lower_bound(arms.begin(), arms.end(), i);
                if (it != arms.end() && *it == i) cut.a(it - arms.begin()) = 1.0;
            }
            return cut;
        }
        return std::nullopt;
    };
    const auto res = minimize_inverse_sum(d, oracle, opt);
    for (int j = 0; j < d; ++j) out.budget[arms[j]] = 1.0 / (bmax * res.y[j]);
    if (iterations) *iterations = res.iterations;
    return out;
}

} // namespace cpe
