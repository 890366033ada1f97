#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "core.hpp"
#include "instance.hpp"
#include "nnls.hpp"

namespace cpe {

// a . x >= b
struct Halfspace {
    std::vector<double> a;
    double b = 0.0;
};

struct SqDist {
    double value = 0.0;
    std::vector<double> argmin;
};

namespace detail {

// min sum_i w_i (x_i - c_i)^2 over {x : a_j . x >= b_j}. With
// z = W^1/2 (x - c) this is the least-distance program min |z| s.t. Ez >= r,
// E_j = a_j W^-1/2, r_j = b_j - a_j . c, solved through the NNLS problem
// min |[E'; r'] u - e_{n+1}|, u >= 0 (Lawson-Hanson): with residual q,
// z = -q_{1..n} / q_{n+1}. Zero weights are floored at 1e-9 max(w).
inline SqDist project_polyhedron(const std::vector<Halfspace>& hs, const std::vector<double>& w,
                                 const std::vector<double>& c)
{
    const std::size_t n = c.size();
    double wmax = 0.0;
    for (double v : w) wmax = std::max(wmax, v);
    if (!(wmax > 0.0)) return {0.0, c};

    auto slack = [&](const Halfspace& h, const std::vector<double>& x) {
        double s = -h.b;
        for (std::size_t i = 0; i < n; ++i) s += h.a[i] * x[i];
        return s;
    };
    bool inside = true;
    for (const auto& h : hs) inside = inside && slack(h, c) >= 0.0;
    if (inside) return {0.0, c};

    double scale = 1.0;
    for (const auto& h : hs) {
        scale = std::max(scale, std::abs(h.b));
        for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(h.a[i] * c[i]));
    }

    const Eigen::Index m = static_cast<Eigen::Index>(hs.size());
    const Eigen::Index d = static_cast<Eigen::Index>(n);
    Eigen::VectorXd winv(d), rootw(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        winv(i) = 1.0 / std::max(w[i], 1e-9 * wmax);
        rootw(i) = std::sqrt(winv(i));
    }
    Eigen::MatrixXd M(d + 1, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        double r = hs[j].b;
        for (Eigen::Index i = 0; i < d; ++i) {
            M(i, j) = hs[j].a[i] * rootw(i);
            r -= hs[j].a[i] * c[i];
        }
        M(d, j) = r;
        const double nrm = M.col(j).norm();
        if (nrm > 0.0) M.col(j) /= nrm;
    }
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d + 1);
    e(d) = 1.0;
    const Eigen::VectorXd u = detail::nnls(M, e);
    const Eigen::VectorXd q = M * u - e;
    if (!(q.norm() > 1e-12) || !(q(d) < 0.0)) throw Error("polyhedron is empty");

    std::vector<double> xs(n);
    for (Eigen::Index i = 0; i < d; ++i) xs[i] = c[i] - q(i) / q(d) * rootw(i);
    double worst = 0.0;
    for (const auto& h : hs) worst = std::max(worst, -slack(h, xs));
    if (worst > 1e-8 * scale) throw Error("polyhedron projection did not converge");
    // land exactly in the closure when rounding left a hair of violation
    if (worst > 0.0) {
        for (int pass = 0; pass < 3 && worst > 0.0; ++pass) {
            for (const auto& h : hs) {
                const double v = -slack(h, xs);
                if (v <= 0.0) continue;
                double nn = 0.0;
                for (std::size_t i = 0; i < n; ++i) nn += h.a[i] * h.a[i] * winv(i);
                for (std::size_t i = 0; i < n; ++i) xs[i] += 2.0 * v * h.a[i] * winv(i) / nn;
            }
            worst = 0.0;
            for (const auto& h : hs) worst = std::max(worst, -slack(h, xs));
        }
    }
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) value += w[i] * (xs[i] - c[i]) * (xs[i] - c[i]);
    return {value, xs};
}

} // namespace detail

class AnswerRegion {
public:
    enum class Kind { polyhedron, top_set, threshold_count, point_set };

    static AnswerRegion polyhedron(std::vector<Halfspace> hs, std::size_t n)
    {
        for (const auto& h : hs)
            if (h.a.size() != n) throw Error("halfspace dimension mismatch");
        AnswerRegion r(Kind::polyhedron, n);
        r.halfspaces_ = std::move(hs);
        return r;
    }

    // {x : x(S) > x(T) for every other T in the family}
    static AnswerRegion top_set(IndexSet s, const std::vector<IndexSet>& family, std::size_t n)
    {
        AnswerRegion r(Kind::top_set, n);
        r.set_ = make_set(std::move(s));
        for (const auto& t : family) {
            IndexSet tt = make_set(t);
            if (tt == r.set_) continue;
            Halfspace h{std::vector<double>(n, 0.0), 0.0};
            for (int i : r.set_) h.a.at(i) += 1.0;
            for (int i : tt) h.a.at(i) -= 1.0;
            r.halfspaces_.push_back(std::move(h));
        }
        return r;
    }

    // {x : #{i : x_i > theta} == j}
    static AnswerRegion threshold_count(double theta, int j, std::size_t n)
    {
        if (j < 0 || static_cast<std::size_t>(j) > n) throw Error("threshold count out of range");
        AnswerRegion r(Kind::threshold_count, n);
        r.theta_ = theta;
        r.count_ = j;
        return r;
    }

    static AnswerRegion point_set(std::vector<std::vector<double>> pts, std::size_t n)
    {
        if (pts.empty()) throw Error("point set region needs points");
        for (const auto& p : pts)
            if (p.size() != n) throw Error("point dimension mismatch");
        AnswerRegion r(Kind::point_set, n);
        r.points_ = std::move(pts);
        return r;
    }

    Kind kind() const { return kind_; }
    std::size_t dim() const { return n_; }
    const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
    const IndexSet& top() const { return set_; }
    double theta() const { return theta_; }
    int count() const { return count_; }
    const std::vector<std::vector<double>>& points() const { return points_; }

    bool contains(const std::vector<double>& x) const
    {
        switch (kind_) {
        case Kind::polyhedron:
            for (const auto& h : halfspaces_) {
                double s = 0.0;
                for (std::size_t i = 0; i < n_; ++i) s += h.a[i] * x[i];
                if (s < h.b) return false;
            }
            return true;
        case Kind::top_set:
            for (const auto& h : halfspaces_) {
                double s = 0.0;
                for (std::size_t i = 0; i < n_; ++i) s += h.a[i] * x[i];
                if (!(s > 0.0)) return false;
            }
            return true;
        case Kind::threshold_count: {
            int above = 0;
            for (double v : x) {
                if (v == theta_) return false;
                above += v > theta_;
            }
            return above == count_;
        }
        case Kind::point_set:
            for (const auto& p : points_) {
                bool eq = true;
                for (std::size_t i = 0; i < n_; ++i) eq = eq && std::abs(p[i] - x[i]) <= 1e-12;
                if (eq) return true;
            }
            return false;
        }
        return false;
    }

    // min over the closure of sum_i w_i (y_i - c_i)^2
    SqDist min_sqdist(const std::vector<double>& w, const std::vector<double>& c) const
    {
        if (w.size() != n_ || c.size() != n_) throw Error("region query dimension mismatch");
        for (double v : w)
            if (v < 0.0) throw Error("region query weights must be nonnegative");
        switch (kind_) {
        case Kind::polyhedron:
        case Kind::top_set: return detail::project_polyhedron(halfspaces_, w, c);
        case Kind::threshold_count: return snap_threshold(w, c);
        case Kind::point_set: {
            SqDist best{std::numeric_limits<double>::infinity(), {}};
            for (const auto& p : points_) {
                double v = 0.0;
                for (std::size_t i = 0; i < n_; ++i) v += w[i] * (p[i] - c[i]) * (p[i] - c[i]);
                if (v < best.value) best = {v, p};
            }
            return best;
        }
        }
        return {};
    }

private:
    AnswerRegion(Kind k, std::size_t n) : kind_(k), n_(n) {}

    // Closure: j coordinates >= theta and the rest <= theta. Raise the j
    // coordinates whose raise-minus-lower cost is smallest.
    SqDist snap_threshold(const std::vector<double>& w, const std::vector<double>& c) const
    {
        std::vector<double> up(n_), down(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const double du = std::max(0.0, theta_ - c[i]);
            const double dd = std::max(0.0, c[i] - theta_);
            up[i] = w[i] * du * du;
            down[i] = w[i] * dd * dd;
        }
        std::vector<std::size_t> order(n_);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return up[a] - down[a] < up[b] - down[b]; });
        SqDist out{0.0, c};
        for (std::size_t r = 0; r < n_; ++r) {
            const std::size_t i = order[r];
            if (static_cast<int>(r) < count_) {
                out.value += up[i];
                out.argmin[i] = std::max(c[i], theta_);
            } else {
                out.value += down[i];
                out.argmin[i] = std::min(c[i], theta_);
            }
        }
        return out;
    }

    Kind kind_;
    std::size_t n_;
    std::vector<Halfspace> halfspaces_;
    IndexSet set_;
    double theta_ = 0.0;
    int count_ = 0;
    std::vector<std::vector<double>> points_;
};

class GeneralSampInstance {
public:
    GeneralSampInstance(MeanProfile profile, std::vector<AnswerRegion> regions)
        : profile_(std::move(profile)), regions_(std::move(regions))
    {
        if (regions_.size() < 2) throw Error("instance needs at least two answer regions");
        for (const auto& r : regions_)
            if (r.dim() != profile_.size()) throw Error("region dimension does not match the number of arms");
        for (std::size_t k = 0; k < regions_.size(); ++k) {
            if (!regions_[k].contains(profile_.values())) continue;
            if (answer_ >= 0) throw Error("mean profile lies in more than one answer region");
            answer_ = static_cast<int>(k);
        }
        if (answer_ < 0) throw Error("mean profile lies in no answer region");
    }

    const MeanProfile& profile() const { return profile_; }
    const std::vector<AnswerRegion>& regions() const { return regions_; }
    int answer() const { return answer_; }
    std::size_t arms() const { return profile_.size(); }

private:
    MeanProfile profile_;
    std::vector<AnswerRegion> regions_;
    int answer_ = -1;
};

// Best-Set instance as General-Samp: one top-set region per family member.
inline GeneralSampInstance to_general(const BestSetInstance& inst)
{
    const auto& fam = inst.family().enumerate();
    std::vector<AnswerRegion> regions;
    regions.reserve(fam.size());
    for (const auto& s : fam) regions.push_back(AnswerRegion::top_set(s, fam, inst.arms()));
    return {inst.profile(), std::move(regions)};
}

} // namespace cpe
