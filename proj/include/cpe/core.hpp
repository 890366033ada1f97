#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpe {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sorted, duplicate-free list of arm indices.
using IndexSet = std::vector<int>;

inline IndexSet make_set(std::vector<int> elems)
{
    std::sort(elems.begin(), elems.end());
    elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
    return elems;
}

inline IndexSet symmetric_difference(const IndexSet& a, const IndexSet& b)
{
    IndexSet out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline IndexSet set_minus(const IndexSet& a, const IndexSet& b)
{
    IndexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline bool contains(const IndexSet& s, int i)
{
    return std::binary_search(s.begin(), s.end(), i);
}

inline std::string set_to_string(const IndexSet& s)
{
    std::string out;
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (j) out += ';';
        out += std::to_string(s[j]);
    }
    return out;
}

class MeanProfile {
public:
    MeanProfile() = default;
    explicit MeanProfile(std::vector<double> means) : means_(std::move(means))
    {
        if (means_.empty()) throw Error("mean profile needs at least one arm");
        for (double m : means_)
            if (!std::isfinite(m)) throw Error("mean profile entries must be finite");
    }

    std::size_t size() const { return means_.size(); }
    double operator[](std::size_t i) const { return means_[i]; }
    const std::vector<double>& values() const { return means_; }

private:
    std::vector<double> means_;
};

inline double set_weight(const std::vector<double>& w, const IndexSet& set)
{
    double s = 0.0;
    for (int i : set) {
        if (i < 0 || static_cast<std::size_t>(i) >= w.size()) throw Error("arm index out of range");
        s += w[i];
    }
    return s;
}

inline double set_weight(const MeanProfile& mu, const IndexSet& set)
{
    return set_weight(mu.values(), set);
}

// Per-arm sample budget. Entries are real; pulling uses their ceilings.
struct Allocation {
    std::vector<double> budget;

    double total() const
    {
        double s = 0.0;
        for (double b : budget) s += b;
        return s;
    }

    std::vector<std::uint64_t> ceiled() const
    {
        std::vector<std::uint64_t> c(budget.size());
        for (std::size_t i = 0; i < budget.size(); ++i) {
            if (budget[i] < 0 || !std::isfinite(budget[i])) throw Error("allocation entry must be finite and nonnegative");
            c[i] = static_cast<std::uint64_t>(std::ceil(budget[i]));
        }
        return c;
    }
};

// Empirical means from one batch of fresh samples. values[i] is meaningful
// only where counts[i] > 0; elsewhere it holds 0 so that set weights over
// arms shared by every compared set cancel.
struct EmpiricalMeans {
    std::vector<double> values;
    std::vector<std::uint64_t> counts;

    static EmpiricalMeans from_sums(const std::vector<double>& sums, const std::vector<std::uint64_t>& counts)
    {
        EmpiricalMeans e;
        e.counts = counts;
        e.values.assign(sums.size(), 0.0);
        for (std::size_t i = 0; i < sums.size(); ++i)
            if (counts[i] > 0) e.values[i] = sums[i] / static_cast<double>(counts[i]);
        return e;
    }

    bool defined(std::size_t i) const { return counts[i] > 0; }
};

// Unit-variance Gaussian arms. Each arm has its own engine seeded from
// (seed, arm), so the draws of one arm never depend on how others are pulled.
class GaussianEnvironment {
public:
    GaussianEnvironment(MeanProfile profile, std::uint64_t seed)
        : profile_(std::move(profile)), seed_(seed), pulls_(profile_.size(), 0)
    {
        engines_.reserve(profile_.size());
        for (std::size_t i = 0; i < profile_.size(); ++i) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(i), 0x9e3779b9u};
            engines_.emplace_back(seq);
        }
    }

    std::size_t arms() const { return profile_.size(); }
    const MeanProfile& profile() const { return profile_; }
    std::uint64_t seed() const { return seed_; }

    double pull(std::size_t arm)
    {
        ++pulls_.at(arm);
        ++total_;
        return profile_[arm] + normal_(engines_[arm]);
    }

    // Sum of `count` fresh draws of one arm. The sum of c i.i.d. N(mu,1)
    // variables is N(c*mu, c), so it is drawn in one step; every one of the
    // c pulls is still charged.
    double pull_sum(std::size_t arm, std::uint64_t count)
    {
        if (count == 0) return 0.0;
        pulls_.at(arm) += count;
        total_ += count;
        const double c = static_cast<double>(count);
        return c * profile_[arm] + std::sqrt(c) * normal_(engines_[arm]);
    }

    std::vector<double> sample_sums(const std::vector<std::uint64_t>& counts)
    {
        if (counts.size() != arms()) throw Error("sample request has wrong length");
        std::vector<double> sums(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) sums[i] = pull_sum(i, counts[i]);
        return sums;
    }

    const std::vector<std::uint64_t>& pulls() const { return pulls_; }
    std::uint64_t total_pulls() const { return total_; }

private:
    MeanProfile profile_;
    std::uint64_t seed_;
    std::vector<std::mt19937_64> engines_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::vector<std::uint64_t> pulls_;
    std::uint64_t total_ = 0;
};

// 2^{-(r+1)} < gap <= 2^{-r}; gaps above 1 go to group 0.
inline int group_index(double gap)
{
    if (!(gap > 0.0)) throw Error("group_index needs a positive gap");
    if (gap > 1.0) return 0;
    int e = 0;
    double m = std::frexp(gap, &e);  // gap = m * 2^e, m in [0.5, 1)
    // gap in (2^{e-1}, 2^e) unless m == 0.5, where gap == 2^{e-1} exactly
    return m == 0.5 ? 1 - e : -e;
}

// Deterministic sub-seed for independent streams (splitmix64 mixing).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace cpe
