#pragma once

// Entropy, conditional entropy and conditional mutual information over exact
// finite joint PMFs. Axes are addressed by name; a joint outcome is one value
// per axis. Only outcomes with positive weight need to be stored.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "instance.hpp"

namespace cbcast {

inline constexpr double entropy_tolerance = 1e-9;

struct Axis {
    std::string name;
    std::size_t size = 0;
};

struct Outcome {
    std::vector<std::uint32_t> values;   // one per axis
    double weight = 0.0;
};

class JointPMF {
public:
    JointPMF() = default;

    JointPMF(std::vector<Axis> axes, std::vector<Outcome> outcomes)
        : axes_(std::move(axes)), outcomes_(std::move(outcomes)) {
        std::set<std::string> names;
        for (const auto& a : axes_)
            if (!names.insert(a.name).second) throw std::invalid_argument("duplicate axis name '" + a.name + "'");
        double sum = 0.0;
        for (const auto& o : outcomes_) {
            if (o.values.size() != axes_.size()) throw std::invalid_argument("outcome arity does not match axes");
            if (!(o.weight >= 0.0)) throw std::invalid_argument("negative outcome weight");
            for (std::size_t k = 0; k < axes_.size(); ++k)
                if (o.values[k] >= axes_[k].size)
                    throw std::invalid_argument("outcome value outside axis '" + axes_[k].name + "'");
            sum += o.weight;
        }
        if (std::abs(sum - 1.0) > pmf_sum_tolerance)
            throw std::invalid_argument("joint PMF weights sum to " + std::to_string(sum));
    }

    const std::vector<Axis>& axes() const noexcept { return axes_; }
    const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }

    std::size_t axis_index(const std::string& name) const {
        for (std::size_t k = 0; k < axes_.size(); ++k)
            if (axes_[k].name == name) return k;
        throw std::invalid_argument("unknown axis '" + name + "'");
    }

    std::vector<std::size_t> axis_indices(const std::vector<std::string>& names) const {
        std::vector<std::size_t> out;
        out.reserve(names.size());
        for (const auto& n : names) out.push_back(axis_index(n));
        return out;
    }

    /// Marginal over the given axis positions (duplicates collapse).
    std::map<std::vector<std::uint32_t>, double> marginal(std::vector<std::size_t> idx) const {
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        std::map<std::vector<std::uint32_t>, double> m;
        std::vector<std::uint32_t> key(idx.size());
        for (const auto& o : outcomes_) {
            if (o.weight <= 0.0) continue;
            for (std::size_t k = 0; k < idx.size(); ++k) key[k] = o.values[idx[k]];
            m[key] += o.weight;
        }
        return m;
    }

    /// New PMF with an extra axis whose value is a deterministic function of
    /// the existing outcome.
    JointPMF with_axis(const std::string& name, std::size_t size,
                       const std::function<std::uint32_t(const std::vector<std::uint32_t>&)>& fn) const {
        auto axes = axes_;
        axes.push_back({name, size});
        auto outs = outcomes_;
        for (auto& o : outs) o.values.push_back(fn(o.values));
        return JointPMF(std::move(axes), std::move(outs));
    }

private:
    std::vector<Axis> axes_;
    std::vector<Outcome> outcomes_;
};

inline double clamp_information(double v) {
    if (v < 0.0 && v >= -entropy_tolerance) return 0.0;
    return v;
}

inline void check_base(double base) {
    if (!(base > 1.0) || !std::isfinite(base)) throw std::invalid_argument("logarithm base must exceed 1");
}

/// Shannon entropy of a (possibly unnormalized) weight vector; weights are
/// normalized by their total.
template <typename Range>
double entropy_of_weights(const Range& weights, double base) {
    check_base(base);
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double w : weights) {
        if (w <= 0.0) continue;
        const double p = w / total;
        h -= p * std::log(p);
    }
    return clamp_information(h / std::log(base));
}

inline double entropy_of_marginal(const std::map<std::vector<std::uint32_t>, double>& m, double base) {
    std::vector<double> w;
    w.reserve(m.size());
    for (const auto& [k, v] : m) w.push_back(v);
    return entropy_of_weights(w, base);
}

/// Joint entropy of all axes.
inline double entropy(const JointPMF& pmf, double base) {
    std::vector<std::size_t> all(pmf.axes().size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    return entropy_of_marginal(pmf.marginal(all), base);
}

/// Joint entropy of the named axes.
inline double entropy(const JointPMF& pmf, const std::vector<std::string>& axes, double base) {
    return entropy_of_marginal(pmf.marginal(pmf.axis_indices(axes)), base);
}

/// H(target | given) = H(target, given) - H(given). Overlapping axes are
/// allowed (H(X|X) = 0).
inline double conditional_entropy(const JointPMF& pmf, const std::vector<std::string>& target,
                                  const std::vector<std::string>& given, double base) {
    check_base(base);
    auto t = pmf.axis_indices(target);
    const auto g = pmf.axis_indices(given);
    t.insert(t.end(), g.begin(), g.end());
    const double joint = entropy_of_marginal(pmf.marginal(t), base);
    const double cond = entropy_of_marginal(pmf.marginal(g), base);
    return std::max(0.0, clamp_information(joint - cond));
}

/// I(A; B | C) = H(A,C) + H(B,C) - H(A,B,C) - H(C). Axis groups must be disjoint.
inline double conditional_mutual_information(const JointPMF& pmf, const std::vector<std::string>& a,
                                             const std::vector<std::string>& b, const std::vector<std::string>& c,
                                             double base) {
    check_base(base);
    const auto ia = pmf.axis_indices(a);
    const auto ib = pmf.axis_indices(b);
    const auto ic = pmf.axis_indices(c);
    std::set<std::size_t> seen;
    for (const auto* group : {&ia, &ib, &ic})
        for (auto k : *group)
            if (!seen.insert(k).second)
                throw std::invalid_argument("axis '" + pmf.axes()[k].name + "' appears in more than one group");
    auto cat = [](std::vector<std::size_t> x, const std::vector<std::size_t>& y) {
        x.insert(x.end(), y.begin(), y.end());
        return x;
    };
    const double hac = entropy_of_marginal(pmf.marginal(cat(ia, ic)), base);
    const double hbc = entropy_of_marginal(pmf.marginal(cat(ib, ic)), base);
    const double habc = entropy_of_marginal(pmf.marginal(cat(cat(ia, ib), ic)), base);
    const double hc = entropy_of_marginal(pmf.marginal(ic), base);
    const double v = clamp_information(hac + hbc - habc - hc);
    if (v < -entropy_tolerance) throw std::logic_error("negative conditional mutual information");
    return v;
}

/// Axis name of dataset j (1-based).
inline std::string dataset_axis(int j) { return "X" + std::to_string(j); }

inline std::vector<std::string> dataset_axes(const std::vector<int>& coords) {
    std::vector<std::string> out;
    for (int c : coords) out.push_back(dataset_axis(c));
    return out;
}

inline std::vector<std::string> all_dataset_axes(int n) {
    std::vector<std::string> out;
    for (int j = 1; j <= n; ++j) out.push_back(dataset_axis(j));
    return out;
}

/// Source law of an instance as a JointPMF on axes X1..XN (support only).
inline JointPMF source_pmf(const Instance& inst) {
    const auto sp = inst.space();
    std::vector<Axis> axes;
    for (int j = 1; j <= inst.n_datasets; ++j) axes.push_back({dataset_axis(j), static_cast<std::size_t>(inst.q)});
    std::vector<Outcome> outs;
    for (TupleId t : support(inst)) {
        Outcome o;
        for (int d : sp.digits(t)) o.values.push_back(static_cast<std::uint32_t>(d));
        o.weight = inst.pmf[t];
        outs.push_back(std::move(o));
    }
    return JointPMF(std::move(axes), std::move(outs));
}

/// Adds one axis per demand ("F1".."FK") to the source law.
inline JointPMF with_demands(const Instance& inst, JointPMF pmf) {
    const auto sp = inst.space();
    for (std::size_t i = 0; i < inst.users.size(); ++i) {
        const auto& table = inst.users[i].demand;
        pmf = pmf.with_axis("F" + std::to_string(i + 1), static_cast<std::size_t>(inst.q),
                            [&](const std::vector<std::uint32_t>& v) {
                                std::vector<int> d(v.begin(), v.begin() + inst.n_datasets);
                                return static_cast<std::uint32_t>(table(sp.encode(d)));
                            });
    }
    return pmf;
}

/// Materializes P(w, x) = P(x) P(w | x). `channel[k]` is the row for the
/// k-th outcome of `source`; the new axis is prepended under `label_axis`.
inline JointPMF push_channel(const JointPMF& source, const std::vector<std::vector<double>>& channel,
                             const std::string& label_axis = "W") {
    if (channel.size() != source.outcomes().size())
        throw std::invalid_argument("channel needs one row per source outcome");
    std::size_t labels = 0;
    for (const auto& row : channel) labels = std::max(labels, row.size());
    std::vector<Axis> axes{{label_axis, labels}};
    axes.insert(axes.end(), source.axes().begin(), source.axes().end());
    std::vector<Outcome> outs;
    for (std::size_t k = 0; k < channel.size(); ++k) {
        double sum = 0.0;
        for (double w : channel[k]) {
            if (!(w >= 0.0)) throw std::invalid_argument("channel row " + std::to_string(k) + " has a negative entry");
            sum += w;
        }
        if (std::abs(sum - 1.0) > entropy_tolerance)
            throw std::invalid_argument("channel row " + std::to_string(k) + " sums to " + std::to_string(sum));
        for (std::size_t w = 0; w < channel[k].size(); ++w) {
            if (channel[k][w] <= 0.0) continue;
            Outcome o;
            o.values.push_back(static_cast<std::uint32_t>(w));
            o.values.insert(o.values.end(), source.outcomes()[k].values.begin(), source.outcomes()[k].values.end());
            o.weight = source.outcomes()[k].weight * channel[k][w];
            outs.push_back(std::move(o));
        }
    }
    return JointPMF(std::move(axes), std::move(outs));
}

inline std::string unit_name(double base, int q) {
    if (std::abs(base - 2.0) < 1e-12) return "bits";
    if (std::abs(base - q) < 1e-12) return "q-ary symbols";
    char buf[64];
    std::snprintf(buf, sizeof buf, "base-%g units", base);
    return buf;
}

} // namespace cbcast
