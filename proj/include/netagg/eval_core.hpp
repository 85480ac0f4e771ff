#pragma once

// Aggregation operators over flat evaluation vectors: weakest element (WEM),
// weighted linear aggregation (WLAM), nonlinear aggregation (NAM), the grouped
// hybrid, adequacy ratios, and checkers for the ordering theorems.

#include "netagg/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace netagg {

/// Admissible evaluation interval [min, max]. Only nonnegative scales are
/// accepted: the NAM ordering results rest on AM-GM.
class Scale {
public:
    Scale() = default;

    Scale(double min, double max) : min_(min), max_(max) {
        if (!std::isfinite(min) || !std::isfinite(max))
            throw Error("scale bounds must be finite");
        if (!(min < max))
            throw Error("scale min must be strictly below max");
        if (min < 0.0)
            throw Error("scale min must be >= 0; remap the scale affinely onto [0,100]");
    }

    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }
    bool contains(double v) const noexcept { return v >= min_ && v <= max_; }

    friend bool operator==(const Scale&, const Scale&) = default;

private:
    double min_ = 0.0;
    double max_ = 100.0;
};

struct Evaluation {
    std::string id;
    double value = 0.0;

    friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

/// Per-element quality scores. Non-empty, unique ids, every value on the scale.
class EvaluationVector {
public:
    EvaluationVector(std::vector<Evaluation> entries, Scale scale = {})
        : entries_(std::move(entries)), scale_(scale) {
        if (entries_.empty())
            throw Error("empty system");
        std::unordered_set<std::string_view> seen;
        for (const auto& e : entries_) {
            if (!seen.insert(e.id).second)
                throw Error("duplicate element id '" + e.id + "'");
            if (!std::isfinite(e.value) || !scale_.contains(e.value))
                throw Error("evaluation of '" + e.id + "' = " + std::to_string(e.value) +
                            " lies outside the scale");
        }
    }

    /// Ids are generated as s1..sN.
    static EvaluationVector from_values(std::span<const double> values, Scale scale = {}) {
        std::vector<Evaluation> entries;
        entries.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            entries.push_back({"s" + std::to_string(i + 1), values[i]});
        return EvaluationVector(std::move(entries), scale);
    }

    static EvaluationVector from_values(std::initializer_list<double> values, Scale scale = {}) {
        return from_values(std::span<const double>(values.begin(), values.size()), scale);
    }

    std::span<const Evaluation> entries() const noexcept { return entries_; }
    const Scale& scale() const noexcept { return scale_; }
    std::size_t size() const noexcept { return entries_.size(); }

    std::vector<double> values() const {
        std::vector<double> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_)
            out.push_back(e.value);
        return out;
    }

    std::optional<std::size_t> index_of(std::string_view id) const {
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].id == id)
                return i;
        return std::nullopt;
    }

    /// Entries whose ids are listed, in the order they appear here.
    EvaluationVector subset(std::span<const std::string> ids) const {
        std::unordered_set<std::string_view> wanted(ids.begin(), ids.end());
        std::vector<std::string> unknown;
        for (const auto& id : ids)
            if (!index_of(id))
                unknown.push_back(id);
        if (!unknown.empty())
            throw Error("unknown element ids: " + join(unknown));
        std::vector<Evaluation> picked;
        for (const auto& e : entries_)
            if (wanted.contains(e.id))
                picked.push_back(e);
        return EvaluationVector(std::move(picked), scale_);
    }

    static std::string join(std::span<const std::string> ids) {
        std::string out;
        for (const auto& id : ids) {
            if (!out.empty())
                out += ", ";
            out += id;
        }
        return out;
    }

private:
    std::vector<Evaluation> entries_;
    Scale scale_;
};

struct Priority {
    std::string id;
    double weight = 1.0;

    friend bool operator==(const Priority&, const Priority&) = default;
};

/// Per-element weights. Every weight is strictly positive: a zero weight would
/// erase an element from WLAM while WEM still sees it.
class PriorityVector {
public:
    PriorityVector() = default;

    explicit PriorityVector(std::vector<Priority> entries) : entries_(std::move(entries)) {
        std::unordered_set<std::string_view> seen;
        for (const auto& p : entries_) {
            if (!seen.insert(p.id).second)
                throw Error("duplicate priority id '" + p.id + "'");
            if (!std::isfinite(p.weight) || p.weight <= 0.0)
                throw Error("priority of '" + p.id + "' must be > 0");
        }
    }

    static PriorityVector uniform(const EvaluationVector& evals) {
        std::vector<Priority> entries;
        for (const auto& e : evals.entries())
            entries.push_back({e.id, 1.0});
        return PriorityVector(std::move(entries));
    }

    std::span<const Priority> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    std::optional<double> weight_of(std::string_view id) const {
        for (const auto& p : entries_)
            if (p.id == id)
                return p.weight;
        return std::nullopt;
    }

    /// Weights re-ordered to follow `evals`; throws when the id sets differ.
    std::vector<double> aligned_to(const EvaluationVector& evals) const {
        std::unordered_map<std::string_view, double> by_id;
        for (const auto& p : entries_)
            by_id.emplace(p.id, p.weight);
        std::vector<std::string> mismatched;
        std::vector<double> out;
        out.reserve(evals.size());
        for (const auto& e : evals.entries()) {
            auto it = by_id.find(e.id);
            if (it == by_id.end()) {
                mismatched.push_back(e.id);
                continue;
            }
            out.push_back(it->second);
            by_id.erase(it);
        }
        for (const auto& p : entries_)
            if (by_id.contains(p.id))
                mismatched.push_back(p.id);
        if (!mismatched.empty())
            throw Error("priority ids do not match evaluation ids: " +
                        EvaluationVector::join(mismatched));
        return out;
    }

private:
    std::vector<Priority> entries_;
};

/// A set of elements sharing one priority.
struct Group {
    std::string id;
    std::vector<std::string> members;
    double priority = 1.0;

    friend bool operator==(const Group&, const Group&) = default;
};

/// Problems that stop `groups` from partitioning the ids of `evals`. Every
/// message names the offending ids.
inline std::vector<Violation> partition_violations(std::span<const std::string> element_ids,
                                                   std::span<const Group> groups) {
    std::vector<Violation> out;
    if (groups.empty()) {
        out.push_back({"groups", "at least one group is required"});
        return out;
    }
    std::unordered_set<std::string_view> known(element_ids.begin(), element_ids.end());
    std::unordered_map<std::string_view, std::string_view> owner;
    std::unordered_set<std::string_view> group_ids;
    for (const auto& g : groups) {
        if (!group_ids.insert(g.id).second)
            out.push_back({g.id, "duplicate group id"});
        if (g.members.empty())
            out.push_back({g.id, "group has no members"});
        if (!std::isfinite(g.priority) || g.priority <= 0.0)
            out.push_back({g.id, "group priority must be > 0"});
        for (const auto& m : g.members) {
            if (!known.contains(m)) {
                out.push_back({g.id, "unknown element id '" + m + "'"});
                continue;
            }
            auto [it, inserted] = owner.emplace(m, g.id);
            if (!inserted)
                out.push_back({g.id, "element '" + m + "' already belongs to group '" +
                                         std::string(it->second) + "'"});
        }
    }
    std::vector<std::string> uncovered;
    for (const auto& id : element_ids)
        if (!owner.contains(id))
            uncovered.push_back(id);
    if (!uncovered.empty())
        out.push_back({"groups", "elements not covered by any group: " +
                                     EvaluationVector::join(uncovered)});
    return out;
}

/// Evaluations partitioned into equal-priority groups.
class GroupedSystem {
public:
    GroupedSystem(EvaluationVector evals, std::vector<Group> groups)
        : evals_(std::move(evals)), groups_(std::move(groups)) {
        std::vector<std::string> ids;
        for (const auto& e : evals_.entries())
            ids.push_back(e.id);
        auto problems = partition_violations(ids, groups_);
        if (!problems.empty())
            throw ValidationError(std::move(problems));
    }

    const EvaluationVector& evaluations() const noexcept { return evals_; }
    std::span<const Group> groups() const noexcept { return groups_; }

    EvaluationVector group_evaluations(std::size_t m) const {
        return evals_.subset(groups_.at(m).members);
    }

    /// Group priorities expanded onto their members.
    PriorityVector expanded_priorities() const {
        std::vector<Priority> entries;
        for (const auto& e : evals_.entries())
            for (const auto& g : groups_)
                if (std::find(g.members.begin(), g.members.end(), e.id) != g.members.end())
                    entries.push_back({e.id, g.priority});
        return PriorityVector(std::move(entries));
    }

private:
    EvaluationVector evals_;
    std::vector<Group> groups_;
};

// ---------------------------------------------------------------------------
// Operators on raw value spans
// ---------------------------------------------------------------------------

/// Weakest-element evaluation: the minimum.
inline double wem(std::span<const double> values) {
    if (values.empty())
        throw Error("empty system");
    return *std::min_element(values.begin(), values.end());
}

/// Weighted arithmetic mean sum(w*e)/sum(w). Accumulated as an offset from the
/// minimum so a constant vector returns its value exactly.
inline double wlam(std::span<const double> values, std::span<const double> weights) {
    if (values.empty())
        throw Error("empty system");
    if (values.size() != weights.size())
        throw Error("weights and evaluations differ in length");
    for (double w : weights)
        if (!std::isfinite(w) || w <= 0.0)
            throw Error("weights must be > 0");
    const double lo = wem(values);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        num += weights[i] * (values[i] - lo);
        den += weights[i];
    }
    return lo + num / den;
}

/// Unit-weight arithmetic mean.
inline double mean(std::span<const double> values) {
    if (values.empty())
        throw Error("empty system");
    const double lo = wem(values);
    double acc = 0.0;
    for (double v : values)
        acc += v - lo;
    return lo + acc / static_cast<double>(values.size());
}

namespace detail {

inline void require_nonnegative(std::span<const double> values) {
    if (values.empty())
        throw Error("empty system");
    for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error("NAM requires finite nonnegative evaluations");
}

inline bool has_zero(std::span<const double> values) {
    return std::any_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

} // namespace detail

/// prod(e) / mean^(N-1), evaluated as mean * prod(e / mean). The factors are
/// bounded by N and their product by 1, so nothing overflows for moderate N.
inline double nam_direct(std::span<const double> values) {
    detail::require_nonnegative(values);
    if (values.size() == 1)
        return values[0];
    if (detail::has_zero(values))
        return 0.0;
    const double m = mean(values);
    double ratio = 1.0;
    for (double v : values)
        ratio *= v / m;
    return ratio * m;
}

/// Same quantity through sum(log e) - (N-1) log mean.
inline double nam_log_domain(std::span<const double> values) {
    detail::require_nonnegative(values);
    if (values.size() == 1)
        return values[0];
    if (detail::has_zero(values))
        return 0.0;
    const double m = mean(values);
    double log_ratio = 0.0;
    for (double v : values)
        log_ratio += std::log(v / m);
    return std::exp(log_ratio) * m;
}

/// Nonlinear aggregation. Any zero evaluation (including the all-zero vector)
/// yields 0. Switches to the log path for N > 30 or values above 1e6.
inline double nam(std::span<const double> values) {
    detail::require_nonnegative(values);
    const bool large = values.size() > 30 ||
                       std::any_of(values.begin(), values.end(), [](double v) { return v > 1e6; });
    return large ? nam_log_domain(values) : nam_direct(values);
}

/// Relative gap (aggregate - weakest) / aggregate, clamped to [0,1]; 0 when the
/// aggregate is 0.
inline double adequacy_ratio(double aggregate, double weakest) {
    if (aggregate == 0.0)
        return 0.0;
    return std::clamp((aggregate - weakest) / aggregate, 0.0, 1.0);
}

/// Same ratio without clamping.
inline double signed_adequacy(double aggregate, double weakest) {
    if (aggregate == 0.0)
        return 0.0;
    return (aggregate - weakest) / aggregate;
}

// ---------------------------------------------------------------------------
// Operators on evaluation vectors
// ---------------------------------------------------------------------------

inline double wem(const EvaluationVector& evals) { return wem(evals.values()); }

inline double wlam(const EvaluationVector& evals, const PriorityVector& weights) {
    const auto values = evals.values();
    const auto w = weights.aligned_to(evals);
    return wlam(values, w);
}

inline double wlam(const EvaluationVector& evals) {
    const auto values = evals.values();
    return mean(values);
}

inline double nam(const EvaluationVector& evals) { return nam(evals.values()); }

/// Ids of every element attaining the minimum, in declaration order.
inline std::vector<std::string> weakest_ids(const EvaluationVector& evals) {
    const double lo = wem(evals);
    std::vector<std::string> out;
    for (const auto& e : evals.entries())
        if (e.value == lo)
            out.push_back(e.id);
    return out;
}

/// Group NAM values combined by WLAM over group priorities.
inline double hybrid_grouped(const GroupedSystem& sys) {
    std::vector<double> group_values;
    std::vector<double> group_weights;
    for (std::size_t m = 0; m < sys.groups().size(); ++m) {
        group_values.push_back(nam(sys.group_evaluations(m)));
        group_weights.push_back(sys.groups()[m].priority);
    }
    return wlam(group_values, group_weights);
}

/// sigma_{1,2}: how far the unit-weight WLAM sits above the weakest element.
inline double adequacy_wem_wlam(const EvaluationVector& evals) {
    return adequacy_ratio(wlam(evals), wem(evals));
}

/// sigma_{1,3}: same against NAM.
inline double adequacy_wem_nam(const EvaluationVector& evals) {
    return adequacy_ratio(nam(evals), wem(evals));
}

struct AdequacyReport {
    double wem = 0.0;
    double wlam = 0.0;
    double nam = 0.0;
    double sigma_12 = 0.0;
    double sigma_13 = 0.0;
    std::vector<std::string> weakest_ids;
};

inline AdequacyReport adequacy_report(const EvaluationVector& evals) {
    AdequacyReport r;
    r.wem = wem(evals);
    r.wlam = wlam(evals);
    r.nam = nam(evals);
    r.sigma_12 = adequacy_ratio(r.wlam, r.wem);
    r.sigma_13 = adequacy_ratio(r.nam, r.wem);
    r.weakest_ids = weakest_ids(evals);
    return r;
}

enum class FallbackMethod { Wlam, Nam };

struct WemThenResult {
    double critical_wem = 0.0;
    double aggregate = 0.0;
    /// Signed: negative when the critical set is healthier than the aggregate.
    double adequacy = 0.0;
};

/// WEM over the critical (highest-priority) elements, then WLAM or NAM over
/// the whole system.
inline WemThenResult wem_then_aggregate(const EvaluationVector& evals,
                                        const PriorityVector& weights,
                                        std::span<const std::string> critical_ids,
                                        FallbackMethod method) {
    if (critical_ids.empty())
        throw Error("critical set is empty");
    WemThenResult r;
    r.critical_wem = wem(evals.subset(critical_ids));
    r.aggregate = method == FallbackMethod::Wlam ? wlam(evals, weights) : nam(evals);
    r.adequacy = signed_adequacy(r.aggregate, r.critical_wem);
    return r;
}

// ---------------------------------------------------------------------------
// Ordering checkers
// ---------------------------------------------------------------------------

inline constexpr double kRelativeTolerance = 1e-9;
inline constexpr double kAbsoluteTolerance = 1e-12;

/// a <= b up to relative 1e-9 with an absolute floor of 1e-12.
inline bool approx_le(double a, double b) {
    const double tol = std::max(kAbsoluteTolerance,
                                kRelativeTolerance * std::max(std::abs(a), std::abs(b)));
    return a <= b + tol;
}

inline bool approx_eq(double a, double b) { return approx_le(a, b) && approx_le(b, a); }

struct OrderingChain {
    double wem = 0.0;
    double nam = 0.0;
    double wlam = 0.0;
};

struct Theorem2Check {
    bool holds = false;
    OrderingChain chain;
};

/// wem <= nam <= wlam (unit weights).
inline Theorem2Check check_theorem2(std::span<const double> values) {
    Theorem2Check out;
    out.chain = {wem(values), nam(values), mean(values)};
    out.holds = approx_le(out.chain.wem, out.chain.nam) && approx_le(out.chain.nam, out.chain.wlam);
    return out;
}

inline Theorem2Check check_theorem2(const EvaluationVector& evals) {
    return check_theorem2(evals.values());
}

struct Theorem3Check {
    bool lower_holds = false;
    bool upper_holds = false;
    double wem_all = 0.0;
    double hybrid = 0.0;
    double wlam_expanded = 0.0;
};

/// wem(S) <= hybrid(S) <= wlam(S, group priorities expanded per element). The
/// upper bound is only guaranteed for groups of equal size; both sides are
/// reported independently.
inline Theorem3Check check_theorem3(const GroupedSystem& sys) {
    Theorem3Check out;
    out.wem_all = wem(sys.evaluations());
    out.hybrid = hybrid_grouped(sys);
    out.wlam_expanded = wlam(sys.evaluations(), sys.expanded_priorities());
    out.lower_holds = approx_le(out.wem_all, out.hybrid);
    out.upper_holds = approx_le(out.hybrid, out.wlam_expanded);
    return out;
}

struct Theorem1Check {
    double uniform_product = 0.0;
    double given_product = 0.0;
    bool holds = false;
};

/// prod(a) <= (sum(a)/N)^N for positive a.
inline Theorem1Check check_theorem1(std::span<const double> values) {
    if (values.empty())
        throw Error("empty system");
    double sum = 0.0;
    double log_given = 0.0;
    Theorem1Check out;
    out.given_product = 1.0;
    for (double a : values) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw Error("values must be finite and > 0");
        sum += a;
        out.given_product *= a;
        log_given += std::log(a);
    }
    const double n = static_cast<double>(values.size());
    const double share = sum / n;
    out.uniform_product = std::pow(share, n);
    // Compare in the log domain; a relative tolerance on the products becomes
    // an absolute one on their logs.
    out.holds = log_given <= n * std::log(share) + kRelativeTolerance;
    return out;
}

} // namespace netagg
