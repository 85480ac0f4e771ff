#pragma once

// Bottom-up aggregation over a hierarchy. Every subsystem applies its own
// method to the aggregated values of its children.

#include "netagg/eval_core.hpp"
#include "netagg/hierarchy.hpp"

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace netagg {

struct AggregationReport {
    std::string id;
    std::string method; // "leaf" or a method name
    double value = 0.0;
    std::vector<AggregationReport> children;
    /// Leaves attaining the minimum leaf evaluation of this subtree.
    std::vector<std::string> weakest_ids;
    /// Signed (value - wem of children) / value; WEM_THEN uses its critical set.
    double adequacy = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string hidden_weak_warning(double sigma, double threshold,
                                       const std::vector<std::string>& ids) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "hidden weak element (adequacy %.6g > %.6g): ", sigma, threshold);
    return buf + EvaluationVector::join(ids);
}

struct ChildValues {
    std::vector<double> values;
    std::vector<double> weights;
    EvaluationVector evals;
};

inline ChildValues child_values(const HierarchyNode& node,
                                const std::vector<AggregationReport>& reports,
                                const Scale& scale) {
    std::vector<Evaluation> entries;
    std::vector<double> values;
    std::vector<double> weights;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        entries.push_back({node.children[i].id, reports[i].value});
        values.push_back(reports[i].value);
        weights.push_back(node.children[i].weight());
    }
    return {std::move(values), std::move(weights), EvaluationVector(std::move(entries), scale)};
}

} // namespace detail

/// Smallest leaf evaluation below `node`.
inline double min_leaf_value(const HierarchyNode& node) {
    if (node.is_leaf())
        return node.value;
    double lo = min_leaf_value(node.children.front());
    for (const auto& c : node.children)
        lo = std::min(lo, min_leaf_value(c));
    return lo;
}

namespace detail {

inline AggregationReport aggregate_node(const HierarchyNode& node, const Scale& scale) {
    AggregationReport r;
    r.id = node.id;
    if (node.is_leaf()) {
        r.method = "leaf";
        r.value = node.value;
        r.weakest_ids = {node.id};
        return r;
    }

    r.method = std::string(to_string(node.config.method));
    for (const auto& c : node.children)
        r.children.push_back(aggregate_node(c, scale));

    const auto cv = child_values(node, r.children, scale);
    const double floor_value = wem(cv.values);
    const auto& cfg = node.config;
    switch (cfg.method) {
    case Method::Wem:
        r.value = floor_value;
        break;
    case Method::Wlam:
        r.value = wlam(cv.values, cv.weights);
        break;
    case Method::Nam:
        r.value = nam(cv.values);
        break;
    case Method::HybridGrouped:
        r.value = hybrid_grouped(GroupedSystem(cv.evals, cfg.groups));
        break;
    case Method::WemThen: {
        std::vector<Priority> pv;
        for (std::size_t i = 0; i < node.children.size(); ++i)
            pv.push_back({node.children[i].id, cv.weights[i]});
        const auto res = wem_then_aggregate(cv.evals, PriorityVector(std::move(pv)), cfg.critical,
                                            cfg.fallback);
        r.value = res.aggregate;
        r.adequacy = res.adequacy;
        break;
    }
    }
    if (cfg.method != Method::WemThen)
        r.adequacy = signed_adequacy(r.value, floor_value);

    std::vector<std::string> weakest;
    double lo = 0.0;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const double v = min_leaf_value(node.children[i]);
        if (i == 0 || v < lo) {
            lo = v;
            weakest.clear();
        }
        if (v == lo)
            weakest.insert(weakest.end(), r.children[i].weakest_ids.begin(),
                           r.children[i].weakest_ids.end());
    }
    r.weakest_ids = std::move(weakest);

    if (cfg.adequacy_threshold && r.adequacy > *cfg.adequacy_threshold)
        r.warnings.push_back(hidden_weak_warning(r.adequacy, *cfg.adequacy_threshold, r.weakest_ids));
    return r;
}

inline void require_valid(const HierarchyNode& root, const Scale& scale) {
    auto problems = validate_hierarchy(root, scale);
    if (!problems.empty())
        throw ValidationError(std::move(problems));
}

} // namespace detail

/// Evaluates the whole tree. Throws ValidationError when the hierarchy fails
/// validation.
inline AggregationReport aggregate(const HierarchyNode& root, const Scale& scale) {
    detail::require_valid(root, scale);
    return detail::aggregate_node(root, scale);
}

/// One row of a method comparison, for one subsystem.
struct MethodComparison {
    std::string id;
    std::size_t depth = 0;
    Method configured = Method::Wlam;
    double value = 0.0; // configured method's result
    double wem = 0.0;
    double wlam = 0.0;                // configured child weights (unit by default)
    std::optional<double> nam;        // absent when children carry distinct weights
    std::optional<double> hybrid;     // present when a grouping is configured
    double sigma_12 = 0.0;
    std::optional<double> sigma_13;
    std::vector<std::string> weakest_ids;
    std::vector<std::string> warnings;
};

namespace detail {

inline void compare_node(const HierarchyNode& node, const AggregationReport& report,
                         const Scale& scale, double threshold, std::size_t depth,
                         std::vector<MethodComparison>& rows) {
    if (node.is_leaf())
        return;
    const auto cv = child_values(node, report.children, scale);
    MethodComparison row;
    row.id = node.id;
    row.depth = depth;
    row.configured = node.config.method;
    row.value = report.value;
    row.wem = wem(cv.values);
    row.wlam = wlam(cv.values, cv.weights);
    if (!has_distinct_child_weights(node)) {
        row.nam = nam(cv.values);
        row.sigma_13 = adequacy_ratio(*row.nam, row.wem);
    }
    if (!node.config.groups.empty())
        row.hybrid = hybrid_grouped(GroupedSystem(cv.evals, node.config.groups));
    row.sigma_12 = adequacy_ratio(row.wlam, row.wem);
    row.weakest_ids = report.weakest_ids;
    const double limit = node.config.adequacy_threshold.value_or(threshold);
    if (row.sigma_12 > limit)
        row.warnings.push_back(hidden_weak_warning(row.sigma_12, limit, row.weakest_ids));
    rows.push_back(std::move(row));

    for (std::size_t i = 0; i < node.children.size(); ++i)
        compare_node(node.children[i], report.children[i], scale, threshold, depth + 1, rows);
}

} // namespace detail

/// WEM, WLAM, NAM, hybrid and both adequacy ratios for every subsystem, in
/// pre-order. A node whose sigma_12 exceeds the threshold (its own configured
/// threshold wins over `threshold`) carries a warning naming its weakest
/// leaves.
inline std::vector<MethodComparison> compare_methods(const HierarchyNode& root, const Scale& scale,
                                                     double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw Error("adequacy threshold must lie in [0,1]");
    const auto report = aggregate(root, scale);
    std::vector<MethodComparison> rows;
    detail::compare_node(root, report, scale, threshold, 0, rows);
    return rows;
}

struct SweepRow {
    double varied = 0.0;
    double wem = 0.0;
    double wlam = 0.0;
    std::optional<double> nam;
    std::optional<double> hybrid;
};

struct SweepResult {
    std::string varied_id;
    bool has_nam = true;
    bool has_hybrid = false;
    std::vector<SweepRow> rows;
};

/// Root-level method comparison while one leaf walks a uniform grid from
/// `from` to `to` (both endpoints included).
inline SweepResult sweep(const HierarchyNode& root, const Scale& scale, const std::string& vary_id,
                         double from, double to, int steps) {
    detail::require_valid(root, scale);
    const HierarchyNode* target = find_node(root, vary_id);
    if (!target)
        throw Error("unknown element id '" + vary_id + "'");
    if (!target->is_leaf())
        throw Error("'" + vary_id + "' is a subsystem, not an element");
    if (steps < 2)
        throw Error("steps must be >= 2");
    if (!scale.contains(from) || !scale.contains(to))
        throw Error("sweep range must lie inside the scale");
    if (root.is_leaf())
        throw Error("sweep needs a subsystem at the root");

    SweepResult out;
    out.varied_id = vary_id;
    HierarchyNode work = root;
    HierarchyNode* leaf = find_node(work, vary_id);
    for (int i = 0; i < steps; ++i) {
        const double x = i == steps - 1 ? to
                                        : from + (to - from) * static_cast<double>(i) /
                                                     static_cast<double>(steps - 1);
        leaf->value = x;
        const auto rows = compare_methods(work, scale, 1.0);
        const auto& top = rows.front();
        out.rows.push_back({x, top.wem, top.wlam, top.nam, top.hybrid});
        out.has_nam = top.nam.has_value();
        out.has_hybrid = top.hybrid.has_value();
    }
    return out;
}

} // namespace netagg
