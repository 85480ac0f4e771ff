#pragma once

// Multi-level system tree: leaves carry element evaluations, subsystems carry
// the aggregation method applied to their children.

#include "netagg/eval_core.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace netagg {

enum class Method { Wem, Wlam, Nam, HybridGrouped, WemThen };

inline std::string_view to_string(Method m) {
    switch (m) {
    case Method::Wem: return "wem";
    case Method::Wlam: return "wlam";
    case Method::Nam: return "nam";
    case Method::HybridGrouped: return "hybrid";
    case Method::WemThen: return "wem-then";
    }
    return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
    for (Method m : {Method::Wem, Method::Wlam, Method::Nam, Method::HybridGrouped, Method::WemThen})
        if (to_string(m) == name)
            return m;
    return std::nullopt;
}

inline std::string_view to_string(FallbackMethod m) {
    return m == FallbackMethod::Wlam ? "wlam" : "nam";
}

struct MethodConfig {
    Method method = Method::Wlam;
    /// Partition of the children (by child id). Required by HybridGrouped,
    /// optional otherwise (enables the hybrid column in comparisons).
    std::vector<Group> groups;
    /// Child ids scanned by WEM under WemThen.
    std::vector<std::string> critical;
    FallbackMethod fallback = FallbackMethod::Wlam;
    std::optional<double> adequacy_threshold;

    friend bool operator==(const MethodConfig&, const MethodConfig&) = default;
};

struct HierarchyNode {
    enum class Kind { Leaf, Subsystem };

    std::string id;
    Kind kind = Kind::Leaf;
    /// Weight of this node inside its parent; unit when absent.
    std::optional<double> priority;
    double value = 0.0; // leaves only
    std::vector<HierarchyNode> children;
    MethodConfig config;

    static HierarchyNode leaf(std::string id, double value,
                              std::optional<double> priority = std::nullopt) {
        HierarchyNode n;
        n.id = std::move(id);
        n.kind = Kind::Leaf;
        n.value = value;
        n.priority = priority;
        return n;
    }

    static HierarchyNode subsystem(std::string id, std::vector<HierarchyNode> children,
                                   MethodConfig config = {},
                                   std::optional<double> priority = std::nullopt) {
        HierarchyNode n;
        n.id = std::move(id);
        n.kind = Kind::Subsystem;
        n.children = std::move(children);
        n.config = std::move(config);
        n.priority = priority;
        return n;
    }

    bool is_leaf() const noexcept { return kind == Kind::Leaf; }

    double weight() const noexcept { return priority.value_or(1.0); }

    friend bool operator==(const HierarchyNode&, const HierarchyNode&) = default;
};

/// True when any child carries a priority that differs from its siblings.
inline bool has_distinct_child_weights(const HierarchyNode& node) {
    if (node.children.empty())
        return false;
    const double first = node.children.front().weight();
    for (const auto& c : node.children)
        if (c.weight() != first)
            return true;
    return false;
}

inline bool has_explicit_child_weights(const HierarchyNode& node) {
    for (const auto& c : node.children)
        if (c.priority)
            return true;
    return false;
}

namespace detail {

inline void validate_node(const HierarchyNode& node, const Scale& scale,
                          std::unordered_set<std::string>& seen, std::vector<Violation>& out) {
    const std::string& subject = node.id.empty() ? std::string("<unnamed>") : node.id;
    if (node.id.empty())
        out.push_back({subject, "node id is empty"});
    else if (!seen.insert(node.id).second)
        out.push_back({subject, "duplicate node id"});

    if (node.priority && (!std::isfinite(*node.priority) || *node.priority <= 0.0))
        out.push_back({subject, "priority must be > 0"});

    if (node.is_leaf()) {
        if (!node.children.empty())
            out.push_back({subject, "leaf has children"});
        if (!std::isfinite(node.value) || !scale.contains(node.value))
            out.push_back({subject, "evaluation " + std::to_string(node.value) +
                                        " outside scale [" + std::to_string(scale.min()) + ", " +
                                        std::to_string(scale.max()) + "]"});
        return;
    }

    if (node.children.empty())
        out.push_back({subject, "subsystem has no children"});

    const auto& cfg = node.config;
    std::vector<std::string> child_ids;
    for (const auto& c : node.children)
        child_ids.push_back(c.id);

    if (cfg.method == Method::HybridGrouped && cfg.groups.empty())
        out.push_back({subject, "hybrid method requires a grouping of the children"});
    if (!cfg.groups.empty() && !node.children.empty())
        for (auto& v : partition_violations(child_ids, cfg.groups))
            out.push_back({subject, "grouping: " + v.subject + ": " + v.message});

    if (cfg.method == Method::WemThen) {
        if (cfg.critical.empty())
            out.push_back({subject, "wem-then method requires a critical set"});
        std::unordered_set<std::string_view> ids(child_ids.begin(), child_ids.end());
        for (const auto& c : cfg.critical)
            if (!ids.contains(c))
                out.push_back({subject, "critical id '" + c + "' is not a child"});
    }

    const bool nam_used = cfg.method == Method::Nam ||
                          (cfg.method == Method::WemThen && cfg.fallback == FallbackMethod::Nam);
    if (nam_used && has_explicit_child_weights(node))
        out.push_back({subject, "NAM cannot take per-child weights"});

    if (cfg.adequacy_threshold &&
        !(*cfg.adequacy_threshold >= 0.0 && *cfg.adequacy_threshold <= 1.0))
        out.push_back({subject, "adequacy threshold must lie in [0,1]"});

    for (const auto& c : node.children)
        validate_node(c, scale, seen, out);
}

} // namespace detail

/// Tree-ness (unique ids), method-config coherence, and leaf ranges. Never
/// throws on malformed trees.
inline std::vector<Violation> validate_hierarchy(const HierarchyNode& root, const Scale& scale) {
    std::vector<Violation> out;
    std::unordered_set<std::string> seen;
    detail::validate_node(root, scale, seen, out);
    return out;
}

inline const HierarchyNode* find_node(const HierarchyNode& root, std::string_view id) {
    if (root.id == id)
        return &root;
    for (const auto& c : root.children)
        if (const auto* hit = find_node(c, id))
            return hit;
    return nullptr;
}

inline HierarchyNode* find_node(HierarchyNode& root, std::string_view id) {
    return const_cast<HierarchyNode*>(find_node(static_cast<const HierarchyNode&>(root), id));
}

inline std::size_t count_nodes(const HierarchyNode& root) {
    std::size_t n = 1;
    for (const auto& c : root.children)
        n += count_nodes(c);
    return n;
}

} // namespace netagg
