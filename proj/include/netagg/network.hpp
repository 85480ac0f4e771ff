#pragma once

// Single-level flow network: nodes, directed unweighted edges, and flows that
// travel along routes.

#include "netagg/error.hpp"

#include <cmath>
#include <compare>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace netagg {

using NodeId = std::string;

struct Edge {
    NodeId from;
    NodeId to;

    auto operator<=>(const Edge&) const = default;
};

struct Flow {
    std::vector<NodeId> route;
    double volume = 1.0; // flow units per period

    friend bool operator==(const Flow&, const Flow&) = default;
};

/// Undirected systems are encoded as edge pairs.
struct Network {
    std::vector<NodeId> nodes;
    std::vector<Edge> edges;
    std::vector<Flow> flows;

    friend bool operator==(const Network&, const Network&) = default;
};

/// Subjects are path-like ("nodes/2", "edges/0", "flows/1") so callers can map
/// them back onto a document.
inline std::vector<Violation> validate_network(const Network& net) {
    std::vector<Violation> out;
    std::unordered_set<NodeId> declared;
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const auto& n = net.nodes[i];
        if (n.empty())
            out.push_back({"nodes/" + std::to_string(i), "node id is empty"});
        else if (!declared.insert(n).second)
            out.push_back({"nodes/" + std::to_string(i), "duplicate node '" + n + "'"});
    }

    std::set<Edge> edges;
    for (std::size_t i = 0; i < net.edges.size(); ++i) {
        const auto& e = net.edges[i];
        const std::string subject = "edges/" + std::to_string(i);
        const std::string pair = "(" + e.from + ", " + e.to + ")";
        if (!declared.contains(e.from))
            out.push_back({subject, "edge " + pair + " starts at undeclared node '" + e.from + "'"});
        if (!declared.contains(e.to))
            out.push_back({subject, "edge " + pair + " ends at undeclared node '" + e.to + "'"});
        if (e.from == e.to)
            out.push_back({subject, "self-loop " + pair});
        if (!edges.insert(e).second)
            out.push_back({subject, "duplicate edge " + pair});
    }

    for (std::size_t i = 0; i < net.flows.size(); ++i) {
        const auto& f = net.flows[i];
        const std::string subject = "flows/" + std::to_string(i);
        if (f.route.size() < 2)
            out.push_back({subject, "route must visit at least two nodes"});
        if (!std::isfinite(f.volume) || f.volume <= 0.0)
            out.push_back({subject, "flow volume must be > 0"});
        for (const auto& n : f.route)
            if (!declared.contains(n))
                out.push_back({subject, "route visits undeclared node '" + n + "'"});
        for (std::size_t k = 1; k < f.route.size(); ++k) {
            Edge hop{f.route[k - 1], f.route[k]};
            if (!edges.contains(hop))
                out.push_back({subject, "route uses missing edge (" + hop.from + ", " + hop.to + ")"});
        }
    }
    return out;
}

} // namespace netagg
