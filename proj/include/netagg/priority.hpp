#pragma once

// Element priorities derived from network structure: degree, betweenness,
// traversing flow volume, and route priority.

#include "netagg/eval_core.hpp"
#include "netagg/network.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace netagg {

namespace detail {

/// Dense index view of a validated network.
struct IndexedGraph {
    std::vector<NodeId> ids;
    std::unordered_map<NodeId, std::size_t> index;
    std::vector<std::vector<std::size_t>> out;

    explicit IndexedGraph(const Network& net) : ids(net.nodes), out(net.nodes.size()) {
        for (std::size_t i = 0; i < ids.size(); ++i)
            index.emplace(ids[i], i);
        for (const auto& e : net.edges)
            out[index.at(e.from)].push_back(index.at(e.to));
    }
};

inline void require_valid(const Network& net) {
    auto problems = validate_network(net);
    if (!problems.empty())
        throw ValidationError(std::move(problems));
}

} // namespace detail

/// In-degree plus out-degree.
inline std::map<NodeId, int> degree_centrality(const Network& net) {
    detail::require_valid(net);
    std::map<NodeId, int> deg;
    for (const auto& n : net.nodes)
        deg[n] = 0;
    for (const auto& e : net.edges) {
        ++deg[e.from];
        ++deg[e.to];
    }
    return deg;
}

/// Sum over ordered pairs s != v != t of sigma_st(v) / sigma_st on hop-count
/// shortest paths. Brandes dependency accumulation, one BFS per source, sources
/// in declaration order so the summation order is fixed.
inline std::map<NodeId, double> betweenness_centrality(const Network& net) {
    detail::require_valid(net);
    const detail::IndexedGraph g(net);
    const std::size_t n = g.ids.size();
    std::vector<double> centrality(n, 0.0);

    std::vector<std::size_t> order;
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<double> sigma(n);
    std::vector<long> dist(n);
    std::vector<double> delta(n);

    for (std::size_t s = 0; s < n; ++s) {
        order.clear();
        for (std::size_t v = 0; v < n; ++v) {
            preds[v].clear();
            sigma[v] = 0.0;
            dist[v] = -1;
            delta[v] = 0.0;
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        std::queue<std::size_t> frontier;
        frontier.push(s);
        while (!frontier.empty()) {
            const std::size_t v = frontier.front();
            frontier.pop();
            order.push_back(v);
            for (std::size_t w : g.out[v]) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    frontier.push(w);
                }
                if (dist[w] == dist[v] + 1) {
                    sigma[w] += sigma[v];
                    preds[w].push_back(v);
                }
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const std::size_t w = *it;
            for (std::size_t v : preds[w])
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s)
                centrality[w] += delta[w];
        }
    }

    std::map<NodeId, double> out;
    for (std::size_t i = 0; i < n; ++i)
        out[g.ids[i]] = centrality[i];
    return out;
}

struct FlowVolumes {
    std::map<NodeId, double> nodes;
    std::map<Edge, double> edges;
};

/// Volume of every flow whose route passes a node or edge; a flow counts once
/// per node or edge even if its route revisits it.
inline FlowVolumes flow_volume(const Network& net) {
    detail::require_valid(net);
    FlowVolumes out;
    for (const auto& n : net.nodes)
        out.nodes[n] = 0.0;
    for (const auto& e : net.edges)
        out.edges[e] = 0.0;
    for (const auto& f : net.flows) {
        std::set<NodeId> nodes(f.route.begin(), f.route.end());
        std::set<Edge> hops;
        for (std::size_t k = 1; k < f.route.size(); ++k)
            hops.insert({f.route[k - 1], f.route[k]});
        for (const auto& n : nodes)
            out.nodes[n] += f.volume;
        for (const auto& e : hops)
            out.edges[e] += f.volume;
    }
    return out;
}

/// Summed volume per distinct route. Routes no flow uses are absent.
inline std::map<std::vector<NodeId>, double> route_priority(const Network& net) {
    detail::require_valid(net);
    std::map<std::vector<NodeId>, double> out;
    for (const auto& f : net.flows)
        out[f.route] += f.volume;
    return out;
}

enum class Basis { Degree, Betweenness, FlowVolume, Combined };
enum class Normalization { None, MaxToOne };

inline std::string_view to_string(Basis b) {
    switch (b) {
    case Basis::Degree: return "degree";
    case Basis::Betweenness: return "betweenness";
    case Basis::FlowVolume: return "flow";
    case Basis::Combined: return "combined";
    }
    return "?";
}

inline std::optional<Basis> parse_basis(std::string_view name) {
    for (Basis b : {Basis::Degree, Basis::Betweenness, Basis::FlowVolume, Basis::Combined})
        if (to_string(b) == name)
            return b;
    return std::nullopt;
}

struct PriorityStrategy {
    Basis basis = Basis::Degree;
    std::vector<Basis> tie_break;
    Normalization normalization = Normalization::MaxToOne;

    /// Ties on structure go to the node carrying more flow, then to the other
    /// structural measure.
    static PriorityStrategy for_basis(Basis basis,
                                      Normalization normalization = Normalization::MaxToOne) {
        PriorityStrategy s;
        s.basis = basis;
        s.normalization = normalization;
        switch (basis) {
        case Basis::Degree: s.tie_break = {Basis::FlowVolume, Basis::Betweenness}; break;
        case Basis::Betweenness: s.tie_break = {Basis::FlowVolume, Basis::Degree}; break;
        case Basis::FlowVolume: s.tie_break = {Basis::Degree, Basis::Betweenness}; break;
        case Basis::Combined: s.tie_break = {Basis::FlowVolume, Basis::Degree, Basis::Betweenness}; break;
        }
        return s;
    }
};

/// Floor applied to zero scores so every derived priority stays positive.
inline constexpr double kPriorityFloor = 1e-6;

struct RankedNode {
    NodeId id;
    double score = 0.0;    // raw basis score
    double priority = 0.0; // normalized and floored
    std::size_t rank = 0;  // 1-based
};

namespace detail {

inline std::vector<double> rescale_by_max(const std::vector<double>& xs) {
    const double hi = xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
    std::vector<double> out(xs.size(), 0.0);
    if (hi > 0.0)
        for (std::size_t i = 0; i < xs.size(); ++i)
            out[i] = xs[i] / hi;
    return out;
}

} // namespace detail

/// Nodes ordered by priority: basis score descending, then each tie-break
/// basis descending, then node id ascending.
inline std::vector<RankedNode> rank_nodes(const Network& net, const PriorityStrategy& strategy) {
    if (net.nodes.empty())
        throw Error("empty network");
    {
        std::vector<Basis> seen;
        for (Basis b : strategy.tie_break) {
            if (std::find(seen.begin(), seen.end(), b) != seen.end())
                throw Error("tie-break order lists '" + std::string(to_string(b)) + "' twice");
            seen.push_back(b);
        }
    }

    const auto deg = degree_centrality(net);
    const auto btw = betweenness_centrality(net);
    const auto vol = flow_volume(net);

    const std::size_t n = net.nodes.size();
    std::map<Basis, std::vector<double>> scores;
    for (const auto& id : net.nodes) {
        scores[Basis::Degree].push_back(static_cast<double>(deg.at(id)));
        scores[Basis::Betweenness].push_back(btw.at(id));
        scores[Basis::FlowVolume].push_back(vol.nodes.at(id));
    }
    {
        const auto d = detail::rescale_by_max(scores[Basis::Degree]);
        const auto b = detail::rescale_by_max(scores[Basis::Betweenness]);
        const auto f = detail::rescale_by_max(scores[Basis::FlowVolume]);
        auto& c = scores[Basis::Combined];
        for (std::size_t i = 0; i < n; ++i)
            c.push_back((d[i] + b[i] + f[i]) / 3.0);
    }

    const auto& primary = scores.at(strategy.basis);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (primary[a] != primary[b])
            return primary[a] > primary[b];
        for (Basis t : strategy.tie_break) {
            const auto& s = scores.at(t);
            if (s[a] != s[b])
                return s[a] > s[b];
        }
        return net.nodes[a] < net.nodes[b];
    });

    const double hi = *std::max_element(primary.begin(), primary.end());
    std::vector<RankedNode> out;
    out.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = idx[r];
        RankedNode node;
        node.id = net.nodes[i];
        node.score = primary[i];
        node.rank = r + 1;
        if (hi <= 0.0) {
            // Nothing distinguishes the nodes.
            node.priority = 1.0;
        } else {
            const double p = strategy.normalization == Normalization::MaxToOne ? primary[i] / hi
                                                                               : primary[i];
            node.priority = std::max(p, kPriorityFloor);
        }
        out.push_back(std::move(node));
    }
    return out;
}

/// Priority vector in rank order.
inline PriorityVector derive_priorities(const Network& net, const PriorityStrategy& strategy) {
    std::vector<Priority> entries;
    for (auto& r : rank_nodes(net, strategy))
        entries.push_back({std::move(r.id), r.priority});
    return PriorityVector(std::move(entries));
}

/// Single-linkage grouping over priorities sorted descending: neighbours no
/// more than `tolerance` apart share a group. Group priority is the member
/// mean; groups come out in descending priority with ids g1, g2, ...
inline std::vector<Group> group_by_priority(const PriorityVector& priorities, double tolerance) {
    if (!(tolerance >= 0.0))
        throw Error("group tolerance must be >= 0");
    std::vector<Priority> sorted(priorities.entries().begin(), priorities.entries().end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Priority& a, const Priority& b) { return a.weight > b.weight; });

    std::vector<Group> out;
    double previous = 0.0;
    double sum = 0.0;
    for (const auto& p : sorted) {
        if (out.empty() || previous - p.weight > tolerance) {
            if (!out.empty())
                out.back().priority = sum / static_cast<double>(out.back().members.size());
            out.push_back({"g" + std::to_string(out.size() + 1), {}, 0.0});
            sum = 0.0;
        }
        out.back().members.push_back(p.id);
        sum += p.weight;
        previous = p.weight;
    }
    if (!out.empty())
        out.back().priority = sum / static_cast<double>(out.back().members.size());
    return out;
}

} // namespace netagg
