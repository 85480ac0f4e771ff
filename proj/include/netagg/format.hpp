#pragma once

// Text, JSON and CSV renderings of reports. CSV output uses '.' decimals, ','
// separators and LF line endings; numbers in CSV cells are fixed 6-decimal.

#include "netagg/aggregate.hpp"
#include "netagg/priority.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace netagg::fmt {

/// Six significant digits: 20.4082, 83.3333, 70.
inline std::string sig6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

/// Shortest decimal that reads back to the same double.
inline std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string opt_fixed6(const std::optional<double>& v) { return v ? fixed6(*v) : ""; }
inline std::string opt_sig6(const std::optional<double>& v) { return v ? sig6(*v) : "n/a"; }

inline nlohmann::json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::string join(const std::vector<std::string>& xs, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i)
            out += sep;
        out += xs[i];
    }
    return out;
}

inline std::string pad(std::string s, std::size_t width) {
    if (s.size() < width)
        s.append(width - s.size(), ' ');
    return s;
}

// --------------------------------------------------------------------------
// Sweep
// --------------------------------------------------------------------------

/// Header varied,wem,wlam,nam[,hybrid]. The nam cell is left empty where NAM
/// does not apply.
inline std::string sweep_csv(const SweepResult& sweep) {
    std::string out = "varied,wem,wlam,nam";
    if (sweep.has_hybrid)
        out += ",hybrid";
    out += '\n';
    for (const auto& r : sweep.rows) {
        out += shortest(r.varied);
        out += ',' + fixed6(r.wem);
        out += ',' + fixed6(r.wlam);
        out += ',' + opt_fixed6(r.nam);
        if (sweep.has_hybrid)
            out += ',' + opt_fixed6(r.hybrid);
        out += '\n';
    }
    return out;
}

// --------------------------------------------------------------------------
// Aggregation report
// --------------------------------------------------------------------------

inline nlohmann::json to_json(const AggregationReport& r) {
    nlohmann::json j{{"id", r.id},
                     {"method", r.method},
                     {"value", r.value},
                     {"adequacy", r.adequacy},
                     {"weakest_ids", r.weakest_ids},
                     {"warnings", r.warnings}};
    j["children"] = nlohmann::json::array();
    for (const auto& c : r.children)
        j["children"].push_back(to_json(c));
    return j;
}

namespace detail {

inline void report_text(const AggregationReport& r, std::size_t depth, std::string& out) {
    out += std::string(depth * 2, ' ') + r.id + " [" + r.method + "] " + sig6(r.value);
    if (r.method != "leaf") {
        out += "  adequacy=" + sig6(r.adequacy);
        out += "  weakest=" + join(r.weakest_ids, ",");
    }
    out += '\n';
    for (const auto& w : r.warnings)
        out += std::string(depth * 2 + 2, ' ') + "warning: " + w + '\n';
    for (const auto& c : r.children)
        report_text(c, depth + 1, out);
}

inline void report_csv(const AggregationReport& r, std::size_t depth, std::string& out) {
    out += r.id + ',' + std::to_string(depth) + ',' + r.method + ',' + fixed6(r.value) + ',' +
           fixed6(r.adequacy) + ',' + join(r.weakest_ids, ";") + '\n';
    for (const auto& c : r.children)
        report_csv(c, depth + 1, out);
}

} // namespace detail

inline std::string report_text(const AggregationReport& r) {
    std::string out;
    detail::report_text(r, 0, out);
    return out;
}

inline std::string report_csv(const AggregationReport& r) {
    std::string out = "id,depth,method,value,adequacy,weakest_ids\n";
    detail::report_csv(r, 0, out);
    return out;
}

// --------------------------------------------------------------------------
// Method comparison
// --------------------------------------------------------------------------

inline std::string comparison_text(const std::vector<MethodComparison>& rows) {
    std::string out = pad("node", 20) + pad("method", 10) + pad("wem", 12) + pad("wlam", 12) +
                      pad("nam", 12) + pad("hybrid", 12) + pad("sigma12", 12) + "sigma13\n";
    for (const auto& r : rows) {
        out += pad(std::string(r.depth * 2, ' ') + r.id, 20);
        out += pad(std::string(to_string(r.configured)), 10);
        out += pad(sig6(r.wem), 12);
        out += pad(sig6(r.wlam), 12);
        out += pad(opt_sig6(r.nam), 12);
        out += pad(r.hybrid ? sig6(*r.hybrid) : "-", 12);
        out += pad(sig6(r.sigma_12), 12);
        out += opt_sig6(r.sigma_13) + '\n';
        for (const auto& w : r.warnings)
            out += "  warning [" + r.id + "]: " + w + '\n';
    }
    return out;
}

inline nlohmann::json comparison_json(const std::vector<MethodComparison>& rows) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows)
        arr.push_back({{"id", r.id},
                       {"depth", r.depth},
                       {"method", std::string(to_string(r.configured))},
                       {"value", r.value},
                       {"wem", r.wem},
                       {"wlam", r.wlam},
                       {"nam", opt_json(r.nam)},
                       {"hybrid", opt_json(r.hybrid)},
                       {"sigma_12", r.sigma_12},
                       {"sigma_13", opt_json(r.sigma_13)},
                       {"weakest_ids", r.weakest_ids},
                       {"warnings", r.warnings}});
    return arr;
}

inline std::string comparison_csv(const std::vector<MethodComparison>& rows) {
    std::string out = "id,depth,method,wem,wlam,nam,hybrid,sigma_12,sigma_13,weakest_ids,warning\n";
    for (const auto& r : rows)
        out += r.id + ',' + std::to_string(r.depth) + ',' + std::string(to_string(r.configured)) +
               ',' + fixed6(r.wem) + ',' + fixed6(r.wlam) + ',' + opt_fixed6(r.nam) + ',' +
               opt_fixed6(r.hybrid) + ',' + fixed6(r.sigma_12) + ',' + opt_fixed6(r.sigma_13) +
               ',' + join(r.weakest_ids, ";") + ',' + (r.warnings.empty() ? "0" : "1") + '\n';
    return out;
}

// --------------------------------------------------------------------------
// Priorities
// --------------------------------------------------------------------------

inline std::string priorities_text(const std::vector<RankedNode>& ranked,
                                   const std::vector<Group>& groups) {
    std::string out = pad("rank", 6) + pad("node", 16) + pad("score", 12) + "priority\n";
    for (const auto& r : ranked)
        out += pad(std::to_string(r.rank), 6) + pad(r.id, 16) + pad(sig6(r.score), 12) +
               sig6(r.priority) + '\n';
    if (!groups.empty()) {
        out += "groups:\n";
        for (const auto& g : groups)
            out += "  " + g.id + " (" + sig6(g.priority) + "): " + join(g.members, ", ") + '\n';
    }
    return out;
}

inline nlohmann::json priorities_json(const std::vector<RankedNode>& ranked,
                                      const std::vector<Group>& groups) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& r : ranked)
        j["nodes"].push_back(
            {{"rank", r.rank}, {"id", r.id}, {"score", r.score}, {"priority", r.priority}});
    if (!groups.empty()) {
        j["groups"] = nlohmann::json::array();
        for (const auto& g : groups)
            j["groups"].push_back({{"id", g.id}, {"members", g.members}, {"priority", g.priority}});
    }
    return j;
}

inline std::string priorities_csv(const std::vector<RankedNode>& ranked,
                                  const std::vector<Group>& groups) {
    std::string out = "rank,id,score,priority";
    if (!groups.empty())
        out += ",group";
    out += '\n';
    for (const auto& r : ranked) {
        out += std::to_string(r.rank) + ',' + r.id + ',' + fixed6(r.score) + ',' + fixed6(r.priority);
        if (!groups.empty())
            for (const auto& g : groups)
                if (std::find(g.members.begin(), g.members.end(), r.id) != g.members.end())
                    out += ',' + g.id;
        out += '\n';
    }
    return out;
}

} // namespace netagg::fmt
