#pragma once

// JSON system-description format: scale, elements, groups, hierarchy and
// network sections. Parsing collects every problem with its document location
// before failing.

#include "netagg/aggregate.hpp"
#include "netagg/eval_core.hpp"
#include "netagg/hierarchy.hpp"
#include "netagg/network.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace netagg {

struct ElementSpec {
    std::string id;
    double evaluation = 0.0;
    std::optional<double> priority;

    friend bool operator==(const ElementSpec&, const ElementSpec&) = default;
};

struct SystemDescription {
    Scale scale;
    std::vector<ElementSpec> elements;
    std::vector<Group> groups;
    /// Leaves carry the evaluation and explicit priority of their element.
    std::optional<HierarchyNode> hierarchy;
    std::optional<Network> network;

    friend bool operator==(const SystemDescription&, const SystemDescription&) = default;

    EvaluationVector evaluations() const {
        std::vector<Evaluation> entries;
        for (const auto& e : elements)
            entries.push_back({e.id, e.evaluation});
        return EvaluationVector(std::move(entries), scale);
    }

    /// Explicit element priority, else the priority of the element's group,
    /// else unit.
    std::optional<double> effective_priority(const ElementSpec& e) const {
        if (e.priority)
            return e.priority;
        for (const auto& g : groups)
            if (std::find(g.members.begin(), g.members.end(), e.id) != g.members.end())
                return g.priority;
        return std::nullopt;
    }

    PriorityVector priorities() const {
        std::vector<Priority> entries;
        for (const auto& e : elements)
            entries.push_back({e.id, effective_priority(e).value_or(1.0)});
        return PriorityVector(std::move(entries));
    }

    bool has_uniform_priorities() const {
        const auto p = priorities();
        for (const auto& x : p.entries())
            if (x.weight != p.entries().front().weight)
                return false;
        return true;
    }

    std::optional<GroupedSystem> grouped() const {
        if (groups.empty())
            return std::nullopt;
        return GroupedSystem(evaluations(), groups);
    }

    /// The declared hierarchy, or a single root "system" over every element:
    /// hybrid over the declared groups when there are any, WLAM otherwise.
    HierarchyNode effective_hierarchy() const {
        if (hierarchy)
            return *hierarchy;
        std::vector<HierarchyNode> leaves;
        for (const auto& e : elements)
            leaves.push_back(HierarchyNode::leaf(e.id, e.evaluation, effective_priority(e)));
        MethodConfig cfg;
        cfg.method = groups.empty() ? Method::Wlam : Method::HybridGrouped;
        cfg.groups = groups;
        return HierarchyNode::subsystem("system", std::move(leaves), std::move(cfg));
    }
};

struct Diagnostic {
    std::string location; // JSON pointer, or "line L, column C" for syntax errors
    std::string message;
};

class DescriptionError : public Error {
public:
    DescriptionError(std::vector<Diagnostic> diagnostics, bool syntax)
        : Error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)), syntax_(syntax) {}

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }
    bool is_syntax_error() const noexcept { return syntax_; }

private:
    static std::string summarize(const std::vector<Diagnostic>& ds) {
        std::string out = "invalid system description";
        for (const auto& d : ds)
            out += "\n  " + d.location + ": " + d.message;
        return out;
    }

    std::vector<Diagnostic> diagnostics_;
    bool syntax_ = false;
};

/// The input file could not be read.
class IoError : public Error {
public:
    using Error::Error;
};

namespace detail {

using nlohmann::json;

inline std::string pointer_escape(std::string_view token) {
    std::string out;
    for (char c : token) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

class DescriptionParser {
public:
    SystemDescription run(const json& doc) {
        if (!doc.is_object()) {
            fail("", "top level must be an object");
            throw_if_failed();
        }
        static const std::set<std::string> known{"scale", "elements", "groups", "hierarchy", "network"};
        for (const auto& [key, _] : doc.items())
            if (!known.contains(key))
                fail("/" + pointer_escape(key), "unknown key");

        SystemDescription out;
        parse_scale(doc, out);
        parse_elements(doc, out);
        parse_groups(doc, out);
        parse_hierarchy(doc, out);
        parse_network(doc, out);
        throw_if_failed();
        return out;
    }

private:
    void fail(std::string location, std::string message) {
        diagnostics_.push_back({location.empty() ? "/" : std::move(location), std::move(message)});
    }

    void throw_if_failed() {
        if (!diagnostics_.empty())
            throw DescriptionError(std::move(diagnostics_), false);
    }

    std::optional<double> number(const json& obj, const std::string& key, const std::string& where,
                                 bool required) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required)
                fail(where, "missing '" + key + "'");
            return std::nullopt;
        }
        if (!it->is_number()) {
            fail(where + "/" + key, "expected a number");
            return std::nullopt;
        }
        const double v = it->get<double>();
        if (!std::isfinite(v)) {
            fail(where + "/" + key, "number is not finite");
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::string> string(const json& obj, const std::string& key,
                                      const std::string& where) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            fail(where, "missing '" + key + "'");
            return std::nullopt;
        }
        if (!it->is_string() || it->get<std::string>().empty()) {
            fail(where + "/" + key, "expected a non-empty string");
            return std::nullopt;
        }
        return it->get<std::string>();
    }

    std::vector<std::string> string_list(const json& obj, const std::string& key,
                                         const std::string& where) {
        std::vector<std::string> out;
        auto it = obj.find(key);
        if (it == obj.end()) {
            fail(where, "missing '" + key + "'");
            return out;
        }
        if (!it->is_array()) {
            fail(where + "/" + key, "expected an array of strings");
            return out;
        }
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& v = (*it)[i];
            if (!v.is_string() || v.get<std::string>().empty())
                fail(where + "/" + key + "/" + std::to_string(i), "expected a non-empty string");
            else
                out.push_back(v.get<std::string>());
        }
        return out;
    }

    void unknown_keys(const json& obj, const std::string& where,
                      std::initializer_list<std::string_view> allowed) {
        for (const auto& [key, _] : obj.items())
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                fail(where + "/" + pointer_escape(key), "unknown key");
    }

    void parse_scale(const json& doc, SystemDescription& out) {
        auto it = doc.find("scale");
        if (it == doc.end()) {
            fail("/", "missing 'scale'");
            return;
        }
        if (!it->is_object()) {
            fail("/scale", "expected an object with 'min' and 'max'");
            return;
        }
        unknown_keys(*it, "/scale", {"min", "max"});
        auto lo = number(*it, "min", "/scale", true);
        auto hi = number(*it, "max", "/scale", true);
        if (!lo || !hi)
            return;
        try {
            out.scale = Scale(*lo, *hi);
            scale_ok_ = true;
        } catch (const Error& e) {
            fail("/scale", e.what());
        }
    }

    void parse_elements(const json& doc, SystemDescription& out) {
        auto it = doc.find("elements");
        if (it == doc.end()) {
            fail("/", "missing 'elements'");
            return;
        }
        if (!it->is_array()) {
            fail("/elements", "expected an array");
            return;
        }
        if (it->empty()) {
            fail("/elements", "empty system");
            return;
        }
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "/elements/" + std::to_string(i);
            const auto& e = (*it)[i];
            if (!e.is_object()) {
                fail(where, "expected an object");
                continue;
            }
            unknown_keys(e, where, {"id", "evaluation", "priority"});
            auto id = string(e, "id", where);
            auto value = number(e, "evaluation", where, true);
            auto priority = number(e, "priority", where, false);
            if (id && !element_index_.emplace(*id, i).second)
                fail(where + "/id", "duplicate element id '" + *id + "'");
            if (value && scale_ok_ && !out.scale.contains(*value))
                fail(where + "/evaluation", "evaluation " + format(*value) + " outside scale [" +
                                                format(out.scale.min()) + ", " +
                                                format(out.scale.max()) + "]");
            if (priority && *priority <= 0.0)
                fail(where + "/priority", "priority must be > 0");
            if (id && value)
                out.elements.push_back({*id, *value, priority});
        }
    }

    void parse_groups(const json& doc, SystemDescription& out) {
        auto it = doc.find("groups");
        if (it == doc.end())
            return;
        if (!it->is_array()) {
            fail("/groups", "expected an array");
            return;
        }
        std::unordered_map<std::string, std::string> owner;
        std::set<std::string> group_ids;
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "/groups/" + std::to_string(i);
            const auto& g = (*it)[i];
            if (!g.is_object()) {
                fail(where, "expected an object");
                continue;
            }
            unknown_keys(g, where, {"id", "members", "priority"});
            auto id = string(g, "id", where);
            auto members = string_list(g, "members", where);
            auto priority = number(g, "priority", where, true);
            if (id && !group_ids.insert(*id).second)
                fail(where + "/id", "duplicate group id '" + *id + "'");
            if (g.contains("members") && g["members"].is_array() && g["members"].empty())
                fail(where + "/members", "group has no members");
            if (priority && *priority <= 0.0)
                fail(where + "/priority", "group priority must be > 0");
            for (std::size_t k = 0; k < members.size(); ++k) {
                const auto& m = members[k];
                const std::string at = where + "/members/" + std::to_string(k);
                if (!element_index_.contains(m)) {
                    fail(at, "unknown element id '" + m + "'");
                    continue;
                }
                auto [prev, inserted] = owner.emplace(m, id.value_or("?"));
                if (!inserted)
                    fail(at, "element '" + m + "' already belongs to group '" + prev->second + "'");
            }
            if (id && priority)
                out.groups.push_back({*id, members, *priority});
        }
        if (!it->empty())
            for (const auto& [id, _] : element_index_)
                if (!owner.contains(id))
                    fail("/groups", "element '" + id + "' is not covered by any group");
    }

    std::optional<HierarchyNode> parse_node(const json& node, const std::string& where,
                                            const SystemDescription& desc) {
        if (!node.is_object()) {
            fail(where, "expected an object");
            return std::nullopt;
        }
        auto id = string(node, "id", where);
        if (!id)
            return std::nullopt;
        node_location_.emplace(*id, where);

        if (!node.contains("children")) {
            unknown_keys(node, where, {"id"});
            auto it = element_index_.find(*id);
            if (it == element_index_.end()) {
                fail(where + "/id", "leaf '" + *id + "' does not name an element");
                return std::nullopt;
            }
            if (!leaf_seen_.insert(*id).second)
                fail(where + "/id", "element '" + *id + "' appears more than once in the hierarchy");
            for (const auto& e : desc.elements)
                if (e.id == *id)
                    return HierarchyNode::leaf(e.id, e.evaluation, e.priority);
            return std::nullopt; // element itself was malformed, already reported
        }

        unknown_keys(node, where,
                     {"id", "method", "children", "groups", "critical", "fallback", "threshold",
                      "priority"});
        MethodConfig cfg;
        if (auto name = string(node, "method", where)) {
            if (auto m = parse_method(*name))
                cfg.method = *m;
            else
                fail(where + "/method", "unknown method '" + *name +
                                            "' (expected wem, wlam, nam, hybrid or wem-then)");
        }
        if (node.contains("groups")) {
            const auto& gs = node["groups"];
            if (!gs.is_array()) {
                fail(where + "/groups", "expected an array");
            } else {
                for (std::size_t i = 0; i < gs.size(); ++i) {
                    const std::string at = where + "/groups/" + std::to_string(i);
                    if (!gs[i].is_object()) {
                        fail(at, "expected an object");
                        continue;
                    }
                    unknown_keys(gs[i], at, {"id", "members", "priority"});
                    auto gid = string(gs[i], "id", at);
                    auto members = string_list(gs[i], "members", at);
                    auto p = number(gs[i], "priority", at, true);
                    if (gid && p)
                        cfg.groups.push_back({*gid, members, *p});
                }
            }
        }
        if (node.contains("critical"))
            cfg.critical = string_list(node, "critical", where);
        if (node.contains("fallback")) {
            auto f = string(node, "fallback", where);
            if (f && *f == "wlam")
                cfg.fallback = FallbackMethod::Wlam;
            else if (f && *f == "nam")
                cfg.fallback = FallbackMethod::Nam;
            else if (f)
                fail(where + "/fallback", "fallback must be 'wlam' or 'nam'");
        }
        cfg.adequacy_threshold = number(node, "threshold", where, false);
        auto priority = number(node, "priority", where, false);

        std::vector<HierarchyNode> children;
        const auto& kids = node["children"];
        if (!kids.is_array()) {
            fail(where + "/children", "expected an array");
        } else {
            if (kids.empty())
                fail(where + "/children", "subsystem has no children");
            for (std::size_t i = 0; i < kids.size(); ++i)
                if (auto c = parse_node(kids[i], where + "/children/" + std::to_string(i), desc))
                    children.push_back(std::move(*c));
        }
        return HierarchyNode::subsystem(*id, std::move(children), std::move(cfg), priority);
    }

    void parse_hierarchy(const json& doc, SystemDescription& out) {
        auto it = doc.find("hierarchy");
        if (it == doc.end())
            return;
        const std::size_t before = diagnostics_.size();
        auto root = parse_node(*it, "/hierarchy", out);
        for (const auto& [id, _] : element_index_)
            if (!leaf_seen_.contains(id))
                fail("/hierarchy", "element '" + id + "' is missing from the hierarchy");
        if (!root || diagnostics_.size() != before || !scale_ok_)
            return;
        for (const auto& v : validate_hierarchy(*root, out.scale)) {
            auto loc = node_location_.find(v.subject);
            fail(loc == node_location_.end() ? "/hierarchy" : loc->second, v.message);
        }
        out.hierarchy = std::move(root);
    }

    void parse_network(const json& doc, SystemDescription& out) {
        auto it = doc.find("network");
        if (it == doc.end())
            return;
        if (!it->is_object()) {
            fail("/network", "expected an object");
            return;
        }
        unknown_keys(*it, "/network", {"nodes", "edges", "flows"});
        Network net;
        net.nodes = string_list(*it, "nodes", "/network");
        if (it->contains("edges")) {
            const auto& edges = (*it)["edges"];
            if (!edges.is_array()) {
                fail("/network/edges", "expected an array");
            } else {
                for (std::size_t i = 0; i < edges.size(); ++i) {
                    const auto& e = edges[i];
                    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
                        fail("/network/edges/" + std::to_string(i), "expected [from, to]");
                        continue;
                    }
                    net.edges.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
                }
            }
        }
        if (it->contains("flows")) {
            const auto& flows = (*it)["flows"];
            if (!flows.is_array()) {
                fail("/network/flows", "expected an array");
            } else {
                for (std::size_t i = 0; i < flows.size(); ++i) {
                    const std::string where = "/network/flows/" + std::to_string(i);
                    if (!flows[i].is_object()) {
                        fail(where, "expected an object");
                        continue;
                    }
                    unknown_keys(flows[i], where, {"route", "volume"});
                    Flow f;
                    f.route = string_list(flows[i], "route", where);
                    f.volume = number(flows[i], "volume", where, false).value_or(1.0);
                    net.flows.push_back(std::move(f));
                }
            }
        }
        // Subjects from the validator are "nodes/i", "edges/i", "flows/i".
        for (const auto& v : validate_network(net))
            fail("/network/" + v.subject, v.message);
        out.network = std::move(net);
    }

    static std::string format(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }

    std::vector<Diagnostic> diagnostics_;
    bool scale_ok_ = false;
    std::unordered_map<std::string, std::size_t> element_index_;
    std::unordered_map<std::string, std::string> node_location_;
    std::set<std::string> leaf_seen_;
};

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

inline json node_to_json(const HierarchyNode& node) {
    json j;
    j["id"] = node.id;
    if (node.is_leaf())
        return j;
    const auto& cfg = node.config;
    j["method"] = std::string(to_string(cfg.method));
    if (node.priority)
        j["priority"] = *node.priority;
    if (!cfg.groups.empty()) {
        j["groups"] = json::array();
        for (const auto& g : cfg.groups)
            j["groups"].push_back({{"id", g.id}, {"members", g.members}, {"priority", g.priority}});
    }
    if (!cfg.critical.empty())
        j["critical"] = cfg.critical;
    if (cfg.method == Method::WemThen || cfg.fallback != FallbackMethod::Wlam)
        j["fallback"] = std::string(to_string(cfg.fallback));
    if (cfg.adequacy_threshold)
        j["threshold"] = *cfg.adequacy_threshold;
    j["children"] = json::array();
    for (const auto& c : node.children)
        j["children"].push_back(node_to_json(c));
    return j;
}

} // namespace detail

/// Parses and validates a description. Throws DescriptionError listing every
/// problem found (syntax errors carry a line and column).
inline SystemDescription parse_description(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, column] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw DescriptionError({{"line " + std::to_string(line) + ", column " +
                                     std::to_string(column),
                                 e.what()}},
                               true);
    }
    return detail::DescriptionParser{}.run(doc);
}

inline SystemDescription load_description(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_description(buf.str());
}

inline nlohmann::json to_json(const SystemDescription& desc) {
    using nlohmann::json;
    json j;
    j["scale"] = {{"min", desc.scale.min()}, {"max", desc.scale.max()}};
    j["elements"] = json::array();
    for (const auto& e : desc.elements) {
        json x{{"id", e.id}, {"evaluation", e.evaluation}};
        if (e.priority)
            x["priority"] = *e.priority;
        j["elements"].push_back(std::move(x));
    }
    if (!desc.groups.empty()) {
        j["groups"] = json::array();
        for (const auto& g : desc.groups)
            j["groups"].push_back({{"id", g.id}, {"members", g.members}, {"priority", g.priority}});
    }
    if (desc.hierarchy)
        j["hierarchy"] = detail::node_to_json(*desc.hierarchy);
    if (desc.network) {
        json net;
        net["nodes"] = desc.network->nodes;
        net["edges"] = json::array();
        for (const auto& e : desc.network->edges)
            net["edges"].push_back({e.from, e.to});
        net["flows"] = json::array();
        for (const auto& f : desc.network->flows)
            net["flows"].push_back({{"route", f.route}, {"volume", f.volume}});
        j["network"] = std::move(net);
    }
    return j;
}

inline std::string serialize(const SystemDescription& desc) { return to_json(desc).dump(2) + "\n"; }

} // namespace netagg
