#include <catch2/catch_amalgamated.hpp>

#include "netagg/hierarchy.hpp"
#include "netagg/network.hpp"

using namespace netagg;
using Catch::Matchers::ContainsSubstring;

namespace {

Network triangle() {
    Network net;
    net.nodes = {"a", "b", "c"};
    net.edges = {{"a", "b"}, {"b", "c"}, {"c", "a"}};
    net.flows = {{{"a", "b", "c"}, 1.0}};
    return net;
}

HierarchyNode two_group_tree() {
    MethodConfig cfg;
    cfg.method = Method::HybridGrouped;
    cfg.groups = {{"g1", {"s1", "s2", "s3"}, 1.0}, {"g2", {"s4", "s5"}, 0.5}};
    return HierarchyNode::subsystem("system",
                                    {HierarchyNode::leaf("s1", 100.0, 1.0),
                                     HierarchyNode::leaf("s2", 100.0, 1.0),
                                     HierarchyNode::leaf("s3", 100.0, 1.0),
                                     HierarchyNode::leaf("s4", 50.0, 0.5),
                                     HierarchyNode::leaf("s5", 50.0, 0.5)},
                                    cfg);
}

} // namespace

TEST_CASE("validate_network accepts a consistent triangle", "[network]") {
    CHECK(validate_network(triangle()).empty());
}

TEST_CASE("validate_network names a flow over a missing edge", "[network]") {
    auto net = triangle();
    net.flows.push_back({{"a", "c"}, 2.0});
    const auto v = validate_network(net);
    REQUIRE(v.size() == 1);
    CHECK(v[0].subject == "flows/1");
    CHECK_THAT(v[0].message, ContainsSubstring("(a, c)"));
}

TEST_CASE("validate_network flags a duplicate edge once", "[network]") {
    auto net = triangle();
    net.edges.push_back({"a", "b"});
    const auto v = validate_network(net);
    REQUIRE(v.size() == 1);
    CHECK(v[0].subject == "edges/3");
    CHECK_THAT(v[0].message, ContainsSubstring("duplicate"));
}

TEST_CASE("validate_network catches the remaining structural problems", "[network]") {
    Network net;
    net.nodes = {"a", "b", "a"};
    net.edges = {{"a", "a"}, {"a", "zz"}};
    net.flows = {{{"a"}, 1.0}, {{"a", "b"}, 0.0}};
    const auto v = validate_network(net);
    auto has = [&](std::string_view subject, std::string_view text) {
        for (const auto& x : v)
            if (x.subject == subject && x.message.find(text) != std::string::npos)
                return true;
        return false;
    };
    CHECK(has("nodes/2", "duplicate node"));
    CHECK(has("edges/0", "self-loop"));
    CHECK(has("edges/1", "undeclared node 'zz'"));
    CHECK(has("flows/0", "at least two"));
    CHECK(has("flows/1", "volume"));
    CHECK(has("flows/1", "missing edge (a, b)"));
}

TEST_CASE("validate_hierarchy accepts the two-group system", "[hierarchy]") {
    CHECK(validate_hierarchy(two_group_tree(), Scale{}).empty());
}

TEST_CASE("validate_hierarchy reports out-of-range leaves", "[hierarchy]") {
    auto root = HierarchyNode::subsystem("s", {HierarchyNode::leaf("a", 120.0),
                                               HierarchyNode::leaf("b", 50.0)});
    const auto v = validate_hierarchy(root, Scale(0.0, 100.0));
    REQUIRE(v.size() == 1);
    CHECK(v[0].subject == "a");
    CHECK_THAT(v[0].message, ContainsSubstring("outside scale"));
}

TEST_CASE("validate_hierarchy forbids weighted children under NAM", "[hierarchy]") {
    MethodConfig cfg;
    cfg.method = Method::Nam;
    auto root = HierarchyNode::subsystem("s", {HierarchyNode::leaf("a", 10.0, 2.0),
                                               HierarchyNode::leaf("b", 50.0)},
                                         cfg);
    const auto v = validate_hierarchy(root, Scale{});
    REQUIRE(v.size() == 1);
    CHECK_THAT(v[0].message, ContainsSubstring("NAM"));
}

TEST_CASE("validate_hierarchy checks method configuration coherence", "[hierarchy]") {
    SECTION("hybrid without groups") {
        MethodConfig cfg;
        cfg.method = Method::HybridGrouped;
        auto root = HierarchyNode::subsystem("s", {HierarchyNode::leaf("a", 1.0)}, cfg);
        CHECK_FALSE(validate_hierarchy(root, Scale{}).empty());
    }
    SECTION("grouping that is not a partition of the children") {
        auto root = two_group_tree();
        root.config.groups.pop_back();
        const auto v = validate_hierarchy(root, Scale{});
        REQUIRE(v.size() == 1);
        CHECK_THAT(v[0].message, ContainsSubstring("s4"));
    }
    SECTION("wem-then without a critical set, or with a stranger in it") {
        MethodConfig cfg;
        cfg.method = Method::WemThen;
        auto root = HierarchyNode::subsystem("s", {HierarchyNode::leaf("a", 1.0)}, cfg);
        CHECK(validate_hierarchy(root, Scale{}).size() == 1);
        root.config.critical = {"zz"};
        const auto v = validate_hierarchy(root, Scale{});
        REQUIRE(v.size() == 1);
        CHECK_THAT(v[0].message, ContainsSubstring("zz"));
    }
    SECTION("threshold outside [0,1]") {
        MethodConfig cfg;
        cfg.adequacy_threshold = 1.5;
        auto root = HierarchyNode::subsystem("s", {HierarchyNode::leaf("a", 1.0)}, cfg);
        CHECK(validate_hierarchy(root, Scale{}).size() == 1);
    }
}

TEST_CASE("validate_hierarchy is total on malformed trees", "[hierarchy]") {
    HierarchyNode odd;
    odd.kind = HierarchyNode::Kind::Leaf;
    odd.value = std::nan("");
    odd.children.push_back(HierarchyNode::leaf("", -5.0, -1.0));
    auto root = HierarchyNode::subsystem("dup", {odd, HierarchyNode::subsystem("dup", {})});
    std::vector<Violation> v;
    REQUIRE_NOTHROW(v = validate_hierarchy(root, Scale{}));
    CHECK(v.size() >= 4);
}
