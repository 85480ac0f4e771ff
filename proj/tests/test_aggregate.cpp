#include <catch2/catch_amalgamated.hpp>

#include "netagg/aggregate.hpp"
#include "oracles.hpp"

#include <random>

using namespace netagg;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

HierarchyNode flat(const std::vector<double>& values, Method method,
                   std::vector<Group> groups = {}) {
    std::vector<HierarchyNode> leaves;
    for (std::size_t i = 0; i < values.size(); ++i)
        leaves.push_back(HierarchyNode::leaf("s" + std::to_string(i + 1), values[i]));
    MethodConfig cfg;
    cfg.method = method;
    cfg.groups = std::move(groups);
    return HierarchyNode::subsystem("system", std::move(leaves), cfg);
}

HierarchyNode two_groups(double first) {
    auto root = flat({first, 100.0, 100.0, 50.0, 50.0}, Method::HybridGrouped,
                     {{"g1", {"s1", "s2", "s3"}, 1.0}, {"g2", {"s4", "s5"}, 0.5}});
    for (std::size_t i = 0; i < 5; ++i)
        root.children[i].priority = i < 3 ? 1.0 : 0.5;
    return root;
}

/// Random tree of depth <= 3 with unweighted NAM/WLAM/WEM subsystems.
HierarchyNode random_tree(std::mt19937_64& rng, int depth, int& counter) {
    std::uniform_int_distribution<int> fanout(1, 4);
    std::uniform_real_distribution<double> value(0.0, 100.0);
    std::uniform_int_distribution<int> method(0, 2);
    std::vector<HierarchyNode> kids;
    const int n = fanout(rng);
    for (int i = 0; i < n; ++i) {
        if (depth > 0 && std::bernoulli_distribution(0.4)(rng))
            kids.push_back(random_tree(rng, depth - 1, counter));
        else
            kids.push_back(HierarchyNode::leaf("l" + std::to_string(counter++), value(rng)));
    }
    MethodConfig cfg;
    cfg.method = std::array{Method::Wem, Method::Wlam, Method::Nam}[method(rng)];
    return HierarchyNode::subsystem("n" + std::to_string(counter++), std::move(kids), cfg);
}

} // namespace

TEST_CASE("aggregate reproduces the flat hybrid on the two-group system", "[aggregate]") {
    const auto report = aggregate(two_groups(100.0), Scale{});
    const GroupedSystem sys(EvaluationVector::from_values({100.0, 100.0, 100.0, 50.0, 50.0}),
                            {{"g1", {"s1", "s2", "s3"}, 1.0}, {"g2", {"s4", "s5"}, 0.5}});
    CHECK(report.value == hybrid_grouped(sys));
    CHECK_THAT(report.value, WithinAbs(83.333, 1e-3));
    CHECK(report.method == "hybrid");
    CHECK(report.weakest_ids == std::vector<std::string>{"s4", "s5"});
}

TEST_CASE("aggregate on a single leaf echoes the value", "[aggregate]") {
    const auto report = aggregate(HierarchyNode::leaf("only", 42.5), Scale{});
    CHECK(report.value == 42.5);
    CHECK(report.method == "leaf");
    CHECK(report.warnings.empty());
    CHECK(report.children.empty());
}

TEST_CASE("aggregate applies NAM at a subsystem", "[aggregate]") {
    const auto report = aggregate(flat({10.0, 100.0, 100.0}, Method::Nam), Scale{});
    CHECK_THAT(report.value, WithinAbs(20.408, 1e-3));
    CHECK(report.weakest_ids == std::vector<std::string>{"s1"});
    CHECK_THAT(report.adequacy, WithinRel(0.51, 1e-12));
}

TEST_CASE("aggregate rejects invalid hierarchies with the full violation list", "[aggregate]") {
    auto root = flat({120.0, -3.0}, Method::Wlam);
    try {
        aggregate(root, Scale{});
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.violations().size() == 2);
    }
}

TEST_CASE("WEM_THEN nodes report the signed adequacy", "[aggregate]") {
    auto root = flat({50.0, 50.0, 100.0}, Method::WemThen);
    root.config.critical = {"s3"};
    root.config.fallback = FallbackMethod::Wlam;
    root.config.adequacy_threshold = 0.2;
    const auto report = aggregate(root, Scale{});
    CHECK_THAT(report.value, WithinRel(200.0 / 3.0, 1e-12));
    CHECK_THAT(report.adequacy, WithinRel(-0.5, 1e-12));
    CHECK(report.warnings.empty());

    root.config.critical = {"s1"};
    const auto weak = aggregate(root, Scale{});
    CHECK_THAT(weak.adequacy, WithinRel(0.25, 1e-12));
    REQUIRE(weak.warnings.size() == 1);
    CHECK_THAT(weak.warnings[0], ContainsSubstring("s1"));
}

TEST_CASE("two-level composition equals the flat grouped hybrid", "[aggregate][property]") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 1 + trial % 4;
        std::vector<HierarchyNode> subsystems;
        std::vector<Evaluation> flat_entries;
        std::vector<Group> flat_groups;
        std::vector<Group> root_groups;
        int leaf_id = 0;
        for (std::size_t g = 0; g < m; ++g) {
            const auto xs = oracle::random_values(rng, 1 + (trial + g) % 5, 0.0, 100.0);
            const double prio = oracle::random_values(rng, 1, 0.1, 2.0)[0];
            std::vector<HierarchyNode> leaves;
            Group fg{"g" + std::to_string(g), {}, prio};
            for (double x : xs) {
                const std::string id = "e" + std::to_string(leaf_id++);
                leaves.push_back(HierarchyNode::leaf(id, x));
                flat_entries.push_back({id, x});
                fg.members.push_back(id);
            }
            MethodConfig cfg;
            cfg.method = Method::Nam;
            const std::string sub_id = "sub" + std::to_string(g);
            subsystems.push_back(HierarchyNode::subsystem(sub_id, std::move(leaves), cfg));
            flat_groups.push_back(fg);
            root_groups.push_back({fg.id, {sub_id}, prio});
        }
        MethodConfig root_cfg;
        root_cfg.method = Method::HybridGrouped;
        root_cfg.groups = root_groups;
        const auto root = HierarchyNode::subsystem("root", std::move(subsystems), root_cfg);
        const auto report = aggregate(root, Scale{});

        // Each subsystem is a singleton group at the root, so the root is WLAM
        // over the subsystem NAM values, which is the flat hybrid.
        const GroupedSystem sys(EvaluationVector(flat_entries), flat_groups);
        CHECK_THAT(report.value, WithinRel(hybrid_grouped(sys), 1e-12));
        CHECK(count_nodes(root) == 1 + m + flat_entries.size());
    }
}

TEST_CASE("report tree mirrors the input tree", "[aggregate][property]") {
    std::mt19937_64 rng(5);
    auto same_shape = [](auto&& self, const HierarchyNode& n, const AggregationReport& r) -> bool {
        if (n.id != r.id || n.children.size() != r.children.size())
            return false;
        for (std::size_t i = 0; i < n.children.size(); ++i)
            if (!self(self, n.children[i], r.children[i]))
                return false;
        return true;
    };
    for (int trial = 0; trial < 200; ++trial) {
        int counter = 0;
        const auto root = random_tree(rng, 3, counter);
        const auto report = aggregate(root, Scale{});
        CHECK(same_shape(same_shape, root, report));
        CHECK(report.value >= 0.0);
        CHECK(report.value <= 100.0);
    }
}

TEST_CASE("compare_methods on the production example", "[compare]") {
    const auto rows = compare_methods(flat({10.0, 100.0, 100.0}, Method::Wlam), Scale{}, 0.5);
    REQUIRE(rows.size() == 1);
    const auto& r = rows[0];
    CHECK(r.wem == 10.0);
    CHECK(r.wlam == 70.0);
    CHECK_THAT(*r.nam, WithinAbs(20.408, 1e-3));
    CHECK_FALSE(r.hybrid.has_value());
    CHECK_THAT(r.sigma_12, WithinAbs(0.857, 1e-3));
    CHECK_THAT(*r.sigma_13, WithinAbs(0.51, 1e-9));
    REQUIRE(r.warnings.size() == 1);
    CHECK_THAT(r.warnings[0], ContainsSubstring("s1"));
}

TEST_CASE("compare_methods on equal children is quiet", "[compare]") {
    const auto rows = compare_methods(flat({64.0, 64.0, 64.0}, Method::Nam), Scale{}, 0.0);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].sigma_12 == 0.0);
    CHECK(*rows[0].sigma_13 == 0.0);
    CHECK(rows[0].warnings.empty());
}

TEST_CASE("compare_methods hides NAM when children carry distinct weights", "[compare]") {
    const auto rows = compare_methods(two_groups(100.0), Scale{}, 0.5);
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].nam.has_value());
    CHECK_FALSE(rows[0].sigma_13.has_value());
    CHECK_THAT(*rows[0].hybrid, WithinRel(250.0 / 3.0, 1e-12));
    CHECK_THAT(rows[0].wlam, WithinRel(87.5, 1e-12));
    CHECK_THROWS_AS(compare_methods(two_groups(100.0), Scale{}, 1.5), Error);
}

TEST_CASE("compare_methods rows respect the upper ordering bound", "[compare][property]") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        int counter = 0;
        const auto root = random_tree(rng, 2, counter);
        for (const auto& row : compare_methods(root, Scale{}, 0.5)) {
            REQUIRE(row.nam.has_value());
            CHECK(approx_le(row.wem, row.wlam));
            CHECK(approx_le(*row.nam, row.wlam));
            CHECK(*row.nam >= 0.0);
        }
    }
}

TEST_CASE("sweep over the one-weak-element family", "[sweep]") {
    const auto result = sweep(flat({0.0, 100.0, 100.0}, Method::Wlam), Scale{}, "s1", 0.0, 100.0, 101);
    REQUIRE(result.rows.size() == 101);
    CHECK_FALSE(result.has_hybrid);
    const auto& at10 = result.rows[10];
    CHECK(at10.varied == 10.0);
    CHECK(at10.wem == 10.0);
    CHECK(at10.wlam == 70.0);
    CHECK_THAT(*at10.nam, WithinAbs(20.408163, 1e-6));

    for (std::size_t i = 1; i < result.rows.size(); ++i) {
        CHECK(result.rows[i].wem >= result.rows[i - 1].wem);
        CHECK(result.rows[i].wlam >= result.rows[i - 1].wlam);
        CHECK(*result.rows[i].nam >= *result.rows[i - 1].nam);
    }
    CHECK(result.rows.back().varied == 100.0);
    CHECK(result.rows.back().nam == 100.0);
}

TEST_CASE("sweep edge cases", "[sweep]") {
    const auto root = flat({0.0, 100.0, 100.0}, Method::Wlam);
    const auto same = sweep(root, Scale{}, "s1", 40.0, 40.0, 5);
    for (const auto& r : same.rows) {
        CHECK(r.varied == 40.0);
        CHECK(r.wlam == same.rows[0].wlam);
        CHECK(r.nam == same.rows[0].nam);
    }
    const auto two = sweep(root, Scale{}, "s1", 0.0, 100.0, 2);
    REQUIRE(two.rows.size() == 2);
    CHECK(two.rows[0].varied == 0.0);
    CHECK(two.rows[1].varied == 100.0);

    CHECK_THROWS_WITH(sweep(root, Scale{}, "ghost", 0.0, 1.0, 3), ContainsSubstring("ghost"));
    CHECK_THROWS_AS(sweep(root, Scale{}, "system", 0.0, 1.0, 3), Error);
    CHECK_THROWS_AS(sweep(root, Scale{}, "s1", 0.0, 1.0, 1), Error);
    CHECK_THROWS_AS(sweep(root, Scale{}, "s1", 0.0, 120.0, 3), Error);
}

TEST_CASE("sweep over the two-group system", "[sweep]") {
    const auto result = sweep(two_groups(0.0), Scale{}, "s1", 0.0, 100.0, 101);
    CHECK(result.has_hybrid);
    CHECK_FALSE(result.has_nam);
    CHECK_THAT(*result.rows.front().hybrid, WithinAbs(16.666667, 1e-6));
    CHECK_THAT(*result.rows.back().hybrid, WithinAbs(83.333333, 1e-6));
    for (const auto& r : result.rows)
        CHECK(r.wem == std::min(r.varied, 50.0));
}
