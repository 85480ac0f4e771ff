// netagg: aggregated evaluation of hierarchical network systems.
//
// Exit codes: 0 ok, 1 usage or unreadable input, 2 validation failure,
// 3 adequacy warning raised by `compare`.

#include "netagg/netagg.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace netagg;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitWarning = 3;

/// Thrown for flag combinations the description cannot satisfy.
class UsageError : public netagg::Error {
public:
    using netagg::Error::Error;
};

std::vector<std::string> split_ids(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream in(csv);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

std::string render_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

struct EvaluateOptions {
    std::string input;
    std::string method;
    std::string format = "text";
    std::string critical;
    std::string fallback;
};

/// Highest-priority group, else every element at the top priority.
std::vector<std::string> default_critical(const SystemDescription& desc) {
    if (!desc.groups.empty()) {
        const Group* best = &desc.groups.front();
        for (const auto& g : desc.groups)
            if (g.priority > best->priority)
                best = &g;
        return best->members;
    }
    const auto p = desc.priorities();
    double top = 0.0;
    for (const auto& x : p.entries())
        top = std::max(top, x.weight);
    std::vector<std::string> out;
    for (const auto& x : p.entries())
        if (x.weight == top)
            out.push_back(x.id);
    return out;
}

int run_flat_method(const SystemDescription& desc, const EvaluateOptions& opt) {
    const auto evals = desc.evaluations();
    const auto method = parse_method(opt.method);
    if (!method)
        throw UsageError("unknown method '" + opt.method + "'");

    nlohmann::json j{{"method", opt.method}};
    std::string csv = "method,value\n";
    double value = 0.0;

    switch (*method) {
    case Method::Wem:
        value = wem(evals);
        j["weakest_ids"] = weakest_ids(evals);
        break;
    case Method::Wlam:
        value = wlam(evals, desc.priorities());
        break;
    case Method::Nam:
        if (!desc.has_uniform_priorities())
            throw ValidationError("elements", "NAM cannot take element priorities into account; "
                                                "elements carry distinct priorities");
        value = nam(evals);
        break;
    case Method::HybridGrouped: {
        auto sys = desc.grouped();
        if (!sys)
            throw ValidationError("groups", "hybrid method requires a 'groups' section");
        value = hybrid_grouped(*sys);
        break;
    }
    case Method::WemThen: {
        const auto critical = opt.critical.empty() ? default_critical(desc) : split_ids(opt.critical);
        FallbackMethod fallback = desc.has_uniform_priorities() ? FallbackMethod::Nam
                                                                : FallbackMethod::Wlam;
        if (opt.fallback == "wlam")
            fallback = FallbackMethod::Wlam;
        else if (opt.fallback == "nam")
            fallback = FallbackMethod::Nam;
        else if (!opt.fallback.empty())
            throw UsageError("--fallback must be wlam or nam");
        if (fallback == FallbackMethod::Nam && !desc.has_uniform_priorities())
            throw ValidationError("elements", "NAM fallback cannot take element priorities into account");
        const auto res = wem_then_aggregate(evals, desc.priorities(), critical, fallback);
        j["critical"] = critical;
        j["fallback"] = std::string(to_string(fallback));
        j["critical_wem"] = res.critical_wem;
        j["aggregate"] = res.aggregate;
        j["adequacy"] = res.adequacy;
        if (opt.format == "json")
            std::cout << render_json(j);
        else if (opt.format == "csv")
            std::cout << "method,critical_wem,aggregate,adequacy\nwem-then," +
                             fmt::fixed6(res.critical_wem) + ',' + fmt::fixed6(res.aggregate) +
                             ',' + fmt::fixed6(res.adequacy) + '\n';
        else
            std::cout << "critical_wem=" << fmt::sig6(res.critical_wem)
                      << " aggregate=" << fmt::sig6(res.aggregate)
                      << " adequacy=" << fmt::sig6(res.adequacy) << '\n';
        return kExitOk;
    }
    }

    j["value"] = value;
    if (opt.format == "json")
        std::cout << render_json(j);
    else if (opt.format == "csv")
        std::cout << csv << opt.method << ',' << fmt::fixed6(value) << '\n';
    else
        std::cout << fmt::sig6(value) << '\n';
    return kExitOk;
}

void print_comparison(const std::vector<MethodComparison>& rows, const std::string& format) {
    if (format == "json")
        std::cout << render_json(fmt::comparison_json(rows));
    else if (format == "csv")
        std::cout << fmt::comparison_csv(rows);
    else
        std::cout << fmt::comparison_text(rows);
}

int run_evaluate(const EvaluateOptions& opt) {
    const auto desc = load_description(opt.input);
    if (!opt.method.empty())
        return run_flat_method(desc, opt);
    const auto root = desc.effective_hierarchy();
    if (desc.hierarchy) {
        const auto report = aggregate(root, desc.scale);
        if (opt.format == "json")
            std::cout << render_json(fmt::to_json(report));
        else if (opt.format == "csv")
            std::cout << fmt::report_csv(report);
        else
            std::cout << fmt::report_text(report);
        return kExitOk;
    }
    print_comparison(compare_methods(root, desc.scale, 1.0), opt.format);
    return kExitOk;
}

struct CompareOptions {
    std::string input;
    double threshold = 0.5;
    std::string format = "text";
};

int run_compare(const CompareOptions& opt) {
    const auto desc = load_description(opt.input);
    const auto rows = compare_methods(desc.effective_hierarchy(), desc.scale, opt.threshold);
    print_comparison(rows, opt.format);
    for (const auto& r : rows)
        if (!r.warnings.empty())
            return kExitWarning;
    return kExitOk;
}

struct SweepOptions {
    std::string input;
    std::string vary;
    double from = 0.0;
    double to = 100.0;
    int steps = 101;
    std::string out;
};

int run_sweep(const SweepOptions& opt) {
    const auto desc = load_description(opt.input);
    const auto root = desc.effective_hierarchy();
    const auto* target = find_node(root, opt.vary);
    if (!target)
        throw UsageError("unknown --vary id '" + opt.vary + "'");
    const auto result = sweep(root, desc.scale, opt.vary, opt.from, opt.to, opt.steps);
    const auto csv = fmt::sweep_csv(result);
    if (opt.out.empty() || opt.out == "-") {
        std::cout << csv;
    } else {
        std::ofstream f(opt.out, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoError("cannot write '" + opt.out + "'");
        f << csv;
    }
    return kExitOk;
}

struct PriorityOptions {
    std::string input;
    std::string strategy = "degree";
    std::optional<double> tolerance;
    std::string normalization = "max";
    std::string format = "text";
};

int run_priorities(const PriorityOptions& opt) {
    const auto desc = load_description(opt.input);
    if (!desc.network)
        throw ValidationError("network", "description has no network section");
    const auto basis = parse_basis(opt.strategy);
    if (!basis)
        throw UsageError("unknown strategy '" + opt.strategy + "'");
    const auto strategy = PriorityStrategy::for_basis(
        *basis, opt.normalization == "none" ? Normalization::None : Normalization::MaxToOne);
    const auto ranked = rank_nodes(*desc.network, strategy);
    std::vector<Group> groups;
    if (opt.tolerance) {
        std::vector<Priority> pv;
        for (const auto& r : ranked)
            pv.push_back({r.id, r.priority});
        groups = group_by_priority(PriorityVector(std::move(pv)), *opt.tolerance);
    }
    if (opt.format == "json")
        std::cout << render_json(fmt::priorities_json(ranked, groups));
    else if (opt.format == "csv")
        std::cout << fmt::priorities_csv(ranked, groups);
    else
        std::cout << fmt::priorities_text(ranked, groups);
    return kExitOk;
}

template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const netagg::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aggregated quality evaluation of hierarchical network systems"};
    app.require_subcommand(1);
    const std::vector<std::string> formats{"text", "json", "csv"};

    EvaluateOptions eval_opt;
    auto* evaluate = app.add_subcommand("evaluate", "Aggregate a system description");
    evaluate->add_option("--input", eval_opt.input, "System description (JSON)")->required();
    evaluate->add_option("--method", eval_opt.method, "Flat method over the elements")
        ->check(CLI::IsMember({"wem", "wlam", "nam", "hybrid", "wem-then"}));
    evaluate->add_option("--critical", eval_opt.critical, "Comma-separated critical ids (wem-then)");
    evaluate->add_option("--fallback", eval_opt.fallback, "wlam or nam (wem-then)")
        ->check(CLI::IsMember({"wlam", "nam"}));
    evaluate->add_option("--format", eval_opt.format)->check(CLI::IsMember(formats));

    CompareOptions cmp_opt;
    auto* compare = app.add_subcommand("compare", "Method comparison and adequacy table");
    compare->add_option("--input", cmp_opt.input, "System description (JSON)")->required();
    compare->add_option("--threshold", cmp_opt.threshold, "Adequacy warning threshold")
        ->check(CLI::Range(0.0, 1.0));
    compare->add_option("--format", cmp_opt.format)->check(CLI::IsMember(formats));

    SweepOptions sweep_opt;
    auto* sweep_cmd = app.add_subcommand("sweep", "Vary one element over a grid, emit CSV");
    sweep_cmd->add_option("--input", sweep_opt.input, "System description (JSON)")->required();
    sweep_cmd->add_option("--vary", sweep_opt.vary, "Element id to vary")->required();
    sweep_cmd->add_option("--from", sweep_opt.from)->required();
    sweep_cmd->add_option("--to", sweep_opt.to)->required();
    sweep_cmd->add_option("--steps", sweep_opt.steps)->required();
    sweep_cmd->add_option("--out", sweep_opt.out, "Output CSV path (stdout when omitted)");

    PriorityOptions prio_opt;
    auto* priorities = app.add_subcommand("priorities", "Rank network nodes by priority");
    priorities->add_option("--input", prio_opt.input, "System description (JSON)")->required();
    priorities->add_option("--strategy", prio_opt.strategy)
        ->required()
        ->check(CLI::IsMember({"degree", "betweenness", "flow", "combined"}));
    priorities->add_option("--group-tolerance", prio_opt.tolerance)->check(CLI::NonNegativeNumber);
    priorities->add_option("--normalization", prio_opt.normalization)
        ->check(CLI::IsMember({"max", "none"}));
    priorities->add_option("--format", prio_opt.format)->check(CLI::IsMember(formats));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*evaluate)
        return guarded([&] { return run_evaluate(eval_opt); });
    if (*compare)
        return guarded([&] { return run_compare(cmp_opt); });
    if (*sweep_cmd)
        return guarded([&] { return run_sweep(sweep_opt); });
    return guarded([&] { return run_priorities(prio_opt); });
}
