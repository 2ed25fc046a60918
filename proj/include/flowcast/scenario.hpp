#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flowcast/catalog.hpp"
#include "flowcast/scheduler.hpp"
#include "flowcast/sim.hpp"
#include "flowcast/types.hpp"
#include "flowcast/workflow.hpp"

namespace flowcast {

enum class ScenarioName { timeCost, costOnly, timeEnergyCost };

std::string toString(ScenarioName name);
ScenarioName scenarioNameFromString(const std::string& text);

struct ScenarioConstraints {
    std::map<TaskId, SiteId> pins;
    std::map<TaskId, bool> spotTolerant;
    std::map<TaskId, std::vector<SiteId>> siteAllowLists;

    bool operator==(const ScenarioConstraints&) const = default;
};

// A reproducible experiment: workflow + catalog (by reference or inline),
// objective weights, constraints and simulation knobs.
struct ScenarioSpec {
    std::string name;
    std::variant<std::string, WorkflowGraph> workflow;  // file reference or inline
    std::variant<std::string, Catalog> catalog;
    Objective objective;
    ScenarioConstraints constraints;
    std::optional<int> innerIterations;
    std::optional<int> outerIterations;
    CompressionPolicy compressionPolicy = CompressionPolicy::off;
    CompressionParams compressionParams{};
    BillingGranularity billing = BillingGranularity::perSecond;
    bool preemptionEnabled = false;
    bool brokered = false;
    int criticalFlowCount = 10;
    std::uint64_t seed = 0;

    bool operator==(const ScenarioSpec&) const = default;
};

// The sample continuum fabric shipped with the toolkit: a facility, an edge
// kit and three cloud regions across two providers with distinct spot
// pricing.
Catalog sampleCatalog();

// Built-in scenario definitions with inline workflow and catalog.
ScenarioSpec builtinScenario(ScenarioName name);

struct ComparisonRow {
    std::string scenario;
    double makespan = 0.0;
    double cost = 0.0;
    double energy = 0.0;

    bool operator==(const ComparisonRow&) const = default;
};

struct ScenarioOutcome {
    ScenarioSpec spec;                       // with inputs resolved inline
    InstanceGraph instances;
    Placement placement;
    SimReport report;
    std::vector<ComparisonRow> comparison;   // the three built-in scenarios

    bool operator==(const ScenarioOutcome&) const = default;
};

// Loads referenced files (relative to baseDir), applies constraints,
// schedules, simulates and fills the cross-scenario comparison table.
ScenarioOutcome runScenario(const ScenarioSpec& spec,
                            const std::filesystem::path& baseDir = ".");

// The workflow with scenario constraints applied and iteration counts
// resolved (exposed for tests and the CLI).
WorkflowGraph scenarioWorkflow(const ScenarioSpec& spec,
                               const std::filesystem::path& baseDir = ".");
Catalog scenarioCatalog(const ScenarioSpec& spec, const std::filesystem::path& baseDir = ".");

}  // namespace flowcast
