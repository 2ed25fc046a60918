#include "flowcast/scenario.hpp"

#include <algorithm>

#include "flowcast/io.hpp"

namespace flowcast {

std::string toString(ScenarioName name) {
    switch (name) {
        case ScenarioName::timeCost: return "timeCost";
        case ScenarioName::costOnly: return "costOnly";
        case ScenarioName::timeEnergyCost: return "timeEnergyCost";
    }
    return "timeCost";
}

ScenarioName scenarioNameFromString(const std::string& text) {
    if (text == "timeCost") return ScenarioName::timeCost;
    if (text == "costOnly") return ScenarioName::costOnly;
    if (text == "timeEnergyCost") return ScenarioName::timeEnergyCost;
    throw ParseError("unknown scenario: " + text);
}

Catalog sampleCatalog() {
    Catalog c;
    c.sites = {
        {"facility", SiteClass::facilityHPC, std::nullopt},
        {"edge-lab", SiteClass::edge, std::nullopt},
        {"cloud-a-east", SiteClass::cloudRegion, std::string("nimbus")},
        {"cloud-a-west", SiteClass::cloudRegion, std::string("nimbus")},
        {"cloud-b-east", SiteClass::cloudRegion, std::string("stratus")},
    };
    // Facility and edge capacity is sunk cost: zero marginal price.
    c.offers = {
        {"facility-microscope", "facility", 10.0, 16e9, 0, 0.0, std::nullopt, 0.0, 0.0, 500.0,
         100.0},
        {"facility-gpu-node", "facility", 50.0, 64e9, 1, 0.0, std::nullopt, 0.0, 0.0, 300.0,
         75.0},
        {"facility-hpc-a", "facility", 100.0, 256e9, 4, 0.0, std::nullopt, 0.0, 0.0, 800.0,
         200.0},
        {"facility-hpc-b", "facility", 100.0, 256e9, 4, 0.0, std::nullopt, 0.0, 0.0, 800.0,
         200.0},
        {"edge-kit", "edge-lab", 5.0, 8e9, 0, 0.0, std::nullopt, 0.0, 0.0, 40.0, 10.0},
        // Elastic batch pools for independent jobs; the west region prices
        // spot lower but reclaims it more often.
        {"nimbus-east-batch", "cloud-a-east", 800.0, 128e9, 0, 4.0, 1.2, 0.05, 120.0, 1200.0,
         300.0},
        {"nimbus-west-batch", "cloud-a-west", 800.0, 128e9, 0, 4.0, 0.4, 0.12, 120.0, 1200.0,
         300.0},
        // Large-memory training nodes, identical except for power draw.
        {"nimbus-east-himem", "cloud-a-east", 400.0, 768e9, 8, 12.0, 4.0, 0.08, 180.0, 2500.0,
         600.0},
        {"stratus-east-himem", "cloud-b-east", 400.0, 768e9, 8, 12.0, 4.0, 0.06, 180.0, 3000.0,
         700.0},
    };
    c.links = {
        {"facility", "cloud-a-east", 1e9, 0.05, 0.0},
        {"cloud-a-east", "facility", 1e9, 0.05, 9e-11},
        {"facility", "cloud-a-west", 8e8, 0.07, 0.0},
        {"cloud-a-west", "facility", 8e8, 0.07, 9e-11},
        {"cloud-a-east", "cloud-a-west", 2e9, 0.02, 2e-11},
        {"cloud-a-west", "cloud-a-east", 2e9, 0.02, 2e-11},
        {"facility", "cloud-b-east", 1e9, 0.06, 0.0},
        {"cloud-b-east", "facility", 1e9, 0.06, 9e-11},
        {"cloud-a-east", "cloud-b-east", 1.5e9, 0.03, 2e-11},
        {"cloud-b-east", "cloud-a-east", 1.5e9, 0.03, 2e-11},
        {"edge-lab", "facility", 2e8, 0.01, 0.0},
        {"facility", "edge-lab", 2e8, 0.01, 0.0},
    };
    c.defaultLink = {"", "", 2.5e8, 0.08, 5e-11};
    c.rebuildIndex();
    checkCatalog(c);
    return c;
}

ScenarioSpec builtinScenario(ScenarioName name) {
    ScenarioSpec spec;
    spec.name = toString(name);
    spec.workflow = stemWorkflow();
    spec.catalog = sampleCatalog();
    spec.compressionPolicy = CompressionPolicy::crossSiteDownloads;
    spec.compressionParams = {10.0, 1e9, 1e9};
    spec.billing = BillingGranularity::perSecond;
    spec.preemptionEnabled = true;
    spec.seed = 42;
    switch (name) {
        case ScenarioName::timeCost:
            spec.objective = {1.0, 1.0, 0.0};
            break;
        case ScenarioName::costOnly:
            spec.objective = {0.0, 1.0, 0.0};
            // Keep heavy training off the cloud entirely.
            spec.constraints.siteAllowLists["AI-Training"] = {"facility"};
            break;
        case ScenarioName::timeEnergyCost:
            spec.objective = {1.0, 1.0, 1.0};
            break;
    }
    return spec;
}

WorkflowGraph scenarioWorkflow(const ScenarioSpec& spec, const std::filesystem::path& baseDir) {
    WorkflowGraph graph;
    if (const auto* inline_ = std::get_if<WorkflowGraph>(&spec.workflow)) {
        graph = *inline_;
    } else {
        graph = parseWorkflow(readFile(baseDir / std::get<std::string>(spec.workflow)));
    }
    for (const auto& [task, site] : spec.constraints.pins) {
        for (auto& t : graph.tasks) {
            if (t.id == task) t.pinnedSite = site;
        }
    }
    for (const auto& [task, tolerant] : spec.constraints.spotTolerant) {
        for (auto& t : graph.tasks) {
            if (t.id == task) t.spotTolerant = tolerant;
        }
    }
    if (spec.innerIterations) graph.innerIterations = *spec.innerIterations;
    if (spec.outerIterations) graph.outerIterations = *spec.outerIterations;
    return graph;
}

Catalog scenarioCatalog(const ScenarioSpec& spec, const std::filesystem::path& baseDir) {
    if (const auto* inline_ = std::get_if<Catalog>(&spec.catalog)) {
        Catalog c = *inline_;
        c.rebuildIndex();
        return c;
    }
    return parseCatalog(readFile(baseDir / std::get<std::string>(spec.catalog)));
}

namespace {

ScenarioOutcome runScenarioImpl(const ScenarioSpec& spec, const std::filesystem::path& baseDir,
                                bool withComparison) {
    ScenarioOutcome outcome;
    outcome.spec = spec;
    WorkflowGraph graph = scenarioWorkflow(spec, baseDir);
    Catalog catalog = scenarioCatalog(spec, baseDir);
    outcome.spec.workflow = graph;
    outcome.spec.catalog = catalog;

    auto violations = validate(graph);
    if (!violations.empty()) {
        throw InvalidGraphError("scenario workflow invalid: " + violations.front().describe());
    }
    outcome.instances = unroll(graph);

    ScheduleOptions options;
    options.compressionPolicy = spec.compressionPolicy;
    options.compressionParams = spec.compressionParams;
    options.criticalFlowCount = spec.criticalFlowCount;
    options.brokered = spec.brokered;
    options.siteAllowLists = spec.constraints.siteAllowLists;
    outcome.placement = schedule(outcome.instances, catalog, spec.objective, options);

    SimConfig config;
    config.seed = spec.seed;
    config.billing = spec.billing;
    config.compressionPolicy = spec.compressionPolicy;
    config.compressionParams = spec.compressionParams;
    config.preemptionEnabled = spec.preemptionEnabled;
    outcome.report = simulate(outcome.instances, outcome.placement, catalog, config);

    if (withComparison) {
        for (ScenarioName name :
             {ScenarioName::timeCost, ScenarioName::costOnly, ScenarioName::timeEnergyCost}) {
            ScenarioSpec other = builtinScenario(name);
            ScenarioOutcome run = runScenarioImpl(other, baseDir, false);
            outcome.comparison.push_back({other.name, run.report.makespan, run.report.totalCost,
                                          run.report.totalEnergy});
        }
    }
    return outcome;
}

}  // namespace

ScenarioOutcome runScenario(const ScenarioSpec& spec, const std::filesystem::path& baseDir) {
    return runScenarioImpl(spec, baseDir, true);
}

}  // namespace flowcast
