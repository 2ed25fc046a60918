#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "flowcast/io.hpp"

namespace fs = std::filesystem;
using namespace flowcast;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
    std::string outDir = ".";
    std::optional<std::uint64_t> seed;
};

fs::path outPath(const CommonOpts& opts, const std::string& name) {
    return fs::path(opts.outDir) / name;
}

int cmdValidate(const std::string& workflowFile) {
    WorkflowGraph graph = parseWorkflow(readFile(workflowFile));
    auto violations = validate(graph);
    if (violations.empty()) {
        std::cout << "valid\n";
        return kExitOk;
    }
    for (const auto& v : violations) std::cout << v.describe() << "\n";
    return kExitFailure;
}

int cmdAnalyze(const std::string& traceFile, const CommonOpts& opts) {
    auto events = parseTrace(readFile(traceFile));
    DFLGraph graph = ingest(events);
    writeFile(outPath(opts, "dfl.dot"), exportDot(graph));
    if (!graph.empty()) {
        SeverityReport report = severity(graph);
        writeFile(outPath(opts, "severity.txt"), severityText(report));
        writeFile(outPath(opts, "severity.csv"), severityCsv(report));
        std::cout << severityText(report);
    } else {
        std::cout << "empty trace\n";
    }
    for (const auto& data : underProducedData(graph)) {
        std::cout << "note: data " << data << " reads more bytes than were written\n";
    }
    return kExitOk;
}

ScenarioSpec loadScenario(const std::string& scenarioFile, const CommonOpts& opts) {
    ScenarioSpec spec = parseScenario(readFile(scenarioFile));
    if (opts.seed) spec.seed = *opts.seed;
    return spec;
}

int cmdSchedule(const std::string& scenarioFile, const CommonOpts& opts) {
    ScenarioSpec spec = loadScenario(scenarioFile, opts);
    fs::path base = fs::path(scenarioFile).parent_path();
    WorkflowGraph graph = scenarioWorkflow(spec, base);
    Catalog catalog = scenarioCatalog(spec, base);
    InstanceGraph instances = unroll(graph);
    ScheduleOptions options;
    options.compressionPolicy = spec.compressionPolicy;
    options.compressionParams = spec.compressionParams;
    options.criticalFlowCount = spec.criticalFlowCount;
    options.brokered = spec.brokered;
    options.siteAllowLists = spec.constraints.siteAllowLists;
    Placement placement = schedule(instances, catalog, spec.objective, options);
    writeFile(outPath(opts, "placement.json"), serialize(placement));
    std::cout << "placed " << placement.assignments.size() << " instances\n";
    return kExitOk;
}

void writeScenarioOutputs(const ScenarioOutcome& outcome, const CommonOpts& opts) {
    writeFile(outPath(opts, "placement.json"), serialize(outcome.placement));
    writeFile(outPath(opts, "report.json"), serialize(outcome.report));
    writeFile(outPath(opts, "timeline.csv"), timelineCsv(outcome.report));
    writeFile(outPath(opts, "events.txt"), eventLogText(outcome.report));
    if (!outcome.comparison.empty()) {
        writeFile(outPath(opts, "comparison.csv"), comparisonCsv(outcome.comparison));
    }
    std::cout << "makespan " << formatDouble(outcome.report.makespan) << " s, cost "
              << formatDouble(outcome.report.totalCost) << " $, energy "
              << formatDouble(outcome.report.totalEnergy) << " J\n";
}

int cmdSimulate(const std::string& scenarioFile, const CommonOpts& opts) {
    ScenarioSpec spec = loadScenario(scenarioFile, opts);
    ScenarioOutcome outcome = runScenario(spec, fs::path(scenarioFile).parent_path());
    outcome.comparison.clear();
    writeScenarioOutputs(outcome, opts);
    return kExitOk;
}

int cmdScenario(const std::string& name, const CommonOpts& opts) {
    ScenarioSpec spec = builtinScenario(scenarioNameFromString(name));
    if (opts.seed) spec.seed = *opts.seed;
    ScenarioOutcome outcome = runScenario(spec);
    writeFile(outPath(opts, "scenario.json"), serialize(outcome.spec));
    writeScenarioOutputs(outcome, opts);
    return kExitOk;
}

int cmdBroker(const std::string& requirementFile, const std::string& catalogFile,
              double durationHours, const std::string& objectiveSpec, const CommonOpts& opts) {
    Requirement req = parseRequirement(readFile(requirementFile));
    Catalog catalog = parseCatalog(readFile(catalogFile));
    Objective objective;
    if (objectiveSpec == "time") {
        objective = {1.0, 0.0, 0.0};
    } else if (objectiveSpec == "cost") {
        objective = {0.0, 1.0, 0.0};
    } else if (objectiveSpec == "timeCost") {
        objective = {1.0, 1.0, 0.0};
    } else {
        throw ParseError("unknown objective: " + objectiveSpec);
    }
    BrokerChoice choice = selectOffer(catalog, req, objective, durationHours);
    writeFile(outPath(opts, "choice.json"), serialize(choice));
    std::cout << "selected " << choice.offer.id << " at " << choice.offer.site
              << (choice.usedSpot ? " (spot)" : " (on-demand)") << ", "
              << formatDouble(choice.estCostPerHour) << " $/h\n";
    return kExitOk;
}

int cmdExportDot(const std::string& workflowFile, bool unrolled, const CommonOpts& opts) {
    WorkflowGraph graph = parseWorkflow(readFile(workflowFile));
    if (unrolled) {
        writeFile(outPath(opts, "instances.dot"), exportDot(unroll(graph)));
    } else {
        writeFile(outPath(opts, "workflow.dot"), exportDot(graph));
    }
    return kExitOk;
}

int cmdExplain(const std::string& placementFile) {
    Placement placement = parsePlacement(readFile(placementFile));
    for (const auto& d : placement.decisions) {
        std::cout << d.instance << ": " << d.chosenOffer << " [" << d.choice << "]";
        if (!d.localitySite.empty()) std::cout << " locality-site=" << d.localitySite;
        std::cout << "\n";
        for (const auto& [offer, score] : d.scores) {
            std::cout << "    " << offer << " score=" << formatDouble(score) << "\n";
        }
    }
    return kExitOk;
}

int cmdSamples(const CommonOpts& opts) {
    writeFile(outPath(opts, "catalog.json"), serialize(sampleCatalog()));
    writeFile(outPath(opts, "stem-workflow.json"), serialize(stemWorkflow()));
    for (ScenarioName name :
         {ScenarioName::timeCost, ScenarioName::costOnly, ScenarioName::timeEnergyCost}) {
        ScenarioSpec spec = builtinScenario(name);
        spec.workflow = std::string("../stem-workflow.json");
        spec.catalog = std::string("../catalog.json");
        writeFile(outPath(opts, "scenarios/" + spec.name + ".json"), serialize(spec));
    }
    std::cout << "wrote sample inputs to " << opts.outDir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuum workflow co-design toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_option("--out", opts.outDir, "directory for output files")->capture_default_str();
    std::uint64_t seedValue = 0;
    auto* seedOpt = app.add_option("--seed", seedValue, "override the scenario seed");

    std::string workflowFile, traceFile, scenarioFile, scenarioName, requirementFile;
    std::string catalogFile, placementFile, objectiveSpec = "timeCost";
    double durationHours = 1.0;
    bool unrolled = false;

    auto* validateCmd = app.add_subcommand("validate", "check a workflow file");
    validateCmd->add_option("workflow", workflowFile, "workflow file")->required();

    auto* analyzeCmd = app.add_subcommand("analyze", "lifecycle analysis of an I/O trace");
    analyzeCmd->add_option("trace", traceFile, "trace file")->required();

    auto* scheduleCmd = app.add_subcommand("schedule", "greedy placement for a scenario");
    scheduleCmd->add_option("scenario", scenarioFile, "scenario file")->required();

    auto* simulateCmd = app.add_subcommand("simulate", "schedule and simulate a scenario");
    simulateCmd->add_option("scenario", scenarioFile, "scenario file")->required();

    auto* scenarioCmd = app.add_subcommand("scenario", "run a built-in scenario");
    scenarioCmd->add_option("name", scenarioName, "timeCost|costOnly|timeEnergyCost")
        ->required();

    auto* brokerCmd = app.add_subcommand("broker", "pick the best offer for a requirement");
    brokerCmd->add_option("requirement", requirementFile, "requirement file")->required();
    brokerCmd->add_option("catalog", catalogFile, "catalog file")->required();
    brokerCmd->add_option("--hours", durationHours, "estimated duration in hours")
        ->capture_default_str();
    brokerCmd->add_option("--objective", objectiveSpec, "time|cost|timeCost")
        ->capture_default_str();

    auto* dotCmd = app.add_subcommand("export-dot", "DOT rendering of a workflow");
    dotCmd->add_option("workflow", workflowFile, "workflow file")->required();
    dotCmd->add_flag("--unrolled", unrolled, "render the unrolled instance graph");

    auto* explainCmd = app.add_subcommand("explain", "print a placement's decision log");
    explainCmd->add_option("placement", placementFile, "placement file")->required();

    app.add_subcommand("samples", "write the sample catalog, workflow and scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    if (seedOpt->count() > 0) opts.seed = seedValue;

    try {
        if (validateCmd->parsed()) return cmdValidate(workflowFile);
        if (analyzeCmd->parsed()) return cmdAnalyze(traceFile, opts);
        if (scheduleCmd->parsed()) return cmdSchedule(scenarioFile, opts);
        if (simulateCmd->parsed()) return cmdSimulate(scenarioFile, opts);
        if (scenarioCmd->parsed()) return cmdScenario(scenarioName, opts);
        if (brokerCmd->parsed()) {
            return cmdBroker(requirementFile, catalogFile, durationHours, objectiveSpec, opts);
        }
        if (dotCmd->parsed()) return cmdExportDot(workflowFile, unrolled, opts);
        if (explainCmd->parsed()) return cmdExplain(placementFile);
        return cmdSamples(opts);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
