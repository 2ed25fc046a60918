#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flowcast/broker.hpp"
#include "flowcast/catalog.hpp"
#include "flowcast/dfl.hpp"
#include "flowcast/scenario.hpp"
#include "flowcast/scheduler.hpp"
#include "flowcast/sim.hpp"
#include "flowcast/workflow.hpp"

// Serialization layer. Formats are documented in FORMATS.md; every
// serialize/parse pair round-trips exactly and serialization is canonical
// (stable ordering, shortest float representation).
namespace flowcast {

std::string serialize(const WorkflowGraph& graph);
WorkflowGraph parseWorkflow(const std::string& text);

std::string serialize(const Catalog& catalog);
Catalog parseCatalog(const std::string& text);

std::string serialize(const ScenarioSpec& spec);
ScenarioSpec parseScenario(const std::string& text);

std::string serialize(const Placement& placement);
Placement parsePlacement(const std::string& text);

std::string serialize(const SimReport& report);
SimReport parseSimReport(const std::string& text);

std::string serialize(const Requirement& req);
Requirement parseRequirement(const std::string& text);

std::string serialize(const BrokerChoice& choice);

// Line-oriented trace format: a header line, then one
// "timestamp,task,op,data,bytes,duration" row per event.
std::string serializeTrace(const std::vector<TraceEvent>& events);
std::vector<TraceEvent> parseTrace(const std::string& text);

std::string severityCsv(const SeverityReport& report);
std::string severityText(const SeverityReport& report);

std::string timelineCsv(const SimReport& report);
std::string eventLogText(const SimReport& report);
std::string comparisonCsv(const std::vector<ComparisonRow>& rows);

std::string readFile(const std::filesystem::path& path);   // throws ParseError naming the path
void writeFile(const std::filesystem::path& path, const std::string& content);

}  // namespace flowcast
