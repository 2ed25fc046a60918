#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flowcast/catalog.hpp"
#include "flowcast/types.hpp"

namespace flowcast {

enum class TraceOp { read, write };

std::string toString(TraceOp op);
TraceOp traceOpFromString(const std::string& text);

struct TraceEvent {
    double timestamp = 0.0;  // seconds
    std::string taskInstance;
    TraceOp op = TraceOp::read;
    DataId dataId;
    double bytes = 0.0;
    double duration = 0.0;  // seconds

    bool operator==(const TraceEvent&) const = default;
};

// Aggregated lifecycle edge; write edges run task -> data, read edges
// data -> task. Edge id strings are "task->data" / "data->task".
struct DflEdge {
    std::string task;
    DataId data;
    double totalBytes = 0.0;
    double totalTime = 0.0;
    std::uint64_t opCount = 0;

    bool operator==(const DflEdge&) const = default;
};

// Bipartite data-flow-lifecycle graph. Node and edge vectors are kept in
// canonical sorted order so identical inputs produce identical graphs.
struct DFLGraph {
    std::vector<std::string> taskNodes;
    std::vector<DataId> dataNodes;
    std::vector<DflEdge> writeEdges;
    std::vector<DflEdge> readEdges;

    bool operator==(const DFLGraph&) const = default;
    bool empty() const { return taskNodes.empty() && dataNodes.empty(); }
};

// Aggregates a trace into a DFLGraph: one edge per (task, data, op) with
// summed bytes/time/count. Throws MalformedEventError on negative fields and
// NonMonotoneTimestampError when timestamps regress within a task instance.
DFLGraph ingest(std::span<const TraceEvent> events);

// Merging ingests of a split trace equals ingesting the whole trace.
DFLGraph merge(const DFLGraph& a, const DFLGraph& b);

struct SeverityEntry {
    std::string edgeId;
    double severitySeconds = 0.0;
    double share = 0.0;  // fraction of the time-weighted critical path

    bool operator==(const SeverityEntry&) const = default;
};

struct SeverityReport {
    std::vector<SeverityEntry> entries;      // nonincreasing severity, ties by edge id
    double criticalPathSeconds = 0.0;

    bool operator==(const SeverityReport&) const = default;
};

// Ranks every lifecycle edge by its measured time; share divides by the
// longest time-weighted path. Throws EmptyGraphError.
SeverityReport severity(const DFLGraph& graph);

// Data nodes where more bytes were read than written (diagnostic only).
std::vector<DataId> underProducedData(const DFLGraph& graph);

// Projected seconds to satisfy a flow given candidate producer/consumer
// sites; colocated flows cost nothing.
double flowProjection(const Catalog& catalog, const SiteId& producerSite,
                      const SiteId& consumerSite, double volume, bool compressible,
                      CompressionPolicy policy, const CompressionParams& params);

// DOT rendering: task nodes as boxes, data nodes as ellipses, edges labeled
// with bytes and seconds. Canonical ordering, byte-stable.
std::string exportDot(const DFLGraph& graph);

}  // namespace flowcast
