#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flowcast/catalog.hpp"
#include "flowcast/scheduler.hpp"
#include "flowcast/types.hpp"
#include "flowcast/workflow.hpp"

namespace flowcast {

enum class BillingGranularity { perSecond, perHour };

std::string toString(BillingGranularity granularity);
BillingGranularity billingGranularityFromString(const std::string& text);

struct SimConfig {
    std::uint64_t seed = 0;
    BillingGranularity billing = BillingGranularity::perSecond;
    CompressionPolicy compressionPolicy = CompressionPolicy::off;
    CompressionParams compressionParams{};
    bool preemptionEnabled = false;

    bool operator==(const SimConfig&) const = default;
};

enum class SimEventType {
    taskReady,
    transferStart,
    transferEnd,
    taskStart,
    taskEnd,
    preemption,
    reprovision,
};

std::string toString(SimEventType type);

struct SimEvent {
    double time = 0.0;
    SimEventType type = SimEventType::taskReady;
    std::string subject;   // instance id or instance edge id
    OfferId offer;         // for task/provision events
    SiteId src, dst;       // for transfer events
    double logicalBytes = 0.0;
    double wireBytes = 0.0;
    std::string billing;   // "spot" or "onDemand" on taskStart

    bool operator==(const SimEvent&) const = default;
};

struct TaskTimeline {
    std::string instance;
    OfferId offer;          // final offer after any re-planning
    double start = 0.0;     // first attempt start
    double end = 0.0;       // final completion
    int preemptions = 0;

    bool operator==(const TaskTimeline&) const = default;
};

struct LinkUsage {
    SiteId src, dst;
    double bytes = 0.0;    // wire bytes carried
    double seconds = 0.0;  // busy time

    bool operator==(const LinkUsage&) const = default;
};

struct CostItem {
    std::string kind;     // "compute" or "egress"
    std::string subject;  // instance@offer or transfer edge id
    double amount = 0.0;  // dollars

    bool operator==(const CostItem&) const = default;
};

struct CostBreakdown {
    std::vector<CostItem> items;
    double total = 0.0;  // exact ordered sum of items

    bool operator==(const CostBreakdown&) const = default;
};

struct SimReport {
    double makespan = 0.0;
    double totalCost = 0.0;
    double totalEnergy = 0.0;  // joules
    std::vector<TaskTimeline> tasks;   // sorted by instance id
    std::vector<LinkUsage> links;      // sorted by (src, dst)
    std::vector<CostItem> costItems;
    std::vector<SimEvent> events;      // chronological

    bool operator==(const SimReport&) const = default;
};

// Itemizes compute and egress dollars from an event log. Compute billing
// rounds each execution attempt up to the billing granularity; the total is
// the exact ordered sum of the items.
CostBreakdown accountCost(const std::vector<SimEvent>& events, const Catalog& catalog,
                          const SimConfig& config);

// Deterministic seeded discrete-event execution of a placed instance graph.
// One task at a time per offer; transfers on a shared link serialize in
// edge-id order; spot-billed tasks draw exponential preemption times from
// the seeded generator and re-plan through the broker on preemption.
// Identical inputs and seed produce an identical report.
SimReport simulate(const InstanceGraph& instances, const Placement& placement,
                   const Catalog& catalog, const SimConfig& config);

// Objective value of a simulated run: w_t*makespan + w_c*totalCost
// + w_e*energyScore(totalEnergy).
double reportScore(const SimReport& report, const Objective& objective);

}  // namespace flowcast
