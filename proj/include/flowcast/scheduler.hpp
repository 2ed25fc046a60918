#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flowcast/catalog.hpp"
#include "flowcast/types.hpp"
#include "flowcast/workflow.hpp"

namespace flowcast {

// One inbound flow of a task under evaluation: where its data sits and how
// heavy it is.
struct InboundFlow {
    SiteId fromSite;
    double volume = 0.0;
    bool compressible = false;

    bool operator==(const InboundFlow&) const = default;
};

struct PlacementDecision {
    std::string instance;
    std::string choice;  // pinned | onlyCandidate | locality | parallelism | brokered
    SiteId localitySite;             // empty when no inbound flow drives locality
    OfferId localityOffer;           // empty when the locality site has no feasible offer
    OfferId parallelismOffer;
    std::vector<std::pair<OfferId, double>> scores;  // considered offers, by id
    OfferId chosenOffer;

    bool operator==(const PlacementDecision&) const = default;
};

// Total assignment of task instances to offers and data nodes to sites,
// with the decision log that produced it.
struct Placement {
    Objective objective;
    std::vector<std::pair<std::string, OfferId>> assignments;    // sorted by instance id
    std::vector<std::pair<DataId, SiteId>> dataLocations;        // sorted by data id
    std::vector<PlacementDecision> decisions;                    // in scheduling order

    bool operator==(const Placement&) const = default;

    const OfferId* offerFor(const std::string& instanceId) const;
    const SiteId* siteForData(const DataId& dataId) const;
};

// Volume overrides keyed "<producerTask>-><consumerTask>", e.g. measured by
// DFL analysis; they replace the static edge volumes during scheduling.
using VolumeEstimates = std::map<std::string, double>;

struct ScheduleOptions {
    CompressionPolicy compressionPolicy = CompressionPolicy::off;
    CompressionParams compressionParams{};
    int criticalFlowCount = 10;
    bool brokered = false;
    VolumeEstimates estimates;
    std::map<TaskId, std::vector<SiteId>> siteAllowLists;

    bool operator==(const ScheduleOptions&) const = default;
};

// Weighted objective score of running the task on the offer with the given
// inbound flows, assuming concurrent transfers (bottleneck = max, not sum):
//   w_t*(computeTime + max flowProjection)
// + w_c*((computeTime + max flowProjection)/3600 * effectivePrice + sum transferCost)
// + w_e*energyScore(energy(offer, computeTime, 0)).
// Throws InfeasibleOfferError.
double scoreCandidate(const Task& task, const Offer& offer, std::span<const InboundFlow> flows,
                      const Objective& objective, const Catalog& catalog,
                      CompressionPolicy policy = CompressionPolicy::off,
                      const CompressionParams& params = {});

// The k heaviest instance edges by (estimated) volume, ties by edge id.
std::vector<std::string> criticalFlows(const InstanceGraph& instances,
                                       const VolumeEstimates& estimates, int k);

// Single-pass greedy placement in topological order. Per task the scheduler
// scores a locality candidate (colocate with the dominant inbound flow's
// data) against a parallelism candidate (global argmin assuming concurrent
// transfers) and keeps the better, preferring locality on ties. Data nodes
// land at their producer's site. Linear in |V|+|E| for a fixed catalog.
// Throws NoFeasibleOfferError.
Placement schedule(const InstanceGraph& instances, const Catalog& catalog,
                   const Objective& objective, const ScheduleOptions& options = {});

// Recomputes feasibility of every assignment from scratch; returns the ids
// of instances whose assignment violates it (empty = placement feasible).
std::vector<std::string> placementViolations(const InstanceGraph& instances,
                                             const Catalog& catalog, const Placement& placement,
                                             const std::map<TaskId, std::vector<SiteId>>& allowLists = {});

}  // namespace flowcast
