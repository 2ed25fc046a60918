#include "flowcast/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flowcast/broker.hpp"
#include "flowcast/dfl.hpp"

namespace flowcast {

const OfferId* Placement::offerFor(const std::string& instanceId) const {
    auto it = std::lower_bound(assignments.begin(), assignments.end(), instanceId,
                               [](const auto& a, const std::string& id) { return a.first < id; });
    if (it == assignments.end() || it->first != instanceId) return nullptr;
    return &it->second;
}

const SiteId* Placement::siteForData(const DataId& dataId) const {
    auto it = std::lower_bound(dataLocations.begin(), dataLocations.end(), dataId,
                               [](const auto& a, const DataId& id) { return a.first < id; });
    if (it == dataLocations.end() || it->first != dataId) return nullptr;
    return &it->second;
}

double scoreCandidate(const Task& task, const Offer& offer, std::span<const InboundFlow> flows,
                      const Objective& objective, const Catalog& catalog,
                      CompressionPolicy policy, const CompressionParams& params) {
    checkObjective(objective);
    double compute = computeTime(offer, task);  // throws when infeasible
    double maxFlow = 0.0;
    double egress = 0.0;
    for (const auto& f : flows) {
        auto compression =
            appliedCompression(policy, params, f.compressible, catalog, f.fromSite, offer.site);
        maxFlow = std::max(maxFlow,
                           transferTime(catalog, f.fromSite, offer.site, f.volume, compression));
        egress += transferCost(catalog, f.fromSite, offer.site, f.volume, compression);
    }
    double busy = compute + maxFlow;
    double dollars = busy / 3600.0 * offer.effectivePrice(task.spotTolerant) + egress;
    double joules = energy(offer, compute, 0.0);
    return objective.timeWeight * busy + objective.costWeight * dollars +
           objective.energyWeight * energyScore(joules);
}

std::vector<std::string> criticalFlows(const InstanceGraph& instances,
                                       const VolumeEstimates& estimates, int k) {
    if (k < 1) throw Error("criticalFlows requires k >= 1");
    struct Entry {
        double volume;
        const std::string* id;
    };
    std::vector<Entry> entries;
    entries.reserve(instances.edges.size());
    for (const auto& e : instances.edges) {
        double volume = e.volume;
        if (!estimates.empty()) {
            auto it = estimates.find(instances.tasks[instances.nodes[e.producer].task].id + "->" +
                                     instances.tasks[instances.nodes[e.consumer].task].id);
            if (it != estimates.end()) volume = it->second;
        }
        entries.push_back({volume, &e.id});
    }
    auto heavier = [](const Entry& a, const Entry& b) {
        if (a.volume != b.volume) return a.volume > b.volume;
        return *a.id < *b.id;
    };
    std::size_t take = std::min<std::size_t>(k, entries.size());
    std::partial_sort(entries.begin(), entries.begin() + take, entries.end(), heavier);
    std::vector<std::string> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(*entries[i].id);
    return out;
}

namespace {

struct OfferRef {
    const Offer* offer;
    std::size_t index;  // position in the catalog's offer list
};

}  // namespace

Placement schedule(const InstanceGraph& instances, const Catalog& catalog,
                   const Objective& objective, const ScheduleOptions& options) {
    checkObjective(objective);
    auto order = topoOrder(instances);

    // Feasible offers per static task, by offer id; computed once so the main
    // pass does constant catalog work per instance.
    std::vector<std::vector<const Offer*>> feasible(instances.tasks.size());
    std::vector<std::size_t> offerIndexById(catalog.offers.size());
    std::vector<const Offer*> offersById;
    offersById.reserve(catalog.offers.size());
    for (const auto& o : catalog.offers) offersById.push_back(&o);
    std::sort(offersById.begin(), offersById.end(),
              [](const Offer* a, const Offer* b) { return a->id < b->id; });
    for (std::size_t t = 0; t < instances.tasks.size(); ++t) {
        const Task& task = instances.tasks[t];
        const std::vector<SiteId>* allow = nullptr;
        if (auto it = options.siteAllowLists.find(task.id); it != options.siteAllowLists.end()) {
            allow = &it->second;
        }
        for (const Offer* o : offersById) {
            if (!offerFeasibleFor(*o, task)) continue;
            if (allow && std::find(allow->begin(), allow->end(), o->site) == allow->end()) {
                continue;
            }
            feasible[t].push_back(o);
        }
    }

    // Effective volume per instance edge (estimates override statics).
    std::vector<double> edgeVolume(instances.edges.size());
    for (std::size_t i = 0; i < instances.edges.size(); ++i) {
        const auto& e = instances.edges[i];
        edgeVolume[i] = e.volume;
        if (!options.estimates.empty()) {
            auto it = options.estimates.find(
                instances.tasks[instances.nodes[e.producer].task].id + "->" +
                instances.tasks[instances.nodes[e.consumer].task].id);
            if (it != options.estimates.end()) edgeVolume[i] = it->second;
        }
    }

    Placement placement;
    placement.objective = objective;

    std::vector<const Offer*> chosen(instances.nodes.size(), nullptr);
    std::vector<InboundFlow> flows;
    for (std::uint32_t v : order) {
        const Task& task = instances.taskOf(v);
        const auto& candidates = feasible[instances.nodes[v].task];
        if (candidates.empty()) throw NoFeasibleOfferError("task " + instances.nodes[v].id);

        flows.clear();
        double heaviest = -1.0;
        const std::string* heaviestEdge = nullptr;
        SiteId localitySite;
        for (std::uint32_t ei : instances.inEdges[v]) {
            const auto& e = instances.edges[ei];
            const Offer* producerOffer = chosen[e.producer];
            flows.push_back({producerOffer->site, edgeVolume[ei], e.compressible});
            if (edgeVolume[ei] > heaviest ||
                (edgeVolume[ei] == heaviest && heaviestEdge && e.id < *heaviestEdge)) {
                heaviest = edgeVolume[ei];
                heaviestEdge = &e.id;
                localitySite = producerOffer->site;
            }
        }

        PlacementDecision decision;
        decision.instance = instances.nodes[v].id;

        double bestScore = std::numeric_limits<double>::infinity();
        const Offer* parallelism = nullptr;
        double bestLocalScore = std::numeric_limits<double>::infinity();
        const Offer* locality = nullptr;
        double cheapest = std::numeric_limits<double>::infinity();
        const Offer* cheapestOffer = nullptr;
        for (const Offer* o : candidates) {
            double s = scoreCandidate(task, *o, flows, objective, catalog,
                                      options.compressionPolicy, options.compressionParams);
            decision.scores.push_back({o->id, s});
            if (s < bestScore) {
                bestScore = s;
                parallelism = o;
            }
            if (!localitySite.empty() && o->site == localitySite && s < bestLocalScore) {
                bestLocalScore = s;
                locality = o;
            }
            double price = o->effectivePrice(task.spotTolerant);
            if (price < cheapest) {
                cheapest = price;
                cheapestOffer = o;
            }
        }
        if (localitySite.empty()) {
            // No inbound flow: locality degenerates to the cheapest feasible.
            locality = cheapestOffer;
            for (const auto& [id, s] : decision.scores) {
                if (id == cheapestOffer->id) bestLocalScore = s;
            }
        }
        decision.localitySite = localitySite;
        if (locality) decision.localityOffer = locality->id;
        decision.parallelismOffer = parallelism->id;

        const Offer* pick;
        if (task.pinnedSite) {
            pick = parallelism;  // candidates already restricted to the pinned site
            decision.choice = "pinned";
        } else if (candidates.size() == 1) {
            pick = candidates.front();
            decision.choice = "onlyCandidate";
        } else if (options.brokered && std::any_of(candidates.begin(), candidates.end(),
                                                   [&](const Offer* o) {
                                                       return catalog.site(o->site).cls ==
                                                              SiteClass::cloudRegion;
                                                   })) {
            // Delegate the parallelism side to the broker's declarative view.
            Requirement req;
            req.minCpuUnits = 1.0;
            req.minMemory = task.memoryNeed;
            req.minAccelerators = task.acceleratorNeed;
            req.spotOk = task.spotTolerant;
            if (auto it = options.siteAllowLists.find(task.id);
                it != options.siteAllowLists.end()) {
                req.siteAllowList = it->second;
            }
            const Offer* brokered = parallelism;
            try {
                BrokerChoice choice = selectOffer(catalog, req, objective, task.work / 3600.0);
                for (const Offer* o : candidates) {
                    if (o->id == choice.offer.id) brokered = o;
                }
            } catch (const NoFeasibleOfferError&) {
            }
            double brokeredScore = scoreCandidate(task, *brokered, flows, objective, catalog,
                                                  options.compressionPolicy,
                                                  options.compressionParams);
            if (locality && bestLocalScore <= brokeredScore) {
                pick = locality;
                decision.choice = "locality";
            } else {
                pick = brokered;
                decision.choice = "brokered";
            }
        } else if (locality && bestLocalScore <= bestScore) {
            pick = locality;
            decision.choice = "locality";
        } else {
            pick = parallelism;
            decision.choice = "parallelism";
        }

        chosen[v] = pick;
        decision.chosenOffer = pick->id;
        placement.decisions.push_back(std::move(decision));
    }

    placement.assignments.reserve(instances.nodes.size());
    for (std::uint32_t i = 0; i < instances.nodes.size(); ++i) {
        placement.assignments.push_back({instances.nodes[i].id, chosen[i]->id});
    }
    std::sort(placement.assignments.begin(), placement.assignments.end());

    // Every data node lands at its producer's site, which subsumes the
    // critical-flow pre-pinning rule for the k heaviest flows.
    std::map<DataId, SiteId> dataSite;
    for (const auto& e : instances.edges) {
        dataSite.emplace(e.dataId, chosen[e.producer]->site);
    }
    placement.dataLocations.assign(dataSite.begin(), dataSite.end());
    return placement;
}

std::vector<std::string> placementViolations(const InstanceGraph& instances,
                                             const Catalog& catalog, const Placement& placement,
                                             const std::map<TaskId, std::vector<SiteId>>& allowLists) {
    std::vector<std::string> bad;
    for (const auto& node : instances.nodes) {
        const OfferId* offerId = placement.offerFor(node.id);
        if (!offerId) {
            bad.push_back(node.id);
            continue;
        }
        const Offer* offer = catalog.findOffer(*offerId);
        const Task& task = instances.tasks[node.task];
        if (!offer || !offerFeasibleFor(*offer, task)) {
            bad.push_back(node.id);
            continue;
        }
        if (auto it = allowLists.find(task.id); it != allowLists.end()) {
            if (std::find(it->second.begin(), it->second.end(), offer->site) ==
                it->second.end()) {
                bad.push_back(node.id);
            }
        }
    }
    return bad;
}

}  // namespace flowcast
