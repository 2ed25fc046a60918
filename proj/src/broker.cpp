#include "flowcast/broker.hpp"

#include <algorithm>
#include <limits>

namespace flowcast {

bool offerSatisfies(const Offer& offer, const Requirement& req) {
    if (offer.cpuUnits < req.minCpuUnits) return false;
    if (offer.memory < req.minMemory) return false;
    if (offer.accelerators < req.minAccelerators) return false;
    if (offer.spotOnly() && !req.spotOk) return false;
    if (req.siteAllowList &&
        std::find(req.siteAllowList->begin(), req.siteAllowList->end(), offer.site) ==
            req.siteAllowList->end()) {
        return false;
    }
    if (req.maxPrice && offer.effectivePrice(req.spotOk) > *req.maxPrice) return false;
    return true;
}

double brokerScore(const Offer& offer, const Requirement& req, const Objective& objective,
                   double estDurationHours) {
    double scaledSeconds = estDurationHours * 3600.0 * (req.minCpuUnits / offer.cpuUnits);
    double price = offer.effectivePrice(req.spotOk);
    double joules = offer.power * scaledSeconds;
    return objective.timeWeight * (offer.provisionDelay + scaledSeconds) +
           objective.costWeight * (estDurationHours * price) +
           objective.energyWeight * energyScore(joules);
}

BrokerChoice selectOffer(const Catalog& catalog, const Requirement& req,
                         const Objective& objective, double estDurationHours) {
    checkObjective(objective);
    if (!(estDurationHours > 0)) throw Error("estDurationHours must be positive");

    std::vector<const Offer*> feasible;
    for (const auto& o : catalog.offers) {
        if (offerSatisfies(o, req)) feasible.push_back(&o);
    }
    if (feasible.empty()) throw NoFeasibleOfferError("requirement");
    std::sort(feasible.begin(), feasible.end(),
              [](const Offer* a, const Offer* b) { return a->id < b->id; });

    const Offer* best = nullptr;
    double bestScore = std::numeric_limits<double>::infinity();
    std::vector<std::pair<OfferId, double>> scored;
    scored.reserve(feasible.size());
    for (const Offer* o : feasible) {
        double s = brokerScore(*o, req, objective, estDurationHours);
        scored.push_back({o->id, s});
        if (s < bestScore) {
            bestScore = s;
            best = o;
        }
    }

    BrokerChoice choice;
    choice.offer = *best;
    choice.estStartSeconds = best->provisionDelay;
    choice.usedSpot = req.spotOk && best->priceSpot.has_value();
    choice.estCostPerHour = best->effectivePrice(req.spotOk);
    for (const auto& [id, s] : scored) {
        if (id != best->id) choice.alternatives.push_back({id, s});
    }
    std::stable_sort(choice.alternatives.begin(), choice.alternatives.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    return choice;
}

BrokerChoice replanOnPreemption(const Catalog& catalog, const Requirement& req,
                                const Objective& objective, double estDurationHours,
                                double remainingWorkFraction, const OfferId& excludedOffer) {
    if (!(remainingWorkFraction > 0) || remainingWorkFraction > 1) {
        throw Error("remainingWorkFraction must be in (0, 1]");
    }
    Catalog reduced;
    reduced.sites = catalog.sites;
    reduced.links = catalog.links;
    reduced.defaultLink = catalog.defaultLink;
    for (const auto& o : catalog.offers) {
        if (o.id != excludedOffer) reduced.offers.push_back(o);
    }
    reduced.rebuildIndex();
    return selectOffer(reduced, req, objective, estDurationHours * remainingWorkFraction);
}

}  // namespace flowcast
