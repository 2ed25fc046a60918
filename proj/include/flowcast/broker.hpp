#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowcast/catalog.hpp"
#include "flowcast/types.hpp"

namespace flowcast {

// Declarative resource requirement, matched against catalog offers.
struct Requirement {
    double minCpuUnits = 0.0;  // also the baseline CU/s for the time term
    double minMemory = 0.0;
    int minAccelerators = 0;
    bool spotOk = false;
    std::optional<double> maxPrice;  // dollars/hour, against the effective price
    std::optional<std::vector<SiteId>> siteAllowList;

    bool operator==(const Requirement&) const = default;
};

struct BrokerChoice {
    Offer offer;
    double estStartSeconds = 0.0;  // the offer's provision delay
    double estCostPerHour = 0.0;
    bool usedSpot = false;
    std::vector<std::pair<OfferId, double>> alternatives;  // remaining feasible, by score

    bool operator==(const BrokerChoice&) const = default;
};

bool offerSatisfies(const Offer& offer, const Requirement& req);

// Weighted-sum score of one offer for a job of estDurationHours at the
// requirement's baseline throughput:
//   w_t*(provisionDelay + scaledSeconds) + w_c*(estDurationHours*price)
//   + w_e*energyScore(power*scaledSeconds)
// with scaledSeconds = estDurationHours*3600*(minCpuUnits/offer.cpuUnits).
double brokerScore(const Offer& offer, const Requirement& req, const Objective& objective,
                   double estDurationHours);

// Picks the feasible offer with the lowest score (ties: lexicographic offer
// id). Throws NoFeasibleOfferError.
BrokerChoice selectOffer(const Catalog& catalog, const Requirement& req,
                         const Objective& objective, double estDurationHours);

// Re-selection after losing an offer: the excluded offer is removed and the
// estimate shrinks to the remaining work.
BrokerChoice replanOnPreemption(const Catalog& catalog, const Requirement& req,
                                const Objective& objective, double estDurationHours,
                                double remainingWorkFraction, const OfferId& excludedOffer);

}  // namespace flowcast
