#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "flowcast/types.hpp"
#include "flowcast/workflow.hpp"

namespace flowcast {

enum class SiteClass { edge, facilityHPC, cloudRegion };

std::string toString(SiteClass cls);
SiteClass siteClassFromString(const std::string& text);

struct Site {
    SiteId id;
    SiteClass cls = SiteClass::cloudRegion;
    std::optional<std::string> provider;

    bool operator==(const Site&) const = default;
};

// A purchasable/allocatable compute configuration at a site. Offers with no
// on-demand price are spot-only capacity.
struct Offer {
    OfferId id;
    SiteId site;
    double cpuUnits = 1.0;   // CU/s throughput
    double memory = 0.0;     // bytes
    int accelerators = 0;
    std::optional<double> priceOnDemand;  // dollars/hour
    std::optional<double> priceSpot;      // dollars/hour
    double spotPreemptionRate = 0.0;      // expected preemptions/hour
    double provisionDelay = 0.0;          // seconds
    double power = 0.0;                   // watts at full utilization
    double idlePower = 0.0;               // watts

    bool operator==(const Offer&) const = default;

    bool spotOnly() const { return !priceOnDemand.has_value(); }
    // Billing rate for a task: spot when the task tolerates it and the offer
    // has one, otherwise on-demand.
    double effectivePrice(bool spotTolerant) const;
};

struct Link {
    SiteId src;
    SiteId dst;
    double bandwidth = 1.0;   // bytes/s
    double latency = 0.0;     // seconds
    double egressFee = 0.0;   // dollars/byte

    bool operator==(const Link&) const = default;
};

struct CompressionParams {
    double ratio = 10.0;
    double compressThroughput = 1e9;    // bytes/s
    double decompressThroughput = 1e9;  // bytes/s

    bool operator==(const CompressionParams&) const = default;
};

enum class CompressionPolicy { off, crossSiteDownloads, allCrossSite };

std::string toString(CompressionPolicy policy);
CompressionPolicy compressionPolicyFromString(const std::string& text);

struct Catalog {
    std::vector<Site> sites;
    std::vector<Offer> offers;
    std::vector<Link> links;
    Link defaultLink{"", "", 1e8, 0.1, 0.0};  // fallback for unlisted site pairs

    bool operator==(const Catalog& other) const;

    const Site& site(const SiteId& id) const;          // throws UnknownSiteError
    const Offer* findOffer(const OfferId& id) const;
    bool hasExplicitLink(const SiteId& src, const SiteId& dst) const;
    // Total lookup: explicit link, else defaultLink; src == dst with no
    // explicit self-link yields a zero-cost zero-time link.
    Link link(const SiteId& src, const SiteId& dst) const;

    void rebuildIndex();

private:
    void ensureIndex() const;

    std::unordered_map<SiteId, std::size_t> siteIndex_;
    std::unordered_map<OfferId, std::size_t> offerIndex_;
    std::unordered_map<std::string, std::size_t> linkIndex_;
};

// Throws ParseError when catalog invariants are broken (unknown sites,
// negative rates, spot above on-demand, intra-site egress fees, ...).
void checkCatalog(const Catalog& catalog);

// Offers able to run the task: enough memory and accelerators, the pinned
// site when the task is pinned, spot-only capacity excluded unless the task
// tolerates preemption. Sorted by offer id.
std::vector<Offer> feasibleOffers(const Catalog& catalog, const Task& task);

bool offerFeasibleFor(const Offer& offer, const Task& task);

// Seconds to move volume bytes from src to dst, optionally through a
// compression codec: latency + volume/compressThroughput +
// (volume/ratio)/bandwidth + (volume/ratio)/decompressThroughput.
double transferTime(const Catalog& catalog, const SiteId& src, const SiteId& dst, double volume,
                    const std::optional<CompressionParams>& compression = std::nullopt);

// Egress dollars: fee times bytes on the wire (volume/ratio when compressed).
double transferCost(const Catalog& catalog, const SiteId& src, const SiteId& dst, double volume,
                    const std::optional<CompressionParams>& compression = std::nullopt);

// task.work / offer.cpuUnits; throws InfeasibleOfferError.
double computeTime(const Offer& offer, const Task& task);

// Joules consumed: power*busy + idlePower*idle.
double energy(const Offer& offer, double busySeconds, double idleSeconds);

// The codec to apply on a transfer under a policy, or nullopt.
// crossSiteDownloads compresses flagged flows leaving a cloud region for a
// non-cloud site; allCrossSite compresses every flagged cross-site flow.
std::optional<CompressionParams> appliedCompression(CompressionPolicy policy,
                                                    const CompressionParams& params,
                                                    bool edgeCompressible, const Catalog& catalog,
                                                    const SiteId& src, const SiteId& dst);

}  // namespace flowcast
