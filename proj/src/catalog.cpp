#include "flowcast/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flowcast {

namespace {

std::string linkKey(const SiteId& src, const SiteId& dst) { return src + "\x1f" + dst; }

}  // namespace

std::string toString(SiteClass cls) {
    switch (cls) {
        case SiteClass::edge: return "edge";
        case SiteClass::facilityHPC: return "facilityHPC";
        case SiteClass::cloudRegion: return "cloudRegion";
    }
    return "cloudRegion";
}

SiteClass siteClassFromString(const std::string& text) {
    if (text == "edge") return SiteClass::edge;
    if (text == "facilityHPC") return SiteClass::facilityHPC;
    if (text == "cloudRegion") return SiteClass::cloudRegion;
    throw ParseError("unknown site class: " + text);
}

std::string toString(CompressionPolicy policy) {
    switch (policy) {
        case CompressionPolicy::off: return "off";
        case CompressionPolicy::crossSiteDownloads: return "crossSiteDownloads";
        case CompressionPolicy::allCrossSite: return "allCrossSite";
    }
    return "off";
}

CompressionPolicy compressionPolicyFromString(const std::string& text) {
    if (text == "off") return CompressionPolicy::off;
    if (text == "crossSiteDownloads") return CompressionPolicy::crossSiteDownloads;
    if (text == "allCrossSite") return CompressionPolicy::allCrossSite;
    throw ParseError("unknown compression policy: " + text);
}

double Offer::effectivePrice(bool spotTolerant) const {
    if (spotTolerant && priceSpot) return *priceSpot;
    if (priceOnDemand) return *priceOnDemand;
    return priceSpot.value_or(0.0);
}

bool Catalog::operator==(const Catalog& other) const {
    return sites == other.sites && offers == other.offers && links == other.links &&
           defaultLink == other.defaultLink;
}

void Catalog::rebuildIndex() {
    siteIndex_.clear();
    offerIndex_.clear();
    linkIndex_.clear();
    for (std::size_t i = 0; i < sites.size(); ++i) siteIndex_.emplace(sites[i].id, i);
    for (std::size_t i = 0; i < offers.size(); ++i) offerIndex_.emplace(offers[i].id, i);
    for (std::size_t i = 0; i < links.size(); ++i) {
        linkIndex_.emplace(linkKey(links[i].src, links[i].dst), i);
    }
}

void Catalog::ensureIndex() const {
    if (siteIndex_.size() != sites.size() || offerIndex_.size() != offers.size() ||
        linkIndex_.size() != links.size()) {
        const_cast<Catalog*>(this)->rebuildIndex();
    }
}

const Site& Catalog::site(const SiteId& id) const {
    ensureIndex();
    auto it = siteIndex_.find(id);
    if (it == siteIndex_.end()) throw UnknownSiteError(id);
    return sites[it->second];
}

const Offer* Catalog::findOffer(const OfferId& id) const {
    ensureIndex();
    auto it = offerIndex_.find(id);
    return it == offerIndex_.end() ? nullptr : &offers[it->second];
}

bool Catalog::hasExplicitLink(const SiteId& src, const SiteId& dst) const {
    ensureIndex();
    return linkIndex_.contains(linkKey(src, dst));
}

Link Catalog::link(const SiteId& src, const SiteId& dst) const {
    site(src);
    site(dst);
    auto it = linkIndex_.find(linkKey(src, dst));
    if (it != linkIndex_.end()) return links[it->second];
    if (src == dst) {
        return Link{src, dst, std::numeric_limits<double>::infinity(), 0.0, 0.0};
    }
    Link fallback = defaultLink;
    fallback.src = src;
    fallback.dst = dst;
    return fallback;
}

void checkCatalog(const Catalog& catalog) {
    std::unordered_map<SiteId, int> siteSeen;
    for (const auto& s : catalog.sites) {
        if (s.id.empty()) throw ParseError("catalog: empty site id");
        if (++siteSeen[s.id] > 1) throw ParseError("catalog: duplicate site " + s.id);
    }
    std::unordered_map<OfferId, int> offerSeen;
    for (const auto& o : catalog.offers) {
        if (!siteSeen.contains(o.site)) {
            throw ParseError("catalog: offer " + o.id + " names unknown site " + o.site);
        }
        if (++offerSeen[o.id] > 1) throw ParseError("catalog: duplicate offer " + o.id);
        if (!(o.cpuUnits > 0)) throw ParseError("catalog: offer " + o.id + " needs cpuUnits > 0");
        if (o.memory < 0 || o.accelerators < 0 || o.spotPreemptionRate < 0 ||
            o.provisionDelay < 0 || o.power < 0 || o.idlePower < 0) {
            throw ParseError("catalog: offer " + o.id + " has a negative field");
        }
        if (!o.priceOnDemand && !o.priceSpot) {
            throw ParseError("catalog: offer " + o.id + " has no price");
        }
        if (o.priceOnDemand && *o.priceOnDemand < 0) {
            throw ParseError("catalog: offer " + o.id + " has negative on-demand price");
        }
        if (o.priceSpot && *o.priceSpot < 0) {
            throw ParseError("catalog: offer " + o.id + " has negative spot price");
        }
        if (o.priceOnDemand && o.priceSpot && *o.priceSpot > *o.priceOnDemand) {
            throw ParseError("catalog: offer " + o.id + " prices spot above on-demand");
        }
    }
    auto checkLink = [&](const Link& l, bool isDefault) {
        std::string label = isDefault ? "defaultLink" : l.src + "->" + l.dst;
        if (!isDefault && (!siteSeen.contains(l.src) || !siteSeen.contains(l.dst))) {
            throw ParseError("catalog: link " + label + " names an unknown site");
        }
        if (!(l.bandwidth > 0)) throw ParseError("catalog: link " + label + " needs bandwidth > 0");
        if (l.latency < 0 || l.egressFee < 0) {
            throw ParseError("catalog: link " + label + " has a negative field");
        }
        if (!isDefault && l.src == l.dst && l.egressFee != 0) {
            throw ParseError("catalog: intra-site link " + label + " must have zero egress fee");
        }
    };
    for (const auto& l : catalog.links) checkLink(l, false);
    checkLink(catalog.defaultLink, true);
}

bool offerFeasibleFor(const Offer& offer, const Task& task) {
    if (offer.memory < task.memoryNeed) return false;
    if (offer.accelerators < task.acceleratorNeed) return false;
    if (task.pinnedSite && offer.site != *task.pinnedSite) return false;
    if (offer.spotOnly() && !task.spotTolerant) return false;
    return true;
}

std::vector<Offer> feasibleOffers(const Catalog& catalog, const Task& task) {
    std::vector<Offer> out;
    for (const auto& o : catalog.offers) {
        if (offerFeasibleFor(o, task)) out.push_back(o);
    }
    std::sort(out.begin(), out.end(),
              [](const Offer& a, const Offer& b) { return a.id < b.id; });
    return out;
}

double transferTime(const Catalog& catalog, const SiteId& src, const SiteId& dst, double volume,
                    const std::optional<CompressionParams>& compression) {
    if (src == dst && !catalog.hasExplicitLink(src, dst)) {
        catalog.site(src);
        return 0.0;
    }
    Link l = catalog.link(src, dst);
    if (!compression) return l.latency + volume / l.bandwidth;
    const CompressionParams& c = *compression;
    double wire = volume / c.ratio;
    return l.latency + volume / c.compressThroughput + wire / l.bandwidth +
           wire / c.decompressThroughput;
}

double transferCost(const Catalog& catalog, const SiteId& src, const SiteId& dst, double volume,
                    const std::optional<CompressionParams>& compression) {
    if (src == dst) {
        catalog.site(src);
        return 0.0;
    }
    Link l = catalog.link(src, dst);
    double wire = compression ? volume / compression->ratio : volume;
    return l.egressFee * wire;
}

double computeTime(const Offer& offer, const Task& task) {
    if (!offerFeasibleFor(offer, task)) {
        throw InfeasibleOfferError("offer " + offer.id + " cannot run task " + task.id);
    }
    return task.work / offer.cpuUnits;
}

double energy(const Offer& offer, double busySeconds, double idleSeconds) {
    return offer.power * busySeconds + offer.idlePower * idleSeconds;
}

std::optional<CompressionParams> appliedCompression(CompressionPolicy policy,
                                                    const CompressionParams& params,
                                                    bool edgeCompressible, const Catalog& catalog,
                                                    const SiteId& src, const SiteId& dst) {
    if (policy == CompressionPolicy::off || !edgeCompressible || src == dst) return std::nullopt;
    if (policy == CompressionPolicy::allCrossSite) return params;
    // crossSiteDownloads: only data leaving a cloud region for a non-cloud site.
    if (catalog.site(src).cls == SiteClass::cloudRegion &&
        catalog.site(dst).cls != SiteClass::cloudRegion) {
        return params;
    }
    return std::nullopt;
}

}  // namespace flowcast
