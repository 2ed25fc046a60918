#include "flowcast/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "flowcast/broker.hpp"

namespace flowcast {

std::string toString(BillingGranularity granularity) {
    return granularity == BillingGranularity::perSecond ? "perSecond" : "perHour";
}

BillingGranularity billingGranularityFromString(const std::string& text) {
    if (text == "perSecond") return BillingGranularity::perSecond;
    if (text == "perHour") return BillingGranularity::perHour;
    throw ParseError("unknown billing granularity: " + text);
}

std::string toString(SimEventType type) {
    switch (type) {
        case SimEventType::taskReady: return "taskReady";
        case SimEventType::transferStart: return "transferStart";
        case SimEventType::transferEnd: return "transferEnd";
        case SimEventType::taskStart: return "taskStart";
        case SimEventType::taskEnd: return "taskEnd";
        case SimEventType::preemption: return "preemption";
        case SimEventType::reprovision: return "reprovision";
    }
    return "taskReady";
}

namespace {

double roundUpBilled(double seconds, BillingGranularity granularity) {
    if (seconds <= 0) return 0.0;
    if (granularity == BillingGranularity::perSecond) return std::ceil(seconds);
    return std::ceil(seconds / 3600.0) * 3600.0;
}

double billedPrice(const Offer& offer, const std::string& billing) {
    if (billing == "spot" && offer.priceSpot) return *offer.priceSpot;
    return offer.priceOnDemand ? *offer.priceOnDemand : offer.priceSpot.value_or(0.0);
}

}  // namespace

CostBreakdown accountCost(const std::vector<SimEvent>& events, const Catalog& catalog,
                          const SimConfig& config) {
    CostBreakdown out;
    struct Open {
        double start;
        OfferId offer;
        std::string billing;
    };
    std::map<std::string, Open> running;
    std::map<std::string, int> attempts;
    for (const auto& ev : events) {
        switch (ev.type) {
            case SimEventType::taskStart:
                running[ev.subject] = {ev.time, ev.offer, ev.billing};
                break;
            case SimEventType::taskEnd:
            case SimEventType::preemption: {
                auto it = running.find(ev.subject);
                if (it == running.end()) break;
                const Offer* offer = catalog.findOffer(it->second.offer);
                double billed = roundUpBilled(ev.time - it->second.start, config.billing);
                double amount =
                    offer ? billed / 3600.0 * billedPrice(*offer, it->second.billing) : 0.0;
                int n = ++attempts[ev.subject];
                std::string subject = ev.subject + "@" + it->second.offer;
                if (n > 1) subject += "#" + std::to_string(n);
                out.items.push_back({"compute", subject, amount});
                running.erase(it);
                break;
            }
            case SimEventType::transferEnd: {
                if (ev.src == ev.dst) break;
                Link l = catalog.link(ev.src, ev.dst);
                out.items.push_back({"egress", ev.subject, l.egressFee * ev.wireBytes});
                break;
            }
            default:
                break;
        }
    }
    double total = 0.0;
    for (const auto& item : out.items) total += item.amount;
    out.total = total;
    return out;
}

namespace {

// Queue entry; phase orders simultaneous events: state changes first, then
// link dispatch, then offer dispatch, so resource arbitration sees every
// candidate that became ready at the same instant.
struct QueuedEvent {
    double time;
    int phase;
    std::uint64_t seq;
    int kind;  // 0 taskReady, 1 taskEnd, 2 preemption, 3 transferEnd, 4 tryLink, 5 tryOffer
    std::uint32_t node = 0;
    std::uint32_t edge = 0;
    int attempt = 0;
    std::string key;  // link or offer id for dispatch events

    bool operator>(const QueuedEvent& other) const {
        if (time != other.time) return time > other.time;
        if (phase != other.phase) return phase > other.phase;
        return seq > other.seq;
    }
};

struct NodeState {
    const Offer* offer = nullptr;
    int pendingIn = 0;
    double provisionReadyAt = 0.0;
    bool started = false;
    bool done = false;
    bool running = false;
    int attempt = 0;
    int preemptions = 0;
    double firstStart = 0.0;
    double runStart = 0.0;
    double end = 0.0;
};

struct OfferState {
    bool busy = false;
    std::set<std::pair<std::string, std::uint32_t>> ready;  // by instance id
};

struct LinkState {
    bool busy = false;
    std::set<std::pair<std::string, std::uint32_t>> waiting;  // by edge id
};

}  // namespace

SimReport simulate(const InstanceGraph& instances, const Placement& placement,
                   const Catalog& catalog, const SimConfig& config) {
    if (config.compressionParams.ratio < 1) throw Error("compression ratio must be >= 1");
    if (!(config.compressionParams.compressThroughput > 0) ||
        !(config.compressionParams.decompressThroughput > 0)) {
        throw Error("codec throughputs must be positive");
    }

    SimReport report;
    const std::size_t n = instances.nodes.size();
    std::vector<NodeState> state(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        const OfferId* offerId = placement.offerFor(instances.nodes[v].id);
        if (!offerId) {
            throw IncompletePlacementError("no assignment for " + instances.nodes[v].id);
        }
        const Offer* offer = catalog.findOffer(*offerId);
        if (!offer) throw IncompletePlacementError("unknown offer " + *offerId);
        state[v].offer = offer;
        state[v].pendingIn = static_cast<int>(instances.inEdges[v].size());
    }

    std::map<OfferId, OfferState> offerState;
    std::map<std::string, LinkState> linkState;
    std::map<std::string, LinkUsage> linkUsage;

    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue;
    std::uint64_t seq = 0;
    auto push = [&](QueuedEvent ev) {
        ev.seq = seq++;
        queue.push(std::move(ev));
    };

    std::mt19937_64 rng(config.seed);

    struct Segment {
        std::uint32_t node;
        const Offer* offer;
        double start, end;
    };
    std::vector<Segment> segments;

    auto log = [&](SimEvent ev) { report.events.push_back(std::move(ev)); };

    // Producer sites move when a task is re-planned, so transfers read the
    // live offer of the producing node, not the static plan.
    auto issueTransfer = [&](double now, std::uint32_t ei) {
        const auto& e = instances.edges[ei];
        SiteId src = state[e.producer].offer->site;
        SiteId dst = state[e.consumer].offer->site;
        if (src == dst) {
            log({now, SimEventType::transferStart, e.id, "", src, dst, e.volume, e.volume, ""});
            log({now, SimEventType::transferEnd, e.id, "", src, dst, e.volume, e.volume, ""});
            auto& cs = state[e.consumer];
            if (--cs.pendingIn == 0 && !cs.done) {
                push({std::max(now, cs.provisionReadyAt), 0, 0, 0, e.consumer});
            }
            return;
        }
        std::string lk = src + "->" + dst;
        linkState[lk].waiting.insert({e.id, ei});
        push({now, 1, 0, 4, 0, 0, 0, lk});
    };

    auto maybeScheduleEnd = [&](double now, std::uint32_t v) {
        NodeState& ns = state[v];
        const Task& task = instances.taskOf(v);
        double duration = computeTime(*ns.offer, task);
        bool spotBilled = task.spotTolerant && ns.offer->priceSpot.has_value();
        std::string billing = spotBilled ? "spot" : "onDemand";
        ns.running = true;
        ns.runStart = now;
        if (!ns.started) {
            ns.started = true;
            ns.firstStart = now;
        }
        ++ns.attempt;
        log({now, SimEventType::taskStart, instances.nodes[v].id, ns.offer->id, "", "", 0, 0,
             billing});
        if (config.preemptionEnabled && spotBilled && ns.offer->spotPreemptionRate > 0) {
            std::exponential_distribution<double> dist(ns.offer->spotPreemptionRate / 3600.0);
            double untilPreempt = dist(rng);
            if (untilPreempt < duration) {
                push({now + untilPreempt, 0, 0, 2, v, 0, ns.attempt});
                return;
            }
        }
        push({now + duration, 0, 0, 1, v, 0, ns.attempt});
    };

    // Seed: tasks with no inputs are ready at t=0.
    for (std::uint32_t v = 0; v < n; ++v) {
        if (state[v].pendingIn == 0) push({0.0, 0, 0, 0, v});
    }

    double makespan = 0.0;
    while (!queue.empty()) {
        QueuedEvent ev = queue.top();
        queue.pop();
        switch (ev.kind) {
            case 0: {  // taskReady
                NodeState& ns = state[ev.node];
                if (ns.done || ns.running) break;
                log({ev.time, SimEventType::taskReady, instances.nodes[ev.node].id, ns.offer->id,
                     "", "", 0, 0, ""});
                offerState[ns.offer->id].ready.insert({instances.nodes[ev.node].id, ev.node});
                push({ev.time, 2, 0, 5, 0, 0, 0, ns.offer->id});
                break;
            }
            case 1: {  // taskEnd
                NodeState& ns = state[ev.node];
                if (!ns.running || ev.attempt != ns.attempt) break;
                ns.running = false;
                ns.done = true;
                ns.end = ev.time;
                makespan = std::max(makespan, ev.time);
                segments.push_back({ev.node, ns.offer, ns.runStart, ev.time});
                log({ev.time, SimEventType::taskEnd, instances.nodes[ev.node].id, ns.offer->id,
                     "", "", 0, 0, ""});
                offerState[ns.offer->id].busy = false;
                push({ev.time, 2, 0, 5, 0, 0, 0, ns.offer->id});
                for (std::uint32_t ei : instances.outEdges[ev.node]) {
                    issueTransfer(ev.time, ei);
                }
                break;
            }
            case 2: {  // preemption
                NodeState& ns = state[ev.node];
                if (!ns.running || ev.attempt != ns.attempt) break;
                const Task& task = instances.taskOf(ev.node);
                ns.running = false;
                ++ns.preemptions;
                segments.push_back({ev.node, ns.offer, ns.runStart, ev.time});
                log({ev.time, SimEventType::preemption, instances.nodes[ev.node].id,
                     ns.offer->id, "", "", 0, 0, ""});
                offerState[ns.offer->id].busy = false;
                push({ev.time, 2, 0, 5, 0, 0, 0, ns.offer->id});

                Requirement req;
                req.minCpuUnits = 1.0;
                req.minMemory = task.memoryNeed;
                req.minAccelerators = task.acceleratorNeed;
                req.spotOk = task.spotTolerant;
                if (task.pinnedSite) req.siteAllowList = std::vector<SiteId>{*task.pinnedSite};
                double estHours = std::max(task.work, 1e-9) / 3600.0;
                BrokerChoice choice = replanOnPreemption(catalog, req, placement.objective,
                                                         estHours, 1.0, ns.offer->id);
                const Offer* next = catalog.findOffer(choice.offer.id);
                ns.offer = next;
                ns.provisionReadyAt = ev.time + next->provisionDelay;
                log({ev.time, SimEventType::reprovision, instances.nodes[ev.node].id, next->id,
                     "", "", 0, 0, ""});

                // Inputs persist at their producers' sites; stage whatever the
                // new site is missing.
                ns.pendingIn = static_cast<int>(instances.inEdges[ev.node].size());
                if (ns.pendingIn == 0) {
                    push({ns.provisionReadyAt, 0, 0, 0, ev.node});
                } else {
                    for (std::uint32_t ei : instances.inEdges[ev.node]) {
                        issueTransfer(ev.time, ei);
                    }
                }
                break;
            }
            case 3: {  // transferEnd
                const auto& e = instances.edges[ev.edge];
                // Endpoints were fixed at transfer start via the key field.
                const std::string& lk = ev.key;
                auto pos = lk.find("->");
                SiteId from = lk.substr(0, pos);
                SiteId to = lk.substr(pos + 2);
                auto compression =
                    appliedCompression(config.compressionPolicy, config.compressionParams,
                                       e.compressible, catalog, from, to);
                double wire = compression ? e.volume / compression->ratio : e.volume;
                double duration = transferTime(catalog, from, to, e.volume, compression);
                log({ev.time, SimEventType::transferEnd, e.id, "", from, to, e.volume, wire, ""});
                auto& lu = linkUsage[lk];
                lu.src = from;
                lu.dst = to;
                lu.bytes += wire;
                lu.seconds += duration;
                linkState[lk].busy = false;
                push({ev.time, 1, 0, 4, 0, 0, 0, lk});
                auto& cs = state[e.consumer];
                if (--cs.pendingIn == 0 && !cs.done) {
                    push({std::max(ev.time, cs.provisionReadyAt), 0, 0, 0, e.consumer});
                }
                break;
            }
            case 4: {  // link dispatch
                LinkState& ls = linkState[ev.key];
                if (ls.busy || ls.waiting.empty()) break;
                auto [edgeId, ei] = *ls.waiting.begin();
                ls.waiting.erase(ls.waiting.begin());
                const auto& e = instances.edges[ei];
                auto pos = ev.key.find("->");
                SiteId from = ev.key.substr(0, pos);
                SiteId to = ev.key.substr(pos + 2);
                auto compression =
                    appliedCompression(config.compressionPolicy, config.compressionParams,
                                       e.compressible, catalog, from, to);
                double wire = compression ? e.volume / compression->ratio : e.volume;
                double duration = transferTime(catalog, from, to, e.volume, compression);
                ls.busy = true;
                log({ev.time, SimEventType::transferStart, e.id, "", from, to, e.volume, wire,
                     ""});
                push({ev.time + duration, 0, 0, 3, 0, ei, 0, ev.key});
                break;
            }
            case 5: {  // offer dispatch
                OfferState& os = offerState[ev.key];
                if (os.busy || os.ready.empty()) break;
                auto [instanceId, v] = *os.ready.begin();
                os.ready.erase(os.ready.begin());
                os.busy = true;
                maybeScheduleEnd(ev.time, v);
                break;
            }
        }
    }

    for (std::uint32_t v = 0; v < n; ++v) {
        if (!state[v].done) {
            throw Error("simulation stalled before " + instances.nodes[v].id +
                        " could run (cyclic or incomplete inputs)");
        }
    }

    report.makespan = makespan;
    auto breakdown = accountCost(report.events, catalog, config);
    report.costItems = breakdown.items;
    report.totalCost = breakdown.total;

    // Compute energy per execution segment, then idle draw over each used
    // offer's activation window.
    double joules = 0.0;
    struct Window {
        double first = 0.0, last = 0.0, busy = 0.0;
        const Offer* offer = nullptr;
        bool seen = false;
    };
    std::map<OfferId, Window> windows;
    for (const auto& seg : segments) {
        joules += energy(*seg.offer, seg.end - seg.start, 0.0);
        Window& w = windows[seg.offer->id];
        if (!w.seen) {
            w.first = seg.start;
            w.last = seg.end;
            w.seen = true;
            w.offer = seg.offer;
        }
        w.first = std::min(w.first, seg.start);
        w.last = std::max(w.last, seg.end);
        w.busy += seg.end - seg.start;
    }
    for (const auto& [id, w] : windows) {
        joules += energy(*w.offer, 0.0, std::max(0.0, (w.last - w.first) - w.busy));
    }
    report.totalEnergy = joules;

    report.tasks.reserve(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        report.tasks.push_back({instances.nodes[v].id, state[v].offer->id, state[v].firstStart,
                                state[v].end, state[v].preemptions});
    }
    std::sort(report.tasks.begin(), report.tasks.end(),
              [](const TaskTimeline& a, const TaskTimeline& b) { return a.instance < b.instance; });
    for (const auto& [key, usage] : linkUsage) report.links.push_back(usage);
    return report;
}

double reportScore(const SimReport& report, const Objective& objective) {
    return objective.timeWeight * report.makespan + objective.costWeight * report.totalCost +
           objective.energyWeight * energyScore(report.totalEnergy);
}

}  // namespace flowcast
