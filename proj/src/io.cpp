#include "flowcast/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace flowcast {

namespace {

using json = nlohmann::ordered_json;

json toJson(const Objective& o) {
    return json{{"time", o.timeWeight}, {"cost", o.costWeight}, {"energy", o.energyWeight}};
}

Objective objectiveFromJson(const json& j) {
    Objective o;
    o.timeWeight = j.at("time").get<double>();
    o.costWeight = j.at("cost").get<double>();
    o.energyWeight = j.at("energy").get<double>();
    return o;
}

json toJson(const Task& t) {
    json j{{"id", t.id},
           {"kind", toString(t.kind)},
           {"work", t.work},
           {"memoryNeed", t.memoryNeed},
           {"acceleratorNeed", t.acceleratorNeed}};
    if (t.pinnedSite) j["pinnedSite"] = *t.pinnedSite;
    j["spotTolerant"] = t.spotTolerant;
    return j;
}

Task taskFromJson(const json& j) {
    Task t;
    t.id = j.at("id").get<std::string>();
    t.kind = taskKindFromString(j.at("kind").get<std::string>());
    t.work = j.at("work").get<double>();
    t.memoryNeed = j.at("memoryNeed").get<double>();
    t.acceleratorNeed = j.at("acceleratorNeed").get<int>();
    if (j.contains("pinnedSite") && !j["pinnedSite"].is_null()) {
        t.pinnedSite = j["pinnedSite"].get<std::string>();
    }
    t.spotTolerant = j.value("spotTolerant", false);
    return t;
}

json toJson(const WorkflowGraph& g) {
    json tasks = json::array();
    for (const auto& t : g.tasks) tasks.push_back(toJson(t));
    json edges = json::array();
    for (const auto& e : g.edges) {
        edges.push_back(json{{"producer", e.producer},
                             {"consumer", e.consumer},
                             {"volume", e.volume},
                             {"compressible", e.compressible}});
    }
    return json{{"tasks", tasks},
                {"edges", edges},
                {"innerLoop", g.innerLoop},
                {"outerLoop", g.outerLoop},
                {"innerIterations", g.innerIterations},
                {"outerIterations", g.outerIterations}};
}

WorkflowGraph workflowFromJson(const json& j) {
    WorkflowGraph g;
    for (const auto& t : j.at("tasks")) g.tasks.push_back(taskFromJson(t));
    for (const auto& e : j.at("edges")) {
        g.edges.push_back({e.at("producer").get<std::string>(),
                           e.at("consumer").get<std::string>(), e.at("volume").get<double>(),
                           e.value("compressible", false)});
    }
    g.innerLoop = j.value("innerLoop", std::vector<std::string>{});
    g.outerLoop = j.value("outerLoop", std::vector<std::string>{});
    g.innerIterations = j.value("innerIterations", 1);
    g.outerIterations = j.value("outerIterations", 1);
    return g;
}

json toJson(const Catalog& c) {
    json sites = json::array();
    for (const auto& s : c.sites) {
        json js{{"id", s.id}, {"class", toString(s.cls)}};
        if (s.provider) js["provider"] = *s.provider;
        sites.push_back(js);
    }
    json offers = json::array();
    for (const auto& o : c.offers) {
        json jo{{"id", o.id},
                {"site", o.site},
                {"cpuUnits", o.cpuUnits},
                {"memory", o.memory},
                {"accelerators", o.accelerators}};
        if (o.priceOnDemand) jo["priceOnDemand"] = *o.priceOnDemand;
        if (o.priceSpot) jo["priceSpot"] = *o.priceSpot;
        jo["spotPreemptionRate"] = o.spotPreemptionRate;
        jo["provisionDelay"] = o.provisionDelay;
        jo["power"] = o.power;
        jo["idlePower"] = o.idlePower;
        offers.push_back(jo);
    }
    json links = json::array();
    for (const auto& l : c.links) {
        links.push_back(json{{"src", l.src},
                             {"dst", l.dst},
                             {"bandwidth", l.bandwidth},
                             {"latency", l.latency},
                             {"egressFee", l.egressFee}});
    }
    return json{{"sites", sites},
                {"offers", offers},
                {"links", links},
                {"defaultLink",
                 json{{"bandwidth", c.defaultLink.bandwidth},
                      {"latency", c.defaultLink.latency},
                      {"egressFee", c.defaultLink.egressFee}}}};
}

Catalog catalogFromJson(const json& j) {
    Catalog c;
    for (const auto& s : j.at("sites")) {
        Site site;
        site.id = s.at("id").get<std::string>();
        site.cls = siteClassFromString(s.at("class").get<std::string>());
        if (s.contains("provider") && !s["provider"].is_null()) {
            site.provider = s["provider"].get<std::string>();
        }
        c.sites.push_back(site);
    }
    for (const auto& o : j.at("offers")) {
        Offer offer;
        offer.id = o.at("id").get<std::string>();
        offer.site = o.at("site").get<std::string>();
        offer.cpuUnits = o.at("cpuUnits").get<double>();
        offer.memory = o.at("memory").get<double>();
        offer.accelerators = o.at("accelerators").get<int>();
        if (o.contains("priceOnDemand") && !o["priceOnDemand"].is_null()) {
            offer.priceOnDemand = o["priceOnDemand"].get<double>();
        }
        if (o.contains("priceSpot") && !o["priceSpot"].is_null()) {
            offer.priceSpot = o["priceSpot"].get<double>();
        }
        offer.spotPreemptionRate = o.value("spotPreemptionRate", 0.0);
        offer.provisionDelay = o.value("provisionDelay", 0.0);
        offer.power = o.value("power", 0.0);
        offer.idlePower = o.value("idlePower", 0.0);
        c.offers.push_back(offer);
    }
    if (j.contains("links")) {
        for (const auto& l : j["links"]) {
            c.links.push_back({l.at("src").get<std::string>(), l.at("dst").get<std::string>(),
                               l.at("bandwidth").get<double>(), l.at("latency").get<double>(),
                               l.value("egressFee", 0.0)});
        }
    }
    if (j.contains("defaultLink")) {
        const auto& d = j["defaultLink"];
        c.defaultLink = {"", "", d.at("bandwidth").get<double>(), d.at("latency").get<double>(),
                         d.value("egressFee", 0.0)};
    }
    c.rebuildIndex();
    checkCatalog(c);
    return c;
}

json toJson(const ScenarioSpec& s) {
    json j;
    j["name"] = s.name;
    if (const auto* file = std::get_if<std::string>(&s.workflow)) {
        j["workflow"] = *file;
    } else {
        j["workflow"] = toJson(std::get<WorkflowGraph>(s.workflow));
    }
    if (const auto* file = std::get_if<std::string>(&s.catalog)) {
        j["catalog"] = *file;
    } else {
        j["catalog"] = toJson(std::get<Catalog>(s.catalog));
    }
    j["objective"] = toJson(s.objective);
    json constraints;
    constraints["pins"] = s.constraints.pins;
    constraints["spotTolerant"] = s.constraints.spotTolerant;
    constraints["siteAllowLists"] = s.constraints.siteAllowLists;
    j["constraints"] = constraints;
    if (s.innerIterations) j["innerIterations"] = *s.innerIterations;
    if (s.outerIterations) j["outerIterations"] = *s.outerIterations;
    j["compression"] = json{{"policy", toString(s.compressionPolicy)},
                            {"ratio", s.compressionParams.ratio},
                            {"compressThroughput", s.compressionParams.compressThroughput},
                            {"decompressThroughput", s.compressionParams.decompressThroughput}};
    j["billingGranularity"] = toString(s.billing);
    j["preemptionEnabled"] = s.preemptionEnabled;
    j["brokered"] = s.brokered;
    j["criticalFlowCount"] = s.criticalFlowCount;
    j["seed"] = s.seed;
    return j;
}

ScenarioSpec scenarioFromJson(const json& j) {
    ScenarioSpec s;
    s.name = j.value("name", "custom");
    const auto& wf = j.at("workflow");
    if (wf.is_string()) {
        s.workflow = wf.get<std::string>();
    } else {
        s.workflow = workflowFromJson(wf);
    }
    const auto& cat = j.at("catalog");
    if (cat.is_string()) {
        s.catalog = cat.get<std::string>();
    } else {
        s.catalog = catalogFromJson(cat);
    }
    s.objective = objectiveFromJson(j.at("objective"));
    if (j.contains("constraints")) {
        const auto& c = j["constraints"];
        if (c.contains("pins")) s.constraints.pins = c["pins"].get<std::map<TaskId, SiteId>>();
        if (c.contains("spotTolerant")) {
            s.constraints.spotTolerant = c["spotTolerant"].get<std::map<TaskId, bool>>();
        }
        if (c.contains("siteAllowLists")) {
            s.constraints.siteAllowLists =
                c["siteAllowLists"].get<std::map<TaskId, std::vector<SiteId>>>();
        }
    }
    if (j.contains("innerIterations")) s.innerIterations = j["innerIterations"].get<int>();
    if (j.contains("outerIterations")) s.outerIterations = j["outerIterations"].get<int>();
    if (j.contains("compression")) {
        const auto& comp = j["compression"];
        s.compressionPolicy = compressionPolicyFromString(comp.at("policy").get<std::string>());
        s.compressionParams.ratio = comp.value("ratio", 10.0);
        s.compressionParams.compressThroughput = comp.value("compressThroughput", 1e9);
        s.compressionParams.decompressThroughput = comp.value("decompressThroughput", 1e9);
    }
    if (j.contains("billingGranularity")) {
        s.billing = billingGranularityFromString(j["billingGranularity"].get<std::string>());
    }
    s.preemptionEnabled = j.value("preemptionEnabled", false);
    s.brokered = j.value("brokered", false);
    s.criticalFlowCount = j.value("criticalFlowCount", 10);
    s.seed = j.value("seed", std::uint64_t{0});
    return s;
}

json toJson(const Placement& p) {
    json assignments = json::array();
    for (const auto& [instance, offer] : p.assignments) {
        assignments.push_back(json{{"instance", instance}, {"offer", offer}});
    }
    json data = json::array();
    for (const auto& [id, site] : p.dataLocations) {
        data.push_back(json{{"data", id}, {"site", site}});
    }
    json decisions = json::array();
    for (const auto& d : p.decisions) {
        json jd{{"instance", d.instance}, {"choice", d.choice}};
        if (!d.localitySite.empty()) jd["localitySite"] = d.localitySite;
        if (!d.localityOffer.empty()) jd["localityOffer"] = d.localityOffer;
        jd["parallelismOffer"] = d.parallelismOffer;
        json scores = json::array();
        for (const auto& [offer, score] : d.scores) {
            scores.push_back(json{{"offer", offer}, {"score", score}});
        }
        jd["scores"] = scores;
        jd["chosenOffer"] = d.chosenOffer;
        decisions.push_back(jd);
    }
    return json{{"objective", toJson(p.objective)},
                {"assignments", assignments},
                {"dataLocations", data},
                {"decisions", decisions}};
}

Placement placementFromJson(const json& j) {
    Placement p;
    p.objective = objectiveFromJson(j.at("objective"));
    for (const auto& a : j.at("assignments")) {
        p.assignments.push_back(
            {a.at("instance").get<std::string>(), a.at("offer").get<std::string>()});
    }
    for (const auto& d : j.value("dataLocations", json::array())) {
        p.dataLocations.push_back(
            {d.at("data").get<std::string>(), d.at("site").get<std::string>()});
    }
    for (const auto& d : j.value("decisions", json::array())) {
        PlacementDecision dec;
        dec.instance = d.at("instance").get<std::string>();
        dec.choice = d.at("choice").get<std::string>();
        dec.localitySite = d.value("localitySite", "");
        dec.localityOffer = d.value("localityOffer", "");
        dec.parallelismOffer = d.value("parallelismOffer", "");
        for (const auto& s : d.value("scores", json::array())) {
            dec.scores.push_back({s.at("offer").get<std::string>(), s.at("score").get<double>()});
        }
        dec.chosenOffer = d.at("chosenOffer").get<std::string>();
        p.decisions.push_back(dec);
    }
    return p;
}

json toJson(const SimReport& r) {
    json tasks = json::array();
    for (const auto& t : r.tasks) {
        tasks.push_back(json{{"instance", t.instance},
                             {"offer", t.offer},
                             {"start", t.start},
                             {"end", t.end},
                             {"preemptions", t.preemptions}});
    }
    json links = json::array();
    for (const auto& l : r.links) {
        links.push_back(json{
            {"src", l.src}, {"dst", l.dst}, {"bytes", l.bytes}, {"seconds", l.seconds}});
    }
    json items = json::array();
    for (const auto& c : r.costItems) {
        items.push_back(json{{"kind", c.kind}, {"subject", c.subject}, {"amount", c.amount}});
    }
    json events = json::array();
    for (const auto& e : r.events) {
        json je{{"t", e.time}, {"type", toString(e.type)}, {"subject", e.subject}};
        if (!e.offer.empty()) je["offer"] = e.offer;
        if (!e.src.empty()) je["src"] = e.src;
        if (!e.dst.empty()) je["dst"] = e.dst;
        if (e.logicalBytes != 0.0 || e.wireBytes != 0.0) {
            je["bytes"] = e.logicalBytes;
            je["wire"] = e.wireBytes;
        }
        if (!e.billing.empty()) je["billing"] = e.billing;
        events.push_back(je);
    }
    return json{{"makespan", r.makespan},
                {"totalCost", r.totalCost},
                {"totalEnergy", r.totalEnergy},
                {"tasks", tasks},
                {"links", links},
                {"costItems", items},
                {"events", events}};
}

SimEventType eventTypeFromString(const std::string& text) {
    for (SimEventType t :
         {SimEventType::taskReady, SimEventType::transferStart, SimEventType::transferEnd,
          SimEventType::taskStart, SimEventType::taskEnd, SimEventType::preemption,
          SimEventType::reprovision}) {
        if (toString(t) == text) return t;
    }
    throw ParseError("unknown event type: " + text);
}

SimReport reportFromJson(const json& j) {
    SimReport r;
    r.makespan = j.at("makespan").get<double>();
    r.totalCost = j.at("totalCost").get<double>();
    r.totalEnergy = j.at("totalEnergy").get<double>();
    for (const auto& t : j.value("tasks", json::array())) {
        r.tasks.push_back({t.at("instance").get<std::string>(), t.at("offer").get<std::string>(),
                           t.at("start").get<double>(), t.at("end").get<double>(),
                           t.at("preemptions").get<int>()});
    }
    for (const auto& l : j.value("links", json::array())) {
        r.links.push_back({l.at("src").get<std::string>(), l.at("dst").get<std::string>(),
                           l.at("bytes").get<double>(), l.at("seconds").get<double>()});
    }
    for (const auto& c : j.value("costItems", json::array())) {
        r.costItems.push_back({c.at("kind").get<std::string>(),
                               c.at("subject").get<std::string>(),
                               c.at("amount").get<double>()});
    }
    for (const auto& e : j.value("events", json::array())) {
        SimEvent ev;
        ev.time = e.at("t").get<double>();
        ev.type = eventTypeFromString(e.at("type").get<std::string>());
        ev.subject = e.at("subject").get<std::string>();
        ev.offer = e.value("offer", "");
        ev.src = e.value("src", "");
        ev.dst = e.value("dst", "");
        ev.logicalBytes = e.value("bytes", 0.0);
        ev.wireBytes = e.value("wire", 0.0);
        ev.billing = e.value("billing", "");
        r.events.push_back(ev);
    }
    return r;
}

json toJson(const Requirement& r) {
    json j{{"minCpuUnits", r.minCpuUnits},
           {"minMemory", r.minMemory},
           {"minAccelerators", r.minAccelerators},
           {"spotOk", r.spotOk}};
    if (r.maxPrice) j["maxPrice"] = *r.maxPrice;
    if (r.siteAllowList) j["siteAllowList"] = *r.siteAllowList;
    return j;
}

Requirement requirementFromJson(const json& j) {
    Requirement r;
    r.minCpuUnits = j.value("minCpuUnits", 0.0);
    r.minMemory = j.value("minMemory", 0.0);
    r.minAccelerators = j.value("minAccelerators", 0);
    r.spotOk = j.value("spotOk", false);
    if (j.contains("maxPrice") && !j["maxPrice"].is_null()) {
        r.maxPrice = j["maxPrice"].get<double>();
    }
    if (j.contains("siteAllowList") && !j["siteAllowList"].is_null()) {
        r.siteAllowList = j["siteAllowList"].get<std::vector<SiteId>>();
    }
    return r;
}

std::string dumpPretty(const json& j) { return j.dump(2) + "\n"; }

json parseJson(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

template <typename T, typename F>
T convert(const std::string& text, const char* what, F&& fromJson) {
    json j = parseJson(text, what);
    try {
        return fromJson(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

std::vector<std::string> splitCsvLine(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

std::string serialize(const WorkflowGraph& graph) { return dumpPretty(toJson(graph)); }

WorkflowGraph parseWorkflow(const std::string& text) {
    return convert<WorkflowGraph>(text, "workflow", workflowFromJson);
}

std::string serialize(const Catalog& catalog) { return dumpPretty(toJson(catalog)); }

Catalog parseCatalog(const std::string& text) {
    return convert<Catalog>(text, "catalog", catalogFromJson);
}

std::string serialize(const ScenarioSpec& spec) { return dumpPretty(toJson(spec)); }

ScenarioSpec parseScenario(const std::string& text) {
    return convert<ScenarioSpec>(text, "scenario", scenarioFromJson);
}

std::string serialize(const Placement& placement) { return dumpPretty(toJson(placement)); }

Placement parsePlacement(const std::string& text) {
    return convert<Placement>(text, "placement", placementFromJson);
}

std::string serialize(const SimReport& report) { return dumpPretty(toJson(report)); }

SimReport parseSimReport(const std::string& text) {
    return convert<SimReport>(text, "report", reportFromJson);
}

std::string serialize(const Requirement& req) { return dumpPretty(toJson(req)); }

Requirement parseRequirement(const std::string& text) {
    return convert<Requirement>(text, "requirement", requirementFromJson);
}

std::string serialize(const BrokerChoice& choice) {
    json alternatives = json::array();
    for (const auto& [offer, score] : choice.alternatives) {
        alternatives.push_back(json{{"offer", offer}, {"score", score}});
    }
    json j{{"offer", choice.offer.id},
           {"site", choice.offer.site},
           {"estStartSeconds", choice.estStartSeconds},
           {"estCostPerHour", choice.estCostPerHour},
           {"usedSpot", choice.usedSpot},
           {"alternatives", alternatives}};
    return dumpPretty(j);
}

std::string serializeTrace(const std::vector<TraceEvent>& events) {
    std::ostringstream os;
    os << "timestamp,task,op,data,bytes,duration\n";
    for (const auto& e : events) {
        os << formatDouble(e.timestamp) << ',' << e.taskInstance << ',' << toString(e.op) << ','
           << e.dataId << ',' << formatDouble(e.bytes) << ',' << formatDouble(e.duration)
           << '\n';
    }
    return os.str();
}

std::vector<TraceEvent> parseTrace(const std::string& text) {
    std::vector<TraceEvent> events;
    std::istringstream is(text);
    std::string line;
    bool first = true;
    std::size_t lineNo = 0;
    while (std::getline(is, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line != "timestamp,task,op,data,bytes,duration") {
                throw ParseError("trace: unexpected header '" + line + "'");
            }
            continue;
        }
        auto fields = splitCsvLine(line);
        if (fields.size() != 6) {
            throw ParseError("trace: line " + std::to_string(lineNo) + " has " +
                             std::to_string(fields.size()) + " fields, expected 6");
        }
        try {
            events.push_back({std::stod(fields[0]), fields[1], traceOpFromString(fields[2]),
                              fields[3], std::stod(fields[4]), std::stod(fields[5])});
        } catch (const std::invalid_argument&) {
            throw ParseError("trace: bad number on line " + std::to_string(lineNo));
        }
    }
    return events;
}

std::string severityCsv(const SeverityReport& report) {
    std::ostringstream os;
    os << "rank,edge,seconds,share\n";
    int rank = 1;
    for (const auto& e : report.entries) {
        os << rank++ << ',' << e.edgeId << ',' << formatDouble(e.severitySeconds) << ','
           << formatDouble(e.share) << '\n';
    }
    return os.str();
}

std::string severityText(const SeverityReport& report) {
    std::ostringstream os;
    os << "critical path: " << formatDouble(report.criticalPathSeconds) << " s\n";
    int rank = 1;
    for (const auto& e : report.entries) {
        os << rank++ << ". " << e.edgeId << "  " << formatDouble(e.severitySeconds) << " s  ("
           << formatDouble(e.share * 100.0) << "% of critical path)\n";
    }
    return os.str();
}

std::string timelineCsv(const SimReport& report) {
    std::ostringstream os;
    os << "instance,offer,start,end,preemptions\n";
    for (const auto& t : report.tasks) {
        os << t.instance << ',' << t.offer << ',' << formatDouble(t.start) << ','
           << formatDouble(t.end) << ',' << t.preemptions << '\n';
    }
    return os.str();
}

std::string eventLogText(const SimReport& report) {
    std::ostringstream os;
    for (const auto& e : report.events) {
        os << formatDouble(e.time) << ' ' << toString(e.type) << ' ' << e.subject;
        if (!e.offer.empty()) os << " offer=" << e.offer;
        if (!e.src.empty()) os << " link=" << e.src << "->" << e.dst;
        if (e.logicalBytes != 0.0 || e.wireBytes != 0.0) {
            os << " bytes=" << formatDouble(e.logicalBytes)
               << " wire=" << formatDouble(e.wireBytes);
        }
        if (!e.billing.empty()) os << " billing=" << e.billing;
        os << '\n';
    }
    return os.str();
}

std::string comparisonCsv(const std::vector<ComparisonRow>& rows) {
    std::ostringstream os;
    os << "scenario,makespan,cost,energy\n";
    for (const auto& r : rows) {
        os << r.scenario << ',' << formatDouble(r.makespan) << ',' << formatDouble(r.cost) << ','
           << formatDouble(r.energy) << '\n';
    }
    return os.str();
}

std::string readFile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void writeFile(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path.string());
    out << content;
}

}  // namespace flowcast
