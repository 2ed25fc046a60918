#include "flowcast/dfl.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace flowcast {

namespace {

std::string dotEscape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

// Node key in the combined lifecycle graph: tasks and data may share names.
struct NodeRef {
    bool isTask;
    std::uint32_t index;
};

// Longest time-weighted path through the lifecycle graph. Cycles (a task
// that both reads and writes the same data) are collapsed to a single node
// whose internal weight is the sum of its edge times, which keeps the
// computation total and exact on acyclic graphs.
double longestPathSeconds(const DFLGraph& g) {
    const std::size_t nTasks = g.taskNodes.size();
    const std::size_t n = nTasks + g.dataNodes.size();
    std::unordered_map<std::string, std::uint32_t> taskIndex, dataIndex;
    for (std::uint32_t i = 0; i < g.taskNodes.size(); ++i) taskIndex.emplace(g.taskNodes[i], i);
    for (std::uint32_t i = 0; i < g.dataNodes.size(); ++i) dataIndex.emplace(g.dataNodes[i], i);

    struct Edge {
        std::uint32_t from, to;
        double weight;
    };
    std::vector<Edge> edges;
    edges.reserve(g.writeEdges.size() + g.readEdges.size());
    for (const auto& e : g.writeEdges) {
        edges.push_back({taskIndex.at(e.task), static_cast<std::uint32_t>(nTasks + dataIndex.at(e.data)),
                         e.totalTime});
    }
    for (const auto& e : g.readEdges) {
        edges.push_back({static_cast<std::uint32_t>(nTasks + dataIndex.at(e.data)), taskIndex.at(e.task),
                         e.totalTime});
    }

    // Tarjan SCC, iterative.
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (std::uint32_t i = 0; i < edges.size(); ++i) adj[edges[i].from].push_back(i);
    std::vector<int> comp(n, -1), low(n), disc(n, -1);
    std::vector<std::uint32_t> sccStack;
    std::vector<bool> onStack(n, false);
    int timer = 0, nComp = 0;
    struct Frame {
        std::uint32_t v;
        std::size_t next;
    };
    for (std::uint32_t root = 0; root < n; ++root) {
        if (disc[root] != -1) continue;
        std::vector<Frame> stack{{root, 0}};
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next == 0) {
                disc[v] = low[v] = timer++;
                sccStack.push_back(v);
                onStack[v] = true;
            }
            if (next < adj[v].size()) {
                std::uint32_t w = edges[adj[v][next++]].to;
                if (disc[w] == -1) {
                    stack.push_back({w, 0});
                } else if (onStack[w]) {
                    low[v] = std::min(low[v], disc[w]);
                }
            } else {
                if (low[v] == disc[v]) {
                    while (true) {
                        std::uint32_t w = sccStack.back();
                        sccStack.pop_back();
                        onStack[w] = false;
                        comp[w] = nComp;
                        if (w == v) break;
                    }
                    ++nComp;
                }
                std::uint32_t finished = v;
                stack.pop_back();
                if (!stack.empty()) {
                    low[stack.back().v] = std::min(low[stack.back().v], low[finished]);
                }
            }
        }
    }

    // Condensation DAG; internal edge weights accumulate on the component.
    std::vector<double> internal(nComp, 0.0);
    std::vector<std::vector<std::pair<int, double>>> cadj(nComp);
    std::vector<int> indegree(nComp, 0);
    for (const auto& e : edges) {
        int a = comp[e.from], b = comp[e.to];
        if (a == b) {
            internal[a] += e.weight;
        } else {
            cadj[a].push_back({b, e.weight});
            ++indegree[b];
        }
    }
    // Tarjan numbers components in reverse topological order.
    std::vector<double> dist(nComp);
    double best = 0.0;
    for (int c = 0; c < nComp; ++c) {
        double d = internal[c];
        for (auto [to, w] : cadj[c]) d = std::max(d, internal[c] + w + dist[to]);
        dist[c] = d;
        best = std::max(best, d);
    }
    return best;
}

}  // namespace

std::string toString(TraceOp op) { return op == TraceOp::read ? "read" : "write"; }

TraceOp traceOpFromString(const std::string& text) {
    if (text == "read") return TraceOp::read;
    if (text == "write") return TraceOp::write;
    throw ParseError("unknown trace op: " + text);
}

DFLGraph ingest(std::span<const TraceEvent> events) {
    std::unordered_map<std::string, double> lastSeen;
    std::map<std::pair<std::string, DataId>, DflEdge> writes, reads;
    std::map<std::string, bool> taskSeen;
    std::map<DataId, bool> dataSeen;
    for (const auto& ev : events) {
        if (ev.bytes < 0 || ev.duration < 0 || ev.timestamp < 0) {
            throw MalformedEventError("negative field in trace event for " + ev.taskInstance);
        }
        if (ev.taskInstance.empty() || ev.dataId.empty()) {
            throw MalformedEventError("trace event with empty task or data id");
        }
        auto [it, inserted] = lastSeen.try_emplace(ev.taskInstance, ev.timestamp);
        if (!inserted) {
            if (ev.timestamp < it->second) {
                throw NonMonotoneTimestampError("timestamps regress for task " + ev.taskInstance);
            }
            it->second = ev.timestamp;
        }
        taskSeen[ev.taskInstance] = true;
        dataSeen[ev.dataId] = true;
        auto& bucket = ev.op == TraceOp::write ? writes : reads;
        DflEdge& edge = bucket[{ev.taskInstance, ev.dataId}];
        edge.task = ev.taskInstance;
        edge.data = ev.dataId;
        edge.totalBytes += ev.bytes;
        edge.totalTime += ev.duration;
        edge.opCount += 1;
    }
    DFLGraph g;
    for (const auto& [id, _] : taskSeen) g.taskNodes.push_back(id);
    for (const auto& [id, _] : dataSeen) g.dataNodes.push_back(id);
    for (const auto& [_, e] : writes) g.writeEdges.push_back(e);
    for (const auto& [_, e] : reads) g.readEdges.push_back(e);
    return g;
}

DFLGraph merge(const DFLGraph& a, const DFLGraph& b) {
    DFLGraph g;
    auto mergeNodes = [](const std::vector<std::string>& x, const std::vector<std::string>& y) {
        std::vector<std::string> out;
        std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
        return out;
    };
    g.taskNodes = mergeNodes(a.taskNodes, b.taskNodes);
    g.dataNodes = mergeNodes(a.dataNodes, b.dataNodes);
    auto mergeEdges = [](const std::vector<DflEdge>& x, const std::vector<DflEdge>& y) {
        std::map<std::pair<std::string, DataId>, DflEdge> acc;
        for (const auto* side : {&x, &y}) {
            for (const auto& e : *side) {
                DflEdge& slot = acc[{e.task, e.data}];
                slot.task = e.task;
                slot.data = e.data;
                slot.totalBytes += e.totalBytes;
                slot.totalTime += e.totalTime;
                slot.opCount += e.opCount;
            }
        }
        std::vector<DflEdge> out;
        out.reserve(acc.size());
        for (const auto& [_, e] : acc) out.push_back(e);
        return out;
    };
    g.writeEdges = mergeEdges(a.writeEdges, b.writeEdges);
    g.readEdges = mergeEdges(a.readEdges, b.readEdges);
    return g;
}

SeverityReport severity(const DFLGraph& graph) {
    if (graph.empty()) throw EmptyGraphError("severity on an empty lifecycle graph");
    SeverityReport report;
    report.criticalPathSeconds = longestPathSeconds(graph);
    for (const auto& e : graph.writeEdges) {
        report.entries.push_back({e.task + "->" + e.data, e.totalTime, 0.0});
    }
    for (const auto& e : graph.readEdges) {
        report.entries.push_back({e.data + "->" + e.task, e.totalTime, 0.0});
    }
    for (auto& entry : report.entries) {
        entry.share = report.criticalPathSeconds > 0
                          ? entry.severitySeconds / report.criticalPathSeconds
                          : 0.0;
    }
    std::sort(report.entries.begin(), report.entries.end(),
              [](const SeverityEntry& a, const SeverityEntry& b) {
                  if (a.severitySeconds != b.severitySeconds) {
                      return a.severitySeconds > b.severitySeconds;
                  }
                  return a.edgeId < b.edgeId;
              });
    return report;
}

std::vector<DataId> underProducedData(const DFLGraph& graph) {
    std::map<DataId, double> written, read;
    for (const auto& e : graph.writeEdges) written[e.data] += e.totalBytes;
    for (const auto& e : graph.readEdges) read[e.data] += e.totalBytes;
    std::vector<DataId> out;
    for (const auto& [data, bytes] : read) {
        auto it = written.find(data);
        double w = it == written.end() ? 0.0 : it->second;
        if (bytes > w) out.push_back(data);
    }
    return out;
}

double flowProjection(const Catalog& catalog, const SiteId& producerSite,
                      const SiteId& consumerSite, double volume, bool compressible,
                      CompressionPolicy policy, const CompressionParams& params) {
    auto compression =
        appliedCompression(policy, params, compressible, catalog, producerSite, consumerSite);
    return transferTime(catalog, producerSite, consumerSite, volume, compression);
}

std::string exportDot(const DFLGraph& graph) {
    std::ostringstream os;
    os << "digraph dfl {\n";
    for (const auto& t : graph.taskNodes) {
        os << "  \"t_" << dotEscape(t) << "\" [shape=box, label=\"" << dotEscape(t) << "\"];\n";
    }
    for (const auto& d : graph.dataNodes) {
        os << "  \"d_" << dotEscape(d) << "\" [shape=ellipse, label=\"" << dotEscape(d)
           << "\"];\n";
    }
    for (const auto& e : graph.writeEdges) {
        os << "  \"t_" << dotEscape(e.task) << "\" -> \"d_" << dotEscape(e.data) << "\" [label=\""
           << formatDouble(e.totalBytes) << " B, " << formatDouble(e.totalTime) << " s\"];\n";
    }
    for (const auto& e : graph.readEdges) {
        os << "  \"d_" << dotEscape(e.data) << "\" -> \"t_" << dotEscape(e.task) << "\" [label=\""
           << formatDouble(e.totalBytes) << " B, " << formatDouble(e.totalTime) << " s\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace flowcast
