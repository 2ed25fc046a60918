#include "flowcast/workflow.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace flowcast {

namespace {

bool validId(const std::string& id) {
    if (id.empty()) return false;
    for (char c : id) {
        if (c == '#' || c == ',' || c == '"' || c == '\n' || c == '\r' || c == ' ') return false;
    }
    if (id.find("->") != std::string::npos) return false;
    return true;
}

std::string padIteration(int iteration, int count) {
    int width = 1;
    for (int upper = count - 1; upper >= 10; upper /= 10) ++width;
    std::string digits = std::to_string(iteration);
    return std::string(width > static_cast<int>(digits.size())
                           ? width - static_cast<int>(digits.size())
                           : 0,
                       '0') +
           digits;
}

std::string dotEscape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

// Per-iteration task graph: flow edges plus the execution order implied by
// loop membership (consecutive loop members without an explicit edge).
std::vector<std::pair<std::uint32_t, std::uint32_t>> iterationTaskEdges(
    const WorkflowGraph& graph, const std::unordered_map<TaskId, std::uint32_t>& index) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& e : graph.edges) {
        auto p = index.find(e.producer);
        auto c = index.find(e.consumer);
        if (p == index.end() || c == index.end() || p->second == c->second) continue;
        edges.insert({p->second, c->second});
    }
    for (const auto* loop : {&graph.innerLoop, &graph.outerLoop}) {
        for (std::size_t i = 0; i + 1 < loop->size(); ++i) {
            auto p = index.find((*loop)[i]);
            auto c = index.find((*loop)[i + 1]);
            if (p == index.end() || c == index.end() || p->second == c->second) continue;
            edges.insert({p->second, c->second});
        }
    }
    return {edges.begin(), edges.end()};
}

// Kahn's algorithm over task indices; returns empty when cyclic.
std::vector<std::uint32_t> taskTopoOrder(
    std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<std::uint32_t>> out(n);
    for (auto [p, c] : edges) {
        out[p].push_back(c);
        ++indegree[c];
    }
    std::vector<std::uint32_t> ready;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.push_back(i);
    }
    std::vector<std::uint32_t> order;
    while (!ready.empty()) {
        std::uint32_t v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (std::uint32_t w : out[v]) {
            if (--indegree[w] == 0) ready.push_back(w);
        }
    }
    if (order.size() != n) return {};
    return order;
}

}  // namespace

std::string toString(TaskKind kind) {
    switch (kind) {
        case TaskKind::instrument: return "instrument";
        case TaskKind::inference: return "inference";
        case TaskKind::generator: return "generator";
        case TaskKind::trainer: return "trainer";
        case TaskKind::compressor: return "compressor";
        case TaskKind::generic: return "generic";
    }
    return "generic";
}

TaskKind taskKindFromString(const std::string& text) {
    if (text == "instrument") return TaskKind::instrument;
    if (text == "inference") return TaskKind::inference;
    if (text == "generator") return TaskKind::generator;
    if (text == "trainer") return TaskKind::trainer;
    if (text == "compressor") return TaskKind::compressor;
    if (text == "generic") return TaskKind::generic;
    throw ParseError("unknown task kind: " + text);
}

const Task* WorkflowGraph::findTask(const TaskId& id) const {
    for (const auto& t : tasks) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

std::string toString(ViolationCode code) {
    switch (code) {
        case ViolationCode::DanglingEdge: return "DanglingEdge";
        case ViolationCode::UnpinnedInstrument: return "UnpinnedInstrument";
        case ViolationCode::SelfEdge: return "SelfEdge";
        case ViolationCode::NegativeWork: return "NegativeWork";
        case ViolationCode::NegativeMemory: return "NegativeMemory";
        case ViolationCode::NegativeAccelerators: return "NegativeAccelerators";
        case ViolationCode::NegativeVolume: return "NegativeVolume";
        case ViolationCode::DuplicateTask: return "DuplicateTask";
        case ViolationCode::InvalidId: return "InvalidId";
        case ViolationCode::UnknownLoopTask: return "UnknownLoopTask";
        case ViolationCode::TaskInBothLoops: return "TaskInBothLoops";
        case ViolationCode::NonPositiveIterations: return "NonPositiveIterations";
        case ViolationCode::IterationCycle: return "IterationCycle";
        case ViolationCode::LoopDetour: return "LoopDetour";
    }
    return "Unknown";
}

std::string Violation::describe() const { return toString(code) + "(" + subject + ")"; }

std::vector<Violation> validate(const WorkflowGraph& graph) {
    std::vector<Violation> out;
    std::unordered_map<TaskId, std::uint32_t> index;
    for (std::uint32_t i = 0; i < graph.tasks.size(); ++i) {
        const Task& t = graph.tasks[i];
        if (!validId(t.id)) {
            out.push_back({ViolationCode::InvalidId, t.id});
            continue;
        }
        if (index.contains(t.id)) {
            out.push_back({ViolationCode::DuplicateTask, t.id});
            continue;
        }
        index.emplace(t.id, i);
        if (t.work < 0) out.push_back({ViolationCode::NegativeWork, t.id});
        if (t.memoryNeed < 0) out.push_back({ViolationCode::NegativeMemory, t.id});
        if (t.acceleratorNeed < 0) out.push_back({ViolationCode::NegativeAccelerators, t.id});
        if (t.kind == TaskKind::instrument && !t.pinnedSite) {
            out.push_back({ViolationCode::UnpinnedInstrument, t.id});
        }
    }
    for (const auto& e : graph.edges) {
        const std::string label = e.producer + "->" + e.consumer;
        if (!index.contains(e.producer)) out.push_back({ViolationCode::DanglingEdge, e.producer});
        if (!index.contains(e.consumer)) out.push_back({ViolationCode::DanglingEdge, e.consumer});
        if (e.producer == e.consumer) out.push_back({ViolationCode::SelfEdge, label});
        if (e.volume < 0) out.push_back({ViolationCode::NegativeVolume, label});
    }
    std::unordered_set<TaskId> inner(graph.innerLoop.begin(), graph.innerLoop.end());
    for (const auto* loop : {&graph.innerLoop, &graph.outerLoop}) {
        for (const auto& id : *loop) {
            if (!index.contains(id)) out.push_back({ViolationCode::UnknownLoopTask, id});
        }
    }
    for (const auto& id : graph.outerLoop) {
        if (inner.contains(id)) out.push_back({ViolationCode::TaskInBothLoops, id});
    }
    if (graph.innerIterations < 1) out.push_back({ViolationCode::NonPositiveIterations, "innerIterations"});
    if (graph.outerIterations < 1) out.push_back({ViolationCode::NonPositiveIterations, "outerIterations"});

    if (out.empty()) {
        auto edges = iterationTaskEdges(graph, index);
        auto order = taskTopoOrder(graph.tasks.size(), edges);
        if (order.empty() && !graph.tasks.empty()) {
            out.push_back({ViolationCode::IterationCycle, ""});
        } else {
            // A flow path between two members of one loop must stay inside the
            // loop; a detour through a slower-frequency task would tangle
            // iterations when unrolled.
            std::vector<std::vector<std::uint32_t>> adj(graph.tasks.size());
            for (auto [p, c] : edges) adj[p].push_back(c);
            for (const auto* loop : {&graph.innerLoop, &graph.outerLoop}) {
                if (loop->size() < 2) continue;
                std::unordered_set<std::uint32_t> members;
                for (const auto& id : *loop) members.insert(index.at(id));
                // DFS from each member through non-members only.
                for (std::uint32_t start : members) {
                    std::vector<std::uint32_t> stack;
                    std::unordered_set<std::uint32_t> seen;
                    for (std::uint32_t next : adj[start]) {
                        if (!members.contains(next)) stack.push_back(next);
                    }
                    bool flagged = false;
                    while (!stack.empty() && !flagged) {
                        std::uint32_t v = stack.back();
                        stack.pop_back();
                        if (!seen.insert(v).second) continue;
                        for (std::uint32_t next : adj[v]) {
                            if (members.contains(next)) {
                                out.push_back({ViolationCode::LoopDetour,
                                               graph.tasks[start].id + "->" +
                                                   graph.tasks[next].id});
                                flagged = true;
                                break;
                            }
                            stack.push_back(next);
                        }
                    }
                }
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
        if (a.code != b.code) return static_cast<int>(a.code) < static_cast<int>(b.code);
        return a.subject < b.subject;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<std::uint32_t> InstanceGraph::findNode(const std::string& instanceId) const {
    for (std::uint32_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id == instanceId) return i;
    }
    return std::nullopt;
}

void InstanceGraph::rebuildAdjacency() {
    inEdges.assign(nodes.size(), {});
    outEdges.assign(nodes.size(), {});
    for (std::uint32_t i = 0; i < edges.size(); ++i) {
        outEdges[edges[i].producer].push_back(i);
        inEdges[edges[i].consumer].push_back(i);
    }
}

InstanceGraph unroll(const WorkflowGraph& graph) {
    auto violations = validate(graph);
    if (!violations.empty()) {
        bool onlyCycle = std::all_of(violations.begin(), violations.end(), [](const Violation& v) {
            return v.code == ViolationCode::IterationCycle;
        });
        if (onlyCycle) throw CycleWithinIterationError("per-iteration task graph is cyclic");
        throw InvalidGraphError("invalid workflow graph: " + violations.front().describe());
    }

    std::unordered_map<TaskId, std::uint32_t> index;
    for (std::uint32_t i = 0; i < graph.tasks.size(); ++i) index.emplace(graph.tasks[i].id, i);

    std::vector<int> activations(graph.tasks.size(), 1);
    for (const auto& id : graph.innerLoop) activations[index.at(id)] = graph.innerIterations;
    for (const auto& id : graph.outerLoop) activations[index.at(id)] = graph.outerIterations;

    InstanceGraph out;
    out.tasks = graph.tasks;
    std::vector<std::uint32_t> firstNode(graph.tasks.size(), 0);
    for (std::uint32_t t = 0; t < graph.tasks.size(); ++t) {
        firstNode[t] = static_cast<std::uint32_t>(out.nodes.size());
        for (int i = 0; i < activations[t]; ++i) {
            out.nodes.push_back(
                {graph.tasks[t].id + "#" + padIteration(i, activations[t]), t, i});
        }
    }

    // Canonical edge order so instance edge ids are reproducible.
    std::vector<FlowEdge> sortedEdges = graph.edges;
    std::sort(sortedEdges.begin(), sortedEdges.end(), [](const FlowEdge& a, const FlowEdge& b) {
        return std::tie(a.producer, a.consumer, a.volume, a.compressible) <
               std::tie(b.producer, b.consumer, b.volume, b.compressible);
    });

    std::unordered_map<std::string, int> pairCount;
    std::unordered_map<std::string, int> dataDup;
    auto addInstanceEdge = [&](std::uint32_t from, std::uint32_t to, double volume,
                               bool compressible, const std::string& dataTag) {
        std::string id = out.nodes[from].id + "->" + out.nodes[to].id;
        int n = ++pairCount[id];
        if (n > 1) id += "#" + std::to_string(n);
        out.edges.push_back({id, from, to, volume, compressible, dataTag});
    };

    for (const auto& e : sortedEdges) {
        std::uint32_t p = index.at(e.producer);
        std::uint32_t c = index.at(e.consumer);
        long np = activations[p];
        long nc = activations[c];
        for (long i = 0; i < np; ++i) {
            std::string dataTag = out.nodes[firstNode[p] + i].id + ":" + e.consumer;
            int dup = ++dataDup[dataTag];
            if (dup > 1) dataTag += "#" + std::to_string(dup);
            // Consumer activations whose iteration span overlaps producer
            // activation i: i*nc < (j+1)*np and j*np < (i+1)*nc.
            for (long j = i * nc / np; j < nc && j * np < (i + 1) * nc; ++j) {
                addInstanceEdge(firstNode[p] + static_cast<std::uint32_t>(i),
                                firstNode[c] + static_cast<std::uint32_t>(j), e.volume,
                                e.compressible, dataTag);
            }
        }
    }

    // Cross-iteration control edges: loop tail of iteration i precedes the
    // head of iteration i+1.
    for (const auto* loop : {&graph.innerLoop, &graph.outerLoop}) {
        if (loop->empty()) continue;
        std::uint32_t head = index.at(loop->front());
        std::uint32_t tail = index.at(loop->back());
        for (int i = 0; i + 1 < activations[head]; ++i) {
            std::uint32_t from = firstNode[tail] + i;
            std::uint32_t to = firstNode[head] + i + 1;
            addInstanceEdge(from, to, 0.0, false, out.nodes[from].id + ":" + loop->front());
        }
    }

    out.rebuildAdjacency();
    return out;
}

std::vector<std::uint32_t> topoOrder(const InstanceGraph& instances) {
    const std::size_t n = instances.nodes.size();
    // Rank instances by id once so the ready queue compares integers.
    std::vector<std::uint32_t> byId(n);
    for (std::uint32_t i = 0; i < n; ++i) byId[i] = i;
    std::sort(byId.begin(), byId.end(), [&](std::uint32_t a, std::uint32_t b) {
        return instances.nodes[a].id < instances.nodes[b].id;
    });
    std::vector<std::uint32_t> rank(n);
    for (std::uint32_t r = 0; r < n; ++r) rank[byId[r]] = r;

    std::vector<int> indegree(n, 0);
    for (const auto& e : instances.edges) ++indegree[e.consumer];
    std::priority_queue<std::pair<std::uint32_t, std::uint32_t>,
                        std::vector<std::pair<std::uint32_t, std::uint32_t>>, std::greater<>>
        ready;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.push({rank[i], i});
    }
    std::vector<std::uint32_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        auto [r, v] = ready.top();
        ready.pop();
        order.push_back(v);
        for (std::uint32_t ei : instances.outEdges[v]) {
            std::uint32_t w = instances.edges[ei].consumer;
            if (--indegree[w] == 0) ready.push({rank[w], w});
        }
    }
    if (order.size() != n) throw CycleDetectedError("instance graph contains a cycle");
    return order;
}

WorkflowGraph stemWorkflow(const StemParams& params) {
    WorkflowGraph g;
    g.tasks = {
        {"Instrument", TaskKind::instrument, 50.0, 8e9, 0, SiteId("facility"), false},
        {"AI-model", TaskKind::inference, 200.0, 32e9, 1, std::nullopt, false},
        {"Crystal-model", TaskKind::generator, 36000.0, 64e9, 0, std::nullopt, true},
        {"AI-Training", TaskKind::trainer, 7200.0, 192e9, 2, std::nullopt, false},
        {"Compression", TaskKind::compressor, 900.0, 16e9, 0, std::nullopt, false},
    };
    g.edges = {
        {"Instrument", "AI-model", params.imageVolume, false},
        {"Crystal-model", "Compression", params.crystalOutputVolume, true},
        {"Compression", "AI-Training", params.trainingInputVolume, false},
        {"AI-Training", "AI-model", params.modelUpdateVolume, false},
    };
    g.innerLoop = {"Instrument", "AI-model"};
    g.outerLoop = {"Crystal-model", "Compression", "AI-Training"};
    g.innerIterations = params.innerIterations;
    g.outerIterations = params.outerIterations;
    return g;
}

std::string exportDot(const WorkflowGraph& graph) {
    std::ostringstream os;
    os << "digraph workflow {\n";
    std::vector<Task> tasks = graph.tasks;
    std::sort(tasks.begin(), tasks.end(),
              [](const Task& a, const Task& b) { return a.id < b.id; });
    for (const auto& t : tasks) {
        os << "  \"" << dotEscape(t.id) << "\" [shape=box, label=\"" << dotEscape(t.id) << "\\n"
           << toString(t.kind) << ", " << formatDouble(t.work) << " CU\"];\n";
    }
    std::vector<FlowEdge> edges = graph.edges;
    std::sort(edges.begin(), edges.end(), [](const FlowEdge& a, const FlowEdge& b) {
        return std::tie(a.producer, a.consumer, a.volume) <
               std::tie(b.producer, b.consumer, b.volume);
    });
    for (const auto& e : edges) {
        os << "  \"" << dotEscape(e.producer) << "\" -> \"" << dotEscape(e.consumer)
           << "\" [label=\"" << formatDouble(e.volume) << " B"
           << (e.compressible ? ", compressible" : "") << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

std::string exportDot(const InstanceGraph& instances) {
    std::ostringstream os;
    os << "digraph instances {\n";
    std::vector<std::uint32_t> order(instances.nodes.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return instances.nodes[a].id < instances.nodes[b].id;
    });
    for (std::uint32_t i : order) {
        os << "  \"" << dotEscape(instances.nodes[i].id) << "\" [shape=box];\n";
    }
    std::vector<const InstanceEdge*> edges;
    edges.reserve(instances.edges.size());
    for (const auto& e : instances.edges) edges.push_back(&e);
    std::sort(edges.begin(), edges.end(),
              [](const InstanceEdge* a, const InstanceEdge* b) { return a->id < b->id; });
    for (const auto* e : edges) {
        os << "  \"" << dotEscape(instances.nodes[e->producer].id) << "\" -> \""
           << dotEscape(instances.nodes[e->consumer].id) << "\" [label=\""
           << formatDouble(e->volume) << " B\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace flowcast
