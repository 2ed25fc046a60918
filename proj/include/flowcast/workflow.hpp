#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowcast/types.hpp"

namespace flowcast {

enum class TaskKind { instrument, inference, generator, trainer, compressor, generic };

std::string toString(TaskKind kind);
TaskKind taskKindFromString(const std::string& text);

struct Task {
    TaskId id;
    TaskKind kind = TaskKind::generic;
    double work = 0.0;           // normalized compute-units (CU)
    double memoryNeed = 0.0;     // bytes
    int acceleratorNeed = 0;
    std::optional<SiteId> pinnedSite;
    bool spotTolerant = false;

    bool operator==(const Task&) const = default;
};

struct FlowEdge {
    TaskId producer;
    TaskId consumer;
    double volume = 0.0;  // bytes per activation
    bool compressible = false;

    bool operator==(const FlowEdge&) const = default;
};

struct WorkflowGraph {
    std::vector<Task> tasks;
    std::vector<FlowEdge> edges;
    std::vector<TaskId> innerLoop;  // ordered; tail of iteration i feeds head of i+1
    std::vector<TaskId> outerLoop;
    int innerIterations = 1;
    int outerIterations = 1;

    bool operator==(const WorkflowGraph&) const = default;

    const Task* findTask(const TaskId& id) const;
};

enum class ViolationCode {
    DanglingEdge,
    UnpinnedInstrument,
    SelfEdge,
    NegativeWork,
    NegativeMemory,
    NegativeAccelerators,
    NegativeVolume,
    DuplicateTask,
    InvalidId,
    UnknownLoopTask,
    TaskInBothLoops,
    NonPositiveIterations,
    IterationCycle,
    LoopDetour,
};

std::string toString(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string subject;  // offending task/edge/loop id

    bool operator==(const Violation&) const = default;
    std::string describe() const;
};

// Returns every invariant violation; an empty list means the graph is valid.
// Pure and idempotent.
std::vector<Violation> validate(const WorkflowGraph& graph);

struct InstanceNode {
    std::string id;      // "<task>#<iteration>", iteration zero-padded per task
    std::uint32_t task;  // index into InstanceGraph::tasks
    int iteration = 0;

    bool operator==(const InstanceNode&) const = default;
};

struct InstanceEdge {
    std::string id;  // "<producer instance>-><consumer instance>"
    std::uint32_t producer;
    std::uint32_t consumer;
    double volume = 0.0;
    bool compressible = false;
    DataId dataId;  // payload identity; fan-out edges share one data node

    bool operator==(const InstanceEdge&) const = default;
};

// Finite DAG of task activations produced by unroll().
struct InstanceGraph {
    std::vector<Task> tasks;
    std::vector<InstanceNode> nodes;
    std::vector<InstanceEdge> edges;
    std::vector<std::vector<std::uint32_t>> inEdges;   // per node, indices into edges
    std::vector<std::vector<std::uint32_t>> outEdges;

    const Task& taskOf(std::uint32_t node) const { return tasks[nodes[node].task]; }
    std::optional<std::uint32_t> findNode(const std::string& instanceId) const;

    // Recomputes adjacency from nodes/edges; call after direct construction.
    void rebuildAdjacency();
};

// Replicates every task per its activation count (inner-loop members once per
// inner iteration, outer-loop members once per outer iteration, others once)
// and wires producer activations to the consumer activations whose iteration
// spans overlap. Loop tails additionally feed the next iteration's head.
// Throws InvalidGraphError on an invalid graph and CycleWithinIterationError
// when the per-iteration task graph (flow edges plus intra-loop order) is
// cyclic.
InstanceGraph unroll(const WorkflowGraph& graph);

// Deterministic topological order: ties broken by lexicographic instance id.
// Throws CycleDetectedError.
std::vector<std::uint32_t> topoOrder(const InstanceGraph& instances);

struct StemParams {
    double imageVolume = 4e9;           // Instrument -> AI-model, per image batch
    double modelUpdateVolume = 5e8;     // AI-Training -> AI-model
    double crystalOutputVolume = 2e10;  // Crystal-model -> Compression (compressible)
    double trainingInputVolume = 2e9;   // Compression -> AI-Training
    int innerIterations = 3;
    int outerIterations = 1;

    bool operator==(const StemParams&) const = default;
};

// The canonical 5-task microscopy workflow: an experiment-interpretation
// inner loop (Instrument -> AI-model) and a slower retraining outer loop
// (Crystal-model -> Compression -> AI-Training -> AI-model).
WorkflowGraph stemWorkflow(const StemParams& params = {});

// DOT renderings for visualization; byte-identical for identical inputs.
std::string exportDot(const WorkflowGraph& graph);
std::string exportDot(const InstanceGraph& instances);

}  // namespace flowcast
