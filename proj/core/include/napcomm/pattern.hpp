#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "napcomm/machine.hpp"

namespace napcomm {

// Where a host process lives. Ids are global (gpu 5 = second gpu of node 1 on
// a 4-gpu node), the node id is what the aggregates care about.
struct ProcPlacement {
    int gpu = 0;
    int socket = 0;
    int node = 0;
};

// One point-to-point message. `values` optionally lists the identifiers of the
// values carried (for matrix-derived patterns: global column indices); it is
// what node-level deduplication operates on. Synthetic messages leave it empty.
struct Message {
    int src = 0;
    int dst = 0;
    std::int64_t bytes = 0;
    std::vector<std::int64_t> values;
};

struct CommPattern {
    std::vector<ProcPlacement> placement;  // indexed by proc id
    std::vector<Message> messages;
    int bytes_per_value = 8;

    int num_procs() const { return static_cast<int>(placement.size()); }
    int num_nodes() const;
    int node_of(int proc) const { return placement.at(static_cast<std::size_t>(proc)).node; }

    // Structural checks: endpoints placed, no self-messages, bytes >= 1
    // (>= 0 when zero-byte messages are permitted, as in deduplicated
    // patterns where a later twin lost all its values to an earlier one).
    void validate(bool allow_zero_bytes = false) const;
};

// Inbound inter-node traffic of one node, grouped by origin node. Byte fields
// are doubles because duplicate-fraction scaling produces fractional bytes.
struct NodeRecvStats {
    double total_recv_bytes = 0.0;         // all inter-node bytes received
    double max_recv_from_one_node = 0.0;   // largest per-origin-node volume
    int num_sending_nodes = 0;             // distinct origin nodes
};

// Worst-case aggregates over inter-node messages only (on-node messages do
// not contribute to any field), plus per-node inbound statistics for the
// split planner. m_proc is the busiest process's inter-node message count,
// which the standard (non-aggregated) strategies need.
struct PatternSummary {
    double s_proc = 0.0;          // max bytes sent off-node by one process
    double s_node = 0.0;          // max bytes sent off-node by one node
    double s_node_to_node = 0.0;  // max bytes between one ordered node pair
    std::int64_t m_proc = 0;          // max inter-node messages from one process
    std::int64_t m_proc_to_node = 0;  // max distinct destination nodes of one process
    std::int64_t m_node_to_node = 0;  // max messages between one ordered node pair
    std::map<int, NodeRecvStats> per_node;
};

PatternSummary summarize(const CommPattern& pattern);

// Multiply every byte aggregate by (1 - fraction), modeling removal of that
// fraction of duplicate data; message counts stay put. fraction in [0, 1).
PatternSummary scale_duplicates(const PatternSummary& summary, double fraction);

// Node-level duplicate elimination on value-annotated patterns: per
// (source process, destination node) each value is carried once, kept in the
// message to the lowest-numbered destination process; later twins shrink,
// possibly to zero bytes, but remain as messages so multiplicities and
// m_node_to_node are unchanged. Throws if any message lacks a value set,
// pointing the caller at scale_duplicates.
CommPattern dedup_by_node(const CommPattern& pattern);

// How a synthetic scenario spreads its messages over the source node's GPUs.
//   Even / TwoStepAll: round-robin over source GPUs and destination GPUs, so
//     every source GPU streams to every destination node.
//   TwoStepOne: destination nodes are partitioned into contiguous blocks, each
//     served by a single active source GPU.
enum class ScenarioMode { Even, TwoStepAll, TwoStepOne };

// One source node sending num_messages of msg_bytes each into dest_nodes
// destination nodes (nodes 1..dest_nodes, node 0 is the source), one host
// process per GPU. In Even/TwoStepAll modes num_messages must divide evenly
// over the source GPUs.
CommPattern synthetic_scenario(int dest_nodes, std::int64_t num_messages,
                               std::int64_t msg_bytes, ScenarioMode mode,
                               const Topology& topology);

}  // namespace napcomm
