#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "napcomm/models.hpp"
#include "napcomm/pattern.hpp"

namespace napcomm {

struct SplitConfig {
    std::int64_t message_cap = 8192;  // max size of one inter-node message; >= 1
};

// A fragment of an original pattern message carried inside one plan message.
struct Segment {
    int orig_src = -1;  // pattern proc ids
    int orig_dst = -1;
    std::int64_t bytes = 0;
};

// On-node plan message. Endpoints are plan proc ids: node * ppn + local rank,
// ranks 0..ppn-1, so the plan can enlist host processes that carry no pattern
// traffic of their own.
struct PlanMessage {
    int src = -1;
    int dst = -1;
    std::int64_t bytes = 0;
};

// One inter-node chunk: at most the effective cap of its destination node,
// except whole conglomerates that were already under the configured cap.
struct GlobalMessage {
    int src = -1;  // plan proc ids
    int dst = -1;
    int src_node = -1;
    int dst_node = -1;
    int chunk_id = 0;  // position among the chunks of this (src_node, dst_node)
    std::int64_t bytes = 0;
    std::vector<Segment> segments;
};

// Four-phase split execution plan: originals that stay on-node, send-side
// redistribution onto the sending ranks, the capped inter-node chunks, and
// receive-side redistribution to the final owners.
struct SplitPlan {
    Topology topology;
    std::int64_t message_cap = 0;   // as configured
    std::int64_t effective_cap = 0; // largest cap actually applied at any node
    std::map<int, std::int64_t> effective_cap_by_node;  // per receiving node

    std::vector<PlanMessage> local_msgs;
    std::vector<PlanMessage> send_redist_msgs;
    std::vector<GlobalMessage> global_msgs;
    std::vector<PlanMessage> recv_redist_msgs;

    // receiving plan proc -> indices into global_msgs, in assignment order
    std::map<int, std::vector<std::size_t>> recv_assignment;

    std::vector<int> plan_proc_of;  // pattern proc -> plan proc id
    PatternSummary source_summary;  // summary of the pattern that was planned

    // Shape statistics for costing.
    std::int64_t max_global_msgs_per_rank() const;
    std::int64_t max_global_bytes_per_rank() const;
    std::int64_t max_global_bytes_per_node() const;   // busiest sending node
    std::int64_t max_node_pair_bytes() const;
    std::int64_t max_chunk_bytes() const;
    std::int64_t max_redist_bytes() const;  // over both redistribution phases
};

// Builds the plan: on-node messages pass through untouched; inter-node
// receives are grouped per destination node by origin node, conglomerated
// when every origin's volume is under the cap, otherwise chunked to the cap —
// raised to ceil(total/ppn) when the volume would make more than ppn chunks
// while fewer origin nodes than ranks exist. Chunks are assigned to receiving
// ranks in descending size order (ties: origin node, then chunk id) starting
// at local rank 0, and to sending ranks in the same order from rank ppn-1
// downward. Redistribution lists connect original owners with the enlisted
// ranks. Throws on unplaced processes or a node holding more pattern
// processes than ppn.
SplitPlan plan_split(const CommPattern& pattern, const Topology& topology,
                     const SplitConfig& config);

// Staging discipline for costing a plan: MD copies through one host process
// per GPU (cheap copy, long on-node redistribution chain), DD lets four host
// processes copy from one GPU via duplicate device pointers (pricier copies,
// a quarter of the redistribution hops).
enum class SplitMode { MD, DD };

// Models the four plan phases on a machine: one H2D+D2H staging copy, the
// send-side redistribution, the max-rate inter-node transfer of the busiest
// rank, and the receive-side redistribution. Message sizes and counts come
// from the plan itself (largest chunk, busiest rank, largest redistribution
// message), not from worst-case formulas.
CostBreakdown cost_plan(const SplitPlan& plan, const MachineModel& machine,
                        SplitMode mode);

// Line-oriented dump: "<phase> <src> <dst> <bytes>" per message, phases in
// local / send_redist / global / recv_redist order. Deterministic; used by
// golden-file tests and the CLI.
std::string plan_to_text(const SplitPlan& plan);

}  // namespace napcomm
