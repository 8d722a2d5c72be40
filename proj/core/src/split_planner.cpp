#include "napcomm/split_planner.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace napcomm {

namespace {

// Working form of one inter-node original message.
struct Inbound {
    int orig_src;
    int orig_dst;
    int src_node;
    std::int64_t bytes;
    std::size_t order;  // position in the pattern, for deterministic ties
};

struct Chunk {
    int src_node;
    int dst_node;
    int chunk_id;
    std::int64_t bytes;
    std::vector<Segment> segments;
};

bool larger_first_by_origin(const Chunk& a, const Chunk& b) {
    if (a.bytes != b.bytes) return a.bytes > b.bytes;
    return std::tie(a.src_node, a.chunk_id) < std::tie(b.src_node, b.chunk_id);
}

bool larger_first_by_dest(const Chunk& a, const Chunk& b) {
    if (a.bytes != b.bytes) return a.bytes > b.bytes;
    return std::tie(a.dst_node, a.chunk_id) < std::tie(b.dst_node, b.chunk_id);
}

}  // namespace

std::int64_t SplitPlan::max_global_msgs_per_rank() const {
    std::map<int, std::int64_t> per_rank;
    std::int64_t best = 0;
    for (const auto& g : global_msgs) best = std::max(best, ++per_rank[g.src]);
    return best;
}

std::int64_t SplitPlan::max_global_bytes_per_rank() const {
    std::map<int, std::int64_t> per_rank;
    std::int64_t best = 0;
    for (const auto& g : global_msgs) best = std::max(best, per_rank[g.src] += g.bytes);
    return best;
}

std::int64_t SplitPlan::max_global_bytes_per_node() const {
    std::map<int, std::int64_t> per_node;
    std::int64_t best = 0;
    for (const auto& g : global_msgs)
        best = std::max(best, per_node[g.src_node] += g.bytes);
    return best;
}

std::int64_t SplitPlan::max_node_pair_bytes() const {
    std::map<std::pair<int, int>, std::int64_t> per_pair;
    std::int64_t best = 0;
    for (const auto& g : global_msgs)
        best = std::max(best, per_pair[{g.src_node, g.dst_node}] += g.bytes);
    return best;
}

std::int64_t SplitPlan::max_chunk_bytes() const {
    std::int64_t best = 0;
    for (const auto& g : global_msgs) best = std::max(best, g.bytes);
    return best;
}

std::int64_t SplitPlan::max_redist_bytes() const {
    std::int64_t best = 0;
    for (const auto& m : send_redist_msgs) best = std::max(best, m.bytes);
    for (const auto& m : recv_redist_msgs) best = std::max(best, m.bytes);
    return best;
}

SplitPlan plan_split(const CommPattern& pattern, const Topology& topology,
                     const SplitConfig& config) {
    topology.validate();
    pattern.validate(/*allow_zero_bytes=*/true);
    if (config.message_cap < 1)
        throw std::invalid_argument("plan_split: message_cap must be >= 1");
    if (pattern.num_procs() == 0)
        throw std::invalid_argument("plan_split: pattern places no processes");

    const int ppn = topology.procs_per_node;

    SplitPlan plan;
    plan.topology = topology;
    plan.message_cap = config.message_cap;
    plan.effective_cap = config.message_cap;
    plan.source_summary = summarize(pattern);

    // Embed pattern processes into the ppn plan ranks of their node: the i-th
    // lowest pattern process on a node becomes local rank i.
    std::map<int, std::vector<int>> procs_by_node;
    for (int p = 0; p < pattern.num_procs(); ++p)
        procs_by_node[pattern.node_of(p)].push_back(p);
    plan.plan_proc_of.assign(static_cast<std::size_t>(pattern.num_procs()), -1);
    for (const auto& [node, procs] : procs_by_node) {
        if (static_cast<int>(procs.size()) > ppn)
            throw std::invalid_argument(
                "plan_split: node " + std::to_string(node) + " places " +
                std::to_string(procs.size()) + " processes but topology allows " +
                std::to_string(ppn));
        for (std::size_t i = 0; i < procs.size(); ++i)
            plan.plan_proc_of[static_cast<std::size_t>(procs[i])] =
                node * ppn + static_cast<int>(i);
    }
    auto plan_proc = [&](int pattern_proc) {
        return plan.plan_proc_of[static_cast<std::size_t>(pattern_proc)];
    };

    // Phase 1: on-node messages keep their original routing.
    std::map<int, std::vector<Inbound>> inbound_by_dst_node;
    for (std::size_t i = 0; i < pattern.messages.size(); ++i) {
        const Message& m = pattern.messages[i];
        const int sn = pattern.node_of(m.src);
        const int dn = pattern.node_of(m.dst);
        if (sn == dn)
            plan.local_msgs.push_back({plan_proc(m.src), plan_proc(m.dst), m.bytes});
        else
            inbound_by_dst_node[dn].push_back({m.src, m.dst, sn, m.bytes, i});
    }

    // Cap logic and chunk construction, per receiving node.
    std::vector<Chunk> chunks;
    for (auto& [dst_node, inbound] : inbound_by_dst_node) {
        std::sort(inbound.begin(), inbound.end(), [](const Inbound& a, const Inbound& b) {
            return std::tie(a.src_node, a.orig_src, a.orig_dst, a.order) <
                   std::tie(b.src_node, b.orig_src, b.orig_dst, b.order);
        });

        std::map<int, std::int64_t> volume_by_origin;
        for (const auto& msg : inbound) volume_by_origin[msg.src_node] += msg.bytes;
        std::int64_t total = 0, max_origin = 0;
        for (const auto& [origin, v] : volume_by_origin) {
            total += v;
            max_origin = std::max(max_origin, v);
        }
        const auto num_origins = static_cast<std::int64_t>(volume_by_origin.size());

        // Alg. 1 cap logic: whole-origin conglomerates when everything is
        // small; otherwise chunk to the cap, raised to ceil(total/ppn) when
        // the volume would spill past ppn chunks with ranks still idle.
        std::int64_t cap = config.message_cap;
        const bool conglomerate = max_origin < cap;
        if (!conglomerate && total > static_cast<std::int64_t>(ppn) * cap &&
            num_origins < ppn)
            cap = (total + ppn - 1) / ppn;
        plan.effective_cap_by_node[dst_node] = cap;
        plan.effective_cap = std::max(plan.effective_cap, cap);

        // Walk each origin's messages in order, cutting at cap boundaries.
        int origin = std::numeric_limits<int>::min();
        Chunk* cur = nullptr;
        std::int64_t room = 0;
        auto open_chunk = [&](int chunk_id) {
            chunks.push_back({origin, dst_node, chunk_id, 0, {}});
            cur = &chunks.back();
            room = conglomerate ? std::numeric_limits<std::int64_t>::max() : cap;
        };
        for (const auto& msg : inbound) {
            if (msg.src_node != origin) {
                origin = msg.src_node;
                open_chunk(0);
            }
            if (msg.bytes == 0) {  // zero-byte twins ride along, consuming no room
                cur->segments.push_back({msg.orig_src, msg.orig_dst, 0});
                continue;
            }
            std::int64_t left = msg.bytes;
            while (left > 0) {
                if (room == 0) open_chunk(cur->chunk_id + 1);
                const std::int64_t take = std::min(left, room);
                cur->segments.push_back({msg.orig_src, msg.orig_dst, take});
                cur->bytes += take;
                room -= take;
                left -= take;
            }
        }
    }

    // Receive-side assignment: per destination node, descending size
    // (ties: origin node, then chunk id), round-robin from local rank 0.
    std::map<int, std::vector<std::size_t>> recv_order;  // dst node -> chunk indices
    std::map<int, std::vector<std::size_t>> send_order;  // src node -> chunk indices
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        recv_order[chunks[i].dst_node].push_back(i);
        send_order[chunks[i].src_node].push_back(i);
    }
    std::vector<int> recv_rank_of(chunks.size(), -1);
    for (auto& [dst_node, list] : recv_order) {
        std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
            return larger_first_by_origin(chunks[a], chunks[b]);
        });
        for (std::size_t pos = 0; pos < list.size(); ++pos)
            recv_rank_of[list[pos]] =
                static_cast<int>(pos % static_cast<std::size_t>(ppn));
    }

    // Send-side assignment: per sending node, descending size (ties:
    // destination node, then chunk id), walking down from rank ppn-1.
    std::vector<int> send_rank_of(chunks.size(), -1);
    for (auto& [src_node, list] : send_order) {
        std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
            return larger_first_by_dest(chunks[a], chunks[b]);
        });
        for (std::size_t pos = 0; pos < list.size(); ++pos)
            send_rank_of[list[pos]] =
                ppn - 1 - static_cast<int>(pos % static_cast<std::size_t>(ppn));
    }

    // Emit global messages in (src_node, dst_node, chunk_id) order.
    std::vector<std::size_t> emit(chunks.size());
    for (std::size_t i = 0; i < emit.size(); ++i) emit[i] = i;
    std::sort(emit.begin(), emit.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(chunks[a].src_node, chunks[a].dst_node, chunks[a].chunk_id) <
               std::tie(chunks[b].src_node, chunks[b].dst_node, chunks[b].chunk_id);
    });
    std::vector<std::size_t> global_index_of(chunks.size());
    for (std::size_t i : emit) {
        Chunk& c = chunks[i];
        GlobalMessage g;
        g.src_node = c.src_node;
        g.dst_node = c.dst_node;
        g.chunk_id = c.chunk_id;
        g.bytes = c.bytes;
        g.src = c.src_node * ppn + send_rank_of[i];
        g.dst = c.dst_node * ppn + recv_rank_of[i];

        // Redistribution lists, merged per original owner. Send side feeds
        // the enlisted sender, receive side forwards to the final owners.
        std::map<int, std::int64_t> from_owner;
        std::map<int, std::int64_t> to_owner;
        for (const Segment& s : c.segments) {
            from_owner[plan_proc(s.orig_src)] += s.bytes;
            to_owner[plan_proc(s.orig_dst)] += s.bytes;
        }
        for (const auto& [owner, bytes] : from_owner)
            if (owner != g.src) plan.send_redist_msgs.push_back({owner, g.src, bytes});
        for (const auto& [owner, bytes] : to_owner)
            if (owner != g.dst) plan.recv_redist_msgs.push_back({g.dst, owner, bytes});

        g.segments = std::move(c.segments);
        global_index_of[i] = plan.global_msgs.size();
        plan.global_msgs.push_back(std::move(g));
    }

    // recv_assignment lists follow the assignment (descending) order.
    for (const auto& [dst_node, list] : recv_order)
        for (std::size_t i : list)
            plan.recv_assignment[dst_node * ppn + recv_rank_of[i]].push_back(
                global_index_of[i]);

    return plan;
}

CostBreakdown cost_plan(const SplitPlan& plan, const MachineModel& machine,
                        SplitMode mode) {
    const ParameterTable& table = machine.table;
    const int ppg = mode == SplitMode::MD ? 1 : 4;

    const std::int64_t m = plan.max_global_msgs_per_rank();
    const std::int64_t s_rank = plan.max_global_bytes_per_rank();
    const std::int64_t s_node = plan.max_global_bytes_per_node();
    const std::int64_t wire = plan.max_chunk_bytes();

    CostBreakdown parts;
    parts.off_node = t_off(table, select_protocol(table, Flavor::InterCpu, wire), m,
                           static_cast<double>(s_rank), static_cast<double>(s_node));

    // Each redistribution side is charged only if the plan actually moves
    // bytes there, sized by its largest message.
    auto redist_sweep = [&](const std::vector<PlanMessage>& msgs) {
        std::int64_t sigma = 0;
        for (const auto& msg : msgs) sigma = std::max(sigma, msg.bytes);
        if (msgs.empty()) return 0.0;
        return t_on_split(table, select_protocol(table, Flavor::InterCpu, sigma),
                          static_cast<double>(sigma), plan.topology.procs_per_socket(),
                          ppg);
    };
    parts.on_node = redist_sweep(plan.send_redist_msgs) + redist_sweep(plan.recv_redist_msgs);

    parts.copy = t_copy(table, static_cast<double>(s_node),
                        static_cast<double>(plan.max_node_pair_bytes()), ppg);
    return parts;
}

std::string plan_to_text(const SplitPlan& plan) {
    std::ostringstream out;
    auto dump = [&](const char* phase, const std::vector<PlanMessage>& msgs) {
        for (const auto& m : msgs)
            out << phase << ' ' << m.src << ' ' << m.dst << ' ' << m.bytes << '\n';
    };
    dump("local", plan.local_msgs);
    dump("send_redist", plan.send_redist_msgs);
    for (const auto& g : plan.global_msgs)
        out << "global " << g.src << ' ' << g.dst << ' ' << g.bytes << '\n';
    dump("recv_redist", plan.recv_redist_msgs);
    return out.str();
}

}  // namespace napcomm
