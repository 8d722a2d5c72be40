#include "napcomm/pattern.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace napcomm {

int CommPattern::num_nodes() const {
    int n = 0;
    for (const auto& p : placement) n = std::max(n, p.node + 1);
    return n;
}

void CommPattern::validate(bool allow_zero_bytes) const {
    for (std::size_t i = 0; i < placement.size(); ++i) {
        const auto& p = placement[i];
        if (p.node < 0 || p.socket < 0 || p.gpu < 0)
            throw std::invalid_argument("pattern: negative placement id for proc " +
                                        std::to_string(i));
    }
    const std::int64_t min_bytes = allow_zero_bytes ? 0 : 1;
    for (const auto& m : messages) {
        if (m.src < 0 || m.src >= num_procs() || m.dst < 0 || m.dst >= num_procs())
            throw std::invalid_argument("pattern: message references unplaced process " +
                                        std::to_string(m.src < 0 || m.src >= num_procs()
                                                           ? m.src
                                                           : m.dst));
        if (m.src == m.dst)
            throw std::invalid_argument("pattern: self-message at process " +
                                        std::to_string(m.src));
        if (m.bytes < min_bytes)
            throw std::invalid_argument("pattern: message bytes below " +
                                        std::to_string(min_bytes));
    }
}

PatternSummary summarize(const CommPattern& pattern) {
    pattern.validate(/*allow_zero_bytes=*/true);
    PatternSummary out;

    std::map<int, double> bytes_by_proc;
    std::map<int, double> bytes_by_node;
    std::map<std::pair<int, int>, double> bytes_by_pair;   // (src node, dst node)
    std::map<std::pair<int, int>, std::int64_t> msgs_by_pair;
    std::map<int, std::int64_t> msgs_by_proc;
    std::map<int, std::set<int>> dest_nodes_by_proc;

    for (const auto& m : pattern.messages) {
        const int sn = pattern.node_of(m.src);
        const int dn = pattern.node_of(m.dst);
        if (sn == dn) continue;  // on-node traffic is invisible to the aggregates
        const double b = static_cast<double>(m.bytes);
        bytes_by_proc[m.src] += b;
        bytes_by_node[sn] += b;
        bytes_by_pair[{sn, dn}] += b;
        msgs_by_pair[{sn, dn}] += 1;
        msgs_by_proc[m.src] += 1;
        dest_nodes_by_proc[m.src].insert(dn);
    }

    for (const auto& [proc, b] : bytes_by_proc) out.s_proc = std::max(out.s_proc, b);
    for (const auto& [node, b] : bytes_by_node) out.s_node = std::max(out.s_node, b);
    for (const auto& [pair, b] : bytes_by_pair)
        out.s_node_to_node = std::max(out.s_node_to_node, b);
    for (const auto& [pair, n] : msgs_by_pair)
        out.m_node_to_node = std::max(out.m_node_to_node, n);
    for (const auto& [proc, n] : msgs_by_proc) out.m_proc = std::max(out.m_proc, n);
    for (const auto& [proc, nodes] : dest_nodes_by_proc)
        out.m_proc_to_node =
            std::max(out.m_proc_to_node, static_cast<std::int64_t>(nodes.size()));

    for (const auto& [pair, b] : bytes_by_pair) {
        NodeRecvStats& stats = out.per_node[pair.second];
        stats.total_recv_bytes += b;
        stats.max_recv_from_one_node = std::max(stats.max_recv_from_one_node, b);
        stats.num_sending_nodes += 1;
    }
    return out;
}

PatternSummary scale_duplicates(const PatternSummary& summary, double fraction) {
    if (!(fraction >= 0.0) || fraction >= 1.0)
        throw std::invalid_argument("scale_duplicates: fraction must be in [0, 1)");
    const double keep = 1.0 - fraction;
    PatternSummary out = summary;
    out.s_proc *= keep;
    out.s_node *= keep;
    out.s_node_to_node *= keep;
    for (auto& [node, stats] : out.per_node) {
        stats.total_recv_bytes *= keep;
        stats.max_recv_from_one_node *= keep;
    }
    return out;
}

CommPattern dedup_by_node(const CommPattern& pattern) {
    pattern.validate();
    for (const auto& m : pattern.messages)
        if (m.values.empty())
            throw std::invalid_argument(
                "dedup_by_node: pattern carries no value sets (synthetic pattern?); "
                "use scale_duplicates on its summary instead");

    CommPattern out;
    out.placement = pattern.placement;
    out.bytes_per_value = pattern.bytes_per_value;
    out.messages.reserve(pattern.messages.size());

    // A value travels from src to a destination node once, in the message
    // aimed at the lowest-numbered process there. Messages are scanned in a
    // (src, dst node, dst proc) order so "lowest-numbered wins" is exact, then
    // emitted in original order to keep the pattern recognizable.
    std::vector<std::size_t> order(pattern.messages.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Message& ma = pattern.messages[a];
        const Message& mb = pattern.messages[b];
        const int na = pattern.node_of(ma.dst), nb = pattern.node_of(mb.dst);
        return std::tie(ma.src, na, ma.dst, a) < std::tie(mb.src, nb, mb.dst, b);
    });

    std::vector<Message> rewritten(pattern.messages.size());
    std::map<std::pair<int, int>, std::set<std::int64_t>> seen;  // (src, dst node)
    for (std::size_t idx : order) {
        const Message& m = pattern.messages[idx];
        auto& claimed = seen[{m.src, pattern.node_of(m.dst)}];
        Message nm;
        nm.src = m.src;
        nm.dst = m.dst;
        for (std::int64_t v : m.values)
            if (claimed.insert(v).second) nm.values.push_back(v);
        nm.bytes = static_cast<std::int64_t>(nm.values.size()) * pattern.bytes_per_value;
        rewritten[idx] = std::move(nm);
    }
    out.messages = std::move(rewritten);
    out.validate(/*allow_zero_bytes=*/true);
    return out;
}

CommPattern synthetic_scenario(int dest_nodes, std::int64_t num_messages,
                               std::int64_t msg_bytes, ScenarioMode mode,
                               const Topology& topology) {
    topology.validate();
    if (dest_nodes < 1)
        throw std::invalid_argument("synthetic_scenario: dest_nodes must be >= 1");
    if (num_messages < 1)
        throw std::invalid_argument("synthetic_scenario: num_messages must be >= 1");
    if (msg_bytes < 1)
        throw std::invalid_argument("synthetic_scenario: msg_bytes must be >= 1");
    const int gpn = topology.gpus_per_node();
    if (mode != ScenarioMode::TwoStepOne && num_messages % gpn != 0)
        throw std::invalid_argument(
            "synthetic_scenario: num_messages must divide evenly over the " +
            std::to_string(gpn) + " source GPUs in this mode");

    CommPattern p;
    // one process per GPU on the source node and each destination node
    const int nodes = 1 + dest_nodes;
    p.placement.resize(static_cast<std::size_t>(nodes) * gpn);
    for (int node = 0; node < nodes; ++node)
        for (int g = 0; g < gpn; ++g) {
            ProcPlacement& pl = p.placement[static_cast<std::size_t>(node) * gpn + g];
            pl.node = node;
            pl.gpu = node * gpn + g;
            pl.socket = node * topology.sockets_per_node + g / topology.gpus_per_socket;
        }

    auto dest_proc = [&](int dest_node_index, int local_gpu) {
        return (1 + dest_node_index) * gpn + local_gpu;
    };

    p.messages.reserve(static_cast<std::size_t>(num_messages));
    if (mode == ScenarioMode::TwoStepOne) {
        // Destination nodes are served in contiguous blocks, one active source
        // GPU per block; each destination node receives an equal share.
        const int nodes_per_gpu = (dest_nodes + gpn - 1) / gpn;
        for (std::int64_t k = 0; k < num_messages; ++k) {
            const int dn = static_cast<int>(k % dest_nodes);
            const int src_gpu = dn / nodes_per_gpu;
            Message m;
            m.src = src_gpu;
            m.dst = dest_proc(dn, static_cast<int>((k / dest_nodes) % gpn));
            m.bytes = msg_bytes;
            p.messages.push_back(m);
        }
    } else {
        // Even and TwoStepAll share one layout: message k leaves source GPU
        // k % gpn and round-robins over all destination GPUs, so consecutive
        // messages of one GPU walk the destination nodes in order.
        const std::int64_t dest_gpus = static_cast<std::int64_t>(dest_nodes) * gpn;
        for (std::int64_t k = 0; k < num_messages; ++k) {
            const std::int64_t d = k % dest_gpus;
            Message m;
            m.src = static_cast<int>(k % gpn);
            m.dst = dest_proc(static_cast<int>(d / gpn), static_cast<int>(d % gpn));
            m.bytes = msg_bytes;
            p.messages.push_back(m);
        }
    }
    p.validate();
    return p;
}

}  // namespace napcomm
