#include "napcomm/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace napcomm {

const char* strategy_name(StrategyKind kind, TwoStepVariant variant) {
    switch (kind) {
        case StrategyKind::StandardHost:
        case StrategyKind::StandardDA: return "standard";
        case StrategyKind::ThreeStepHost:
        case StrategyKind::ThreeStepDA: return "3step";
        case StrategyKind::TwoStepHost:
        case StrategyKind::TwoStepDA:
            return variant == TwoStepVariant::One ? "2step_one" : "2step_all";
        case StrategyKind::SplitMD: return "split_md";
        case StrategyKind::SplitDD: return "split_dd";
    }
    return "?";
}

const char* strategy_flavor(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::StandardDA:
        case StrategyKind::ThreeStepDA:
        case StrategyKind::TwoStepDA: return "device";
        default: return "host";
    }
}

namespace {

// Shape of the split chunking implied by a summary: a destination node's
// inbound volume (the worst node pair) against the cap, mirroring the
// planner's per-node logic.
struct SplitShape {
    std::int64_t msgs_per_rank = 0;  // inter-node sends of the busiest rank
    double wire = 0.0;               // size of one chunk on the wire
};

SplitShape split_shape(const PatternSummary& sm, std::int64_t cap, int ppn) {
    SplitShape shape;
    const double v = sm.s_node_to_node;
    if (v <= 0.0) return shape;
    double chunks_per_dest = 1.0;
    if (v < static_cast<double>(cap)) {
        shape.wire = v;  // conglomerated: one whole-volume message per pair
    } else {
        double cap_eff = static_cast<double>(cap);
        if (v / static_cast<double>(cap) > ppn && ppn > 1)
            cap_eff = std::ceil(v / ppn);
        chunks_per_dest = std::ceil(v / cap_eff);
        shape.wire = std::min(cap_eff, v);
    }
    shape.msgs_per_rank = static_cast<std::int64_t>(
        std::ceil(static_cast<double>(sm.m_proc_to_node) * chunks_per_dest / ppn));
    return shape;
}

}  // namespace

StrategyEstimate evaluate(StrategyKind kind, const PatternSummary& sm,
                          const MachineModel& machine, const EvalOptions& opts) {
    const ParameterTable& table = machine.table;
    const Topology& topo = machine.topology;
    StrategyEstimate est;
    est.kind = kind;

    if (sm.s_node == 0.0 && sm.m_proc == 0) return est;  // nothing moves off-node

    const double sp = sm.s_proc;
    const double sn = sm.s_node;
    const double s22 = sm.s_node_to_node;
    const int gps = topo.gpus_per_socket;
    const int ppn = topo.procs_per_node;
    const std::int64_t cap =
        opts.message_cap > 0 ? opts.message_cap : table.thresholds.inter_cpu_eager_max;

    auto proto = [&](Flavor flavor, double wire_bytes) {
        return opts.pinned_protocol ? *opts.pinned_protocol
                                    : select_protocol(table, flavor, wire_bytes);
    };
    CostBreakdown& parts = est.breakdown;

    switch (kind) {
        case StrategyKind::StandardHost: {
            const double wire = sp / static_cast<double>(std::max<std::int64_t>(sm.m_proc, 1));
            parts.off_node = t_off(table, proto(Flavor::InterCpu, wire), sm.m_proc, sp, sn);
            if (opts.standard_host_includes_copy) parts.copy = t_copy(table, sp, s22, 1);
            break;
        }
        case StrategyKind::StandardDA: {
            const double wire = sp / static_cast<double>(std::max<std::int64_t>(sm.m_proc, 1));
            parts.off_node = t_off_da(table, proto(Flavor::InterGpu, wire), sm.m_proc, sp);
            break;
        }
        case StrategyKind::ThreeStepHost: {
            // Whole node-pair volumes travel as conglomerated messages; the
            // lead rank gathers and scatters them on-node.
            const Protocol p = proto(Flavor::InterCpu, s22);
            parts.off_node = t_off(table, p, sm.m_node_to_node, s22, sn);
            parts.on_node = 2.0 * t_on(table, Flavor::InterCpu, p, s22, gps);
            parts.copy = t_copy(table, sp, s22, 1);
            break;
        }
        case StrategyKind::ThreeStepDA: {
            const Protocol p = proto(Flavor::InterGpu, s22);
            parts.off_node = t_off_da(table, p, sm.m_node_to_node, s22);
            parts.on_node = 2.0 * t_on(table, Flavor::InterGpu, p, s22, gps);
            break;
        }
        case StrategyKind::TwoStepHost: {
            const double wire =
                sp / static_cast<double>(std::max<std::int64_t>(sm.m_proc_to_node, 1));
            parts.off_node =
                t_off(table, proto(Flavor::InterCpu, wire), sm.m_proc_to_node, sp, sn);
            parts.on_node = t_on(table, Flavor::InterCpu, proto(Flavor::InterCpu, sp), sp, gps);
            parts.copy = t_copy(table, sp, s22, 1);
            break;
        }
        case StrategyKind::TwoStepDA: {
            const double wire =
                sp / static_cast<double>(std::max<std::int64_t>(sm.m_proc_to_node, 1));
            parts.off_node =
                t_off_da(table, proto(Flavor::InterGpu, wire), sm.m_proc_to_node, sp);
            parts.on_node = t_on(table, Flavor::InterGpu, proto(Flavor::InterGpu, sp), sp, gps);
            break;
        }
        case StrategyKind::SplitMD:
        case StrategyKind::SplitDD: {
            const int ppg = kind == StrategyKind::SplitMD ? 1 : 4;
            const SplitShape shape = split_shape(sm, cap, ppn);
            // Every rank carries an equal share of the node volume off-node.
            const double rank_share = std::min(std::ceil(sn / ppn), sn);
            const double sigma =
                opts.split_redist_volume == SplitRedistVolume::NodeVolume
                    ? sn
                    : (shape.wire > 0.0 ? std::min(std::ceil(sn / ppn), shape.wire) : 0.0);
            parts.off_node = t_off(table, proto(Flavor::InterCpu, shape.wire),
                                   shape.msgs_per_rank, rank_share, sn);
            if (sn > 0.0)
                parts.on_node = 2.0 * t_on_split(table, proto(Flavor::InterCpu, sigma),
                                                 sigma, topo.procs_per_socket(), ppg);
            parts.copy = t_copy(table, sn, s22, ppg);
            break;
        }
    }
    est.total = parts.total();
    return est;
}

void rank_estimates(std::vector<StrategyEstimate>& estimates) {
    std::sort(estimates.begin(), estimates.end(),
              [](const StrategyEstimate& a, const StrategyEstimate& b) {
                  if (a.total != b.total) return a.total < b.total;
                  if (a.kind != b.kind) return a.kind < b.kind;
                  return a.variant < b.variant;
              });
}

const StrategyEstimate* best(std::span<const StrategyEstimate> estimates,
                             bool include_excluded) {
    const StrategyEstimate* winner = nullptr;
    for (const auto& e : estimates) {
        if (e.excluded_from_best && !include_excluded) continue;
        if (!winner || e.total < winner->total) winner = &e;
    }
    return winner;
}

std::vector<StrategyEstimate> compare(const PatternSummary& summary,
                                      const MachineModel& machine,
                                      std::span<const StrategyKind> strategies,
                                      const EvalOptions& opts) {
    if (strategies.empty())
        throw std::invalid_argument("compare: empty strategy set");
    std::vector<StrategyEstimate> out;
    out.reserve(strategies.size());
    for (StrategyKind k : strategies) out.push_back(evaluate(k, summary, machine, opts));
    rank_estimates(out);
    return out;
}

std::vector<StrategyEstimate> compare(const PatternSummary& summary,
                                      const MachineModel& machine,
                                      const EvalOptions& opts) {
    static constexpr StrategyKind all[] = {
        StrategyKind::StandardHost,  StrategyKind::StandardDA,
        StrategyKind::ThreeStepHost, StrategyKind::ThreeStepDA,
        StrategyKind::TwoStepHost,   StrategyKind::TwoStepDA,
        StrategyKind::SplitMD,       StrategyKind::SplitDD,
    };
    return compare(summary, machine, all, opts);
}

std::vector<std::int64_t> default_size_grid() {
    std::vector<std::int64_t> sizes;
    for (std::int64_t s = 16; s <= (1 << 20); s *= 2) sizes.push_back(s);
    return sizes;
}

std::vector<SweepRow> sweep(const MachineModel& machine, SweepScenario scenario,
                            std::span<const std::int64_t> sizes,
                            double dedup_fraction, const EvalOptions& opts) {
    if (sizes.empty())
        throw std::invalid_argument("sweep: size grid is empty");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw std::invalid_argument("sweep: sizes must be strictly increasing");

    std::vector<SweepRow> rows;
    rows.reserve(sizes.size() * 9);
    for (std::int64_t size : sizes) {
        const PatternSummary even = scale_duplicates(
            summarize(synthetic_scenario(scenario.dest_nodes, scenario.num_messages,
                                         size, ScenarioMode::Even, machine.topology)),
            dedup_fraction);
        const PatternSummary one = scale_duplicates(
            summarize(synthetic_scenario(scenario.dest_nodes, scenario.num_messages,
                                         size, ScenarioMode::TwoStepOne, machine.topology)),
            dedup_fraction);

        auto push = [&](StrategyKind kind, const PatternSummary& sm, TwoStepVariant v) {
            const StrategyEstimate est = evaluate(kind, sm, machine, opts);
            rows.push_back({size, kind, v, est.breakdown, est.total});
        };
        push(StrategyKind::StandardHost, even, TwoStepVariant::All);
        push(StrategyKind::StandardDA, even, TwoStepVariant::All);
        push(StrategyKind::ThreeStepHost, even, TwoStepVariant::All);
        push(StrategyKind::ThreeStepDA, even, TwoStepVariant::All);
        push(StrategyKind::TwoStepHost, even, TwoStepVariant::All);
        push(StrategyKind::TwoStepDA, even, TwoStepVariant::All);
        push(StrategyKind::TwoStepDA, one, TwoStepVariant::One);
        push(StrategyKind::SplitMD, even, TwoStepVariant::All);
        push(StrategyKind::SplitDD, even, TwoStepVariant::All);
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "size_bytes,strategy,flavor,total_s,on_node_s,off_node_s,copy_s\n";
    out << std::setprecision(17);
    for (const auto& r : rows)
        out << r.size_bytes << ',' << strategy_name(r.kind, r.variant) << ','
            << strategy_flavor(r.kind) << ',' << r.total << ',' << r.breakdown.on_node
            << ',' << r.breakdown.off_node << ',' << r.breakdown.copy << '\n';
}

void write_sweep_json(std::ostream& out, std::span<const SweepRow> rows) {
    nlohmann::json doc;
    doc["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
        doc["rows"].push_back({{"size_bytes", r.size_bytes},
                               {"strategy", strategy_name(r.kind, r.variant)},
                               {"flavor", strategy_flavor(r.kind)},
                               {"total_s", r.total},
                               {"on_node_s", r.breakdown.on_node},
                               {"off_node_s", r.breakdown.off_node},
                               {"copy_s", r.breakdown.copy}});
    out << doc.dump(2) << '\n';
}

}  // namespace napcomm
