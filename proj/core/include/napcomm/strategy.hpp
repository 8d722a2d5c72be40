#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "napcomm/models.hpp"
#include "napcomm/pattern.hpp"

namespace napcomm {

// The eight modeled strategies. Split has no device-aware variant: its whole
// point is staging through host ranks, so none is representable here.
enum class StrategyKind {
    StandardHost,
    StandardDA,
    ThreeStepHost,
    ThreeStepDA,
    TwoStepHost,
    TwoStepDA,
    SplitMD,
    SplitDD,
};

// Which synthetic scenario shape produced a TwoStep estimate: All has every
// source GPU streaming to every destination node, One has a single active
// source GPU per destination node (the strategy's best case). The variant
// lives in the scenario, not the formula, so it is row metadata.
enum class TwoStepVariant { All, One };

const char* strategy_name(StrategyKind kind, TwoStepVariant variant = TwoStepVariant::All);
const char* strategy_flavor(StrategyKind kind);  // "host" or "device"

// How the split strategy sizes its redistribution messages: RankShare spreads
// the node volume over the ppn cooperating ranks (clamped to the chunk size),
// NodeVolume is the literal composition where the full node volume multiplies
// the per-hop transfer cost.
enum class SplitRedistVolume { RankShare, NodeVolume };

struct EvalOptions {
    std::int64_t message_cap = 0;  // split chunk cap; 0 = rendezvous switch point
    // The standard staged-through-host estimate physically requires a staging
    // copy; the composition table omits it. Kept on so standard-vs-split
    // comparisons weigh both sides' copies; off reproduces the bare table row.
    bool standard_host_includes_copy = true;
    SplitRedistVolume split_redist_volume = SplitRedistVolume::RankShare;
    std::optional<Protocol> pinned_protocol;  // bypass size-based selection
};

struct StrategyEstimate {
    StrategyKind kind = StrategyKind::StandardHost;
    TwoStepVariant variant = TwoStepVariant::All;
    CostBreakdown breakdown;
    double total = 0.0;                   // == breakdown.total(), exactly
    bool excluded_from_best = false;      // One-variant rows in ranked output
};

// Composes the component models into one strategy's estimate for a summarized
// pattern. Protocols are chosen per term from the size that term actually
// wires (per-message for off-node terms). An all-zero summary costs zero for
// every strategy.
StrategyEstimate evaluate(StrategyKind kind, const PatternSummary& summary,
                          const MachineModel& machine, const EvalOptions& opts = {});

// Evaluates the requested strategies (default: all eight) and sorts ascending
// by total, ties broken by StrategyKind declaration order.
std::vector<StrategyEstimate> compare(const PatternSummary& summary,
                                      const MachineModel& machine,
                                      std::span<const StrategyKind> strategies,
                                      const EvalOptions& opts = {});
std::vector<StrategyEstimate> compare(const PatternSummary& summary,
                                      const MachineModel& machine,
                                      const EvalOptions& opts = {});

// Stable ranking of precomputed estimates (ascending total, declaration-order
// ties); best() skips excluded rows unless include_excluded is set.
void rank_estimates(std::vector<StrategyEstimate>& estimates);
const StrategyEstimate* best(std::span<const StrategyEstimate> estimates,
                             bool include_excluded = false);

// One source node spraying num_messages over dest_nodes destination nodes;
// the sweep re-derives the pattern at each message size.
struct SweepScenario {
    int dest_nodes = 4;
    std::int64_t num_messages = 32;
};

struct SweepRow {
    std::int64_t size_bytes = 0;
    StrategyKind kind = StrategyKind::StandardHost;
    TwoStepVariant variant = TwoStepVariant::All;
    CostBreakdown breakdown;
    double total = 0.0;
};

// Nine rows per size: standard, 3-step and 2-step-all in host and
// device-aware flavors, the device-aware 2-step best case (one active GPU per
// destination node), and split MD/DD. dedup_fraction scales the byte
// aggregates before evaluation. sizes must be non-empty and strictly
// increasing.
std::vector<SweepRow> sweep(const MachineModel& machine, SweepScenario scenario,
                            std::span<const std::int64_t> sizes,
                            double dedup_fraction = 0.0,
                            const EvalOptions& opts = {});

// CSV: header size_bytes,strategy,flavor,total_s,on_node_s,off_node_s,copy_s;
// times at full round-trip precision. JSON mirrors the same rows.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
void write_sweep_json(std::ostream& out, std::span<const SweepRow> rows);

// Default size grid 2^4 .. 2^20, doubling (17 sizes).
std::vector<std::int64_t> default_size_grid();

}  // namespace napcomm
