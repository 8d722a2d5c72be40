#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <stdexcept>

#include "doctest.h"
#include "json.hpp"
#include "napcomm/machine.hpp"
#include "napcomm/strategy.hpp"

using namespace napcomm;

namespace {

bool rel_close(double got, double want, double tol = 1e-12) {
    if (want == 0.0) return got == 0.0;
    return std::fabs(got - want) <= tol * std::fabs(want);
}

// Independent restatement of every composition: each strategy total rebuilt
// from the component models and the documented wire sizes. evaluate() must
// reproduce these bit for bit.
CostBreakdown oracle_breakdown(StrategyKind kind, const PatternSummary& sm,
                               const MachineModel& mm, const EvalOptions& o) {
    CostBreakdown parts;
    if (sm.s_node == 0.0 && sm.m_proc == 0) return parts;
    const ParameterTable& t = mm.table;
    const int gps = mm.topology.gpus_per_socket;
    const int ppn = mm.topology.procs_per_node;
    const int pps = mm.topology.procs_per_socket();
    const std::int64_t cap =
        o.message_cap > 0 ? o.message_cap : t.thresholds.inter_cpu_eager_max;
    auto proto = [&](Flavor f, double wire) {
        return o.pinned_protocol ? *o.pinned_protocol : select_protocol(t, f, wire);
    };
    const double sp = sm.s_proc, sn = sm.s_node, s22 = sm.s_node_to_node;

    switch (kind) {
        case StrategyKind::StandardHost: {
            const double wire = sp / static_cast<double>(std::max<std::int64_t>(sm.m_proc, 1));
            parts.off_node = t_off(t, proto(Flavor::InterCpu, wire), sm.m_proc, sp, sn);
            if (o.standard_host_includes_copy) parts.copy = t_copy(t, sp, s22, 1);
            return parts;
        }
        case StrategyKind::StandardDA: {
            const double wire = sp / static_cast<double>(std::max<std::int64_t>(sm.m_proc, 1));
            parts.off_node = t_off_da(t, proto(Flavor::InterGpu, wire), sm.m_proc, sp);
            return parts;
        }
        case StrategyKind::ThreeStepHost: {
            const Protocol p = proto(Flavor::InterCpu, s22);
            parts.off_node = t_off(t, p, sm.m_node_to_node, s22, sn);
            parts.on_node = 2.0 * t_on(t, Flavor::InterCpu, p, s22, gps);
            parts.copy = t_copy(t, sp, s22, 1);
            return parts;
        }
        case StrategyKind::ThreeStepDA: {
            const Protocol p = proto(Flavor::InterGpu, s22);
            parts.off_node = t_off_da(t, p, sm.m_node_to_node, s22);
            parts.on_node = 2.0 * t_on(t, Flavor::InterGpu, p, s22, gps);
            return parts;
        }
        case StrategyKind::TwoStepHost: {
            const double wire =
                sp / static_cast<double>(std::max<std::int64_t>(sm.m_proc_to_node, 1));
            parts.off_node = t_off(t, proto(Flavor::InterCpu, wire), sm.m_proc_to_node, sp, sn);
            parts.on_node = t_on(t, Flavor::InterCpu, proto(Flavor::InterCpu, sp), sp, gps);
            parts.copy = t_copy(t, sp, s22, 1);
            return parts;
        }
        case StrategyKind::TwoStepDA: {
            const double wire =
                sp / static_cast<double>(std::max<std::int64_t>(sm.m_proc_to_node, 1));
            parts.off_node = t_off_da(t, proto(Flavor::InterGpu, wire), sm.m_proc_to_node, sp);
            parts.on_node = t_on(t, Flavor::InterGpu, proto(Flavor::InterGpu, sp), sp, gps);
            return parts;
        }
        case StrategyKind::SplitMD:
        case StrategyKind::SplitDD: {
            const int ppg = kind == StrategyKind::SplitMD ? 1 : 4;
            double wire = 0.0, chunks = 1.0;
            std::int64_t m_rank = 0;
            if (s22 > 0.0) {
                if (s22 < static_cast<double>(cap)) {
                    wire = s22;
                } else {
                    double cap_eff = static_cast<double>(cap);
                    if (s22 / static_cast<double>(cap) > ppn && ppn > 1)
                        cap_eff = std::ceil(s22 / ppn);
                    chunks = std::ceil(s22 / cap_eff);
                    wire = std::min(cap_eff, s22);
                }
                m_rank = static_cast<std::int64_t>(
                    std::ceil(static_cast<double>(sm.m_proc_to_node) * chunks / ppn));
            }
            const double rank_share = std::min(std::ceil(sn / ppn), sn);
            const double sigma = o.split_redist_volume == SplitRedistVolume::NodeVolume
                                     ? sn
                                     : (wire > 0.0 ? std::min(std::ceil(sn / ppn), wire) : 0.0);
            parts.off_node = t_off(t, proto(Flavor::InterCpu, wire), m_rank, rank_share, sn);
            if (sn > 0.0)
                parts.on_node =
                    2.0 * t_on_split(t, proto(Flavor::InterCpu, sigma), sigma, pps, ppg);
            parts.copy = t_copy(t, sn, s22, ppg);
            return parts;
        }
    }
    return parts;
}

PatternSummary random_summary(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PatternSummary sm;
    sm.s_node = std::pow(10.0, u(rng) * 7.0);
    if (u(rng) < 0.4) sm.s_node = std::floor(sm.s_node);
    sm.s_proc = sm.s_node * u(rng);
    sm.s_node_to_node = sm.s_node * u(rng);
    sm.m_proc = static_cast<std::int64_t>(u(rng) * 300.0);
    sm.m_proc_to_node = static_cast<std::int64_t>(u(rng) * 17.0);
    sm.m_node_to_node = static_cast<std::int64_t>(u(rng) * 300.0);
    return sm;
}

constexpr StrategyKind kAll[] = {
    StrategyKind::StandardHost,  StrategyKind::StandardDA, StrategyKind::ThreeStepHost,
    StrategyKind::ThreeStepDA,   StrategyKind::TwoStepHost, StrategyKind::TwoStepDA,
    StrategyKind::SplitMD,       StrategyKind::SplitDD,
};

MachineModel silent_machine() {
    // all-zero parameters: any nonzero estimate would expose a hidden
    // constant in the composition. Built by hand because a zero rn_inv is
    // (deliberately) unloadable.
    MachineModel mm;
    mm.name = "silent";
    mm.topology = Topology{2, 20, 2, 40, 1};
    for (Protocol p : {Protocol::Short, Protocol::Eager, Protocol::Rendezvous})
        for (Locality l : {Locality::OnSocket, Locality::OnNode, Locality::OffNode})
            mm.table.set_p2p(Flavor::InterCpu, p, l, {0.0, 0.0});
    for (Protocol p : {Protocol::Eager, Protocol::Rendezvous})
        for (Locality l : {Locality::OnSocket, Locality::OnNode, Locality::OffNode})
            mm.table.set_p2p(Flavor::InterGpu, p, l, {0.0, 0.0});
    for (CopyDirection d : {CopyDirection::HostToDevice, CopyDirection::DeviceToHost})
        for (int procs : {1, 4}) mm.table.set_memcpy(d, procs, {0.0, 0.0});
    return mm;
}

}  // namespace

TEST_CASE("strategy names and flavors") {
    CHECK(std::string(strategy_name(StrategyKind::StandardHost)) == "standard");
    CHECK(std::string(strategy_name(StrategyKind::StandardDA)) == "standard");
    CHECK(std::string(strategy_name(StrategyKind::ThreeStepHost)) == "3step");
    CHECK(std::string(strategy_name(StrategyKind::TwoStepHost)) == "2step_all");
    CHECK(std::string(strategy_name(StrategyKind::TwoStepDA, TwoStepVariant::One)) ==
          "2step_one");
    CHECK(std::string(strategy_name(StrategyKind::SplitMD)) == "split_md");
    CHECK(std::string(strategy_name(StrategyKind::SplitDD)) == "split_dd");
    CHECK(std::string(strategy_flavor(StrategyKind::StandardHost)) == "host");
    CHECK(std::string(strategy_flavor(StrategyKind::StandardDA)) == "device");
    CHECK(std::string(strategy_flavor(StrategyKind::TwoStepDA)) == "device");
    CHECK(std::string(strategy_flavor(StrategyKind::SplitMD)) == "host");
    CHECK(std::string(strategy_flavor(StrategyKind::SplitDD)) == "host");
}

TEST_CASE("evaluate: an all-quiet summary costs nothing for every strategy") {
    const MachineModel mm = lassen_preset();
    for (StrategyKind k : kAll) {
        const StrategyEstimate est = evaluate(k, PatternSummary{}, mm);
        CHECK(est.total == 0.0);
        CHECK(est.breakdown.on_node == 0.0);
        CHECK(est.breakdown.off_node == 0.0);
        CHECK(est.breakdown.copy == 0.0);
        CHECK(est.kind == k);
    }
}

TEST_CASE("evaluate: staged 3-step estimate recomposes from its parts") {
    const MachineModel mm = lassen_preset();
    PatternSummary sm;
    sm.m_node_to_node = 4;
    sm.s_node_to_node = 65536.0;
    sm.s_proc = 16384.0;
    sm.s_node = 262144.0;
    sm.m_proc = 16;
    sm.m_proc_to_node = 4;
    const StrategyEstimate est = evaluate(StrategyKind::ThreeStepHost, sm, mm);
    // 64 KiB node-pair volumes ride rendezvous; gather+scatter pay two
    // on-node sweeps; the staging copy moves the rank share up and the
    // conglomerate down
    CHECK(est.breakdown.off_node ==
          t_off(mm.table, Protocol::Rendezvous, 4, 65536.0, 262144.0));
    CHECK(est.breakdown.on_node ==
          2.0 * t_on(mm.table, Flavor::InterCpu, Protocol::Rendezvous, 65536.0, 2));
    CHECK(est.breakdown.copy == t_copy(mm.table, 16384.0, 65536.0, 1));
    CHECK(rel_close(est.breakdown.off_node, 4.2023833600000002e-05));
    CHECK(est.total == est.breakdown.total());
}

TEST_CASE("evaluate matches the composition oracle on random summaries") {
    const MachineModel mm = lassen_preset();
    std::mt19937 rng(1234);
    std::vector<EvalOptions> variants(5);
    variants[1].split_redist_volume = SplitRedistVolume::NodeVolume;
    variants[2].standard_host_includes_copy = false;
    variants[3].message_cap = 4096;
    variants[4].pinned_protocol = Protocol::Eager;
    for (int trial = 0; trial < 200; ++trial) {
        PatternSummary sm = random_summary(rng);
        if (trial % 20 == 0) sm = PatternSummary{};
        for (std::size_t v = 0; v < variants.size(); ++v) {
            for (StrategyKind k : kAll) {
                const CostBreakdown want = oracle_breakdown(k, sm, mm, variants[v]);
                const StrategyEstimate got = evaluate(k, sm, mm, variants[v]);
                CHECK(got.breakdown.on_node == want.on_node);
                CHECK(got.breakdown.off_node == want.off_node);
                CHECK(got.breakdown.copy == want.copy);
                CHECK(got.total == want.total());
            }
        }
    }
}

TEST_CASE("evaluate: option knobs move exactly the advertised term") {
    const MachineModel mm = lassen_preset();
    const PatternSummary sm =
        summarize(synthetic_scenario(16, 256, 4096, ScenarioMode::Even, mm.topology));

    SUBCASE("standard_host_includes_copy toggles only the copy term") {
        EvalOptions bare;
        bare.standard_host_includes_copy = false;
        const StrategyEstimate with = evaluate(StrategyKind::StandardHost, sm, mm);
        const StrategyEstimate without = evaluate(StrategyKind::StandardHost, sm, mm, bare);
        CHECK(without.breakdown.copy == 0.0);
        CHECK(with.breakdown.copy ==
              t_copy(mm.table, sm.s_proc, sm.s_node_to_node, 1));
        CHECK(with.breakdown.off_node == without.breakdown.off_node);
        CHECK(with.breakdown.on_node == without.breakdown.on_node);
    }
    SUBCASE("NodeVolume redistribution can only lengthen the on-node phase") {
        EvalOptions nv;
        nv.split_redist_volume = SplitRedistVolume::NodeVolume;
        for (StrategyKind k : {StrategyKind::SplitMD, StrategyKind::SplitDD}) {
            const StrategyEstimate rs = evaluate(k, sm, mm);
            const StrategyEstimate nvol = evaluate(k, sm, mm, nv);
            CHECK(nvol.breakdown.on_node >= rs.breakdown.on_node);
            CHECK(nvol.breakdown.off_node == rs.breakdown.off_node);
            CHECK(nvol.breakdown.copy == rs.breakdown.copy);
        }
    }
    SUBCASE("message_cap 0 defaults to the eager switch point") {
        EvalOptions explicit_cap;
        explicit_cap.message_cap = mm.table.thresholds.inter_cpu_eager_max;
        const StrategyEstimate a = evaluate(StrategyKind::SplitMD, sm, mm);
        const StrategyEstimate b = evaluate(StrategyKind::SplitMD, sm, mm, explicit_cap);
        CHECK(a.total == b.total);
    }
    SUBCASE("pinning a protocol overrides size-based selection") {
        EvalOptions pin;
        pin.pinned_protocol = Protocol::Rendezvous;
        const StrategyEstimate got = evaluate(StrategyKind::StandardHost, sm, mm, pin);
        CHECK(got.breakdown.off_node ==
              t_off(mm.table, Protocol::Rendezvous, sm.m_proc, sm.s_proc, sm.s_node));
    }
}

TEST_CASE("rank_estimates: ascending totals, declaration order on ties") {
    std::vector<StrategyEstimate> rows(3);
    rows[0].kind = StrategyKind::SplitMD;
    rows[0].total = 5.0;
    rows[1].kind = StrategyKind::StandardHost;
    rows[1].total = 5.0;
    rows[2].kind = StrategyKind::TwoStepDA;
    rows[2].total = 1.0;
    rank_estimates(rows);
    CHECK(rows[0].kind == StrategyKind::TwoStepDA);
    CHECK(rows[1].kind == StrategyKind::StandardHost);  // tie: declaration order
    CHECK(rows[2].kind == StrategyKind::SplitMD);
}

TEST_CASE("best: exclusion flag is honored") {
    std::vector<StrategyEstimate> rows(2);
    rows[0].kind = StrategyKind::TwoStepDA;
    rows[0].variant = TwoStepVariant::One;
    rows[0].total = 1.0;
    rows[0].excluded_from_best = true;
    rows[1].kind = StrategyKind::SplitMD;
    rows[1].total = 2.0;
    CHECK(best(rows)->kind == StrategyKind::SplitMD);
    CHECK(best(rows, /*include_excluded=*/true)->kind == StrategyKind::TwoStepDA);
    CHECK(best(std::span<const StrategyEstimate>{}) == nullptr);
}

TEST_CASE("compare: full ranking and input validation") {
    const MachineModel mm = lassen_preset();
    const PatternSummary sm =
        summarize(synthetic_scenario(4, 32, 2048, ScenarioMode::Even, mm.topology));
    const auto ranked = compare(sm, mm);
    REQUIRE(ranked.size() == 8);
    for (std::size_t i = 1; i < ranked.size(); ++i)
        CHECK(ranked[i - 1].total <= ranked[i].total);
    // every kind appears exactly once
    for (StrategyKind k : kAll)
        CHECK(std::count_if(ranked.begin(), ranked.end(),
                            [&](const StrategyEstimate& e) { return e.kind == k; }) == 1);

    const StrategyKind only[] = {StrategyKind::SplitMD};
    CHECK(compare(sm, mm, only).size() == 1);
    CHECK_THROWS_AS(compare(sm, mm, std::span<const StrategyKind>{}),
                    std::invalid_argument);
}

TEST_CASE("compare: node-deduplicated workload favors the split strategy") {
    const MachineModel mm = lassen_preset();
    const PatternSummary sm = scale_duplicates(
        summarize(synthetic_scenario(16, 256, 4096, ScenarioMode::Even, mm.topology)),
        0.25);
    const auto ranked = compare(sm, mm);
    CHECK(ranked[0].kind == StrategyKind::SplitMD);
    const auto total_of = [&](StrategyKind k) {
        for (const auto& e : ranked)
            if (e.kind == k) return e.total;
        return -1.0;
    };
    CHECK(total_of(StrategyKind::SplitMD) < total_of(StrategyKind::ThreeStepHost));
    CHECK(total_of(StrategyKind::ThreeStepHost) < total_of(StrategyKind::StandardHost));
    CHECK(rel_close(total_of(StrategyKind::SplitMD), 2.394003872e-04, 1e-9));
}

TEST_CASE("relative ranking is invariant under uniform parameter scaling") {
    const MachineModel mm = lassen_preset();
    MachineModel scaled = mm;
    const double factor = 3.7;
    for (Flavor f : {Flavor::InterCpu, Flavor::InterGpu})
        for (Protocol p : {Protocol::Short, Protocol::Eager, Protocol::Rendezvous})
            for (Locality l : {Locality::OnSocket, Locality::OnNode, Locality::OffNode}) {
                if (!mm.table.has(f, p, l)) continue;
                PostalParams pp = mm.table.p2p(f, p, l);
                pp.alpha *= factor;
                pp.beta *= factor;
                scaled.table.set_p2p(f, p, l, pp);
            }
    for (CopyDirection d : {CopyDirection::HostToDevice, CopyDirection::DeviceToHost})
        for (int procs : {1, 4}) {
            PostalParams pp = mm.table.memcpy_params(d, procs);
            pp.alpha *= factor;
            pp.beta *= factor;
            scaled.table.set_memcpy(d, procs, pp);
        }
    scaled.table.rn_inv = mm.table.rn_inv * factor;

    std::mt19937 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const PatternSummary sm = random_summary(rng);
        const auto a = compare(sm, mm);
        const auto b = compare(sm, scaled);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].kind == b[i].kind);
            if (a[i].total > 0.0) CHECK(rel_close(b[i].total, factor * a[i].total));
        }
    }
}

TEST_CASE("pinned-protocol estimates grow with the data volume") {
    const MachineModel mm = lassen_preset();
    std::mt19937 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const PatternSummary base = random_summary(rng);
        for (Protocol p : {Protocol::Eager, Protocol::Rendezvous}) {
            EvalOptions o;
            o.pinned_protocol = p;
            for (StrategyKind k : kAll) {
                double prev = -1.0;
                for (double lambda : {1.0, 2.0, 5.0, 10.0}) {
                    PatternSummary sm = base;
                    sm.s_proc *= lambda;
                    sm.s_node *= lambda;
                    sm.s_node_to_node *= lambda;
                    const double total = evaluate(k, sm, mm, o).total;
                    CHECK(total >= prev);
                    prev = total;
                }
            }
        }
    }
}

TEST_CASE("sweep: grid shape and fixed row order") {
    const MachineModel mm = lassen_preset();
    const auto grid = default_size_grid();
    REQUIRE(grid.size() == 17);
    CHECK(grid.front() == 16);
    CHECK(grid.back() == 1048576);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] == 2 * grid[i - 1]);

    const auto rows = sweep(mm, {16, 256}, grid);
    REQUIRE(rows.size() == 17 * 9);
    const char* want_name[] = {"standard", "standard", "3step",    "3step",   "2step_all",
                               "2step_all", "2step_one", "split_md", "split_dd"};
    const char* want_flavor[] = {"host", "device", "host", "device", "host",
                                 "device", "device", "host", "host"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].size_bytes == grid[i / 9]);
        CHECK(std::string(strategy_name(rows[i].kind, rows[i].variant)) ==
              want_name[i % 9]);
        CHECK(std::string(strategy_flavor(rows[i].kind)) == want_flavor[i % 9]);
        CHECK(rows[i].total == rows[i].breakdown.total());
    }
}

TEST_CASE("sweep: a silent machine prices every row at exactly zero") {
    const auto rows = sweep(silent_machine(), {4, 32}, std::vector<std::int64_t>{1});
    REQUIRE(rows.size() == 9);
    for (const auto& r : rows) {
        CHECK(r.total == 0.0);
        CHECK(r.breakdown.on_node == 0.0);
        CHECK(r.breakdown.off_node == 0.0);
        CHECK(r.breakdown.copy == 0.0);
    }
}

TEST_CASE("sweep: validation of sizes and scenario") {
    const MachineModel mm = lassen_preset();
    CHECK_THROWS_AS(sweep(mm, {4, 32}, std::vector<std::int64_t>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep(mm, {4, 32}, std::vector<std::int64_t>{64, 64}),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep(mm, {4, 32}, std::vector<std::int64_t>{128, 64}),
                    std::invalid_argument);
    // 30 messages cannot spread evenly over 4 GPUs
    CHECK_THROWS_AS(sweep(mm, {4, 30}, std::vector<std::int64_t>{64}),
                    std::invalid_argument);
}

TEST_CASE("sweep: removing duplicate data never makes a row slower") {
    const MachineModel mm = lassen_preset();
    const auto grid = default_size_grid();
    for (int nodes : {4, 16}) {
        const auto base = sweep(mm, {nodes, 256}, grid, 0.0);
        const auto deduped = sweep(mm, {nodes, 256}, grid, 0.25);
        REQUIRE(base.size() == deduped.size());
        for (std::size_t i = 0; i < base.size(); ++i)
            CHECK(deduped[i].total <= base[i].total);
    }
}

TEST_CASE("sweep: every strategy's estimate grows with message size") {
    const MachineModel mm = lassen_preset();
    const auto grid = default_size_grid();
    for (auto [nodes, msgs] :
         {std::pair<int, std::int64_t>{4, 32}, {4, 256}, {16, 32}, {16, 256}}) {
        const auto rows = sweep(mm, {nodes, msgs}, grid);
        for (std::size_t k = 0; k < 9; ++k)
            for (std::size_t i = 1; i < grid.size(); ++i)
                CHECK(rows[i * 9 + k].total >= rows[(i - 1) * 9 + k].total);
    }
}

TEST_CASE("sweep: the single-active-GPU 2-step case never trails the spread case") {
    const MachineModel mm = lassen_preset();
    const auto grid = default_size_grid();
    for (auto [nodes, msgs] :
         {std::pair<int, std::int64_t>{4, 32}, {4, 256}, {16, 32}, {16, 256}}) {
        const auto rows = sweep(mm, {nodes, msgs}, grid);
        for (std::size_t i = 0; i < rows.size(); i += 9)
            CHECK(rows[i + 6].total <= rows[i + 5].total);
    }
}

TEST_CASE("sweep: node-aware orderings on the standard window") {
    const MachineModel mm = lassen_preset();
    const std::vector<std::int64_t> window = {1024, 2048, 4096, 8192};
    for (int nodes : {4, 16}) {
        const auto rows = sweep(mm, {nodes, 256}, window);
        for (std::size_t i = 0; i < rows.size(); i += 9) {
            const double std_h = rows[i + 0].total;
            const double three_h = rows[i + 2].total;
            const double two_one = rows[i + 6].total;
            const double split_md = rows[i + 7].total;
            const double split_dd = rows[i + 8].total;
            if (nodes >= 16) {
                CHECK(split_md < std_h);
                CHECK(split_md < three_h);
            }
            double others = std::numeric_limits<double>::infinity();
            for (std::size_t k : {0, 1, 2, 3, 4, 5, 7, 8})
                others = std::min(others, rows[i + k].total);
            CHECK(two_one < others);
            CHECK(split_md < split_dd);
        }
    }
}

TEST_CASE("write_sweep_csv: header and full-precision round-trip") {
    const MachineModel mm = lassen_preset();
    const std::vector<std::int64_t> sizes = {1024, 4096};
    const auto rows = sweep(mm, {4, 32}, sizes);
    std::ostringstream out;
    write_sweep_csv(out, rows);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "size_bytes,strategy,flavor,total_s,on_node_s,off_node_s,copy_s");
    std::size_t i = 0;
    while (std::getline(in, line)) {
        REQUIRE(i < rows.size());
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 7);
        CHECK(std::strtoll(cells[0].c_str(), nullptr, 10) == rows[i].size_bytes);
        CHECK(cells[1] == strategy_name(rows[i].kind, rows[i].variant));
        CHECK(cells[2] == strategy_flavor(rows[i].kind));
        CHECK(std::strtod(cells[3].c_str(), nullptr) == rows[i].total);
        CHECK(std::strtod(cells[4].c_str(), nullptr) == rows[i].breakdown.on_node);
        CHECK(std::strtod(cells[5].c_str(), nullptr) == rows[i].breakdown.off_node);
        CHECK(std::strtod(cells[6].c_str(), nullptr) == rows[i].breakdown.copy);
        ++i;
    }
    CHECK(i == rows.size());
}

TEST_CASE("write_sweep_json: parseable mirror of the rows") {
    const MachineModel mm = lassen_preset();
    const auto rows = sweep(mm, {4, 32}, std::vector<std::int64_t>{512, 2048});
    std::ostringstream out;
    write_sweep_json(out, rows);
    const nlohmann::json doc = nlohmann::json::parse(out.str());
    REQUIRE(doc.contains("rows"));
    REQUIRE(doc["rows"].size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = doc["rows"][i];
        CHECK(r["size_bytes"].get<std::int64_t>() == rows[i].size_bytes);
        CHECK(r["strategy"].get<std::string>() ==
              strategy_name(rows[i].kind, rows[i].variant));
        CHECK(r["flavor"].get<std::string>() == strategy_flavor(rows[i].kind));
        CHECK(r["total_s"].get<double>() == rows[i].total);
        CHECK(r["on_node_s"].get<double>() == rows[i].breakdown.on_node);
        CHECK(r["off_node_s"].get<double>() == rows[i].breakdown.off_node);
        CHECK(r["copy_s"].get<double>() == rows[i].breakdown.copy);
    }
}
