#include "oracles.hpp"

#include <doctest.h>

#include <unordered_map>

using namespace hdastar;

namespace {

void check_conservation(const OverheadReport &r) {
    auto gen = r.total(&WorkerStats::generated);
    auto seeded = r.total(&WorkerStats::seeded);
    CHECK(gen + seeded ==
          r.total(&WorkerStats::inserted) + r.total(&WorkerStats::duplicates) + r.total(&WorkerStats::pruned));
    CHECK(r.total(&WorkerStats::sent) == r.total(&WorkerStats::received));
    CHECK(r.total(&WorkerStats::sent) <= gen);
    CHECK(r.enqueued == r.drained);
}

void check_ordinals(const ExpansionTrace &t, std::uint64_t expanded) {
    std::vector<std::uint64_t> o;
    for (auto &r : t.rows)
        o.push_back(r.ordinal);
    std::sort(o.begin(), o.end());
    // first expansions only; reexpansions consume ordinals but are not listed
    CHECK(o.size() <= expanded);
    for (std::size_t i = 1; i < o.size(); ++i)
        CHECK(o[i] > o[i - 1]);
    if (!o.empty())
        CHECK(o.back() <= expanded);
}

struct NullSink : BatchSink {
    void send(std::uint32_t, std::uint32_t, std::vector<NodeMessage> &&) override {}
};

}  // namespace

TEST_CASE("p = 1 matches sequential A*") {
    std::mt19937_64 rng(8);
    for (auto tb : {TieBreak::LIFO, TieBreak::FIFO}) {
        for (int i = 0; i < 5; ++i) {
            TilePuzzle d(3, 3, random_tile_board(3, 3, rng));
            SearchOptions so;
            so.tiebreak = tb;
            so.record_trace = true;
            auto seq = astar_solve(d, so);
            auto z = make_zobrist_strategy("HDA*[Z]", d, 1);
            for (auto ex : {Executor::Threads, Executor::Simulated}) {
                EngineConfig cfg;
                cfg.tiebreak = tb;
                cfg.executor = ex;
                cfg.record_trace = true;
                cfg.sequential_expansions = seq.expansions;
                auto r = hda_solve(d, *z, cfg);
                CHECK(r.solution.cost == seq.cost);
                CHECK(r.report.total(&WorkerStats::expanded) == seq.expansions);
                CHECK(r.report.CO == 0);
                REQUIRE(r.report.SO.has_value());
                CHECK(*r.report.SO == 0);
                REQUIRE(r.solution.trace.rows.size() == seq.trace.rows.size());
                for (std::size_t k = 0; k < seq.trace.rows.size(); ++k) {
                    CHECK(r.solution.trace.rows[k].state == seq.trace.rows[k].state);
                    CHECK(r.solution.trace.rows[k].ordinal == seq.trace.rows[k].ordinal);
                }
            }
        }
    }
}

TEST_CASE("start == goal") {
    TilePuzzle d(3, 3, {0, 1, 2, 3, 4, 5, 6, 7, 8});
    auto z = make_zobrist_strategy("HDA*[Z]", d, 1);
    for (std::uint32_t p : {1u, 4u, 8u}) {
        for (auto ex : {Executor::Threads, Executor::Simulated}) {
            EngineConfig cfg;
            cfg.p = p;
            cfg.executor = ex;
            auto r = hda_solve(d, *z, cfg);
            CHECK(r.solution.cost == 0);
            CHECK(r.solution.path.size() == 1);
            CHECK(r.report.total(&WorkerStats::expanded) <= p);
            CHECK(r.report.terminated_reason == "optimal");
        }
    }
}

TEST_CASE("accept: duplicates and reopening") {
    TilePuzzle d(3, 3, {1, 2, 0, 3, 4, 5, 6, 7, 8});
    auto z = make_zobrist_strategy("HDA*[Z]", d, 1);
    EngineConfig cfg;
    SearchShared sh(d, *z, cfg);
    WorkerCore w(0, sh);
    NullSink sink;
    NodeMessage m{d.initial_state(), {}, 5, d.heuristic(d.initial_state()), false};
    CHECK(w.accept(m));
    CHECK(!w.accept(m));
    CHECK(w.stats().duplicates == 1);
    CHECK(w.step(sink));
    CHECK(w.stats().expanded == 1);
    m.g = 3;
    CHECK(w.accept(m));
    CHECK(w.step(sink));
    CHECK(w.stats().reexpanded == 1);
    m.g = 4;
    CHECK(!w.accept(m));
    CHECK(w.stats().duplicates == 2);
}

TEST_CASE("accept: arrivals at or above the incumbent are pruned") {
    TilePuzzle d(3, 3, {1, 2, 0, 3, 4, 5, 6, 7, 8});
    auto z = make_zobrist_strategy("HDA*[Z]", d, 1);
    EngineConfig cfg;
    SearchShared sh(d, *z, cfg);
    sh.incumbent = 6;
    WorkerCore w(0, sh);
    auto h = d.heuristic(d.initial_state());
    CHECK(!w.accept({d.initial_state(), {}, 6 - h, h, false}));
    CHECK(w.stats().pruned == 1);
    CHECK(w.accept({d.initial_state(), {}, 5 - h, h, false}));
}

TEST_CASE("terminate_check examples") {
    GlobalSnapshot s;
    s.workers.resize(1);
    s.incumbent = 7;
    CHECK(terminate_check(s) == TerminationDecision::Done);
    s.sent = 3;
    s.received = 2;
    CHECK(terminate_check(s) == TerminationDecision::Continue);
    s.received = 3;
    s.workers[0].open_min_f = 6;
    CHECK(terminate_check(s) == TerminationDecision::Continue);
    s.workers[0].open_min_f = 7;
    CHECK(terminate_check(s) == TerminationDecision::Done);
    s.workers[0].mailbox_pending = 1;
    CHECK(terminate_check(s) == TerminationDecision::Continue);
    s.workers[0].mailbox_pending = 0;
    s.workers[0].idle = false;
    CHECK(terminate_check(s) == TerminationDecision::Continue);

    GlobalSnapshot e;
    e.workers.resize(3);
    CHECK(terminate_check(e) == TerminationDecision::Unsolvable);
    auto later = e;
    later.workers[1].epoch = 1;
    CHECK(terminate_check(e, later) == TerminationDecision::Continue);
    CHECK(terminate_check(e, e) == TerminationDecision::Unsolvable);
    s.workers[0].idle = true;
    CHECK(terminate_check(s, s) == TerminationDecision::Done);
}

TEST_CASE("parallel runs are optimal and conserve nodes") {
    std::mt19937_64 rng(17);
    StrategySpec zs;
    for (int i = 0; i < 6; ++i) {
        TilePuzzle d(3, 3, random_tile_board(3, 3, rng));
        auto seq = astar_solve(d);
        for (auto name : {"HDA*[Z]", "HDA*[P]", "HDA*[Z,Afeature]", "HDA*[P,Astate]"}) {
            zs.name = name;
            auto s = make_strategy(zs, d);
            for (auto ex : {Executor::Threads, Executor::Simulated}) {
                EngineConfig cfg;
                cfg.p = 4;
                cfg.executor = ex;
                cfg.record_trace = true;
                auto r = hda_solve(d, *s, cfg);
                CHECK(r.solution.cost == seq.cost);
                CHECK(r.solution.path.size() == seq.cost + 1);
                CHECK(d.is_goal(r.solution.path.back()));
                check_conservation(r.report);
                check_ordinals(r.solution.trace, r.report.total(&WorkerStats::expanded));
            }
        }
    }
}

TEST_CASE("grid and SAS+ domains under the engine") {
    std::mt19937_64 rng(5);
    auto g = random_grid(40, 40, 0.3, rng);
    auto seq = astar_solve(*g);
    auto z = make_zobrist_strategy("HDA*[Z]", *g, 1);
    EngineConfig cfg;
    cfg.p = 8;
    cfg.executor = Executor::Simulated;
    auto r = hda_solve(*g, *z, cfg);
    CHECK(r.solution.cost == seq.cost);
    check_conservation(r.report);

    auto t = parse_sas(read_file(std::string(HDASTAR_FIXTURES) + "/logistics.sas"));
    SasDomain sd(t);
    auto zs = make_zobrist_strategy("HDA*[Z]", sd, 1);
    cfg.executor = Executor::Threads;
    auto rs = hda_solve(sd, *zs, cfg);
    CHECK(rs.solution.cost == Cost(oracle::sas_bfs_cost(t)));
    check_conservation(rs.report);
}

TEST_CASE("unsolvable and memory exhaustion are reported") {
    TilePuzzle d(3, 3, {0, 2, 1, 3, 4, 5, 6, 7, 8});
    auto z = make_zobrist_strategy("HDA*[Z]", d, 1);
    EngineConfig cfg;
    cfg.p = 2;
    auto r = hda_solve(d, *z, cfg);
    CHECK(r.report.terminated_reason == "unsolvable");
    std::mt19937_64 rng(3);
    TilePuzzle hard(4, 4, random_tile_board(4, 4, rng));
    cfg.memory_budget = 200;
    for (auto ex : {Executor::Threads, Executor::Simulated}) {
        cfg.executor = ex;
        auto m = hda_solve(hard, *make_zobrist_strategy("z", hard, 1), cfg);
        CHECK(m.report.terminated_reason == "memory_exhausted");
    }
}

TEST_CASE("simulated executor is deterministic") {
    std::mt19937_64 rng(6);
    TilePuzzle d(4, 4, random_walk_tile_board(4, 4, 40, rng));
    auto z = make_zobrist_strategy("HDA*[Z]", d, 1);
    EngineConfig cfg;
    cfg.p = 8;
    cfg.executor = Executor::Simulated;
    cfg.record_trace = true;
    auto a = hda_solve(d, *z, cfg), b = hda_solve(d, *z, cfg);
    CHECK(a.report.virtual_time == b.report.virtual_time);
    CHECK(a.report.total(&WorkerStats::expanded) == b.report.total(&WorkerStats::expanded));
    REQUIRE(a.solution.trace.rows.size() == b.solution.trace.rows.size());
    for (std::size_t i = 0; i < a.solution.trace.rows.size(); ++i)
        CHECK(a.solution.trace.rows[i].state == b.solution.trace.rows[i].state);
}

TEST_CASE("reexpansion rate stays small on unit-cost domains") {
    std::mt19937_64 rng(10);
    std::uint64_t re = 0, ex = 0;
    for (int i = 0; i < 5; ++i) {
        TilePuzzle d(4, 4, random_walk_tile_board(4, 4, 60, rng));
        auto z = make_zobrist_strategy("HDA*[Z]", d, 1);
        EngineConfig cfg;
        cfg.p = 8;
        cfg.executor = Executor::Simulated;
        auto r = hda_solve(d, *z, cfg);
        re += r.report.total(&WorkerStats::reexpanded);
        ex += r.report.total(&WorkerStats::expanded);
    }
    MESSAGE("reexpansion rate " << double(re) / double(ex));
    CHECK(double(re) / double(ex) < 1e-3);
}

TEST_CASE("burst effect on an easy 15-puzzle at p = 8") {
    std::mt19937_64 rng(env_default_seed());
    TilePuzzle d(4, 4, random_walk_tile_board(4, 4, 60, rng));
    SearchOptions so;
    so.record_trace = true;
    auto seq = astar_solve(d, so);
    std::unordered_map<PackedState, std::uint64_t, PackedStateHash> ref;
    for (auto &row : seq.trace.rows)
        ref[row.state] = row.ordinal;
    auto z = make_zobrist_strategy("HDA*[Z]", d, 1);
    EngineConfig cfg;
    cfg.p = 8;
    cfg.executor = Executor::Simulated;
    cfg.record_trace = true;
    auto r = hda_solve(d, *z, cfg);
    auto &rows = r.solution.trace.rows;
    std::uint64_t n = r.report.total(&WorkerStats::expanded);
    std::uint64_t mark = std::max<std::uint64_t>(1, n / 20);
    std::uint64_t best = 0;
    for (auto &row : rows)
        if (row.ordinal <= mark) {
            auto it = ref.find(row.state);
            // states absent from the sequential trace count as beyond its end
            best = std::max(best, it == ref.end() ? seq.expansions + 1 : it->second);
        }
    MESSAGE("max reference ordinal in first 5%: " << best << " vs mark " << mark);
    CHECK(best > 3 * mark);
}

TEST_CASE("trace overflow falls back to sampling") {
    std::mt19937_64 rng(6);
    TilePuzzle d(4, 4, random_walk_tile_board(4, 4, 40, rng));
    auto z = make_zobrist_strategy("HDA*[Z]", d, 1);
    EngineConfig cfg;
    cfg.p = 2;
    cfg.record_trace = true;
    cfg.trace_capacity = 16;
    auto r = hda_solve(d, *z, cfg);
    CHECK(r.report.trace_sampled);
    CHECK(r.solution.trace.sampled);
    CHECK(r.solution.trace.rows.size() <= 16);
}
