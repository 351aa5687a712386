#pragma once

#include "hdastar/astar.hpp"
#include "hdastar/hashing.hpp"

#include <atomic>
#include <mutex>
#include <optional>

namespace hdastar {

struct NodeMessage {
    PackedState state;
    PackedState parent;
    Cost g = 0, h = 0;
    bool has_parent = false;
};

struct WorkerStats {
    std::uint64_t expanded = 0;
    std::uint64_t generated = 0;
    std::uint64_t sent = 0;       // generated nodes handed to another worker
    std::uint64_t received = 0;   // nodes drained from the mailbox
    std::uint64_t reexpanded = 0;
    std::uint64_t duplicates = 0; // dropped, g not better than the stored one
    std::uint64_t pruned = 0;     // dropped, f >= U on arrival
    std::uint64_t inserted = 0;   // pushed to open (new or reopened)
    std::uint64_t seeded = 0;     // the root
    std::uint64_t max_open = 0;
};

enum class Executor { Threads, Simulated };

Executor parse_executor(const std::string &s);
const char *to_string(Executor e);

// Virtual-time cost model of the simulated executor, in expansion units.
struct SimCosts {
    double expand = 1.0;
    double send_per_node = 0.5;
    double send_per_message = 5.0;
    double receive_per_node = 0.25;
    double latency = 20.0;
    double flush_interval = 50.0;
};

// Random sleeps before enqueueing a batch (threads executor only).
struct FaultInjection {
    bool enabled = false;
    std::uint64_t seed = 0;
    double delay_probability = 0.2;
    std::uint32_t max_delay_us = 200;
};

struct EngineConfig {
    std::uint32_t p = 1;
    std::uint32_t batch = 100;
    TieBreak tiebreak = TieBreak::LIFO;
    Backend backend = Backend::Bucket;
    Executor executor = Executor::Threads;
    std::uint64_t memory_budget = 50'000'000;  // stored states per worker
    bool record_trace = false;
    std::size_t trace_capacity = 20'000'000;   // rows over all workers
    double flush_interval_ms = 1.0;
    SimCosts sim;
    FaultInjection faults;
    std::uint64_t seed = 0;  // recorded in the report
    // sequential baselines for SO and speedup
    std::optional<std::uint64_t> sequential_expansions;
    std::optional<double> sequential_walltime_ms;
    std::optional<double> p1_walltime_ms;
};

struct OverheadReport {
    std::string strategy;
    std::uint32_t p = 1;
    std::uint64_t seed = 0;
    Cost cost = kInfCost;
    std::vector<WorkerStats> workers;
    double CO = 0, LB = 1;
    std::optional<double> SO;
    double walltime_ms = 0;
    double virtual_time = 0;  // simulated makespan, 0 for threads
    std::optional<double> speedup_vs_astar, speedup_vs_p1;
    // simulated executor: sequential expansions * expand cost / makespan
    std::optional<double> virtual_speedup;
    std::string terminated_reason;  // optimal | unsolvable | memory_exhausted
    bool trace_sampled = false;
    std::uint64_t enqueued = 0, drained = 0;
    Executor executor = Executor::Threads;

    std::uint64_t total(std::uint64_t WorkerStats::*field) const;
};

struct ParallelResult {
    Solution solution;
    OverheadReport report;
};

struct MemoryExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shared, read-mostly state of a run.
struct SearchShared {
    const Domain &domain;
    const DistributionStrategy &strategy;
    const EngineConfig &cfg;
    std::atomic<Cost> incumbent{kInfCost};
    std::atomic<std::uint64_t> next_ordinal{1};
    std::mutex witness_mutex;
    PackedState witness_goal{};
    std::uint32_t witness_worker = 0;

    SearchShared(const Domain &d, const DistributionStrategy &s, const EngineConfig &c)
        : domain(d), strategy(s), cfg(c) {}
    void offer_solution(Cost g, const PackedState &goal, std::uint32_t worker);
};

// Outgoing batch transport, supplied by the executor.
struct BatchSink {
    virtual ~BatchSink() = default;
    virtual void send(std::uint32_t from, std::uint32_t to, std::vector<NodeMessage> &&batch) = 0;
};

// One worker's private search state: open list, closed map, outgoing
// buffers and counters. Not thread safe; owned by exactly one thread.
class WorkerCore {
public:
    struct Rec {
        Cost g;
        PackedState parent;
        bool has_parent;
        bool expanded;
    };

    WorkerCore(std::uint32_t id, SearchShared &shared);

    // duplicate detection for one node addressed to this worker;
    // true if inserted into open
    bool accept(const NodeMessage &m);
    // drain_and_dedup over a batch; returns number inserted
    std::size_t drain(const std::vector<NodeMessage> &batch);
    // expand one node with f < U; false if none
    bool step(BatchSink &sink);
    // pop stale entries; true if a node with f < U is available
    bool has_work();
    void flush(BatchSink &sink, std::uint32_t dest);
    bool flush_all(BatchSink &sink);  // true if anything was sent
    bool has_outgoing() const;
    Cost open_min_f() const { return open_.min_f(); }

    const WorkerStats &stats() const { return stats_; }
    const std::unordered_map<PackedState, Rec, PackedStateHash> &records() const { return recs_; }
    std::vector<TraceRow> &trace_rows() { return trace_; }
    bool trace_sampled() const { return trace_stride_ > 1; }

private:
    std::uint32_t id_;
    SearchShared &sh_;
    OpenList open_;
    std::unordered_map<PackedState, Rec, PackedStateHash> recs_;
    std::vector<std::vector<NodeMessage>> out_;
    std::vector<Transition> succ_;
    std::vector<Value> vals_;
    WorkerStats stats_;
    std::vector<TraceRow> trace_;
    std::size_t trace_cap_;
    std::uint64_t trace_stride_ = 1;
};

struct WorkerSnapshot {
    bool idle = true;
    std::uint64_t epoch = 0;
    Cost open_min_f = kInfCost;
    std::uint64_t mailbox_pending = 0;
};

struct GlobalSnapshot {
    std::vector<WorkerSnapshot> workers;
    std::uint64_t sent = 0, received = 0;
    Cost incumbent = kInfCost;
};

enum class TerminationDecision { Continue, Done, Unsolvable };

// condition on one sweep
TerminationDecision terminate_check(const GlobalSnapshot &s);
// two-phase: both sweeps satisfy the condition and nothing moved between them
TerminationDecision terminate_check(const GlobalSnapshot &first, const GlobalSnapshot &second);

ParallelResult hda_solve(const Domain &d, const DistributionStrategy &strategy, const EngineConfig &cfg);

}  // namespace hdastar
