#include "hdastar/engine.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <random>
#include <thread>

namespace hdastar {

Executor parse_executor(const std::string &s) {
    if (s == "threads")
        return Executor::Threads;
    if (s == "simulated" || s == "sim")
        return Executor::Simulated;
    throw ConfigError("unknown executor '" + s + "' (threads|simulated)");
}

const char *to_string(Executor e) { return e == Executor::Threads ? "threads" : "simulated"; }

std::uint64_t OverheadReport::total(std::uint64_t WorkerStats::*field) const {
    std::uint64_t t = 0;
    for (auto &w : workers)
        t += w.*field;
    return t;
}

void SearchShared::offer_solution(Cost g, const PackedState &goal, std::uint32_t worker) {
    std::lock_guard lock(witness_mutex);
    Cost cur = incumbent.load();
    if (g >= cur)
        return;
    witness_goal = goal;
    witness_worker = worker;
    incumbent.store(g);
}

WorkerCore::WorkerCore(std::uint32_t id, SearchShared &shared)
    : id_(id), sh_(shared), open_(shared.cfg.backend, shared.cfg.tiebreak), out_(shared.cfg.p),
      vals_(shared.domain.num_variables()),
      trace_cap_(std::max<std::size_t>(1, shared.cfg.trace_capacity / std::max(1u, shared.cfg.p))) {}

bool WorkerCore::accept(const NodeMessage &m) {
    if (m.g + m.h >= sh_.incumbent.load(std::memory_order_relaxed)) {
        ++stats_.pruned;
        return false;
    }
    auto [it, fresh] = recs_.try_emplace(m.state, Rec{m.g, m.parent, m.has_parent, false});
    if (!fresh) {
        if (m.g >= it->second.g) {
            ++stats_.duplicates;
            return false;
        }
        it->second.g = m.g;
        it->second.parent = m.parent;
        it->second.has_parent = m.has_parent;
    } else if (recs_.size() > sh_.cfg.memory_budget) {
        throw MemoryExhausted("worker " + std::to_string(id_) + " exceeded its budget of " +
                              std::to_string(sh_.cfg.memory_budget) + " states");
    }
    open_.push({m.state, m.g, m.g + m.h});
    ++stats_.inserted;
    stats_.max_open = std::max<std::uint64_t>(stats_.max_open, open_.size());
    return true;
}

std::size_t WorkerCore::drain(const std::vector<NodeMessage> &batch) {
    std::size_t n = 0;
    stats_.received += batch.size();
    for (auto &m : batch)
        n += accept(m);
    return n;
}

bool WorkerCore::has_work() {
    while (!open_.empty()) {
        if (open_.min_f() >= sh_.incumbent.load(std::memory_order_relaxed))
            return false;
        const OpenEntry &e = open_.top();
        if (e.g == recs_.at(e.state).g)
            return true;
        open_.pop();
    }
    return false;
}

bool WorkerCore::step(BatchSink &sink) {
    const Domain &d = sh_.domain;
    for (;;) {
        if (open_.empty())
            return false;
        if (open_.min_f() >= sh_.incumbent.load(std::memory_order_relaxed))
            return false;
        OpenEntry e = open_.pop();
        auto &r = recs_.at(e.state);
        if (e.g != r.g)
            continue;  // superseded by a cheaper copy

        ++stats_.expanded;
        if (r.expanded) {
            ++stats_.reexpanded;
        } else if (sh_.cfg.record_trace) {
            std::uint64_t ord = sh_.next_ordinal.fetch_add(1);
            if (ord % trace_stride_ == 0) {
                trace_.push_back({ord, e.state, e.g, e.f - e.g});
                if (trace_.size() >= trace_cap_) {
                    trace_stride_ *= 2;
                    std::erase_if(trace_, [&](const TraceRow &t) { return t.ordinal % trace_stride_ != 0; });
                }
            }
        }
        r.expanded = true;

        if (d.is_goal(e.state)) {
            sh_.offer_solution(e.g, e.state, id_);
            return true;
        }
        d.successors(e.state, succ_);
        for (auto &t : succ_) {
            ++stats_.generated;
            NodeMessage m{t.state, e.state, e.g + t.cost, d.heuristic(t.state), true};
            d.codec().unpack(t.state, vals_);
            std::uint32_t dest = sh_.strategy.owner(vals_, sh_.cfg.p);
            if (dest == id_) {
                accept(m);
            } else {
                ++stats_.sent;
                out_[dest].push_back(m);
                if (out_[dest].size() >= sh_.cfg.batch)
                    flush(sink, dest);
            }
        }
        return true;
    }
}

void WorkerCore::flush(BatchSink &sink, std::uint32_t dest) {
    if (out_[dest].empty())
        return;
    std::vector<NodeMessage> b;
    b.reserve(sh_.cfg.batch);
    std::swap(b, out_[dest]);
    sink.send(id_, dest, std::move(b));
}

bool WorkerCore::flush_all(BatchSink &sink) {
    bool any = false;
    for (std::uint32_t i = 0; i < out_.size(); ++i) {
        any |= !out_[i].empty();
        flush(sink, i);
    }
    return any;
}

bool WorkerCore::has_outgoing() const {
    for (auto &o : out_)
        if (!o.empty())
            return true;
    return false;
}

TerminationDecision terminate_check(const GlobalSnapshot &s) {
    if (s.sent != s.received)
        return TerminationDecision::Continue;
    bool all_empty = true;
    for (auto &w : s.workers) {
        if (!w.idle || w.mailbox_pending != 0 || w.open_min_f < s.incumbent)
            return TerminationDecision::Continue;
        all_empty &= w.open_min_f == kInfCost;
    }
    if (s.incumbent == kInfCost)
        return all_empty ? TerminationDecision::Unsolvable : TerminationDecision::Continue;
    return TerminationDecision::Done;
}

TerminationDecision terminate_check(const GlobalSnapshot &first, const GlobalSnapshot &second) {
    auto a = terminate_check(first);
    if (a == TerminationDecision::Continue || terminate_check(second) != a)
        return TerminationDecision::Continue;
    if (first.sent != second.sent || first.received != second.received ||
        first.workers.size() != second.workers.size())
        return TerminationDecision::Continue;
    for (std::size_t i = 0; i < first.workers.size(); ++i)
        if (first.workers[i].epoch != second.workers[i].epoch)
            return TerminationDecision::Continue;
    return a;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Mailbox {
    std::mutex m;
    std::vector<std::vector<NodeMessage>> q;
    std::atomic<std::uint64_t> pending{0};
};

struct ThreadState {
    std::vector<Mailbox> boxes;
    std::vector<std::atomic<bool>> idle;
    std::vector<std::atomic<std::uint64_t>> epoch;
    std::vector<std::atomic<Cost>> min_f;
    std::atomic<std::uint64_t> enqueued{0}, drained{0};
    std::atomic<bool> done{false}, abort{false};
    std::atomic<int> outcome{0};  // TerminationDecision
    std::mutex detector;

    explicit ThreadState(std::uint32_t p) : boxes(p), idle(p), epoch(p), min_f(p) {
        for (std::uint32_t i = 0; i < p; ++i) {
            idle[i] = false;
            epoch[i] = 0;
            min_f[i] = kInfCost;
        }
    }

    GlobalSnapshot snapshot(const SearchShared &sh) {
        GlobalSnapshot s;
        for (std::size_t i = 0; i < boxes.size(); ++i)
            s.workers.push_back({idle[i].load(), epoch[i].load(), min_f[i].load(), boxes[i].pending.load()});
        s.sent = enqueued.load();
        s.received = drained.load();
        s.incumbent = sh.incumbent.load();
        return s;
    }
};

class ThreadSink final : public BatchSink {
public:
    ThreadSink(ThreadState &ts, const FaultInjection &f, std::uint32_t p) : ts_(ts), f_(f) {
        for (std::uint32_t i = 0; i < p; ++i)
            rng_.emplace_back(f.seed * 0x9e3779b97f4a7c15ULL + i);
    }
    void send(std::uint32_t from, std::uint32_t to, std::vector<NodeMessage> &&batch) override {
        if (f_.enabled) {
            auto &r = rng_[from];
            if (std::bernoulli_distribution(f_.delay_probability)(r)) {
                auto us = std::uniform_int_distribution<std::uint32_t>(0, f_.max_delay_us)(r);
                std::this_thread::sleep_for(std::chrono::microseconds(us));
            }
        }
        std::uint64_t n = batch.size();
        ts_.enqueued.fetch_add(n);
        auto &box = ts_.boxes[to];
        {
            std::lock_guard lock(box.m);
            box.q.push_back(std::move(batch));
        }
        box.pending.fetch_add(n);
    }

private:
    ThreadState &ts_;
    FaultInjection f_;
    std::vector<std::mt19937_64> rng_;  // one per sending worker
};

void run_threads(SearchShared &sh, std::vector<std::unique_ptr<WorkerCore>> &cores,
                 std::string &reason) {
    const auto &cfg = sh.cfg;
    std::uint32_t p = cfg.p;
    ThreadState ts(p);
    ThreadSink sink(ts, cfg.faults, p);
    std::vector<std::exception_ptr> errors(p);
    auto flush_every = std::chrono::duration<double, std::milli>(cfg.flush_interval_ms);

    auto body = [&](std::uint32_t i) {
        auto &w = *cores[i];
        auto &box = ts.boxes[i];
        std::vector<std::vector<NodeMessage>> inbox;
        auto last_flush = Clock::now();
        std::uint64_t steps = 0;
        unsigned idle_rounds = 0;
        try {
            while (!ts.done.load(std::memory_order_relaxed) && !ts.abort.load(std::memory_order_relaxed)) {
                if (box.pending.load() > 0) {
                    ts.idle[i].store(false);
                    ts.epoch[i].fetch_add(1);
                    {
                        std::lock_guard lock(box.m);
                        std::swap(inbox, box.q);
                    }
                    std::uint64_t n = 0;
                    for (auto &b : inbox)
                        n += b.size();
                    box.pending.fetch_sub(n);
                    for (auto &b : inbox)
                        w.drain(b);
                    inbox.clear();
                    ts.drained.fetch_add(n);
                }
                if (w.step(sink)) {
                    ts.idle[i].store(false, std::memory_order_relaxed);
                    ts.epoch[i].fetch_add(1, std::memory_order_relaxed);
                    idle_rounds = 0;
                    if ((++steps & 63) == 0 && Clock::now() - last_flush > flush_every) {
                        w.flush_all(sink);
                        last_flush = Clock::now();
                    }
                    continue;
                }
                if (w.flush_all(sink))
                    last_flush = Clock::now();
                if (box.pending.load() > 0)
                    continue;
                ts.min_f[i].store(w.open_min_f());
                ts.idle[i].store(true);
                if (ts.detector.try_lock()) {
                    auto a = ts.snapshot(sh);
                    auto b = ts.snapshot(sh);
                    auto dec = terminate_check(a, b);
                    if (dec != TerminationDecision::Continue) {
                        ts.outcome.store(static_cast<int>(dec));
                        ts.done.store(true);
                    }
                    ts.detector.unlock();
                }
                if (++idle_rounds < 64)
                    std::this_thread::yield();
                else
                    std::this_thread::sleep_for(std::chrono::microseconds(50));
            }
        } catch (...) {
            errors[i] = std::current_exception();
            ts.abort.store(true);
        }
    };

    if (p == 1) {
        body(0);
    } else {
        std::vector<std::jthread> threads;
        for (std::uint32_t i = 0; i < p; ++i)
            threads.emplace_back(body, i);
    }

    for (std::uint32_t i = 0; i < p; ++i) {
        if (!errors[i])
            continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const MemoryExhausted &) {
            reason = "memory_exhausted";
            return;
        } catch (const std::exception &e) {
            throw EngineError("worker " + std::to_string(i) + " failed: " + e.what());
        }
    }
    reason = ts.outcome.load() == static_cast<int>(TerminationDecision::Unsolvable) ? "unsolvable" : "optimal";
}

// Discrete-event execution of the same workers on p virtual processors.
class SimSink final : public BatchSink {
public:
    struct Event {
        double arrival;
        std::uint64_t seq;
        std::uint32_t to;
        std::vector<NodeMessage> batch;
    };
    SimSink(const SimCosts &c, std::vector<double> &clock) : c_(c), clock_(clock) {}

    void send(std::uint32_t from, std::uint32_t to, std::vector<NodeMessage> &&batch) override {
        clock_[from] += c_.send_per_message + c_.send_per_node * double(batch.size());
        enqueued += batch.size();
        pending_.push_back({clock_[from] + c_.latency, seq_++, to, std::move(batch)});
    }

    // earliest arrival for `to`, or infinity
    double next_arrival(std::uint32_t to) const {
        double t = std::numeric_limits<double>::infinity();
        for (auto &e : pending_)
            if (e.to == to)
                t = std::min(t, e.arrival);
        return t;
    }
    bool any_pending() const { return !pending_.empty(); }

    // remove and return events for `to` that arrived by time t, in arrival order
    std::vector<Event> take(std::uint32_t to, double t) {
        std::vector<Event> got;
        for (std::size_t i = 0; i < pending_.size();) {
            if (pending_[i].to == to && pending_[i].arrival <= t) {
                got.push_back(std::move(pending_[i]));
                pending_[i] = std::move(pending_.back());
                pending_.pop_back();
            } else {
                ++i;
            }
        }
        std::sort(got.begin(), got.end(), [](auto &a, auto &b) {
            return a.arrival != b.arrival ? a.arrival < b.arrival : a.seq < b.seq;
        });
        return got;
    }

    std::uint64_t enqueued = 0;

private:
    const SimCosts &c_;
    std::vector<double> &clock_;
    std::vector<Event> pending_;
    std::uint64_t seq_ = 0;
};

double run_simulated(SearchShared &sh, std::vector<std::unique_ptr<WorkerCore>> &cores,
                     std::string &reason, std::uint64_t &enq, std::uint64_t &drn) {
    const auto &c = sh.cfg.sim;
    std::uint32_t p = sh.cfg.p;
    std::vector<double> clock(p, 0.0), last_flush(p, 0.0);
    SimSink sink(c, clock);
    const double inf = std::numeric_limits<double>::infinity();
    std::uint64_t drained = 0;
    try {
        for (;;) {
            // next worker to act: ready ones at their clock, waiting ones at next arrival
            std::uint32_t who = p;
            double when = inf;
            for (std::uint32_t i = 0; i < p; ++i) {
                double t = cores[i]->has_work() || cores[i]->has_outgoing() ? clock[i]
                                                                             : std::max(clock[i], sink.next_arrival(i));
                double arr = sink.next_arrival(i);
                if (arr <= clock[i])
                    t = clock[i];
                if (t < when) {
                    when = t;
                    who = i;
                }
            }
            if (who == p)
                break;
            auto &w = *cores[who];
            clock[who] = when;
            for (auto &ev : sink.take(who, clock[who])) {
                clock[who] += c.receive_per_node * double(ev.batch.size());
                w.drain(ev.batch);
                drained += ev.batch.size();
            }
            if (w.step(sink)) {
                clock[who] += c.expand;
                if (clock[who] - last_flush[who] >= c.flush_interval) {
                    w.flush_all(sink);
                    last_flush[who] = clock[who];
                }
            } else if (w.flush_all(sink)) {
                last_flush[who] = clock[who];
            }
        }
    } catch (const MemoryExhausted &) {
        reason = "memory_exhausted";
        enq = sink.enqueued;
        drn = drained;
        return *std::max_element(clock.begin(), clock.end());
    }
    enq = sink.enqueued;
    drn = drained;
    reason = sh.incumbent.load() == kInfCost ? "unsolvable" : "optimal";
    return *std::max_element(clock.begin(), clock.end());
}

}  // namespace

ParallelResult hda_solve(const Domain &d, const DistributionStrategy &strategy, const EngineConfig &cfg) {
    if (cfg.p < 1)
        throw ConfigError("p must be >= 1");
    if (cfg.batch < 1)
        throw ConfigError("batch must be >= 1");
    auto t0 = Clock::now();
    SearchShared sh(d, strategy, cfg);
    std::vector<std::unique_ptr<WorkerCore>> cores;
    for (std::uint32_t i = 0; i < cfg.p; ++i)
        cores.push_back(std::make_unique<WorkerCore>(i, sh));

    PackedState root = d.initial_state();
    auto rv = d.values(root);
    std::uint32_t root_owner = strategy.owner(rv, cfg.p);

    ParallelResult res;
    auto &rep = res.report;
    rep.strategy = strategy.name();
    rep.p = cfg.p;
    rep.seed = cfg.seed;
    rep.executor = cfg.executor;

    std::string reason;
    try {
        cores[root_owner]->accept({root, {}, 0, d.heuristic(root), false});
    } catch (const MemoryExhausted &) {
        reason = "memory_exhausted";
    }
    if (reason.empty()) {
        if (cfg.executor == Executor::Threads) {
            run_threads(sh, cores, reason);
            rep.enqueued = rep.drained = 0;
        } else {
            rep.virtual_time = run_simulated(sh, cores, reason, rep.enqueued, rep.drained);
        }
    }
    rep.walltime_ms = ms_since(t0);
    rep.terminated_reason = reason;

    for (auto &c : cores)
        rep.workers.push_back(c->stats());
    rep.workers[root_owner].seeded = 1;
    if (cfg.executor == Executor::Threads) {
        rep.enqueued = rep.total(&WorkerStats::sent);
        rep.drained = rep.total(&WorkerStats::received);
    }
    std::uint64_t gen = rep.total(&WorkerStats::generated), exp = rep.total(&WorkerStats::expanded);
    rep.CO = gen ? double(rep.total(&WorkerStats::sent)) / double(gen) : 0.0;
    std::uint64_t mx = 0;
    for (auto &w : rep.workers)
        mx = std::max(mx, w.expanded);
    rep.LB = exp ? double(mx * cfg.p) / double(exp) : 1.0;
    if (cfg.sequential_expansions && *cfg.sequential_expansions > 0) {
        rep.SO = double(exp) / double(*cfg.sequential_expansions) - 1.0;
        if (cfg.executor == Executor::Simulated && rep.virtual_time > 0)
            rep.virtual_speedup = double(*cfg.sequential_expansions) * cfg.sim.expand / rep.virtual_time;
    }
    if (cfg.sequential_walltime_ms && rep.walltime_ms > 0)
        rep.speedup_vs_astar = *cfg.sequential_walltime_ms / rep.walltime_ms;
    if (cfg.p1_walltime_ms && rep.walltime_ms > 0)
        rep.speedup_vs_p1 = *cfg.p1_walltime_ms / rep.walltime_ms;

    auto &sol = res.solution;
    sol.expansions = exp;
    sol.generated = gen;
    sol.reexpansions = rep.total(&WorkerStats::reexpanded);
    sol.cost = reason == "optimal" ? sh.incumbent.load() : kInfCost;
    rep.cost = sol.cost;

    if (reason == "optimal") {
        std::vector<Value> vals(d.num_variables());
        PackedState s = sh.witness_goal;
        std::size_t limit = 0;
        for (auto &c : cores)
            limit += c->records().size();
        for (std::size_t k = 0; k <= limit; ++k) {
            sol.path.push_back(s);
            d.codec().unpack(s, vals);
            const auto &r = cores[strategy.owner(vals, cfg.p)]->records().at(s);
            if (!r.has_parent)
                break;
            s = r.parent;
        }
        std::reverse(sol.path.begin(), sol.path.end());
    }

    if (cfg.record_trace) {
        sol.trace.tiebreak = cfg.tiebreak;
        for (auto &c : cores) {
            auto &rows = c->trace_rows();
            sol.trace.rows.insert(sol.trace.rows.end(), rows.begin(), rows.end());
            rep.trace_sampled |= c->trace_sampled();
        }
        std::sort(sol.trace.rows.begin(), sol.trace.rows.end(),
                  [](auto &a, auto &b) { return a.ordinal < b.ordinal; });
        sol.trace.sampled = rep.trace_sampled;
    }
    return res;
}

}  // namespace hdastar
