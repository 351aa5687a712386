#pragma once

#include "hdastar/domain.hpp"
#include "hdastar/open_list.hpp"

#include <iosfwd>
#include <optional>
#include <unordered_map>

namespace hdastar {

struct TraceRow {
    std::uint64_t ordinal;  // 1-based, first expansion only
    PackedState state;
    Cost g, h;
    Cost f() const { return g + h; }
};

struct ExpansionTrace {
    std::optional<TieBreak> tiebreak;
    std::vector<TraceRow> rows;  // ordered by ordinal
    bool sampled = false;        // buffer overflowed, rows are a sample

    std::unordered_map<PackedState, std::uint64_t, PackedStateHash> ordinals() const;
};

void write_trace_csv(std::ostream &out, const ExpansionTrace &t);
ExpansionTrace read_trace_csv(std::istream &in);

struct SearchOptions {
    TieBreak tiebreak = TieBreak::LIFO;
    Backend backend = Backend::Bucket;
    bool continue_past_goal = false;
    bool record_trace = false;
    std::uint64_t node_budget = 50'000'000;
};

struct Solution {
    Cost cost = kInfCost;
    std::vector<PackedState> path;  // start .. goal
    std::uint64_t expansions = 0;   // pops that were expanded, incl. the goal pop
    std::uint64_t generated = 0;
    std::uint64_t reexpansions = 0;
    ExpansionTrace trace;
};

// Sequential A*. Throws Unsolvable or BudgetExceeded.
Solution astar_solve(const Domain &d, const SearchOptions &opt = {});

struct WorkloadGraph {
    Cost f_star = 0;
    std::vector<PackedState> nodes;
    std::vector<Cost> g, h;
    std::vector<std::uint8_t> goal;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // first < second

    std::size_t size() const { return nodes.size(); }
};

// All states with f < f_star plus the goal states at g = f_star, and the
// undirected edges between them. Goals are those generated from expanded
// states plus `known_goals` (e.g. the end of an optimal path), since a goal
// whose predecessors all have f = f_star is never generated.
WorkloadGraph enumerate_workload_graph(const Domain &d, Cost f_star,
                                       std::uint64_t node_budget = 50'000'000,
                                       const std::vector<PackedState> &known_goals = {});

void write_workload_graph(std::ostream &out, const WorkloadGraph &wg, const Domain &d);
WorkloadGraph read_workload_graph(std::istream &in, const Domain &d);

}  // namespace hdastar
