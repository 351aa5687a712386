#include "hdastar/astar.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace hdastar {

std::unordered_map<PackedState, std::uint64_t, PackedStateHash> ExpansionTrace::ordinals() const {
    std::unordered_map<PackedState, std::uint64_t, PackedStateHash> m;
    m.reserve(rows.size());
    for (auto &r : rows)
        m.emplace(r.state, r.ordinal);
    return m;
}

void write_trace_csv(std::ostream &out, const ExpansionTrace &t) {
    out << "# tiebreak=" << (t.tiebreak ? to_string(*t.tiebreak) : "unknown")
        << " sampled=" << (t.sampled ? 1 : 0) << '\n';
    out << "ordinal,state_key,g,h,f\n";
    for (auto &r : t.rows)
        out << r.ordinal << ',' << r.state.key() << ',' << r.g << ',' << r.h << ',' << r.f() << '\n';
}

ExpansionTrace read_trace_csv(std::istream &in) {
    ExpansionTrace t;
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            auto p = line.find("tiebreak=");
            if (p != std::string::npos) {
                std::string v = line.substr(p + 9, 4);
                if (v == "lifo" || v == "fifo")
                    t.tiebreak = parse_tiebreak(v);
            }
            if (line.find("sampled=1") != std::string::npos)
                t.sampled = true;
            continue;
        }
        if (!header) {
            if (line != "ordinal,state_key,g,h,f")
                throw ParseError(lineno, "expected trace header 'ordinal,state_key,g,h,f'");
            header = true;
            continue;
        }
        std::istringstream ls(line);
        std::string a, k, g, h, f;
        if (!std::getline(ls, a, ',') || !std::getline(ls, k, ',') || !std::getline(ls, g, ',') ||
            !std::getline(ls, h, ',') || !std::getline(ls, f))
            throw ParseError(lineno, "trace row needs 5 columns");
        try {
            TraceRow r{std::stoull(a), PackedState::from_key(k), static_cast<Cost>(std::stoul(g)),
                       static_cast<Cost>(std::stoul(h))};
            if (r.f() != std::stoul(f))
                throw ParseError(lineno, "f != g + h");
            t.rows.push_back(r);
        } catch (const ParseError &) {
            throw;
        } catch (const std::exception &) {
            throw ParseError(lineno, "malformed trace row");
        }
    }
    if (!header)
        throw ParseError(lineno, "missing trace header");
    return t;
}

namespace {

struct Rec {
    Cost g;
    PackedState parent;
    bool has_parent;
    bool expanded;
};

}  // namespace

Solution astar_solve(const Domain &d, const SearchOptions &opt) {
    Solution sol;
    sol.trace.tiebreak = opt.tiebreak;
    OpenList open(opt.backend, opt.tiebreak);
    std::unordered_map<PackedState, Rec, PackedStateHash> recs;
    std::vector<Transition> succ;

    PackedState start = d.initial_state();
    recs.emplace(start, Rec{0, {}, false, false});
    open.push({start, 0, d.heuristic(start)});

    PackedState goal{};
    bool found = false;
    std::uint64_t ordinal = 0;
    while (!open.empty()) {
        if (found && open.min_f() > sol.cost)
            break;
        OpenEntry e = open.pop();
        auto &r = recs[e.state];
        if (e.g != r.g)
            continue;
        if (r.expanded)
            ++sol.reexpansions;
        else if (opt.record_trace)
            sol.trace.rows.push_back({++ordinal, e.state, e.g, e.f - e.g});
        r.expanded = true;
        ++sol.expansions;
        if (!found && d.is_goal(e.state)) {
            found = true;
            sol.cost = e.g;
            goal = e.state;
            if (!opt.continue_past_goal)
                break;
            continue;
        }
        d.successors(e.state, succ);
        for (auto &t : succ) {
            ++sol.generated;
            Cost g = e.g + t.cost;
            auto [it, fresh] = recs.try_emplace(t.state, Rec{g, e.state, true, false});
            if (!fresh) {
                if (g >= it->second.g)
                    continue;
                it->second.g = g;
                it->second.parent = e.state;
                it->second.has_parent = true;
            }
            open.push({t.state, g, g + d.heuristic(t.state)});
        }
        if (recs.size() > opt.node_budget)
            throw BudgetExceeded("node budget of " + std::to_string(opt.node_budget) + " exceeded");
    }
    if (!found)
        throw Unsolvable("open list exhausted without reaching a goal");

    for (PackedState s = goal;;) {
        sol.path.push_back(s);
        const auto &r = recs.at(s);
        if (!r.has_parent)
            break;
        s = r.parent;
    }
    std::reverse(sol.path.begin(), sol.path.end());
    return sol;
}

WorkloadGraph enumerate_workload_graph(const Domain &d, Cost f_star, std::uint64_t node_budget,
                                       const std::vector<PackedState> &known_goals) {
    WorkloadGraph wg;
    wg.f_star = f_star;
    OpenList open(Backend::Heap, TieBreak::FIFO);
    std::unordered_map<PackedState, Rec, PackedStateHash> recs;
    std::unordered_map<PackedState, std::uint32_t, PackedStateHash> index;
    std::vector<Transition> succ;

    auto add_node = [&](const PackedState &s, Cost g) {
        if (index.count(s))
            return;
        index.emplace(s, static_cast<std::uint32_t>(wg.nodes.size()));
        wg.nodes.push_back(s);
        wg.g.push_back(g);
        wg.h.push_back(d.heuristic(s));
        wg.goal.push_back(d.is_goal(s) ? 1 : 0);
        if (wg.nodes.size() > node_budget)
            throw BudgetExceeded("workload graph exceeds node cap");
    };

    PackedState start = d.initial_state();
    recs.emplace(start, Rec{0, {}, false, false});
    if (d.is_goal(start) && f_star == 0)
        add_node(start, 0);
    if (d.heuristic(start) < f_star)
        open.push({start, 0, d.heuristic(start)});
    while (!open.empty()) {
        OpenEntry e = open.pop();
        auto &r = recs[e.state];
        if (e.g != r.g || r.expanded)
            continue;
        r.expanded = true;
        add_node(e.state, e.g);
        d.successors(e.state, succ);
        for (auto &t : succ) {
            Cost g = e.g + t.cost;
            auto [it, fresh] = recs.try_emplace(t.state, Rec{g, e.state, true, false});
            if (!fresh) {
                if (g >= it->second.g)
                    continue;
                it->second.g = g;
            }
            Cost f = g + d.heuristic(t.state);
            if (f < f_star)
                open.push({t.state, g, f});
        }
        if (recs.size() > node_budget)
            throw BudgetExceeded("workload graph enumeration exceeds node cap");
    }
    // goals at optimal depth, sorted for a deterministic node order
    std::vector<PackedState> goals;
    for (auto &[s, r] : recs)
        if (r.g == f_star && d.is_goal(s))
            goals.push_back(s);
    for (auto &s : known_goals) {
        if (!d.is_goal(s))
            throw ConfigError("known goal is not a goal state");
        auto it = recs.find(s);
        if (it == recs.end() || it->second.g != f_star)
            goals.push_back(s);
    }
    std::sort(goals.begin(), goals.end());
    goals.erase(std::unique(goals.begin(), goals.end()), goals.end());
    for (auto &s : goals)
        add_node(s, f_star);

    std::unordered_set<std::uint64_t> seen;
    for (std::uint32_t i = 0; i < wg.nodes.size(); ++i) {
        d.successors(wg.nodes[i], succ);
        for (auto &t : succ) {
            auto it = index.find(t.state);
            if (it == index.end() || it->second == i)
                continue;
            std::uint32_t a = std::min(i, it->second), b = std::max(i, it->second);
            if (seen.insert((std::uint64_t(a) << 32) | b).second)
                wg.edges.push_back({a, b});
        }
    }
    std::sort(wg.edges.begin(), wg.edges.end());
    return wg;
}

void write_workload_graph(std::ostream &out, const WorkloadGraph &wg, const Domain &d) {
    out << "workload_graph v1\n";
    out << "nodes " << wg.nodes.size() << " edges " << wg.edges.size() << " fstar " << wg.f_star
        << " vars " << d.num_variables() << '\n';
    for (std::size_t i = 0; i < wg.nodes.size(); ++i) {
        out << "n " << wg.g[i] << ' ' << wg.h[i] << ' ' << int(wg.goal[i]);
        for (auto v : d.values(wg.nodes[i]))
            out << ' ' << v;
        out << '\n';
    }
    for (auto &[a, b] : wg.edges)
        out << "e " << a << ' ' << b << '\n';
}

WorkloadGraph read_workload_graph(std::istream &in, const Domain &d) {
    WorkloadGraph wg;
    std::string line, kw;
    int lineno = 1;
    if (!std::getline(in, line) || line != "workload_graph v1")
        throw ParseError(1, "not a workload graph file");
    std::size_t n, m, k;
    ++lineno;
    if (!std::getline(in, line))
        throw ParseError(lineno, "missing header");
    {
        std::istringstream ls(line);
        std::string a, b, c, e;
        if (!(ls >> a >> n >> b >> m >> c >> wg.f_star >> e >> k) || a != "nodes" || b != "edges" ||
            c != "fstar" || e != "vars")
            throw ParseError(lineno, "bad header");
        if (k != d.num_variables())
            throw ParseError(lineno, "variable count does not match the domain");
    }
    std::vector<Value> vals(k);
    for (std::size_t i = 0; i < n; ++i) {
        ++lineno;
        if (!std::getline(in, line))
            throw ParseError(lineno, "truncated node list");
        std::istringstream ls(line);
        Cost g, h;
        int goal;
        if (!(ls >> kw >> g >> h >> goal) || kw != "n")
            throw ParseError(lineno, "bad node line");
        for (std::size_t v = 0; v < k; ++v) {
            unsigned x;
            if (!(ls >> x) || x >= d.domain_sizes()[v])
                throw ParseError(lineno, "bad node value");
            vals[v] = static_cast<Value>(x);
        }
        wg.nodes.push_back(d.codec().pack(vals));
        wg.g.push_back(g);
        wg.h.push_back(h);
        wg.goal.push_back(static_cast<std::uint8_t>(goal != 0));
    }
    for (std::size_t i = 0; i < m; ++i) {
        ++lineno;
        if (!std::getline(in, line))
            throw ParseError(lineno, "truncated edge list");
        std::istringstream ls(line);
        std::uint32_t a, b;
        if (!(ls >> kw >> a >> b) || kw != "e" || a >= n || b >= n)
            throw ParseError(lineno, "bad edge line");
        wg.edges.push_back({std::min(a, b), std::max(a, b)});
    }
    return wg;
}

}  // namespace hdastar
