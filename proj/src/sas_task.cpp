#include "hdastar/sas_task.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace hdastar {

int SasTask::find_variable(const std::string &name) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
        if (variables[i].name == name)
            return static_cast<int>(i);
    return -1;
}

namespace {

std::vector<std::string> tokens(const std::string &line) {
    std::istringstream in(line);
    std::vector<std::string> t;
    std::string s;
    while (in >> s)
        t.push_back(s);
    return t;
}

long parse_int(const std::string &s, int line, const char *what) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception &) {
        throw ParseError(line, std::string("expected integer ") + what + ", got '" + s + "'");
    }
}

}  // namespace

SasTask parse_sas(const std::string &text) {
    SasTask task;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<int> init(0);
    SasOperator *cur = nullptr;
    std::map<std::uint32_t, SasEffect> cur_eff;
    std::vector<bool> goal_seen;

    auto var_of = [&](const std::string &name) {
        int v = task.find_variable(name);
        if (v < 0)
            throw ParseError(lineno, "unknown variable '" + name + "'");
        return static_cast<std::uint32_t>(v);
    };
    auto value_of = [&](std::uint32_t var, const std::string &s) {
        long v = parse_int(s, lineno, "value");
        if (v < 0 || v >= static_cast<long>(task.variables[var].size))
            throw ParseError(lineno, "value " + s + " outside domain of '" + task.variables[var].name + "'");
        return static_cast<int>(v);
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto t = tokens(line);
        if (t.empty() || t[0][0] == ';' || t[0][0] == '#')
            continue;
        const std::string &kw = t[0];
        if (cur) {
            if (kw == "end") {
                if (t.size() != 1)
                    throw ParseError(lineno, "trailing tokens after 'end'");
                for (auto &[v, e] : cur_eff)
                    cur->effects.push_back(e);
                cur_eff.clear();
                cur = nullptr;
            } else if (kw == "pre" || kw == "post") {
                if (t.size() != 3)
                    throw ParseError(lineno, "expected '" + kw + " <var> <val>'");
                auto v = var_of(t[1]);
                auto it = cur_eff.try_emplace(v, SasEffect{v, -1, -1}).first;
                if (kw == "pre") {
                    if (it->second.pre >= 0)
                        throw ParseError(lineno, "duplicate pre for '" + t[1] + "'");
                    if (t[2] != "*")
                        it->second.pre = value_of(v, t[2]);
                } else {
                    if (t[2] == "*")
                        throw ParseError(lineno, "post value cannot be '*'");
                    if (it->second.post >= 0)
                        throw ParseError(lineno, "duplicate post for '" + t[1] + "'");
                    it->second.post = value_of(v, t[2]);
                }
            } else {
                throw ParseError(lineno, "unexpected '" + kw + "' inside operator (missing 'end'?)");
            }
            continue;
        }
        if (kw == "var") {
            if (t.size() != 3)
                throw ParseError(lineno, "expected 'var <name> <k>'");
            if (!task.operators.empty())
                throw ParseError(lineno, "variables must precede operators");
            if (task.find_variable(t[1]) >= 0)
                throw ParseError(lineno, "duplicate variable '" + t[1] + "'");
            long k = parse_int(t[2], lineno, "domain size");
            if (k < 1 || k > 65535)
                throw ParseError(lineno, "domain size out of range");
            task.variables.push_back({t[1], static_cast<std::uint32_t>(k)});
            init.push_back(-1);
            goal_seen.push_back(false);
        } else if (kw == "op") {
            if (t.size() != 2 && t.size() != 3)
                throw ParseError(lineno, "expected 'op <name> <cost>'");
            long c = t.size() == 3 ? parse_int(t[2], lineno, "cost") : 1;
            if (c < 0)
                throw ParseError(lineno, "negative operator cost");
            task.operators.push_back({t[1], static_cast<Cost>(c), {}});
            cur = &task.operators.back();
        } else if (kw == "init" || kw == "goal") {
            if (t.size() != 3)
                throw ParseError(lineno, "expected '" + kw + " <var> <val>'");
            auto v = var_of(t[1]);
            int val = value_of(v, t[2]);
            if (kw == "init") {
                if (init[v] >= 0)
                    throw ParseError(lineno, "duplicate init for '" + t[1] + "'");
                init[v] = val;
            } else {
                if (goal_seen[v])
                    throw ParseError(lineno, "duplicate goal for '" + t[1] + "'");
                goal_seen[v] = true;
                task.goal.push_back({v, static_cast<Value>(val)});
            }
        } else if (kw == "flag") {
            if (t.size() != 2 || t[1] != "single_effect")
                throw ParseError(lineno, "unknown flag");
            task.single_effect = true;
        } else {
            throw ParseError(lineno, "unknown directive '" + kw + "'");
        }
    }
    if (cur)
        throw ParseError(lineno, "operator '" + cur->name + "' not terminated by 'end'");
    for (std::size_t v = 0; v < init.size(); ++v) {
        if (init[v] < 0)
            throw ParseError(lineno, "no init value for '" + task.variables[v].name + "'");
        task.init.push_back(static_cast<Value>(init[v]));
    }
    if (task.single_effect) {
        for (auto &op : task.operators) {
            int n = 0;
            for (auto &e : op.effects)
                n += e.post >= 0;
            if (n > 1)
                throw ParseError(lineno, "flag single_effect violated by operator '" + op.name + "'");
        }
    }
    std::sort(task.goal.begin(), task.goal.end());
    return task;
}

std::string serialize_sas(const SasTask &task) {
    std::ostringstream o;
    for (auto &v : task.variables)
        o << "var " << v.name << ' ' << v.size << '\n';
    if (task.single_effect)
        o << "flag single_effect\n";
    for (auto &op : task.operators) {
        o << "op " << op.name << ' ' << op.cost << '\n';
        for (auto &e : op.effects) {
            const auto &n = task.variables[e.var].name;
            if (e.pre >= 0 || e.post < 0)
                o << "  pre " << n << ' ' << (e.pre >= 0 ? std::to_string(e.pre) : "*") << '\n';
            if (e.post >= 0)
                o << "  post " << n << ' ' << e.post << '\n';
        }
        o << "end\n";
    }
    for (std::size_t v = 0; v < task.variables.size(); ++v)
        o << "init " << task.variables[v].name << ' ' << task.init[v] << '\n';
    for (auto &[v, val] : task.goal)
        o << "goal " << task.variables[v].name << ' ' << val << '\n';
    return o.str();
}

SasDomain::SasDomain(SasTask task, SasHeuristic h) : task_(std::move(task)), heur_(h) {
    if (heur_ == SasHeuristic::GoalCount && !task_.single_effect)
        throw ConfigError("goal-count heuristic needs a task flagged single_effect");
    for (auto &v : task_.variables) {
        sizes_.push_back(v.size);
        names_.push_back(v.name);
    }
    codec_ = StateCodec(sizes_);
    init_ = codec_.pack(task_.init);
    by_pre_.resize(sizes_.size());
    for (std::size_t v = 0; v < sizes_.size(); ++v)
        by_pre_[v].resize(sizes_[v]);
    for (std::uint32_t i = 0; i < task_.operators.size(); ++i) {
        const auto &op = task_.operators[i];
        auto it = std::find_if(op.effects.begin(), op.effects.end(), [](auto &e) { return e.pre >= 0; });
        if (it == op.effects.end())
            unconstrained_.push_back(i);
        else
            by_pre_[it->var][it->pre].push_back(i);
    }
}

bool SasDomain::is_goal(const PackedState &s) const {
    for (auto &[v, val] : task_.goal)
        if (codec_.get(s, v) != val)
            return false;
    return true;
}

Cost SasDomain::heuristic(const PackedState &s) const {
    if (heur_ == SasHeuristic::Blind)
        return 0;
    Cost h = 0;
    for (auto &[v, val] : task_.goal)
        h += codec_.get(s, v) != val;
    return h;
}

std::vector<std::uint32_t> SasDomain::applicable(const PackedState &s) const {
    std::vector<std::uint32_t> ops;
    auto check = [&](std::uint32_t i) {
        for (auto &e : task_.operators[i].effects)
            if (e.pre >= 0 && codec_.get(s, e.var) != e.pre)
                return;
        ops.push_back(i);
    };
    for (std::size_t v = 0; v < sizes_.size(); ++v)
        for (auto i : by_pre_[v][codec_.get(s, v)])
            check(i);
    for (auto i : unconstrained_)
        check(i);
    std::sort(ops.begin(), ops.end());
    return ops;
}

void SasDomain::successors(const PackedState &s, std::vector<Transition> &out) const {
    out.clear();
    for (auto i : applicable(s)) {
        const auto &op = task_.operators[i];
        PackedState c = s;
        for (auto &e : op.effects)
            if (e.post >= 0)
                codec_.set(c, e.var, static_cast<Value>(e.post));
        out.push_back({c, op.cost});
    }
}

double DomainTransitionGraph::total_weight() const {
    double w = 0;
    for (auto &e : edges)
        w += weight(e);
    return w;
}

std::uint64_t DomainTransitionGraph::total_count() const {
    std::uint64_t c = 0;
    for (auto &e : edges)
        c += e.count;
    return c;
}

DomainTransitionGraph extract_dtg(const SasTask &task, std::uint32_t var) {
    if (var >= task.variables.size())
        throw ConfigError("variable index out of range");
    DomainTransitionGraph g;
    g.var = var;
    g.num_vertices = task.variables[var].size;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> cnt;
    for (auto &op : task.operators) {
        for (auto &e : op.effects) {
            if (e.var != var || e.post < 0)
                continue;
            ++g.affecting_operators;
            std::uint64_t contributed = 0;
            auto add = [&](std::uint32_t u, std::uint32_t v) {
                if (u == v)
                    return;
                ++cnt[{std::min(u, v), std::max(u, v)}];
                ++contributed;
            };
            if (e.pre >= 0)
                add(e.pre, e.post);
            else
                for (std::uint32_t u = 0; u < g.num_vertices; ++u)
                    add(u, e.post);
            // an any-pre operator is one transition per source value, so it
            // counts that many times in the denominator as well
            g.denominator += std::max<std::uint64_t>(1, contributed);
        }
    }
    for (auto &[k, c] : cnt)
        g.edges.push_back({k.first, k.second, c});
    return g;
}

}  // namespace hdastar
