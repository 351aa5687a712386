#include "hdastar/feature_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hdastar {

double DtgPartition::sparsity(std::uint32_t n) const {
    if (cut_weight == 0)
        return std::numeric_limits<double>::infinity();
    return (double(s1) / n) * (double(s2) / n) / cut_weight;
}

const char *to_string(PartitionObjective o) { return o == PartitionObjective::Sparsity ? "sparsity" : "co_lb"; }

namespace {

void finish(const DomainTransitionGraph &g, DtgPartition &p) {
    p.s1 = p.s2 = 0;
    for (auto s : p.side)
        (s ? p.s2 : p.s1)++;
    p.cut_count = 0;
    for (auto &e : g.edges)
        if (p.side[e.a] != p.side[e.b])
            p.cut_count += e.count;
    p.cut_weight = g.denominator ? double(p.cut_count) / double(g.denominator) : 0.0;
}

}  // namespace

DtgPartition greedy_afg(const DomainTransitionGraph &g) {
    std::uint32_t n = g.num_vertices;
    DtgPartition p;
    p.side.assign(n, 1);
    if (n == 0)
        throw ConfigError("DTG without vertices");
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (auto &e : g.edges) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    std::uint32_t seed = 0;
    for (std::uint32_t v = 1; v < n; ++v)
        if (adj[v].size() < adj[seed].size())
            seed = v;
    p.side[seed] = 0;
    std::uint32_t in_s1 = 1;
    std::vector<std::uint32_t> links(n, 0);  // edges into S1
    for (auto u : adj[seed])
        ++links[u];
    while (2 * in_s1 < n) {
        int best = -1;
        for (std::uint32_t v = 0; v < n; ++v)
            if (p.side[v] && (best < 0 || links[v] > links[best]))
                best = static_cast<int>(v);
        p.side[best] = 0;
        ++in_s1;
        for (auto u : adj[best])
            ++links[u];
    }
    p.degenerate = n < 2;
    finish(g, p);
    return p;
}

double fluency(const SasTask &task, std::uint32_t var) {
    if (task.operators.empty())
        throw ConfigError("fluency undefined for a task without operators");
    std::size_t changing = 0;
    for (auto &op : task.operators)
        for (auto &e : op.effects)
            if (e.var == var && e.post >= 0 && e.pre != e.post)
                ++changing;
    return double(changing) / double(task.operators.size());
}

std::vector<std::uint32_t> fluency_filter(const SasTask &task, double fraction) {
    std::uint32_t n = static_cast<std::uint32_t>(task.variables.size());
    std::size_t drop = static_cast<std::size_t>(std::floor(fraction * n + 1e-9));
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (drop == 0)
        return order;
    std::vector<double> fl(n);
    for (std::uint32_t v = 0; v < n; ++v)
        fl[v] = fluency(task, v);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fl[a] > fl[b]; });
    std::vector<std::uint32_t> kept(order.begin() + std::min<std::size_t>(drop, n), order.end());
    std::sort(kept.begin(), kept.end());
    return kept;
}

namespace {

using i128 = __int128;

struct Score {
    // sparsity: num / den, den == 0 is +inf.  co_lb: num only, lower is better
    std::uint64_t num = 0, den = 0;
};

class BranchAndBound {
public:
    BranchAndBound(const DomainTransitionGraph &g, PartitionObjective obj) : g_(g), obj_(obj) {
        n_ = g.num_vertices;
        adj_.resize(n_);
        std::vector<std::uint64_t> wdeg(n_, 0);
        for (auto &e : g.edges) {
            adj_[e.a].push_back({e.b, e.count});
            adj_[e.b].push_back({e.a, e.count});
            wdeg[e.a] += e.count;
            wdeg[e.b] += e.count;
            total_ += e.count;
        }
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(), [&](auto a, auto b) { return wdeg[a] > wdeg[b]; });
        side_.assign(n_, -1);
        w_[0].assign(n_, 0);
        w_[1].assign(n_, 0);
    }

    std::vector<std::uint8_t> run() {
        assign(order_[0], 0);
        dfs(1);
        return best_side_;
    }

private:
    void assign(std::uint32_t v, int s) {
        side_[v] = s;
        ++count_[s];
        cut_ += w_[1 - s][v];
        for (auto [u, c] : adj_[v])
            w_[s][u] += c;
    }
    void unassign(std::uint32_t v) {
        int s = side_[v];
        for (auto [u, c] : adj_[v])
            w_[s][u] -= c;
        cut_ -= w_[1 - s][v];
        --count_[s];
        side_[v] = -1;
    }

    Score leaf_score() const {
        std::uint64_t k = count_[0], m = count_[1];
        if (obj_ == PartitionObjective::Sparsity)
            return {k * m, cut_};
        std::uint64_t mx = std::max(k, m);
        return {total_ ? cut_ * n_ + 2 * mx * total_ : 2 * mx, 0};
    }

    // -1: a better than b, 0: equal, 1: worse
    int compare(const Score &a, const Score &b) const {
        if (obj_ == PartitionObjective::CoLb)
            return a.num < b.num ? -1 : a.num > b.num ? 1 : 0;
        if (a.den == 0 || b.den == 0) {
            if (a.den != 0)
                return 1;
            if (b.den != 0)
                return -1;
            return a.num > b.num ? -1 : a.num < b.num ? 1 : 0;
        }
        i128 l = i128(a.num) * b.den, r = i128(b.num) * a.den;
        return l > r ? -1 : l < r ? 1 : 0;
    }

    Score bound(std::uint32_t depth) const {
        std::uint64_t r = n_ - depth, a = count_[0];
        std::uint64_t lo = std::max<std::uint64_t>(a, 1), hi = std::min<std::uint64_t>(a + r, n_ - 1);
        std::uint64_t cut_lb = cut_;
        for (std::uint32_t i = depth; i < n_; ++i) {
            auto u = order_[i];
            cut_lb += std::min(w_[0][u], w_[1][u]);
        }
        if (obj_ == PartitionObjective::Sparsity) {
            std::uint64_t best = 0;
            for (std::uint64_t k : {lo, hi, std::uint64_t(n_ / 2), std::uint64_t((n_ + 1) / 2)})
                if (k >= lo && k <= hi)
                    best = std::max(best, k * (n_ - k));
            return {best, cut_lb};
        }
        std::uint64_t mx = n_;
        for (std::uint64_t k : {lo, hi, std::uint64_t(n_ / 2), std::uint64_t((n_ + 1) / 2)})
            if (k >= lo && k <= hi)
                mx = std::min(mx, std::max(k, n_ - k));
        return {total_ ? cut_lb * n_ + 2 * mx * total_ : 2 * mx, 0};
    }

    void dfs(std::uint32_t depth) {
        if (depth == n_) {
            if (count_[0] == 0 || count_[1] == 0)
                return;
            Score s = leaf_score();
            std::vector<std::uint8_t> canon(n_);
            bool flip = side_[0] == 1;
            for (std::uint32_t v = 0; v < n_; ++v)
                canon[v] = static_cast<std::uint8_t>(flip ? 1 - side_[v] : side_[v]);
            int c = have_ ? compare(s, best_) : -1;
            if (c < 0 || (c == 0 && canon < best_side_)) {
                best_ = s;
                best_side_ = canon;
                have_ = true;
            }
            return;
        }
        if (have_ && compare(bound(depth), best_) > 0)
            return;
        auto v = order_[depth];
        for (int s = 0; s < 2; ++s) {
            assign(v, s);
            dfs(depth + 1);
            unassign(v);
        }
    }

    const DomainTransitionGraph &g_;
    PartitionObjective obj_;
    std::uint32_t n_;
    std::uint64_t total_ = 0;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> adj_;
    std::vector<std::uint32_t> order_;
    std::vector<int> side_;
    std::vector<std::uint64_t> w_[2];
    std::uint64_t count_[2] = {0, 0};
    std::uint64_t cut_ = 0;
    bool have_ = false;
    Score best_;
    std::vector<std::uint8_t> best_side_;
};

}  // namespace

DtgPartition partition_dtg_bb(const DomainTransitionGraph &g, PartitionObjective obj,
                              const PartitionOptions &opt) {
    if (g.num_vertices < 2)
        throw ConfigError("partitioning needs at least 2 vertices");
    if (g.num_vertices > opt.vertex_cap) {
        if (opt.warn)
            opt.warn("DTG of variable " + std::to_string(g.var) + " has " + std::to_string(g.num_vertices) +
                     " vertices (cap " + std::to_string(opt.vertex_cap) + "), using GreedyAFG");
        auto p = greedy_afg(g);
        p.used_fallback = true;
        return p;
    }
    DtgPartition p;
    p.side = BranchAndBound(g, obj).run();
    finish(g, p);
    return p;
}

double objective_value(const DomainTransitionGraph &g, const DtgPartition &p, PartitionObjective obj) {
    std::uint32_t n = g.num_vertices;
    if (obj == PartitionObjective::Sparsity)
        return p.sparsity(n);
    std::uint64_t total = g.total_count();
    double ratio = total ? double(p.cut_count) / double(total) : 0.0;
    return ratio + double(std::max(p.s1, p.s2)) / (double(n) / 2.0);
}

AfgMethod parse_afg_method(const std::string &s) {
    if (s == "greedy") return AfgMethod::Greedy;
    if (s == "fluency") return AfgMethod::Fluency;
    if (s == "sparsity") return AfgMethod::Sparsity;
    if (s == "co_lb" || s == "colb") return AfgMethod::CoLb;
    throw ConfigError("unknown objective '" + s + "' (greedy|fluency|sparsity|co_lb)");
}

const char *to_string(AfgMethod m) {
    switch (m) {
    case AfgMethod::Greedy: return "greedy";
    case AfgMethod::Fluency: return "fluency";
    case AfgMethod::Sparsity: return "sparsity";
    case AfgMethod::CoLb: return "co_lb";
    }
    return "?";
}

FeatureProjection grazhda_projection(const SasTask &task, AfgMethod method, const GrazhdaOptions &opt,
                                     std::vector<ProjectionReportRow> *report) {
    std::uint32_t nv = static_cast<std::uint32_t>(task.variables.size());
    std::vector<bool> use(nv, true);
    if (method == AfgMethod::Fluency) {
        std::fill(use.begin(), use.end(), false);
        for (auto v : fluency_filter(task, opt.fluency_fraction))
            use[v] = true;
    }
    FeatureProjection proj;
    proj.num_abstract = 2 * nv;
    for (std::uint32_t v = 0; v < nv; ++v) {
        auto g = extract_dtg(task, v);
        std::vector<std::uint32_t> m(g.num_vertices, 2 * v);
        ProjectionReportRow row{v, g.num_vertices, false, {}, 0.0};
        if (use[v] && g.num_vertices >= 2) {
            DtgPartition p;
            PartitionObjective obj = PartitionObjective::Sparsity;
            if (method == AfgMethod::Sparsity || method == AfgMethod::CoLb) {
                obj = method == AfgMethod::CoLb ? PartitionObjective::CoLb : PartitionObjective::Sparsity;
                p = partition_dtg_bb(g, obj, opt.partition);
            } else {
                p = greedy_afg(g);
            }
            for (std::uint32_t x = 0; x < g.num_vertices; ++x)
                m[x] = 2 * v + p.side[x];
            row.partitioned = true;
            row.objective = objective_value(g, p, obj);
            row.partition = std::move(p);
        }
        proj.map.push_back(std::move(m));
        if (report)
            report->push_back(std::move(row));
    }
    return proj;
}

}  // namespace hdastar
