#include "hdastar/hashing.hpp"

#include "hdastar/tile_puzzle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hdastar {

ZobristTable::ZobristTable(const std::vector<std::uint32_t> &domain_sizes, std::uint64_t seed)
    : seed_(seed), sizes_(domain_sizes) {
    std::uint64_t st = seed;
    std::size_t off = 0;
    for (auto k : domain_sizes) {
        offset_.push_back(off);
        off += k;
    }
    words_.resize(off);
    for (auto &w : words_)
        w = splitmix64(st);
}

std::uint64_t ZobristTable::word(std::uint32_t var, Value val) const {
    if (var >= sizes_.size() || val >= sizes_[var])
        throw ConfigError("no Zobrist entry for feature (" + std::to_string(var) + "=" +
                          std::to_string(val) + ")");
    return words_[offset_[var] + val];
}

std::uint64_t zobrist_hash(std::span<const Value> values, const ZobristTable &t) {
    if (values.size() != t.num_variables())
        throw ConfigError("state has " + std::to_string(values.size()) + " variables, table has " +
                          std::to_string(t.num_variables()));
    std::uint64_t h = 0;
    for (std::uint32_t i = 0; i < values.size(); ++i)
        h ^= t.word(i, values[i]);
    return h;
}

std::uint64_t zobrist_hash(std::span<const Feature> features, const ZobristTable &t) {
    std::uint64_t h = 0;
    for (auto &f : features)
        h ^= t.word(f.var, f.value);
    return h;
}

FeatureProjection FeatureProjection::identity(const std::vector<std::uint32_t> &domain_sizes) {
    FeatureProjection p;
    for (auto k : domain_sizes) {
        std::vector<std::uint32_t> m(k);
        for (std::uint32_t v = 0; v < k; ++v)
            m[v] = p.num_abstract++;
        p.map.push_back(std::move(m));
    }
    return p;
}

void FeatureProjection::compact() {
    std::map<std::uint32_t, std::uint32_t> ren;
    for (auto &m : map)
        for (auto &a : m) {
            auto it = ren.try_emplace(a, static_cast<std::uint32_t>(ren.size())).first;
            a = it->second;
        }
    num_abstract = static_cast<std::uint32_t>(ren.size());
}

AbstractZobristTable::AbstractZobristTable(const FeatureProjection &proj, std::uint64_t seed)
    : seed_(seed) {
    std::uint64_t st = seed;
    std::uint32_t n = proj.num_abstract;
    for (auto &m : proj.map)
        for (auto a : m)
            n = std::max(n, a + 1);
    words_.resize(n);
    for (auto &w : words_)
        w = splitmix64(st);
    composed_.seed_ = seed;
    std::size_t off = 0;
    for (auto &m : proj.map) {
        composed_.offset_.push_back(off);
        composed_.sizes_.push_back(static_cast<std::uint32_t>(m.size()));
        off += m.size();
        for (auto a : m)
            composed_.words_.push_back(words_[a]);
    }
}

std::uint64_t azh_hash(std::span<const Value> values, const FeatureProjection &proj,
                       const AbstractZobristTable &t) {
    if (values.size() != proj.map.size())
        throw ConfigError("state and projection disagree on variable count");
    std::uint64_t h = 0;
    for (std::uint32_t i = 0; i < values.size(); ++i) {
        if (values[i] >= proj.map[i].size())
            throw ConfigError("no projection entry for feature (" + std::to_string(i) + "=" +
                              std::to_string(values[i]) + ")");
        h ^= t.abstract_word(proj.map[i][values[i]]);
    }
    return h;
}

std::uint64_t lexicographic_rank(std::span<const Value> perm) {
    std::size_t k = perm.size();
    if (k > 20)
        throw ConfigError("permutation rank overflows 64 bits for k > 20");
    std::uint64_t fact[21];
    fact[0] = 1;
    for (std::size_t i = 1; i <= 20; ++i)
        fact[i] = fact[i - 1] * i;
    std::uint32_t used = 0;
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (perm[i] >= k || (used >> perm[i] & 1))
            throw ConfigError("not a permutation");
        std::uint32_t below = perm[i] ? used & ((1u << perm[i]) - 1) : 0;
        std::uint64_t c = perm[i] - static_cast<std::uint32_t>(__builtin_popcount(below));
        r += c * fact[k - 1 - i];
        used |= 1u << perm[i];
    }
    return r;
}

namespace {

// rank of k distinct values drawn from 0..n-1
std::uint64_t partial_permutation_rank(std::span<const Value> vals, std::uint32_t n) {
    std::uint64_t r = 0;
    std::uint64_t used = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        std::uint64_t below = vals[i] ? used & ((1ULL << vals[i]) - 1) : 0;
        std::uint64_t c = vals[i] - static_cast<std::uint64_t>(__builtin_popcountll(below));
        r = r * (n - i) + c;
        used |= 1ULL << vals[i];
    }
    return r;
}

std::uint64_t mixed_radix(std::span<const Value> vals, std::span<const std::uint32_t> sizes) {
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        r = r * sizes[i] + vals[i];
    return r;
}

}  // namespace

std::uint64_t perfect_hash_tiles(const TilePuzzle &d, const PackedState &s) {
    auto v = d.values(s);
    v.push_back(static_cast<Value>(d.blank_of(s)));
    return lexicographic_rank(v);
}

StateAbstraction StateAbstraction::keep(const std::vector<std::uint32_t> &domain_sizes,
                                        std::vector<std::uint32_t> vars) {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    StateAbstraction a;
    for (auto v : vars) {
        if (v >= domain_sizes.size())
            throw ConfigError("abstraction variable out of range");
        a.retained.push_back(v);
        a.divisor.push_back(1);
        a.abstract_sizes.push_back(domain_sizes[v]);
    }
    return a;
}

std::vector<Value> StateAbstraction::project(std::span<const Value> values) const {
    std::vector<Value> out(retained.size());
    for (std::size_t i = 0; i < retained.size(); ++i)
        out[i] = static_cast<Value>(values[retained[i]] / divisor[i]);
    return out;
}

double StateAbstraction::abstract_state_count() const {
    double n = 1;
    for (auto k : abstract_sizes)
        n *= k;
    return n;
}

std::uint64_t abstract_max_out_degree(const SasTask &task, const std::vector<std::uint32_t> &vars) {
    std::size_t k = vars.size();
    std::vector<std::uint32_t> sizes(k);
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < k; ++i) {
        sizes[i] = task.variables[vars[i]].size;
        total *= sizes[i];
    }
    // project operators onto vars and drop duplicates and pure self-loops
    std::vector<std::vector<int>> pre_post;  // 2k entries: pre..., post...
    for (auto &op : task.operators) {
        std::vector<int> pp(2 * k, -1);
        bool changes = false;
        for (auto &e : op.effects) {
            auto it = std::find(vars.begin(), vars.end(), e.var);
            if (it == vars.end())
                continue;
            std::size_t i = it - vars.begin();
            pp[i] = e.pre;
            pp[k + i] = e.post;
            if (e.post >= 0 && e.post != e.pre)
                changes = true;
        }
        if (changes)
            pre_post.push_back(std::move(pp));
    }
    std::sort(pre_post.begin(), pre_post.end());
    pre_post.erase(std::unique(pre_post.begin(), pre_post.end()), pre_post.end());

    std::uint64_t best = 0;
    std::vector<int> s(k, 0), t(k);
    std::vector<std::uint64_t> succ;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        succ.clear();
        for (auto &pp : pre_post) {
            bool ok = true;
            for (std::size_t i = 0; i < k && ok; ++i)
                ok = pp[i] < 0 || pp[i] == s[i];
            if (!ok)
                continue;
            std::uint64_t code = 0;
            bool same = true;
            for (std::size_t i = 0; i < k; ++i) {
                t[i] = pp[k + i] >= 0 ? pp[k + i] : s[i];
                same &= t[i] == s[i];
                code = code * sizes[i] + t[i];
            }
            if (!same)
                succ.push_back(code);
        }
        std::sort(succ.begin(), succ.end());
        std::uint64_t deg = std::unique(succ.begin(), succ.end()) - succ.begin();
        best = std::max(best, deg);
        // next abstract state, last variable fastest
        for (std::size_t i = k; i-- > 0;) {
            if (++s[i] < static_cast<int>(sizes[i]))
                break;
            s[i] = 0;
        }
    }
    return best;
}

StateAbstraction sdd_greedy_abstraction(const SasTask &task, std::uint64_t max_abstract_nodes,
                                        std::vector<SddStep> *steps) {
    SddOptions opt;
    opt.max_abstract_nodes = max_abstract_nodes;
    return sdd_greedy_abstraction(task, opt, steps);
}

StateAbstraction sdd_greedy_abstraction(const SasTask &task, const SddOptions &opt,
                                        std::vector<SddStep> *steps) {
    std::vector<std::uint32_t> sizes;
    for (auto &v : task.variables)
        sizes.push_back(v.size);
    std::vector<std::uint32_t> chosen;
    std::uint64_t nodes = 1, features = 0;
    for (;;) {
        int best = -1;
        std::uint64_t best_deg = 0;
        for (std::uint32_t v = 0; v < sizes.size(); ++v) {
            if (sizes[v] < 2 || std::find(chosen.begin(), chosen.end(), v) != chosen.end())
                continue;
            std::uint64_t n2 = nodes * sizes[v];
            if (opt.max_abstract_nodes && n2 > *opt.max_abstract_nodes)
                continue;
            if (opt.max_features && features + sizes[v] > *opt.max_features)
                continue;
            if (n2 > opt.enumeration_cap)
                continue;
            auto cand = chosen;
            cand.push_back(v);
            std::sort(cand.begin(), cand.end());
            std::uint64_t deg = abstract_max_out_degree(task, cand);
            if (best < 0 || deg < best_deg) {
                best = static_cast<int>(v);
                best_deg = deg;
            }
        }
        if (best < 0)
            break;
        chosen.push_back(static_cast<std::uint32_t>(best));
        nodes *= sizes[best];
        features += sizes[best];
        if (steps)
            steps->push_back({static_cast<std::uint32_t>(best), best_deg});
    }
    return StateAbstraction::keep(sizes, chosen);
}

std::uint64_t dahda_threshold(const SasTask &task, double fraction) {
    if (fraction < 0 || fraction > 1)
        throw ConfigError("fraction must be in [0,1]");
    std::uint64_t total = 0;
    for (auto &v : task.variables)
        total += v.size;
    // guard against 0.3 * 10 = 3.0000000000000004
    return static_cast<std::uint64_t>(std::ceil(fraction * double(total) - 1e-9));
}

namespace {

class ZobristStrategy final : public DistributionStrategy {
public:
    ZobristStrategy(std::string name, ZobristTable t) : name_(std::move(name)), t_(std::move(t)) {}
    std::string name() const override { return name_; }
    std::uint64_t hash(std::span<const Value> values) const override { return zobrist_hash(values, t_); }

private:
    std::string name_;
    ZobristTable t_;
};

class PerfectStrategy final : public DistributionStrategy {
public:
    PerfectStrategy(std::string name, const Domain &d)
        : name_(std::move(name)), kind_(d.kind()), sizes_(d.domain_sizes()) {
        if (kind_ == DomainKind::Tile && sizes_.size() + 1 > 20)
            throw ConfigError("perfect hash limited to 20 tiles");
    }
    std::string name() const override { return name_; }
    std::uint64_t hash(std::span<const Value> values) const override {
        if (kind_ == DomainKind::Tile) {
            Value perm[21];
            std::uint32_t used = 0;
            for (std::size_t i = 0; i < values.size(); ++i) {
                perm[i] = values[i];
                used |= 1u << values[i];
            }
            perm[values.size()] = static_cast<Value>(__builtin_ctz(~used));
            return lexicographic_rank(std::span<const Value>(perm, values.size() + 1));
        }
        return mixed_radix(values, sizes_);
    }

private:
    std::string name_;
    DomainKind kind_;
    std::vector<std::uint32_t> sizes_;
};

class AbstractionStrategy final : public DistributionStrategy {
public:
    AbstractionStrategy(std::string name, StateAbstraction a, bool perfect, std::uint64_t seed,
                        std::uint32_t tile_cells)
        : name_(std::move(name)), a_(std::move(a)), perfect_(perfect), tile_cells_(tile_cells),
          t_(a_.abstract_sizes, seed) {}
    std::string name() const override { return name_; }
    std::uint64_t hash(std::span<const Value> values) const override {
        auto av = a_.project(values);
        if (!perfect_)
            return zobrist_hash(av, t_);
        if (tile_cells_)
            return partial_permutation_rank(av, tile_cells_);
        return mixed_radix(av, a_.abstract_sizes);
    }

private:
    std::string name_;
    StateAbstraction a_;
    bool perfect_;
    std::uint32_t tile_cells_;
    ZobristTable t_;
};

}  // namespace

StrategyPtr make_zobrist_strategy(std::string name, const Domain &d, std::uint64_t seed) {
    return std::make_shared<ZobristStrategy>(std::move(name), ZobristTable(d.domain_sizes(), seed));
}

StrategyPtr make_azh_strategy(std::string name, FeatureProjection proj, std::uint64_t seed) {
    AbstractZobristTable t(proj, seed);
    return std::make_shared<ZobristStrategy>(std::move(name), t.composed());
}

StrategyPtr make_perfect_strategy(std::string name, const Domain &d) {
    return std::make_shared<PerfectStrategy>(std::move(name), d);
}

StrategyPtr make_abstraction_strategy(std::string name, StateAbstraction abs, bool perfect,
                                      std::uint64_t seed) {
    return std::make_shared<AbstractionStrategy>(std::move(name), std::move(abs), perfect, seed, 0);
}

StrategyPtr make_tile_abstraction_strategy(std::string name, StateAbstraction abs, bool perfect,
                                           std::uint64_t seed, std::uint32_t cells) {
    return std::make_shared<AbstractionStrategy>(std::move(name), std::move(abs), perfect, seed, cells);
}

StateAbstraction tile_abstraction_preset(const TilePuzzle &d, std::vector<int> tiles) {
    std::vector<std::uint32_t> vars;
    for (int t : tiles) {
        if (t < 1 || t >= d.cells())
            throw ConfigError("abstraction tile out of range");
        vars.push_back(static_cast<std::uint32_t>(t - 1));
    }
    return StateAbstraction::keep(d.domain_sizes(), vars);
}

std::uint32_t default_grid_block(const Domain &grid) {
    auto &s = grid.domain_sizes();
    return std::max<std::uint32_t>(1, std::max(s[0], s[1]) / 50);
}

StateAbstraction grid_block_abstraction(const Domain &grid, std::uint32_t block) {
    if (grid.kind() != DomainKind::Grid || block == 0)
        throw ConfigError("grid block abstraction needs a grid domain and block >= 1");
    auto &s = grid.domain_sizes();
    StateAbstraction a;
    a.retained = {0, 1};
    a.divisor = {block, block};
    a.abstract_sizes = {(s[0] + block - 1) / block, (s[1] + block - 1) / block};
    return a;
}

FeatureProjection tile_projection_preset(const TilePuzzle &d) {
    // each tile: upper ceil(h/2) rows vs. the rest
    FeatureProjection p;
    int rows = (d.height() + 1) / 2;
    for (int t = 1; t < d.cells(); ++t) {
        std::vector<std::uint32_t> m(d.cells());
        for (int pos = 0; pos < d.cells(); ++pos)
            m[pos] = 2 * (t - 1) + (pos / d.width() < rows ? 0 : 1);
        p.map.push_back(std::move(m));
    }
    p.num_abstract = 2 * (d.cells() - 1);
    return p;
}

FeatureProjection grid_block_projection(const Domain &grid, std::uint32_t block) {
    auto a = grid_block_abstraction(grid, block);
    auto &s = grid.domain_sizes();
    FeatureProjection p;
    std::uint32_t base = 0;
    for (int v = 0; v < 2; ++v) {
        std::vector<std::uint32_t> m(s[v]);
        for (std::uint32_t x = 0; x < s[v]; ++x)
            m[x] = base + x / block;
        base += a.abstract_sizes[v];
        p.map.push_back(std::move(m));
    }
    p.num_abstract = base;
    return p;
}

}  // namespace hdastar
