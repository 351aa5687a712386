#pragma once

#include "hdastar/domain.hpp"
#include "hdastar/sas_task.hpp"

#include <memory>
#include <optional>

namespace hdastar {

// One random 64-bit word per feature, drawn in feature order.
class ZobristTable {
public:
    ZobristTable() = default;
    ZobristTable(const std::vector<std::uint32_t> &domain_sizes, std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    std::size_t num_variables() const { return offset_.size(); }
    std::uint64_t word(std::uint32_t var, Value val) const;
    // variable-major flat index of a feature
    std::size_t index(std::uint32_t var, Value val) const { return offset_[var] + val; }

private:
    friend class AbstractZobristTable;
    std::uint64_t seed_ = 0;
    std::vector<std::size_t> offset_;
    std::vector<std::uint32_t> sizes_;
    std::vector<std::uint64_t> words_;
};

std::uint64_t zobrist_hash(std::span<const Value> values, const ZobristTable &t);
std::uint64_t zobrist_hash(std::span<const Feature> features, const ZobristTable &t);

// Many-to-one map from features (var, value) to abstract feature ids.
struct FeatureProjection {
    std::vector<std::vector<std::uint32_t>> map;  // map[var][value]
    std::uint32_t num_abstract = 0;

    static FeatureProjection identity(const std::vector<std::uint32_t> &domain_sizes);
    std::uint32_t operator()(std::uint32_t var, Value v) const { return map[var][v]; }
    // renumber abstract ids densely in order of first appearance
    void compact();
};

class AbstractZobristTable {
public:
    AbstractZobristTable() = default;
    AbstractZobristTable(const FeatureProjection &proj, std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t abstract_word(std::uint32_t id) const { return words_.at(id); }
    // R[x] = R'[A(x)]
    const ZobristTable &composed() const { return composed_; }

private:
    std::uint64_t seed_ = 0;
    std::vector<std::uint64_t> words_;
    ZobristTable composed_;
};

std::uint64_t azh_hash(std::span<const Value> values, const FeatureProjection &proj,
                       const AbstractZobristTable &t);

// Lexicographic rank of a permutation of 0..k-1, k <= 20.
std::uint64_t lexicographic_rank(std::span<const Value> perm);
class TilePuzzle;
// Rank of (positions of tiles 1..n-1, blank position).
std::uint64_t perfect_hash_tiles(const TilePuzzle &d, const PackedState &s);

// Retained variables plus an optional per-variable coarsening of values
// (used for grid blocks). Abstract state = coarsened retained values.
struct StateAbstraction {
    std::vector<std::uint32_t> retained;          // sorted variable ids
    std::vector<std::uint32_t> divisor;           // per retained variable, value / divisor
    std::vector<std::uint32_t> abstract_sizes;    // per retained variable

    static StateAbstraction keep(const std::vector<std::uint32_t> &domain_sizes,
                                 std::vector<std::uint32_t> vars);
    std::vector<Value> project(std::span<const Value> values) const;
    double abstract_state_count() const;
};

struct SddOptions {
    // stop before the abstract-state count would exceed this
    std::optional<std::uint64_t> max_abstract_nodes;
    // or: stop before retained features (sum of domain sizes) would exceed this
    std::optional<std::uint64_t> max_features;
    // candidates whose abstract graph is larger than this are skipped
    std::uint64_t enumeration_cap = 1u << 22;
};

struct SddStep {
    std::uint32_t var;
    std::uint64_t max_out_degree;
};

StateAbstraction sdd_greedy_abstraction(const SasTask &task, std::uint64_t max_abstract_nodes,
                                        std::vector<SddStep> *steps = nullptr);
StateAbstraction sdd_greedy_abstraction(const SasTask &task, const SddOptions &opt,
                                        std::vector<SddStep> *steps = nullptr);
// maximum directed out-degree of the abstract transition graph over `vars`
std::uint64_t abstract_max_out_degree(const SasTask &task, const std::vector<std::uint32_t> &vars);
std::uint64_t dahda_threshold(const SasTask &task, double fraction = 0.30);

// Maps a state to an owner. Implementations are immutable and thread safe.
class DistributionStrategy {
public:
    virtual ~DistributionStrategy() = default;
    virtual std::string name() const = 0;
    virtual std::uint64_t hash(std::span<const Value> values) const = 0;
    std::uint32_t owner(std::span<const Value> values, std::uint32_t p) const {
        return static_cast<std::uint32_t>(hash(values) % p);
    }
};

using StrategyPtr = std::shared_ptr<const DistributionStrategy>;

StrategyPtr make_zobrist_strategy(std::string name, const Domain &d, std::uint64_t seed);
StrategyPtr make_azh_strategy(std::string name, FeatureProjection proj, std::uint64_t seed);
// perfect hash: lexicographic rank for tiles, x*height+y for grids, mixed radix otherwise
StrategyPtr make_perfect_strategy(std::string name, const Domain &d);
StrategyPtr make_abstraction_strategy(std::string name, StateAbstraction abs, bool perfect,
                                      std::uint64_t seed);
// perfect variant ranks the retained tile positions as a partial permutation
StrategyPtr make_tile_abstraction_strategy(std::string name, StateAbstraction abs, bool perfect,
                                           std::uint64_t seed, std::uint32_t cells);

// presets
StateAbstraction tile_abstraction_preset(const TilePuzzle &d, std::vector<int> tiles = {1, 2, 3});
StateAbstraction grid_block_abstraction(const Domain &grid, std::uint32_t block);
FeatureProjection tile_projection_preset(const TilePuzzle &d);
FeatureProjection grid_block_projection(const Domain &grid, std::uint32_t block);
std::uint32_t default_grid_block(const Domain &grid);

}  // namespace hdastar
