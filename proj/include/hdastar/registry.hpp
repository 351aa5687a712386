#pragma once

#include "hdastar/analysis.hpp"
#include "hdastar/engine.hpp"
#include "hdastar/feature_gen.hpp"
#include "hdastar/grid_map.hpp"
#include "hdastar/sas_task.hpp"
#include "hdastar/tile_puzzle.hpp"

#include <json.hpp>

namespace hdastar {

struct StrategySpec {
    std::string name = "HDA*[Z]";
    std::uint64_t seed = 1;
    std::string projection_file;            // HDA*[Z,Afeature/file]
    std::uint64_t sdd_max_nodes = 1000;     // AHDA* abstraction size
    double dahda_fraction = 0.30;
    double fluency_fraction = 0.30;
    std::uint32_t grid_block = 0;           // 0: map_dim / 50
    std::vector<int> abstract_tiles{1, 2, 3};
    std::uint32_t partition_cap = 25;
};

const std::vector<std::string> &strategy_names();
bool strategy_applies(const std::string &name, DomainKind kind);
// Throws ConfigError naming the registry entries for an unknown name.
void validate_strategy_name(const std::string &name);
StrategyPtr make_strategy(const StrategySpec &spec, const Domain &d,
                          const std::function<void(const std::string &)> &warn = {});

// heuristic applies to SAS+ only
DomainPtr load_domain(const std::string &path, const std::string &kind = "auto",
                      SasHeuristic heuristic = SasHeuristic::Blind);
DomainPtr parse_domain(const std::string &text, DomainKind kind, SasHeuristic heuristic = SasHeuristic::Blind);
DomainKind parse_domain_kind(const std::string &s);
const char *to_string(DomainKind k);

// SAS+ encoding of a sliding-tile puzzle: one variable per tile plus the
// blank, one operator per (tile, move).
SasTask tile_puzzle_as_sas(const TilePuzzle &t);

nlohmann::json projection_to_json(const FeatureProjection &p, const Domain &d, std::uint64_t seed,
                                  const std::string &method);
FeatureProjection projection_from_json(const nlohmann::json &j, const Domain &d, std::uint64_t *seed = nullptr);

nlohmann::json report_to_json(const OverheadReport &r, std::uint64_t config_hash);
nlohmann::json model_to_json(const ModelReport &r);

std::uint64_t env_default_seed();  // HDASTAR_SEED, else 1
std::string read_file(const std::string &path);

}  // namespace hdastar
