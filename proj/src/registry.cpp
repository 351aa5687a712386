#include "hdastar/registry.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hdastar {

const std::vector<std::string> &strategy_names() {
    static const std::vector<std::string> names = {
        "HDA*[Z]",
        "HDA*[P]",
        "HDA*[Z,Astate]",
        "HDA*[P,Astate]",
        "HDA*[Z,Afeature]",
        "HDA*[Z,Afeature/file]",
        "HDA*[Z,Astate/SDD]",
        "HDA*[P,Astate/SDD]",
        "HDA*[Z,Astate/SDD_dynamic]",
        "HDA*[Z,Afeature/DTG_greedy]",
        "HDA*[Z,Afeature/DTG_fluency]",
        "HDA*[Z,Afeature/DTG_sparsity]",
        "HDA*[Z,Afeature/DTG_coLB]",
    };
    return names;
}

bool strategy_applies(const std::string &name, DomainKind kind) {
    if (name == "HDA*[Z]" || name == "HDA*[P]" || name == "HDA*[Z,Afeature/file]")
        return true;
    if (name == "HDA*[Z,Astate]" || name == "HDA*[P,Astate]" || name == "HDA*[Z,Afeature]")
        return kind != DomainKind::Sas;
    return kind == DomainKind::Sas;
}

void validate_strategy_name(const std::string &name) {
    for (auto &n : strategy_names())
        if (n == name)
            return;
    std::string msg = "unknown strategy '" + name + "'; registered:";
    for (auto &n : strategy_names())
        msg += " " + n;
    throw ConfigError(msg);
}

StrategyPtr make_strategy(const StrategySpec &spec, const Domain &d,
                          const std::function<void(const std::string &)> &warn) {
    validate_strategy_name(spec.name);
    if (!strategy_applies(spec.name, d.kind()))
        throw ConfigError("strategy " + spec.name + " does not apply to " + to_string(d.kind()) + " domains");
    const auto &n = spec.name;
    if (n == "HDA*[Z]")
        return make_zobrist_strategy(n, d, spec.seed);
    if (n == "HDA*[P]")
        return make_perfect_strategy(n, d);
    if (n == "HDA*[Z,Afeature/file]") {
        if (spec.projection_file.empty())
            throw ConfigError(n + " needs a projection file");
        auto j = nlohmann::json::parse(read_file(spec.projection_file));
        return make_azh_strategy(n, projection_from_json(j, d), spec.seed);
    }
    if (d.kind() == DomainKind::Tile) {
        auto &t = static_cast<const TilePuzzle &>(d);
        if (n == "HDA*[Z,Afeature]")
            return make_azh_strategy(n, tile_projection_preset(t), spec.seed);
        auto abs = tile_abstraction_preset(t, spec.abstract_tiles);
        return make_tile_abstraction_strategy(n, abs, n == "HDA*[P,Astate]", spec.seed,
                                              static_cast<std::uint32_t>(t.cells()));
    }
    if (d.kind() == DomainKind::Grid) {
        std::uint32_t k = spec.grid_block ? spec.grid_block : default_grid_block(d);
        if (n == "HDA*[Z,Afeature]")
            return make_azh_strategy(n, grid_block_projection(d, k), spec.seed);
        return make_abstraction_strategy(n, grid_block_abstraction(d, k), n == "HDA*[P,Astate]", spec.seed);
    }
    const auto &task = static_cast<const SasDomain &>(d).task();
    if (n == "HDA*[Z,Astate/SDD]" || n == "HDA*[P,Astate/SDD]")
        return make_abstraction_strategy(n, sdd_greedy_abstraction(task, spec.sdd_max_nodes),
                                         n == "HDA*[P,Astate/SDD]", spec.seed);
    if (n == "HDA*[Z,Astate/SDD_dynamic]") {
        SddOptions o;
        o.max_features = dahda_threshold(task, spec.dahda_fraction);
        return make_abstraction_strategy(n, sdd_greedy_abstraction(task, o), false, spec.seed);
    }
    GrazhdaOptions go;
    go.fluency_fraction = spec.fluency_fraction;
    go.partition.vertex_cap = spec.partition_cap;
    go.partition.warn = warn;
    AfgMethod m = n == "HDA*[Z,Afeature/DTG_greedy]"    ? AfgMethod::Greedy
                  : n == "HDA*[Z,Afeature/DTG_fluency]" ? AfgMethod::Fluency
                  : n == "HDA*[Z,Afeature/DTG_coLB]"    ? AfgMethod::CoLb
                                                        : AfgMethod::Sparsity;
    return make_azh_strategy(n, grazhda_projection(task, m, go), spec.seed);
}

DomainKind parse_domain_kind(const std::string &s) {
    if (s == "tile") return DomainKind::Tile;
    if (s == "grid") return DomainKind::Grid;
    if (s == "sas") return DomainKind::Sas;
    throw ConfigError("unknown domain kind '" + s + "' (tile|grid|sas)");
}

const char *to_string(DomainKind k) {
    switch (k) {
    case DomainKind::Tile: return "tile";
    case DomainKind::Grid: return "grid";
    case DomainKind::Sas: return "sas";
    }
    return "?";
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

DomainPtr parse_domain(const std::string &text, DomainKind kind, SasHeuristic heuristic) {
    switch (kind) {
    case DomainKind::Tile: return TilePuzzle::parse(text);
    case DomainKind::Grid: return GridMap::parse(text);
    case DomainKind::Sas: return std::make_shared<SasDomain>(parse_sas(text), heuristic);
    }
    throw ConfigError("bad domain kind");
}

DomainPtr load_domain(const std::string &path, const std::string &kind, SasHeuristic heuristic) {
    DomainKind k;
    if (kind != "auto") {
        k = parse_domain_kind(kind);
    } else {
        auto ext = path.substr(path.find_last_of('.') + 1);
        if (ext == "tile" || ext == "puzzle")
            k = DomainKind::Tile;
        else if (ext == "grid" || ext == "map")
            k = DomainKind::Grid;
        else if (ext == "sas")
            k = DomainKind::Sas;
        else
            throw ConfigError("cannot infer domain kind of '" + path + "'; pass --kind");
    }
    return parse_domain(read_file(path), k, heuristic);
}

SasTask tile_puzzle_as_sas(const TilePuzzle &t) {
    SasTask task;
    int n = t.cells(), w = t.width();
    for (int i = 1; i < n; ++i)
        task.variables.push_back({"tile" + std::to_string(i), static_cast<std::uint32_t>(n)});
    task.variables.push_back({"blank", static_cast<std::uint32_t>(n)});
    auto vals = t.values(t.initial_state());
    for (auto v : vals)
        task.init.push_back(v);
    task.init.push_back(static_cast<Value>(t.blank_of(t.initial_state())));
    std::uint32_t blank = static_cast<std::uint32_t>(n - 1);
    for (int tile = 1; tile < n; ++tile) {
        for (int a = 0; a < n; ++a) {
            int ax = a % w, ay = a / w;
            for (int b = 0; b < n; ++b) {
                int bx = b % w, by = b / w;
                if (std::abs(ax - bx) + std::abs(ay - by) != 1)
                    continue;
                SasOperator op;
                op.name = "move-t" + std::to_string(tile) + "-" + std::to_string(a) + "-" + std::to_string(b);
                op.effects.push_back({static_cast<std::uint32_t>(tile - 1), a, b});
                op.effects.push_back({blank, b, a});
                task.operators.push_back(std::move(op));
            }
        }
        task.goal.push_back({static_cast<std::uint32_t>(tile - 1), static_cast<Value>(tile)});
    }
    return task;
}

nlohmann::json projection_to_json(const FeatureProjection &p, const Domain &d, std::uint64_t seed,
                                  const std::string &method) {
    nlohmann::json j;
    j["seed"] = seed;
    j["method"] = method;
    j["num_abstract"] = p.num_abstract;
    nlohmann::json m = nlohmann::json::object();
    for (std::size_t v = 0; v < p.map.size(); ++v) {
        nlohmann::json vm = nlohmann::json::object();
        for (std::size_t x = 0; x < p.map[v].size(); ++x)
            vm[std::to_string(x)] = p.map[v][x];
        m[d.variable_names()[v]] = vm;
    }
    j["projection"] = m;
    return j;
}

FeatureProjection projection_from_json(const nlohmann::json &j, const Domain &d, std::uint64_t *seed) {
    if (!j.contains("projection") || !j["projection"].is_object())
        throw ConfigError("projection JSON lacks a 'projection' object");
    if (seed && j.contains("seed"))
        *seed = j["seed"].get<std::uint64_t>();
    FeatureProjection p;
    const auto &m = j["projection"];
    for (std::size_t v = 0; v < d.num_variables(); ++v) {
        const auto &name = d.variable_names()[v];
        if (!m.contains(name))
            throw ConfigError("projection has no entry for variable '" + name + "'");
        std::vector<std::uint32_t> row(d.domain_sizes()[v]);
        for (std::size_t x = 0; x < row.size(); ++x) {
            auto key = std::to_string(x);
            if (!m[name].contains(key))
                throw ConfigError("projection misses feature " + name + "=" + key);
            row[x] = m[name][key].get<std::uint32_t>();
            p.num_abstract = std::max(p.num_abstract, row[x] + 1);
        }
        p.map.push_back(std::move(row));
    }
    return p;
}

nlohmann::json report_to_json(const OverheadReport &r, std::uint64_t config_hash) {
    nlohmann::json j;
    j["strategy"] = r.strategy;
    j["p"] = r.p;
    j["seed"] = r.seed;
    j["config_hash"] = config_hash;
    j["executor"] = to_string(r.executor);
    if (r.cost == kInfCost)
        j["cost"] = nullptr;
    else
        j["cost"] = r.cost;
    std::vector<std::uint64_t> ex, se, re;
    for (auto &w : r.workers) {
        ex.push_back(w.expanded);
        se.push_back(w.sent);
        re.push_back(w.received);
    }
    j["expansions"] = ex;
    j["sent"] = se;
    j["received"] = re;
    j["CO"] = r.CO;
    j["SO"] = r.SO ? nlohmann::json(*r.SO) : nlohmann::json(nullptr);
    j["LB"] = r.LB;
    j["walltime_ms"] = r.walltime_ms;
    if (r.executor == Executor::Simulated)
        j["virtual_time"] = r.virtual_time;
    if (r.virtual_speedup)
        j["virtual_speedup"] = *r.virtual_speedup;
    if (r.speedup_vs_astar)
        j["speedup_vs_astar"] = *r.speedup_vs_astar;
    if (r.speedup_vs_p1)
        j["speedup_vs_p1"] = *r.speedup_vs_p1;
    j["terminated_reason"] = r.terminated_reason;
    j["trace_sampled"] = r.trace_sampled;
    nlohmann::json ws = nlohmann::json::array();
    for (auto &w : r.workers)
        ws.push_back({{"expanded", w.expanded},
                      {"generated", w.generated},
                      {"sent", w.sent},
                      {"received", w.received},
                      {"reexpanded", w.reexpanded},
                      {"duplicates", w.duplicates},
                      {"pruned", w.pruned},
                      {"inserted", w.inserted},
                      {"max_open", w.max_open}});
    j["workers"] = ws;
    return j;
}

nlohmann::json model_to_json(const ModelReport &r) {
    return {{"strategy", r.strategy}, {"p", r.p},       {"c", r.c},         {"CO", r.CO},
            {"LB", r.LB},             {"SO", r.SO},     {"ceff", r.ceff},   {"seff", r.seff},
            {"sceff", r.sceff},       {"nodes", r.nodes}, {"edges", r.edges}};
}

std::uint64_t env_default_seed() {
    if (const char *s = std::getenv("HDASTAR_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception &) {
            throw ConfigError(std::string("HDASTAR_SEED is not an integer: '") + s + "'");
        }
    }
    return 1;
}

}  // namespace hdastar
