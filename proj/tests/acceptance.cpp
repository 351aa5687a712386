// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

using namespace hdastar;

namespace {

// pinned tolerances
constexpr double kCoTolerance = 0.05;          // 2: |CO - (1 - 1/p)|
constexpr double kGridBlockCoMax = 0.20;       // 3
constexpr double kGridZobristCoMin = 0.80;     // 3
constexpr double kGridSoMax = 0.15;            // 3
constexpr double kGreedySparsity = 0.71;       // 4
constexpr double kGreedySparsityTol = 0.01;    // 4
constexpr double kSpearmanMin = 0.5;           // 9
constexpr std::uint32_t kGreedyCutEdges = 21;  // 4

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v, int prec = 4) {
    std::ostringstream o;
    o.precision(prec);
    o << v;
    return o.str();
}

std::vector<std::shared_ptr<TilePuzzle>> tile8_suite(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::shared_ptr<TilePuzzle>> v;
    for (int i = 0; i < n; ++i)
        v.push_back(std::make_shared<TilePuzzle>(3, 3, random_tile_board(3, 3, rng)));
    return v;
}

std::vector<std::shared_ptr<TilePuzzle>> tile15_easy_suite(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::shared_ptr<TilePuzzle>> v;
    for (int i = 0; i < n; ++i)
        v.push_back(std::make_shared<TilePuzzle>(4, 4, random_walk_tile_board(4, 4, 60, rng)));
    return v;
}

std::vector<std::shared_ptr<GridMap>> grid_suite(int n, int size, double obstacles, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::shared_ptr<GridMap>> v;
    for (int i = 0; i < n; ++i)
        v.push_back(random_grid(size, size, obstacles, rng));
    return v;
}

SasTask logistics() { return parse_sas(read_file(std::string(HDASTAR_FIXTURES) + "/logistics.sas")); }

std::size_t crossing_edges(const DomainTransitionGraph &g, const std::vector<std::uint8_t> &side) {
    std::size_t c = 0;
    for (auto &e : g.edges)
        c += side[e.a] != side[e.b];
    return c;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    auto n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

// every registry strategy applicable to the domain; the file strategy gets
// the domain's preset (or identity) projection written to disk
std::vector<StrategyPtr> all_strategies(const Domain &d, const std::filesystem::path &scratch) {
    std::vector<StrategyPtr> v;
    for (auto &name : strategy_names()) {
        if (!strategy_applies(name, d.kind()))
            continue;
        StrategySpec spec;
        spec.name = name;
        spec.seed = env_default_seed();
        if (name == "HDA*[Z,Afeature/file]") {
            FeatureProjection p = d.kind() == DomainKind::Tile
                                      ? tile_projection_preset(static_cast<const TilePuzzle &>(d))
                                  : d.kind() == DomainKind::Grid
                                      ? grid_block_projection(d, default_grid_block(d))
                                      : FeatureProjection::identity(d.domain_sizes());
            auto path = scratch / "projection.json";
            std::ofstream(path) << projection_to_json(p, d, spec.seed, "preset").dump();
            spec.projection_file = path.string();
        }
        v.push_back(make_strategy(spec, d));
    }
    return v;
}

Outcome c1_optimality() {
    Outcome o;
    auto scratch = std::filesystem::temp_directory_path() / "hdastar_acceptance";
    std::filesystem::create_directories(scratch);
    std::vector<DomainPtr> doms;
    for (auto &t : tile8_suite(50, env_default_seed()))
        doms.push_back(t);
    for (auto &g : grid_suite(20, 64, 0.3, env_default_seed()))
        doms.push_back(g);
    // SAS+ strategies too, on the fixture and on 8-puzzles encoded as SAS+
    auto lt = logistics();
    doms.push_back(std::make_shared<SasDomain>(lt));
    for (auto &t : tile8_suite(3, env_default_seed() + 1))
        doms.push_back(std::make_shared<SasDomain>(tile_puzzle_as_sas(*t)));
    std::uint64_t runs = 0, bad = 0;
    for (auto &d : doms) {
        auto seq = astar_solve(*d);
        for (auto &s : all_strategies(*d, scratch))
            for (std::uint32_t p : {1u, 2u, 4u, 8u}) {
                EngineConfig cfg;
                cfg.p = p;
                auto r = hda_solve(*d, *s, cfg);
                ++runs;
                if (r.solution.cost != seq.cost) {
                    ++bad;
                    if (o.detail.size() < 200)
                        o.detail += s->name() + " p=" + std::to_string(p) + " on " + d->name() + "; ";
                }
            }
    }
    o.pass = bad == 0;
    o.detail = std::to_string(runs) + " runs, " + std::to_string(bad) + " non-optimal " + o.detail;
    return o;
}

Outcome c2_zobrist_co() {
    // asserted: 8-puzzle suite on the simulated executor. Reported only: the
    // threads executor (on one core each worker runs for a whole timeslice)
    // and the 15-puzzle-easy suite.
    Outcome o;
    auto measure = [&](const std::vector<std::shared_ptr<TilePuzzle>> &suite, Executor ex, bool assert_it,
                       const std::string &label) {
        o.detail += label + ":";
        for (std::uint32_t p : {2u, 4u, 8u}) {
            std::uint64_t sent = 0, gen = 0;
            for (auto &t : suite) {
                auto z = make_zobrist_strategy("HDA*[Z]", *t, env_default_seed());
                EngineConfig cfg;
                cfg.p = p;
                cfg.executor = ex;
                auto r = hda_solve(*t, *z, cfg);
                sent += r.report.total(&WorkerStats::sent);
                gen += r.report.total(&WorkerStats::generated);
            }
            double co = double(sent) / double(gen), want = 1.0 - 1.0 / p;
            if (assert_it)
                o.pass &= std::abs(co - want) <= kCoTolerance;
            o.detail += " p=" + std::to_string(p) + " " + fmt(co) + "/" + fmt(want);
        }
        o.detail += assert_it ? "; " : " [info]; ";
    };
    auto tiles8 = tile8_suite(50, env_default_seed());
    measure(tiles8, Executor::Simulated, true, "8-puzzle simulated");
    measure(tiles8, Executor::Threads, false, "8-puzzle threads");
    measure(tile15_easy_suite(10, env_default_seed()), Executor::Simulated, false, "15-puzzle-easy simulated");
    return o;
}

Outcome c3_grid() {
    Outcome o;
    auto grids = grid_suite(5, 500, 0.45, env_default_seed());
    std::uint64_t zs = 0, zg = 0, bs = 0, bg = 0, ze = 0, be = 0, seq_e = 0;
    for (auto &g : grids) {
        auto seq = astar_solve(*g);
        seq_e += seq.expansions;
        EngineConfig cfg;
        cfg.p = 8;
        cfg.executor = Executor::Simulated;
        cfg.sequential_expansions = seq.expansions;
        auto z = make_zobrist_strategy("HDA*[Z]", *g, env_default_seed());
        auto b = make_azh_strategy("HDA*[Z,Afeature]", grid_block_projection(*g, default_grid_block(*g)),
                                   env_default_seed());
        auto rz = hda_solve(*g, *z, cfg), rb = hda_solve(*g, *b, cfg);
        o.pass &= rz.solution.cost == seq.cost && rb.solution.cost == seq.cost;
        zs += rz.report.total(&WorkerStats::sent);
        zg += rz.report.total(&WorkerStats::generated);
        ze += rz.report.total(&WorkerStats::expanded);
        bs += rb.report.total(&WorkerStats::sent);
        bg += rb.report.total(&WorkerStats::generated);
        be += rb.report.total(&WorkerStats::expanded);
    }
    double zco = double(zs) / zg, bco = double(bs) / bg;
    double zso = double(ze) / seq_e - 1, bso = double(be) / seq_e - 1;
    o.pass &= bco < kGridBlockCoMax && zco > kGridZobristCoMin && zso < kGridSoMax && bso < kGridSoMax;
    o.detail = "block CO " + fmt(bco) + " SO " + fmt(bso) + "; zobrist CO " + fmt(zco) + " SO " + fmt(zso) +
               " (5 grids, block " + std::to_string(default_grid_block(*grids[0])) + ")";
    return o;
}

Outcome c4_logistics() {
    Outcome o;
    auto t = logistics();
    auto g = extract_dtg(t, t.find_variable("pkg"));
    auto gr = greedy_afg(g);
    double gs = sparsity_of(g, gr);
    auto bb = partition_dtg_bb(g, PartitionObjective::Sparsity);
    auto bf = oracle::brute_partition(g, PartitionObjective::Sparsity);
    double bs = sparsity_of(g, bb);
    o.pass = crossing_edges(g, gr.side) == kGreedyCutEdges && std::abs(gs - kGreedySparsity) <= kGreedySparsityTol &&
             crossing_edges(g, bb.side) == 1 && bb.side == bf.side && bs == bf.value;
    o.detail = "greedy cuts " + std::to_string(crossing_edges(g, gr.side)) + " edges, sparsity " + fmt(gs) +
               "; b&b cuts " + std::to_string(crossing_edges(g, bb.side)) + " edge, sparsity " + fmt(bs, 8) +
               " (brute force " + fmt(bf.value, 8) + ")";
    return o;
}

Outcome c5_exactness() {
    Outcome o;
    std::mt19937_64 rng(env_default_seed());
    int mismatches = 0;
    for (int i = 0; i < 200; ++i) {
        std::uint32_t n = 2 + rng() % 11;
        double density = 0.15 + 0.7 * double(rng() % 1000) / 1000.0;
        auto g = oracle::random_dtg(rng, n, density, 6);
        for (auto obj : {PartitionObjective::Sparsity, PartitionObjective::CoLb}) {
            auto bb = partition_dtg_bb(g, obj);
            auto bf = oracle::brute_partition(g, obj);
            double v = objective_value(g, bb, obj);
            bool same = bb.side == bf.side && (v == bf.value || (std::isinf(v) && std::isinf(bf.value)));
            mismatches += !same;
        }
    }
    o.pass = mismatches == 0;
    o.detail = "200 graphs x 2 objectives, " + std::to_string(mismatches) + " mismatches";
    return o;
}

Outcome c6_balance() {
    Outcome o;
    std::mt19937_64 rng(env_default_seed() + 6);
    int bad = 0;
    for (int i = 0; i < 500; ++i) {
        std::uint32_t n = 1 + rng() % 40;
        auto g = oracle::random_dtg(rng, n, double(rng() % 1000) / 1000.0, 5);
        auto p = greedy_afg(g);
        std::uint32_t s1 = 0, s2 = 0;
        for (auto s : p.side)
            (s ? s2 : s1)++;
        bad += !(s2 <= s1 && s1 <= s2 + 1 && s1 + s2 == n);
    }
    o.pass = bad == 0;
    o.detail = "500 graphs, " + std::to_string(bad) + " unbalanced";
    return o;
}

Outcome c7_model() {
    Outcome o;
    int reports = 0, bad = 0;
    auto check = [&](const ModelReport &r) {
        ++reports;
        bool ok = r.SO == r.p * (r.LB - 1.0) && r.sceff == r.ceff * r.seff &&
                  r.ceff == 1.0 / (1.0 + r.c * r.CO) && r.seff == 1.0 / (1.0 + r.SO) && r.CO >= 0 &&
                  r.CO <= 1 && r.LB >= 1;
        bad += !ok;
    };
    auto scratch = std::filesystem::temp_directory_path() / "hdastar_acceptance";
    std::filesystem::create_directories(scratch);
    std::vector<DomainPtr> doms;
    for (auto &t : tile8_suite(5, env_default_seed()))
        doms.push_back(t);
    for (auto &g : grid_suite(3, 64, 0.3, env_default_seed()))
        doms.push_back(g);
    doms.push_back(std::make_shared<SasDomain>(logistics()));
    for (auto &d : doms) {
        auto s = astar_solve(*d);
        auto wg = enumerate_workload_graph(*d, s.cost, 50'000'000, {s.path.back()});
        for (auto &st : all_strategies(*d, scratch))
            for (std::uint32_t p : {1u, 2u, 8u, 48u})
                for (double c : {0.1, 1.0, 3.0})
                    check(model_overheads(wg, *d, *st, p, c));
    }
    o.pass = bad == 0;
    o.detail = std::to_string(reports) + " reports, " + std::to_string(bad) + " violations";
    return o;
}

Outcome c8_divergence() {
    Outcome o;
    auto pool = tile15_easy_suite(30, env_default_seed());
    std::vector<std::pair<std::uint64_t, std::size_t>> hard;
    std::vector<Solution> seqs;
    SearchOptions so;
    so.record_trace = true;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        seqs.push_back(astar_solve(*pool[i], so));
        hard.push_back({seqs.back().expansions, i});
    }
    std::sort(hard.rbegin(), hard.rend());
    std::vector<double> dz, da, dp;
    for (int k = 0; k < 10; ++k) {
        auto &t = *pool[hard[k].second];
        auto &seq = seqs[hard[k].second];
        EngineConfig cfg;
        cfg.p = 8;
        cfg.executor = Executor::Simulated;
        cfg.record_trace = true;
        StrategySpec spec;
        spec.seed = env_default_seed();
        for (auto [name, out] : {std::pair{"HDA*[Z]", &dz}, {"HDA*[Z,Astate]", &da}, {"HDA*[P]", &dp}}) {
            spec.name = name;
            auto r = hda_solve(t, *make_strategy(spec, t), cfg);
            out->push_back(divergence(seq.trace, r.solution.trace));
        }
    }
    double mz = median(dz), ma = median(da), mp = median(dp);
    o.pass = mz < ma && mz < mp;
    o.detail = "median divergence zobrist " + fmt(mz, 6) + ", state abstraction " + fmt(ma, 6) + ", perfect " +
               fmt(mp, 6);
    return o;
}

Outcome c9_rank() {
    // planning setting: 8-puzzles encoded as SAS+, the Zobrist, fluency,
    // greedy and dynamic-SDD variants, blind search
    Outcome o;
    const char *names[] = {"HDA*[Z]", "HDA*[Z,Afeature/DTG_fluency]", "HDA*[Z,Afeature/DTG_greedy]",
                           "HDA*[Z,Astate/SDD_dynamic]"};
    std::vector<double> sc, eff;
    for (auto &t : tile8_suite(5, env_default_seed())) {
        SasDomain d(tile_puzzle_as_sas(*t));
        auto seq = astar_solve(d);
        auto wg = enumerate_workload_graph(d, seq.cost, 50'000'000, {seq.path.back()});
        for (auto name : names) {
            StrategySpec spec;
            spec.name = name;
            spec.seed = env_default_seed();
            auto s = make_strategy(spec, d);
            EngineConfig cfg;
            cfg.p = 8;
            cfg.executor = Executor::Simulated;
            cfg.sequential_expansions = seq.expansions;
            auto r = hda_solve(d, *s, cfg);
            sc.push_back(model_overheads(wg, d, *s, 8, 1.0).sceff);
            eff.push_back(*r.report.virtual_speedup / 8.0);
        }
    }
    double rho = spearman(sc, eff);
    o.pass = sc.size() >= 12 && rho > kSpearmanMin;
    o.detail = std::to_string(sc.size()) + " points, spearman " + fmt(rho);
    return o;
}

Outcome c10_termination() {
    Outcome o;
    auto suite = tile8_suite(20, env_default_seed() + 10);
    std::vector<Cost> opt;
    for (auto &t : suite)
        opt.push_back(astar_solve(*t).cost);
    int premature = 0, unbalanced = 0;
    for (int run = 0; run < 1000; ++run) {
        auto &t = *suite[run % suite.size()];
        auto z = make_zobrist_strategy("HDA*[Z]", t, env_default_seed());
        EngineConfig cfg;
        cfg.p = 2 + run % 7;
        cfg.batch = 1 + run % 3 * 50;
        cfg.faults.enabled = true;
        cfg.faults.seed = std::uint64_t(run) + 1;
        auto r = hda_solve(t, *z, cfg);
        premature += r.solution.cost != opt[run % suite.size()];
        auto &rep = r.report;
        unbalanced += rep.total(&WorkerStats::generated) + rep.total(&WorkerStats::seeded) !=
                          rep.total(&WorkerStats::inserted) + rep.total(&WorkerStats::duplicates) +
                              rep.total(&WorkerStats::pruned) ||
                      rep.total(&WorkerStats::sent) != rep.total(&WorkerStats::received) ||
                      rep.enqueued != rep.drained;
    }
    o.pass = premature == 0 && unbalanced == 0;
    o.detail = "1000 runs, " + std::to_string(premature) + " premature, " + std::to_string(unbalanced) +
               " with unbalanced counters";
    return o;
}

Outcome c11_projection() {
    Outcome o;
    std::vector<int> board(16);
    std::iota(board.begin(), board.end(), 0);
    TilePuzzle t(4, 4, board);
    auto task = tile_puzzle_as_sas(t);
    auto got = grazhda_projection(task, AfgMethod::Sparsity);
    auto want = tile_projection_preset(t);
    // tile variables share index and value meaning (tile i+1, position); the
    // encoding's extra blank variable has no counterpart in the preset
    std::map<std::uint32_t, std::uint32_t> fwd, back;
    bool ok = true;
    for (std::uint32_t v = 0; v < t.num_variables(); ++v)
        for (std::uint32_t x = 0; x < t.domain_sizes()[v]; ++x) {
            auto a = got(v, Value(x)), b = want(v, Value(x));
            auto [i, f1] = fwd.emplace(a, b);
            auto [j, f2] = back.emplace(b, a);
            ok &= i->second == b && j->second == a;
        }
    o.pass = ok;
    o.detail = std::string(ok ? "matches" : "differs from") + " the preset on " +
               std::to_string(t.num_variables()) + " tile variables (" + std::to_string(fwd.size()) +
               " abstract features)";
    return o;
}

}  // namespace

int main(int argc, char **argv) {
    using Fn = Outcome (*)();
    const std::vector<std::pair<const char *, Fn>> criteria = {
        {"optimality oracle", c1_optimality},
        {"zobrist CO structure", c2_zobrist_co},
        {"grid AZH vs zobrist", c3_grid},
        {"logistics DTG anchor", c4_logistics},
        {"partitioner exactness", c5_exactness},
        {"greedy AFG balance", c6_balance},
        {"model identities", c7_model},
        {"divergence ordering", c8_divergence},
        {"rank agreement", c9_rank},
        {"termination soundness", c10_termination},
        {"15-puzzle projection recovery", c11_projection},
    };
    std::set<int> want;
    for (int i = 1; i < argc; ++i)
        want.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        int id = int(i) + 1;
        if (!want.empty() && !want.count(id))
            continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome r;
        try {
            r = criteria[i].second();
        } catch (const std::exception &e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !r.pass;
        std::printf("criterion %2d %s %s: %s [%.1f s]\n", id, r.pass ? "PASS" : "FAIL", criteria[i].first,
                    r.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
