// hdastar: solve | partition | analyze | trace-compare | bench | generate

#include "hdastar/registry.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>

using namespace hdastar;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 1, kUnsolvable = 2, kBudget = 3 };

void warn(const std::string &m) { std::cerr << "warning: " << m << '\n'; }

void write_text(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    out << text;
}

std::string fmt(double x) {
    std::ostringstream o;
    o << std::setprecision(10) << x;
    return o.str();
}

struct CommonStrategyOpts {
    StrategySpec spec;
    void add(CLI::App *app) {
        app->add_option("--projection", spec.projection_file, "projection JSON for HDA*[Z,Afeature/file]");
        app->add_option("--sdd-nodes", spec.sdd_max_nodes, "abstract-state limit for /SDD abstractions")
            ->capture_default_str();
        app->add_option("--dahda-fraction", spec.dahda_fraction, "feature budget fraction for /SDD_dynamic")
            ->capture_default_str();
        app->add_option("--fluency-fraction", spec.fluency_fraction, "fraction dropped by /DTG_fluency")
            ->capture_default_str();
        app->add_option("--grid-block", spec.grid_block, "grid block size (0: map dimension / 50)")
            ->capture_default_str();
        app->add_option("--abstract-tiles", spec.abstract_tiles, "tiles kept by the tile state abstraction")
            ->delimiter(',')
            ->capture_default_str();
        app->add_option("--partition-cap", spec.partition_cap, "vertex cap for exact DTG partitioning")
            ->capture_default_str();
    }
};

struct EngineOpts {
    EngineConfig cfg;
    std::string tiebreak = "lifo", backend = "bucket", executor = "threads";
    void add(CLI::App *app) {
        app->add_option("-p,--workers", cfg.p, "number of workers")->capture_default_str();
        app->add_option("--batch", cfg.batch, "nodes per message")->capture_default_str();
        app->add_option("--tiebreak", tiebreak, "lifo|fifo")->capture_default_str();
        app->add_option("--backend", backend, "bucket|heap")->capture_default_str();
        app->add_option("--executor", executor, "threads|simulated")->capture_default_str();
        app->add_option("--memory-budget", cfg.memory_budget, "stored states per worker")->capture_default_str();
        app->add_option("--sim-send-node", cfg.sim.send_per_node, "simulated cost per sent node")
            ->capture_default_str();
        app->add_option("--sim-send-message", cfg.sim.send_per_message, "simulated cost per message")
            ->capture_default_str();
        app->add_option("--sim-latency", cfg.sim.latency, "simulated message latency")->capture_default_str();
    }
    void finish() {
        cfg.tiebreak = parse_tiebreak(tiebreak);
        cfg.backend = parse_backend(backend);
        cfg.executor = parse_executor(executor);
    }
};

SasHeuristic parse_heuristic(const std::string &s) {
    if (s == "blind")
        return SasHeuristic::Blind;
    if (s == "goal-count")
        return SasHeuristic::GoalCount;
    throw ConfigError("unknown heuristic '" + s + "' (blind|goal-count)");
}

std::string config_string(const std::string &domain, const StrategySpec &s, const EngineConfig &c,
                          const std::string &tb, const std::string &be, const std::string &ex) {
    json j = {{"domain", domain},   {"strategy", s.name},     {"seed", s.seed},
              {"p", c.p},           {"batch", c.batch},       {"tiebreak", tb},
              {"backend", be},      {"executor", ex},         {"sdd_nodes", s.sdd_max_nodes},
              {"grid_block", s.grid_block}, {"projection", s.projection_file},
              {"memory_budget", c.memory_budget}};
    return j.dump();
}

int cmd_solve(const std::string &domain_path, const std::string &kind, const std::string &heur,
              CommonStrategyOpts &so, EngineOpts &eo, const std::string &report_path,
              const std::string &trace_path, std::uint64_t node_budget, bool p1_baseline) {
    eo.finish();
    validate_strategy_name(so.spec.name);
    auto d = load_domain(domain_path, kind, parse_heuristic(heur));
    auto strat = make_strategy(so.spec, *d, warn);
    auto &cfg = eo.cfg;
    cfg.seed = so.spec.seed;
    cfg.record_trace = !trace_path.empty();

    SearchOptions sopt;
    sopt.tiebreak = cfg.tiebreak;
    sopt.backend = cfg.backend;
    sopt.node_budget = node_budget;
    auto t0 = std::chrono::steady_clock::now();
    Solution seq;
    try {
        seq = astar_solve(*d, sopt);
    } catch (const Unsolvable &e) {
        std::cerr << "unsolvable: " << e.what() << '\n';
        return kUnsolvable;
    }
    cfg.sequential_walltime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    cfg.sequential_expansions = seq.expansions;
    if (p1_baseline && cfg.p > 1) {
        EngineConfig one = cfg;
        one.p = 1;
        one.record_trace = false;
        auto r1 = hda_solve(*d, *strat, one);
        cfg.p1_walltime_ms = r1.report.walltime_ms;
    }

    auto res = hda_solve(*d, *strat, cfg);
    auto &rep = res.report;
    auto j = report_to_json(rep, fnv1a(config_string(domain_path, so.spec, cfg, eo.tiebreak, eo.backend,
                                                    eo.executor)));
    j["sequential_cost"] = seq.cost;
    j["sequential_expansions"] = seq.expansions;
    j["path_length"] = res.solution.path.size();
    write_text(report_path, j.dump(2) + "\n");
    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out)
            throw ConfigError("cannot write '" + trace_path + "'");
        write_trace_csv(out, res.solution.trace);
    }
    if (rep.terminated_reason == "memory_exhausted") {
        std::cerr << "memory budget exceeded\n";
        return kBudget;
    }
    if (rep.terminated_reason == "unsolvable")
        return kUnsolvable;
    if (rep.cost != seq.cost) {
        std::cerr << "error: parallel cost " << rep.cost << " differs from sequential " << seq.cost << '\n';
        return kConfig;
    }
    return kOk;
}

int cmd_partition(const std::string &task_path, const std::string &objective, const std::string &out_path,
                  const std::string &csv_path, std::uint64_t seed, std::uint32_t cap, double fluency_fraction) {
    auto t0 = std::chrono::steady_clock::now();
    auto d = std::make_shared<SasDomain>(parse_sas(read_file(task_path)));
    AfgMethod m = parse_afg_method(objective);
    GrazhdaOptions go;
    go.fluency_fraction = fluency_fraction;
    go.partition.vertex_cap = cap;
    go.partition.warn = warn;
    std::vector<ProjectionReportRow> rows;
    auto proj = grazhda_projection(d->task(), m, go, &rows);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::size_t parted = 0;
    for (auto &r : rows)
        parted += r.partitioned;
    if (parted == 0)
        warn("no variable was partitioned; the projection is empty");
    write_text(out_path, projection_to_json(proj, *d, seed, to_string(m)).dump(2) + "\n");

    std::ostringstream csv;
    csv << "var,name,vertices,partitioned,s1,s2,cut_count,cut_weight,objective,fallback,side1,side2\n";
    for (auto &r : rows) {
        csv << r.var << ',' << d->variable_names()[r.var] << ',' << r.vertices << ',' << r.partitioned;
        if (r.partitioned) {
            std::string a, b;
            for (std::uint32_t x = 0; x < r.vertices; ++x) {
                auto &dst = r.partition.side[x] ? b : a;
                dst += (dst.empty() ? "" : " ") + std::to_string(x);
            }
            csv << ',' << r.partition.s1 << ',' << r.partition.s2 << ',' << r.partition.cut_count << ','
                << fmt(r.partition.cut_weight) << ',' << fmt(r.objective) << ',' << r.partition.used_fallback
                << ',' << a << ',' << b;
        } else {
            csv << ",,,,,,,,";
        }
        csv << '\n';
    }
    if (!csv_path.empty())
        write_text(csv_path, csv.str());
    if (secs > 10.0) {
        std::cerr << "partitioning took " << secs << " s (limit 10 s)\n";
        return kBudget;
    }
    return kOk;
}

int cmd_analyze(const std::string &domain_path, const std::string &kind, const std::string &heur,
                const std::string &wg_path, const std::string &write_wg, std::vector<std::string> names,
                CommonStrategyOpts &so, std::uint32_t p, double c, const std::string &out_path,
                const std::string &gnuplot_path, std::uint64_t node_budget) {
    auto d = load_domain(domain_path, kind, parse_heuristic(heur));
    if (names.empty())
        for (auto &n : strategy_names())
            if (strategy_applies(n, d->kind()) && n != "HDA*[Z,Afeature/file]")
                names.push_back(n);
    for (auto &n : names)
        validate_strategy_name(n);
    WorkloadGraph wg;
    if (!wg_path.empty()) {
        std::ifstream in(wg_path);
        if (!in)
            throw ConfigError("cannot open '" + wg_path + "'");
        wg = read_workload_graph(in, *d);
    } else {
        SearchOptions o;
        o.node_budget = node_budget;
        auto sol = astar_solve(*d, o);
        wg = enumerate_workload_graph(*d, sol.cost, node_budget, {sol.path.back()});
    }
    if (!write_wg.empty()) {
        std::ofstream out(write_wg);
        write_workload_graph(out, wg, *d);
    }
    std::ostringstream csv, dat;
    csv << "strategy,p,c,nodes,edges,CO,LB,SO,ceff,seff,sceff\n";
    dat << "# strategy_index CO LB SO sceff  (strategy names in column order below)\n";
    int idx = 0;
    for (auto &n : names) {
        StrategySpec spec = so.spec;
        spec.name = n;
        auto s = make_strategy(spec, *d, warn);
        auto r = model_overheads(wg, *d, *s, p, c);
        csv << '"' << n << '"' << ',' << p << ',' << c << ',' << r.nodes << ',' << r.edges << ',' << fmt(r.CO)
            << ',' << fmt(r.LB) << ',' << fmt(r.SO) << ',' << fmt(r.ceff) << ',' << fmt(r.seff) << ','
            << fmt(r.sceff) << '\n';
        dat << idx++ << ' ' << fmt(r.CO) << ' ' << fmt(r.LB) << ' ' << fmt(r.SO) << ' ' << fmt(r.sceff)
            << "  # " << n << '\n';
    }
    write_text(out_path, csv.str());
    if (!gnuplot_path.empty())
        write_text(gnuplot_path, dat.str());
    return kOk;
}

ExpansionTrace load_trace(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open '" + path + "'");
    return read_trace_csv(in);
}

int cmd_compare(const std::string &ref_path, const std::vector<std::string> &cands, const std::string &out_path) {
    auto ref = load_trace(ref_path);
    std::ostringstream csv;
    csv << "candidate,states_compared,divergence,premature\n";
    double sd = 0, sp = 0;
    auto ref_f = std::unordered_map<PackedState, Cost, PackedStateHash>{};
    for (auto &r : ref.rows)
        ref_f.emplace(r.state, r.f());
    for (auto &c : cands) {
        auto t = load_trace(c);
        double dv = divergence(ref, t);
        auto pm = premature_expansions(t, &ref_f);
        auto ords = ref.ordinals();
        std::size_t both = 0;
        for (auto &r : t.rows)
            both += ords.count(r.state);
        csv << c << ',' << both << ',' << fmt(dv) << ',' << pm << '\n';
        sd += dv;
        sp += double(pm);
    }
    if (!cands.empty())
        csv << "mean,," << fmt(sd / cands.size()) << ',' << fmt(sp / cands.size()) << '\n';
    write_text(out_path, csv.str());
    return kOk;
}

std::vector<DomainPtr> bench_suite(const std::string &suite, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<DomainPtr> v;
    for (int i = 0; i < n; ++i) {
        if (suite == "tile8")
            v.push_back(std::make_shared<TilePuzzle>(3, 3, random_tile_board(3, 3, rng)));
        else if (suite == "tile15easy")
            v.push_back(std::make_shared<TilePuzzle>(4, 4, random_walk_tile_board(4, 4, 60, rng)));
        else if (suite == "grid64")
            v.push_back(random_grid(64, 64, 0.3, rng));
        else if (suite == "grid500")
            v.push_back(random_grid(500, 500, 0.45, rng));
        else
            throw ConfigError("unknown suite '" + suite + "' (tile8|tile15easy|grid64|grid500)");
    }
    return v;
}

int cmd_bench(const std::string &suite, int n, std::vector<std::string> names, CommonStrategyOpts &so,
              EngineOpts &eo, bool model, double c, const std::string &out_path, const std::string &gnuplot_path) {
    eo.finish();
    if (names.empty())
        names = {"HDA*[Z]", "HDA*[P]", "HDA*[Z,Afeature]"};
    for (auto &nm : names)
        validate_strategy_name(nm);
    auto inst = bench_suite(suite, n, so.spec.seed);
    std::ostringstream csv, dat;
    csv << "instance,strategy,p,executor,cost,seq_cost,expansions,seq_expansions,CO,SO,LB,walltime_ms,"
           "speedup,efficiency,model_CO,model_LB,model_SO,model_sceff\n";
    int row = 0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        auto &d = *inst[i];
        SearchOptions o;
        o.tiebreak = eo.cfg.tiebreak;
        o.backend = eo.cfg.backend;
        auto t0 = std::chrono::steady_clock::now();
        auto seq = astar_solve(d, o);
        double seq_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        WorkloadGraph wg;
        if (model)
            wg = enumerate_workload_graph(d, seq.cost, 50'000'000, {seq.path.back()});
        for (auto &nm : names) {
            StrategySpec spec = so.spec;
            spec.name = nm;
            auto s = make_strategy(spec, d, warn);
            EngineConfig cfg = eo.cfg;
            cfg.seed = spec.seed;
            cfg.sequential_expansions = seq.expansions;
            cfg.sequential_walltime_ms = seq_ms;
            auto r = hda_solve(d, *s, cfg).report;
            double speed = cfg.executor == Executor::Simulated ? r.virtual_speedup.value_or(0)
                                                                : r.speedup_vs_astar.value_or(0);
            csv << i << ",\"" << nm << "\"," << cfg.p << ',' << to_string(cfg.executor) << ',' << r.cost << ','
                << seq.cost << ',' << r.total(&WorkerStats::expanded) << ',' << seq.expansions << ',' << fmt(r.CO)
                << ',' << fmt(r.SO.value_or(0)) << ',' << fmt(r.LB) << ',' << fmt(r.walltime_ms) << ','
                << fmt(speed) << ',' << fmt(speed / cfg.p);
            if (model) {
                auto m = model_overheads(wg, d, *s, cfg.p, c);
                csv << ',' << fmt(m.CO) << ',' << fmt(m.LB) << ',' << fmt(m.SO) << ',' << fmt(m.sceff);
                dat << row << ' ' << fmt(m.sceff) << ' ' << fmt(speed / cfg.p) << "  # " << i << ' ' << nm << '\n';
            } else {
                csv << ",,,,";
                dat << row << ' ' << fmt(r.CO) << ' ' << fmt(r.SO.value_or(0)) << ' ' << fmt(speed / cfg.p)
                    << "  # " << i << ' ' << nm << '\n';
            }
            csv << '\n';
            ++row;
        }
    }
    write_text(out_path, csv.str());
    if (!gnuplot_path.empty())
        write_text(gnuplot_path, dat.str());
    return kOk;
}

int cmd_generate(const std::string &what, int w, int h, double obstacles, int walk, std::uint64_t seed,
                 const std::string &from, const std::string &out_path) {
    std::mt19937_64 rng(seed);
    if (what == "tile") {
        auto b = walk > 0 ? random_walk_tile_board(w, h, walk, rng) : random_tile_board(w, h, rng);
        write_text(out_path, TilePuzzle(w, h, b).serialize());
    } else if (what == "grid") {
        write_text(out_path, random_grid(w, h, obstacles, rng)->serialize());
    } else if (what == "tile-sas") {
        if (from.empty())
            throw ConfigError("tile-sas needs --from <tile file>");
        auto t = TilePuzzle::parse(read_file(from));
        write_text(out_path, serialize_sas(tile_puzzle_as_sas(*t)));
    } else {
        throw ConfigError("unknown generator '" + what + "' (tile|grid|tile-sas)");
    }
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Hash-distributed A* toolkit"};
    app.require_subcommand(1);
    std::uint64_t seed = 1;
    try {
        seed = env_default_seed();
    } catch (const ConfigError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    }

    // solve
    auto *solve = app.add_subcommand("solve", "solve one instance with HDA*");
    std::string domain_path, kind = "auto", heur = "blind", report_path, trace_path;
    std::uint64_t node_budget = 50'000'000;
    bool no_p1 = false;
    CommonStrategyOpts solve_so;
    EngineOpts solve_eo;
    solve->add_option("--domain", domain_path, "instance file (.tile, .grid, .sas)")->required();
    solve->add_option("--kind", kind, "auto|tile|grid|sas")->capture_default_str();
    solve->add_option("--heuristic", heur, "SAS+ heuristic: blind|goal-count")->capture_default_str();
    solve->add_option("--strategy", solve_so.spec.name, "distribution strategy")->capture_default_str();
    solve->add_option("--seed", solve_so.spec.seed, "hash seed (default $HDASTAR_SEED or 1)");
    solve->add_option("--report", report_path, "report JSON path (default stdout)");
    solve->add_option("--trace", trace_path, "expansion trace CSV path");
    solve->add_option("--node-budget", node_budget, "node budget of the sequential baseline")->capture_default_str();
    solve->add_flag("--no-p1-baseline", no_p1, "skip the p=1 engine baseline run");
    solve_so.add(solve);
    solve_eo.add(solve);

    // partition
    auto *part = app.add_subcommand("partition", "generate a feature projection from DTGs");
    std::string task_path, objective = "sparsity", proj_out, csv_out;
    std::uint32_t cap = 25;
    double fl = 0.30;
    std::uint64_t part_seed = seed;
    part->add_option("--task", task_path, "SAS+ task file")->required();
    part->add_option("--objective", objective, "sparsity|co_lb|greedy|fluency")->capture_default_str();
    part->add_option("--out", proj_out, "projection JSON path (default stdout)");
    part->add_option("--csv", csv_out, "per-DTG report CSV path");
    part->add_option("--seed", part_seed, "seed recorded in the projection");
    part->add_option("--cap", cap, "vertex cap for branch and bound")->capture_default_str();
    part->add_option("--fluency-fraction", fl, "fraction dropped by the fluency filter")->capture_default_str();

    // analyze
    auto *an = app.add_subcommand("analyze", "model CO/LB/SO/sceff on a workload graph");
    std::string an_domain, an_kind = "auto", an_heur = "blind", wg_path, write_wg, an_out, an_gp;
    std::vector<std::string> an_names;
    std::uint32_t an_p = 8;
    double an_c = 1.0;
    std::uint64_t an_budget = 50'000'000;
    CommonStrategyOpts an_so;
    an->add_option("--domain", an_domain, "instance file")->required();
    an->add_option("--kind", an_kind, "auto|tile|grid|sas")->capture_default_str();
    an->add_option("--heuristic", an_heur, "SAS+ heuristic: blind|goal-count")->capture_default_str();
    an->add_option("--wg", wg_path, "workload graph file (enumerated when omitted)");
    an->add_option("--write-wg", write_wg, "write the workload graph here");
    an->add_option("--strategy", an_names, "strategy (repeatable; default all applicable)");
    an->add_option("--seed", an_so.spec.seed, "hash seed");
    an->add_option("-p,--workers", an_p, "number of workers")->capture_default_str();
    an->add_option("-c,--comm-cost", an_c, "communication cost ratio c")->capture_default_str();
    an->add_option("--out", an_out, "CSV path (default stdout)");
    an->add_option("--gnuplot", an_gp, "also write a gnuplot .dat file");
    an->add_option("--node-budget", an_budget, "enumeration node cap")->capture_default_str();
    an_so.add(an);

    // trace-compare
    auto *tc = app.add_subcommand("trace-compare", "divergence and premature expansions against a reference trace");
    std::string ref_path, tc_out;
    std::vector<std::string> cands;
    tc->add_option("--ref", ref_path, "reference trace CSV")->required();
    tc->add_option("--cand", cands, "candidate trace CSV (repeatable)")->required();
    tc->add_option("--out", tc_out, "CSV path (default stdout)");

    // bench
    auto *bench = app.add_subcommand("bench", "run strategies over a generated suite");
    std::string suite = "tile8", b_out, b_gp;
    int b_n = 20;
    bool b_model = false;
    double b_c = 1.0;
    std::vector<std::string> b_names;
    CommonStrategyOpts b_so;
    EngineOpts b_eo;
    bench->add_option("--suite", suite, "tile8|tile15easy|grid64|grid500")->capture_default_str();
    bench->add_option("--instances", b_n, "number of instances")->capture_default_str();
    bench->add_option("--strategy", b_names, "strategy (repeatable)");
    bench->add_option("--seed", b_so.spec.seed, "suite and hash seed");
    bench->add_flag("--model", b_model, "also compute workload-graph model columns");
    bench->add_option("-c,--comm-cost", b_c, "communication cost ratio c")->capture_default_str();
    bench->add_option("--out", b_out, "aggregate CSV path (default stdout)");
    bench->add_option("--gnuplot", b_gp, "also write a gnuplot .dat file");
    b_so.add(bench);
    b_eo.add(bench);

    // generate
    auto *gen = app.add_subcommand("generate", "write a random instance");
    std::string g_what, g_from, g_out;
    int g_w = 3, g_h = 3, g_walk = 0;
    double g_obs = 0.45;
    std::uint64_t g_seed = seed;
    gen->add_option("what", g_what, "tile|grid|tile-sas")->required();
    gen->add_option("--width", g_w)->capture_default_str();
    gen->add_option("--height", g_h)->capture_default_str();
    gen->add_option("--obstacles", g_obs, "grid obstacle ratio")->capture_default_str();
    gen->add_option("--walk", g_walk, "tile: random-walk length from the goal (0: uniform)")->capture_default_str();
    gen->add_option("--seed", g_seed);
    gen->add_option("--from", g_from, "tile file to encode as SAS+");
    gen->add_option("--out", g_out, "output path (default stdout)");

    solve_so.spec.seed = an_so.spec.seed = b_so.spec.seed = seed;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        if (*solve)
            return cmd_solve(domain_path, kind, heur, solve_so, solve_eo, report_path, trace_path, node_budget, !no_p1);
        if (*part)
            return cmd_partition(task_path, objective, proj_out, csv_out, part_seed, cap, fl);
        if (*an)
            return cmd_analyze(an_domain, an_kind, an_heur, wg_path, write_wg, an_names, an_so, an_p, an_c, an_out,
                               an_gp, an_budget);
        if (*tc)
            return cmd_compare(ref_path, cands, tc_out);
        if (*bench)
            return cmd_bench(suite, b_n, b_names, b_so, b_eo, b_model, b_c, b_out, b_gp);
        if (*gen)
            return cmd_generate(g_what, g_w, g_h, g_obs, g_walk, g_seed, g_from, g_out);
    } catch (const ParseError &e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kConfig;
    } catch (const ConfigError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const Unsolvable &e) {
        std::cerr << "unsolvable: " << e.what() << '\n';
        return kUnsolvable;
    } catch (const BudgetExceeded &e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return kBudget;
    } catch (const json::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    }
    return kOk;
}
