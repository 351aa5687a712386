#include "oracles.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hdastar;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

fs::path scratch() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("hdastar_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Run cli(const std::string &args) {
    auto out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
    std::string cmd = std::string("\"") + HDASTAR_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                      err.string() + "\"";
    int st = std::system(cmd.c_str());
    int code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return {code, read_file(out.string()), read_file(err.string())};
}

void write(const fs::path &p, const std::string &s) { std::ofstream(p) << s; }

std::vector<std::vector<std::string>> csv_rows(const std::string &text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (char ch : line) {
            if (ch == '"')
                quoted = !quoted;
            else if (ch == ',' && !quoted)
                cells.push_back(std::exchange(cell, {}));
            else
                cell += ch;
        }
        cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string fixture() { return std::string(HDASTAR_FIXTURES) + "/logistics.sas"; }

}  // namespace

TEST_CASE("cli: solve p = 1 reports SO = 0") {
    auto inst = scratch() / "one.tile";
    write(inst, "3 3\n1 2 5\n3 4 0\n6 7 8\n");
    auto rep = scratch() / "one.json";
    auto r = cli("solve --domain " + inst.string() + " -p 1 --report " + rep.string());
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(read_file(rep.string()));
    CHECK(j["cost"] == 3);
    CHECK(j["SO"] == 0.0);
    CHECK(j["terminated_reason"] == "optimal");
    CHECK(j.contains("seed"));
    CHECK(j.contains("config_hash"));
}

TEST_CASE("cli: unknown strategy lists the registry") {
    auto inst = scratch() / "one.tile";
    write(inst, "3 3\n1 2 5\n3 4 0\n6 7 8\n");
    auto r = cli("solve --domain " + inst.string() + " --strategy 'HDA*[nope]'");
    CHECK(r.code == 1);
    for (auto &n : strategy_names())
        CHECK(r.err.find(n) != std::string::npos);
}

TEST_CASE("cli: exit codes for unsolvable and parse errors") {
    auto bad = scratch() / "bad.tile";
    write(bad, "3 3\n2 1 0\n3 4 5\n6 7 8\n");
    CHECK(cli("solve --domain " + bad.string()).code == 2);
    auto broken = scratch() / "broken.sas";
    write(broken, "var a 2\nop x 1\n pre q 0\nend\n");
    auto r = cli("partition --task " + broken.string());
    CHECK(r.code == 1);
    CHECK(r.err.find("3") != std::string::npos);
}

TEST_CASE("cli: bench yields one row per instance and strategy") {
    auto out = scratch() / "bench.csv";
    auto r = cli("bench --suite tile8 --instances 20 -p 2 --executor simulated --strategy 'HDA*[Z]' "
                 "--strategy 'HDA*[P]' --strategy 'HDA*[Z,Afeature]' --out " + out.string());
    REQUIRE(r.code == 0);
    auto rows = csv_rows(read_file(out.string()));
    REQUIRE(rows.size() == 61);
    std::size_t cost_col = 0;
    for (std::size_t i = 0; i < rows[0].size(); ++i)
        if (rows[0][i] == "cost")
            cost_col = i;
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(rows[i][cost_col] == rows[i][cost_col + 1]);
}

TEST_CASE("cli: partition of the logistics package DTG cuts one edge") {
    auto csv = scratch() / "part.csv", js = scratch() / "part.json";
    auto r = cli("partition --task " + fixture() + " --objective sparsity --csv " + csv.string() + " --out " +
                 js.string());
    REQUIRE(r.code == 0);
    auto rows = csv_rows(read_file(csv.string()));
    bool found = false;
    for (auto &row : rows)
        if (row.size() > 1 && row[1] == "pkg") {
            found = true;
            CHECK(std::stod(row[7]) == doctest::Approx(1.0 / 60));
            CHECK((row[4] == "11" || row[5] == "11"));
        }
    CHECK(found);
    auto j = nlohmann::json::parse(read_file(js.string()));
    CHECK(j["method"] == "sparsity");
    CHECK(j["projection"].contains("pkg"));
}

TEST_CASE("cli: all single-value variables give an empty projection and a warning") {
    auto t = scratch() / "flat.sas";
    write(t, "var a 1\nvar b 1\nop n 1\n pre a 0\nend\ninit a 0\ninit b 0\n");
    auto r = cli("partition --task " + t.string());
    CHECK(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("cli: partition of a random 12-vertex DTG matches brute force") {
    std::mt19937_64 rng(12);
    auto g = oracle::random_dtg(rng, 12, 0.35, 3);
    std::string txt = "var x 12\n";
    int k = 0;
    for (auto &e : g.edges)
        for (std::uint32_t c = 0; c < e.count; ++c)
            txt += "op o" + std::to_string(k++) + " 1\n pre x " + std::to_string(e.a) + "\n post x " +
                   std::to_string(e.b) + "\nend\n";
    txt += "init x 0\n";
    auto t = scratch() / "rand.sas";
    write(t, txt);
    auto csv = scratch() / "rand.csv";
    REQUIRE(cli("partition --task " + t.string() + " --csv " + csv.string()).code == 0);
    auto rows = csv_rows(read_file(csv.string()));
    REQUIRE(rows.size() == 2);
    auto bf = oracle::brute_partition(g, PartitionObjective::Sparsity);
    std::string a, b;
    for (std::uint32_t x = 0; x < 12; ++x) {
        auto &dst = bf.side[x] ? b : a;
        dst += (dst.empty() ? "" : " ") + std::to_string(x);
    }
    CHECK(rows[1][10] == a);
    CHECK(rows[1][11] == b);
}

TEST_CASE("cli: trace-compare") {
    auto t = scratch() / "t.csv";
    write(t, "# tiebreak=lifo sampled=0\nordinal,state_key,g,h,f\n1,01,0,1,1\n2,02,1,1,2\n3,03,2,1,3\n");
    auto rev = scratch() / "rev.csv";
    write(rev, "# tiebreak=lifo sampled=0\nordinal,state_key,g,h,f\n1,03,2,1,3\n2,02,1,1,2\n3,01,0,1,1\n");
    auto same = cli("trace-compare --ref " + t.string() + " --cand " + t.string());
    REQUIRE(same.code == 0);
    auto rows = csv_rows(same.out);
    REQUIRE(rows.size() == 3);
    CHECK(std::stod(rows[1][2]) == 0);
    CHECK(rows[1][3] == "0");
    CHECK(rows[2][0] == "mean");
    auto r = cli("trace-compare --ref " + t.string() + " --cand " + rev.string() + " --cand " + t.string());
    REQUIRE(r.code == 0);
    rows = csv_rows(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(std::stod(rows[1][2]) == doctest::Approx(4.0 / 3));
    CHECK(rows[1][3] == "2");
    CHECK(std::stod(rows[3][2]) == doctest::Approx(2.0 / 3));
    auto fifo = scratch() / "fifo.csv";
    write(fifo, "# tiebreak=fifo sampled=0\nordinal,state_key,g,h,f\n1,01,0,1,1\n");
    CHECK(cli("trace-compare --ref " + t.string() + " --cand " + fifo.string()).code == 1);
}

TEST_CASE("cli: generate and solve round trip is reproducible") {
    auto a = cli("generate tile --width 3 --height 3 --seed 5");
    auto b = cli("generate tile --width 3 --height 3 --seed 5");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto inst = scratch() / "gen.tile";
    write(inst, a.out);
    auto r1 = cli("solve --domain " + inst.string() + " -p 1 --trace " + (scratch() / "g1.csv").string());
    auto r2 = cli("solve --domain " + inst.string() + " -p 1 --trace " + (scratch() / "g2.csv").string());
    REQUIRE(r1.code == 0);
    CHECK(read_file((scratch() / "g1.csv").string()) == read_file((scratch() / "g2.csv").string()));
    auto j = nlohmann::json::parse(r1.out);
    CHECK(j["cost"].get<int>() == oracle::tile_cost(3, 3, TilePuzzle::parse(a.out)->board_of(TilePuzzle::parse(a.out)->initial_state())));
}
