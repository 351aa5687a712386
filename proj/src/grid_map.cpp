#include "hdastar/grid_map.hpp"

#include <cstdio>
#include <cstdlib>
#include <deque>
#include <sstream>

namespace hdastar {

GridMap::GridMap(int width, int height, std::vector<std::uint8_t> blocked, int sx, int sy, int gx,
                 int gy)
    : w_(width), h_(height), sx_(sx), sy_(sy), gx_(gx), gy_(gy), blocked_(std::move(blocked)) {
    if (w_ < 1 || h_ < 1 || w_ > 65535 || h_ > 65535)
        throw ConfigError("bad grid dimensions");
    if (blocked_.size() != std::size_t(w_) * h_)
        throw ConfigError("grid bitmap has wrong size");
    auto inside = [&](int x, int y) { return x >= 0 && y >= 0 && x < w_ && y < h_; };
    if (!inside(sx, sy) || !inside(gx, gy))
        throw ConfigError("start or goal outside the grid");
    if (this->blocked(sx, sy) || this->blocked(gx, gy))
        throw ConfigError("start or goal on an obstacle");
    sizes_ = {static_cast<std::uint32_t>(w_), static_cast<std::uint32_t>(h_)};
    codec_ = StateCodec(sizes_);
}

std::shared_ptr<GridMap> GridMap::parse(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto next = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (!line.empty())
                return true;
        }
        return false;
    };
    if (!next())
        throw ParseError(1, "empty grid file");
    int w, h;
    if (std::sscanf(line.c_str(), "%d %d", &w, &h) != 2 || w < 1 || h < 1)
        throw ParseError(lineno, "expected '<w> <h>'");
    std::vector<std::uint8_t> b(std::size_t(w) * h);
    for (int y = 0; y < h; ++y) {
        if (!next())
            throw ParseError(lineno, "missing grid row");
        if (static_cast<int>(line.size()) != w)
            throw ParseError(lineno, "row has wrong width");
        for (int x = 0; x < w; ++x) {
            if (line[x] == '#')
                b[std::size_t(y) * w + x] = 1;
            else if (line[x] != '.')
                throw ParseError(lineno, "unexpected character in grid row");
        }
    }
    int sx = -1, sy = -1, gx = -1, gy = -1;
    while (next()) {
        std::istringstream ls(line);
        std::string kw;
        int x, y;
        if (!(ls >> kw >> x >> y))
            throw ParseError(lineno, "expected 'start x y' or 'goal x y'");
        if (kw == "start")
            sx = x, sy = y;
        else if (kw == "goal")
            gx = x, gy = y;
        else
            throw ParseError(lineno, "unknown directive '" + kw + "'");
    }
    if (sx < 0 || gx < 0)
        throw ParseError(lineno, "missing start or goal");
    return std::make_shared<GridMap>(w, h, std::move(b), sx, sy, gx, gy);
}

std::string GridMap::serialize() const {
    std::ostringstream o;
    o << w_ << ' ' << h_ << '\n';
    for (int y = 0; y < h_; ++y) {
        for (int x = 0; x < w_; ++x)
            o << (blocked(x, y) ? '#' : '.');
        o << '\n';
    }
    o << "start " << sx_ << ' ' << sy_ << "\ngoal " << gx_ << ' ' << gy_ << '\n';
    return o.str();
}

std::string GridMap::name() const {
    return "grid" + std::to_string(w_) + "x" + std::to_string(h_);
}

PackedState GridMap::at(int x, int y) const {
    Value v[2] = {static_cast<Value>(x), static_cast<Value>(y)};
    return codec_.pack(v);
}

Cost GridMap::heuristic(const PackedState &s) const {
    auto [x, y] = xy(s);
    return std::abs(x - gx_) + std::abs(y - gy_);
}

void GridMap::successors(const PackedState &s, std::vector<Transition> &out) const {
    out.clear();
    auto [x, y] = xy(s);
    if (y > 0 && !blocked(x, y - 1)) out.push_back({at(x, y - 1), 1});
    if (x > 0 && !blocked(x - 1, y)) out.push_back({at(x - 1, y), 1});
    if (x + 1 < w_ && !blocked(x + 1, y)) out.push_back({at(x + 1, y), 1});
    if (y + 1 < h_ && !blocked(x, y + 1)) out.push_back({at(x, y + 1), 1});
}

namespace {

// BFS distances from (sx,sy); -1 for unreachable
std::vector<int> bfs(const std::vector<std::uint8_t> &b, int w, int h, int sx, int sy) {
    std::vector<int> d(b.size(), -1);
    std::deque<int> q;
    d[std::size_t(sy) * w + sx] = 0;
    q.push_back(sy * w + sx);
    while (!q.empty()) {
        int c = q.front();
        q.pop_front();
        int x = c % w, y = c / w;
        int nb[4] = {y > 0 ? c - w : -1, x > 0 ? c - 1 : -1, x + 1 < w ? c + 1 : -1,
                     y + 1 < h ? c + w : -1};
        for (int n : nb) {
            if (n >= 0 && !b[n] && d[n] < 0) {
                d[n] = d[c] + 1;
                q.push_back(n);
            }
        }
    }
    return d;
}

}  // namespace

std::shared_ptr<GridMap> random_grid(int width, int height, double obstacle_ratio, std::mt19937_64 &rng) {
    std::vector<std::uint8_t> b(std::size_t(width) * height);
    std::bernoulli_distribution obst(obstacle_ratio);
    for (auto &c : b)
        c = obst(rng) ? 1 : 0;

    // largest component by repeated BFS
    std::vector<int> comp(b.size(), -1);
    int best_cell = -1;
    std::size_t best_size = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] || comp[i] >= 0)
            continue;
        auto d = bfs(b, width, height, int(i % width), int(i / width));
        std::size_t sz = 0;
        for (std::size_t j = 0; j < d.size(); ++j)
            if (d[j] >= 0) {
                comp[j] = int(i);
                ++sz;
            }
        if (sz > best_size) {
            best_size = sz;
            best_cell = int(i);
        }
    }
    if (best_cell < 0) {
        b[0] = 0;
        return std::make_shared<GridMap>(width, height, b, 0, 0, 0, 0);
    }
    auto far = [&](const std::vector<int> &d) {
        int arg = -1;
        for (std::size_t j = 0; j < d.size(); ++j)
            if (d[j] >= 0 && (arg < 0 || d[j] > d[arg]))
                arg = int(j);
        return arg;
    };
    int a = far(bfs(b, width, height, best_cell % width, best_cell / width));
    int z = far(bfs(b, width, height, a % width, a / width));
    return std::make_shared<GridMap>(width, height, b, a % width, a / width, z % width, z / width);
}

}  // namespace hdastar
