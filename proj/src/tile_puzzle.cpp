#include "hdastar/tile_puzzle.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace hdastar {

TilePuzzle::TilePuzzle(int width, int height, std::vector<int> board) : w_(width), h_(height) {
    if (w_ < 2 || h_ < 1 || w_ * h_ > 20)
        throw ConfigError("unsupported tile puzzle size");
    int n = w_ * h_;
    if (static_cast<int>(board.size()) != n)
        throw ConfigError("tile board has wrong length");
    std::vector<int> seen(n, 0);
    for (int t : board) {
        if (t < 0 || t >= n || seen[t]++)
            throw ConfigError("tile board is not a permutation of 0..n-1");
    }
    sizes_.assign(n - 1, static_cast<std::uint32_t>(n));
    for (int t = 1; t < n; ++t)
        names_.push_back("tile" + std::to_string(t));
    codec_ = StateCodec(sizes_);
    init_ = pack_board(board);
    std::vector<int> goal(n);
    for (int i = 0; i < n; ++i)
        goal[i] = i;
    goal_ = pack_board(goal);
}

std::shared_ptr<TilePuzzle> TilePuzzle::parse(const std::string &text) {
    std::istringstream in(text);
    int w, h;
    if (!(in >> w >> h))
        throw ParseError(1, "expected '<w> <h>'");
    std::vector<int> board;
    int t;
    while (in >> t)
        board.push_back(t);
    if (!in.eof())
        throw ParseError(2, "non-numeric token in tile board");
    return std::make_shared<TilePuzzle>(w, h, board);
}

std::string TilePuzzle::serialize() const {
    std::ostringstream o;
    o << w_ << ' ' << h_ << '\n';
    auto b = board_of(init_);
    for (int y = 0; y < h_; ++y) {
        for (int x = 0; x < w_; ++x)
            o << (x ? " " : "") << b[y * w_ + x];
        o << '\n';
    }
    return o.str();
}

std::string TilePuzzle::name() const {
    return "tile" + std::to_string(w_) + "x" + std::to_string(h_);
}

PackedState TilePuzzle::pack_board(const std::vector<int> &board) const {
    std::vector<Value> v(cells() - 1);
    for (int pos = 0; pos < cells(); ++pos)
        if (board[pos] != 0)
            v[board[pos] - 1] = static_cast<Value>(pos);
    return codec_.pack(v);
}

std::vector<int> TilePuzzle::board_of(const PackedState &s) const {
    std::vector<int> b(cells(), 0);
    for (int t = 1; t < cells(); ++t)
        b[codec_.get(s, t - 1)] = t;
    return b;
}

int TilePuzzle::blank_of(const PackedState &s) const {
    std::uint32_t used = 0;
    for (int t = 1; t < cells(); ++t)
        used |= 1u << codec_.get(s, t - 1);
    for (int p = 0; p < cells(); ++p)
        if (!(used & (1u << p)))
            return p;
    return -1;
}

Cost TilePuzzle::heuristic(const PackedState &s) const {
    Cost h = 0;
    for (int t = 1; t < cells(); ++t) {
        int p = codec_.get(s, t - 1);
        h += std::abs(p % w_ - t % w_) + std::abs(p / w_ - t / w_);
    }
    return h;
}

void TilePuzzle::successors(const PackedState &s, std::vector<Transition> &out) const {
    out.clear();
    int at[32];
    std::uint32_t used = 0;
    for (int t = 1; t < cells(); ++t) {
        int p = codec_.get(s, t - 1);
        at[p] = t;
        used |= 1u << p;
    }
    int b = 0;
    while (used & (1u << b))
        ++b;
    int bx = b % w_, by = b / w_;
    auto push = [&](int q) {
        PackedState c = s;
        codec_.set(c, at[q] - 1, static_cast<Value>(b));
        out.push_back({c, 1});
    };
    // fixed order: up, left, right, down
    if (by > 0) push(b - w_);
    if (bx > 0) push(b - 1);
    if (bx + 1 < w_) push(b + 1);
    if (by + 1 < h_) push(b + w_);
}

bool tile_board_solvable(int width, int height, const std::vector<int> &board) {
    int n = width * height, inv = 0, blank_row = 0;
    for (int i = 0; i < n; ++i) {
        if (board[i] == 0) {
            blank_row = i / width;
            continue;
        }
        for (int j = i + 1; j < n; ++j)
            if (board[j] != 0 && board[j] < board[i])
                ++inv;
    }
    // goal has blank at row 0 and zero inversions
    if (width % 2 == 1)
        return inv % 2 == 0;
    return (inv + blank_row) % 2 == 0;
}

std::vector<int> random_tile_board(int width, int height, std::mt19937_64 &rng) {
    int n = width * height;
    std::vector<int> b(n);
    for (int i = 0; i < n; ++i)
        b[i] = i;
    do {
        for (int i = n - 1; i > 0; --i) {
            std::uniform_int_distribution<int> d(0, i);
            std::swap(b[i], b[d(rng)]);
        }
    } while (!tile_board_solvable(width, height, b));
    return b;
}

std::vector<int> random_walk_tile_board(int width, int height, int steps, std::mt19937_64 &rng) {
    int n = width * height;
    std::vector<int> b(n);
    for (int i = 0; i < n; ++i)
        b[i] = i;
    int blank = 0, prev = -1;
    for (int k = 0; k < steps; ++k) {
        int cand[4], m = 0;
        int x = blank % width, y = blank / width;
        if (y > 0) cand[m++] = blank - width;
        if (x > 0) cand[m++] = blank - 1;
        if (x + 1 < width) cand[m++] = blank + 1;
        if (y + 1 < height) cand[m++] = blank + width;
        int q;
        do {
            q = cand[std::uniform_int_distribution<int>(0, m - 1)(rng)];
        } while (q == prev && m > 1);
        std::swap(b[blank], b[q]);
        prev = blank;
        blank = q;
    }
    return b;
}

}  // namespace hdastar
