#pragma once

#include "hdastar/domain.hpp"

#include <random>

namespace hdastar {

// Sliding tile puzzle. Variable i is the position of tile i+1; the blank
// is implied by the one free position. Goal has tile t at position t and
// the blank at 0.
class TilePuzzle final : public Domain {
public:
    // board[pos] = tile at pos, 0 = blank
    TilePuzzle(int width, int height, std::vector<int> board);

    static std::shared_ptr<TilePuzzle> parse(const std::string &text);
    std::string serialize() const;

    int width() const { return w_; }
    int height() const { return h_; }
    int cells() const { return w_ * h_; }

    DomainKind kind() const override { return DomainKind::Tile; }
    std::string name() const override;
    const std::vector<std::uint32_t> &domain_sizes() const override { return sizes_; }
    const std::vector<std::string> &variable_names() const override { return names_; }
    PackedState initial_state() const override { return init_; }
    bool is_goal(const PackedState &s) const override { return s == goal_; }
    Cost heuristic(const PackedState &s) const override;
    void successors(const PackedState &s, std::vector<Transition> &out) const override;

    PackedState goal_state() const { return goal_; }
    PackedState pack_board(const std::vector<int> &board) const;
    std::vector<int> board_of(const PackedState &s) const;
    int blank_of(const PackedState &s) const;

private:
    int w_, h_;
    std::vector<std::uint32_t> sizes_;
    std::vector<std::string> names_;
    PackedState init_, goal_;
};

bool tile_board_solvable(int width, int height, const std::vector<int> &board);
// uniformly random solvable board
std::vector<int> random_tile_board(int width, int height, std::mt19937_64 &rng);
// board reached by a random walk of `steps` moves from the goal, no immediate undo
std::vector<int> random_walk_tile_board(int width, int height, int steps, std::mt19937_64 &rng);

}  // namespace hdastar
