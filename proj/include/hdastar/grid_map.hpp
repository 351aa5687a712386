#pragma once

#include "hdastar/domain.hpp"

#include <random>

namespace hdastar {

// 4-connected grid with unit moves. Variables: x, y.
class GridMap final : public Domain {
public:
    GridMap(int width, int height, std::vector<std::uint8_t> blocked, int sx, int sy, int gx, int gy);

    static std::shared_ptr<GridMap> parse(const std::string &text);
    std::string serialize() const;

    int width() const { return w_; }
    int height() const { return h_; }
    bool blocked(int x, int y) const { return blocked_[std::size_t(y) * w_ + x] != 0; }

    DomainKind kind() const override { return DomainKind::Grid; }
    std::string name() const override;
    const std::vector<std::uint32_t> &domain_sizes() const override { return sizes_; }
    const std::vector<std::string> &variable_names() const override { return names_; }
    PackedState initial_state() const override { return at(sx_, sy_); }
    bool is_goal(const PackedState &s) const override { return s == at(gx_, gy_); }
    Cost heuristic(const PackedState &s) const override;
    void successors(const PackedState &s, std::vector<Transition> &out) const override;

    PackedState at(int x, int y) const;
    std::pair<int, int> xy(const PackedState &s) const {
        return {codec_.get(s, 0), codec_.get(s, 1)};
    }

private:
    int w_, h_, sx_, sy_, gx_, gy_;
    std::vector<std::uint8_t> blocked_;
    std::vector<std::uint32_t> sizes_;
    std::vector<std::string> names_{"x", "y"};
};

// Random map with the given obstacle ratio. Start and goal are placed far
// apart inside the largest open component (double BFS sweep).
std::shared_ptr<GridMap> random_grid(int width, int height, double obstacle_ratio, std::mt19937_64 &rng);

}  // namespace hdastar
