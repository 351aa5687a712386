#pragma once

#include "hdastar/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hdastar {

struct Transition {
    PackedState state;
    Cost cost;
};

enum class DomainKind { Tile, Grid, Sas };

// A state space with integer-valued variables. Every state assigns one
// value per variable; features are the (variable, value) pairs.
class Domain {
public:
    virtual ~Domain() = default;

    virtual DomainKind kind() const = 0;
    virtual std::string name() const = 0;
    virtual const std::vector<std::uint32_t> &domain_sizes() const = 0;
    virtual const std::vector<std::string> &variable_names() const = 0;

    virtual PackedState initial_state() const = 0;
    virtual bool is_goal(const PackedState &s) const = 0;
    virtual Cost heuristic(const PackedState &s) const = 0;
    virtual void successors(const PackedState &s, std::vector<Transition> &out) const = 0;

    const StateCodec &codec() const { return codec_; }
    std::size_t num_variables() const { return domain_sizes().size(); }
    std::size_t num_features() const;

    std::vector<Value> values(const PackedState &s) const {
        std::vector<Value> v(num_variables());
        codec_.unpack(s, v);
        return v;
    }
    std::vector<Feature> features_of(const PackedState &s) const;

protected:
    StateCodec codec_;
};

using DomainPtr = std::shared_ptr<const Domain>;

}  // namespace hdastar
