#pragma once

#include "hdastar/domain.hpp"

#include <optional>

namespace hdastar {

struct SasEffect {
    std::uint32_t var;
    int pre = -1;   // -1: any value
    int post = -1;  // -1: no change (prevail condition)
};

struct SasOperator {
    std::string name;
    Cost cost = 1;
    std::vector<SasEffect> effects;  // sorted by var, one entry per var
};

struct SasVariable {
    std::string name;
    std::uint32_t size;
};

struct SasTask {
    std::vector<SasVariable> variables;
    std::vector<SasOperator> operators;
    std::vector<Value> init;
    std::vector<std::pair<std::uint32_t, Value>> goal;
    // set by a `flag single_effect` line; enables the goal-count heuristic
    bool single_effect = false;

    int find_variable(const std::string &name) const;
};

// Line-oriented text format. Blank lines and lines starting with ';' or
// '#' are ignored.
//   var <name> <k>
//   op <name> <cost>
//     pre <var> <val|*>
//     post <var> <val>
//   end
//   init <var> <val>
//   goal <var> <val>
//   flag single_effect
SasTask parse_sas(const std::string &text);
std::string serialize_sas(const SasTask &task);

enum class SasHeuristic { Blind, GoalCount };

class SasDomain final : public Domain {
public:
    explicit SasDomain(SasTask task, SasHeuristic h = SasHeuristic::Blind);

    const SasTask &task() const { return task_; }

    DomainKind kind() const override { return DomainKind::Sas; }
    std::string name() const override { return "sas"; }
    const std::vector<std::uint32_t> &domain_sizes() const override { return sizes_; }
    const std::vector<std::string> &variable_names() const override { return names_; }
    PackedState initial_state() const override { return init_; }
    bool is_goal(const PackedState &s) const override;
    Cost heuristic(const PackedState &s) const override;
    void successors(const PackedState &s, std::vector<Transition> &out) const override;

    // operators applicable in s, in task order
    std::vector<std::uint32_t> applicable(const PackedState &s) const;

private:
    SasTask task_;
    SasHeuristic heur_;
    std::vector<std::uint32_t> sizes_;
    std::vector<std::string> names_;
    PackedState init_;
    // ops indexed by the value of their first constrained variable
    std::vector<std::vector<std::vector<std::uint32_t>>> by_pre_;
    std::vector<std::uint32_t> unconstrained_;
};

struct DtgEdge {
    std::uint32_t a, b;  // a < b
    std::uint64_t count; // operator transitions inducing a<->b
};

// Domain transition graph of one variable. Weights are count / denominator.
struct DomainTransitionGraph {
    std::uint32_t var = 0;
    std::uint32_t num_vertices = 0;
    std::vector<DtgEdge> edges;  // sorted by (a, b)
    std::uint64_t denominator = 0;
    std::uint64_t affecting_operators = 0;

    double weight(const DtgEdge &e) const {
        return denominator ? double(e.count) / double(denominator) : 0.0;
    }
    double total_weight() const;
    std::uint64_t total_count() const;
};

DomainTransitionGraph extract_dtg(const SasTask &task, std::uint32_t var);

}  // namespace hdastar
