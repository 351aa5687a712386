#pragma once

#include "hdastar/astar.hpp"
#include "hdastar/feature_gen.hpp"
#include "hdastar/hashing.hpp"

namespace hdastar {

struct ModelReport {
    std::string strategy;
    std::uint32_t p = 1;
    double c = 1.0;
    double CO = 0, LB = 1, SO = 0, ceff = 1, seff = 1, sceff = 1;
    std::uint64_t nodes = 0, edges = 0, cross_edges = 0, max_part = 0;
};

std::vector<std::uint32_t> assign_owners(const WorkloadGraph &wg, const Domain &d,
                                         const DistributionStrategy &s, std::uint32_t p);

ModelReport model_overheads(const WorkloadGraph &wg, const std::vector<std::uint32_t> &owners,
                            std::uint32_t p, double c = 1.0, std::string strategy = {});
ModelReport model_overheads(const WorkloadGraph &wg, const Domain &d, const DistributionStrategy &s,
                            std::uint32_t p, double c = 1.0);

// mean |N_ref(s) - N_cand(s)| over states in both traces
double divergence(const ExpansionTrace &reference, const ExpansionTrace &candidate);

// expansions followed later by an expansion of strictly lower f. f comes from
// reference_f when the state is listed there, else from the trace row.
std::uint64_t premature_expansions(
    const ExpansionTrace &candidate,
    const std::unordered_map<PackedState, Cost, PackedStateHash> *reference_f = nullptr);

// product of normalized part sizes over cut weight, computed in log space
double sparsity_of(const WorkloadGraph &wg, const std::vector<std::uint32_t> &owners, std::uint32_t p);
double sparsity_of(const DomainTransitionGraph &g, const DtgPartition &part);

double spearman(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace hdastar
