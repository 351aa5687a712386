#pragma once

#include "hdastar/hashing.hpp"
#include "hdastar/sas_task.hpp"

#include <functional>

namespace hdastar {

struct DtgPartition {
    std::vector<std::uint8_t> side;  // 0 = S1, 1 = S2
    std::uint64_t cut_count = 0;     // sum of crossing edge counts
    double cut_weight = 0;
    std::uint32_t s1 = 0, s2 = 0;
    bool degenerate = false;         // fewer than two vertices
    bool used_fallback = false;      // vertex cap exceeded, greedy result

    double sparsity(std::uint32_t n) const;  // +inf for a zero cut
};

enum class PartitionObjective { Sparsity, CoLb };

const char *to_string(PartitionObjective o);

DtgPartition greedy_afg(const DomainTransitionGraph &g);

double fluency(const SasTask &task, std::uint32_t var);
// variables kept after dropping the floor(fraction * |vars|) most fluent ones
std::vector<std::uint32_t> fluency_filter(const SasTask &task, double fraction = 0.30);

struct PartitionOptions {
    std::uint32_t vertex_cap = 25;
    std::function<void(const std::string &)> warn;
};

// Exact branch and bound over all nontrivial bipartitions.
DtgPartition partition_dtg_bb(const DomainTransitionGraph &g, PartitionObjective obj,
                              const PartitionOptions &opt = {});

// objective value as a double (sparsity: larger is better; co_lb: smaller)
double objective_value(const DomainTransitionGraph &g, const DtgPartition &p, PartitionObjective obj);

enum class AfgMethod { Greedy, Fluency, Sparsity, CoLb };

AfgMethod parse_afg_method(const std::string &s);
const char *to_string(AfgMethod m);

struct ProjectionReportRow {
    std::uint32_t var;
    std::uint32_t vertices;
    bool partitioned;  // false for single-value or filtered variables
    DtgPartition partition;
    double objective;
};

struct GrazhdaOptions {
    double fluency_fraction = 0.30;  // used by AfgMethod::Fluency only
    PartitionOptions partition;
};

// Abstract feature of (var = val) is 2*var + side.
FeatureProjection grazhda_projection(const SasTask &task, AfgMethod method,
                                     const GrazhdaOptions &opt = {},
                                     std::vector<ProjectionReportRow> *report = nullptr);

}  // namespace hdastar
