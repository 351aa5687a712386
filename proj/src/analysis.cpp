#include "hdastar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hdastar {

std::vector<std::uint32_t> assign_owners(const WorkloadGraph &wg, const Domain &d,
                                         const DistributionStrategy &s, std::uint32_t p) {
    std::vector<std::uint32_t> own(wg.size());
    std::vector<Value> v(d.num_variables());
    for (std::size_t i = 0; i < wg.size(); ++i) {
        d.codec().unpack(wg.nodes[i], v);
        own[i] = s.owner(v, p);
    }
    return own;
}

ModelReport model_overheads(const WorkloadGraph &wg, const std::vector<std::uint32_t> &owners,
                            std::uint32_t p, double c, std::string strategy) {
    if (wg.size() == 0)
        throw ConfigError("empty workload graph");
    if (owners.size() != wg.size())
        throw ConfigError("owner labels do not match the workload graph");
    if (p < 1)
        throw ConfigError("p must be >= 1");
    ModelReport r;
    r.strategy = std::move(strategy);
    r.p = p;
    r.c = c;
    r.nodes = wg.size();
    r.edges = wg.edges.size();
    for (auto &[a, b] : wg.edges)
        r.cross_edges += owners[a] != owners[b];
    r.CO = r.edges ? double(r.cross_edges) / double(r.edges) : 0.0;
    std::vector<std::uint64_t> part(p, 0);
    for (auto o : owners) {
        if (o >= p)
            throw ConfigError("owner label out of range");
        ++part[o];
    }
    r.max_part = *std::max_element(part.begin(), part.end());
    r.LB = double(r.max_part * p) / double(r.nodes);
    r.SO = p * (r.LB - 1.0);
    r.ceff = 1.0 / (1.0 + c * r.CO);
    r.seff = 1.0 / (1.0 + r.SO);
    r.sceff = r.ceff * r.seff;
    return r;
}

ModelReport model_overheads(const WorkloadGraph &wg, const Domain &d, const DistributionStrategy &s,
                            std::uint32_t p, double c) {
    return model_overheads(wg, assign_owners(wg, d, s, p), p, c, s.name());
}

double divergence(const ExpansionTrace &reference, const ExpansionTrace &candidate) {
    if (reference.tiebreak && candidate.tiebreak && *reference.tiebreak != *candidate.tiebreak)
        throw ConfigError(std::string("traces use different tie-breaking (") + to_string(*reference.tiebreak) +
                          " vs " + to_string(*candidate.tiebreak) + ")");
    auto ref = reference.ordinals();
    double sum = 0;
    std::uint64_t n = 0;
    for (auto &r : candidate.rows) {
        auto it = ref.find(r.state);
        if (it == ref.end())
            continue;
        sum += std::fabs(double(it->second) - double(r.ordinal));
        ++n;
    }
    if (n == 0)
        throw ConfigError("traces share no expanded state");
    return sum / double(n);
}

std::uint64_t premature_expansions(const ExpansionTrace &candidate,
                                   const std::unordered_map<PackedState, Cost, PackedStateHash> *reference_f) {
    std::vector<Cost> f(candidate.rows.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto &r = candidate.rows[i];
        f[i] = r.f();
        if (reference_f) {
            auto it = reference_f->find(r.state);
            if (it != reference_f->end())
                f[i] = it->second;
        }
    }
    std::uint64_t count = 0;
    Cost later_min = kInfCost;
    for (std::size_t i = f.size(); i-- > 0;) {
        if (f[i] > later_min)
            ++count;
        later_min = std::min(later_min, f[i]);
    }
    return count;
}

double sparsity_of(const WorkloadGraph &wg, const std::vector<std::uint32_t> &owners, std::uint32_t p) {
    if (owners.size() != wg.size() || wg.size() == 0)
        throw ConfigError("owner labels do not match the workload graph");
    std::vector<std::uint64_t> part(p, 0);
    for (auto o : owners)
        ++part.at(o);
    double logp = 0;
    for (auto s : part) {
        if (s == 0)
            throw ConfigError("sparsity undefined with an empty part");
        logp += std::log(double(s) / double(wg.size()));
    }
    std::uint64_t cut = 0;
    for (auto &[a, b] : wg.edges)
        cut += owners[a] != owners[b];
    if (cut == 0)
        return std::numeric_limits<double>::infinity();
    return std::exp(logp - std::log(double(cut)));
}

double sparsity_of(const DomainTransitionGraph &g, const DtgPartition &part) {
    if (part.side.size() != g.num_vertices)
        throw ConfigError("partition does not match the DTG");
    std::uint64_t s1 = 0, s2 = 0, cut = 0;
    for (auto s : part.side)
        (s ? s2 : s1)++;
    if (s1 == 0 || s2 == 0)
        throw ConfigError("sparsity undefined with an empty side");
    for (auto &e : g.edges)
        if (part.side[e.a] != part.side[e.b])
            cut += e.count;
    if (cut == 0)
        return std::numeric_limits<double>::infinity();
    double n = g.num_vertices;
    return (double(s1) / n) * (double(s2) / n) / (double(cut) / double(g.denominator));
}

namespace {

std::vector<double> ranks(const std::vector<double> &x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]])
            ++j;
        double avg = (double(i) + double(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("spearman needs two equally long samples of size >= 2");
    auto rx = ranks(x), ry = ranks(y);
    double n = double(x.size());
    double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0)
        return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace hdastar
