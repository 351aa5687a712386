#include "hdastar/domain.hpp"

namespace hdastar {

std::size_t Domain::num_features() const {
    std::size_t n = 0;
    for (auto k : domain_sizes())
        n += k;
    return n;
}

std::vector<Feature> Domain::features_of(const PackedState &s) const {
    std::vector<Feature> f;
    f.reserve(num_variables());
    for (std::size_t i = 0; i < num_variables(); ++i)
        f.push_back({static_cast<std::uint32_t>(i), codec_.get(s, i)});
    return f;
}

}  // namespace hdastar
