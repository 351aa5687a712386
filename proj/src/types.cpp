#include "hdastar/types.hpp"

#include <cstdio>

namespace hdastar {

std::string PackedState::key() const {
    std::string out;
    char buf[17];
    bool started = false;
    for (int i = 3; i >= 0; --i) {
        if (!started && w[i] == 0 && i > 0)
            continue;
        if (!started) {
            std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(w[i]));
            started = true;
        } else {
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(w[i]));
        }
        out += buf;
    }
    return out;
}

PackedState PackedState::from_key(const std::string &s) {
    if (s.empty() || s.size() > 64)
        throw ConfigError("bad state key '" + s + "'");
    PackedState p;
    std::size_t end = s.size();
    for (int i = 0; i < 4 && end > 0; ++i) {
        std::size_t begin = end > 16 ? end - 16 : 0;
        std::string part = s.substr(begin, end - begin);
        std::size_t pos = 0;
        p.w[i] = std::stoull(part, &pos, 16);
        if (pos != part.size())
            throw ConfigError("bad state key '" + s + "'");
        end = begin;
    }
    return p;
}

StateCodec::StateCodec(std::span<const std::uint32_t> domain_sizes) {
    unsigned word = 0, used = 0;
    for (auto k : domain_sizes) {
        if (k == 0)
            throw ConfigError("variable with empty domain");
        unsigned b = 1;
        while ((1ULL << b) < k)
            ++b;
        if (used + b > 64) {
            ++word;
            used = 0;
        }
        if (word >= 4)
            throw ConfigError("state does not fit into 256 bits");
        bits_.push_back(static_cast<std::uint8_t>(b));
        word_.push_back(static_cast<std::uint8_t>(word));
        shift_.push_back(static_cast<std::uint8_t>(used));
        mask_.push_back((1ULL << b) - 1);
        used += b;
    }
}

PackedState StateCodec::pack(std::span<const Value> values) const {
    PackedState s;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        s.w[word_[i]] |= std::uint64_t(values[i]) << shift_[i];
    return s;
}

void StateCodec::unpack(const PackedState &s, std::span<Value> out) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
        out[i] = get(s, i);
}

std::uint64_t splitmix64(std::uint64_t &state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string &s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace hdastar
