#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdastar {

using Cost = std::uint32_t;
using Value = std::uint16_t;

constexpr Cost kInfCost = std::numeric_limits<Cost>::max();

// Thrown for bad strategy specs, malformed inputs and similar.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(int line, const std::string &msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
    int line;
};

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Unsolvable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed-size bit packed state, 256 bits.
struct PackedState {
    std::array<std::uint64_t, 4> w{};

    bool operator==(const PackedState &o) const = default;
    bool operator<(const PackedState &o) const { return w < o.w; }

    std::size_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (auto x : w) {
            h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdULL;
        }
        return static_cast<std::size_t>(h ^ (h >> 33));
    }

    // hex words, most significant first, leading zero words dropped
    std::string key() const;
    static PackedState from_key(const std::string &s);
};

struct PackedStateHash {
    std::size_t operator()(const PackedState &s) const { return s.hash(); }
};

// Maps a vector of small integer values to a PackedState and back.
// A value never straddles two words.
class StateCodec {
public:
    StateCodec() = default;
    explicit StateCodec(std::span<const std::uint32_t> domain_sizes);

    std::size_t size() const { return bits_.size(); }
    PackedState pack(std::span<const Value> values) const;
    void unpack(const PackedState &s, std::span<Value> out) const;
    Value get(const PackedState &s, std::size_t var) const {
        return static_cast<Value>((s.w[word_[var]] >> shift_[var]) & mask_[var]);
    }
    void set(PackedState &s, std::size_t var, Value v) const {
        auto &wd = s.w[word_[var]];
        wd = (wd & ~(mask_[var] << shift_[var])) | (std::uint64_t(v) << shift_[var]);
    }

private:
    std::vector<std::uint8_t> bits_, word_, shift_;
    std::vector<std::uint64_t> mask_;
};

struct Feature {
    std::uint32_t var;
    Value value;
    bool operator==(const Feature &) const = default;
};

std::uint64_t splitmix64(std::uint64_t &state);

// FNV-1a, used for config hashes.
std::uint64_t fnv1a(const std::string &s);

}  // namespace hdastar
