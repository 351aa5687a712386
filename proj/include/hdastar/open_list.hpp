#pragma once

#include "hdastar/types.hpp"

#include <deque>
#include <queue>
#include <string>
#include <vector>

namespace hdastar {

enum class TieBreak { LIFO, FIFO };
enum class Backend { Bucket, Heap };

TieBreak parse_tiebreak(const std::string &s);
Backend parse_backend(const std::string &s);
const char *to_string(TieBreak t);
const char *to_string(Backend b);

struct OpenEntry {
    PackedState state;
    Cost g;
    Cost f;
};

// Min-f open list. Both backends pop in the same order: minimal f, then
// newest (LIFO) or oldest (FIFO) insertion.
class OpenList {
public:
    OpenList(Backend backend, TieBreak tiebreak) : backend_(backend), tb_(tiebreak) {}

    void push(const OpenEntry &e);
    OpenEntry pop();
    const OpenEntry &top() const;
    bool empty() const { return size_ == 0; }
    std::size_t size() const { return size_; }
    Cost min_f() const;

    Backend backend() const { return backend_; }
    TieBreak tiebreak() const { return tb_; }

private:
    struct HeapItem {
        Cost f;
        std::uint64_t key;  // encodes the tie-break order
        OpenEntry e;
        bool operator>(const HeapItem &o) const { return f != o.f ? f > o.f : key > o.key; }
    };

    Backend backend_;
    TieBreak tb_;
    std::size_t size_ = 0;
    std::uint64_t seq_ = 0;
    // bucket backend
    std::vector<std::deque<OpenEntry>> buckets_;
    mutable Cost lo_ = kInfCost;
    // heap backend
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap_;
};

}  // namespace hdastar
