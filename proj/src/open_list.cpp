#include "hdastar/open_list.hpp"

namespace hdastar {

TieBreak parse_tiebreak(const std::string &s) {
    if (s == "lifo" || s == "LIFO")
        return TieBreak::LIFO;
    if (s == "fifo" || s == "FIFO")
        return TieBreak::FIFO;
    throw ConfigError("unknown tie-break '" + s + "' (lifo|fifo)");
}

Backend parse_backend(const std::string &s) {
    if (s == "bucket")
        return Backend::Bucket;
    if (s == "heap")
        return Backend::Heap;
    throw ConfigError("unknown open-list backend '" + s + "' (bucket|heap)");
}

const char *to_string(TieBreak t) { return t == TieBreak::LIFO ? "lifo" : "fifo"; }
const char *to_string(Backend b) { return b == Backend::Bucket ? "bucket" : "heap"; }

void OpenList::push(const OpenEntry &e) {
    ++size_;
    if (backend_ == Backend::Heap) {
        std::uint64_t s = seq_++;
        heap_.push({e.f, tb_ == TieBreak::LIFO ? ~s : s, e});
        return;
    }
    if (e.f >= buckets_.size()) {
        if (e.f > (1u << 26))
            throw BudgetExceeded("f value too large for bucket open list; use the heap backend");
        buckets_.resize(std::size_t(e.f) + 1);
    }
    buckets_[e.f].push_back(e);
    if (e.f < lo_)
        lo_ = e.f;
}

OpenEntry OpenList::pop() {
    --size_;
    if (backend_ == Backend::Heap) {
        OpenEntry e = heap_.top().e;
        heap_.pop();
        return e;
    }
    while (buckets_[lo_].empty())
        ++lo_;
    auto &b = buckets_[lo_];
    OpenEntry e;
    if (tb_ == TieBreak::LIFO) {
        e = b.back();
        b.pop_back();
    } else {
        e = b.front();
        b.pop_front();
    }
    if (size_ == 0)
        lo_ = kInfCost;
    return e;
}

const OpenEntry &OpenList::top() const {
    if (backend_ == Backend::Heap)
        return heap_.top().e;
    while (buckets_[lo_].empty())
        ++lo_;
    auto &b = buckets_[lo_];
    return tb_ == TieBreak::LIFO ? b.back() : b.front();
}

Cost OpenList::min_f() const {
    if (size_ == 0)
        return kInfCost;
    if (backend_ == Backend::Heap)
        return heap_.top().f;
    while (buckets_[lo_].empty())
        ++lo_;
    return lo_;
}

}  // namespace hdastar
