#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "rtpool/errors.hpp"

namespace rtpool {

/// A strictly increasing set of point indices. Equality and ordering are
/// lexicographic on the index sequence; that ordering defines dense vertex
/// ids everywhere downstream.
class SubsetKey {
public:
    SubsetKey() = default;

    explicit SubsetKey(std::vector<int> indices) : idx_(std::move(indices)) {
        for (std::size_t i = 0; i < idx_.size(); ++i) {
            if (idx_[i] < 0 || (i > 0 && idx_[i] <= idx_[i - 1]))
                throw InvariantViolation("SubsetKey indices must be strictly increasing and non-negative");
        }
    }

    SubsetKey(std::initializer_list<int> indices) : SubsetKey(std::vector<int>(indices)) {}

    static SubsetKey from_mask(std::uint64_t mask) {
        std::vector<int> idx;
        while (mask) {
            int b = __builtin_ctzll(mask);
            idx.push_back(b);
            mask &= mask - 1;
        }
        SubsetKey k;
        k.idx_ = std::move(idx);
        return k;
    }

    std::uint64_t mask() const {
        std::uint64_t m = 0;
        for (int i : idx_) m |= 1ULL << i;
        return m;
    }

    int size() const { return static_cast<int>(idx_.size()); }
    bool empty() const { return idx_.empty(); }
    const std::vector<int>& indices() const { return idx_; }
    int operator[](int i) const { return idx_[i]; }

    bool contains(int i) const {
        for (int v : idx_)
            if (v == i) return true;
        return false;
    }

    auto begin() const { return idx_.begin(); }
    auto end() const { return idx_.end(); }

    auto operator<=>(const SubsetKey& o) const = default;

    std::string to_string() const {
        std::string s = "{";
        for (std::size_t i = 0; i < idx_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(idx_[i]);
        }
        return s + "}";
    }

private:
    std::vector<int> idx_;
};

inline bool is_subset(std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; }

}  // namespace rtpool
