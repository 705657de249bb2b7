#pragma once

/// @file community.hpp
/// @brief Species communities as bitmask index sets with a canonical order.
///
/// A community is a subset of the species indices {0, ..., n-1} (0-based
/// internally; all user-facing text is 1-based). Sets are stored as bitmasks,
/// which caps n at 24 — consistent with the support-enumeration budget of the
/// solvers, which is exponential in n anyway.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "lvig/errors.hpp"

namespace lvig {

/// Maximum number of species the bitmask representation supports.
inline constexpr int kMaxSpecies = 24;

/// An immutable set of species indices.
class Community {
public:
    constexpr Community() = default;

    /// Constructs from a raw bitmask (bit i set <=> species i present).
    static constexpr Community from_bits(std::uint32_t bits) {
        Community c;
        c.bits_ = bits;
        return c;
    }

    /// Constructs from 0-based member indices, e.g. Community::of({0, 2}).
    static Community of(std::initializer_list<int> members) {
        std::uint32_t bits = 0;
        for (int i : members) {
            if (i < 0 || i >= kMaxSpecies)
                throw InvalidCommunity("species index " + std::to_string(i) +
                                       " out of range");
            bits |= (1u << i);
        }
        return from_bits(bits);
    }

    static constexpr Community empty() { return Community(); }

    /// The full community {0, ..., n-1}.
    static constexpr Community full(int n) {
        return from_bits(n >= 32 ? ~0u : ((1u << n) - 1u));
    }

    constexpr std::uint32_t bits() const { return bits_; }
    constexpr bool is_empty() const { return bits_ == 0; }
    constexpr int size() const { return std::popcount(bits_); }

    constexpr bool contains(int i) const { return (bits_ >> i) & 1u; }
    constexpr bool is_subset_of(Community o) const {
        return (bits_ & ~o.bits_) == 0;
    }

    constexpr Community with(int i) const { return from_bits(bits_ | (1u << i)); }
    constexpr Community without(int i) const {
        return from_bits(bits_ & ~(1u << i));
    }

    constexpr Community united(Community o) const {
        return from_bits(bits_ | o.bits_);
    }
    constexpr Community intersected(Community o) const {
        return from_bits(bits_ & o.bits_);
    }
    /// Set difference: members of *this that are not in o.
    constexpr Community minus(Community o) const {
        return from_bits(bits_ & ~o.bits_);
    }

    /// Ascending 0-based member indices.
    std::vector<int> members() const {
        std::vector<int> m;
        m.reserve(static_cast<std::size_t>(size()));
        for (std::uint32_t rest = bits_; rest != 0; rest &= rest - 1)
            m.push_back(std::countr_zero(rest));
        return m;
    }

    constexpr bool operator==(const Community&) const = default;

private:
    std::uint32_t bits_ = 0;
};

/// Canonical ordering: cardinality ascending, then lexicographic on the
/// ascending member lists. Note this is NOT numeric bitmask order: {1,4}
/// precedes {2,3} lexicographically although its mask (0b1001) is larger.
inline bool canonical_less(Community a, Community b) {
    if (a.size() != b.size()) return a.size() < b.size();
    std::uint32_t x = a.bits();
    std::uint32_t y = b.bits();
    while (x != 0 && y != 0) {
        const int i = std::countr_zero(x);
        const int j = std::countr_zero(y);
        if (i != j) return i < j;
        x &= x - 1;
        y &= y - 1;
    }
    return false;  // equal sets
}

/// Comparator type for ordered containers keyed by Community.
struct CanonicalLess {
    bool operator()(Community a, Community b) const {
        return canonical_less(a, b);
    }
};

/// Formats as a 1-based set, e.g. "{1,3}"; the empty community is "{}".
inline std::string to_string(Community c) {
    std::string s = "{";
    bool first = true;
    for (int i : c.members()) {
        if (!first) s += ',';
        s += std::to_string(i + 1);
        first = false;
    }
    s += '}';
    return s;
}

/// All 2^n subsets of {0,...,n-1} in canonical order.
inline std::vector<Community> enumerate_subsets(int n) {
    if (n < 0 || n > kMaxSpecies)
        throw PreconditionFailed("species count " + std::to_string(n) +
                                 " outside supported range [0, " +
                                 std::to_string(kMaxSpecies) + "]");
    std::vector<Community> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint32_t m = 0; m < (std::uint32_t{1} << n); ++m)
        out.push_back(Community::from_bits(m));
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

/// Invokes f(K) for every K with base ⊊ K ⊆ base ∪ extra, i.e. base extended
/// by every nonempty subset of extra \ base.
template <typename F>
void for_each_strict_extension(Community base, Community extra, F&& f) {
    const std::uint32_t pool = extra.minus(base).bits();
    // Standard submask walk; visits every nonempty submask s of pool once.
    for (std::uint32_t s = pool; s != 0; s = (s - 1) & pool)
        f(Community::from_bits(base.bits() | s));
}

}  // namespace lvig
