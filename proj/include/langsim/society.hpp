#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace langsim {

/// Upper bound on catalog size supported by the fixed-capacity agent stacks.
inline constexpr int kMaxZones = 32;

/// A language stack plus residence. The stack is an ordered, duplicate-free
/// list of zone ids (order[0] is the native language) mirrored by a bitmask
/// for O(1) membership tests.
struct Agent {
    std::uint64_t id = 0;
    std::uint32_t mask = 0;
    std::uint8_t size = 0;
    std::uint8_t residence = 0;
    std::array<std::uint8_t, kMaxZones> order{};

    static Agent born(std::uint64_t id, int native) {
        Agent a;
        a.id = id;
        a.residence = static_cast<std::uint8_t>(native);
        a.push(native);
        return a;
    }

    int native() const noexcept { return order[0]; }
    bool speaks(int zone) const noexcept { return (mask >> zone) & 1u; }
    std::span<const std::uint8_t> stack() const noexcept { return {order.data(), size}; }

    /// Appends `zone` unless it is already on the stack (the stack top is
    /// discarded when it repeats). Returns whether the stack grew.
    bool push(int zone) noexcept {
        if (speaks(zone)) return false;
        order[size++] = static_cast<std::uint8_t>(zone);
        mask |= 1u << zone;
        return true;
    }

    /// Stack/bitmask consistency and uniqueness.
    bool well_formed() const noexcept {
        std::uint32_t seen = 0;
        for (int k = 0; k < size; ++k) {
            const std::uint32_t bit = 1u << order[k];
            if (seen & bit) return false;
            seen |= bit;
        }
        return size > 0 && seen == mask && std::popcount(mask) == size;
    }

    bool operator==(const Agent& o) const noexcept {
        return id == o.id && mask == o.mask && size == o.size && residence == o.residence &&
               std::equal(order.begin(), order.begin() + size, o.order.begin());
    }
};

struct Society {
    std::vector<Agent> agents;
    double scale = 1.0;  // persons represented by one agent
    int year = 0;
    int zones = 0;
    std::uint64_t next_id = 0;
};

}  // namespace langsim
