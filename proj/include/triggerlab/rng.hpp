#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace triggerlab {

inline constexpr uint64_t kFnvOffset = 1469598103934665603ull;
inline constexpr uint64_t kFnvPrime = 1099511628211ull;

inline uint64_t fnv1a64(std::string_view bytes, uint64_t h = kFnvOffset) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

// Derives an independent child seed from a root seed and a subsystem name,
// so train/attack/defense streams can be reproduced in isolation.
inline uint64_t child_seed(uint64_t root, std::string_view name) {
    uint64_t h = fnv1a64(name);
    h ^= root + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

inline std::mt19937_64 child_rng(uint64_t root, std::string_view name) {
    return std::mt19937_64(child_seed(root, name));
}

}  // namespace triggerlab
