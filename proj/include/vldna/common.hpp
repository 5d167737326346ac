#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vldna {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

using Bytes = std::vector<u8>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct IndexOverflow : Error { using Error::Error; };
struct LengthNotInGroup : Error { using Error::Error; };
struct MalformedStrand : Error { using Error::Error; };
struct InvalidCodeword : Error { using Error::Error; };
struct ExhaustedSearch : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct MissingStrand : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Deterministic 64-bit generator (splitmix64). All randomized behaviour in
// the library flows through this so runs are bit-reproducible.
// ---------------------------------------------------------------------------

class SplitMix64 {
public:
    explicit SplitMix64(u64 seed) : state_(seed) {}

    u64 next() {
        u64 z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4568bULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, bound)
    u64 below(u64 bound) { return bound ? next() % bound : 0; }

    double unit() { return (next() >> 11) * 0x1.0p-53; }

private:
    u64 state_;
};

inline Bytes random_bytes(std::size_t n, u64 seed) {
    SplitMix64 rng(seed);
    Bytes out(n);
    std::size_t i = 0;
    while (i + 8 <= n) {
        u64 w = rng.next();
        for (int k = 0; k < 8; k++) out[i++] = static_cast<u8>(w >> (8 * k));
    }
    if (i < n) {
        u64 w = rng.next();
        for (int k = 0; k < 8 && i < n; k++) out[i++] = static_cast<u8>(w >> (8 * k));
    }
    return out;
}

// XOR keystream used by payload randomization; involutive by construction.
inline void xor_keystream(Bytes& data, u64 seed) {
    SplitMix64 rng(seed);
    std::size_t i = 0;
    while (i + 8 <= data.size()) {
        u64 w = rng.next();
        for (int k = 0; k < 8; k++) data[i++] ^= static_cast<u8>(w >> (8 * k));
    }
    if (i < data.size()) {
        u64 w = rng.next();
        for (int k = 0; k < 8 && i < data.size(); k++) data[i++] ^= static_cast<u8>(w >> (8 * k));
    }
}

} // namespace vldna
