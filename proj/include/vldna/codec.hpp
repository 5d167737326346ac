#pragma once

#include <array>
#include <fstream>
#include <string>
#include <vector>

#include "vldna/common.hpp"
#include "vldna/seqcore.hpp"

namespace vldna {

enum class CodecId { Rotation, Blawat, Grass };

inline const char* codec_name(CodecId c) {
    switch (c) {
        case CodecId::Rotation: return "rotation";
        case CodecId::Blawat: return "blawat";
        case CodecId::Grass: return "grass";
    }
    return "?";
}

inline CodecId parse_codec(const std::string& s) {
    if (s == "rotation") return CodecId::Rotation;
    if (s == "blawat") return CodecId::Blawat;
    if (s == "grass") return CodecId::Grass;
    throw Error("unknown codec '" + s + "' (expected rotation|blawat|grass)");
}

// Nominal bits/base, as reported alongside the schemes.
inline double codec_density(CodecId c) {
    switch (c) {
        case CodecId::Rotation: return 1.58;
        case CodecId::Blawat: return 1.6;
        case CodecId::Grass: return 1.78;
    }
    return 0;
}

namespace detail {

// ---------------------------------------------------------------------------
// Rotation code: bytes -> ternary digits (exact base-3 expansion of 19-byte
// blocks), each digit selecting one of the three bases that differ from the
// previously emitted base. 19 bytes <-> 96 digits gives 152/96 = 1.5833
// bits/base; tail blocks use the smallest digit count whose code space fits.
// ---------------------------------------------------------------------------

inline constexpr int kRotationBlockBytes = 19;
inline constexpr int kRotationBlockDigits = 96;

// digits_for_bytes[b] = min d with 3^d >= 2^(8b), computed exactly.
inline const std::array<int, kRotationBlockBytes + 1>& rotation_digit_table() {
    static const std::array<int, kRotationBlockBytes + 1> table = [] {
        std::array<int, kRotationBlockBytes + 1> t{};
        std::vector<u32> pow3{1};  // base 2^32 limbs, little-endian
        auto bitlen = [&] {
            std::size_t top = pow3.size() - 1;
            u32 w = pow3[top];
            int bits = 0;
            while (w) { bits++; w >>= 1; }
            return static_cast<int>(top * 32 + bits);
        };
        int d = 0;
        for (int b = 0; b <= kRotationBlockBytes; b++) {
            while (bitlen() < 8 * b + 1) {
                u64 carry = 0;
                for (auto& limb : pow3) {
                    u64 v = u64(limb) * 3 + carry;
                    limb = static_cast<u32>(v);
                    carry = v >> 32;
                }
                if (carry) pow3.push_back(static_cast<u32>(carry));
                d++;
            }
            t[b] = d;
        }
        return t;
    }();
    return table;
}

// value digits of a byte block, most significant digit first
inline void rotation_block_digits(const u8* bytes, int nbytes, u8* digits_out) {
    int ndigits = rotation_digit_table()[nbytes];
    u64 limbs[3] = {0, 0, 0};  // little-endian, up to 152 bits
    for (int i = 0; i < nbytes; i++) {
        // shift left 8 and add
        limbs[2] = (limbs[2] << 8) | (limbs[1] >> 56);
        limbs[1] = (limbs[1] << 8) | (limbs[0] >> 56);
        limbs[0] = (limbs[0] << 8) | bytes[i];
    }
    for (int k = ndigits - 1; k >= 0; k--) {
        u64 rem = 0;
        for (int i = 2; i >= 0; i--) {
            unsigned __int128 cur = (static_cast<unsigned __int128>(rem) << 64) | limbs[i];
            limbs[i] = static_cast<u64>(cur / 3);
            rem = static_cast<u64>(cur % 3);
        }
        digits_out[k] = static_cast<u8>(rem);
    }
}

inline void rotation_block_bytes(const u8* digits, int nbytes, u8* bytes_out) {
    int ndigits = rotation_digit_table()[nbytes];
    u64 limbs[3] = {0, 0, 0};
    for (int k = 0; k < ndigits; k++) {
        // limbs = limbs*3 + digit
        u64 carry = digits[k];
        for (int i = 0; i < 3; i++) {
            unsigned __int128 cur = static_cast<unsigned __int128>(limbs[i]) * 3 + carry;
            limbs[i] = static_cast<u64>(cur);
            carry = static_cast<u64>(cur >> 64);
        }
        if (carry) throw InvalidCodeword("rotation block value overflows");
    }
    // check value < 2^(8*nbytes)
    for (int bit = 8 * nbytes; bit < 192; bit++)
        if ((limbs[bit / 64] >> (bit % 64)) & 1)
            throw InvalidCodeword("rotation block value out of range");
    for (int i = nbytes - 1; i >= 0; i--) {
        bytes_out[i] = static_cast<u8>(limbs[0]);
        limbs[0] = (limbs[0] >> 8) | (limbs[1] << 56);
        limbs[1] = (limbs[1] >> 8) | (limbs[2] << 56);
        limbs[2] >>= 8;
    }
}

// digit -> base: the d-th base in ACGT order among the three differing from prev
inline Base rotation_base(u8 digit, Base prev) {
    u8 p = static_cast<u8>(prev);
    u8 b = digit < p ? digit : digit + 1;
    return static_cast<Base>(b);
}

inline u8 rotation_digit(Base base, Base prev) {
    u8 b = static_cast<u8>(base), p = static_cast<u8>(prev);
    if (b == p) throw InvalidCodeword("rotation sequence repeats a base");
    return b < p ? b : b - 1;
}

// ---------------------------------------------------------------------------
// Blawat-style code: fixed 256-entry byte -> 5-base table. Codewords carry no
// homopolymer of 4; the first two bases differ and the trailing run is at
// most 2, so runs of 4 cannot form across codeword boundaries either.
// 8 bits / 5 bases = 1.6 bits/base.
// ---------------------------------------------------------------------------

inline const std::array<std::array<u8, 5>, 256>& blawat_table() {
    static const std::array<std::array<u8, 5>, 256> table = [] {
        // candidates in lex order, then an even stride through them so the
        // published table stays base-balanced
        std::vector<std::array<u8, 5>> cand;
        for (u32 word = 0; word < 1024; word++) {
            u8 b[5];
            for (int i = 0; i < 5; i++) b[i] = static_cast<u8>((word >> (2 * (4 - i))) & 3);
            if (b[0] == b[1]) continue;                  // prefix run stays 1
            if (b[2] == b[3] && b[3] == b[4]) continue;  // suffix run stays <= 2
            bool run4 = false;
            for (int i = 0; i + 3 < 5; i++)
                if (b[i] == b[i + 1] && b[i + 1] == b[i + 2] && b[i + 2] == b[i + 3]) run4 = true;
            if (run4) continue;
            cand.push_back({b[0], b[1], b[2], b[3], b[4]});
        }
        std::array<std::array<u8, 5>, 256> t{};
        for (std::size_t v = 0; v < 256; v++) t[v] = cand[(v * cand.size()) / 256];
        return t;
    }();
    return table;
}

inline const std::array<int, 1024>& blawat_reverse() {
    static const std::array<int, 1024> rev = [] {
        std::array<int, 1024> r{};
        r.fill(-1);
        const auto& t = blawat_table();
        for (int v = 0; v < 256; v++) {
            u32 key = 0;
            for (int i = 0; i < 5; i++) key = (key << 2) | t[v][i];
            r[key] = v;
        }
        return r;
    }();
    return rev;
}

// ---------------------------------------------------------------------------
// Grass-style code: 47 three-base codons (no homopolymer triple), 2 bytes ->
// three base-47 digits -> 9 bases; a trailing odd byte maps to two digits ->
// 6 bases. 16 bits / 9 bases = 1.778 bits/base.
// ---------------------------------------------------------------------------

inline constexpr int kGrassCodons = 47;

inline const std::array<std::array<u8, 3>, kGrassCodons>& grass_codons() {
    static const std::array<std::array<u8, 3>, kGrassCodons> table = [] {
        std::array<std::array<u8, 3>, kGrassCodons> t{};
        int found = 0;
        for (u32 word = 0; word < 64 && found < kGrassCodons; word++) {
            u8 b[3];
            for (int i = 0; i < 3; i++) b[i] = static_cast<u8>((word >> (2 * (2 - i))) & 3);
            if (b[0] == b[1] && b[1] == b[2]) continue;
            for (int i = 0; i < 3; i++) t[found][i] = b[i];
            found++;
        }
        return t;
    }();
    return table;
}

inline const std::array<int, 64>& grass_reverse() {
    static const std::array<int, 64> rev = [] {
        std::array<int, 64> r{};
        r.fill(-1);
        const auto& t = grass_codons();
        for (int v = 0; v < kGrassCodons; v++) {
            u32 key = 0;
            for (int i = 0; i < 3; i++) key = (key << 2) | t[v][i];
            r[key] = v;
        }
        return r;
    }();
    return rev;
}

} // namespace detail

// ---------------------------------------------------------------------------
// encode / decode
// ---------------------------------------------------------------------------

// Exact encoded length in bases for a byte count.
inline std::size_t encoded_bases(CodecId codec, std::size_t nbytes) {
    switch (codec) {
        case CodecId::Rotation: {
            const auto& dt = detail::rotation_digit_table();
            return (nbytes / detail::kRotationBlockBytes) * detail::kRotationBlockDigits +
                   dt[nbytes % detail::kRotationBlockBytes];
        }
        case CodecId::Blawat: return nbytes * 5;
        case CodecId::Grass: return (nbytes / 2) * 9 + (nbytes % 2) * 6;
    }
    return 0;
}

inline DnaSequence encode(const Bytes& data, CodecId codec) {
    DnaSequence out;
    out.reserve(encoded_bases(codec, data.size()));
    switch (codec) {
        case CodecId::Rotation: {
            Base prev = Base::A;
            u8 digits[detail::kRotationBlockDigits];
            std::size_t off = 0;
            while (off < data.size()) {
                int take = static_cast<int>(
                    std::min<std::size_t>(detail::kRotationBlockBytes, data.size() - off));
                detail::rotation_block_digits(data.data() + off, take, digits);
                int nd = detail::rotation_digit_table()[take];
                for (int k = 0; k < nd; k++) {
                    Base b = detail::rotation_base(digits[k], prev);
                    out.push_back(b);
                    prev = b;
                }
                off += take;
            }
            break;
        }
        case CodecId::Blawat: {
            const auto& t = detail::blawat_table();
            for (u8 byte : data)
                for (int i = 0; i < 5; i++) out.push_back(static_cast<Base>(t[byte][i]));
            break;
        }
        case CodecId::Grass: {
            const auto& t = detail::grass_codons();
            std::size_t i = 0;
            for (; i + 2 <= data.size(); i += 2) {
                u32 v = (static_cast<u32>(data[i]) << 8) | data[i + 1];
                u32 d0 = v / (47 * 47), d1 = (v / 47) % 47, d2 = v % 47;
                for (u32 d : {d0, d1, d2})
                    for (int k = 0; k < 3; k++) out.push_back(static_cast<Base>(t[d][k]));
            }
            if (i < data.size()) {
                u32 v = data[i];
                u32 d0 = v / 47, d1 = v % 47;
                for (u32 d : {d0, d1})
                    for (int k = 0; k < 3; k++) out.push_back(static_cast<Base>(t[d][k]));
            }
            break;
        }
    }
    return out;
}

inline Bytes decode(const DnaSequence& seq, CodecId codec) {
    Bytes out;
    switch (codec) {
        case CodecId::Rotation: {
            // digit stream back out, then block-wise base-3 -> bytes
            std::vector<u8> digits;
            digits.reserve(seq.size());
            Base prev = Base::A;
            for (std::size_t i = 0; i < seq.size(); i++) {
                Base b = seq[i];
                digits.push_back(detail::rotation_digit(b, prev));
                prev = b;
            }
            const auto& dt = detail::rotation_digit_table();
            std::size_t full = digits.size() / detail::kRotationBlockDigits;
            std::size_t tail_digits = digits.size() % detail::kRotationBlockDigits;
            int tail_bytes = -1;
            for (int b = 0; b < detail::kRotationBlockBytes; b++)
                if (dt[b] == static_cast<int>(tail_digits)) tail_bytes = b;
            if (tail_bytes < 0)
                throw InvalidCodeword("rotation stream has invalid tail of " +
                                      std::to_string(tail_digits) + " digits");
            out.resize(full * detail::kRotationBlockBytes + tail_bytes);
            for (std::size_t blk = 0; blk < full; blk++)
                detail::rotation_block_bytes(digits.data() + blk * detail::kRotationBlockDigits,
                                             detail::kRotationBlockBytes,
                                             out.data() + blk * detail::kRotationBlockBytes);
            if (tail_bytes > 0)
                detail::rotation_block_bytes(digits.data() + full * detail::kRotationBlockDigits,
                                             tail_bytes,
                                             out.data() + full * detail::kRotationBlockBytes);
            break;
        }
        case CodecId::Blawat: {
            if (seq.size() % 5 != 0)
                throw InvalidCodeword("blawat stream length not a multiple of 5");
            const auto& rev = detail::blawat_reverse();
            out.reserve(seq.size() / 5);
            for (std::size_t i = 0; i < seq.size(); i += 5) {
                u32 key = 0;
                for (int k = 0; k < 5; k++) key = (key << 2) | seq.code(i + k);
                int v = rev[key];
                if (v < 0)
                    throw InvalidCodeword("5-base block at " + std::to_string(i) +
                                          " is outside the blawat codebook");
                out.push_back(static_cast<u8>(v));
            }
            break;
        }
        case CodecId::Grass: {
            const auto& rev = detail::grass_reverse();
            std::size_t tail = seq.size() % 9;
            if (tail != 0 && tail != 6)
                throw InvalidCodeword("grass stream length mod 9 must be 0 or 6");
            auto codon_at = [&](std::size_t pos) {
                u32 key = 0;
                for (int k = 0; k < 3; k++) key = (key << 2) | seq.code(pos + k);
                int v = rev[key];
                if (v < 0)
                    throw InvalidCodeword("codon at " + std::to_string(pos) +
                                          " is outside the grass table");
                return static_cast<u32>(v);
            };
            std::size_t i = 0;
            std::size_t full_len = seq.size() - tail;
            out.reserve(seq.size() * 2 / 9 + 1);
            for (; i + 9 <= full_len; i += 9) {
                u32 v = codon_at(i) * 47 * 47 + codon_at(i + 3) * 47 + codon_at(i + 6);
                if (v >= 65536)
                    throw InvalidCodeword("grass block at " + std::to_string(i) +
                                          " decodes above 2^16");
                out.push_back(static_cast<u8>(v >> 8));
                out.push_back(static_cast<u8>(v & 0xff));
            }
            if (tail == 6) {
                u32 v = codon_at(i) * 47 + codon_at(i + 3);
                if (v >= 256)
                    throw InvalidCodeword("grass tail block decodes above 2^8");
                out.push_back(static_cast<u8>(v));
            }
            break;
        }
    }
    return out;
}

// XOR with the splitmix64 keystream; involutive for a fixed seed.
inline Bytes randomize(const Bytes& data, u64 seed) {
    Bytes out = data;
    xor_keystream(out, seed);
    return out;
}

// ---------------------------------------------------------------------------
// Codebook data files (reference copies of the built-in tables).
// ---------------------------------------------------------------------------

inline std::string blawat_codebook_text() {
    std::string s = "# blawat-codebook v1: byte value = line number (0-based)\n";
    for (const auto& cw : detail::blawat_table()) {
        for (u8 b : cw) s += base_to_char(static_cast<Base>(b));
        s += '\n';
    }
    return s;
}

inline std::string grass_codon_text() {
    std::string s = "# grass-codons v1: digit value = line number (0-based)\n";
    for (const auto& c : detail::grass_codons()) {
        for (u8 b : c) s += base_to_char(static_cast<Base>(b));
        s += '\n';
    }
    return s;
}

} // namespace vldna
