#pragma once

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vldna/common.hpp"

namespace vldna {

// ---------------------------------------------------------------------------
// Base: one of A, C, G, T packed into 2 bits. complement(b) = 3 - b, which
// pairs A<->T and C<->G.
// ---------------------------------------------------------------------------

enum class Base : u8 { A = 0, C = 1, G = 2, T = 3 };

inline constexpr char base_to_char(Base b) {
    constexpr std::array<char, 4> tbl{'A', 'C', 'G', 'T'};
    return tbl[static_cast<u8>(b)];
}

inline Base char_to_base(char c) {
    switch (c) {
        case 'A': case 'a': return Base::A;
        case 'C': case 'c': return Base::C;
        case 'G': case 'g': return Base::G;
        case 'T': case 't': return Base::T;
        default: throw IoError(std::string("invalid base character '") + c + "'");
    }
}

inline constexpr Base complement(Base b) {
    return static_cast<Base>(3 - static_cast<u8>(b));
}

// ---------------------------------------------------------------------------
// DnaSequence: 2-bit packed base string. Packing keeps desk-scale corpora
// (1e8..1e9 bases) in memory and lets the scanner fetch 32-base windows as
// single 64-bit words.
// ---------------------------------------------------------------------------

class DnaSequence {
public:
    DnaSequence() = default;

    explicit DnaSequence(std::string_view text) {
        reserve(text.size());
        for (char c : text) push_back(char_to_base(c));
    }

    static DnaSequence random(std::size_t n, u64 seed) {
        SplitMix64 rng(seed);
        DnaSequence s;
        s.reserve(n);
        for (std::size_t i = 0; i < n; i++) s.push_back(static_cast<Base>(rng.next() & 3));
        return s;
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    void reserve(std::size_t n) { words_.reserve((n + 31) / 32); }

    void push_back(Base b) {
        std::size_t w = size_ >> 5, r = (size_ & 31) << 1;
        if (r == 0) words_.push_back(0);
        words_[w] |= static_cast<u64>(static_cast<u8>(b)) << r;
        size_++;
    }

    Base operator[](std::size_t i) const {
        return static_cast<Base>((words_[i >> 5] >> ((i & 31) << 1)) & 3);
    }

    u8 code(std::size_t i) const {
        return static_cast<u8>((words_[i >> 5] >> ((i & 31) << 1)) & 3);
    }

    void set(std::size_t i, Base b) {
        std::size_t w = i >> 5, r = (i & 31) << 1;
        words_[w] = (words_[w] & ~(u64(3) << r)) | (static_cast<u64>(static_cast<u8>(b)) << r);
    }

    void append(const DnaSequence& other) {
        for (std::size_t i = 0; i < other.size(); i++) push_back(other[i]);
    }

    DnaSequence subseq(std::size_t pos, std::size_t len) const {
        DnaSequence out;
        out.reserve(len);
        for (std::size_t i = 0; i < len; i++) out.push_back((*this)[pos + i]);
        return out;
    }

    // Up to 32 bases starting at pos, 2-bit packed LSB-first. Bases past the
    // end read as zero; callers mask what they use.
    u64 window64(std::size_t pos) const {
        std::size_t w = pos >> 5, r = (pos & 31) << 1;
        u64 lo = w < words_.size() ? words_[w] : 0;
        if (r == 0) return lo;
        u64 hi = w + 1 < words_.size() ? words_[w + 1] : 0;
        return (lo >> r) | (hi << (64 - r));
    }

    std::string to_string() const {
        std::string s(size_, '?');
        for (std::size_t i = 0; i < size_; i++) s[i] = base_to_char((*this)[i]);
        return s;
    }

    bool operator==(const DnaSequence& o) const {
        if (size_ != o.size_) return false;
        for (std::size_t i = 0; i < size_; i++)
            if (code(i) != o.code(i)) return false;
        return true;
    }
    bool operator!=(const DnaSequence& o) const { return !(*this == o); }

private:
    std::vector<u64> words_;
    std::size_t size_ = 0;
};

// Reverse complement. Length preserved; involution.
inline DnaSequence complement(const DnaSequence& seq) {
    DnaSequence out;
    out.reserve(seq.size());
    for (std::size_t i = seq.size(); i-- > 0;) out.push_back(complement(seq[i]));
    return out;
}

// ---------------------------------------------------------------------------
// LengthGroup: the allowed payload lengths. Sorted ascending, all positive
// multiples of 10, max element is the default segment length.
// ---------------------------------------------------------------------------

class LengthGroup {
public:
    explicit LengthGroup(std::vector<u32> lengths) : lengths_(std::move(lengths)) {
        std::sort(lengths_.begin(), lengths_.end());
        lengths_.erase(std::unique(lengths_.begin(), lengths_.end()), lengths_.end());
        if (lengths_.empty()) throw Error("length group must be non-empty");
        for (u32 l : lengths_)
            if (l == 0 || l % 10 != 0)
                throw Error("length group entries must be positive multiples of 10");
    }

    static LengthGroup default_group() { return LengthGroup({150, 160, 190, 200}); }

    const std::vector<u32>& lengths() const { return lengths_; }
    u32 max_length() const { return lengths_.back(); }
    u32 min_length() const { return lengths_.front(); }
    std::size_t count() const { return lengths_.size(); }

    bool contains(u32 len) const {
        return std::binary_search(lengths_.begin(), lengths_.end(), len);
    }

    // Slot of a length in ascending order.
    std::optional<u32> slot_of(u32 len) const {
        auto it = std::lower_bound(lengths_.begin(), lengths_.end(), len);
        if (it == lengths_.end() || *it != len) return std::nullopt;
        return static_cast<u32>(it - lengths_.begin());
    }

    // Bases of metadata needed to name one of |lengths| slots: ceil(log4 n).
    u32 indicator_width() const {
        u32 w = 0;
        std::size_t cap = 1;
        while (cap < lengths_.size()) { cap *= 4; w++; }
        return std::max<u32>(w, 1);
    }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < lengths_.size(); i++) {
            if (i) s += '/';
            s += std::to_string(lengths_[i]);
        }
        return s;
    }

private:
    std::vector<u32> lengths_;
};

inline LengthGroup parse_length_group(const std::string& text) {
    std::vector<u32> lens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find_first_of("/,", pos);
        std::string tok = text.substr(pos, next == std::string::npos ? next : next - pos);
        if (!tok.empty()) lens.push_back(static_cast<u32>(std::stoul(tok)));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return LengthGroup(lens);
}

// ---------------------------------------------------------------------------
// Strand: primer_fwd | length indicator | internal index | payload | primer_rev.
// The reverse primer is serialized as its reverse complement, matching its
// placement on the opposite strand end.
// ---------------------------------------------------------------------------

// 4^11 > 1.55e6 strands per pair; 10 bases would only address 1.05e6.
inline constexpr u32 kIndexWidth = 11;
inline constexpr u64 kIndexSpace = u64(1) << (2 * kIndexWidth);
inline constexpr u32 kPrimerLength = 20;

struct Strand {
    DnaSequence primer_fwd;   // as annealed, 5'->3'
    DnaSequence primer_rev;   // primer sequence (not complemented)
    u64 internal_index = 0;
    DnaSequence payload;
    bool remainder = false;   // payload length outside the group (final strand only)

    DnaSequence serialize(const LengthGroup& group) const;
};

namespace detail {

inline void append_base4(DnaSequence& out, u64 value, u32 width) {
    for (u32 i = width; i-- > 0;)
        out.push_back(static_cast<Base>((value >> (2 * i)) & 3));
}

inline u64 read_base4(const DnaSequence& seq, std::size_t pos, u32 width) {
    u64 v = 0;
    for (u32 i = 0; i < width; i++) v = (v << 2) | seq.code(pos + i);
    return v;
}

} // namespace detail

inline DnaSequence Strand::serialize(const LengthGroup& group) const {
    DnaSequence out;
    u32 iw = group.indicator_width();
    out.reserve(primer_fwd.size() + iw + kIndexWidth + payload.size() + primer_rev.size());
    out.append(primer_fwd);
    u32 slot = 0;
    if (!remainder) {
        auto s = group.slot_of(static_cast<u32>(payload.size()));
        if (!s) throw LengthNotInGroup("payload length " + std::to_string(payload.size()) +
                                       " not in group " + group.to_string());
        slot = *s;
    }
    detail::append_base4(out, slot, iw);
    detail::append_base4(out, internal_index, kIndexWidth);
    out.append(payload);
    out.append(complement(primer_rev));
    return out;
}

// Builds a strand from payload + primer pair + ordinal.
inline Strand assemble_strand(DnaSequence payload, DnaSequence primer_fwd,
                              DnaSequence primer_rev, u64 index,
                              const LengthGroup& group, bool remainder = false) {
    if (index >= kIndexSpace)
        throw IndexOverflow("internal index " + std::to_string(index) + " exceeds " +
                            std::to_string(kIndexWidth) + "-base width");
    if (!remainder && !group.contains(static_cast<u32>(payload.size())))
        throw LengthNotInGroup("payload length " + std::to_string(payload.size()) +
                               " not in group " + group.to_string());
    Strand s;
    s.primer_fwd = std::move(primer_fwd);
    s.primer_rev = std::move(primer_rev);
    s.internal_index = index;
    s.payload = std::move(payload);
    s.remainder = remainder;
    return s;
}

// Parses a serialized strand back into fields. Inverse of Strand::serialize.
inline Strand disassemble_strand(const DnaSequence& raw, const LengthGroup& group) {
    u32 iw = group.indicator_width();
    std::size_t meta = 2 * kPrimerLength + iw + kIndexWidth;
    if (raw.size() < meta + 1)
        throw MalformedStrand("strand too short: " + std::to_string(raw.size()) + " bases");
    std::size_t payload_len = raw.size() - meta;

    Strand s;
    s.primer_fwd = raw.subseq(0, kPrimerLength);
    u64 slot = detail::read_base4(raw, kPrimerLength, iw);
    s.internal_index = detail::read_base4(raw, kPrimerLength + iw, kIndexWidth);
    s.payload = raw.subseq(kPrimerLength + iw + kIndexWidth, payload_len);
    s.primer_rev = complement(raw.subseq(raw.size() - kPrimerLength, kPrimerLength));

    if (slot >= group.count())
        throw MalformedStrand("length indicator names slot " + std::to_string(slot) +
                              " of a " + std::to_string(group.count()) + "-length group");
    if (group.lengths()[slot] != payload_len) {
        // Remainder strands carry slot 0 and a foreign payload length.
        if (slot == 0 && !group.contains(static_cast<u32>(payload_len)))
            s.remainder = true;
        else
            throw MalformedStrand("indicator slot " + std::to_string(slot) +
                                  " does not match payload length " + std::to_string(payload_len));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Sequence file formats.
//   Text: one ACGT sequence per line, newline-terminated.
//   Packed: 8-byte magic, 8-byte little-endian base count, 2-bit packed bases.
// ---------------------------------------------------------------------------

inline constexpr char kPackedMagic[8] = {'V', 'L', 'D', 'N', 'A', 'S', 'E', 'Q'};

inline void write_sequences_text(const std::string& path, const std::vector<DnaSequence>& seqs) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (const auto& s : seqs) out << s.to_string() << '\n';
}

inline std::vector<DnaSequence> read_sequences_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<DnaSequence> seqs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        seqs.emplace_back(line);
    }
    return seqs;
}

inline void write_sequence_packed(const std::string& path, const DnaSequence& seq) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(kPackedMagic, 8);
    u64 n = seq.size();
    char lenbuf[8];
    for (int i = 0; i < 8; i++) lenbuf[i] = static_cast<char>((n >> (8 * i)) & 0xff);
    out.write(lenbuf, 8);
    u8 acc = 0;
    int fill = 0;
    for (std::size_t i = 0; i < seq.size(); i++) {
        acc |= static_cast<u8>(seq.code(i) << (2 * fill));
        if (++fill == 4) { out.put(static_cast<char>(acc)); acc = 0; fill = 0; }
    }
    if (fill) out.put(static_cast<char>(acc));
}

inline DnaSequence read_sequence_packed(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (in.gcount() != 8 || std::memcmp(magic, kPackedMagic, 8) != 0)
        throw IoError(path + ": bad magic");
    char lenbuf[8];
    in.read(lenbuf, 8);
    if (in.gcount() != 8) throw IoError(path + ": truncated header");
    u64 n = 0;
    for (int i = 0; i < 8; i++) n |= static_cast<u64>(static_cast<u8>(lenbuf[i])) << (8 * i);
    DnaSequence seq;
    seq.reserve(n);
    int c;
    u64 got = 0;
    while (got < n && (c = in.get()) != EOF) {
        for (int k = 0; k < 4 && got < n; k++, got++)
            seq.push_back(static_cast<Base>((c >> (2 * k)) & 3));
    }
    if (got != n) throw IoError(path + ": truncated body");
    return seq;
}

} // namespace vldna
