#pragma once

#include <bit>
#include <fstream>
#include <string>
#include <vector>

#include "vldna/common.hpp"
#include "vldna/seqcore.hpp"

namespace vldna {

// ---------------------------------------------------------------------------
// Primer design rules. The defaults follow the usual random-access primer
// constraints: 20 bases, GC fraction in [0.40, 0.60], no homopolymer run of
// 4, a G/C clamp at the 3' end, and pairwise Hamming distance >= 6 across
// the library. GC window stands in for melting-temperature filtering.
// ---------------------------------------------------------------------------

struct PrimerRules {
    u32 length = kPrimerLength;
    double gc_min = 0.40;
    double gc_max = 0.60;
    u32 max_homopolymer = 3;        // runs of 4+ rejected
    bool gc_clamp = true;           // last base in {G, C}
    u32 min_pair_hamming = 6;
    u64 attempts_per_primer = 1000; // rejection budget, per requested primer
};

struct Primer {
    u32 id = 0;
    DnaSequence seq;
    u64 packed = 0;  // 2-bit packed, LSB-first; valid for length <= 32
};

struct PrimerPair {
    u32 forward = 0;  // primer ids
    u32 reverse = 0;
};

inline u64 pack_bases(const DnaSequence& s) {
    u64 w = 0;
    for (std::size_t i = 0; i < s.size(); i++) w |= static_cast<u64>(s.code(i)) << (2 * i);
    return w;
}

inline u32 hamming_packed(u64 a, u64 b, u32 len) {
    u64 x = (a ^ b) & ((len >= 32) ? ~u64(0) : ((u64(1) << (2 * len)) - 1));
    u64 mm = (x | (x >> 1)) & 0x5555555555555555ULL;
    return static_cast<u32>(std::popcount(mm));
}

inline bool satisfies_rules(const DnaSequence& s, const PrimerRules& rules = {}) {
    if (s.size() != rules.length) return false;
    u32 gc = 0, run = 1;
    for (std::size_t i = 0; i < s.size(); i++) {
        Base b = s[i];
        if (b == Base::G || b == Base::C) gc++;
        if (i > 0 && s[i] == s[i - 1]) {
            if (++run > rules.max_homopolymer) return false;
        } else {
            run = 1;
        }
    }
    double frac = static_cast<double>(gc) / s.size();
    if (frac < rules.gc_min - 1e-12 || frac > rules.gc_max + 1e-12) return false;
    if (rules.gc_clamp) {
        Base last = s[s.size() - 1];
        if (last != Base::G && last != Base::C) return false;
    }
    return true;
}

// Deterministic rejection sampling from the seed. Candidates violating any
// rule (or too close to an accepted primer) are discarded.
inline std::vector<Primer> generate_library(std::size_t count, u64 seed,
                                            const PrimerRules& rules = {}) {
    if (count < 1) throw Error("primer count must be >= 1");
    SplitMix64 rng(seed);
    std::vector<Primer> lib;
    lib.reserve(count);
    u64 budget = rules.attempts_per_primer * count;
    u64 attempts = 0;
    while (lib.size() < count) {
        if (attempts++ >= budget)
            throw ExhaustedSearch("gave up after " + std::to_string(attempts - 1) +
                                  " candidates with " + std::to_string(lib.size()) + "/" +
                                  std::to_string(count) + " primers accepted");
        DnaSequence cand;
        cand.reserve(rules.length);
        for (u32 i = 0; i < rules.length; i++)
            cand.push_back(static_cast<Base>(rng.next() & 3));
        if (!satisfies_rules(cand, rules)) continue;
        u64 packed = pack_bases(cand);
        bool close = false;
        for (const Primer& p : lib)
            if (hamming_packed(p.packed, packed, rules.length) < rules.min_pair_hamming) {
                close = true;
                break;
            }
        if (close) continue;
        lib.push_back(Primer{static_cast<u32>(lib.size()), std::move(cand), packed});
    }
    return lib;
}

// floor(n/2) disjoint pairs in id order.
inline std::vector<PrimerPair> pair_primers(const std::vector<Primer>& lib) {
    std::vector<PrimerPair> pairs;
    pairs.reserve(lib.size() / 2);
    for (std::size_t i = 0; i + 1 < lib.size(); i += 2)
        pairs.push_back(PrimerPair{lib[i].id, lib[i + 1].id});
    return pairs;
}

// Pair up an arbitrary set of usable primer ids, ascending.
inline std::vector<PrimerPair> pair_ids(std::vector<u32> ids) {
    std::sort(ids.begin(), ids.end());
    std::vector<PrimerPair> pairs;
    pairs.reserve(ids.size() / 2);
    for (std::size_t i = 0; i + 1 < ids.size(); i += 2)
        pairs.push_back(PrimerPair{ids[i], ids[i + 1]});
    return pairs;
}

// One 20-base primer per line; line number = id.
inline void write_primer_library(const std::string& path, const std::vector<Primer>& lib) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    for (const Primer& p : lib) out << p.seq.to_string() << '\n';
}

inline std::vector<Primer> read_primer_library(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Primer> lib;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        DnaSequence seq(line);
        u64 packed = pack_bases(seq);
        lib.push_back(Primer{static_cast<u32>(lib.size()), std::move(seq), packed});
    }
    return lib;
}

} // namespace vldna
