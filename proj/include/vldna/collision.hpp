#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <fstream>
#include <thread>
#include <vector>

#include "vldna/common.hpp"
#include "vldna/primer.hpp"
#include "vldna/seqcore.hpp"

namespace vldna {

// ---------------------------------------------------------------------------
// Collision relation: a primer substring and a sequence window, each of at
// least 13 bases, align with at most 2 combined mismatches/gaps. Both primer
// orientations are checked. Overlapping hits of one primer merge into
// maximal Collision regions.
// ---------------------------------------------------------------------------

inline constexpr u32 kMinMatch = 13;
inline constexpr u32 kMaxEdits = 2;

enum class Orientation { Both, Forward };

struct Collision {
    u32 primer_id = 0;
    u32 start = 0;      // sequence region, 0-based inclusive
    u32 end = 0;        // exclusive
    u8 match_len = 0;   // longest primer-side match; = end-start when gap-free
    u8 edits = 0;       // fewest mismatches+gaps over hits in the region
    u16 aux = 0;

    u32 span() const { return end - start; }
    bool operator==(const Collision& o) const {
        return primer_id == o.primer_id && start == o.start && end == o.end &&
               match_len == o.match_len && edits == o.edits;
    }
};

struct CollisionStats {
    std::size_t library_size = 0;
    std::size_t collided_primers = 0;
    std::size_t total_collisions = 0;
    double collided_fraction = 0;
    double mean_per_collided = 0;
    // (collision count, number of primers with that count), ascending, 0 included
    std::vector<std::pair<u64, u32>> histogram;
};

class CollisionIndex {
public:
    CollisionIndex() = default;
    CollisionIndex(std::vector<Collision> items, std::size_t nprimers, std::size_t seq_len)
        : items_(std::move(items)), nprimers_(nprimers), seq_len_(seq_len) {
        offsets_.assign(nprimers_ + 1, 0);
        for (const Collision& c : items_) offsets_[c.primer_id + 1]++;
        for (std::size_t i = 0; i < nprimers_; i++) offsets_[i + 1] += offsets_[i];
    }

    std::size_t primer_count() const { return nprimers_; }
    std::size_t seq_len() const { return seq_len_; }
    std::size_t total() const { return items_.size(); }
    const std::vector<Collision>& items() const { return items_; }

    const Collision* begin_of(u32 primer) const { return items_.data() + offsets_[primer]; }
    const Collision* end_of(u32 primer) const { return items_.data() + offsets_[primer + 1]; }
    std::size_t count_of(u32 primer) const { return offsets_[primer + 1] - offsets_[primer]; }

    std::size_t collided_count() const {
        std::size_t n = 0;
        for (std::size_t p = 0; p < nprimers_; p++)
            if (count_of(static_cast<u32>(p))) n++;
        return n;
    }

private:
    std::vector<Collision> items_;   // sorted by (primer_id, start)
    std::vector<u64> offsets_;
    std::size_t nprimers_ = 0;
    std::size_t seq_len_ = 0;
};

// Interval structure over the sequence: stabbing and range queries.
class PositionIndex {
public:
    explicit PositionIndex(const CollisionIndex& index) {
        items_ = index.items();
        std::sort(items_.begin(), items_.end(), [](const Collision& a, const Collision& b) {
            return a.start < b.start || (a.start == b.start && a.primer_id < b.primer_id);
        });
        max_span_ = 0;
        for (const Collision& c : items_) max_span_ = std::max(max_span_, c.span());
    }

    // all collisions whose [start, end) contains pos
    std::vector<Collision> stab(u32 pos) const {
        std::vector<Collision> out;
        u32 lo = pos > max_span_ ? pos - max_span_ : 0;
        auto it = std::lower_bound(items_.begin(), items_.end(), lo,
                                   [](const Collision& c, u32 v) { return c.start < v; });
        for (; it != items_.end() && it->start <= pos; ++it)
            if (it->start <= pos && pos < it->end) out.push_back(*it);
        return out;
    }

    const std::vector<Collision>& by_start() const { return items_; }

private:
    std::vector<Collision> items_;
    u32 max_span_ = 0;
};

// ---------------------------------------------------------------------------
// Scanner internals
// ---------------------------------------------------------------------------

namespace scan_detail {

// Seed scheme: any valid alignment contains a 13-primer-base core with <= 2
// edits, hence >= 11 matched columns in at most 3 runs. Either some run has
// length >= 5, or all runs are <= 4 and at least two have length exactly 4.
// T5 indexes every 5-mer of every primer orientation; T44 indexes 4-mer
// pairs at primer distance 4..9. Together they see every core.

inline constexpr int kT5Len = 5;
inline constexpr int kT44GapMin = 4;
inline constexpr int kT44GapMax = 9;
inline constexpr u32 kChunkBases = 1 << 16;

struct StartRec {
    u32 primer_id;
    u32 s;
    u32 e;
    u8 len;
    u8 edits;
};

} // namespace scan_detail

// Preprocessed primer library for scanning. Immutable after construction and
// shared read-only by all workers.
class ScanIndex {
public:
    ScanIndex(const std::vector<Primer>& library, Orientation orient = Orientation::Both)
        : orientation_(orient) {
        using namespace scan_detail;
        nprimers_ = library.size();
        int per = orient == Orientation::Both ? 2 : 1;
        po_bases_.resize(nprimers_ * per);
        po_packed_.resize(nprimers_ * per);
        for (std::size_t p = 0; p < nprimers_; p++) {
            const DnaSequence& fwd = library[p].seq;
            if (fwd.size() != kPrimerLength)
                throw Error("scanner requires " + std::to_string(kPrimerLength) + "-base primers");
            auto fill = [&](std::size_t po, const DnaSequence& s) {
                for (u32 i = 0; i < kPrimerLength; i++) po_bases_[po][i] = s.code(i);
                po_packed_[po] = pack_bases(s);
            };
            fill(p * per, fwd);
            if (per == 2) fill(p * per + 1, complement(fwd));
        }

        // T5
        {
            std::vector<u32> cnt(1025, 0);
            auto key5 = [&](std::size_t po, u32 pos) {
                u32 k = 0;
                for (int j = 0; j < kT5Len; j++) k = (k << 2) | po_bases_[po][pos + j];
                return k;
            };
            for (std::size_t po = 0; po < po_bases_.size(); po++)
                for (u32 pos = 0; pos + kT5Len <= kPrimerLength; pos++) cnt[key5(po, pos) + 1]++;
            for (int i = 0; i < 1024; i++) cnt[i + 1] += cnt[i];
            t5_off_ = cnt;
            t5_ent_.resize(t5_off_[1024]);
            std::vector<u32> cur(t5_off_.begin(), t5_off_.end());
            for (std::size_t po = 0; po < po_bases_.size(); po++)
                for (u32 pos = 0; pos + kT5Len <= kPrimerLength; pos++) {
                    u32 k = key5(po, pos);
                    t5_ent_[cur[k]++] = static_cast<u32>((po << 5) | pos);
                }
        }

        // T44, one table per primer gap
        {
            auto key4 = [&](std::size_t po, u32 pos) {
                u32 k = 0;
                for (int j = 0; j < 4; j++) k = (k << 2) | po_bases_[po][pos + j];
                return k;
            };
            for (int g = kT44GapMin; g <= kT44GapMax; g++) {
                auto& off = t44_off_[g - kT44GapMin];
                auto& ent = t44_ent_[g - kT44GapMin];
                off.assign(65537, 0);
                for (std::size_t po = 0; po < po_bases_.size(); po++)
                    for (u32 pa = 0; pa + g + 4 <= kPrimerLength; pa++)
                        off[(key4(po, pa) << 8 | key4(po, pa + g)) + 1]++;
                for (int i = 0; i < 65536; i++) off[i + 1] += off[i];
                ent.resize(off[65536]);
                std::vector<u32> cur(off.begin(), off.end());
                for (std::size_t po = 0; po < po_bases_.size(); po++)
                    for (u32 pa = 0; pa + g + 4 <= kPrimerLength; pa++) {
                        u32 k = key4(po, pa) << 8 | key4(po, pa + g);
                        ent[cur[k]++] = static_cast<u32>((po << 5) | pa);
                    }
            }
        }
    }

    Orientation orientation() const { return orientation_; }
    std::size_t primer_count() const { return nprimers_; }
    std::size_t po_count() const { return po_bases_.size(); }
    u32 primer_of_po(std::size_t po) const {
        return static_cast<u32>(orientation_ == Orientation::Both ? po >> 1 : po);
    }
    const std::array<u8, kPrimerLength>& bases(std::size_t po) const { return po_bases_[po]; }
    u64 packed(std::size_t po) const { return po_packed_[po]; }

    const std::vector<u32>& t5_off() const { return t5_off_; }
    const std::vector<u32>& t5_ent() const { return t5_ent_; }
    const std::vector<u32>& t44_off(int g) const { return t44_off_[g - scan_detail::kT44GapMin]; }
    const std::vector<u32>& t44_ent(int g) const { return t44_ent_[g - scan_detail::kT44GapMin]; }

private:
    Orientation orientation_;
    std::size_t nprimers_ = 0;
    std::vector<std::array<u8, kPrimerLength>> po_bases_;
    std::vector<u64> po_packed_;
    std::vector<u32> t5_off_, t5_ent_;
    std::array<std::vector<u32>, scan_detail::kT44GapMax - scan_detail::kT44GapMin + 1> t44_off_,
        t44_ent_;
};

namespace scan_detail {

inline constexpr u8 kInfEdits = 99;

// Banded DP over primer columns l (from anchor ps) and seq columns k (from
// anchor s), five diagonals o = k - l in [-2, 2]. Row update for the
// standard unit-cost edit recurrence:
//   R_l[o] = min( R_{l-1}[o]   + (prm[ps+l-1] != seq[s+k-1])   -- diagonal
//               , R_{l-1}[o+1] + 1                              -- primer deletion
//               , R_l[o-1]     + 1 )                            -- seq insertion
// computed in ascending o. Early-exits when the whole band exceeds budget.
struct AnchorEval {
    const u8* seq;
    std::size_t n;

    // evaluates one start against one primer orientation; hits are cells with
    // l >= kMinMatch and edits <= kMaxEdits
    bool eval_start(const std::array<u8, kPrimerLength>& prm, std::size_t s, u32& e_best,
                    u32& len_best, u32& ed_best) const {
        bool found = false;
        for (u32 ps = 0; ps + kMinMatch <= kPrimerLength; ps++) {
            u32 maxl = kPrimerLength - ps;
            u8 row[5];
            for (int o = -2; o <= 2; o++)
                row[o + 2] = (o >= 0 && s + o <= n) ? static_cast<u8>(o) : kInfEdits;
            for (u32 l = 1; l <= maxl; l++) {
                u8 next[5];
                u8 rowmin = kInfEdits;
                for (int o = -2; o <= 2; o++) {
                    i64 k = static_cast<i64>(l) + o;
                    u8 v = kInfEdits;
                    if (k >= 0 && s + k <= n) {
                        if (k >= 1 && row[o + 2] < kInfEdits)
                            v = static_cast<u8>(row[o + 2] +
                                                (seq[s + k - 1] != prm[ps + l - 1] ? 1 : 0));
                        if (o + 1 <= 2 && row[o + 3] < kInfEdits)
                            v = std::min<u8>(v, static_cast<u8>(row[o + 3] + 1));
                        if (o - 1 >= -2 && k >= 1 && next[o + 1] < kInfEdits)
                            v = std::min<u8>(v, static_cast<u8>(next[o + 1] + 1));
                    }
                    next[o + 2] = v;
                    rowmin = std::min(rowmin, v);
                }
                for (int j = 0; j < 5; j++) row[j] = next[j];
                if (rowmin > kMaxEdits) break;
                if (l >= kMinMatch) {
                    for (int o = -2; o <= 2; o++) {
                        i64 k = static_cast<i64>(l) + o;
                        if (row[o + 2] <= kMaxEdits && k >= static_cast<i64>(kMinMatch)) {
                            found = true;
                            u32 e = static_cast<u32>(s + k);
                            if (e > e_best) e_best = e;
                            if (l > len_best) len_best = l;
                            if (row[o + 2] < ed_best) ed_best = row[o + 2];
                        }
                    }
                }
            }
        }
        return found;
    }
};

// Exact test for "some alignment with both sides >= 13 and <= 2 edits passes
// through the lattice point (seq pos i, primer pos pa)". Extends the banded
// DP forward from the anchor and backward to it; every core containing a
// seed run at (i, pa) passes through that point.
struct BidirConfirm {
    const u8* seq;
    std::size_t n;

    // best[e][o+2] = max primer columns l such that an extension consuming
    // l primer and l+o sequence characters exists with <= e edits
    static void extend(const u8* sq, i64 sq_pos, int sq_dir, const u8* pr, int pr_pos, int pr_dir,
                       int pr_count, std::size_t n, u32 best[kMaxEdits + 1][5]) {
        for (u32 e = 0; e <= kMaxEdits; e++)
            for (int j = 0; j < 5; j++) best[e][j] = 0;
        u8 row[5];
        for (int o = -2; o <= 2; o++) {
            i64 sp = sq_pos + sq_dir * o;
            bool ok = o >= 0 && (sq_dir > 0 ? sp <= static_cast<i64>(n) : sp >= -1);
            row[o + 2] = ok ? static_cast<u8>(o) : kInfEdits;
        }
        for (int l = 1; l <= pr_count; l++) {
            u8 next[5];
            u8 rowmin = kInfEdits;
            for (int o = -2; o <= 2; o++) {
                i64 k = static_cast<i64>(l) + o;
                u8 v = kInfEdits;
                i64 sp = sq_pos + sq_dir * (k - 1);  // seq char consumed at step k
                bool in_seq = k >= 1 && sp >= 0 && sp < static_cast<i64>(n);
                if (k >= 0) {
                    if (in_seq && row[o + 2] < kInfEdits)
                        v = static_cast<u8>(row[o + 2] +
                                            (sq[sp] != pr[pr_pos + pr_dir * (l - 1)] ? 1 : 0));
                    if (o + 1 <= 2 && row[o + 3] < kInfEdits)
                        v = std::min<u8>(v, static_cast<u8>(row[o + 3] + 1));
                    if (o - 1 >= -2 && in_seq && next[o + 1] < kInfEdits)
                        v = std::min<u8>(v, static_cast<u8>(next[o + 1] + 1));
                }
                next[o + 2] = v;
                rowmin = std::min(rowmin, v);
            }
            for (int j = 0; j < 5; j++) row[j] = next[j];
            if (rowmin > kMaxEdits) break;
            for (int o = -2; o <= 2; o++)
                if (row[o + 2] <= kMaxEdits)
                    for (u32 e = row[o + 2]; e <= kMaxEdits; e++)
                        best[e][o + 2] = std::max<u32>(best[e][o + 2], l);
        }
        for (u32 e = 1; e <= kMaxEdits; e++)
            for (int j = 0; j < 5; j++) best[e][j] = std::max(best[e][j], best[e - 1][j]);
    }

    bool confirm(const std::array<u8, kPrimerLength>& prm, u32 i, u32 pa) const {
        u32 fwd[kMaxEdits + 1][5], back[kMaxEdits + 1][5];
        extend(seq, i, +1, prm.data(), pa, +1, static_cast<int>(kPrimerLength - pa), n, fwd);
        extend(seq, static_cast<i64>(i) - 1, -1, prm.data(), static_cast<int>(pa) - 1, -1,
               static_cast<int>(pa), n, back);
        for (u32 e1 = 0; e1 <= kMaxEdits; e1++)
            for (u32 e2 = 0; e1 + e2 <= kMaxEdits; e2++)
                for (int o1 = -2; o1 <= 2; o1++)
                    for (int o2 = -2; o2 <= 2; o2++) {
                        u32 l = back[e1][o1 + 2] + fwd[e2][o2 + 2];
                        if (l < kMinMatch) continue;
                        i64 k = static_cast<i64>(l) + o1 + o2;
                        if (k >= static_cast<i64>(kMinMatch)) return true;
                    }
        return false;
    }
};

// Cheap screen around a seed: exact-run extents chained across up to two
// edit steps give an upper bound on the primer/sequence spans of any
// alignment through (i, pa). Below 13 on either side, no hit can exist.
// An exact run of >= 13 is itself a hit.
struct RunChain {
    const u8* seq;
    std::size_t n;

    u32 run_fwd(const u8* prm, i64 p, i64 s) const {
        u32 r = 0;
        while (p < static_cast<i64>(kPrimerLength) && s < static_cast<i64>(n) &&
               prm[p] == seq[s]) {
            p++; s++; r++;
        }
        return r;
    }
    u32 run_back(const u8* prm, i64 p, i64 s) const {
        u32 r = 0;
        while (p >= 0 && s >= 0 && prm[p] == seq[s]) {
            p--; s--; r++;
        }
        return r;
    }

    // Per-edit-count extension bounds from a boundary (first unconsumed
    // primer/seq pair in direction dir). bp/bs index 0..2 by edits used.
    // Level 2 is expanded lazily: the level-1 node with the longest run is a
    // valid upper-bound frontier for all single-step extensions, so level 2
    // explores up to 2 edits exactly while level 1 alone bounds 1 edit.
    void side_bounds(const u8* prm, i64 pb, i64 sb, int dir, u32* bp, u32* bs) const {
        bp[0] = bs[0] = 0;
        bp[1] = bs[1] = 0;
        bp[2] = bs[2] = 0;
        static constexpr i64 dp[3] = {1, 1, 0};  // mismatch, deletion, insertion
        static constexpr i64 ds[3] = {1, 0, 1};
        i64 node_pb[3], node_sb[3];
        u32 node_cp[3], node_cs[3];
        for (int t = 0; t < 3; t++) {
            i64 np = pb + dir * dp[t], ns = sb + dir * ds[t];
            u32 r = dir > 0 ? run_fwd(prm, np, ns) : run_back(prm, np, ns);
            u32 tp = static_cast<u32>(dp[t]) + r;
            u32 ts = static_cast<u32>(ds[t]) + r;
            if (tp > bp[1]) bp[1] = tp;
            if (ts > bs[1]) bs[1] = ts;
            node_pb[t] = np + dir * static_cast<i64>(r);
            node_sb[t] = ns + dir * static_cast<i64>(r);
            node_cp[t] = tp;
            node_cs[t] = ts;
        }
        bp[2] = bp[1];
        bs[2] = bs[1];
        for (int t = 0; t < 3; t++) {
            for (int u = 0; u < 3; u++) {
                i64 np = node_pb[t] + dir * dp[u], ns = node_sb[t] + dir * ds[u];
                u32 r = dir > 0 ? run_fwd(prm, np, ns) : run_back(prm, np, ns);
                u32 tp = node_cp[t] + static_cast<u32>(dp[u]) + r;
                u32 ts = node_cs[t] + static_cast<u32>(ds[u]) + r;
                if (tp > bp[2]) bp[2] = tp;
                if (ts > bs[2]) bs[2] = ts;
            }
        }
    }

    // 0 = no hit possible through (i, pa); 1 = certain hit; 2 = undecided
    int screen(const std::array<u8, kPrimerLength>& prm, u32 i, u32 pa) const {
        u32 rf = run_fwd(prm.data(), pa, i);
        u32 rb = run_back(prm.data(), static_cast<i64>(pa) - 1, static_cast<i64>(i) - 1);
        u32 run = rf + rb;
        if (run >= kMinMatch) return 1;

        // primer columns still available on each side of the run
        u32 avail_left = pa - rb;
        u32 avail_right = kPrimerLength - (pa + rf);
        u32 fp[3], fs[3], gp[3], gs[3];
        if (avail_right <= avail_left) {
            side_bounds(prm.data(), static_cast<i64>(pa) + rf, static_cast<i64>(i) + rf, +1, fp,
                        fs);
            if (run + fp[2] + avail_left < kMinMatch) return 0;
            side_bounds(prm.data(), static_cast<i64>(pa) - rb - 1, static_cast<i64>(i) - rb - 1,
                        -1, gp, gs);
        } else {
            side_bounds(prm.data(), static_cast<i64>(pa) - rb - 1, static_cast<i64>(i) - rb - 1,
                        -1, gp, gs);
            if (run + gp[2] + avail_right < kMinMatch) return 0;
            side_bounds(prm.data(), static_cast<i64>(pa) + rf, static_cast<i64>(i) + rf, +1, fp,
                        fs);
        }
        for (u32 e1 = 0; e1 <= kMaxEdits; e1++) {
            u32 e2 = kMaxEdits - e1;
            if (run + gp[e1] + fp[e2] >= kMinMatch && run + gs[e1] + fs[e2] >= kMinMatch)
                return 2;
        }
        return 0;
    }
};

// Same screen over five precomputed diagonal mismatch masks: one packed
// fetch per candidate, every run probe a couple of bit scans. Usable when
// the 24-base window around the seed diagonal is fully inside the sequence.
struct MaskChain {
    // y[d+2]: bit 2p set when primer col p mismatches seq at diagonal
    // base+d; beyond-primer bits are zero
    u64 y[5];

    inline void load(const DnaSequence& seq, u64 primer_packed, std::size_t base_minus_2) {
        u64 w = seq.window64(base_minus_2);
        u64 x0 = w ^ primer_packed;
        y[0] = (x0 | (x0 >> 1)) & 0x5555555555ULL;
        u64 x1 = (w >> 2) ^ primer_packed;
        y[1] = (x1 | (x1 >> 1)) & 0x5555555555ULL;
        u64 x2 = (w >> 4) ^ primer_packed;
        y[2] = (x2 | (x2 >> 1)) & 0x5555555555ULL;
        u64 x3 = (w >> 6) ^ primer_packed;
        y[3] = (x3 | (x3 >> 1)) & 0x5555555555ULL;
        u64 x4 = (w >> 8) ^ primer_packed;
        y[4] = (x4 | (x4 >> 1)) & 0x5555555555ULL;
    }

    // matches along diagonal d from primer col p rightward
    inline u32 probe_fwd(int d, i64 p) const {
        if (p < 0 || p >= static_cast<i64>(kPrimerLength)) return 0;
        u64 t = y[d + 2] >> (2 * p);
        return t ? static_cast<u32>(std::countr_zero(t) >> 1)
                 : static_cast<u32>(kPrimerLength - p);
    }
    // matches along diagonal d from primer col p leftward
    inline u32 probe_back(int d, i64 p) const {
        if (p < 0 || p >= static_cast<i64>(kPrimerLength)) return 0;
        u64 t = y[d + 2] << (62 - 2 * p);
        return t ? static_cast<u32>(std::countl_zero(t) >> 1) : static_cast<u32>(p + 1);
    }

    void side_bounds(i64 pb, int db, int dir, u32* bp, u32* bs) const {
        static constexpr i64 dp[3] = {1, 1, 0};  // mismatch, deletion, insertion
        static constexpr int dd[3] = {0, -1, 1}; // diagonal shift per edit type
        bp[0] = bs[0] = 0;
        bp[1] = bs[1] = 0;
        i64 node_p[3];
        int node_d[3];
        u32 node_cp[3], node_cs[3];
        for (int t = 0; t < 3; t++) {
            i64 np = pb + dir * dp[t];
            int nd = db + dir * dd[t];
            u32 r = (nd < -2 || nd > 2)
                        ? 0
                        : (dir > 0 ? probe_fwd(nd, np) : probe_back(nd, np));
            u32 tp = static_cast<u32>(dp[t]) + r;
            u32 ts = (t == 1 ? 0u : 1u) + r;  // seq consumption: mm 1, del 0, ins 1
            if (tp > bp[1]) bp[1] = tp;
            if (ts > bs[1]) bs[1] = ts;
            node_p[t] = np + dir * static_cast<i64>(r);
            node_d[t] = nd;
            node_cp[t] = tp;
            node_cs[t] = ts;
        }
        bp[2] = bp[1];
        bs[2] = bs[1];
        for (int t = 0; t < 3; t++) {
            bool zero_run = node_cp[t] == static_cast<u32>(dp[t]) &&
                            node_cs[t] == (t == 1 ? 0u : 1u);
            for (int u = 0; u < 3; u++) {
                // del+ins (either order) with no run between duplicates mm
                if (zero_run && ((t == 1 && u == 2) || (t == 2 && u == 1))) continue;
                i64 np = node_p[t] + dir * dp[u];
                int nd = node_d[t] + dir * dd[u];
                if (nd < -2 || nd > 2) continue;
                u32 r = dir > 0 ? probe_fwd(nd, np) : probe_back(nd, np);
                u32 tp = node_cp[t] + static_cast<u32>(dp[u]) + r;
                u32 ts = node_cs[t] + (u == 1 ? 0u : 1u) + r;
                if (tp > bp[2]) bp[2] = tp;
                if (ts > bs[2]) bs[2] = ts;
            }
        }
    }

    int screen(u32 pa) const {
        u32 rf = probe_fwd(0, pa);
        u32 rb = probe_back(0, static_cast<i64>(pa) - 1);
        u32 run = rf + rb;
        if (run >= kMinMatch) return 1;
        u32 avail_left = pa - rb;
        u32 avail_right = kPrimerLength - (pa + rf);
        u32 fp[3], fs[3], gp[3], gs[3];
        if (avail_right <= avail_left) {
            side_bounds(static_cast<i64>(pa) + rf, 0, +1, fp, fs);
            if (run + fp[2] + avail_left < kMinMatch) return 0;
            side_bounds(static_cast<i64>(pa) - rb - 1, 0, -1, gp, gs);
        } else {
            side_bounds(static_cast<i64>(pa) - rb - 1, 0, -1, gp, gs);
            if (run + gp[2] + avail_right < kMinMatch) return 0;
            side_bounds(static_cast<i64>(pa) + rf, 0, +1, fp, fs);
        }
        for (u32 e1 = 0; e1 <= kMaxEdits; e1++) {
            u32 e2 = kMaxEdits - e1;
            if (run + gp[e1] + fp[e2] >= kMinMatch && run + gs[e1] + fs[e2] >= kMinMatch)
                return 2;
        }
        return 0;
    }
};

} // namespace scan_detail

// ---------------------------------------------------------------------------
// scan(): every maximal merged region per primer. Deterministic for any
// worker count: chunks own hit starts in [chunk.lo, chunk.hi) and results
// are stitched in chunk order.
// ---------------------------------------------------------------------------

struct ScanConfig {
    Orientation orientation = Orientation::Both;
    unsigned workers = 0;  // 0 = hardware concurrency
};

namespace scan_detail {

struct ChunkResult {
    std::vector<Collision> items;      // sorted by (primer, start)
    std::vector<u32> primer_off;       // CSR into items, size nprimers+1
};

// one chunk of the sequence against the whole index
inline void scan_chunk(const DnaSequence& seq, const std::vector<u8>& seq_bytes,
                       const ScanIndex& idx, u32 lo, u32 hi, ChunkResult& out) {
    const std::size_t n = seq.size();
    AnchorEval ev{seq_bytes.data(), n};

    std::size_t npo = idx.po_count();
    // per-orientation hot state: packed primer plus the last evaluated start
    // range, in one cache line
    struct PoHot {
        u64 packed;
        u32 le_first, le_second;
    };
    std::vector<PoHot> hot(npo);
    for (std::size_t po = 0; po < npo; po++) hot[po] = {idx.packed(po), 1, 0};
    std::vector<StartRec> recs;

    u32 seed_hi = static_cast<u32>(std::min<std::size_t>(n, static_cast<std::size_t>(hi) + kPrimerLength + 2));

    auto evaluate_range = [&](std::size_t po, u32 s_lo, u32 s_hi_excl) {
        u32 primer = idx.primer_of_po(po);
        const auto& prm = idx.bases(po);
        for (u32 s = s_lo; s < s_hi_excl; s++) {
            u32 e_best = 0, len_best = 0, ed_best = kMaxEdits + 1;
            if (ev.eval_start(prm, s, e_best, len_best, ed_best))
                recs.push_back(StartRec{primer, s, e_best, static_cast<u8>(len_best),
                                        static_cast<u8>(ed_best)});
        }
    };

    BidirConfirm confirm{seq_bytes.data(), n};
    RunChain chain{seq_bytes.data(), n};

    auto candidate = [&](u32 ent, u32 i) {
        std::size_t po = ent >> 5;
        u32 pa = ent & 31;
        i64 base = static_cast<i64>(i) - pa;
        // start range of alignments whose core contains this seed
        i64 r_lo = std::max<i64>({base - 2, 0, static_cast<i64>(lo)});
        i64 r_hi = std::min<i64>({base + 9, static_cast<i64>(hi) - 1,
                                  static_cast<i64>(n) - kMinMatch});
        if (r_lo > r_hi) return;
        PoHot& h = hot[po];
        bool covered = h.le_first <= h.le_second;
        if (covered && h.le_first <= r_lo && r_hi <= h.le_second) return;  // already evaluated

        int verdict;
        if (base >= 2 && base + 30 <= static_cast<i64>(n)) {
            MaskChain mc;
            mc.load(seq, h.packed, static_cast<std::size_t>(base - 2));
            verdict = mc.screen(pa);
        } else {
            verdict = chain.screen(idx.bases(po), i, pa);
        }
        if (verdict == 0) return;
        if (verdict == 2 && !confirm.confirm(idx.bases(po), i, pa)) return;

        if (covered && r_lo >= h.le_first && r_lo <= static_cast<i64>(h.le_second) + 1) {
            if (r_hi > h.le_second) {  // sliding window: evaluate only the new tail
                evaluate_range(po, h.le_second + 1, static_cast<u32>(r_hi) + 1);
                h.le_second = static_cast<u32>(r_hi);
            }
        } else {
            evaluate_range(po, static_cast<u32>(r_lo), static_cast<u32>(r_hi) + 1);
            h.le_first = static_cast<u32>(r_lo);
            h.le_second = static_cast<u32>(r_hi);
        }
    };

    for (u32 i = lo; i + 4 <= seed_hi && i + 4 <= n; i++) {
        // T5 probe
        if (i + kT5Len <= n) {
            u32 k5 = 0;
            for (int j = 0; j < kT5Len; j++) k5 = (k5 << 2) | seq_bytes[i + j];
            u32 b = idx.t5_off()[k5], e = idx.t5_off()[k5 + 1];
            for (u32 t = b; t < e; t++) candidate(idx.t5_ent()[t], i);
        }
        // T44 probes
        u32 ka = 0;
        for (int j = 0; j < 4; j++) ka = (ka << 2) | seq_bytes[i + j];
        for (int sg = kT44GapMin - 2; sg <= kT44GapMax + 2; sg++) {
            if (sg < 1) continue;
            std::size_t ib = static_cast<std::size_t>(i) + sg;
            if (ib + 4 > n) break;
            u32 kb = 0;
            for (int j = 0; j < 4; j++) kb = (kb << 2) | seq_bytes[ib + j];
            u32 key = (ka << 8) | kb;
            int g_lo = std::max(kT44GapMin, sg - 2), g_hi = std::min(kT44GapMax, sg + 2);
            for (int g = g_lo; g <= g_hi; g++) {
                const auto& off = idx.t44_off(g);
                u32 b = off[key], e = off[key + 1];
                for (u32 t = b; t < e; t++) candidate(idx.t44_ent(g)[t], i);
            }
        }
    }

    // starts -> maximal merged regions (per primer, both orientations folded)
    std::sort(recs.begin(), recs.end(), [](const StartRec& a, const StartRec& b) {
        return a.primer_id < b.primer_id || (a.primer_id == b.primer_id && a.s < b.s);
    });
    out.items.clear();
    std::size_t nprimers = idx.primer_count();
    out.primer_off.assign(nprimers + 1, 0);
    std::size_t i = 0;
    while (i < recs.size()) {
        std::size_t j = i;
        Collision cur{recs[i].primer_id, recs[i].s, recs[i].e, recs[i].len, recs[i].edits, 0};
        for (j = i + 1; j < recs.size(); j++) {
            const StartRec& r = recs[j];
            if (r.primer_id != cur.primer_id || r.s >= cur.end) break;
            cur.end = std::max(cur.end, r.e);
            cur.match_len = std::max(cur.match_len, r.len);
            cur.edits = std::min(cur.edits, r.edits);
        }
        out.items.push_back(cur);
        out.primer_off[cur.primer_id + 1]++;
        i = j;
    }
    for (std::size_t p = 0; p < nprimers; p++) out.primer_off[p + 1] += out.primer_off[p];
}

} // namespace scan_detail

inline CollisionIndex scan(const DnaSequence& seq, const ScanIndex& idx,
                           const ScanConfig& config = {}) {
    using namespace scan_detail;
    const std::size_t n = seq.size();
    std::size_t nprimers = idx.primer_count();

    // unpacked copy for the DP inner loops
    std::vector<u8> seq_bytes(n);
    for (std::size_t i = 0; i < n; i++) seq_bytes[i] = seq.code(i);

    std::size_t nchunks = n ? (n + kChunkBases - 1) / kChunkBases : 0;
    std::vector<ChunkResult> results(nchunks);

    unsigned workers = config.workers ? config.workers : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, nchunks ? nchunks : 1));

    std::atomic<std::size_t> next_chunk{0};
    auto body = [&] {
        for (;;) {
            std::size_t c = next_chunk.fetch_add(1);
            if (c >= nchunks) break;
            u32 lo = static_cast<u32>(c * kChunkBases);
            u32 hi = static_cast<u32>(std::min<std::size_t>(n, (c + 1) * kChunkBases));
            scan_chunk(seq, seq_bytes, idx, lo, hi, results[c]);
        }
    };
    if (workers <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; w++) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }

    // stitch chunk results in order; merge regions that straddle chunk seams
    std::size_t total = 0;
    for (const auto& r : results) total += r.items.size();
    std::vector<Collision> merged;
    merged.reserve(total);
    for (std::size_t p = 0; p < nprimers; p++) {
        std::size_t first_of_primer = merged.size();
        for (const auto& r : results) {
            u32 b = r.primer_off[p], e = r.primer_off[p + 1];
            for (u32 t = b; t < e; t++) {
                const Collision& c = r.items[t];
                if (merged.size() > first_of_primer) {
                    Collision& prev = merged.back();
                    if (c.start < prev.end) {
                        prev.end = std::max(prev.end, c.end);
                        prev.match_len = std::max(prev.match_len, c.match_len);
                        prev.edits = std::min(prev.edits, c.edits);
                        continue;
                    }
                }
                merged.push_back(c);
            }
        }
    }
    return CollisionIndex(std::move(merged), nprimers, n);
}

inline CollisionIndex scan(const DnaSequence& seq, const std::vector<Primer>& library,
                           const ScanConfig& config = {}) {
    ScanIndex idx(library, config.orientation);
    return scan(seq, idx, config);
}

// ---------------------------------------------------------------------------
// verify_cut: the cut must split the collision into two parts of <= 12 bases
// and a re-scan of the flanking windows (32 bases each side, treated as
// separate payloads) must find no residual hit of this primer inside the
// collision interval.
// ---------------------------------------------------------------------------

namespace scan_detail {

// all hits of one primer orientation inside a window, as [s, e) intervals
inline void window_hits(const u8* bytes, std::size_t len, const std::array<u8, kPrimerLength>& prm,
                        std::vector<std::pair<u32, u32>>& out) {
    AnchorEval ev{bytes, len};
    for (std::size_t s = 0; s + kMinMatch <= len; s++) {
        u32 e_best = 0, len_best = 0, ed_best = kMaxEdits + 1;
        if (ev.eval_start(prm, s, e_best, len_best, ed_best))
            out.push_back({static_cast<u32>(s), e_best});
    }
}

} // namespace scan_detail

inline bool verify_cut(const DnaSequence& seq, const Primer& primer, const Collision& c, u32 cut,
                       Orientation orient = Orientation::Both) {
    if (cut % 10 != 0 || cut <= c.start || cut >= c.end)
        throw OutOfRange("cut " + std::to_string(cut) + " not a multiple of 10 inside (" +
                         std::to_string(c.start) + "," + std::to_string(c.end) + ")");
    if (cut - c.start > 12 || c.end - cut > 12) return false;

    // re-scan both flanks as standalone windows
    u32 wl_lo = cut >= 32 ? cut - 32 : 0;
    u32 wr_hi = static_cast<u32>(std::min<std::size_t>(seq.size(), cut + 32));
    std::vector<std::array<u8, kPrimerLength>> prms;
    {
        std::array<u8, kPrimerLength> fwd{}, rc{};
        DnaSequence rcseq = complement(primer.seq);
        for (u32 i = 0; i < kPrimerLength; i++) {
            fwd[i] = primer.seq.code(i);
            rc[i] = rcseq.code(i);
        }
        prms.push_back(fwd);
        if (orient == Orientation::Both) prms.push_back(rc);
    }
    std::vector<u8> buf;
    std::vector<std::pair<u32, u32>> hits;
    auto check_window = [&](u32 lo, u32 hi) {
        buf.assign(hi - lo, 0);
        for (u32 i = lo; i < hi; i++) buf[i - lo] = seq.code(i);
        for (const auto& prm : prms) {
            hits.clear();
            scan_detail::window_hits(buf.data(), buf.size(), prm, hits);
            for (auto [hs, he] : hits) {
                u32 gs = hs + lo, ge = he + lo;
                if (gs < c.end && ge > c.start) return false;  // residual hit at this locus
            }
        }
        return true;
    };
    if (!check_window(wl_lo, cut)) return false;
    if (!check_window(cut, wr_hi)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// statistics and dump format
// ---------------------------------------------------------------------------

inline CollisionStats count_statistics(const CollisionIndex& index, std::size_t library_size) {
    CollisionStats st;
    st.library_size = library_size;
    st.total_collisions = index.total();
    std::vector<u64> counts(library_size, 0);
    for (std::size_t p = 0; p < index.primer_count() && p < library_size; p++)
        counts[p] = index.count_of(static_cast<u32>(p));
    for (u64 c : counts)
        if (c) st.collided_primers++;
    st.collided_fraction = library_size ? static_cast<double>(st.collided_primers) / library_size : 0;
    st.mean_per_collided = st.collided_primers
        ? static_cast<double>(st.total_collisions) / st.collided_primers : 0.0;
    std::vector<u64> sorted = counts;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) j++;
        st.histogram.push_back({sorted[i], static_cast<u32>(j - i)});
        i = j;
    }
    return st;
}

// CSV: header primer_id,start,end,edits; stable sort by (start, primer_id)
inline void write_collisions_csv(std::ostream& out, const CollisionIndex& index) {
    std::vector<Collision> rows = index.items();
    std::sort(rows.begin(), rows.end(), [](const Collision& a, const Collision& b) {
        return a.start < b.start || (a.start == b.start && a.primer_id < b.primer_id);
    });
    out << "primer_id,start,end,edits\n";
    for (const Collision& c : rows)
        out << c.primer_id << ',' << c.start << ',' << c.end << ',' << static_cast<int>(c.edits)
            << '\n';
}

} // namespace vldna
