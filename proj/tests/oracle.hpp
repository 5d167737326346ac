#pragma once

// Test-only oracles, kept independent of the library's scanner and planner
// code paths.

#include <algorithm>
#include <map>
#include <vector>

#include "vldna/collision.hpp"
#include "vldna/primer.hpp"
#include "vldna/seqcore.hpp"

namespace oracle {

using namespace vldna;

// Plain quadratic banded alignment: D over (primer consumed l, seq consumed k)
// with |k - l| <= 2, no early exit, no seeding. A hit at start s is any cell
// with l >= 13, k >= 13, D <= 2.
struct OracleHit {
    u32 s, e;
    u32 len, edits;
};

inline bool oracle_eval_start(const std::vector<u8>& seq, const std::vector<u8>& prm,
                              std::size_t s, OracleHit& out) {
    const int INF = 1000;
    bool found = false;
    u32 e_best = 0, len_best = 0, ed_best = kMaxEdits + 1;
    int m = static_cast<int>(prm.size());
    for (int ps = 0; ps + static_cast<int>(kMinMatch) <= m; ps++) {
        int maxl = m - ps;
        int maxk = static_cast<int>(std::min<std::size_t>(seq.size() - s, maxl + 2));
        // full small matrix
        std::vector<std::vector<int>> D(maxl + 1, std::vector<int>(maxk + 1, INF));
        D[0][0] = 0;
        for (int k = 1; k <= std::min(maxk, 2); k++) D[0][k] = k;
        for (int l = 1; l <= maxl; l++)
            for (int k = 0; k <= maxk; k++) {
                if (k < l - 2 || k > l + 2) continue;
                int v = INF;
                if (l > 0 && k > 0 && D[l - 1][k - 1] < INF)
                    v = std::min(v, D[l - 1][k - 1] +
                                        (prm[ps + l - 1] != seq[s + k - 1] ? 1 : 0));
                if (l > 0 && D[l - 1][k] < INF) v = std::min(v, D[l - 1][k] + 1);
                if (k > 0 && D[l][k - 1] < INF) v = std::min(v, D[l][k - 1] + 1);
                D[l][k] = v;
                if (l >= static_cast<int>(kMinMatch) && k >= static_cast<int>(kMinMatch) &&
                    v <= static_cast<int>(kMaxEdits)) {
                    found = true;
                    e_best = std::max<u32>(e_best, static_cast<u32>(s + k));
                    len_best = std::max<u32>(len_best, static_cast<u32>(l));
                    ed_best = std::min<u32>(ed_best, static_cast<u32>(v));
                }
            }
    }
    if (found) out = OracleHit{static_cast<u32>(s), e_best, len_best, ed_best};
    return found;
}

// Full scan oracle: every start, every primer, both orientations, merged into
// maximal regions exactly like the production definition.
inline std::vector<Collision> oracle_scan(const DnaSequence& seq,
                                          const std::vector<Primer>& library,
                                          Orientation orient = Orientation::Both) {
    std::vector<u8> sb(seq.size());
    for (std::size_t i = 0; i < seq.size(); i++) sb[i] = seq.code(i);

    std::vector<Collision> out;
    for (const Primer& p : library) {
        std::vector<std::vector<u8>> prms;
        {
            std::vector<u8> fwd(p.seq.size());
            for (std::size_t i = 0; i < p.seq.size(); i++) fwd[i] = p.seq.code(i);
            prms.push_back(fwd);
            if (orient == Orientation::Both) {
                DnaSequence r = vldna::complement(p.seq);
                std::vector<u8> rc(r.size());
                for (std::size_t i = 0; i < r.size(); i++) rc[i] = r.code(i);
                prms.push_back(rc);
            }
        }
        std::vector<OracleHit> hits;
        for (std::size_t s = 0; s + kMinMatch <= seq.size(); s++) {
            OracleHit merged_at_s{0, 0, 0, kMaxEdits + 1};
            bool any = false;
            for (const auto& prm : prms) {
                OracleHit h;
                if (oracle_eval_start(sb, prm, s, h)) {
                    if (!any) {
                        merged_at_s = h;
                    } else {
                        merged_at_s.e = std::max(merged_at_s.e, h.e);
                        merged_at_s.len = std::max(merged_at_s.len, h.len);
                        merged_at_s.edits = std::min(merged_at_s.edits, h.edits);
                    }
                    any = true;
                }
            }
            if (any) hits.push_back(merged_at_s);
        }
        // merge overlapping [s, e) windows
        for (std::size_t i = 0; i < hits.size();) {
            Collision c{p.id, hits[i].s, hits[i].e, static_cast<u8>(hits[i].len),
                        static_cast<u8>(hits[i].edits), 0};
            std::size_t j = i + 1;
            while (j < hits.size() && hits[j].s < c.end) {
                c.end = std::max(c.end, hits[j].e);
                c.match_len = std::max<u8>(c.match_len, static_cast<u8>(hits[j].len));
                c.edits = std::min<u8>(c.edits, static_cast<u8>(hits[j].edits));
                j++;
            }
            out.push_back(c);
            i = j;
        }
    }
    std::sort(out.begin(), out.end(), [](const Collision& a, const Collision& b) {
        return a.primer_id < b.primer_id || (a.primer_id == b.primer_id && a.start < b.start);
    });
    return out;
}

// Exhaustive composition search: can [0, total) be tiled by group lengths so
// that every required window [lo, hi] (inclusive positions) contains a
// boundary, with a final remainder shorter than the minimum group length?
// Used to validate the planner's DP.
namespace detail {
inline bool compose_rec(u32 total, const std::vector<std::pair<u32, u32>>& windows,
                        const std::vector<u32>& lengths, u32 min_len, u32 pos,
                        std::vector<u32>& cur, std::vector<u32>* boundaries) {
    auto served = [&](u32 lo, u32 hi) {
        for (u32 b : cur)
            if (b >= lo && b <= hi) return true;
        return false;
    };
    for (const auto& [lo, hi] : windows)
        if (hi < pos && !served(lo, hi)) return false;  // window passed unserved
    if (total - pos < min_len) {
        for (const auto& [lo, hi] : windows)
            if (!served(lo, hi)) return false;
        if (boundaries) *boundaries = cur;
        return true;  // stop; remainder = total - pos
    }
    for (u32 L : lengths) {
        if (pos + L > total) continue;
        cur.push_back(pos + L);
        bool ok = compose_rec(total, windows, lengths, min_len, pos + L, cur, boundaries);
        cur.pop_back();
        if (ok) return true;
    }
    // also allowed: stop early leaving a remainder >= min_len is NOT allowed,
    // so nothing else to try
    return false;
}
} // namespace detail

inline bool exhaustive_compose(u32 total, const std::vector<std::pair<u32, u32>>& windows,
                               const std::vector<u32>& lengths,
                               std::vector<u32>* boundaries = nullptr) {
    std::vector<u32> cur;
    u32 min_len = *std::min_element(lengths.begin(), lengths.end());
    return detail::compose_rec(total, windows, lengths, min_len, 0, cur, boundaries);
}

} // namespace oracle
