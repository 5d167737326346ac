#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>
#include <vector>

#include "vldna/collision.hpp"
#include "vldna/common.hpp"
#include "vldna/primer.hpp"
#include "vldna/seqcore.hpp"

namespace vldna {

// ---------------------------------------------------------------------------
// Length-group analytics
// ---------------------------------------------------------------------------

// Every offset <= horizon expressible as a sum of group lengths (elements
// reusable). Offset 0 is not included; it is the payload start.
inline std::vector<u32> reachable_offsets(const LengthGroup& group, u32 horizon) {
    std::vector<bool> reach(horizon / 10 + 1, false);
    reach[0] = true;
    std::vector<u32> out;
    for (u32 off = 10; off <= horizon; off += 10) {
        bool r = false;
        for (u32 L : group.lengths())
            if (off >= L && reach[(off - L) / 10]) { r = true; break; }
        reach[off / 10] = r;
        if (r) out.push_back(off);
    }
    return out;
}

// Positions b in [0, horizon) with reachable cut points within 12 bases on
// both sides (offset 0 counts as a cut point).
inline u64 covered_bases(const LengthGroup& group, u32 horizon) {
    u32 span = horizon + 13;
    std::vector<bool> is_cut(span + 1, false);
    is_cut[0] = true;
    for (u32 o : reachable_offsets(group, span)) is_cut[o] = true;

    std::vector<u32> next_cut(span + 1, span + 1);
    u32 nxt = span + 1;
    for (i64 b = span; b >= 0; b--) {
        next_cut[b] = nxt;  // nearest cut strictly right of b
        if (is_cut[b]) nxt = static_cast<u32>(b);
    }
    u64 covered = 0;
    u32 last_cut = 0;
    for (u32 b = 0; b < horizon; b++) {
        if (is_cut[b]) last_cut = b;
        if (b - last_cut <= 12 && next_cut[b] - b <= 12) covered++;
    }
    return covered;
}

struct GroupAnalysis {
    LengthGroup group;
    std::vector<u32> offsets;  // reachable offsets up to the horizon
    u64 covered = 0;
};

inline GroupAnalysis analyze_group(const LengthGroup& group, u32 horizon) {
    GroupAnalysis ga{group, reachable_offsets(group, horizon), covered_bases(group, horizon)};
    return ga;
}

// ---------------------------------------------------------------------------
// Conflict graph
// ---------------------------------------------------------------------------

struct ConflictVertex {
    u32 primer_id = 0;
    i64 weight = 0;          // Primer_capacity in bases
    u64 collision_count = 0;
    bool recoverable = true; // all collisions individually cuttable and club-feasible
};

class ConflictGraph {
public:
    std::vector<ConflictVertex> vertices;
    std::vector<std::vector<u32>> adj;  // indices into vertices, symmetric

    std::size_t size() const { return vertices.size(); }
    u64 degree(std::size_t v) const { return adj[v].size(); }

    void add_edge(u32 a, u32 b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    void finish() {
        for (auto& l : adj) {
            std::sort(l.begin(), l.end());
            l.erase(std::unique(l.begin(), l.end()), l.end());
        }
    }
    bool has_edge(u32 a, u32 b) const {
        return std::binary_search(adj[a].begin(), adj[a].end(), b);
    }
};

struct RecoveryPlan {
    std::vector<u32> recovered;   // primer ids, in recovery order
    std::vector<u32> abandoned;   // primer ids
    std::vector<u32> cut_points;  // sorted base positions serving collisions
    u64 collisions_cut = 0;
    std::map<u32, u64> penalty;   // primer id -> cut penalty in bases
};

struct CutPlan {
    bool feasible = false;
    std::vector<u32> boundaries;  // segment ends, ascending, excluding 0
    u32 remainder = 0;            // trailing bases after the last boundary
    u64 segments = 0;

    std::vector<u32> segment_lengths(u32 seq_len) const {
        std::vector<u32> lens;
        u32 prev = 0;
        for (u32 b : boundaries) {
            lens.push_back(b - prev);
            prev = b;
        }
        if (seq_len > prev) lens.push_back(seq_len - prev);
        return lens;
    }
};

// ---------------------------------------------------------------------------
// Planner: valid cuts, cluster feasibility, composition DP, capacities,
// conflict graph, and the greedy recovery pass.
// ---------------------------------------------------------------------------

struct PlannerConfig {
    u64 parallel = 1550000;
    unsigned workers = 0;
    Orientation orientation = Orientation::Both;
};

class Planner {
public:
    Planner(const DnaSequence& seq, const std::vector<Primer>& library,
            const CollisionIndex& index, LengthGroup group, PlannerConfig cfg = {})
        : seq_(seq), library_(library), index_(index), group_(std::move(group)), cfg_(cfg) {
        max_len_ = group_.max_length();
        min_len_ = group_.min_length();
        // reachability bitmap and the all-reachable threshold
        bitmap_bound_ = std::max<u32>(16 * max_len_ + 4500, 8000);
        bitmap_.assign(bitmap_bound_ / 10 + 1, false);
        bitmap_[0] = true;
        for (u32 off = 10; off <= bitmap_bound_; off += 10) {
            bool r = false;
            for (u32 L : group_.lengths())
                if (off >= L && bitmap_[(off - L) / 10]) { r = true; break; }
            bitmap_[off / 10] = r;
        }
        // smallest r with every multiple of 10 in [r, r + max_len] reachable;
        // beyond it the whole grid is reachable (append lengths inductively)
        has_rstar_ = false;
        for (u32 r = 0; r + max_len_ <= bitmap_bound_; r += 10) {
            bool ok = true;
            for (u32 p = r; p <= r + max_len_; p += 10)
                if (!bitmap_[p / 10]) { ok = false; break; }
            if (ok) {
                all_reachable_from_ = r;
                has_rstar_ = true;
                break;
            }
        }
        cluster_gap_ = has_rstar_ ? all_reachable_from_ + 450 : 0;

        // k_min over exact sums, for the local cut penalty
        kmin_bound_ = 13 * max_len_;
        kmin_.assign(kmin_bound_ / 10 + 1, kInfSegs);
        kmin_[0] = 0;
        for (u32 off = 10; off <= kmin_bound_; off += 10) {
            u32 best = kInfSegs;
            for (u32 L : group_.lengths())
                if (off >= L && kmin_[(off - L) / 10] != kInfSegs)
                    best = std::min(best, kmin_[(off - L) / 10] + 1);
            kmin_[off / 10] = best;
        }

        cut_memo_.assign(index_.total(), 0);
    }

    const LengthGroup& group() const { return group_; }
    const CollisionIndex& index() const { return index_; }

    // Multiples of 10 inside (start, end) splitting the collision into parts
    // of <= 12 bases each and passing the flank re-scan.
    std::vector<u32> valid_cuts(std::size_t ordinal) {
        const Collision& c = index_.items()[ordinal];
        u8& memo = cut_memo_[ordinal];
        if (!(memo & 0x80)) {
            u8 mask = 0;
            u32 first = (c.start / 10 + 1) * 10;
            int bit = 0;
            for (u32 x = first; x < c.end && bit < 4; x += 10, bit++) {
                if (c.end - c.start > 24) break;  // no single cut can leave both parts <= 12
                if (x - c.start > 12 || c.end - x > 12) continue;
                if (verify_cut(seq_, library_[c.primer_id], c, x, cfg_.orientation))
                    mask |= static_cast<u8>(1 << bit);
            }
            memo = static_cast<u8>(0x80 | mask);
        }
        std::vector<u32> out;
        u32 first = (c.start / 10 + 1) * 10;
        for (int bit = 0; bit < 4; bit++)
            if (memo & (1 << bit)) out.push_back(first + 10 * bit);
        return out;
    }

    // window of valid cuts, or nullopt when the collision cannot be cut
    std::optional<std::pair<u32, u32>> cut_window(std::size_t ordinal) {
        auto cuts = valid_cuts(ordinal);
        if (cuts.empty()) return std::nullopt;
        return std::make_pair(cuts.front(), cuts.back());
    }

    // ---- local penalty -----------------------------------------------------

    // Cheapest base deficit of a local composition placing a boundary at
    // offset x, versus tiling the same span with maximum-length payloads.
    u64 deficit_at(u32 x) {
        u32 rem = x % max_len_;
        u64 best = kInfPenalty;
        for (u32 j = 0; j <= 12; j++) {
            u64 o = rem + static_cast<u64>(j) * max_len_;
            if (o == 0) return 0;
            if (o > kmin_bound_) break;
            u32 k = kmin_[o / 10];
            if (k == kInfSegs) continue;
            u64 d = static_cast<u64>(k) * max_len_ - o;
            best = std::min(best, d);
        }
        return best;
    }

    // min deficit over the collision's valid cuts; kInfPenalty when uncuttable
    u64 collision_penalty(std::size_t ordinal) {
        u64 best = kInfPenalty;
        for (u32 x : valid_cuts(ordinal)) best = std::min(best, deficit_at(x));
        return best;
    }

    u64 cut_penalty(u32 primer) {
        u64 total = 0;
        std::size_t base = ordinal_base(primer);
        for (std::size_t k = 0; k < index_.count_of(primer); k++) {
            u64 p = collision_penalty(base + k);
            if (p == kInfPenalty) return kInfPenalty;
            total += p;
        }
        return total;
    }

    // (parallel / 2) * max_length - cut_penalty, in bases
    i64 primer_capacity(u32 primer) {
        u64 pen = cut_penalty(primer);
        i64 cap = static_cast<i64>(cfg_.parallel / 2) * max_len_;
        if (pen == kInfPenalty) return std::numeric_limits<i64>::min();
        return cap - static_cast<i64>(pen);
    }

    // ---- cluster feasibility ----------------------------------------------

    struct Window {
        u32 lo, hi;  // valid-cut positions, inclusive
    };

    // Can boundaries spaced by group lengths serve every window? Exact within
    // a cluster that is isolated by at least cluster_gap() from other
    // constrained regions. With `path` set, backtracks one serving boundary
    // sequence through the cluster.
    bool windows_feasible(const std::vector<Window>& windows, std::vector<u32>* path = nullptr) {
        if (windows.empty()) return true;
        u32 wlo = windows.front().lo, whi = 0;
        for (const Window& w : windows) {
            wlo = std::min(wlo, w.lo);
            whi = std::max(whi, w.hi);
        }
        u32 a0 = wlo > max_len_ + 10 ? wlo - max_len_ - 10 : 0;
        u32 a1 = whi + max_len_ + 10;
        std::size_t npos = (a1 - a0) / 10 + 1;
        static thread_local std::vector<u8> reach, entry, from;
        static thread_local std::vector<Window> ws;
        reach.assign(npos, 0);
        entry.assign(npos, 0);
        from.assign(npos, 0xff);
        ws.assign(windows.begin(), windows.end());
        std::sort(ws.begin(), ws.end(), [](const Window& a, const Window& b) {
            return a.hi < b.hi;
        });
        // entry states: positions at or before the first window
        for (u32 p = a0; p <= wlo; p += 10)
            if (entry_reachable(p)) {
                reach[(p - a0) / 10] = true;
                entry[(p - a0) / 10] = true;
            }
        // forward transitions with the passed-window rule: a -> b invalid if
        // some window lies entirely inside (a, b)
        std::size_t passed = 0;
        i64 passed_max_lo = -1;
        for (u32 b = a0 + 10; b <= a1; b += 10) {
            while (passed < ws.size() && ws[passed].hi < b) {
                passed_max_lo = std::max<i64>(passed_max_lo, ws[passed].lo);
                passed++;
            }
            std::size_t bi = (b - a0) / 10;
            if (reach[bi]) continue;  // entry state
            for (std::size_t li = 0; li < group_.lengths().size(); li++) {
                u32 L = group_.lengths()[li];
                if (b < a0 + L) continue;
                u32 a = b - L;
                if (a < a0) continue;
                if (!reach[(a - a0) / 10]) continue;
                if (passed_max_lo > static_cast<i64>(a)) continue;  // skipped a window
                reach[bi] = true;
                from[bi] = static_cast<u8>(li);
                break;
            }
        }
        // exit: a reachable boundary past the last window without skipping one
        for (u32 p = whi + 10; p <= a1; p += 10) {
            std::size_t pi = (p - a0) / 10;
            if (!reach[pi]) continue;
            if (path) {
                path->clear();
                u32 cur = p;
                while (!entry[(cur - a0) / 10]) {
                    path->push_back(cur);
                    cur -= group_.lengths()[from[(cur - a0) / 10]];
                }
                path->push_back(cur);
                std::reverse(path->begin(), path->end());
            }
            return true;
        }
        return false;
    }

    u32 cluster_gap() const {
        if (!has_rstar_)
            throw Error("length group " + group_.to_string() +
                        " has no all-reachable threshold; clustered planning unsupported");
        return cluster_gap_;
    }

    bool group_has_threshold() const { return has_rstar_; }
    u32 all_reachable_from() const { return all_reachable_from_; }

    // ---- per-primer solo feasibility ----------------------------------------

    bool solo_feasible(u32 primer) {
        std::size_t base = ordinal_base(primer);
        std::size_t count = index_.count_of(primer);
        std::vector<Window> cluster;
        u32 gap = cluster_gap();
        i64 prev_hi = -1;
        for (std::size_t k = 0; k < count; k++) {
            auto w = cut_window(base + k);
            if (!w) return false;
            if (prev_hi >= 0 && w->first > static_cast<u32>(prev_hi) + gap) {
                if (!windows_feasible(cluster)) return false;
                cluster.clear();
            }
            cluster.push_back(Window{w->first, w->second});
            prev_hi = std::max<i64>(prev_hi, w->second);
        }
        return cluster.empty() || windows_feasible(cluster);
    }

    // ---- full composition ---------------------------------------------------

    // Tiles [0, seq_len) with group lengths so that every required collision
    // interval contains a verified boundary; minimizes the segment count
    // (equivalently maximizes average payload length).
    CutPlan compose_cuts(u64 seq_len, const std::vector<std::size_t>& required_ordinals) {
        CutPlan plan;
        std::vector<Window> ws;
        ws.reserve(required_ordinals.size());
        for (std::size_t ord : required_ordinals) {
            auto w = cut_window(ord);
            if (!w) return plan;  // infeasible
            ws.push_back(Window{w->first, w->second});
        }
        std::sort(ws.begin(), ws.end(), [](const Window& a, const Window& b) {
            return a.hi < b.hi;
        });

        u64 npos = seq_len / 10 + 1;
        std::vector<u32> dp(npos, kInfSegs);
        std::vector<u8> choice(npos, 0xff);
        dp[0] = 0;
        std::size_t passed = 0;
        i64 passed_max_lo = -1;
        const auto& lens = group_.lengths();
        for (u64 b = 10; b <= seq_len - seq_len % 10; b += 10) {
            while (passed < ws.size() && ws[passed].hi < b) {
                passed_max_lo = std::max<i64>(passed_max_lo, ws[passed].lo);
                passed++;
            }
            u32 best = kInfSegs;
            u8 pick = 0xff;
            for (std::size_t li = lens.size(); li-- > 0;) {
                u32 L = lens[li];
                if (b < L) continue;
                u64 a = b - L;
                if (dp[a / 10] == kInfSegs) continue;
                if (passed_max_lo > static_cast<i64>(a)) continue;
                if (dp[a / 10] + 1 < best) {
                    best = dp[a / 10] + 1;
                    pick = static_cast<u8>(li);
                }
            }
            dp[b / 10] = best;
            choice[b / 10] = pick;
        }

        // stop position: all windows served, remainder shorter than the
        // smallest group length
        i64 stop = -1;
        u32 last_window_hi = ws.empty() ? 0 : 0;
        i64 max_lo_all = -1;
        for (const Window& w : ws) max_lo_all = std::max<i64>(max_lo_all, w.lo);
        for (i64 p = static_cast<i64>(seq_len - seq_len % 10); p >= 0; p -= 10) {
            if (seq_len - p >= min_len_) break;
            if (dp[p / 10] == kInfSegs) continue;
            if (max_lo_all > p) continue;  // a window lies wholly beyond the stop
            stop = p;
            break;
        }
        (void)last_window_hi;
        if (stop < 0) return plan;

        plan.feasible = true;
        plan.segments = dp[stop / 10];
        plan.remainder = static_cast<u32>(seq_len - stop);
        std::vector<u32> rev;
        for (i64 p = stop; p > 0;) {
            rev.push_back(static_cast<u32>(p));
            p -= group_.lengths()[choice[p / 10]];
        }
        std::reverse(rev.begin(), rev.end());
        plan.boundaries = std::move(rev);
        if (plan.remainder > 0) plan.segments += 1;
        return plan;
    }

    // ---- conflict graph ------------------------------------------------------

    // joint cut feasibility over the union of two primers' collisions
    bool joint_feasible(u32 pa, u32 pb) {
        if (!solo_cache_valid_) build_solo_cache();
        if (!solo_[pa] || !solo_[pb]) return false;
        // merge both sorted collision lists and test mixed clusters
        const Collision* a = index_.begin_of(pa);
        const Collision* ae = index_.end_of(pa);
        const Collision* b = index_.begin_of(pb);
        const Collision* be = index_.end_of(pb);
        u32 gap = cluster_gap();
        std::vector<Window> cluster;
        bool mixed = false;
        i64 prev_hi = -1;
        auto flush = [&]() {
            bool ok = !mixed || windows_feasible(cluster);
            cluster.clear();
            mixed = false;
            return ok;
        };
        bool which_last = false;
        bool seen_a = false, seen_b = false;
        while (a != ae || b != be) {
            bool take_a = b == be || (a != ae && a->start <= b->start);
            const Collision* c = take_a ? a : b;
            std::size_t ord = take_a ? ordinal_of(pa, a) : ordinal_of(pb, b);
            if (take_a) ++a; else ++b;
            auto w = cut_window(ord);
            if (!w) return false;  // cannot happen for solo-feasible primers
            if (prev_hi >= 0 && w->first > static_cast<u32>(prev_hi) + gap) {
                if (!flush()) return false;
                seen_a = seen_b = false;
            }
            cluster.push_back(Window{w->first, w->second});
            (take_a ? seen_a : seen_b) = true;
            mixed = seen_a && seen_b;
            prev_hi = std::max<i64>(prev_hi, w->second);
            which_last = take_a;
        }
        (void)which_last;
        return flush();
    }

    ConflictGraph build_conflict_graph() {
        if (!solo_cache_valid_) build_solo_cache();
        ConflictGraph g;
        std::vector<u32> collided;
        for (u32 p = 0; p < index_.primer_count(); p++)
            if (index_.count_of(p) > 0) collided.push_back(p);
        g.vertices.resize(collided.size());
        g.adj.resize(collided.size());
        std::map<u32, u32> vid;
        for (std::size_t v = 0; v < collided.size(); v++) {
            u32 p = collided[v];
            vid[p] = static_cast<u32>(v);
            g.vertices[v] = ConflictVertex{p, primer_capacity(p), index_.count_of(p), solo_[p]};
        }
        // pairwise joint feasibility; unrecoverable vertices conflict with all
        std::size_t nv = collided.size();
        std::vector<std::vector<u32>> rows(nv);
        unsigned workers = cfg_.workers ? cfg_.workers : std::thread::hardware_concurrency();
        workers = std::max(1u, workers);
        std::atomic<std::size_t> next{0};
        auto body = [&] {
            for (;;) {
                std::size_t v = next.fetch_add(1);
                if (v >= nv) break;
                for (std::size_t u = v + 1; u < nv; u++) {
                    bool edge;
                    if (!g.vertices[v].recoverable || !g.vertices[u].recoverable)
                        edge = true;
                    else
                        edge = !joint_feasible(collided[v], collided[u]);
                    if (edge) rows[v].push_back(static_cast<u32>(u));
                }
            }
        };
        if (workers <= 1 || nv < 64) {
            body();
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; w++) pool.emplace_back(body);
            for (auto& t : pool) t.join();
        }
        for (std::size_t v = 0; v < nv; v++)
            for (u32 u : rows[v]) g.add_edge(static_cast<u32>(v), u);
        g.finish();
        return g;
    }

    // ---- the greedy recovery pass (Algorithm 1) ------------------------------

    enum class SortKey { ByCollisions, ByConflicts };

    RecoveryPlan vl_dna(const ConflictGraph& graph, SortKey order) {
        if (!solo_cache_valid_) build_solo_cache();
        std::size_t nv = graph.size();
        // ascending (key, primer id), packed so the sort stays cheap
        static thread_local std::vector<u32> perm, bucket_off;
        perm.resize(nv);
        u64 max_key = 0;
        auto key_of = [&](std::size_t v) {
            return order == SortKey::ByCollisions ? graph.vertices[v].collision_count
                                                  : graph.degree(v);
        };
        for (std::size_t v = 0; v < nv; v++) max_key = std::max(max_key, key_of(v));
        // counting sort on (key, primer id); vertices arrive in id order
        bucket_off.assign(max_key + 2, 0);
        for (std::size_t v = 0; v < nv; v++) bucket_off[key_of(v) + 1]++;
        for (std::size_t k = 0; k <= max_key; k++) bucket_off[k + 1] += bucket_off[k];
        for (std::size_t v = 0; v < nv; v++) perm[bucket_off[key_of(v)]++] = static_cast<u32>(v);

        enum State : u8 { Pending, Recovered, Abandoned };
        std::vector<State> state(nv, Pending);
        RecoveryPlan plan;
        std::vector<std::size_t> committed;  // collision ordinals

        for (u32 i = 0; i < nv; i++) {
            u32 v = perm[i];
            if (state[v] != Pending) continue;
            u32 p = graph.vertices[v].primer_id;
            if (!graph.vertices[v].recoverable || graph.vertices[v].weight <= 0) {
                state[v] = Abandoned;
                continue;
            }
            state[v] = Recovered;
            plan.recovered.push_back(p);
            plan.penalty[p] = cut_penalty(p);
            plan.collisions_cut += index_.count_of(p);
            std::size_t base = ordinal_base(p);
            for (std::size_t k = 0; k < index_.count_of(p); k++) committed.push_back(base + k);
            for (u32 u : graph.adj[v])
                if (state[u] == Pending) state[u] = Abandoned;
        }
        std::sort(committed.begin(), committed.end(), [&](std::size_t a, std::size_t b) {
            return index_.items()[a].start < index_.items()[b].start;
        });

        for (u32 v = 0; v < nv; v++)
            if (state[v] == Abandoned) plan.abandoned.push_back(graph.vertices[v].primer_id);
        std::sort(plan.abandoned.begin(), plan.abandoned.end());

        // functional cut point per committed collision (first valid cut);
        // the composition stage later realizes a consistent boundary set
        plan.cut_points.reserve(committed.size());
        for (std::size_t ord : committed) {
            auto w = cut_window(ord);
            if (w) plan.cut_points.push_back(w->first);
        }
        std::sort(plan.cut_points.begin(), plan.cut_points.end());
        plan.cut_points.erase(std::unique(plan.cut_points.begin(), plan.cut_points.end()),
                              plan.cut_points.end());
        committed_ = std::move(committed);
        recovered_ = plan.recovered;
        return plan;
    }

    // Composition for the final plan. Pairwise conflict edges leave rare
    // three-way cluster groupings uncuttable; those drop their
    // latest-recovered contributor here until every cluster composes.
    CutPlan compose_committed(u64 seq_len) {
        dropped_.clear();
        std::map<u32, std::size_t> rank;
        for (std::size_t i = 0; i < recovered_.size(); i++) rank[recovered_[i]] = i;
        for (int round = 0; round < 64; round++) {
            // verify per-cluster feasibility, dropping one primer per failure
            u32 gap = cluster_gap();
            std::vector<Window> cluster;
            std::vector<std::size_t> members;
            i64 prev_hi = -1;
            bool again = false;
            auto check = [&]() {
                if (cluster.empty() || windows_feasible(cluster)) return true;
                u32 worst = index_.items()[members.front()].primer_id;
                std::size_t worst_rank = 0;
                for (std::size_t ord : members) {
                    u32 p = index_.items()[ord].primer_id;
                    if (rank[p] >= worst_rank) { worst_rank = rank[p]; worst = p; }
                }
                dropped_.insert(worst);
                return false;
            };
            for (std::size_t ord : committed_) {
                if (dropped_.count(index_.items()[ord].primer_id)) continue;
                auto w = cut_window(ord);
                if (prev_hi >= 0 && w->first > static_cast<u32>(prev_hi) + gap) {
                    if (!check()) { again = true; break; }
                    cluster.clear();
                    members.clear();
                }
                cluster.push_back(Window{w->first, w->second});
                members.push_back(ord);
                prev_hi = std::max<i64>(prev_hi, w->second);
            }
            if (!again && !check()) again = true;
            if (again) continue;

            std::vector<std::size_t> kept;
            kept.reserve(committed_.size());
            for (std::size_t ord : committed_)
                if (!dropped_.count(index_.items()[ord].primer_id)) kept.push_back(ord);
            CutPlan plan = compose_cuts(seq_len, kept);
            if (plan.feasible) {
                committed_ = std::move(kept);
                return plan;
            }
            // the full DP can still fail near position 0; drop the owner of
            // the earliest window and retry
            if (kept.empty()) return plan;
            dropped_.insert(index_.items()[kept.front()].primer_id);
        }
        return CutPlan{};
    }
    const std::vector<std::size_t>& committed() const { return committed_; }
    const std::set<u32>& dropped() const { return dropped_; }

    static constexpr u32 kInfSegs = 0x3fffffff;
    static constexpr u64 kInfPenalty = ~u64(0);

private:
    std::size_t ordinal_base(u32 primer) const {
        return static_cast<std::size_t>(index_.begin_of(primer) - index_.items().data());
    }
    std::size_t ordinal_of(u32 primer, const Collision* c) const {
        (void)primer;
        return static_cast<std::size_t>(c - index_.items().data());
    }

    bool bitmap_reach(u32 p) const { return p <= bitmap_bound_ && bitmap_[p / 10]; }

    bool entry_reachable(u32 p) const {
        if (p % 10 != 0) return false;
        if (has_rstar_ && p >= all_reachable_from_) return true;
        return bitmap_reach(p);
    }

    void build_solo_cache() {
        solo_.assign(index_.primer_count(), false);
        for (u32 p = 0; p < index_.primer_count(); p++)
            if (index_.count_of(p)) solo_[p] = solo_feasible(p);
        solo_cache_valid_ = true;
    }

    // One serving cut per committed collision, from per-cluster local paths
    // (the full composition happens later in the pipeline). Cost scales with
    // the committed set, not the sequence.
    std::vector<u32> serving_cuts(const std::vector<std::size_t>& committed) {
        std::vector<u32> cuts;
        if (committed.empty()) return cuts;
        u32 gap = cluster_gap();
        std::vector<Window> cluster;
        std::vector<u32> path;
        i64 prev_hi = -1;
        auto flush = [&]() {
            if (cluster.empty()) return;
            if (windows_feasible(cluster, &path)) {
                for (const Window& w : cluster)
                    for (u32 b : path)
                        if (b >= w.lo && b <= w.hi) { cuts.push_back(b); break; }
            }
            cluster.clear();
        };
        for (std::size_t ord : committed) {
            auto w = cut_window(ord);
            if (!w) continue;
            if (prev_hi >= 0 && w->first > static_cast<u32>(prev_hi) + gap) flush();
            cluster.push_back(Window{w->first, w->second});
            prev_hi = std::max<i64>(prev_hi, w->second);
        }
        flush();
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        return cuts;
    }

    const DnaSequence& seq_;
    const std::vector<Primer>& library_;
    const CollisionIndex& index_;
    LengthGroup group_;
    PlannerConfig cfg_;
    u32 max_len_ = 200, min_len_ = 150;
    u32 bitmap_bound_ = 0;
    std::vector<bool> bitmap_;
    bool has_rstar_ = false;
    u32 all_reachable_from_ = 0;
    u32 cluster_gap_ = 600;
    u32 kmin_bound_ = 0;
    std::vector<u32> kmin_;
    std::vector<u8> cut_memo_;
    std::vector<bool> solo_;
    bool solo_cache_valid_ = false;
    std::vector<std::size_t> committed_;
    std::vector<u32> recovered_;
    std::set<u32> dropped_;
};

// ---------------------------------------------------------------------------
// Exact maximum-weight independent set, test oracle only (<= 24 vertices).
// ---------------------------------------------------------------------------

inline std::pair<std::vector<u32>, i64> mwis_exact(const ConflictGraph& graph) {
    std::size_t n = graph.size();
    if (n > 24) throw TooLarge("mwis_exact supports at most 24 vertices, got " +
                               std::to_string(n));
    std::vector<u32> adj_mask(n, 0);
    for (std::size_t v = 0; v < n; v++)
        for (u32 u : graph.adj[v]) adj_mask[v] |= (1u << u);

    i64 best = 0;
    u32 best_mask = 0;
    // branch and bound over vertices; weights can be negative, so skipping a
    // vertex is always allowed
    struct Frame { u32 v; u32 chosen; i64 w; u32 forbidden; };
    std::vector<Frame> stack{{0, 0, 0, 0}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.v == n) {
            if (f.w > best) { best = f.w; best_mask = f.chosen; }
            continue;
        }
        // upper bound: add all remaining positive weights
        i64 ub = f.w;
        for (std::size_t u = f.v; u < n; u++)
            if (graph.vertices[u].weight > 0) ub += graph.vertices[u].weight;
        if (ub <= best && !(f.v == 0 && best == 0)) continue;

        stack.push_back(Frame{f.v + 1, f.chosen, f.w, f.forbidden});  // exclude
        if (!(f.forbidden & (1u << f.v)))
            stack.push_back(Frame{f.v + 1, f.chosen | (1u << f.v),
                                  f.w + graph.vertices[f.v].weight,
                                  f.forbidden | adj_mask[f.v]});      // include
    }
    std::vector<u32> verts;
    for (std::size_t v = 0; v < n; v++)
        if (best_mask & (1u << v)) verts.push_back(static_cast<u32>(v));
    return {verts, best};
}

// Pure-graph greedy recovery: the planner's loop without cut feasibility.
// Returns vertex indices.
inline std::pair<std::vector<u32>, i64> greedy_recover(const ConflictGraph& graph,
                                                       Planner::SortKey order) {
    std::size_t nv = graph.size();
    std::vector<u32> perm(nv);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](u32 x, u32 y) {
        u64 kx = order == Planner::SortKey::ByCollisions ? graph.vertices[x].collision_count
                                                         : graph.degree(x);
        u64 ky = order == Planner::SortKey::ByCollisions ? graph.vertices[y].collision_count
                                                         : graph.degree(y);
        if (kx != ky) return kx < ky;
        return graph.vertices[x].primer_id < graph.vertices[y].primer_id;
    });
    enum State : u8 { Pending, Recovered, Abandoned };
    std::vector<State> state(nv, Pending);
    std::vector<u32> out;
    i64 weight = 0;
    for (u32 v : perm) {
        if (state[v] != Pending) continue;
        state[v] = Recovered;
        out.push_back(v);
        weight += graph.vertices[v].weight;
        for (u32 u : graph.adj[v])
            if (state[u] == Pending) state[u] = Abandoned;
    }
    return {out, weight};
}

// structured text report for a recovery plan
inline void write_plan_report(std::ostream& out, const RecoveryPlan& plan) {
    out << "recovered " << plan.recovered.size() << '\n';
    for (u32 p : plan.recovered) out << "r " << p << " penalty " << plan.penalty.at(p) << '\n';
    out << "abandoned " << plan.abandoned.size() << '\n';
    for (u32 p : plan.abandoned) out << "a " << p << '\n';
    out << "cut_points " << plan.cut_points.size() << '\n';
    for (u32 c : plan.cut_points) out << "c " << c << '\n';
    out << "collisions_cut " << plan.collisions_cut << '\n';
}

} // namespace vldna
