#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vldna/codec.hpp"
#include "vldna/collision.hpp"
#include "vldna/common.hpp"
#include "vldna/ecc.hpp"
#include "vldna/planner.hpp"
#include "vldna/primer.hpp"
#include "vldna/seqcore.hpp"

namespace vldna {

// ---------------------------------------------------------------------------
// Tube configuration and report
// ---------------------------------------------------------------------------

enum class Scheme { Fixed, Randomized, VldnaCollisions, VldnaConflicts };

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Fixed: return "fixed";
        case Scheme::Randomized: return "randomized";
        case Scheme::VldnaCollisions: return "vldna-collisions";
        case Scheme::VldnaConflicts: return "vldna-conflicts";
    }
    return "?";
}

struct TubeConfig {
    u64 buffer_target = u64(1) << 25;  // bytes of digital data per tube
    u64 parallel_factor = 1550000;     // strands per primer pair
    double tolerance = 0.05;
    LengthGroup group = LengthGroup::default_group();
    CodecId codec = CodecId::Blawat;
    u32 max_payload = 200;
    u64 seed = 1;                      // randomization seed base
    u32 rand_attempts = 5;             // randomized-baseline variants per payload
    unsigned workers = 0;
    Orientation orientation = Orientation::Both;
};

struct TubeReport {
    std::string scheme;
    std::string codec;
    u64 usable_primers = 0;
    u64 recovered_primers = 0;
    double avg_payload_len = 0;
    u64 strands = 0;
    u64 capacity_bytes = 0;
    u64 collisions_cut = 0;
    u64 input_bytes = 0;
    bool converged = true;
    u32 iterations = 1;
};

// The DNA tube capacity: payload length x encoding density x parallel factor
// x usable primers / 2, floored to bytes.
inline u64 tube_capacity(double payload_len, double density, u64 parallel, u64 usable_primers) {
    long double bits = static_cast<long double>(payload_len) * density *
                       static_cast<long double>(parallel) *
                       (static_cast<long double>(usable_primers) / 2.0L);
    return static_cast<u64>(std::floor(bits / 8.0L));
}

// ---------------------------------------------------------------------------
// Payload framing
// ---------------------------------------------------------------------------

namespace pipe_detail {

// Rotation chains each base on the previous one, so the randomized baseline
// frames rotation payloads as independently encoded byte quanta; every other
// path cuts the continuous stream (for the other codecs, randomization
// touches whole codec blocks inside each payload).
inline bool payload_framed(CodecId codec, bool randomized) {
    return randomized && codec == CodecId::Rotation;
}

inline u64 payload_bytes_quantum(CodecId codec, u32 max_payload) {
    return static_cast<u64>(std::floor(max_payload * codec_density(codec) / 8.0));
}

// byte range [lo, hi) of codec blocks lying fully inside payload k of a
// continuous stream cut at max_payload
inline std::pair<u64, u64> inner_block_bytes(CodecId codec, u64 k, u32 max_payload, u64 nbytes) {
    u64 base_lo = static_cast<u64>(k) * max_payload;
    u64 base_hi = base_lo + max_payload;
    u64 block_bases = codec == CodecId::Blawat ? 5 : 9;
    u64 block_bytes = codec == CodecId::Blawat ? 1 : 2;
    u64 first_block = (base_lo + block_bases - 1) / block_bases;
    u64 last_block = base_hi / block_bases;
    u64 lo = std::min(first_block * block_bytes, nbytes);
    u64 hi = std::min(last_block * block_bytes, nbytes);
    return {lo, hi};
}

struct Payload {
    DnaSequence bases;
    u64 seed = 0;  // 0 = not randomized
};

} // namespace pipe_detail

// ---------------------------------------------------------------------------
// Tube: the assembled result of one pipeline run
// ---------------------------------------------------------------------------

struct Tube {
    TubeConfig cfg;
    TubeReport report;
    // binary-search iterations: input bytes, generated payloads, storable
    // payloads, storable bytes
    std::vector<std::array<u64, 4>> trace;
    std::vector<PrimerPair> pairs;                  // usable pairs, id order
    std::vector<DnaSequence> pair_fwd, pair_rev;    // primer sequences per pair
    std::vector<pipe_detail::Payload> payloads;     // tube payloads in stream order
    Bytes input;                                    // the ingested digital data

    std::vector<Strand> strands() const {
        std::vector<Strand> out;
        out.reserve(payloads.size());
        for (std::size_t j = 0; j < payloads.size(); j++) {
            u64 rank = j / cfg.parallel_factor;
            u64 index = j % cfg.parallel_factor;
            if (rank >= pairs.size())
                throw Error("tube overflow: payload " + std::to_string(j) +
                            " exceeds pair capacity");
            bool rem = !cfg.group.contains(static_cast<u32>(payloads[j].bases.size()));
            out.push_back(assemble_strand(payloads[j].bases, pair_fwd[rank], pair_rev[rank],
                                          index, cfg.group, rem));
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Shared pipeline pieces
// ---------------------------------------------------------------------------

namespace pipe_detail {

inline std::vector<u32> usable_ids(const std::vector<Primer>& lib, const CollisionIndex& idx,
                                   const std::vector<u32>& recovered) {
    std::vector<u32> ids;
    for (const Primer& p : lib)
        if (p.id >= idx.primer_count() || idx.count_of(p.id) == 0) ids.push_back(p.id);
    ids.insert(ids.end(), recovered.begin(), recovered.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

inline void fill_pairs(Tube& tube, const std::vector<Primer>& lib, const std::vector<u32>& ids) {
    tube.pairs = pair_ids(ids);
    for (const PrimerPair& pr : tube.pairs) {
        tube.pair_fwd.push_back(lib[pr.forward].seq);
        tube.pair_rev.push_back(lib[pr.reverse].seq);
    }
}

inline double avg_len(const std::vector<Payload>& ps) {
    if (ps.empty()) return 0;
    u64 total = 0;
    for (const Payload& p : ps) total += p.bases.size();
    return static_cast<double>(total) / ps.size();
}

// cut a sequence at fixed max_payload boundaries
inline std::vector<Payload> cut_fixed(const DnaSequence& seq, u32 max_payload) {
    std::vector<Payload> out;
    for (std::size_t pos = 0; pos < seq.size(); pos += max_payload)
        out.push_back({seq.subseq(pos, std::min<std::size_t>(max_payload, seq.size() - pos)), 0});
    return out;
}

inline void finish_report(TubeReport& rep, const TubeConfig& cfg,
                          const std::vector<Payload>& payloads) {
    rep.codec = codec_name(cfg.codec);
    rep.avg_payload_len = avg_len(payloads);
    rep.strands = payloads.size();
    rep.capacity_bytes =
        tube_capacity(rep.avg_payload_len, codec_density(cfg.codec), cfg.parallel_factor,
                      rep.usable_primers);
}

} // namespace pipe_detail

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

inline Tube run_baseline_fixed(const Bytes& data, const TubeConfig& cfg,
                               const std::vector<Primer>& lib) {
    Tube tube;
    tube.cfg = cfg;
    tube.input = data;
    Bytes ecc = ecc_encode(data);
    DnaSequence seq = encode(ecc, cfg.codec);
    ScanConfig sc{cfg.orientation, cfg.workers};
    CollisionIndex idx = scan(seq, lib, sc);
    tube.payloads = pipe_detail::cut_fixed(seq, cfg.max_payload);

    tube.report.scheme = scheme_name(Scheme::Fixed);
    tube.report.input_bytes = data.size();
    tube.report.usable_primers = lib.size() - idx.collided_count();
    pipe_detail::fill_pairs(tube, lib, pipe_detail::usable_ids(lib, idx, {}));
    pipe_detail::finish_report(tube.report, cfg, tube.payloads);
    return tube;
}

// Per 200-base payload, try cfg.rand_attempts keystream variants (attempt 0
// leaves the payload unchanged) and keep the one colliding with the fewest
// primers; ties pick the lowest attempt.
inline Tube run_baseline_randomized(const Bytes& data, const TubeConfig& cfg,
                                    const std::vector<Primer>& lib) {
    using namespace pipe_detail;
    Tube tube;
    tube.cfg = cfg;
    tube.input = data;
    Bytes ecc = ecc_encode(data);
    ScanConfig sc{cfg.orientation, cfg.workers};
    ScanIndex sidx(lib, cfg.orientation);

    auto variant_seed = [&](u64 ordinal, u32 attempt) -> u64 {
        if (attempt == 0) return 0;
        SplitMix64 h(cfg.seed ^ (ordinal * 131 + attempt));
        u64 s = h.next();
        return s ? s : 1;
    };

    std::vector<Payload> chosen;
    Bytes final_bytes = ecc;

    if (payload_framed(cfg.codec, true)) {
        u64 quantum = payload_bytes_quantum(cfg.codec, cfg.max_payload);
        u64 count = (ecc.size() + quantum - 1) / quantum;
        for (u64 k = 0; k < count; k++) {
            u64 lo = k * quantum, hi = std::min<u64>(ecc.size(), lo + quantum);
            Bytes part(ecc.begin() + lo, ecc.begin() + hi);
            Payload best;
            std::size_t best_collided = ~std::size_t(0);
            for (u32 a = 0; a < cfg.rand_attempts; a++) {
                u64 s = variant_seed(k, a);
                Bytes var = part;
                if (s) xor_keystream(var, s);
                DnaSequence enc = encode(var, cfg.codec);
                ScanConfig one = sc;
                one.workers = 1;
                std::size_t collided = scan(enc, sidx, one).collided_count();
                if (collided < best_collided) {
                    best_collided = collided;
                    best = Payload{std::move(enc), s};
                }
            }
            chosen.push_back(std::move(best));
        }
    } else {
        DnaSequence seq = encode(ecc, cfg.codec);
        u64 count = (seq.size() + cfg.max_payload - 1) / cfg.max_payload;
        for (u64 k = 0; k < count; k++) {
            auto [blo, bhi] = inner_block_bytes(cfg.codec, k, cfg.max_payload, ecc.size());
            std::size_t plo = k * cfg.max_payload;
            std::size_t phi = std::min<std::size_t>(seq.size(), plo + cfg.max_payload);
            Payload best;
            std::size_t best_collided = ~std::size_t(0);
            u64 best_seed = 0;
            Bytes best_bytes;
            for (u32 a = 0; a < cfg.rand_attempts; a++) {
                u64 s = variant_seed(k, a);
                Bytes blk(ecc.begin() + blo, ecc.begin() + bhi);
                if (s) xor_keystream(blk, s);
                // re-encode the inner blocks; flanking bases stay unchanged
                DnaSequence payload = seq.subseq(plo, phi - plo);
                DnaSequence inner = encode(blk, cfg.codec);
                u64 block_bases = cfg.codec == CodecId::Blawat ? 5 : 9;
                std::size_t inner_start = (blo / (cfg.codec == CodecId::Blawat ? 1 : 2)) * block_bases;
                for (std::size_t i = 0; i < inner.size(); i++)
                    payload.set(inner_start - plo + i, inner[i]);
                ScanConfig one = sc;
                one.workers = 1;
                std::size_t collided = scan(payload, sidx, one).collided_count();
                if (collided < best_collided) {
                    best_collided = collided;
                    best = Payload{std::move(payload), s};
                    best_seed = s;
                    best_bytes = std::move(blk);
                }
            }
            if (best_seed) std::copy(best_bytes.begin(), best_bytes.end(), final_bytes.begin() + blo);
            chosen.push_back(std::move(best));
        }
    }

    // final usable count over the randomized stream
    CollisionIndex idx = [&] {
        if (payload_framed(cfg.codec, true)) {
            DnaSequence all;
            for (const Payload& p : chosen) all.append(p.bases);
            return scan(all, sidx, sc);
        }
        return scan(encode(final_bytes, cfg.codec), sidx, sc);
    }();

    tube.payloads = std::move(chosen);
    tube.report.scheme = scheme_name(Scheme::Randomized) + std::to_string(cfg.rand_attempts);
    tube.report.input_bytes = data.size();
    tube.report.usable_primers = lib.size() - idx.collided_count();
    pipe_detail::fill_pairs(tube, lib, pipe_detail::usable_ids(lib, idx, {}));
    pipe_detail::finish_report(tube.report, cfg, tube.payloads);
    return tube;
}

// ---------------------------------------------------------------------------
// The VL-DNA tube workflow: buffer, encode, scan once, then loop the planner
// under the 5% storable-vs-generated rule with binary-search input resizing.
// ---------------------------------------------------------------------------

inline Tube run_vldna_tube(const Bytes& data, const TubeConfig& cfg,
                           const std::vector<Primer>& lib, Scheme scheme,
                           bool stream_exhausted = true,
                           const DnaSequence* pre_seq = nullptr,
                           const CollisionIndex* pre_idx = nullptr) {
    if (scheme != Scheme::VldnaCollisions && scheme != Scheme::VldnaConflicts)
        throw Error("run_vldna_tube expects a vldna scheme");
    Planner::SortKey order = scheme == Scheme::VldnaCollisions ? Planner::SortKey::ByCollisions
                                                               : Planner::SortKey::ByConflicts;
    Tube tube;
    tube.cfg = cfg;
    u64 buffered = std::min<u64>(data.size(), cfg.buffer_target);

    ScanConfig sc{cfg.orientation, cfg.workers};
    DnaSequence seq_storage;
    CollisionIndex idx_storage;
    if (!pre_seq) {
        seq_storage = encode(ecc_encode(Bytes(data.begin(), data.begin() + buffered)), cfg.codec);
        idx_storage = scan(seq_storage, lib, sc);
        pre_seq = &seq_storage;
        pre_idx = &idx_storage;
    }
    DnaSequence seq_full = *pre_seq;
    const CollisionIndex& idx_full = *pre_idx;

    auto bases_for_input = [&](u64 input_bytes) {
        u64 ecc_len = (input_bytes + ReedSolomon::kDataLen - 1) / ReedSolomon::kDataLen *
                          ReedSolomon::kCodewordLen + 4;
        return encoded_bases(cfg.codec, ecc_len);
    };

    struct Attempt {
        u64 input = 0;
        double gap = 1e300;
        u64 generated = 0, storable = 0, usable = 0, recovered = 0, cut = 0;
        CutPlan plan;
        std::vector<u32> recovered_ids;
        std::unique_ptr<CollisionIndex> idx;
    };
    Attempt best;
    u64 input = buffered;
    u32 iters = 0;
    bool converged = false;

    while (iters < 64) {
        iters++;
        u64 prefix_bases = std::min<u64>(bases_for_input(input), seq_full.size());
        // restrict the scan to the prefix; only the planner reruns
        std::vector<Collision> pref;
        for (const Collision& c : idx_full.items())
            if (c.end <= prefix_bases) pref.push_back(c);
        auto idx = std::make_unique<CollisionIndex>(std::move(pref), lib.size(), prefix_bases);

        PlannerConfig pcfg;
        pcfg.parallel = cfg.parallel_factor;
        pcfg.workers = cfg.workers;
        pcfg.orientation = cfg.orientation;
        Planner planner(seq_full, lib, *idx, cfg.group, pcfg);
        ConflictGraph graph = planner.build_conflict_graph();
        RecoveryPlan plan = planner.vl_dna(graph, order);
        CutPlan cut = planner.compose_committed(prefix_bases);
        if (!cut.feasible)
            throw Error("final composition infeasible; committed set inconsistent");
        if (!planner.dropped().empty()) {
            std::vector<u32> kept;
            for (u32 p : plan.recovered)
                if (!planner.dropped().count(p)) kept.push_back(p);
            plan.recovered = std::move(kept);
        }

        u64 generated = cut.segments;
        u64 usable = (lib.size() - idx->collided_count()) + plan.recovered.size();
        u64 storable = usable / 2 * cfg.parallel_factor;
        double gap = generated ? std::abs(static_cast<double>(generated) -
                                          static_cast<double>(storable)) / generated
                               : 0.0;
        u64 storable_bytes_now = static_cast<u64>(std::floor(
            static_cast<long double>(storable) * cfg.max_payload * codec_density(cfg.codec) /
            8.0L * ReedSolomon::kDataLen / ReedSolomon::kCodewordLen));
        tube.trace.push_back({input, generated, storable, storable_bytes_now});
        if (gap < best.gap) {
            best = Attempt{input, gap, generated, storable, usable, plan.recovered.size(),
                           plan.collisions_cut, cut, plan.recovered, std::move(idx)};
        }
        if (gap <= cfg.tolerance) { converged = true; break; }

        if (storable > generated) {
            // undershoot: grow toward storable, or accept a final partial tube
            if (input >= buffered && stream_exhausted) { converged = true; break; }
        }
        u64 storable_bytes = static_cast<u64>(std::floor(
            static_cast<long double>(storable) * cfg.max_payload * codec_density(cfg.codec) /
            8.0L * ReedSolomon::kDataLen / ReedSolomon::kCodewordLen));
        u64 next = (input + storable_bytes) / 2;
        next = std::min(next, buffered);
        next = std::max<u64>(next, 1);
        if (next == input) break;
        input = next;
    }

    // Assemble the accepted input. The search worked on prefixes of the
    // full-buffer encoding; a shorter input has its own final codeword and
    // trailer, so re-encode (and re-plan) exactly before cutting.
    tube.input = Bytes(data.begin(), data.begin() + best.input);
    DnaSequence seq_exact;
    std::unique_ptr<CollisionIndex> idx_exact;
    CutPlan cut;
    std::vector<u32> recovered_ids;
    if (best.input == buffered) {
        seq_exact = std::move(seq_full);
        idx_exact = std::move(best.idx);
        cut = best.plan;
        recovered_ids = best.recovered_ids;
        tube.report.recovered_primers = best.recovered;
        tube.report.collisions_cut = best.cut;
        tube.report.usable_primers = best.usable;
    } else {
        Bytes ecc_in = ecc_encode(tube.input);
        seq_exact = encode(ecc_in, cfg.codec);
        idx_exact = std::make_unique<CollisionIndex>(scan(seq_exact, lib, sc));
        PlannerConfig pcfg;
        pcfg.parallel = cfg.parallel_factor;
        pcfg.workers = cfg.workers;
        pcfg.orientation = cfg.orientation;
        Planner planner(seq_exact, lib, *idx_exact, cfg.group, pcfg);
        ConflictGraph graph = planner.build_conflict_graph();
        RecoveryPlan plan = planner.vl_dna(graph, order);
        cut = planner.compose_committed(seq_exact.size());
        if (!cut.feasible)
            throw Error("final composition infeasible on the accepted input");
        if (!planner.dropped().empty()) {
            std::vector<u32> kept;
            for (u32 p : plan.recovered)
                if (!planner.dropped().count(p)) kept.push_back(p);
            plan.recovered = std::move(kept);
        }
        recovered_ids = plan.recovered;
        tube.report.recovered_primers = plan.recovered.size();
        tube.report.collisions_cut = plan.collisions_cut;
        tube.report.usable_primers =
            (lib.size() - idx_exact->collided_count()) + plan.recovered.size();
    }

    u32 prev = 0;
    for (u32 b : cut.boundaries) {
        tube.payloads.push_back({seq_exact.subseq(prev, b - prev), 0});
        prev = b;
    }
    if (seq_exact.size() > prev)
        tube.payloads.push_back({seq_exact.subseq(prev, seq_exact.size() - prev), 0});

    tube.report.scheme = scheme_name(scheme);
    tube.report.input_bytes = best.input;
    tube.report.converged = converged;
    tube.report.iterations = iters;
    pipe_detail::fill_pairs(tube, lib,
                            pipe_detail::usable_ids(lib, *idx_exact, recovered_ids));
    pipe_detail::finish_report(tube.report, cfg, tube.payloads);
    return tube;
}

// ---------------------------------------------------------------------------
// Decode path: order strands by (pair rank, internal index), strip metadata,
// reassemble the stream, undo randomization, then codec- and ECC-decode.
// ---------------------------------------------------------------------------

inline Bytes decode_tube(const std::vector<Strand>& strands, const TubeConfig& cfg,
                         const std::vector<PrimerPair>& pairs,
                         const std::vector<DnaSequence>& pair_fwd,
                         const std::map<u64, u64>& seed_table, bool randomized_scheme) {
    // pair rank by forward primer sequence
    std::map<std::string, u64> rank_of;
    for (std::size_t r = 0; r < pair_fwd.size(); r++) rank_of[pair_fwd[r].to_string()] = r;

    std::map<u64, const Strand*> by_ordinal;
    for (const Strand& s : strands) {
        auto it = rank_of.find(s.primer_fwd.to_string());
        if (it == rank_of.end())
            throw MalformedStrand("strand carries an unknown forward primer");
        u64 ordinal = it->second * cfg.parallel_factor + s.internal_index;
        by_ordinal[ordinal] = &s;
    }
    u64 n = by_ordinal.size();
    for (u64 j = 0; j < n; j++)
        if (!by_ordinal.count(j))
            throw MissingStrand("missing strand at ordinal " + std::to_string(j));

    Bytes bytes;
    if (pipe_detail::payload_framed(cfg.codec, randomized_scheme)) {
        for (u64 j = 0; j < n; j++) {
            Bytes part = decode(by_ordinal[j]->payload, cfg.codec);
            auto it = seed_table.find(j);
            if (it != seed_table.end() && it->second) xor_keystream(part, it->second);
            bytes.insert(bytes.end(), part.begin(), part.end());
        }
    } else {
        DnaSequence all;
        for (u64 j = 0; j < n; j++) all.append(by_ordinal[j]->payload);
        bytes = decode(all, cfg.codec);
        for (auto& [ordinal, seed] : seed_table) {
            if (!seed) continue;
            auto [blo, bhi] =
                pipe_detail::inner_block_bytes(cfg.codec, ordinal, cfg.max_payload, bytes.size());
            Bytes blk(bytes.begin() + blo, bytes.begin() + bhi);
            xor_keystream(blk, seed);
            std::copy(blk.begin(), blk.end(), bytes.begin() + blo);
        }
    }
    return ecc_decode(bytes);
}

inline bool randomized_scheme_name(const std::string& scheme) {
    return scheme.rfind("randomized", 0) == 0;
}

inline Bytes decode_tube(const Tube& tube) {
    std::map<u64, u64> seeds;
    for (std::size_t j = 0; j < tube.payloads.size(); j++)
        if (tube.payloads[j].seed) seeds[j] = tube.payloads[j].seed;
    return decode_tube(tube.strands(), tube.cfg, tube.pairs, tube.pair_fwd, seeds,
                       randomized_scheme_name(tube.report.scheme));
}

// ---------------------------------------------------------------------------
// Tube directory I/O: strands.txt + manifest.json (+ seeds.txt)
// ---------------------------------------------------------------------------

inline void write_tube(const std::string& dir, const Tube& tube) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream out(dir + "/strands.txt");
        if (!out) throw IoError("cannot write " + dir + "/strands.txt");
        for (const Strand& s : tube.strands()) out << s.serialize(tube.cfg.group).to_string() << '\n';
    }
    bool any_seed = false;
    for (const auto& p : tube.payloads)
        if (p.seed) any_seed = true;
    if (any_seed) {
        std::ofstream out(dir + "/seeds.txt");
        for (std::size_t j = 0; j < tube.payloads.size(); j++)
            if (tube.payloads[j].seed) out << j << ' ' << tube.payloads[j].seed << '\n';
    }
    nlohmann::json m;
    m["version"] = 1;
    m["scheme"] = tube.report.scheme;
    m["codec"] = codec_name(tube.cfg.codec);
    m["group"] = tube.cfg.group.lengths();
    m["parallel_factor"] = tube.cfg.parallel_factor;
    m["tolerance"] = tube.cfg.tolerance;
    m["max_payload"] = tube.cfg.max_payload;
    m["seed_table"] = any_seed ? "seeds.txt" : "";
    nlohmann::json jp = nlohmann::json::array();
    for (std::size_t r = 0; r < tube.pairs.size(); r++)
        jp.push_back({{"forward", tube.pair_fwd[r].to_string()},
                      {"reverse", tube.pair_rev[r].to_string()},
                      {"forward_id", tube.pairs[r].forward},
                      {"reverse_id", tube.pairs[r].reverse}});
    m["pairs"] = jp;
    m["report"] = {{"scheme", tube.report.scheme},
                   {"codec", tube.report.codec},
                   {"usable_primers", tube.report.usable_primers},
                   {"recovered_primers", tube.report.recovered_primers},
                   {"avg_payload_len", tube.report.avg_payload_len},
                   {"strands", tube.report.strands},
                   {"capacity_bytes", tube.report.capacity_bytes},
                   {"collisions_cut", tube.report.collisions_cut},
                   {"input_bytes", tube.report.input_bytes},
                   {"converged", tube.report.converged},
                   {"iterations", tube.report.iterations}};
    std::ofstream mo(dir + "/manifest.json");
    if (!mo) throw IoError("cannot write " + dir + "/manifest.json");
    mo << m.dump(2) << '\n';
}

struct LoadedTube {
    TubeConfig cfg;
    TubeReport report;
    std::vector<PrimerPair> pairs;
    std::vector<DnaSequence> pair_fwd, pair_rev;
    std::vector<Strand> strands;
    std::map<u64, u64> seeds;
};

inline LoadedTube read_tube(const std::string& dir) {
    std::ifstream mi(dir + "/manifest.json");
    if (!mi) throw IoError("cannot read " + dir + "/manifest.json");
    nlohmann::json m = nlohmann::json::parse(mi);
    LoadedTube t;
    t.cfg.codec = parse_codec(m["codec"].get<std::string>());
    t.cfg.group = LengthGroup(m["group"].get<std::vector<u32>>());
    t.cfg.parallel_factor = m["parallel_factor"].get<u64>();
    t.cfg.tolerance = m["tolerance"].get<double>();
    t.cfg.max_payload = m["max_payload"].get<u32>();
    for (const auto& p : m["pairs"]) {
        t.pairs.push_back(PrimerPair{p["forward_id"].get<u32>(), p["reverse_id"].get<u32>()});
        t.pair_fwd.emplace_back(p["forward"].get<std::string>());
        t.pair_rev.emplace_back(p["reverse"].get<std::string>());
    }
    auto r = m["report"];
    t.report.scheme = r["scheme"].get<std::string>();
    t.report.codec = r["codec"].get<std::string>();
    t.report.usable_primers = r["usable_primers"].get<u64>();
    t.report.recovered_primers = r["recovered_primers"].get<u64>();
    t.report.avg_payload_len = r["avg_payload_len"].get<double>();
    t.report.strands = r["strands"].get<u64>();
    t.report.capacity_bytes = r["capacity_bytes"].get<u64>();
    t.report.collisions_cut = r["collisions_cut"].get<u64>();
    t.report.input_bytes = r["input_bytes"].get<u64>();
    t.report.converged = r["converged"].get<bool>();
    t.report.iterations = r["iterations"].get<u32>();

    for (const DnaSequence& raw : read_sequences_text(dir + "/strands.txt"))
        t.strands.push_back(disassemble_strand(raw, t.cfg.group));

    std::string st = m["seed_table"].get<std::string>();
    if (!st.empty()) {
        std::ifstream si(dir + "/" + st);
        u64 k, s;
        while (si >> k >> s) t.seeds[k] = s;
    }
    return t;
}

inline Bytes decode_tube_dir(const std::string& dir) {
    LoadedTube t = read_tube(dir);
    return decode_tube(t.strands, t.cfg, t.pairs, t.pair_fwd, t.seeds,
                       randomized_scheme_name(t.report.scheme));
}

} // namespace vldna
