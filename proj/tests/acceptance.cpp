// Acceptance suite: one pass/fail line per criterion.
//
// Criteria 1-6, 12, 13 run at their stated parameters. The pipeline-scale
// criteria (7-11) are evaluated twice: at the stated 32 MiB desk scale
// ("stated", expensive, and degenerate for several criteria because the
// collision relation saturates every primer at that size), and at a reduced
// desk scale ("c7s".."c11s") where the same assertions bite with nonzero
// counts.

#include <chrono>
#include <cstring>
#include <iostream>
#include <set>

#include "../tests/oracle.hpp"
#include "vldna/experiments.hpp"
#include "vldna/pipeline.hpp"

using namespace vldna;
using Clock = std::chrono::steady_clock;

namespace {

int g_fail = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
    std::cout << "CRITERION " << id << (pass ? " PASS" : " FAIL") << ": " << detail << "\n";
    std::cout.flush();
    if (!pass) g_fail = 1;
}

double secs_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// shared desk-scale fixtures
const u64 kLibSeed = 1;
const std::size_t kLibSize = 2000;
const u64 kCorpusSeed = 7;

const std::vector<Primer>& desk_library() {
    static const std::vector<Primer> lib = generate_library(kLibSize, kLibSeed);
    return lib;
}

struct Fit {
    double slope = 0, intercept = 0, r2 = 0;
};

Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; i++) { mx += x[i]; my += y[i]; }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; i++) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    Fit f;
    if (sxx == 0 || syy == 0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = (sxy * sxy) / (sxx * syy);
    return f;
}

// ---------------------------------------------------------------------------

void criterion_1() {
    auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    SplitMix64 rng(101);
    for (CodecId c : {CodecId::Rotation, CodecId::Blawat, CodecId::Grass}) {
        for (int t = 0; t < 10000; t++) {
            Bytes d = random_bytes(rng.below(300), rng.next());
            if (decode(encode(d, c), c) != d) {
                ok = false;
                detail = std::string("round-trip mismatch for ") + codec_name(c);
                break;
            }
        }
        Bytes big = random_bytes(100000, 999);
        double measured = 8.0 * big.size() / encode(big, c).size();
        double nominal = codec_density(c);
        if (std::abs(measured - nominal) / nominal >= 0.01) {
            ok = false;
            detail = std::string("density off for ") + codec_name(c) + ": " +
                     std::to_string(measured);
        }
    }
    double el = secs_since(t0);
    if (ok && el >= 60) { ok = false; detail = "runtime " + std::to_string(el) + "s >= 60s"; }
    if (ok) detail = "3x10000 round-trips exact; densities within 1% of 1.58/1.6/1.78; " +
                     std::to_string(el) + "s";
    report("1", ok, detail);
}

void criterion_2() {
    auto t0 = Clock::now();
    std::size_t target = 10000000;
    std::size_t nbytes = target / 96 * 19 + 19;
    Bytes data = random_bytes(nbytes, 202);
    DnaSequence seq = encode(data, CodecId::Rotation);
    u64 adjacent = 0;
    for (std::size_t i = 1; i < seq.size(); i++)
        if (seq[i] == seq[i - 1]) adjacent++;
    double el = secs_since(t0);
    bool ok = adjacent == 0 && seq.size() >= target && el < 60;
    report("2", ok,
           std::to_string(seq.size()) + " bases, " + std::to_string(adjacent) +
               " adjacent-equal pairs; " + std::to_string(el) + "s");
}

void criterion_3() {
    auto t0 = Clock::now();
    SplitMix64 rng(303);
    int instances = 1000, mismatches = 0;
    for (int t = 0; t < instances; t++) {
        std::size_t n = t % 10 == 0 ? 2000 + rng.below(8001) : 60 + rng.below(1941);
        std::size_t m = 1 + rng.below(32);
        std::vector<Primer> lib;
        for (std::size_t i = 0; i < m; i++) {
            DnaSequence s = DnaSequence::random(kPrimerLength, rng.next());
            lib.push_back(Primer{static_cast<u32>(i), s, pack_bases(s)});
        }
        DnaSequence seq = DnaSequence::random(n, rng.next());
        int plants = static_cast<int>(rng.below(5));
        for (int p = 0; p < plants && n > 40; p++) {
            u32 frag = 12 + static_cast<u32>(rng.below(9));
            u32 ps = static_cast<u32>(rng.below(kPrimerLength - frag + 1));
            std::size_t pos = rng.below(n - frag - 4);
            const DnaSequence& prm = lib[rng.below(m)].seq;
            std::vector<u8> fb;
            for (u32 i = 0; i < frag; i++) fb.push_back(prm.code(ps + i));
            for (u32 e = rng.below(4); e > 0 && !fb.empty(); e--) {
                std::size_t at = rng.below(fb.size());
                u64 kind = rng.below(3);
                if (kind == 0) fb[at] = static_cast<u8>((fb[at] + 1 + rng.below(3)) & 3);
                else if (kind == 1) fb.erase(fb.begin() + at);
                else fb.insert(fb.begin() + at, static_cast<u8>(rng.next() & 3));
            }
            for (std::size_t i = 0; i < fb.size() && pos + i < n; i++)
                seq.set(pos + i, static_cast<Base>(fb[i]));
        }
        ScanConfig sc;
        sc.workers = 2;
        CollisionIndex idx = scan(seq, lib, sc);
        auto expect = oracle::oracle_scan(seq, lib);
        bool same = idx.items().size() == expect.size();
        for (std::size_t i = 0; same && i < expect.size(); i++)
            if (!(idx.items()[i] == expect[i])) same = false;
        if (!same) mismatches++;
    }
    double el = secs_since(t0);
    bool ok = mismatches == 0 && el < 600;
    report("3", ok,
           std::to_string(instances) + " randomized instances, " + std::to_string(mismatches) +
               " scanner/oracle mismatches; " + std::to_string(el) + "s");
}

void criterion_4() {
    auto t0 = Clock::now();
    LengthGroup g = LengthGroup::default_group();
    auto offs = reachable_offsets(g, 100000);
    std::set<u32> s(offs.begin(), offs.end());
    bool ok = !s.count(440);
    for (u32 p = 450; ok && p <= 100000; p += 10)
        if (!s.count(p)) ok = false;
    std::vector<u32> below;
    for (u32 o : offs)
        if (o < 450) below.push_back(o);
    std::vector<u32> expect{150, 160, 190, 200, 300, 310, 320, 340, 350, 360, 380, 390, 400};
    if (below != expect) ok = false;
    double el = secs_since(t0);
    if (el >= 1.0) ok = false;
    report("4", ok,
           "every 10 in [450,1e5] reachable, 440 unreachable, below-450 set has " +
               std::to_string(below.size()) + " offsets; " + std::to_string(el) + "s");
}

void criterion_5() {
    auto t0 = Clock::now();
    u64 def = covered_bases(LengthGroup::default_group(), 10000);
    std::vector<std::vector<u32>> others = {
        {150, 160, 180, 200}, {150, 170, 190, 200}, {150, 170, 180, 200},
        {150, 180, 190, 200}, {160, 170, 180, 200}, {160, 170, 190, 200},
        {160, 180, 190, 200}, {170, 180, 190, 200}};
    bool ok = true;
    u64 worst = def;
    for (auto& lens : others) {
        u64 c = covered_bases(LengthGroup(lens), 10000);
        worst = std::min(worst, c);
        if (def < c) ok = false;
    }
    double el = secs_since(t0);
    if (el >= 1.0) ok = false;
    report("5", ok,
           "covered(150/160/190/200)=" + std::to_string(def) + " >= all eight others (min " +
               std::to_string(worst) + "); " + std::to_string(el) + "s");
}

void criterion_6() {
    auto t0 = Clock::now();
    SplitMix64 rng(606);
    bool ok = true;
    double ratio_sum = 0;
    int ratio_n = 0;
    for (int t = 0; t < 500; t++) {
        std::size_t n = 2 + rng.below(15);
        ConflictGraph g;
        g.vertices.resize(n);
        g.adj.resize(n);
        for (std::size_t v = 0; v < n; v++)
            g.vertices[v] = {static_cast<u32>(v), static_cast<i64>(1 + rng.below(1000)),
                             1 + rng.below(50), true};
        double p = 0.1 + rng.unit() * 0.5;
        for (std::size_t a = 0; a < n; a++)
            for (std::size_t b = a + 1; b < n; b++)
                if (rng.unit() < p) g.add_edge(static_cast<u32>(a), static_cast<u32>(b));
        g.finish();
        auto [gset, gw] = greedy_recover(g, Planner::SortKey::ByCollisions);
        auto [eset, ew] = mwis_exact(g);
        for (std::size_t i = 0; ok && i < gset.size(); i++)
            for (std::size_t j = i + 1; j < gset.size(); j++)
                if (g.has_edge(gset[i], gset[j])) ok = false;
        if (gw > ew) ok = false;
        if (ew > 0) { ratio_sum += static_cast<double>(gw) / ew; ratio_n++; }
        (void)eset;
    }
    double el = secs_since(t0);
    if (el >= 60) ok = false;
    report("6", ok,
           "500 graphs: greedy independent and never above exact; mean weight ratio " +
               std::to_string(ratio_sum / std::max(1, ratio_n)) + "; " + std::to_string(el) + "s");
}

void criterion_12() {
    u64 cap = tube_capacity(200, 1.6, 1550000, 56);
    report("12", cap == 1736000000ULL,
           "tube_capacity(200, 1.6, 1.55e6, 56) = " + std::to_string(cap));
}

void criterion_13() {
    auto lib = generate_library(64, 77);
    TubeConfig cfg;
    cfg.codec = CodecId::Rotation;
    cfg.parallel_factor = 80;
    cfg.buffer_target = 1 << 20;
    cfg.workers = 2;
    Bytes data = random_bytes(30000, 41);
    Tube t = run_vldna_tube(data, cfg, lib, Scheme::VldnaCollisions);
    bool ok = !t.trace.empty();
    std::string detail;
    double over0 = 0;
    if (ok) {
        over0 = (static_cast<double>(t.trace[0][1]) - static_cast<double>(t.trace[0][2])) /
                static_cast<double>(t.trace[0][1]);
        if (over0 < 0.15 || over0 > 0.30) {
            ok = false;
            detail = "first-pass overshoot " + std::to_string(over0) + " outside [0.15, 0.30]";
        }
    }
    if (ok && (!t.report.converged || t.report.iterations > 64)) {
        ok = false;
        detail = "no convergence within 64 iterations";
    }
    if (ok) {
        double gap = std::abs(static_cast<double>(t.trace.back()[1]) -
                              static_cast<double>(t.trace.back()[2])) /
                     static_cast<double>(t.trace.back()[1]);
        if (gap > 0.05) { ok = false; detail = "final gap " + std::to_string(gap); }
        for (std::size_t i = 0; ok && i + 1 < t.trace.size(); i++) {
            u64 expect = std::min<u64>((t.trace[i][0] + t.trace[i][3]) / 2, data.size());
            expect = std::max<u64>(expect, 1);
            if (t.trace[i + 1][0] != expect) {
                ok = false;
                detail = "midpoint update violated at iteration " + std::to_string(i);
            }
        }
    }
    if (ok)
        detail = "overshoot " + std::to_string(over0) + ", converged in " +
                 std::to_string(t.report.iterations) + " iterations, midpoint updates verified";
    report("13", ok, detail);
}

// ---------------------------------------------------------------------------
// Reduced desk-scale variants of criteria 7-11.
// ---------------------------------------------------------------------------

Tube scaled_vldna(CodecId codec, u64 size, u64 seed, Scheme scheme) {
    TubeConfig cfg;
    cfg.codec = codec;
    cfg.buffer_target = size;
    cfg.workers = 2;
    Bytes data = random_bytes(size, seed);
    return run_vldna_tube(data, cfg, desk_library(), scheme);
}

void criterion_7s() {
    auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (CodecId codec : {CodecId::Rotation, CodecId::Grass, CodecId::Blawat}) {
        Bytes data = random_bytes(16384, kCorpusSeed);
        TubeConfig cfg;
        cfg.codec = codec;
        cfg.buffer_target = data.size();
        cfg.workers = 2;
        Tube tube = run_vldna_tube(data, cfg, desk_library(), Scheme::VldnaCollisions);
        if (decode_tube(tube) != tube.input) {
            ok = false;
            detail = std::string("decode mismatch for ") + codec_name(codec);
            break;
        }
        // zero residual collisions for every usable primer over the emitted payloads
        std::set<u32> usable;
        for (const PrimerPair& pr : tube.pairs) { usable.insert(pr.forward); usable.insert(pr.reverse); }
        std::vector<Primer> used_lib;
        for (const Primer& p : desk_library())
            if (usable.count(p.id)) used_lib.push_back(p);
        ScanIndex sidx(used_lib);
        u64 residual = 0;
        for (const auto& payload : tube.payloads) {
            ScanConfig one;
            one.workers = 1;
            residual += scan(payload.bases, sidx, one).total();
        }
        if (residual) {
            ok = false;
            detail = std::string(codec_name(codec)) + ": " + std::to_string(residual) +
                     " residual collisions in emitted payloads";
            break;
        }
    }
    double el = secs_since(t0);
    if (ok)
        detail = "16 KiB corpus, 2000 primers: zero residual collisions and bit-exact decode "
                 "for all three codecs; " + std::to_string(el) + "s";
    report("7s", ok, detail);
}

void criterion_8s() {
    auto t0 = Clock::now();
    const u64 size = 3072, seed = 1;
    Bytes data = random_bytes(size, seed);
    bool ok = true;
    std::string detail;
    std::map<std::string, std::map<std::string, u64>> usable;
    for (CodecId codec : {CodecId::Rotation, CodecId::Grass, CodecId::Blawat}) {
        ExperimentSpec spec;
        spec.corpus_size = size;
        spec.corpus_seed = seed;
        spec.workers = 2;
        auto& lib = desk_library();
        usable[codec_name(codec)]["fixed"] =
            run_baseline_fixed(data, exp_detail::tube_config(spec, codec, 1), lib)
                .report.usable_primers;
        usable[codec_name(codec)]["rand5"] =
            run_baseline_randomized(data, exp_detail::tube_config(spec, codec, 5), lib)
                .report.usable_primers;
        usable[codec_name(codec)]["rand10"] =
            run_baseline_randomized(data, exp_detail::tube_config(spec, codec, 10), lib)
                .report.usable_primers;
        usable[codec_name(codec)]["vldna"] =
            run_vldna_tube(data, exp_detail::tube_config(spec, codec, 1), lib,
                           Scheme::VldnaCollisions)
                .report.usable_primers;
    }
    for (auto& [codec, u] : usable) {
        if (!(u["vldna"] > u["fixed"])) {
            ok = false;
            detail = codec + ": vldna " + std::to_string(u["vldna"]) + " !> fixed " +
                     std::to_string(u["fixed"]);
        }
        if (!(u["rand10"] >= u["rand5"] && u["rand5"] >= u["fixed"])) {
            ok = false;
            detail = codec + ": randomization not monotone (" + std::to_string(u["fixed"]) +
                     ", " + std::to_string(u["rand5"]) + ", " + std::to_string(u["rand10"]) + ")";
        }
    }
    if (!(usable["rotation"]["fixed"] > usable["grass"]["fixed"] &&
          usable["grass"]["fixed"] > usable["blawat"]["fixed"])) {
        ok = false;
        detail = "fixed ordering rotation > grass > blawat violated: " +
                 std::to_string(usable["rotation"]["fixed"]) + "/" +
                 std::to_string(usable["grass"]["fixed"]) + "/" +
                 std::to_string(usable["blawat"]["fixed"]);
    }
    double el = secs_since(t0);
    if (ok)
        detail = "3 KiB corpus: vldna > fixed per codec; fixed rotation(" +
                 std::to_string(usable["rotation"]["fixed"]) + ") > grass(" +
                 std::to_string(usable["grass"]["fixed"]) + ") > blawat(" +
                 std::to_string(usable["blawat"]["fixed"]) + "); rand10 >= rand5 >= fixed; " +
                 std::to_string(el) + "s";
    report("8s", ok, detail);
}

void criterion_9s() {
    auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    std::string per;
    for (CodecId codec : {CodecId::Rotation, CodecId::Grass, CodecId::Blawat}) {
        Tube a = scaled_vldna(codec, 16384, kCorpusSeed, Scheme::VldnaCollisions);
        Tube b = scaled_vldna(codec, 16384, kCorpusSeed, Scheme::VldnaConflicts);
        u64 rc = a.report.recovered_primers, rf = b.report.recovered_primers;
        if (rc == 0) {
            ok = false;
            detail = std::string(codec_name(codec)) + ": zero recovered primers";
            break;
        }
        double diff = std::abs(static_cast<double>(rc) - static_cast<double>(rf)) / rc;
        per += std::string(codec_name(codec)) + " " + std::to_string(rc) + "/" +
               std::to_string(rf) + " ";
        if (diff >= 0.10) {
            ok = false;
            detail = std::string(codec_name(codec)) + ": relative difference " +
                     std::to_string(diff);
            break;
        }
    }
    double el = secs_since(t0);
    if (ok) detail = "collisions- vs conflicts-sorted recovery within 10%: " + per + "; " +
                     std::to_string(el) + "s";
    report("9s", ok, detail);
}

void criterion_10s() {
    auto t0 = Clock::now();
    Bytes data = random_bytes(16384, kCorpusSeed);
    DnaSequence seq = encode(ecc_encode(data), CodecId::Rotation);
    ScanConfig sc;
    sc.workers = 2;
    CollisionIndex idx = scan(seq, desk_library(), sc);
    CorrelationResult res =
        correlation_report(seq, desk_library(), idx, LengthGroup::default_group(), 1550000, 2);
    double el = secs_since(t0);
    bool ok = res.pearson_r > 0.8;
    report("10s", ok,
           "rotation desk corpus: rank correlation r = " + std::to_string(res.pearson_r) +
               " over " + std::to_string(res.collided) + " collided primers; " +
               std::to_string(el) + "s");
}

void criterion_11s() {
    auto t0 = Clock::now();
    std::vector<double> cuts, times;
    std::string pts;
    for (u64 size : {8192, 16384, 32768, 65536}) {
        Bytes data = random_bytes(size, kCorpusSeed);
        DnaSequence seq = encode(ecc_encode(data), CodecId::Rotation);
        ScanConfig sc;
        sc.workers = 2;
        CollisionIndex idx = scan(seq, desk_library(), sc);
        PlannerConfig pcfg;
        pcfg.parallel = 1550000;
        pcfg.workers = 2;
        Planner pl(seq, desk_library(), idx, LengthGroup::default_group(), pcfg);
        ConflictGraph g = pl.build_conflict_graph();
        u64 cut = 0;
        for (int r = 0; r < 3; r++)
            cut = pl.vl_dna(g, Planner::SortKey::ByCollisions).collisions_cut;  // warm
        std::vector<double> batches;
        for (int b = 0; b < 5; b++) {
            auto s0 = Clock::now();
            for (int r = 0; r < 50; r++) pl.vl_dna(g, Planner::SortKey::ByCollisions);
            batches.push_back(secs_since(s0) / 50);
        }
        std::sort(batches.begin(), batches.end());
        cuts.push_back(static_cast<double>(cut));
        times.push_back(batches.front());
        pts += "(" + std::to_string(cut) + ", " + std::to_string(times.back() * 1e6) + "us) ";
    }
    Fit fit = linear_fit(cuts, times);
    double el = secs_since(t0);
    bool ok = fit.r2 > 0.95 && fit.slope > 0;
    report("11s", ok,
           "vl_dna time vs collisions cut " + pts + "-> R^2 = " + std::to_string(fit.r2) +
               (ok ? "" : " (timing tracks conflict-graph density, not cuts: the collision "
                          "relation saturates the graph at any desk scale)") +
               "; " + std::to_string(el) + "s");
}

// ---------------------------------------------------------------------------
// Stated-size (32 MiB) pipeline criteria. The collision relation saturates
// the whole library at this scale, so several of these document degeneracy.
// ---------------------------------------------------------------------------

void stated_pipeline() {
    const u64 kSize = u64(32) << 20;
    auto& lib = desk_library();
    std::cout << "[stated] 32 MiB corpus, 2000-primer library; scanning three codecs...\n";
    std::cout.flush();

    struct PerCodec {
        DnaSequence seq;
        std::unique_ptr<CollisionIndex> idx;
        Tube vldna;
        u64 usable_fixed = 0;
        double scan_secs = 0;
    };
    std::map<CodecId, PerCodec> res;
    Bytes data = random_bytes(kSize, kCorpusSeed);

    auto c7_t0 = Clock::now();
    bool c7_ok = true;
    std::string c7_detail;
    for (CodecId codec : {CodecId::Rotation, CodecId::Grass, CodecId::Blawat}) {
        PerCodec pc;
        auto s0 = Clock::now();
        Bytes ecc = ecc_encode(data);
        pc.seq = encode(ecc, codec);
        ScanConfig sc;
        sc.workers = 2;
        pc.idx = std::make_unique<CollisionIndex>(scan(pc.seq, lib, sc));
        pc.scan_secs = secs_since(s0);
        pc.usable_fixed = lib.size() - pc.idx->collided_count();
        std::cout << "[stated] " << codec_name(codec) << ": " << pc.seq.size() << " bases, "
                  << pc.idx->total() << " collisions, collided fraction "
                  << static_cast<double>(pc.idx->collided_count()) / lib.size() << ", scan "
                  << pc.scan_secs << "s\n";
        std::cout.flush();

        TubeConfig cfg;
        cfg.codec = codec;
        cfg.buffer_target = kSize;
        cfg.workers = 2;
        try {
            pc.vldna = run_vldna_tube(data, cfg, lib, Scheme::VldnaCollisions, true, &pc.seq,
                                      pc.idx.get());
            if (pc.vldna.report.usable_primers < 2) {
                c7_ok = false;
                c7_detail = std::string(codec_name(codec)) +
                            ": no usable primer pair at 32 MiB (usable = " +
                            std::to_string(pc.vldna.report.usable_primers) + ")";
            } else {
                if (decode_tube(pc.vldna) != pc.vldna.input) {
                    c7_ok = false;
                    c7_detail = std::string(codec_name(codec)) + ": decode mismatch";
                } else {
                    std::set<u32> used;
                    for (const PrimerPair& pr : pc.vldna.pairs) {
                        used.insert(pr.forward);
                        used.insert(pr.reverse);
                    }
                    std::vector<Primer> used_lib;
                    for (const Primer& p : lib)
                        if (used.count(p.id)) used_lib.push_back(p);
                    ScanIndex sidx(used_lib);
                    u64 residual = 0;
                    for (const auto& payload : pc.vldna.payloads) {
                        ScanConfig one;
                        one.workers = 1;
                        residual += scan(payload.bases, sidx, one).total();
                    }
                    if (residual) {
                        c7_ok = false;
                        c7_detail = std::string(codec_name(codec)) + ": " +
                                    std::to_string(residual) + " residual collisions";
                    }
                    std::cout << "[stated] " << codec_name(codec) << " vldna tube: accepted "
                              << pc.vldna.report.input_bytes << " bytes, usable "
                              << pc.vldna.report.usable_primers << ", recovered "
                              << pc.vldna.report.recovered_primers << ", converged "
                              << pc.vldna.report.converged << "\n";
                    std::cout.flush();
                }
            }
        } catch (const std::exception& e) {
            c7_ok = false;
            c7_detail = std::string(codec_name(codec)) + ": " + e.what();
        }
        res.emplace(codec, std::move(pc));
    }
    double c7_el = secs_since(c7_t0);
    if (c7_ok && c7_el >= 1800) {
        c7_ok = false;
        c7_detail = "runtime " + std::to_string(c7_el) + "s >= 1800s";
    }
    if (c7_ok)
        c7_detail = "sound tubes with bit-exact decode of the accepted input for all codecs; " +
                    std::to_string(c7_el) + "s";
    else
        c7_detail += " [" + std::to_string(c7_el) + "s]";
    report("7", c7_ok, c7_detail);

    // criterion 8: orderings at the stated size. The randomized baselines
    // re-scan every payload variant; project their cost before attempting.
    {
        bool ok = true;
        std::string detail;
        u64 uf_r = res[CodecId::Rotation].usable_fixed;
        u64 uf_g = res[CodecId::Grass].usable_fixed;
        u64 uf_b = res[CodecId::Blawat].usable_fixed;
        for (CodecId codec : {CodecId::Rotation, CodecId::Grass, CodecId::Blawat}) {
            u64 uv = res[codec].vldna.report.usable_primers;
            u64 uf = res[codec].usable_fixed;
            if (!(uv > uf)) {
                ok = false;
                detail += std::string(codec_name(codec)) + ": vldna " + std::to_string(uv) +
                          " !> fixed " + std::to_string(uf) + "; ";
            }
        }
        if (!(uf_r > uf_g && uf_g > uf_b)) {
            ok = false;
            detail += "fixed ordering rotation > grass > blawat violated (" +
                      std::to_string(uf_r) + "/" + std::to_string(uf_g) + "/" +
                      std::to_string(uf_b) + "); ";
        }
        // project the randomized-baseline cost from a short sample
        {
            auto s0 = Clock::now();
            TubeConfig cfg;
            cfg.codec = CodecId::Blawat;
            cfg.buffer_target = 1 << 12;
            cfg.rand_attempts = 5;
            cfg.workers = 2;
            Bytes sample(data.begin(), data.begin() + (1 << 12));
            run_baseline_randomized(sample, cfg, lib);
            double per_byte = secs_since(s0) / (1 << 12);
            double projected = per_byte * kSize * 3 /*codecs*/ * 3 /*rand5 + rand10*/;
            if (projected > 1800) {
                ok = false;
                detail += "rand5/rand10 clauses not executable at 32 MiB on this host "
                          "(projected " +
                          std::to_string(projected / 3600) + "h); ";
            }
        }
        if (ok) detail = "orderings hold at 32 MiB";
        report("8", ok, detail + "(fixed usable r/g/b = " + std::to_string(uf_r) + "/" +
                            std::to_string(uf_g) + "/" + std::to_string(uf_b) + ")");
    }

    // criterion 9: recovery difference between sort keys
    {
        bool ok = true;
        std::string detail;
        for (CodecId codec : {CodecId::Rotation, CodecId::Grass, CodecId::Blawat}) {
            TubeConfig cfg;
            cfg.codec = codec;
            cfg.buffer_target = kSize;
            cfg.workers = 2;
            Tube conf = run_vldna_tube(data, cfg, lib, Scheme::VldnaConflicts, true,
                                       &res[codec].seq, res[codec].idx.get());
            u64 rc = res[codec].vldna.report.recovered_primers;
            u64 rf = conf.report.recovered_primers;
            if (rc == 0 && rf == 0) {
                detail += std::string(codec_name(codec)) + ": both orders recover 0 "
                          "(saturated library; difference vacuously 0); ";
                continue;
            }
            if (rc == 0) {
                ok = false;
                detail += std::string(codec_name(codec)) + ": collisions-order recovers 0 but "
                          "conflicts-order recovers " + std::to_string(rf) + "; ";
                continue;
            }
            double diff = std::abs(static_cast<double>(rc) - static_cast<double>(rf)) / rc;
            detail += std::string(codec_name(codec)) + ": " + std::to_string(rc) + "/" +
                      std::to_string(rf) + " diff " + std::to_string(diff) + "; ";
            if (diff >= 0.10) ok = false;
        }
        report("9", ok, detail);
    }

    // criterion 10: rank correlation on the rotation corpus
    {
        CorrelationResult r = correlation_report(res[CodecId::Rotation].seq, lib,
                                                 *res[CodecId::Rotation].idx,
                                                 LengthGroup::default_group(), 1550000, 2);
        bool ok = r.pearson_r > 0.8;
        report("10", ok,
               "rotation 32 MiB: rank correlation r = " + std::to_string(r.pearson_r) +
                   " over " + std::to_string(r.collided) +
                   " collided primers (conflict degrees are saturated at this scale)");
    }
}

void criterion_11_stated() {
    auto t0 = Clock::now();
    auto& lib = desk_library();
    std::vector<double> cuts, times;
    std::string pts;
    for (u64 mib : {8, 16, 32, 64}) {
        u64 size = mib << 20;
        Bytes data = random_bytes(size, kCorpusSeed);
        DnaSequence seq = encode(ecc_encode(data), CodecId::Blawat);
        ScanConfig sc;
        sc.workers = 2;
        CollisionIndex idx = scan(seq, lib, sc);
        PlannerConfig pcfg;
        pcfg.parallel = 1550000;
        pcfg.workers = 2;
        Planner pl(seq, lib, idx, LengthGroup::default_group(), pcfg);
        ConflictGraph g = pl.build_conflict_graph();
        std::vector<double> reps;
        u64 cut = 0;
        for (int r = 0; r < 5; r++) {
            auto s0 = Clock::now();
            RecoveryPlan plan = pl.vl_dna(g, Planner::SortKey::ByCollisions);
            reps.push_back(secs_since(s0));
            cut = plan.collisions_cut;
        }
        std::sort(reps.begin(), reps.end());
        cuts.push_back(static_cast<double>(cut));
        times.push_back(reps[reps.size() / 2]);
        pts += "(" + std::to_string(cut) + ", " + std::to_string(times.back() * 1e3) + "ms) ";
        std::cout << "[11] " << mib << " MiB scanned and planned, cut=" << cut << "\n";
        std::cout.flush();
    }
    Fit fit = linear_fit(cuts, times);
    double el = secs_since(t0);
    bool ok = fit.r2 > 0.95 && fit.slope > 0;
    report("11", ok,
           "vl_dna time vs collisions cut at 8/16/32/64 MiB: " + pts + "-> R^2 = " +
               std::to_string(fit.r2) + " (zero recovery saturates the x-axis at this scale); " +
               std::to_string(el) + "s");
}

void throughput_floor() {
    auto& lib = desk_library();
    Bytes data = random_bytes(1 << 19, 99);
    DnaSequence seq = encode(ecc_encode(data), CodecId::Blawat);
    ScanIndex idx(lib);
    ScanConfig one;
    one.workers = 1;
    auto t0 = Clock::now();
    CollisionIndex ci = scan(seq, idx, one);
    double el = secs_since(t0);
    double rate = seq.size() / el;
    bool ok = rate >= 1e6;
    report("scan-floor", ok,
           "single-worker scan of " + std::to_string(seq.size()) + " bases against 2000 primers: " +
               std::to_string(rate / 1e6) + " Mbases/s/worker (floor 1.0); total collisions " +
               std::to_string(ci.total()));
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <c1|c2|c3|c4|c5|c6|c12|c13|c7s|c8s|c9s|c10s|c11s|"
                     "stated|c11stated|floor|fast|scaled>\n";
        return 2;
    }
    std::string sel = argv[1];
    try {
        if (sel == "c1") criterion_1();
        else if (sel == "c2") criterion_2();
        else if (sel == "c3") criterion_3();
        else if (sel == "c4") criterion_4();
        else if (sel == "c5") criterion_5();
        else if (sel == "c6") criterion_6();
        else if (sel == "c12") criterion_12();
        else if (sel == "c13") criterion_13();
        else if (sel == "c7s") criterion_7s();
        else if (sel == "c8s") criterion_8s();
        else if (sel == "c9s") criterion_9s();
        else if (sel == "c10s") criterion_10s();
        else if (sel == "c11s") criterion_11s();
        else if (sel == "stated") stated_pipeline();
        else if (sel == "c11stated") criterion_11_stated();
        else if (sel == "floor") throughput_floor();
        else if (sel == "fast") {
            criterion_1(); criterion_2(); criterion_4(); criterion_5();
            criterion_6(); criterion_12(); criterion_13();
        } else if (sel == "scaled") {
            criterion_7s(); criterion_8s(); criterion_9s(); criterion_10s(); criterion_11s();
        } else {
            std::cerr << "unknown selector " << sel << "\n";
            return 2;
        }
    } catch (const std::exception& e) {
        std::cout << "CRITERION " << sel << " FAIL: unhandled error: " << e.what() << "\n";
        return 1;
    }
    return g_fail;
}
