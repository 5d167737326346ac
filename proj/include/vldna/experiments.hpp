#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "vldna/pipeline.hpp"

namespace vldna {

// ---------------------------------------------------------------------------
// Experiment driver: scheme/group comparisons and the per-primer statistics
// behind the collision histogram and rank-correlation reports.
// ---------------------------------------------------------------------------

struct ExperimentSpec {
    std::string corpus_path;   // empty = synthetic
    u64 corpus_size = 1 << 14;
    u64 corpus_seed = 1;
    std::vector<CodecId> codecs{CodecId::Rotation, CodecId::Blawat, CodecId::Grass};
    std::vector<std::string> schemes{"fixed", "rand5", "rand10", "vldna-collisions",
                                     "vldna-conflicts"};
    std::vector<LengthGroup> groups;
    std::string output_dir = ".";
    u64 primer_count = 2000;
    u64 primer_seed = 1;
    std::string primer_file;   // overrides generation when set
    u64 parallel = 1550000;
    double tolerance = 0.05;
    unsigned jobs = 1;
    unsigned workers = 0;
};

inline constexpr const char* kSchemesCsvHeader =
    "codec,scheme,usable_primers,recovered_primers,avg_payload_len,strands,capacity_bytes,"
    "collisions_cut";
inline constexpr const char* kGroupsCsvHeader =
    "group,covered_bases,usable_primers,recovered_primers,avg_payload_len,capacity_bytes";
inline constexpr const char* kHistogramCsvHeader = "collisions,primers";
inline constexpr const char* kCorrelationCsvHeader = "primer_id,collision_rank,conflict_rank";
inline constexpr const char* kCsvVersion = "# vldna-csv v1";

namespace exp_detail {

inline Bytes load_corpus(const ExperimentSpec& spec) {
    if (spec.corpus_path.empty()) return random_bytes(spec.corpus_size, spec.corpus_seed);
    std::ifstream in(spec.corpus_path, std::ios::binary);
    if (!in) throw IoError("cannot read corpus " + spec.corpus_path);
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

inline std::vector<Primer> load_library(const ExperimentSpec& spec) {
    if (!spec.primer_file.empty()) return read_primer_library(spec.primer_file);
    return generate_library(spec.primer_count, spec.primer_seed);
}

inline TubeConfig tube_config(const ExperimentSpec& spec, CodecId codec, u32 attempts) {
    TubeConfig cfg;
    cfg.codec = codec;
    cfg.buffer_target = std::max<u64>(spec.corpus_size, 1);
    cfg.parallel_factor = spec.parallel;
    cfg.tolerance = spec.tolerance;
    cfg.seed = spec.corpus_seed;
    cfg.rand_attempts = attempts;
    cfg.workers = spec.workers;
    return cfg;
}

inline Tube run_scheme(const ExperimentSpec& spec, const Bytes& data,
                       const std::vector<Primer>& lib, CodecId codec,
                       const std::string& scheme) {
    if (scheme == "fixed") return run_baseline_fixed(data, tube_config(spec, codec, 1), lib);
    if (scheme == "rand5") return run_baseline_randomized(data, tube_config(spec, codec, 5), lib);
    if (scheme == "rand10")
        return run_baseline_randomized(data, tube_config(spec, codec, 10), lib);
    if (scheme == "vldna-collisions")
        return run_vldna_tube(data, tube_config(spec, codec, 1), lib, Scheme::VldnaCollisions);
    if (scheme == "vldna-conflicts")
        return run_vldna_tube(data, tube_config(spec, codec, 1), lib, Scheme::VldnaConflicts);
    throw Error("unknown scheme '" + scheme + "'");
}

inline std::string csv_row(const TubeReport& r, const std::string& scheme_label) {
    std::ostringstream ss;
    ss << r.codec << ',' << scheme_label << ',' << r.usable_primers << ','
       << r.recovered_primers << ',' << r.avg_payload_len << ',' << r.strands << ','
       << r.capacity_bytes << ',' << r.collisions_cut;
    return ss.str();
}

} // namespace exp_detail

// ---------------------------------------------------------------------------
// compare-schemes: one row per (codec, scheme)
// ---------------------------------------------------------------------------

inline std::string compare_schemes_csv(const ExperimentSpec& spec) {
    Bytes data = exp_detail::load_corpus(spec);
    std::vector<Primer> lib = exp_detail::load_library(spec);

    struct Cell {
        CodecId codec;
        std::string scheme;
        std::string row;
    };
    std::vector<Cell> cells;
    for (CodecId c : spec.codecs)
        for (const std::string& s : spec.schemes) cells.push_back({c, s, ""});

    auto run_cell = [&](Cell& cell) {
        Tube tube = exp_detail::run_scheme(spec, data, lib, cell.codec, cell.scheme);
        cell.row = exp_detail::csv_row(tube.report, cell.scheme);
    };
    if (spec.jobs <= 1) {
        for (Cell& c : cells) run_cell(c);
    } else {
        std::atomic<std::size_t> next{0};
        auto body = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) break;
                run_cell(cells[i]);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < spec.jobs; j++) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }

    std::ostringstream out;
    out << kCsvVersion << " schemes\n" << kSchemesCsvHeader << '\n';
    for (const Cell& c : cells) out << c.row << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// compare-groups: Table-1 style comparison under vldna-collisions
// ---------------------------------------------------------------------------

inline std::vector<LengthGroup> table1_groups() {
    std::vector<std::vector<u32>> lens = {
        {150, 160, 190, 200},
        {150, 160, 180, 200},
        {150, 170, 190, 200},
        {150, 170, 180, 200},
        {150, 180, 190, 200},
        {160, 170, 180, 200},
        {160, 170, 190, 200},
        {160, 180, 190, 200},
        {170, 180, 190, 200},
        {160, 170, 180, 190, 200},
        {150, 160, 170, 180, 190, 200},
        {100, 130, 160, 200},
        {100, 140, 170, 200},
    };
    std::vector<LengthGroup> out;
    for (auto& l : lens) out.emplace_back(l);
    return out;
}

inline std::string compare_groups_csv(const ExperimentSpec& spec, CodecId codec,
                                      u32 covered_horizon = 10000) {
    std::vector<LengthGroup> groups = spec.groups.empty() ? table1_groups() : spec.groups;
    for (const LengthGroup& g : groups)
        if (g.max_length() != 200)
            throw Error("compare-groups expects every group to top out at 200");
    Bytes data = exp_detail::load_corpus(spec);
    std::vector<Primer> lib = exp_detail::load_library(spec);

    std::ostringstream out;
    out << kCsvVersion << " groups\n" << kGroupsCsvHeader << '\n';
    for (const LengthGroup& g : groups) {
        ExperimentSpec s = spec;
        TubeConfig cfg = exp_detail::tube_config(s, codec, 1);
        cfg.group = g;
        Tube tube = run_vldna_tube(data, cfg, lib, Scheme::VldnaCollisions);
        out << g.to_string() << ',' << covered_bases(g, covered_horizon) << ','
            << tube.report.usable_primers << ',' << tube.report.recovered_primers << ','
            << tube.report.avg_payload_len << ',' << tube.report.capacity_bytes << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// histogram: collisions-per-primer distribution (zero bucket included)
// ---------------------------------------------------------------------------

inline std::string histogram_csv(const CollisionIndex& index, std::size_t library_size) {
    CollisionStats st = count_statistics(index, library_size);
    std::ostringstream out;
    out << kCsvVersion << " histogram\n" << kHistogramCsvHeader << '\n';
    for (auto& [count, primers] : st.histogram) out << count << ',' << primers << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// correlation: collision-count rank vs conflict-degree rank across collided
// primers, with the Pearson coefficient over the ranks
// ---------------------------------------------------------------------------

namespace exp_detail {

// average ranks with ties
inline std::vector<double> ranks_of(const std::vector<u64>& values) {
    std::size_t n = values.size();
    std::vector<u32> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](u32 a, u32 b) { return values[a] < values[b]; });
    std::vector<double> rank(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) j++;
        double avg = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
        for (std::size_t k = i; k < j; k++) rank[order[k]] = avg;
        i = j;
    }
    return rank;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    if (n < 2) return 0;
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
    if (sxx == 0 || syy == 0) return 0;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace exp_detail

struct CorrelationResult {
    double pearson_r = 0;
    std::size_t collided = 0;
    std::string csv;
};

inline CorrelationResult correlation_report(const DnaSequence& seq,
                                            const std::vector<Primer>& lib,
                                            const CollisionIndex& index,
                                            const LengthGroup& group, u64 parallel,
                                            unsigned workers = 0) {
    PlannerConfig pcfg;
    pcfg.parallel = parallel;
    pcfg.workers = workers;
    Planner planner(seq, lib, index, group, pcfg);
    ConflictGraph graph = planner.build_conflict_graph();

    std::vector<u64> collisions, conflicts;
    std::vector<u32> ids;
    for (std::size_t v = 0; v < graph.size(); v++) {
        ids.push_back(graph.vertices[v].primer_id);
        collisions.push_back(graph.vertices[v].collision_count);
        conflicts.push_back(graph.degree(v));
    }
    CorrelationResult res;
    res.collided = ids.size();
    if (ids.size() < 2) return res;
    auto rx = exp_detail::ranks_of(collisions);
    auto ry = exp_detail::ranks_of(conflicts);
    res.pearson_r = exp_detail::pearson(rx, ry);
    std::ostringstream out;
    out << kCsvVersion << " correlation\n" << kCorrelationCsvHeader << '\n';
    for (std::size_t i = 0; i < ids.size(); i++)
        out << ids[i] << ',' << rx[i] << ',' << ry[i] << '\n';
    res.csv = out.str();
    return res;
}

} // namespace vldna
