// vldna: desk-scale simulator for PCR-random-access DNA storage with
// variable payload lengths.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "vldna/experiments.hpp"
#include "vldna/pipeline.hpp"

using namespace vldna;

namespace {

Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const Bytes& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << text;
}

std::vector<CodecId> parse_codecs(const std::string& list) {
    std::vector<CodecId> out;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_codec(tok));
    return out;
}

std::vector<std::string> split_list(const std::string& list, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, sep))
        if (!tok.empty()) out.push_back(tok);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"VL-DNA storage simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    // global knobs shared by most subcommands
    u64 g_seed = 1;
    std::string g_primers;
    std::string g_group = "150/160/190/200";
    u64 g_parallel = 1550000;
    unsigned g_jobs = 1;
    app.add_option("--seed", g_seed, "master seed");
    app.add_option("--primers", g_primers, "primer library file");
    app.add_option("--group", g_group, "payload length group, e.g. 150/160/190/200");
    app.add_option("--parallel", g_parallel, "strands per primer pair");
    app.add_option("--jobs", g_jobs, "parallel experiment cells");

    // gen-primers
    auto* gen = app.add_subcommand("gen-primers", "generate a primer library");
    u64 gen_count = 2000;
    std::string gen_out = "primers.txt";
    gen->add_option("--count", gen_count, "number of primers")->required();
    gen->add_option("--out", gen_out, "output file")->required();

    // encode
    auto* enc = app.add_subcommand("encode", "encode a data file to a DNA sequence");
    std::string enc_codec = "blawat", enc_in, enc_out;
    bool enc_packed = false, enc_no_ecc = false;
    enc->add_option("--codec", enc_codec, "rotation|blawat|grass");
    enc->add_option("--in", enc_in, "input data file")->required();
    enc->add_option("--out", enc_out, "output sequence file")->required();
    enc->add_flag("--packed", enc_packed, "write the 2-bit packed binary format");
    enc->add_flag("--no-ecc", enc_no_ecc, "skip the Reed-Solomon outer code");

    // scan
    auto* scn = app.add_subcommand("scan", "scan a sequence for primer collisions");
    std::string scn_seq, scn_out = "-", scn_orient = "both";
    scn->add_option("--seq", scn_seq, "sequence file (text or packed)")->required();
    scn->add_option("--out", scn_out, "collision CSV (- for stdout)");
    scn->add_option("--orientation", scn_orient, "fwd|both");

    // plan
    auto* pln = app.add_subcommand("plan", "run the recovery planner on a sequence");
    std::string pln_seq, pln_order = "collisions", pln_out = "-";
    pln->add_option("--seq", pln_seq, "sequence file")->required();
    pln->add_option("--order", pln_order, "collisions|conflicts");
    pln->add_option("--out", pln_out, "plan report (- for stdout)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the tube pipeline on a data file");
    std::string sim_codec = "blawat", sim_order = "collisions", sim_scheme = "vldna";
    std::string sim_in, sim_out_dir = "tube";
    u64 sim_buffer = u64(1) << 25;
    double sim_tolerance = 0.05;
    sim->add_option("--codec", sim_codec, "rotation|blawat|grass");
    sim->add_option("--order", sim_order, "collisions|conflicts (vldna scheme)");
    sim->add_option("--scheme", sim_scheme, "vldna|fixed|rand5|rand10");
    sim->add_option("--buffer", sim_buffer, "tube buffer target in bytes");
    sim->add_option("--tolerance", sim_tolerance, "storable-vs-generated tolerance");
    sim->add_option("--in", sim_in, "input data file")->required();
    sim->add_option("--out", sim_out_dir, "output tube directory");

    // decode
    auto* dec = app.add_subcommand("decode", "decode a tube directory back to data");
    std::string dec_tube, dec_out;
    dec->add_option("--tube", dec_tube, "tube directory")->required();
    dec->add_option("--out", dec_out, "output data file")->required();

    // report
    auto* rep = app.add_subcommand("report", "print a tube report");
    std::string rep_tube, rep_format = "csv";
    rep->add_option("--tube", rep_tube, "tube directory")->required();
    rep->add_option("--format", rep_format, "csv|json");

    // compare-schemes
    auto* cs = app.add_subcommand("compare-schemes", "usable primers and capacity per scheme");
    std::string cs_codecs = "rotation,blawat,grass";
    std::string cs_schemes = "fixed,rand5,rand10,vldna-collisions,vldna-conflicts";
    std::string cs_in, cs_out = "schemes.csv";
    u64 cs_size = 1 << 14;
    u64 cs_primer_count = 2000;
    cs->add_option("--codecs", cs_codecs, "comma-separated codec list");
    cs->add_option("--schemes", cs_schemes, "comma-separated scheme list");
    cs->add_option("--size", cs_size, "synthetic corpus bytes");
    cs->add_option("--in", cs_in, "corpus file (overrides --size)");
    cs->add_option("--primer-count", cs_primer_count, "library size when generating");
    cs->add_option("--out", cs_out, "output CSV");

    // compare-groups
    auto* cg = app.add_subcommand("compare-groups", "usable primers and capacity per length group");
    std::string cg_codec = "blawat", cg_groups, cg_in, cg_out = "groups.csv";
    u64 cg_size = 1 << 14;
    u64 cg_primer_count = 2000;
    cg->add_option("--codec", cg_codec, "rotation|blawat|grass");
    cg->add_option("--groups", cg_groups, "semicolon-separated groups (default: the 13 studied)");
    cg->add_option("--size", cg_size, "synthetic corpus bytes");
    cg->add_option("--in", cg_in, "corpus file");
    cg->add_option("--primer-count", cg_primer_count, "library size when generating");
    cg->add_option("--out", cg_out, "output CSV");

    // histogram
    auto* hg = app.add_subcommand("histogram", "collisions-per-primer distribution");
    std::string hg_codec = "blawat", hg_in, hg_out = "histogram.csv";
    u64 hg_size = 1 << 14;
    u64 hg_primer_count = 2000;
    hg->add_option("--codec", hg_codec, "rotation|blawat|grass");
    hg->add_option("--size", hg_size, "synthetic corpus bytes");
    hg->add_option("--in", hg_in, "corpus file");
    hg->add_option("--primer-count", hg_primer_count, "library size when generating");
    hg->add_option("--out", hg_out, "output CSV");

    // correlation
    auto* co = app.add_subcommand("correlation", "collision vs conflict rank correlation");
    std::string co_codec = "rotation", co_in, co_out = "correlation.csv";
    u64 co_size = 1 << 14;
    u64 co_primer_count = 2000;
    co->add_option("--codec", co_codec, "rotation|blawat|grass");
    co->add_option("--size", co_size, "synthetic corpus bytes");
    co->add_option("--in", co_in, "corpus file");
    co->add_option("--primer-count", co_primer_count, "library size when generating");
    co->add_option("--out", co_out, "output CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        auto library = [&](u64 count) {
            if (!g_primers.empty()) return read_primer_library(g_primers);
            return generate_library(count, g_seed);
        };
        auto load_seq = [&](const std::string& path) {
            std::ifstream probe(path, std::ios::binary);
            char magic[8] = {};
            probe.read(magic, 8);
            probe.close();
            if (std::memcmp(magic, kPackedMagic, 8) == 0) return read_sequence_packed(path);
            auto seqs = read_sequences_text(path);
            DnaSequence all;
            for (const auto& s : seqs) all.append(s);
            return all;
        };

        if (*gen) {
            auto lib = generate_library(gen_count, g_seed);
            write_primer_library(gen_out, lib);
            std::cerr << "wrote " << lib.size() << " primers to " << gen_out << "\n";
        } else if (*enc) {
            Bytes data = read_file(enc_in);
            Bytes payload = enc_no_ecc ? data : ecc_encode(data);
            DnaSequence seq = encode(payload, parse_codec(enc_codec));
            if (enc_packed)
                write_sequence_packed(enc_out, seq);
            else
                write_sequences_text(enc_out, {seq});
            std::cerr << "encoded " << data.size() << " bytes to " << seq.size() << " bases\n";
        } else if (*scn) {
            DnaSequence seq = load_seq(scn_seq);
            auto lib = library(2000);
            ScanConfig sc;
            sc.workers = g_jobs;
            if (scn_orient == "fwd") sc.orientation = Orientation::Forward;
            else if (scn_orient != "both") throw Error("--orientation must be fwd|both");
            CollisionIndex idx = scan(seq, lib, sc);
            std::ostringstream csv;
            write_collisions_csv(csv, idx);
            if (scn_out == "-") std::cout << csv.str();
            else write_text(scn_out, csv.str());
            CollisionStats st = count_statistics(idx, lib.size());
            std::cerr << "collided " << st.collided_primers << "/" << lib.size() << " primers; "
                      << st.total_collisions << " collisions\n";
        } else if (*pln) {
            DnaSequence seq = load_seq(pln_seq);
            auto lib = library(2000);
            ScanConfig sc;
            sc.workers = g_jobs;
            CollisionIndex idx = scan(seq, lib, sc);
            PlannerConfig pcfg;
            pcfg.parallel = g_parallel;
            pcfg.workers = g_jobs;
            Planner planner(seq, lib, idx, parse_length_group(g_group), pcfg);
            ConflictGraph graph = planner.build_conflict_graph();
            RecoveryPlan plan = planner.vl_dna(graph, pln_order == "conflicts"
                                                          ? Planner::SortKey::ByConflicts
                                                          : Planner::SortKey::ByCollisions);
            std::ostringstream report;
            write_plan_report(report, plan);
            if (pln_out == "-") std::cout << report.str();
            else write_text(pln_out, report.str());
        } else if (*sim) {
            Bytes data = read_file(sim_in);
            auto lib = library(2000);
            TubeConfig cfg;
            cfg.codec = parse_codec(sim_codec);
            cfg.buffer_target = sim_buffer;
            cfg.parallel_factor = g_parallel;
            cfg.tolerance = sim_tolerance;
            cfg.group = parse_length_group(g_group);
            cfg.seed = g_seed;
            cfg.workers = g_jobs;
            Tube tube;
            if (sim_scheme == "vldna") {
                tube = run_vldna_tube(data, cfg, lib,
                                      sim_order == "conflicts" ? Scheme::VldnaConflicts
                                                               : Scheme::VldnaCollisions);
            } else if (sim_scheme == "fixed") {
                tube = run_baseline_fixed(data, cfg, lib);
            } else if (sim_scheme == "rand5" || sim_scheme == "rand10") {
                cfg.rand_attempts = sim_scheme == "rand5" ? 5 : 10;
                tube = run_baseline_randomized(data, cfg, lib);
            } else {
                throw Error("unknown scheme '" + sim_scheme + "'");
            }
            write_tube(sim_out_dir, tube);
            std::cerr << "tube written to " << sim_out_dir << ": scheme " << tube.report.scheme
                      << ", usable " << tube.report.usable_primers << ", strands "
                      << tube.report.strands << ", capacity " << tube.report.capacity_bytes
                      << " bytes" << (tube.report.converged ? "" : " (best attempt)") << "\n";
        } else if (*dec) {
            Bytes data = decode_tube_dir(dec_tube);
            write_file(dec_out, data);
            std::cerr << "decoded " << data.size() << " bytes\n";
        } else if (*rep) {
            LoadedTube t = read_tube(rep_tube);
            if (rep_format == "json") {
                nlohmann::json j = {{"scheme", t.report.scheme},
                                    {"codec", t.report.codec},
                                    {"usable_primers", t.report.usable_primers},
                                    {"recovered_primers", t.report.recovered_primers},
                                    {"avg_payload_len", t.report.avg_payload_len},
                                    {"strands", t.report.strands},
                                    {"capacity_bytes", t.report.capacity_bytes},
                                    {"collisions_cut", t.report.collisions_cut},
                                    {"input_bytes", t.report.input_bytes},
                                    {"converged", t.report.converged}};
                std::cout << j.dump(2) << '\n';
            } else if (rep_format == "csv") {
                std::cout << kCsvVersion << " schemes\n" << kSchemesCsvHeader << '\n'
                          << t.report.codec << ',' << t.report.scheme << ','
                          << t.report.usable_primers << ',' << t.report.recovered_primers << ','
                          << t.report.avg_payload_len << ',' << t.report.strands << ','
                          << t.report.capacity_bytes << ',' << t.report.collisions_cut << '\n';
            } else {
                throw Error("--format must be csv|json");
            }
        } else if (*cs) {
            ExperimentSpec spec;
            spec.corpus_path = cs_in;
            spec.corpus_size = cs_size;
            spec.corpus_seed = g_seed;
            spec.codecs = parse_codecs(cs_codecs);
            spec.schemes = split_list(cs_schemes, ',');
            spec.primer_count = cs_primer_count;
            spec.primer_seed = g_seed;
            spec.primer_file = g_primers;
            spec.parallel = g_parallel;
            spec.jobs = g_jobs;
            write_text(cs_out, compare_schemes_csv(spec));
            std::cerr << "wrote " << cs_out << "\n";
        } else if (*cg) {
            ExperimentSpec spec;
            spec.corpus_path = cg_in;
            spec.corpus_size = cg_size;
            spec.corpus_seed = g_seed;
            spec.primer_count = cg_primer_count;
            spec.primer_seed = g_seed;
            spec.primer_file = g_primers;
            spec.parallel = g_parallel;
            for (const std::string& g : split_list(cg_groups, ';'))
                spec.groups.push_back(parse_length_group(g));
            write_text(cg_out, compare_groups_csv(spec, parse_codec(cg_codec)));
            std::cerr << "wrote " << cg_out << "\n";
        } else if (*hg) {
            ExperimentSpec spec;
            spec.corpus_path = hg_in;
            spec.corpus_size = hg_size;
            spec.corpus_seed = g_seed;
            spec.primer_count = hg_primer_count;
            spec.primer_seed = g_seed;
            spec.primer_file = g_primers;
            Bytes data = exp_detail::load_corpus(spec);
            auto lib = exp_detail::load_library(spec);
            DnaSequence seq = encode(ecc_encode(data), parse_codec(hg_codec));
            ScanConfig sc;
            sc.workers = g_jobs;
            CollisionIndex idx = scan(seq, lib, sc);
            write_text(hg_out, histogram_csv(idx, lib.size()));
            CollisionStats st = count_statistics(idx, lib.size());
            std::cerr << "collided fraction " << st.collided_fraction << "\n";
        } else if (*co) {
            ExperimentSpec spec;
            spec.corpus_path = co_in;
            spec.corpus_size = co_size;
            spec.corpus_seed = g_seed;
            spec.primer_count = co_primer_count;
            spec.primer_seed = g_seed;
            spec.primer_file = g_primers;
            Bytes data = exp_detail::load_corpus(spec);
            auto lib = exp_detail::load_library(spec);
            DnaSequence seq = encode(ecc_encode(data), parse_codec(co_codec));
            ScanConfig sc;
            sc.workers = g_jobs;
            CollisionIndex idx = scan(seq, lib, sc);
            CorrelationResult res =
                correlation_report(seq, lib, idx, parse_length_group(g_group), g_parallel, g_jobs);
            write_text(co_out, res.csv);
            std::cout << "pearson_r " << res.pearson_r << " over " << res.collided
                      << " collided primers\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
