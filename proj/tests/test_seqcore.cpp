#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "vldna/seqcore.hpp"

using namespace vldna;

TEST_CASE("base complement pairs") {
    CHECK(complement(Base::A) == Base::T);
    CHECK(complement(Base::T) == Base::A);
    CHECK(complement(Base::C) == Base::G);
    CHECK(complement(Base::G) == Base::C);
    for (u8 b = 0; b < 4; b++)
        CHECK(complement(complement(static_cast<Base>(b))) == static_cast<Base>(b));
}

TEST_CASE("reverse complement") {
    CHECK(complement(DnaSequence("")).to_string() == "");
    CHECK(complement(DnaSequence("A")).to_string() == "T");
    CHECK(complement(DnaSequence("ACGT")).to_string() == "ACGT");
    CHECK(complement(DnaSequence("AACGT")).to_string() == "ACGTT");

    // involution over random sequences
    for (u64 seed = 0; seed < 20; seed++) {
        DnaSequence s = DnaSequence::random(1 + seed * 13 % 257, seed);
        CHECK(complement(complement(s)) == s);
    }
}

TEST_CASE("packed storage and window64") {
    DnaSequence s = DnaSequence::random(1000, 42);
    std::string txt = s.to_string();
    DnaSequence t(txt);
    CHECK(s == t);
    for (std::size_t pos : {0ul, 1ul, 31ul, 32ul, 33ul, 500ul, 967ul}) {
        u64 w = s.window64(pos);
        for (int j = 0; j < 32 && pos + j < s.size(); j++)
            CHECK(static_cast<u8>((w >> (2 * j)) & 3) == s.code(pos + j));
    }
    DnaSequence sub = s.subseq(17, 40);
    CHECK(sub.to_string() == txt.substr(17, 40));
}

TEST_CASE("length group basics") {
    LengthGroup g = LengthGroup::default_group();
    CHECK(g.max_length() == 200);
    CHECK(g.lengths() == std::vector<u32>{150, 160, 190, 200});
    CHECK(g.indicator_width() == 1);
    CHECK(*g.slot_of(150) == 0);
    CHECK(*g.slot_of(200) == 3);
    CHECK(!g.slot_of(170).has_value());

    CHECK(LengthGroup({200}).indicator_width() == 1);
    CHECK(LengthGroup({160, 170, 180, 190, 200}).indicator_width() == 2);
    CHECK(LengthGroup({150, 160, 170, 180, 190, 200}).indicator_width() == 2);
    CHECK_THROWS_AS(LengthGroup({155}), Error);
    CHECK_THROWS_AS(LengthGroup({0}), Error);
    CHECK(parse_length_group("150/160/190/200").lengths() == g.lengths());
}

namespace {
DnaSequence prim(u64 seed) {
    return DnaSequence::random(kPrimerLength, seed);
}
} // namespace

TEST_CASE("strand assemble/disassemble round-trip") {
    LengthGroup g = LengthGroup::default_group();
    DnaSequence fwd = prim(1), rev = prim(2);

    SUBCASE("200-base payload uses indicator slot 3") {
        DnaSequence payload = DnaSequence::random(200, 3);
        Strand s = assemble_strand(payload, fwd, rev, 7, g);
        DnaSequence raw = s.serialize(g);
        CHECK(raw.size() == 20 + 1 + 11 + 200 + 20);
        CHECK(raw[20] == Base::T);  // slot 3 in ascending length order
        Strand back = disassemble_strand(raw, g);
        CHECK(back.payload == payload);
        CHECK(back.primer_fwd == fwd);
        CHECK(back.primer_rev == rev);
        CHECK(back.internal_index == 7);
        CHECK(!back.remainder);
    }

    SUBCASE("150-base payload uses indicator slot 0") {
        Strand s = assemble_strand(DnaSequence::random(150, 4), fwd, rev, 0, g);
        CHECK(s.serialize(g)[20] == Base::A);
    }

    SUBCASE("random payload/index round-trips") {
        SplitMix64 rng(99);
        for (int t = 0; t < 200; t++) {
            u32 len = g.lengths()[rng.below(4)];
            u64 idx = rng.below(kIndexSpace);
            DnaSequence payload = DnaSequence::random(len, rng.next());
            Strand s = assemble_strand(payload, fwd, rev, idx, g);
            Strand back = disassemble_strand(s.serialize(g), g);
            CHECK(back.payload == payload);
            CHECK(back.internal_index == idx);
        }
    }

    SUBCASE("remainder payload round-trips with flag") {
        DnaSequence payload = DnaSequence::random(37, 5);
        Strand s = assemble_strand(payload, fwd, rev, 12, g, true);
        Strand back = disassemble_strand(s.serialize(g), g);
        CHECK(back.remainder);
        CHECK(back.payload == payload);
        CHECK(back.internal_index == 12);
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(assemble_strand(DnaSequence::random(155, 6), fwd, rev, 0, g),
                        LengthNotInGroup);
        CHECK_THROWS_AS(assemble_strand(DnaSequence::random(200, 6), fwd, rev, kIndexSpace, g),
                        IndexOverflow);
        // indicator decoding to an unused slot: single-length group, slot 1
        LengthGroup g1({200});
        Strand s = assemble_strand(DnaSequence::random(200, 7), fwd, rev, 1, g1);
        DnaSequence raw = s.serialize(g1);
        raw.set(20, Base::C);  // slot 1 of a 1-length group
        CHECK_THROWS_AS(disassemble_strand(raw, g1), MalformedStrand);
    }
}

TEST_CASE("sequence file formats") {
    std::vector<DnaSequence> seqs;
    for (u64 i = 0; i < 5; i++) seqs.push_back(DnaSequence::random(40 + i * 17, i));

    std::string tf = "test_seqcore_text.tmp";
    write_sequences_text(tf, seqs);
    auto back = read_sequences_text(tf);
    REQUIRE(back.size() == seqs.size());
    for (std::size_t i = 0; i < seqs.size(); i++) CHECK(back[i] == seqs[i]);
    std::remove(tf.c_str());

    std::string pf = "test_seqcore_packed.tmp";
    DnaSequence big = DnaSequence::random(100003, 9);
    write_sequence_packed(pf, big);
    CHECK(read_sequence_packed(pf) == big);
    std::remove(pf.c_str());
}
