#include <catch2/catch_amalgamated.hpp>

#include "fmd/mtf.hpp"
#include "fmd/rng.hpp"
#include "support/corpus_gen.hpp"

using namespace fmd;

TEST_CASE("empty document encodes to the canonical minimal text", "[mtf]") {
  MidiDocument doc = MidiDocument::empty(480);
  CHECK(encode_mtf(doc) == "MTF v1 division=480 format=1\n0 0 END_OF_TRACK\n");

  // a document with no events at all gets the same canonical body
  MidiDocument bare;
  bare.header = MidiHeader{1, 1, 480};
  CHECK(encode_mtf(bare) == "MTF v1 division=480 format=1\n0 0 END_OF_TRACK\n");
}

TEST_CASE("single note document has three body lines in tick order", "[mtf]") {
  MidiDocument doc;
  doc.header = MidiHeader{0, 1, 480};
  doc.events = {
      {0, 0, NoteOnPayload{0, 60, 100}},
      {480, 0, NoteOffPayload{0, 60, 0}},
      {480, 0, EndOfTrackPayload{}},
  };
  std::string text = encode_mtf(doc);
  CHECK(text ==
        "MTF v1 division=480 format=0\n"
        "0 0 NOTE_ON ch=0 pitch=60 vel=100\n"
        "480 0 NOTE_OFF ch=0 pitch=60 vel=0\n"
        "480 0 END_OF_TRACK\n");
}

TEST_CASE("decode inverts encode over a generated corpus", "[mtf]") {
  Rng rng(424242);
  for (int rep = 0; rep < 40; ++rep) {
    MidiDocument doc = testgen::random_document(rng);
    std::string text = encode_mtf(doc);
    MidiDocument back = decode_mtf(text);
    REQUIRE(event_equivalent(doc, back));
    CHECK(back.header.division == doc.header.division);
    CHECK(back.header.format == doc.header.format);
    // byte-identical re-encode: encode is deterministic and decode lossless
    CHECK(encode_mtf(back) == text);
  }
}

TEST_CASE("hex payloads survive the round trip", "[mtf]") {
  MidiDocument doc;
  doc.header = MidiHeader{1, 1, 96};
  doc.events = {
      {0, 0, OtherMetaPayload{0x03, {'h', 'i', 0x00, 0xFF}}},
      {1, 0, SysExPayload{0xF0, {0x7E, 0x00, 0xF7}}},
      {2, 0, SysExPayload{0xF7, {}}},
      {3, 0, OtherMetaPayload{0x7F, {}}},
      {3, 0, EndOfTrackPayload{}},
  };
  std::string text = encode_mtf(doc);
  CHECK(text.find("META type=3 data=686900ff") != std::string::npos);
  CHECK(text.find("SYSEX status=f0 data=7e00f7") != std::string::npos);
  CHECK(text.find("SYSEX status=f7 data=\n") != std::string::npos);
  MidiDocument back = decode_mtf(text);
  CHECK(event_equivalent(doc, back));
}

TEST_CASE("unsupported version is rejected", "[mtf]") {
  CHECK_THROWS_MATCHES(decode_mtf("MTF v2 division=480 format=1\n0 0 END_OF_TRACK\n"), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::UnsupportedVersion; }));
}

TEST_CASE("malformed body line reports the line number", "[mtf]") {
  try {
    decode_mtf("MTF v1 division=480 format=1\n0 0 END_OF_TRACK\nabc\n");
    FAIL("expected MalformedLine");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedLine);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("field range violations are rejected", "[mtf]") {
  CHECK_THROWS_MATCHES(
      decode_mtf("MTF v1 division=480 format=1\n0 0 NOTE_ON ch=0 pitch=128 vel=10\n"), Error,
      Catch::Matchers::Predicate<Error>(
          [](const Error& e) { return e.code() == Errc::FieldOutOfRange; }));
  CHECK_THROWS_MATCHES(
      decode_mtf("MTF v1 division=480 format=1\n0 0 NOTE_ON ch=0 pitch=60 vel=0\n"), Error,
      Catch::Matchers::Predicate<Error>(
          [](const Error& e) { return e.code() == Errc::FieldOutOfRange; }));
}

TEST_CASE("order violations are rejected", "[mtf]") {
  // tick decreasing within a track
  CHECK_THROWS_MATCHES(decode_mtf("MTF v1 division=480 format=1\n"
                                  "10 0 TEMPO usec_per_quarter=500000\n"
                                  "5 0 END_OF_TRACK\n"),
                       Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::MalformedLine;
                       }));
  // track interleaving
  CHECK_THROWS_MATCHES(decode_mtf("MTF v1 division=480 format=1\n"
                                  "0 1 END_OF_TRACK\n"
                                  "0 0 END_OF_TRACK\n"),
                       Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::MalformedLine;
                       }));
}

TEST_CASE("midi to mtf to midi is event equivalent", "[mtf]") {
  Rng rng(5150);
  for (int rep = 0; rep < 15; ++rep) {
    MidiDocument doc = testgen::random_document(rng);
    std::vector<std::uint8_t> original = encode_smf(doc);
    MidiDocument parsed = parse_smf(original);
    MidiDocument via_mtf = decode_mtf(encode_mtf(parsed));
    std::vector<std::uint8_t> re_encoded = encode_smf(via_mtf);
    CHECK(event_equivalent(parsed, parse_smf(re_encoded)));
  }
}
