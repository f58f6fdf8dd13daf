#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <string>

#include "fmd/abc.hpp"
#include "fmd/rng.hpp"

using namespace fmd;

namespace {

std::vector<int> pitches(const std::vector<SongNote>& notes) {
  std::vector<int> out;
  for (const SongNote& n : notes) out.push_back(n.pitch);
  return out;
}

std::vector<double> durations(const std::vector<SongNote>& notes) {
  std::vector<double> out;
  for (const SongNote& n : notes) out.push_back(n.duration_q);
  return out;
}

AbcTune make_tune(std::vector<std::pair<char, std::string>> header,
                  std::vector<std::string> body) {
  AbcTune t;
  t.header_fields = std::move(header);
  t.body_lines = std::move(body);
  t.source_id = "test";
  return t;
}

// Random tune generator for the idempotence property.
AbcTune random_tune(Rng& rng) {
  AbcTune t;
  t.header_fields.emplace_back('X', std::to_string(1 + rng.next_below(100)));
  if (rng.next_below(2))
    t.header_fields.emplace_back('T', "Tune " + std::to_string(rng.next_below(50)));
  t.header_fields.emplace_back('M', "4/4");
  t.header_fields.emplace_back('L', "1/8");
  if (rng.next_below(3) == 0) t.header_fields.emplace_back('V', "1");
  t.header_fields.emplace_back('K', rng.next_below(2) ? "D" : "Am");
  static const char* fragments[] = {"CDEF GABc", "  c2 B2 A2 G2", "\t|: EFGA Bcde :|",
                                    "z4 f4", "^c _e =f g'"};
  int lines = 1 + static_cast<int>(rng.next_below(4));
  for (int i = 0; i < lines; ++i) t.body_lines.emplace_back(fragments[rng.next_below(5)]);
  t.source_id = "gen";
  return t;
}

}  // namespace

TEST_CASE("split finds two tunes in a two-block book", "[abc]") {
  std::string book =
      "X:1\nT:First\nK:D\nDEFG|\n"
      "\n"
      "X:2\nT:Second\nK:G\nGABc|\n";
  TunebookSplit split = split_tunebook(book, "book.abc");
  REQUIRE(split.tunes.size() == 2);
  CHECK(split.skipped_count == 0);
  CHECK(split.tunes[0].source_id == "book.abc#1");
  CHECK(split.tunes[1].source_id == "book.abc#2");
  CHECK(*split.tunes[0].field('K') == "D");
  CHECK(split.tunes[1].body_lines == std::vector<std::string>{"GABc|"});
}

TEST_CASE("empty file yields empty list", "[abc]") {
  TunebookSplit split = split_tunebook("");
  CHECK(split.tunes.empty());
  CHECK(split.skipped_count == 0);
}

TEST_CASE("tune missing K: is skipped and counted", "[abc]") {
  std::string book = "X:1\nT:No key here\nCDEF|\n\nX:2\nK:C\nCDEF|\n";
  TunebookSplit split = split_tunebook(book);
  REQUIRE(split.tunes.size() == 1);
  CHECK(split.skipped_count == 1);
  CHECK(split.tunes[0].source_id == "2");
}

TEST_CASE("comment-only segments are dropped", "[abc]") {
  std::string book = "% just a comment\n%%directive\n\nX:1\nK:C\nCDEF|\n";
  TunebookSplit split = split_tunebook(book);
  CHECK(split.tunes.size() == 1);
}

TEST_CASE("clean strips leading whitespace from body lines", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'K', "C"}, {'V', "1"}}, {"  CDEF", "\tGABc", "c2d2"});
  AbcTune cleaned = clean_abc(t);
  CHECK(cleaned.body_lines == std::vector<std::string>{"CDEF", "GABc", "c2d2"});
}

TEST_CASE("clean inserts V:1 after K: when no voice exists", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'T', "t"}, {'K', "C"}}, {"CDEF"});
  AbcTune cleaned = clean_abc(t);
  REQUIRE(cleaned.header_fields.size() == 4);
  CHECK(cleaned.header_fields[2].first == 'K');
  CHECK(cleaned.header_fields[3] == std::pair<char, std::string>{'V', "1"});

  // already voiced: unchanged except whitespace stripping
  AbcTune voiced = make_tune({{'X', "1"}, {'K', "C"}, {'V', "1"}}, {" CDEF"});
  AbcTune cleaned_voiced = clean_abc(voiced);
  CHECK(cleaned_voiced.header_fields == voiced.header_fields);
  CHECK(cleaned_voiced.body_lines == std::vector<std::string>{"CDEF"});

  // a body-line voice declaration also counts
  AbcTune body_voiced = make_tune({{'X', "1"}, {'K', "C"}}, {"V:2", "CDEF"});
  CHECK_FALSE(clean_abc(body_voiced).has_field('V'));
}

TEST_CASE("clean is idempotent byte for byte", "[abc]") {
  Rng rng(314159);
  for (int rep = 0; rep < 100; ++rep) {
    AbcTune t = random_tune(rng);
    AbcTune once = clean_abc(t);
    AbcTune twice = clean_abc(once);
    CHECK(render_tune(once) == render_tune(twice));
  }
}

TEST_CASE("clean preserves non-whitespace body content", "[abc]") {
  Rng rng(271828);
  for (int rep = 0; rep < 100; ++rep) {
    AbcTune t = random_tune(rng);
    AbcTune cleaned = clean_abc(t);
    std::map<char, int> before, after;
    for (const std::string& line : t.body_lines)
      for (char c : line)
        if (c != ' ' && c != '\t') ++before[c];
    for (const std::string& line : cleaned.body_lines)
      for (char c : line)
        if (c != ' ' && c != '\t') ++after[c];
    CHECK(before == after);
  }
}

TEST_CASE("split of the canonical join recovers the tunes", "[abc]") {
  Rng rng(161803);
  std::vector<AbcTune> tunes;
  for (int i = 0; i < 20; ++i) {
    AbcTune t = clean_abc(random_tune(rng));
    t.source_id = "roundtrip.abc#" + std::to_string(i + 1);
    tunes.push_back(t);
  }
  TunebookSplit split = split_tunebook(join_tunebook(tunes), "roundtrip.abc");
  REQUIRE(split.tunes.size() == tunes.size());
  CHECK(split.skipped_count == 0);
  for (std::size_t i = 0; i < tunes.size(); ++i) {
    CHECK(split.tunes[i].header_fields == tunes[i].header_fields);
    CHECK(split.tunes[i].body_lines == tunes[i].body_lines);
    CHECK(split.tunes[i].source_id == tunes[i].source_id);
  }
}

// --- note interpreter -------------------------------------------------------

TEST_CASE("C major scale with quarter-note unit", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'L', "1/4"}, {'K', "C"}}, {"CDEF"});
  std::vector<SongNote> notes = abc_to_notes(t);
  CHECK(pitches(notes) == std::vector<int>{60, 62, 64, 65});
  CHECK(durations(notes) == std::vector<double>{1.0, 1.0, 1.0, 1.0});
  CHECK(notes[0].onset_q == 0.0);
  CHECK(notes[3].onset_q == 3.0);
}

TEST_CASE("key signature D major sharpens F and C", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'K', "D"}}, {"DEFG ABcd"});
  CHECK(pitches(abc_to_notes(t)) == std::vector<int>{62, 64, 66, 67, 69, 71, 73, 74});
}

TEST_CASE("modes map to the right signatures", "[abc]") {
  // A dorian = G major signature: F# only
  AbcTune dor = make_tune({{'X', "1"}, {'K', "Ador"}}, {"ABcdefg"});
  CHECK(pitches(abc_to_notes(dor)) == std::vector<int>{69, 71, 72, 74, 76, 78, 79});
  // E minor = G major signature as well
  AbcTune min = make_tune({{'X', "1"}, {'K', "Em"}}, {"EFGA"});
  CHECK(pitches(abc_to_notes(min)) == std::vector<int>{64, 66, 67, 69});
  // D mixolydian = G major signature
  AbcTune mix = make_tune({{'X', "1"}, {'K', "D mix"}}, {"DEFGABcd"});
  CHECK(pitches(abc_to_notes(mix)) == std::vector<int>{62, 64, 66, 67, 69, 71, 72, 74});
}

TEST_CASE("accidentals persist to the end of the bar", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'K', "C"}}, {"^CC|C"});
  CHECK(pitches(abc_to_notes(t)) == std::vector<int>{61, 61, 60});

  // natural overrides the key signature within the bar
  AbcTune nat = make_tune({{'X', "1"}, {'K', "D"}}, {"F=FF|F"});
  CHECK(pitches(abc_to_notes(nat)) == std::vector<int>{66, 65, 65, 66});

  // accidental is per (letter, octave)
  AbcTune oct = make_tune({{'X', "1"}, {'K', "C"}}, {"^Cc"});
  CHECK(pitches(abc_to_notes(oct)) == std::vector<int>{61, 72});
}

TEST_CASE("octave marks shift by twelve", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'K', "C"}}, {"C c c' C, c''"});
  CHECK(pitches(abc_to_notes(t)) == std::vector<int>{60, 72, 84, 48, 96});
}

TEST_CASE("duration multipliers and divisors", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'L', "1/8"}, {'K', "C"}}, {"C2 C C/2 C3/2 C/ C//"});
  std::vector<double> d = durations(abc_to_notes(t));
  REQUIRE(d.size() == 6);
  CHECK(d[0] == Catch::Approx(1.0));
  CHECK(d[1] == Catch::Approx(0.5));
  CHECK(d[2] == Catch::Approx(0.25));
  CHECK(d[3] == Catch::Approx(0.75));
  CHECK(d[4] == Catch::Approx(0.25));
  CHECK(d[5] == Catch::Approx(0.125));
}

TEST_CASE("rests advance time without adding notes", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'L', "1/4"}, {'K', "C"}}, {"C z2 C"});
  std::vector<SongNote> notes = abc_to_notes(t);
  REQUIRE(notes.size() == 2);
  CHECK(notes[1].onset_q == Catch::Approx(3.0));
}

TEST_CASE("broken rhythm dots the pair", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'L', "1/8"}, {'K', "C"}}, {"C>D E<F"});
  std::vector<SongNote> notes = abc_to_notes(t);
  REQUIRE(notes.size() == 4);
  CHECK(notes[0].duration_q == Catch::Approx(0.75));
  CHECK(notes[1].duration_q == Catch::Approx(0.25));
  CHECK(notes[2].duration_q == Catch::Approx(0.25));
  CHECK(notes[3].duration_q == Catch::Approx(0.75));
  // onsets stay contiguous
  CHECK(notes[1].onset_q == Catch::Approx(0.75));
  CHECK(notes[3].onset_q == Catch::Approx(1.25));
}

TEST_CASE("triplets scale durations by two thirds", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'L', "1/8"}, {'K', "C"}}, {"(3CDE F"});
  std::vector<SongNote> notes = abc_to_notes(t);
  REQUIRE(notes.size() == 4);
  for (int i = 0; i < 3; ++i) CHECK(notes[i].duration_q == Catch::Approx(0.5 * 2.0 / 3.0));
  CHECK(notes[3].duration_q == Catch::Approx(0.5));
}

TEST_CASE("chords share an onset and advance by the longest member", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'L', "1/4"}, {'K', "C"}}, {"[CEG]2 C"});
  std::vector<SongNote> notes = abc_to_notes(t);
  REQUIRE(notes.size() == 4);
  CHECK(notes[0].onset_q == 0.0);
  CHECK(notes[1].onset_q == 0.0);
  CHECK(notes[2].onset_q == 0.0);
  CHECK(notes[0].duration_q == Catch::Approx(2.0));
  CHECK(notes[3].onset_q == Catch::Approx(2.0));
}

TEST_CASE("inline key changes apply from that point", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'K', "C"}}, {"F[K:D]F"});
  CHECK(pitches(abc_to_notes(t)) == std::vector<int>{65, 66});
}

TEST_CASE("grace notes, decorations and chord symbols are skipped", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'K', "C"}}, {"{ag}C \"Am\"D !trill!E"});
  CHECK(pitches(abc_to_notes(t)) == std::vector<int>{60, 62, 64});
}

TEST_CASE("repeat endings are not chords", "[abc]") {
  AbcTune t = make_tune({{'X', "1"}, {'L', "1/4"}, {'K', "C"}}, {"C |[1 D :|[2 E |"});
  std::vector<SongNote> notes = abc_to_notes(t);
  CHECK(pitches(notes) == std::vector<int>{60, 62, 64});
  // all three notes occupy distinct onsets
  CHECK(notes[1].onset_q > notes[0].onset_q);
  CHECK(notes[2].onset_q > notes[1].onset_q);
}
