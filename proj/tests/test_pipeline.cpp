// Cross-module pipeline behavior and parser robustness on corrupted input.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "fmd/fmd.hpp"
#include "support/corpus_gen.hpp"

using namespace fmd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("fmd_pipe_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

EmbeddingMatrix matrix_of(const Eigen::MatrixXd& values) {
  EmbeddingMatrix m;
  m.values = values;
  for (Eigen::Index i = 0; i < values.rows(); ++i) m.song_ids.push_back("s" + std::to_string(i));
  return m;
}

}  // namespace

TEST_CASE("fmd_score of a corpus against itself is zero with provenance", "[pipeline]") {
  TempDir dir("self");
  fs::create_directories(dir.path / "corpus");
  for (int i = 0; i < 6; ++i)
    write_file_bytes(dir.path / "corpus" / ("s" + std::to_string(i) + ".mid"),
                     encode_smf(testgen::folk_like_document(31, i)));

  EmbedderSpec embedder;
  FmdReport report = fmd_score(dir.path / "corpus", dir.path / "corpus", embedder,
                               EstimatorConfig{Estimator::Mle});
  CHECK(report.value == 0.0);
  CHECK(report.n_ref == 6);
  CHECK(report.n_test == 6);
  REQUIRE(report.embedder.has_value());
  CHECK(report.embedder->kind == EmbedderKind::BuiltinFeatures);
  CHECK(report.estimator == Estimator::Mle);
}

TEST_CASE("fmd_score grows with pitch-noise probability", "[pipeline]") {
  TempDir dir("noise");
  fs::create_directories(dir.path / "ref");
  for (int i = 0; i < 60; ++i)
    write_file_bytes(dir.path / "ref" / ("s" + std::to_string(i) + ".mid"),
                     encode_smf(testgen::folk_like_document(32, i)));

  AugmentSpec light{AugmentTarget::NotePitch, 0.1, 0.0, 10.0, 5};
  AugmentSpec heavy{AugmentTarget::NotePitch, 0.9, 0.0, 10.0, 5};
  augment_corpus(dir.path / "ref", dir.path / "light", light);
  augment_corpus(dir.path / "ref", dir.path / "heavy", heavy);

  EmbedderSpec embedder;
  EstimatorConfig estimator;
  double fmd_light =
      fmd_score(dir.path / "ref", dir.path / "light", embedder, estimator).value;
  double fmd_heavy =
      fmd_score(dir.path / "ref", dir.path / "heavy", embedder, estimator).value;
  CHECK(fmd_light > 0.0);
  CHECK(fmd_heavy > fmd_light);
}

TEST_CASE("disjoint small halves score farther apart than large halves", "[pipeline]") {
  // same synthetic distribution; FMD between disjoint n=1000 halves sits
  // below FMD between disjoint n=100 subsets
  Rng rng(33);
  Eigen::MatrixXd rows(2000, 16);
  for (int i = 0; i < 2000; ++i)
    for (int j = 0; j < 16; ++j) rows(i, j) = rng.next_normal();

  EmbeddingMatrix big_a = matrix_of(rows.topRows(1000));
  EmbeddingMatrix big_b = matrix_of(rows.bottomRows(1000));
  EmbeddingMatrix small_a = matrix_of(rows.topRows(100));
  EmbeddingMatrix small_b = matrix_of(rows.middleRows(1000, 100));

  double large = frechet_distance(estimate_mle(big_a), estimate_mle(big_b)).value;
  double small = frechet_distance(estimate_mle(small_a), estimate_mle(small_b)).value;
  CHECK(large < small);
}

TEST_CASE("header chunks longer than six bytes are tolerated", "[pipeline]") {
  // MThd with length 8: two extra bytes to skip before the first track
  std::vector<std::uint8_t> bytes = {
      'M', 'T', 'h', 'd', 0, 0, 0, 8, 0, 0, 0, 1, 1, 224, 0xAB, 0xCD,
      'M', 'T', 'r', 'k', 0, 0, 0, 4, 0x00, 0xFF, 0x2F, 0x00,
  };
  MidiDocument doc = parse_smf(bytes);
  CHECK(doc.header.division == 480);
  CHECK(doc.events.size() == 1);
}

TEST_CASE("parse_smf survives arbitrary byte corruption", "[pipeline]") {
  // corrupt real files at random positions: every outcome must be a clean
  // parse or a typed error, never a crash or runaway allocation
  Rng rng(34);
  int parsed = 0, rejected = 0;
  for (int rep = 0; rep < 300; ++rep) {
    MidiDocument doc = testgen::random_document(rng);
    std::vector<std::uint8_t> bytes = encode_smf(doc);
    int mutations = 1 + static_cast<int>(rng.next_below(8));
    for (int m = 0; m < mutations; ++m)
      bytes[rng.next_below(bytes.size())] = static_cast<std::uint8_t>(rng.next_below(256));
    if (rng.next_below(4) == 0) bytes.resize(rng.next_below(bytes.size()) + 1);  // truncate
    try {
      MidiDocument out = parse_smf(bytes);
      ++parsed;
      for (const NoteEvent& n : out.notes) {
        CHECK(n.pitch <= 127);
        CHECK(n.velocity >= 1);
        CHECK(n.duration_tick >= 1);
      }
    } catch (const Error&) {
      ++rejected;
    }
  }
  CHECK(parsed + rejected == 300);
  CHECK(parsed > 0);    // some mutations land in payload bytes and still parse
  CHECK(rejected > 0);  // and some break the framing
}

TEST_CASE("decode_mtf survives arbitrary text corruption", "[pipeline]") {
  Rng rng(35);
  for (int rep = 0; rep < 200; ++rep) {
    MidiDocument doc = testgen::random_document(rng);
    std::string text = encode_mtf(doc);
    int mutations = 1 + static_cast<int>(rng.next_below(6));
    for (int m = 0; m < mutations; ++m) {
      char c = static_cast<char>(32 + rng.next_below(95));
      text[rng.next_below(text.size())] = rng.next_below(10) == 0 ? '\n' : c;
    }
    try {
      decode_mtf(text);
    } catch (const Error&) {
    }
  }
  SUCCEED("no crash across 200 corrupted documents");
}

TEST_CASE("read_embeddings_text survives arbitrary corruption", "[pipeline]") {
  Rng rng(36);
  EmbeddingMatrix m;
  m.values = Eigen::MatrixXd::Random(20, 8);
  for (int i = 0; i < 20; ++i) m.song_ids.push_back("song" + std::to_string(i));
  for (int rep = 0; rep < 200; ++rep) {
    std::string text = write_embeddings_text(m);
    int mutations = 1 + static_cast<int>(rng.next_below(6));
    for (int mu = 0; mu < mutations; ++mu)
      text[rng.next_below(text.size())] = static_cast<char>(32 + rng.next_below(95));
    try {
      EmbeddingMatrix out = read_embeddings_text(text);
      CHECK(out.values.allFinite());
    } catch (const Error&) {
    }
  }
  SUCCEED("no crash across 200 corrupted files");
}

TEST_CASE("abc pipeline survives corrupted tunebooks", "[pipeline]") {
  Rng rng(37);
  std::string book;
  for (int i = 0; i < 10; ++i)
    book += "X:" + std::to_string(i) + "\nL:1/8\nK:D\nDEFG ABde | [DFA]2 (3cde z2 |\n\n";
  for (int rep = 0; rep < 200; ++rep) {
    std::string mutated = book;
    int mutations = 1 + static_cast<int>(rng.next_below(10));
    for (int m = 0; m < mutations; ++m) {
      char c = static_cast<char>(32 + rng.next_below(95));
      mutated[rng.next_below(mutated.size())] = rng.next_below(8) == 0 ? '\n' : c;
    }
    TunebookSplit split = split_tunebook(mutated, "fuzz");
    for (const AbcTune& tune : split.tunes) {
      std::vector<SongNote> notes = abc_to_notes(clean_abc(tune));
      for (const SongNote& n : notes) {
        CHECK(n.pitch >= 0);
        CHECK(n.pitch <= 127);
      }
    }
  }
  SUCCEED("no crash across 200 corrupted tunebooks");
}
