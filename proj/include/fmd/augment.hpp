#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fmd/corpus.hpp"
#include "fmd/errors.hpp"
#include "fmd/midi.hpp"
#include "fmd/rng.hpp"

// Additive Gaussian noise on note properties: each note is modified with
// probability p by g ~ Normal(mu, sigma^2), rounded to the nearest integer
// and clamped to the valid MIDI range. Pitch noise touches the NoteOn and
// its paired NoteOff so extraction still pairs them; velocity noise touches
// the NoteOn only. Velocity clamps to [1,127] rather than [0,127]: a zero
// would turn the NoteOn into a NoteOff and silently delete the note.

namespace fmd {

enum class AugmentTarget { NotePitch, NoteVelocity };

struct AugmentSpec {
  AugmentTarget target = AugmentTarget::NotePitch;
  double p = 1.0;       // probability of a note being modified
  double mu = 0.0;      // noise mean
  double sigma = 0.0;   // noise standard deviation, >= 0
  std::uint64_t seed = 0;

  void validate() const {
    if (!(p >= 0.0 && p <= 1.0)) raise(Errc::InvalidArgument, "p must lie in [0,1]");
    if (!(sigma >= 0.0)) raise(Errc::InvalidArgument, "sigma must be >= 0");
  }
};

struct AugmentStats {
  std::int64_t notes_total = 0;
  std::int64_t notes_modified = 0;
};

// Noise for note k of file `file_id` comes from a stream derived from
// (seed, hash(file_id), k), so results are independent of iteration order
// and parallelism. Notes are indexed by NoteOn position in the event stream.
inline MidiDocument augment_document(const MidiDocument& doc, const AugmentSpec& spec,
                                     std::string_view file_id = "",
                                     AugmentStats* stats = nullptr) {
  spec.validate();
  MidiDocument out = doc;
  ExtractedNotes extracted = extract_notes_detailed(out.events);
  const std::uint64_t file_hash = hash64(file_id);

  auto clamp_round = [](double value, int lo, int hi) {
    long r = std::lround(value);
    if (r < lo) r = lo;
    if (r > hi) r = hi;
    return static_cast<std::uint8_t>(r);
  };

  for (std::size_t k = 0; k < extracted.pairings.size(); ++k) {
    if (stats) ++stats->notes_total;
    Rng rng(derive_stream(spec.seed, file_hash, k));
    if (rng.next_unit() >= spec.p) continue;
    if (stats) ++stats->notes_modified;
    const double noise = spec.mu + spec.sigma * rng.next_normal();
    const NotePairing& pairing = extracted.pairings[k];

    auto& on = std::get<NoteOnPayload>(out.events[pairing.on_event].payload);
    if (spec.target == AugmentTarget::NotePitch) {
      std::uint8_t new_pitch = clamp_round(on.pitch + noise, 0, 127);
      on.pitch = new_pitch;
      if (pairing.off_event >= 0) {
        auto& off = std::get<NoteOffPayload>(out.events[pairing.off_event].payload);
        off.pitch = new_pitch;
      }
      extracted.pairings[k].note.pitch = new_pitch;
    } else {
      std::uint8_t new_velocity = clamp_round(on.velocity + noise, 1, 127);
      on.velocity = new_velocity;
      extracted.pairings[k].note.velocity = new_velocity;
    }
  }

  // Notes keep the original pairing with only the targeted property updated.
  // Re-extracting could re-pair notes whose noised pitches collide while
  // nested in time; the original onsets/durations are the authoritative ones.
  out.notes.clear();
  out.notes.reserve(extracted.pairings.size());
  for (const NotePairing& p : extracted.pairings) out.notes.push_back(p.note);
  out.dangling_notes = extracted.dangling_count;
  return out;
}

struct AugmentSummary {
  std::int64_t files = 0;
  std::int64_t notes_total = 0;
  std::int64_t notes_modified = 0;
  std::vector<SkippedFile> skipped;
};

// Augments every MIDI file under in_dir into the mirrored path under
// out_dir. Per-file parse or encode failures are skipped and reported.
inline AugmentSummary augment_corpus(const std::filesystem::path& in_dir,
                                     const std::filesystem::path& out_dir,
                                     const AugmentSpec& spec, int threads = 0) {
  namespace fs = std::filesystem;
  spec.validate();
  auto files = list_corpus_files(in_dir, {".mid", ".midi"});

  struct FileOutcome {
    bool ok = false;
    AugmentStats stats;
    std::string error;
  };
  std::vector<FileOutcome> outcomes(files.size());

  fs::create_directories(out_dir);
  for (const auto& [rel, path] : files) {
    fs::path target = out_dir / rel;
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
  }

  parallel_for(files.size(), threads, [&](std::size_t i) {
    try {
      MidiDocument doc = parse_smf(read_file_bytes(files[i].second));
      AugmentStats stats;
      MidiDocument augmented = augment_document(doc, spec, files[i].first, &stats);
      write_file_bytes(out_dir / files[i].first, encode_smf(augmented));
      outcomes[i] = FileOutcome{true, stats, ""};
    } catch (const Error& e) {
      outcomes[i] = FileOutcome{false, {}, e.what()};
    }
  });

  AugmentSummary summary;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (outcomes[i].ok) {
      ++summary.files;
      summary.notes_total += outcomes[i].stats.notes_total;
      summary.notes_modified += outcomes[i].stats.notes_modified;
    } else {
      summary.skipped.push_back(SkippedFile{files[i].first, outcomes[i].error});
    }
  }
  return summary;
}

}  // namespace fmd
