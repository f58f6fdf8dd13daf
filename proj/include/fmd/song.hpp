#pragma once

#include <vector>

#include "fmd/midi.hpp"

namespace fmd {

// Modality-neutral note used by the feature embedder. Times are in quarter
// notes so MIDI and ABC songs land on the same scale.
struct SongNote {
  int pitch = 60;        // 0..127
  int velocity = 64;     // 1..127
  double onset_q = 0.0;  // quarters from song start
  double duration_q = 1.0;
};

inline std::vector<SongNote> notes_from_midi(const MidiDocument& doc) {
  std::vector<SongNote> out;
  out.reserve(doc.notes.size());
  const double div = static_cast<double>(doc.header.division);
  for (const NoteEvent& n : doc.notes)
    out.push_back(SongNote{n.pitch, n.velocity, static_cast<double>(n.onset_tick) / div,
                           static_cast<double>(n.duration_tick) / div});
  return out;
}

}  // namespace fmd
