#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fmd/errors.hpp"

// Standard MIDI File (format 0/1) parsing and encoding. The event model keeps
// every payload byte so a parsed document can be re-encoded without loss;
// equivalence is defined as the per-track multiset of (tick, kind, payload)
// after two normalizations applied at parse time: running status is expanded
// and NoteOn with velocity 0 is represented as NoteOff.

namespace fmd {

enum class MidiEventKind {
  NoteOn,
  NoteOff,
  PolyAftertouch,
  ControlChange,
  ProgramChange,
  ChannelAftertouch,
  PitchBend,
  Tempo,
  TimeSignature,
  KeySignature,
  EndOfTrack,
  OtherMeta,
  SysEx,
};

inline const char* midi_kind_name(MidiEventKind k) {
  switch (k) {
    case MidiEventKind::NoteOn: return "NOTE_ON";
    case MidiEventKind::NoteOff: return "NOTE_OFF";
    case MidiEventKind::PolyAftertouch: return "POLY_AFTERTOUCH";
    case MidiEventKind::ControlChange: return "CONTROL_CHANGE";
    case MidiEventKind::ProgramChange: return "PROGRAM_CHANGE";
    case MidiEventKind::ChannelAftertouch: return "CHANNEL_AFTERTOUCH";
    case MidiEventKind::PitchBend: return "PITCH_BEND";
    case MidiEventKind::Tempo: return "TEMPO";
    case MidiEventKind::TimeSignature: return "TIME_SIGNATURE";
    case MidiEventKind::KeySignature: return "KEY_SIGNATURE";
    case MidiEventKind::EndOfTrack: return "END_OF_TRACK";
    case MidiEventKind::OtherMeta: return "META";
    case MidiEventKind::SysEx: return "SYSEX";
  }
  return "UNKNOWN";
}

struct NoteOnPayload {
  std::uint8_t channel, pitch, velocity;  // velocity >= 1 after normalization
  auto operator<=>(const NoteOnPayload&) const = default;
};
struct NoteOffPayload {
  std::uint8_t channel, pitch, velocity;  // release velocity; 0 for NoteOn-vel-0 form
  auto operator<=>(const NoteOffPayload&) const = default;
};
struct PolyAftertouchPayload {
  std::uint8_t channel, pitch, value;
  auto operator<=>(const PolyAftertouchPayload&) const = default;
};
struct ControlChangePayload {
  std::uint8_t channel, controller, value;
  auto operator<=>(const ControlChangePayload&) const = default;
};
struct ProgramChangePayload {
  std::uint8_t channel, program;
  auto operator<=>(const ProgramChangePayload&) const = default;
};
struct ChannelAftertouchPayload {
  std::uint8_t channel, value;
  auto operator<=>(const ChannelAftertouchPayload&) const = default;
};
struct PitchBendPayload {
  std::uint8_t channel;
  int value;  // 14-bit, 0..16383, center 8192
  auto operator<=>(const PitchBendPayload&) const = default;
};
struct TempoPayload {
  std::uint32_t usec_per_quarter;  // 24-bit
  auto operator<=>(const TempoPayload&) const = default;
};
struct TimeSignaturePayload {
  std::uint8_t numerator, log2_denominator, clocks_per_click, notated_32nds;
  auto operator<=>(const TimeSignaturePayload&) const = default;
};
struct KeySignaturePayload {
  std::int8_t sharps;  // -7..7
  std::uint8_t minor;  // raw byte, 0 major / 1 minor
  auto operator<=>(const KeySignaturePayload&) const = default;
};
struct EndOfTrackPayload {
  auto operator<=>(const EndOfTrackPayload&) const = default;
};
struct OtherMetaPayload {
  std::uint8_t type;
  std::vector<std::uint8_t> data;
  auto operator<=>(const OtherMetaPayload&) const = default;
};
struct SysExPayload {
  std::uint8_t status;  // 0xF0 or 0xF7
  std::vector<std::uint8_t> data;
  auto operator<=>(const SysExPayload&) const = default;
};

using MidiPayload =
    std::variant<NoteOnPayload, NoteOffPayload, PolyAftertouchPayload, ControlChangePayload,
                 ProgramChangePayload, ChannelAftertouchPayload, PitchBendPayload, TempoPayload,
                 TimeSignaturePayload, KeySignaturePayload, EndOfTrackPayload, OtherMetaPayload,
                 SysExPayload>;

struct MidiEvent {
  std::int64_t tick = 0;  // absolute, within track
  int track = 0;
  MidiPayload payload;

  MidiEventKind kind() const { return static_cast<MidiEventKind>(payload.index()); }
  auto operator<=>(const MidiEvent&) const = default;
};

static_assert(static_cast<int>(MidiEventKind::SysEx) == 12,
              "payload variant order must match MidiEventKind");

struct MidiHeader {
  int format = 1;       // 0 or 1; format 2 is rejected
  int track_count = 1;  // equals the number of parsed track chunks
  int division = 480;   // ticks per quarter note; SMPTE division rejected
};

struct NoteEvent {
  std::uint8_t pitch = 0;     // 0..127
  std::uint8_t velocity = 1;  // 1..127
  std::int64_t onset_tick = 0;
  std::int64_t duration_tick = 1;  // >= 1; zero-length pairs widened to 1
  std::uint8_t channel = 0;
  int track = 0;
  auto operator<=>(const NoteEvent&) const = default;
};

struct MidiDocument {
  MidiHeader header;
  std::vector<MidiEvent> events;  // ordered by (track, tick, original stream order)
  std::vector<NoteEvent> notes;   // derived via extract_notes
  int dangling_notes = 0;         // NoteOns closed at end of track

  static MidiDocument empty(int division = 480) {
    MidiDocument doc;
    doc.header = MidiHeader{1, 1, division};
    doc.events.push_back(MidiEvent{0, 0, EndOfTrackPayload{}});
    return doc;
  }
};

// ---------------------------------------------------------------------------
// Note extraction

struct NotePairing {
  NoteEvent note;
  std::size_t on_event;      // index into events
  std::ptrdiff_t off_event;  // index into events, -1 when closed at end of track
};

struct ExtractedNotes {
  std::vector<NoteEvent> notes;  // ordered by NoteOn position in the stream
  std::vector<NotePairing> pairings;
  int dangling_count = 0;  // NoteOns without a matching NoteOff
  int orphan_offs = 0;     // NoteOffs without an open note
};

// Pairs each NoteOn with the earliest subsequent NoteOff on the same
// (track, channel, pitch) — FIFO. Unmatched NoteOns are closed at the final
// tick of their track. Events must be ordered by (track, tick).
inline ExtractedNotes extract_notes_detailed(const std::vector<MidiEvent>& events) {
  ExtractedNotes out;
  struct Open {
    std::size_t pairing_index;
  };
  std::map<std::pair<std::uint8_t, std::uint8_t>, std::vector<Open>> open;  // (ch, pitch) -> FIFO
  int current_track = events.empty() ? 0 : events.front().track;
  std::int64_t track_end = 0;

  auto close_track = [&]() {
    for (auto& [key, queue] : open) {
      for (const Open& o : queue) {
        NotePairing& p = out.pairings[o.pairing_index];
        p.note.duration_tick = std::max<std::int64_t>(1, track_end - p.note.onset_tick);
        p.off_event = -1;
        ++out.dangling_count;
      }
    }
    open.clear();
    track_end = 0;
  };

  for (std::size_t i = 0; i < events.size(); ++i) {
    const MidiEvent& ev = events[i];
    if (ev.track != current_track) {
      close_track();
      current_track = ev.track;
    }
    track_end = std::max(track_end, ev.tick);
    if (const auto* on = std::get_if<NoteOnPayload>(&ev.payload)) {
      NotePairing p;
      p.note = NoteEvent{on->pitch, on->velocity, ev.tick, 1, on->channel, ev.track};
      p.on_event = i;
      p.off_event = -1;
      open[{on->channel, on->pitch}].push_back(Open{out.pairings.size()});
      out.pairings.push_back(std::move(p));
    } else if (const auto* off = std::get_if<NoteOffPayload>(&ev.payload)) {
      auto it = open.find({off->channel, off->pitch});
      if (it == open.end() || it->second.empty()) {
        ++out.orphan_offs;
        continue;
      }
      NotePairing& p = out.pairings[it->second.front().pairing_index];
      it->second.erase(it->second.begin());
      p.note.duration_tick = std::max<std::int64_t>(1, ev.tick - p.note.onset_tick);
      p.off_event = static_cast<std::ptrdiff_t>(i);
    }
  }
  close_track();

  out.notes.reserve(out.pairings.size());
  for (const NotePairing& p : out.pairings) out.notes.push_back(p.note);
  return out;
}

inline std::vector<NoteEvent> extract_notes(const std::vector<MidiEvent>& events,
                                            int* dangling_count = nullptr) {
  ExtractedNotes ex = extract_notes_detailed(events);
  if (dangling_count) *dangling_count = ex.dangling_count;
  return std::move(ex.notes);
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::size_t pos, std::size_t end)
      : bytes_(bytes), pos_(pos), end_(end) {}

  bool done() const { return pos_ >= end_; }
  std::size_t pos() const { return pos_; }
  void skip_to_end() { pos_ = end_; }

  std::uint8_t peek() const {
    if (pos_ >= end_) raise(Errc::TruncatedTrack, "unexpected end of track data");
    return bytes_[pos_];
  }
  std::uint8_t u8() {
    std::uint8_t b = peek();
    ++pos_;
    return b;
  }
  std::uint8_t data_byte() {
    std::uint8_t b = u8();
    if (b > 0x7F) raise(Errc::MalformedEvent, "data byte has high bit set");
    return b;
  }
  std::vector<std::uint8_t> raw(std::size_t n) {
    if (end_ - pos_ < n) raise(Errc::TruncatedTrack, "payload runs past end of track");
    std::vector<std::uint8_t> v(bytes_.begin() + pos_, bytes_.begin() + pos_ + n);
    pos_ += n;
    return v;
  }

  // Variable-length quantity, at most 4 bytes.
  std::uint32_t vlq() {
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
      std::uint8_t b = u8();
      value = (value << 7) | (b & 0x7F);
      if ((b & 0x80) == 0) return value;
    }
    raise(Errc::VariableLengthOverflow, "variable-length quantity longer than 4 bytes");
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
  std::size_t end_;
};

inline std::uint16_t be16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}
inline std::uint32_t be32(std::span<const std::uint8_t> b, std::size_t at) {
  return (static_cast<std::uint32_t>(b[at]) << 24) | (static_cast<std::uint32_t>(b[at + 1]) << 16) |
         (static_cast<std::uint32_t>(b[at + 2]) << 8) | static_cast<std::uint32_t>(b[at + 3]);
}

inline void parse_track(ByteReader& r, int track, std::vector<MidiEvent>& out) {
  std::int64_t tick = 0;
  std::uint8_t running_status = 0;
  while (true) {
    if (r.done()) raise(Errc::TruncatedTrack, "track data ended before EndOfTrack meta event");
    tick += r.vlq();

    std::uint8_t status;
    if (r.peek() < 0x80) {
      if (running_status == 0)
        raise(Errc::MalformedEvent, "data byte with no running status");
      status = running_status;
    } else {
      status = r.u8();
      if (status < 0xF0)
        running_status = status;
      else
        running_status = 0;  // sysex and meta events cancel running status
    }

    MidiEvent ev;
    ev.tick = tick;
    ev.track = track;
    std::uint8_t channel = status & 0x0F;
    switch (status & 0xF0) {
      case 0x80: {
        std::uint8_t pitch = r.data_byte(), vel = r.data_byte();
        ev.payload = NoteOffPayload{channel, pitch, vel};
        break;
      }
      case 0x90: {
        std::uint8_t pitch = r.data_byte(), vel = r.data_byte();
        if (vel == 0)
          ev.payload = NoteOffPayload{channel, pitch, 0};
        else
          ev.payload = NoteOnPayload{channel, pitch, vel};
        break;
      }
      case 0xA0: {
        std::uint8_t pitch = r.data_byte(), value = r.data_byte();
        ev.payload = PolyAftertouchPayload{channel, pitch, value};
        break;
      }
      case 0xB0: {
        std::uint8_t controller = r.data_byte(), value = r.data_byte();
        ev.payload = ControlChangePayload{channel, controller, value};
        break;
      }
      case 0xC0: {
        ev.payload = ProgramChangePayload{channel, r.data_byte()};
        break;
      }
      case 0xD0: {
        ev.payload = ChannelAftertouchPayload{channel, r.data_byte()};
        break;
      }
      case 0xE0: {
        std::uint8_t lsb = r.data_byte(), msb = r.data_byte();
        ev.payload = PitchBendPayload{channel, lsb | (msb << 7)};
        break;
      }
      case 0xF0: {
        if (status == 0xF0 || status == 0xF7) {
          std::uint32_t len = r.vlq();
          ev.payload = SysExPayload{status, r.raw(len)};
        } else if (status == 0xFF) {
          std::uint8_t type = r.u8();
          std::uint32_t len = r.vlq();
          std::vector<std::uint8_t> data = r.raw(len);
          if (type == 0x2F) {
            ev.payload = EndOfTrackPayload{};
            out.push_back(std::move(ev));
            r.skip_to_end();  // chunk length governs; ignore trailing bytes
            return;
          } else if (type == 0x51 && len == 3) {
            ev.payload = TempoPayload{(static_cast<std::uint32_t>(data[0]) << 16) |
                                      (static_cast<std::uint32_t>(data[1]) << 8) | data[2]};
          } else if (type == 0x58 && len == 4) {
            ev.payload = TimeSignaturePayload{data[0], data[1], data[2], data[3]};
          } else if (type == 0x59 && len == 2) {
            ev.payload = KeySignaturePayload{static_cast<std::int8_t>(data[0]), data[1]};
          } else {
            ev.payload = OtherMetaPayload{type, std::move(data)};
          }
        } else {
          raise(Errc::MalformedEvent, "system common status byte in SMF track");
        }
        break;
      }
      default:
        raise(Errc::MalformedEvent, "unrecognized status byte");
    }
    out.push_back(std::move(ev));
  }
}

}  // namespace detail

inline MidiDocument parse_smf(std::span<const std::uint8_t> bytes) {
  using namespace detail;
  if (bytes.size() < 14 || bytes[0] != 'M' || bytes[1] != 'T' || bytes[2] != 'h' ||
      bytes[3] != 'd')
    raise(Errc::MalformedHeader, "missing MThd chunk signature");
  std::uint32_t header_len = be32(bytes, 4);
  if (header_len < 6 || bytes.size() < 8 + header_len)
    raise(Errc::MalformedHeader, "header chunk too short");
  int format = be16(bytes, 8);
  int declared_tracks = be16(bytes, 10);
  std::uint16_t division_raw = be16(bytes, 12);
  if (format == 2) raise(Errc::UnsupportedFormat, "format-2 SMF not supported");
  if (format != 0 && format != 1) raise(Errc::MalformedHeader, "unknown SMF format");
  if (division_raw & 0x8000)
    raise(Errc::SmpteDivisionUnsupported, "SMPTE time division not supported");
  if (division_raw == 0) raise(Errc::MalformedHeader, "zero time division");
  if (declared_tracks == 0) raise(Errc::MalformedHeader, "header declares zero tracks");

  MidiDocument doc;
  doc.header.format = format;
  doc.header.division = division_raw;

  std::size_t pos = 8 + header_len;
  int track = 0;
  while (pos + 8 <= bytes.size()) {
    bool is_mtrk = bytes[pos] == 'M' && bytes[pos + 1] == 'T' && bytes[pos + 2] == 'r' &&
                   bytes[pos + 3] == 'k';
    std::uint32_t chunk_len = be32(bytes, pos + 4);
    if (bytes.size() - pos - 8 < chunk_len) {
      if (is_mtrk) raise(Errc::TruncatedTrack, "track chunk longer than remaining file");
      break;  // truncated alien chunk: stop
    }
    if (is_mtrk) {
      ByteReader r(bytes, pos + 8, pos + 8 + chunk_len);
      parse_track(r, track, doc.events);
      ++track;
    }
    pos += 8 + chunk_len;
  }
  if (track == 0) raise(Errc::MalformedHeader, "no MTrk chunks found");
  doc.header.track_count = track;

  ExtractedNotes ex = extract_notes_detailed(doc.events);
  doc.notes = std::move(ex.notes);
  doc.dangling_notes = ex.dangling_count;
  return doc;
}

inline MidiDocument parse_smf(const std::vector<std::uint8_t>& bytes) {
  return parse_smf(std::span<const std::uint8_t>(bytes));
}

// ---------------------------------------------------------------------------
// Encoding

namespace detail {

inline void put_be16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}
inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}
inline void put_vlq(std::vector<std::uint8_t>& out, std::int64_t value) {
  if (value < 0 || value > 0x0FFFFFFF)
    raise(Errc::FieldOutOfRange, "delta time outside variable-length range");
  std::uint8_t buf[4];
  int n = 0;
  std::uint32_t v = static_cast<std::uint32_t>(value);
  do {
    buf[n++] = v & 0x7F;
    v >>= 7;
  } while (v != 0);
  for (int i = n - 1; i >= 0; --i)
    out.push_back(i == 0 ? buf[i] : static_cast<std::uint8_t>(buf[i] | 0x80));
}

inline std::uint8_t check7(int v, const char* what) {
  if (v < 0 || v > 127) raise(Errc::FieldOutOfRange, std::string(what) + " outside [0,127]");
  return static_cast<std::uint8_t>(v);
}

inline void encode_event(std::vector<std::uint8_t>& out, const MidiEvent& ev) {
  struct Visitor {
    std::vector<std::uint8_t>& out;
    void channel_status(std::uint8_t high, std::uint8_t channel) {
      if (channel > 15) raise(Errc::FieldOutOfRange, "channel outside [0,15]");
      out.push_back(static_cast<std::uint8_t>(high | channel));
    }
    void operator()(const NoteOnPayload& p) {
      channel_status(0x90, p.channel);
      out.push_back(check7(p.pitch, "pitch"));
      if (p.velocity == 0) raise(Errc::FieldOutOfRange, "NoteOn velocity must be >= 1");
      out.push_back(check7(p.velocity, "velocity"));
    }
    void operator()(const NoteOffPayload& p) {
      channel_status(0x80, p.channel);
      out.push_back(check7(p.pitch, "pitch"));
      out.push_back(check7(p.velocity, "velocity"));
    }
    void operator()(const PolyAftertouchPayload& p) {
      channel_status(0xA0, p.channel);
      out.push_back(check7(p.pitch, "pitch"));
      out.push_back(check7(p.value, "aftertouch value"));
    }
    void operator()(const ControlChangePayload& p) {
      channel_status(0xB0, p.channel);
      out.push_back(check7(p.controller, "controller"));
      out.push_back(check7(p.value, "controller value"));
    }
    void operator()(const ProgramChangePayload& p) {
      channel_status(0xC0, p.channel);
      out.push_back(check7(p.program, "program"));
    }
    void operator()(const ChannelAftertouchPayload& p) {
      channel_status(0xD0, p.channel);
      out.push_back(check7(p.value, "aftertouch value"));
    }
    void operator()(const PitchBendPayload& p) {
      channel_status(0xE0, p.channel);
      if (p.value < 0 || p.value > 16383)
        raise(Errc::FieldOutOfRange, "pitch bend outside [0,16383]");
      out.push_back(static_cast<std::uint8_t>(p.value & 0x7F));
      out.push_back(static_cast<std::uint8_t>((p.value >> 7) & 0x7F));
    }
    void operator()(const TempoPayload& p) {
      if (p.usec_per_quarter > 0xFFFFFF)
        raise(Errc::FieldOutOfRange, "tempo outside 24-bit range");
      out.insert(out.end(), {0xFF, 0x51, 0x03});
      out.push_back(static_cast<std::uint8_t>(p.usec_per_quarter >> 16));
      out.push_back(static_cast<std::uint8_t>((p.usec_per_quarter >> 8) & 0xFF));
      out.push_back(static_cast<std::uint8_t>(p.usec_per_quarter & 0xFF));
    }
    void operator()(const TimeSignaturePayload& p) {
      out.insert(out.end(), {0xFF, 0x58, 0x04, p.numerator, p.log2_denominator,
                             p.clocks_per_click, p.notated_32nds});
    }
    void operator()(const KeySignaturePayload& p) {
      if (p.sharps < -7 || p.sharps > 7)
        raise(Errc::FieldOutOfRange, "key signature outside [-7,7]");
      out.insert(out.end(), {0xFF, 0x59, 0x02, static_cast<std::uint8_t>(p.sharps), p.minor});
    }
    void operator()(const EndOfTrackPayload&) { out.insert(out.end(), {0xFF, 0x2F, 0x00}); }
    void operator()(const OtherMetaPayload& p) {
      out.push_back(0xFF);
      out.push_back(p.type);
      put_vlq(out, static_cast<std::int64_t>(p.data.size()));
      out.insert(out.end(), p.data.begin(), p.data.end());
    }
    void operator()(const SysExPayload& p) {
      if (p.status != 0xF0 && p.status != 0xF7)
        raise(Errc::FieldOutOfRange, "sysex status must be F0 or F7");
      out.push_back(p.status);
      put_vlq(out, static_cast<std::int64_t>(p.data.size()));
      out.insert(out.end(), p.data.begin(), p.data.end());
    }
  };
  std::visit(Visitor{out}, ev.payload);
}

}  // namespace detail

// Always writes format-1 output without running status. Tracks that lack a
// trailing EndOfTrack get one appended at their final tick; interior
// EndOfTrack events are dropped (bytes after them would be unreachable).
inline std::vector<std::uint8_t> encode_smf(const MidiDocument& doc) {
  using namespace detail;
  if (doc.header.division <= 0 || doc.header.division > 0x7FFF)
    raise(Errc::FieldOutOfRange, "division outside [1,32767]");

  int track_count = std::max(1, doc.header.track_count);
  for (const MidiEvent& ev : doc.events)
    track_count = std::max(track_count, ev.track + 1);

  std::vector<std::vector<const MidiEvent*>> per_track(track_count);
  for (const MidiEvent& ev : doc.events) {
    if (ev.track < 0) raise(Errc::FieldOutOfRange, "negative track index");
    per_track[ev.track].push_back(&ev);
  }

  std::vector<std::uint8_t> out;
  out.insert(out.end(), {'M', 'T', 'h', 'd'});
  put_be32(out, 6);
  put_be16(out, 1);
  put_be16(out, static_cast<std::uint16_t>(track_count));
  put_be16(out, static_cast<std::uint16_t>(doc.header.division));

  for (int t = 0; t < track_count; ++t) {
    std::vector<std::uint8_t> body;
    std::int64_t tick = 0;
    std::int64_t eot_tick = 0;
    for (const MidiEvent* ev : per_track[t]) {
      if (ev->tick < tick)
        raise(Errc::InvalidArgument, "events within a track must have nondecreasing ticks");
      eot_tick = std::max(eot_tick, ev->tick);
      if (ev->kind() == MidiEventKind::EndOfTrack) continue;
      put_vlq(body, ev->tick - tick);
      tick = ev->tick;
      encode_event(body, *ev);
    }
    put_vlq(body, eot_tick - tick);
    body.insert(body.end(), {0xFF, 0x2F, 0x00});

    out.insert(out.end(), {'M', 'T', 'r', 'k'});
    put_be32(out, static_cast<std::uint32_t>(body.size()));
    out.insert(out.end(), body.begin(), body.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Event equivalence: same (tick, kind, payload) multiset per track.

inline bool event_equivalent(const MidiDocument& a, const MidiDocument& b) {
  auto canonical = [](const MidiDocument& doc) {
    std::map<int, std::vector<MidiEvent>> tracks;
    for (const MidiEvent& ev : doc.events) tracks[ev.track].push_back(ev);
    for (auto& [t, evs] : tracks)
      std::sort(evs.begin(), evs.end());
    return tracks;
  };
  return canonical(a) == canonical(b);
}

}  // namespace fmd
