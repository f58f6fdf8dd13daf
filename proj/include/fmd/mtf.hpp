#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fmd/errors.hpp"
#include "fmd/midi.hpp"

// MTF v1: a line-oriented lossless text form of a MIDI event stream.
//
//   header    "MTF v1 division=<D> format=<F>"
//   body      one line per event: "<tick> <track> <KIND> <field>=<value>..."
//             fields in a fixed order per kind, single spaces, LF endings
//   order     document order: track-major, tick nondecreasing within a track
//
// Opaque payloads (unknown meta, sysex) are lowercase hex. The exact grammar
// is documented in docs/FORMATS.md; decode(encode(doc)) reproduces the event
// stream exactly.

namespace fmd {

namespace detail {

inline void append_hex(std::string& out, const std::vector<std::uint8_t>& data) {
  static const char* digits = "0123456789abcdef";
  for (std::uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0F]);
  }
}

inline std::vector<std::uint8_t> parse_hex(std::string_view s, int line_no) {
  if (s.size() % 2 != 0)
    raise(Errc::MalformedLine, "odd-length hex payload at line " + std::to_string(line_no));
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    raise(Errc::MalformedLine, "invalid hex digit at line " + std::to_string(line_no));
  };
  std::vector<std::uint8_t> out(s.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>((nibble(s[2 * i]) << 4) | nibble(s[2 * i + 1]));
  return out;
}

}  // namespace detail

inline std::string encode_mtf(const MidiDocument& doc) {
  std::string out = "MTF v1 division=" + std::to_string(doc.header.division) +
                    " format=" + std::to_string(doc.header.format) + "\n";
  const std::vector<MidiEvent>* events = &doc.events;
  std::vector<MidiEvent> canonical_empty;
  if (events->empty()) {
    canonical_empty.push_back(MidiEvent{0, 0, EndOfTrackPayload{}});
    events = &canonical_empty;
  }
  for (const MidiEvent& ev : *events) {
    out += std::to_string(ev.tick);
    out += ' ';
    out += std::to_string(ev.track);
    out += ' ';
    out += midi_kind_name(ev.kind());
    struct Visitor {
      std::string& out;
      void field(const char* name, std::int64_t v) {
        out += ' ';
        out += name;
        out += '=';
        out += std::to_string(v);
      }
      void operator()(const NoteOnPayload& p) {
        field("ch", p.channel);
        field("pitch", p.pitch);
        field("vel", p.velocity);
      }
      void operator()(const NoteOffPayload& p) {
        field("ch", p.channel);
        field("pitch", p.pitch);
        field("vel", p.velocity);
      }
      void operator()(const PolyAftertouchPayload& p) {
        field("ch", p.channel);
        field("pitch", p.pitch);
        field("value", p.value);
      }
      void operator()(const ControlChangePayload& p) {
        field("ch", p.channel);
        field("controller", p.controller);
        field("value", p.value);
      }
      void operator()(const ProgramChangePayload& p) {
        field("ch", p.channel);
        field("program", p.program);
      }
      void operator()(const ChannelAftertouchPayload& p) {
        field("ch", p.channel);
        field("value", p.value);
      }
      void operator()(const PitchBendPayload& p) {
        field("ch", p.channel);
        field("value", p.value);
      }
      void operator()(const TempoPayload& p) { field("usec_per_quarter", p.usec_per_quarter); }
      void operator()(const TimeSignaturePayload& p) {
        field("numerator", p.numerator);
        field("log2_denominator", p.log2_denominator);
        field("clocks_per_click", p.clocks_per_click);
        field("notated_32nds", p.notated_32nds);
      }
      void operator()(const KeySignaturePayload& p) {
        field("sharps", p.sharps);
        field("minor", p.minor);
      }
      void operator()(const EndOfTrackPayload&) {}
      void operator()(const OtherMetaPayload& p) {
        field("type", p.type);
        out += " data=";
        detail::append_hex(out, p.data);
      }
      void operator()(const SysExPayload& p) {
        out += " status=";
        out += (p.status == 0xF0) ? "f0" : "f7";
        out += " data=";
        detail::append_hex(out, p.data);
      }
    };
    std::visit(Visitor{out}, ev.payload);
    out += '\n';
  }
  return out;
}

namespace detail {

class LineFields {
 public:
  LineFields(std::string_view line, int line_no) : rest_(line), line_no_(line_no) {}

  std::string_view next_token() {
    while (!rest_.empty() && rest_.front() == ' ') rest_.remove_prefix(1);
    if (rest_.empty())
      raise(Errc::MalformedLine, "missing token at line " + std::to_string(line_no_));
    std::size_t sp = rest_.find(' ');
    std::string_view tok = rest_.substr(0, sp);
    rest_ = (sp == std::string_view::npos) ? std::string_view{} : rest_.substr(sp + 1);
    return tok;
  }

  bool empty() {
    while (!rest_.empty() && rest_.front() == ' ') rest_.remove_prefix(1);
    return rest_.empty();
  }

  std::int64_t int_token() { return to_int(next_token()); }

  // "name=value" with the expected name, integer value.
  std::int64_t named(std::string_view name) { return to_int(named_raw(name)); }

  std::string_view named_raw(std::string_view name) {
    std::string_view tok = next_token();
    std::size_t eq = tok.find('=');
    if (eq == std::string_view::npos || tok.substr(0, eq) != name)
      raise(Errc::MalformedLine, "expected field '" + std::string(name) + "' at line " +
                                     std::to_string(line_no_));
    return tok.substr(eq + 1);
  }

  std::int64_t to_int(std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      raise(Errc::MalformedLine, "invalid integer at line " + std::to_string(line_no_));
    return v;
  }

  int line_no() const { return line_no_; }

 private:
  std::string_view rest_;
  int line_no_;
};

inline std::uint8_t ranged_u8(std::int64_t v, std::int64_t lo, std::int64_t hi, const char* what) {
  if (v < lo || v > hi)
    raise(Errc::FieldOutOfRange, std::string(what) + " outside [" + std::to_string(lo) + "," +
                                     std::to_string(hi) + "]");
  return static_cast<std::uint8_t>(v);
}

}  // namespace detail

inline MidiDocument decode_mtf(std::string_view text) {
  using namespace detail;
  std::size_t eol = text.find('\n');
  std::string_view header = text.substr(0, eol);
  if (!header.starts_with("MTF "))
    raise(Errc::MalformedLine, "missing MTF header line");
  {
    LineFields hf(header.substr(4), 1);
    std::string_view version = hf.next_token();
    if (version != "v1")
      raise(Errc::UnsupportedVersion, "unsupported MTF version '" + std::string(version) + "'");
    std::int64_t division = hf.named("division");
    std::int64_t format = hf.named("format");
    if (division <= 0 || division > 0x7FFF)
      raise(Errc::FieldOutOfRange, "division outside [1,32767]");
    if (format != 0 && format != 1) raise(Errc::FieldOutOfRange, "format must be 0 or 1");
    MidiDocument doc;
    doc.header.division = static_cast<int>(division);
    doc.header.format = static_cast<int>(format);

    std::vector<std::int64_t> last_tick;  // per track, for the order invariant
    int line_no = 1;
    std::size_t pos = (eol == std::string_view::npos) ? text.size() : eol + 1;
    while (pos < text.size()) {
      ++line_no;
      std::size_t end = text.find('\n', pos);
      std::string_view line =
          text.substr(pos, (end == std::string_view::npos) ? std::string_view::npos : end - pos);
      pos = (end == std::string_view::npos) ? text.size() : end + 1;
      if (line.empty()) continue;

      LineFields f(line, line_no);
      MidiEvent ev;
      ev.tick = f.int_token();
      std::int64_t track = f.int_token();
      if (ev.tick < 0) raise(Errc::FieldOutOfRange, "negative tick");
      if (track < 0 || track > 0xFFFF) raise(Errc::FieldOutOfRange, "track outside [0,65535]");
      ev.track = static_cast<int>(track);
      std::string_view kind = f.next_token();

      if (kind == "NOTE_ON") {
        std::uint8_t ch = ranged_u8(f.named("ch"), 0, 15, "ch");
        std::uint8_t pitch = ranged_u8(f.named("pitch"), 0, 127, "pitch");
        std::uint8_t vel = ranged_u8(f.named("vel"), 1, 127, "NoteOn vel");
        ev.payload = NoteOnPayload{ch, pitch, vel};
      } else if (kind == "NOTE_OFF") {
        std::uint8_t ch = ranged_u8(f.named("ch"), 0, 15, "ch");
        std::uint8_t pitch = ranged_u8(f.named("pitch"), 0, 127, "pitch");
        std::uint8_t vel = ranged_u8(f.named("vel"), 0, 127, "vel");
        ev.payload = NoteOffPayload{ch, pitch, vel};
      } else if (kind == "POLY_AFTERTOUCH") {
        std::uint8_t ch = ranged_u8(f.named("ch"), 0, 15, "ch");
        std::uint8_t pitch = ranged_u8(f.named("pitch"), 0, 127, "pitch");
        std::uint8_t value = ranged_u8(f.named("value"), 0, 127, "value");
        ev.payload = PolyAftertouchPayload{ch, pitch, value};
      } else if (kind == "CONTROL_CHANGE") {
        std::uint8_t ch = ranged_u8(f.named("ch"), 0, 15, "ch");
        std::uint8_t controller = ranged_u8(f.named("controller"), 0, 127, "controller");
        std::uint8_t value = ranged_u8(f.named("value"), 0, 127, "value");
        ev.payload = ControlChangePayload{ch, controller, value};
      } else if (kind == "PROGRAM_CHANGE") {
        std::uint8_t ch = ranged_u8(f.named("ch"), 0, 15, "ch");
        std::uint8_t program = ranged_u8(f.named("program"), 0, 127, "program");
        ev.payload = ProgramChangePayload{ch, program};
      } else if (kind == "CHANNEL_AFTERTOUCH") {
        std::uint8_t ch = ranged_u8(f.named("ch"), 0, 15, "ch");
        std::uint8_t value = ranged_u8(f.named("value"), 0, 127, "value");
        ev.payload = ChannelAftertouchPayload{ch, value};
      } else if (kind == "PITCH_BEND") {
        std::uint8_t ch = ranged_u8(f.named("ch"), 0, 15, "ch");
        std::int64_t value = f.named("value");
        if (value < 0 || value > 16383) raise(Errc::FieldOutOfRange, "pitch bend value");
        ev.payload = PitchBendPayload{ch, static_cast<int>(value)};
      } else if (kind == "TEMPO") {
        std::int64_t v = f.named("usec_per_quarter");
        if (v < 0 || v > 0xFFFFFF) raise(Errc::FieldOutOfRange, "tempo outside 24-bit range");
        ev.payload = TempoPayload{static_cast<std::uint32_t>(v)};
      } else if (kind == "TIME_SIGNATURE") {
        std::uint8_t nn = ranged_u8(f.named("numerator"), 0, 255, "numerator");
        std::uint8_t dd = ranged_u8(f.named("log2_denominator"), 0, 255, "log2_denominator");
        std::uint8_t cc = ranged_u8(f.named("clocks_per_click"), 0, 255, "clocks_per_click");
        std::uint8_t bb = ranged_u8(f.named("notated_32nds"), 0, 255, "notated_32nds");
        ev.payload = TimeSignaturePayload{nn, dd, cc, bb};
      } else if (kind == "KEY_SIGNATURE") {
        std::int64_t sharps = f.named("sharps");
        if (sharps < -7 || sharps > 7) raise(Errc::FieldOutOfRange, "sharps outside [-7,7]");
        std::uint8_t minor = ranged_u8(f.named("minor"), 0, 255, "minor");
        ev.payload = KeySignaturePayload{static_cast<std::int8_t>(sharps), minor};
      } else if (kind == "END_OF_TRACK") {
        ev.payload = EndOfTrackPayload{};
      } else if (kind == "META") {
        std::uint8_t type = ranged_u8(f.named("type"), 0, 255, "meta type");
        ev.payload = OtherMetaPayload{type, parse_hex(f.named_raw("data"), line_no)};
      } else if (kind == "SYSEX") {
        std::string_view status = f.named_raw("status");
        if (status != "f0" && status != "f7")
          raise(Errc::MalformedLine, "sysex status must be f0 or f7, line " +
                                         std::to_string(line_no));
        std::uint8_t st = (status == "f0") ? 0xF0 : 0xF7;
        ev.payload = SysExPayload{st, parse_hex(f.named_raw("data"), line_no)};
      } else {
        raise(Errc::MalformedLine,
              "unknown event kind '" + std::string(kind) + "' at line " + std::to_string(line_no));
      }
      if (!f.empty())
        raise(Errc::MalformedLine, "trailing tokens at line " + std::to_string(line_no));

      if (!doc.events.empty() && ev.track < doc.events.back().track)
        raise(Errc::MalformedLine,
              "body must be track-major ordered, line " + std::to_string(line_no));
      if (static_cast<std::size_t>(ev.track) >= last_tick.size())
        last_tick.resize(ev.track + 1, -1);
      if (ev.tick < last_tick[ev.track])
        raise(Errc::MalformedLine,
              "tick decreases within track at line " + std::to_string(line_no));
      last_tick[ev.track] = ev.tick;
      doc.events.push_back(std::move(ev));
    }

    if (doc.events.empty()) raise(Errc::MalformedLine, "MTF body contains no events");
    int max_track = 0;
    for (const MidiEvent& ev : doc.events) max_track = std::max(max_track, ev.track);
    doc.header.track_count = max_track + 1;

    ExtractedNotes ex = extract_notes_detailed(doc.events);
    doc.notes = std::move(ex.notes);
    doc.dangling_notes = ex.dangling_count;
    return doc;
  }
}

}  // namespace fmd
