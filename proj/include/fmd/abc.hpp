#pragma once

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fmd/errors.hpp"
#include "fmd/song.hpp"

namespace fmd {

// An ABC tune: information fields from X: through the key field K:, then raw
// music-code body lines. Loading requires an X: field, a K: field and a
// non-empty body; anything else is skipped by the tunebook splitter.
struct AbcTune {
  std::vector<std::pair<char, std::string>> header_fields;  // (letter, value after ':')
  std::vector<std::string> body_lines;
  std::string source_id;

  bool has_field(char letter) const {
    for (const auto& [l, v] : header_fields)
      if (l == letter) return true;
    return false;
  }
  const std::string* field(char letter) const {
    for (const auto& [l, v] : header_fields)
      if (l == letter) return &v;
    return nullptr;
  }
};

struct TunebookSplit {
  std::vector<AbcTune> tunes;
  int skipped_count = 0;  // segments missing K: or with an empty body
};

namespace detail {

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::string_view lstrip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

// "X:..." information field after optional leading whitespace; returns the
// letter, or 0 if the line is not a field line.
inline char field_letter(std::string_view line) {
  std::string_view s = lstrip(line);
  if (s.size() >= 2 && s[1] == ':' && std::isalpha(static_cast<unsigned char>(s[0])))
    return s[0];
  return 0;
}

inline std::string field_value(std::string_view line) {
  std::string_view s = lstrip(line);
  return std::string(s.substr(2));
}

inline bool is_comment(std::string_view line) { return lstrip(line).starts_with("%"); }
inline bool is_blank(std::string_view line) { return lstrip(line).empty(); }

}  // namespace detail

// Splits a tunebook into tunes delimited by X: fields. Header fields run
// through the first K:; everything after it up to the next blank line or X:
// is body. Comment lines and blank segments are dropped; malformed segments
// (no K:, empty body) are counted, not fatal.
inline TunebookSplit split_tunebook(std::string_view text, std::string_view origin = "") {
  using namespace detail;
  TunebookSplit out;

  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      if (pos < text.size()) lines.push_back(strip_cr(text.substr(pos)));
      break;
    }
    lines.push_back(strip_cr(text.substr(pos, end - pos)));
    pos = end + 1;
  }

  int segment_ordinal = 0;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (field_letter(lines[i]) != 'X') {
      ++i;
      continue;
    }
    ++segment_ordinal;
    AbcTune tune;
    if (origin.empty())
      tune.source_id = std::to_string(segment_ordinal);
    else
      tune.source_id = std::string(origin) + "#" + std::to_string(segment_ordinal);
    tune.header_fields.emplace_back('X', field_value(lines[i]));
    ++i;

    bool seen_key = false;
    bool ended = false;
    for (; i < lines.size() && !ended; ++i) {
      std::string_view line = lines[i];
      if (field_letter(line) == 'X') break;  // next tune
      if (is_comment(line)) continue;
      if (is_blank(line)) {
        if (seen_key && !tune.body_lines.empty()) ended = true;
        continue;  // blank lines inside the header are tolerated
      }
      if (!seen_key) {
        char letter = field_letter(line);
        if (letter != 0) {
          tune.header_fields.emplace_back(letter, field_value(line));
          if (letter == 'K') seen_key = true;
        }
        // non-field text before K: is discarded
      } else if (tune.body_lines.empty() && field_letter(line) == 'V') {
        // a voice declaration directly after K: belongs to the header
        tune.header_fields.emplace_back('V', field_value(line));
      } else {
        tune.body_lines.emplace_back(line);
      }
    }
    if (ended) {
      // skip trailing free text until the next X:
      while (i < lines.size() && field_letter(lines[i]) != 'X') ++i;
    }

    if (seen_key && !tune.body_lines.empty())
      out.tunes.push_back(std::move(tune));
    else
      ++out.skipped_count;
  }
  return out;
}

// The paper's retained ABC cleanup: strip leading spaces/tabs from every
// line, and if the tune declares no voice anywhere, insert "V:1" right after
// the K: header field. Idempotent.
inline AbcTune clean_abc(const AbcTune& tune) {
  using namespace detail;
  AbcTune out;
  out.source_id = tune.source_id;
  out.header_fields = tune.header_fields;

  bool has_voice = tune.has_field('V');
  for (const std::string& line : tune.body_lines) {
    std::string_view stripped = lstrip(line);
    if (stripped.starts_with("V:") || stripped.starts_with("[V:")) has_voice = true;
    out.body_lines.emplace_back(stripped);
  }
  if (!has_voice) {
    for (std::size_t i = 0; i < out.header_fields.size(); ++i) {
      if (out.header_fields[i].first == 'K') {
        out.header_fields.insert(out.header_fields.begin() + i + 1, {'V', "1"});
        break;
      }
    }
  }
  return out;
}

inline std::string render_tune(const AbcTune& tune) {
  std::string out;
  for (const auto& [letter, value] : tune.header_fields) {
    out += letter;
    out += ':';
    out += value;
    out += '\n';
  }
  for (const std::string& line : tune.body_lines) {
    out += line;
    out += '\n';
  }
  return out;
}

// Canonical joiner: one blank line between tunes, LF endings.
inline std::string join_tunebook(const std::vector<AbcTune>& tunes) {
  std::string out;
  for (std::size_t i = 0; i < tunes.size(); ++i) {
    if (i > 0) out += '\n';
    out += render_tune(tunes[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Minimal note interpreter for the built-in embedder. Understands: diatonic
// pitch from K: (major plus the common mode names), accidentals persisting to
// the end of the bar, octave marks, L: unit length with multipliers and
// divisors, rests, chords, broken rhythm, simple tuplets, and inline [K:]/
// [L:] changes. Everything else (grace notes, decorations, chord symbols,
// lyrics) is skipped. The exact rules live in docs/FORMATS.md.

namespace detail {

// Fifths position of each natural letter in the major circle (C=0, G=1, ...).
inline int letter_fifths(char letter) {
  switch (letter) {
    case 'C': return 0;
    case 'D': return 2;
    case 'E': return 4;
    case 'F': return -1;
    case 'G': return 1;
    case 'A': return 3;
    case 'B': return 5;
  }
  return 0;
}

inline int letter_semitone(char letter) {
  switch (letter) {
    case 'C': return 0;
    case 'D': return 2;
    case 'E': return 4;
    case 'F': return 5;
    case 'G': return 7;
    case 'A': return 9;
    case 'B': return 11;
  }
  return 0;
}

// Per-letter alteration implied by a key signature with `sf` sharps (or
// flats when negative).
inline std::map<char, int> key_accidentals(int sf) {
  static const char sharp_order[] = {'F', 'C', 'G', 'D', 'A', 'E', 'B'};
  static const char flat_order[] = {'B', 'E', 'A', 'D', 'G', 'C', 'F'};
  std::map<char, int> acc;
  if (sf > 0)
    for (int i = 0; i < sf && i < 7; ++i) acc[sharp_order[i]] = 1;
  else if (sf < 0)
    for (int i = 0; i < -sf && i < 7; ++i) acc[flat_order[i]] = -1;
  return acc;
}

// Parses a K: value ("D", "Gm", "A mix", "Edor", "none") into a sharps/flats
// count. Unrecognized keys fall back to C major.
inline int parse_key_sf(std::string_view value) {
  std::string_view s = lstrip(value);
  if (s.empty()) return 0;
  {
    std::string lower;
    for (char c : s.substr(0, 4)) lower += static_cast<char>(std::tolower((unsigned char)c));
    if (lower.starts_with("none")) return 0;
  }
  char tonic = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  if (tonic < 'A' || tonic > 'G') return 0;
  s.remove_prefix(1);
  int fifths = letter_fifths(tonic);
  if (!s.empty() && (s.front() == '#' || s.front() == 'b')) {
    fifths += (s.front() == '#') ? 7 : -7;
    s.remove_prefix(1);
  }
  // mode: first word, first three letters, case-insensitive
  std::string mode;
  for (char c : s) {
    if (std::isalpha(static_cast<unsigned char>(c)))
      mode += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!mode.empty())
      break;
    if (mode.size() == 3) break;
  }
  int shift = 0;
  if (mode.empty() || mode.starts_with("maj") || mode.starts_with("ion")) shift = 0;
  else if (mode.starts_with("mix")) shift = -1;
  else if (mode.starts_with("dor")) shift = -2;
  else if (mode == "m" || mode.starts_with("min") || mode.starts_with("aeo")) shift = -3;
  else if (mode.starts_with("phr")) shift = -4;
  else if (mode.starts_with("loc")) shift = -5;
  else if (mode.starts_with("lyd")) shift = 1;
  int sf = fifths + shift;
  if (sf > 7) sf = 7;
  if (sf < -7) sf = -7;
  return sf;
}

// Parses an L: value like "1/8" into quarter notes (1/8 -> 0.5).
inline double parse_unit_length_q(std::string_view value) {
  std::string_view s = lstrip(value);
  std::int64_t num = 0, den = 1;
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
    num = num * 10 + (s[i++] - '0');
  if (i < s.size() && s[i] == '/') {
    ++i;
    den = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
      den = den * 10 + (s[i++] - '0');
    if (den == 0) den = 2;
  }
  if (num == 0) return 0.5;  // unparseable: fall back to 1/8
  return 4.0 * static_cast<double>(num) / static_cast<double>(den);
}

struct AbcParseState {
  std::map<char, int> key_acc;                // letter -> alteration from K:
  std::map<std::pair<char, int>, int> bar_acc;  // (letter, octave) -> explicit accidental
  double unit_q = 0.5;                        // L: in quarters
  double onset_q = 0.0;
  int tuplet_remaining = 0;
  double tuplet_factor = 1.0;
  double broken_factor = 1.0;  // applied to the next note, from > or <
};

}  // namespace detail

inline std::vector<SongNote> abc_to_notes(const AbcTune& tune) {
  using namespace detail;
  AbcParseState st;
  if (const std::string* k = tune.field('K')) st.key_acc = key_accidentals(parse_key_sf(*k));
  if (const std::string* l = tune.field('L')) st.unit_q = parse_unit_length_q(*l);

  std::vector<SongNote> notes;

  auto apply_inline_field = [&](std::string_view content) {
    if (content.starts_with("K:")) st.key_acc = key_accidentals(parse_key_sf(content.substr(2)));
    else if (content.starts_with("L:")) st.unit_q = parse_unit_length_q(content.substr(2));
  };

  // Duration suffix at s[i]: digits, then optional /, optional digits; each
  // extra '/' halves again ("A//" == A/4).
  auto read_length = [&](std::string_view s, std::size_t& i) -> double {
    double mult = 1.0;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      std::int64_t v = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        v = v * 10 + (s[i++] - '0');
      mult = static_cast<double>(v);
    }
    while (i < s.size() && s[i] == '/') {
      ++i;
      if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        std::int64_t v = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
          v = v * 10 + (s[i++] - '0');
        if (v != 0) mult /= static_cast<double>(v);
      } else {
        mult /= 2.0;
      }
    }
    return mult;
  };

  // One note starting at s[i] (accidental, letter, octave marks, length).
  // Returns false if s[i] does not start a note.
  auto read_note = [&](std::string_view s, std::size_t& i, SongNote& out) -> bool {
    std::size_t j = i;
    int explicit_acc = 0;
    bool has_explicit = false;
    while (j < s.size() && (s[j] == '^' || s[j] == '_' || s[j] == '=')) {
      has_explicit = true;
      if (s[j] == '^') ++explicit_acc;
      else if (s[j] == '_') --explicit_acc;
      ++j;
    }
    if (j >= s.size()) return false;
    char c = s[j];
    if (!((c >= 'A' && c <= 'G') || (c >= 'a' && c <= 'g'))) return false;
    ++j;
    char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    int octave = (c >= 'a') ? 1 : 0;
    while (j < s.size() && (s[j] == '\'' || s[j] == ',')) {
      octave += (s[j] == '\'') ? 1 : -1;
      ++j;
    }
    double mult = read_length(s, j);

    int alteration;
    auto key = std::make_pair(letter, octave);
    if (has_explicit) {
      st.bar_acc[key] = explicit_acc;
      alteration = explicit_acc;
    } else if (auto it = st.bar_acc.find(key); it != st.bar_acc.end()) {
      alteration = it->second;
    } else if (auto it = st.key_acc.find(letter); it != st.key_acc.end()) {
      alteration = it->second;
    } else {
      alteration = 0;
    }

    int pitch = 60 + 12 * octave + letter_semitone(letter) + alteration;
    if (pitch < 0) pitch = 0;
    if (pitch > 127) pitch = 127;

    double dur = st.unit_q * mult;
    out = SongNote{pitch, 64, st.onset_q, dur};
    i = j;
    return true;
  };

  auto consume_note_modifiers = [&](double& dur) {
    if (st.tuplet_remaining > 0) {
      dur *= st.tuplet_factor;
      --st.tuplet_remaining;
    }
    dur *= st.broken_factor;
    st.broken_factor = 1.0;
  };

  for (const std::string& raw_line : tune.body_lines) {
    std::string_view line = lstrip(raw_line);
    if (line.empty() || line.starts_with("%")) continue;
    char fl = field_letter(line);
    if (fl != 0) {
      // whole-line field inside the body
      if (fl == 'K') st.key_acc = key_accidentals(parse_key_sf(field_value(line)));
      else if (fl == 'L') st.unit_q = parse_unit_length_q(field_value(line));
      continue;  // w:, V:, M:, etc. carry no notes
    }

    std::size_t i = 0;
    while (i < line.size()) {
      char c = line[i];
      if (c == '|' || c == ':') {  // bar lines and repeats reset accidentals
        st.bar_acc.clear();
        ++i;
        continue;
      }
      if (c == '[') {
        if (i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1]))) {
          i += 2;  // repeat ending "[1"
          continue;
        }
        if (i + 1 < line.size() && line[i + 1] == '|') {
          ++i;  // "[|" bar line
          continue;
        }
        std::size_t close = line.find(']', i + 1);
        if (close == std::string_view::npos) {
          ++i;  // stray bracket
          continue;
        }
        if (i + 2 < line.size() && line[i + 2] == ':' &&
            std::isalpha(static_cast<unsigned char>(line[i + 1]))) {
          apply_inline_field(line.substr(i + 1, close - i - 1));
          i = close + 1;
          continue;
        }
        // chord: members share one onset; onset advances by the longest member
        ++i;
        std::vector<std::size_t> member_indices;
        while (i < line.size() && line[i] != ']') {
          SongNote n;
          if (read_note(line, i, n)) {
            member_indices.push_back(notes.size());
            notes.push_back(n);
          } else {
            ++i;
          }
        }
        if (i < line.size()) ++i;  // closing bracket
        double factor = read_length(line, i);
        if (st.tuplet_remaining > 0) {
          factor *= st.tuplet_factor;
          --st.tuplet_remaining;
        }
        factor *= st.broken_factor;
        st.broken_factor = 1.0;
        double chord_dur = 0.0;
        for (std::size_t idx : member_indices) {
          notes[idx].duration_q *= factor;
          chord_dur = std::max(chord_dur, notes[idx].duration_q);
        }
        st.onset_q += chord_dur;
        continue;
      }
      if (c == ']') {
        ++i;
        continue;
      }
      if (c == 'z' || c == 'x' || c == 'Z' || c == 'X') {
        ++i;
        double mult = read_length(line, i);
        double dur = st.unit_q * mult;
        consume_note_modifiers(dur);
        st.onset_q += dur;
        continue;
      }
      if (c == '(') {
        if (i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1]))) {
          int p = line[i + 1] - '0';
          i += 2;
          int q = (p == 2 || p == 4 || p == 8) ? 3 : 2;
          int r = p;
          // (p:q:r variants
          if (i < line.size() && line[i] == ':') {
            ++i;
            if (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])))
              q = line[i++] - '0';
            if (i < line.size() && line[i] == ':') {
              ++i;
              if (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])))
                r = line[i++] - '0';
            }
          }
          if (p > 0) {
            st.tuplet_remaining = r;
            st.tuplet_factor = static_cast<double>(q) / static_cast<double>(p);
          }
          continue;
        }
        ++i;  // slur open
        continue;
      }
      if (c == '>' || c == '<') {
        // dotted pair: previous note grows, next shrinks (or vice versa)
        double grow = 1.5, shrink = 0.5;
        if (!notes.empty()) {
          SongNote& prev = notes.back();
          double delta = (c == '>') ? prev.duration_q * (grow - 1.0)
                                    : prev.duration_q * (shrink - 1.0);
          prev.duration_q += delta;
          st.onset_q += delta;
        }
        st.broken_factor = (c == '>') ? shrink : grow;
        ++i;
        continue;
      }
      if (c == '"') {  // chord symbol
        std::size_t close = line.find('"', i + 1);
        i = (close == std::string_view::npos) ? line.size() : close + 1;
        continue;
      }
      if (c == '!') {  // decoration
        std::size_t close = line.find('!', i + 1);
        i = (close == std::string_view::npos) ? line.size() : close + 1;
        continue;
      }
      if (c == '{') {  // grace notes
        std::size_t close = line.find('}', i + 1);
        i = (close == std::string_view::npos) ? line.size() : close + 1;
        continue;
      }
      SongNote note;
      if (read_note(line, i, note)) {
        double dur = note.duration_q;
        consume_note_modifiers(dur);
        note.duration_q = dur;
        note.onset_q = st.onset_q;
        notes.push_back(note);
        st.onset_q += dur;
        continue;
      }
      ++i;  // anything else: ties, slurs, spaces, decorations shorthand
    }
    st.bar_acc.clear();  // line break acts as a bar boundary for accidentals
  }
  return notes;
}

}  // namespace fmd
