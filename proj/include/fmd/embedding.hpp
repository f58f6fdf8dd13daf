#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fmd/abc.hpp"
#include "fmd/corpus.hpp"
#include "fmd/errors.hpp"
#include "fmd/midi.hpp"
#include "fmd/song.hpp"

namespace fmd {

// N x d matrix of per-song embedding vectors, rows keyed by unique song ids.
struct EmbeddingMatrix {
  std::vector<std::string> song_ids;
  Eigen::MatrixXd values;  // one row per song

  int dim() const { return static_cast<int>(values.cols()); }
  std::int64_t size() const { return static_cast<std::int64_t>(values.rows()); }

  void validate() const {
    if (static_cast<std::int64_t>(song_ids.size()) != size())
      raise(Errc::InvalidArgument, "song id count does not match row count");
    if (!values.allFinite()) raise(Errc::NonFiniteValue, "embedding matrix has NaN/Inf entries");
    std::vector<std::string> sorted = song_ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      raise(Errc::DuplicateSongId, "duplicate song id in embedding matrix");
  }
};

enum class EmbedderKind { BuiltinFeatures, ExternalFile };

struct EmbedderSpec {
  EmbedderKind kind = EmbedderKind::BuiltinFeatures;
  std::string version = "1";
  bool include_velocity = false;  // builtin only; appends velocity mean/std

  int dim() const { return include_velocity ? 50 : 48; }
  auto operator<=>(const EmbedderSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Built-in deterministic feature embedder.
//
// 48-dim layout (all components in [0,1]):
//   [0..11]   pitch-class histogram, L1-normalized
//   [12..36]  melodic-interval histogram over consecutive notes in list
//             order, intervals clamped to [-12,+12] (bin = interval + 12),
//             L1-normalized; all-zero when the song has < 2 notes
//   [37..43]  duration histogram, log2 bins in quarter notes:
//             <1/8, [1/8,1/4), [1/4,1/2), [1/2,1), [1,2), [2,4), >=4
//   [44]      pitch mean / 127
//   [45]      pitch population std / 127
//   [46]      note density (notes per quarter over the song span) / 16,
//             clamped to [0,1]
//   [47]      mean polyphony (total sounding time / span) / 8, clamped
// With include_velocity, two more:
//   [48]      velocity mean / 127
//   [49]      velocity population std / 127
// Velocity does not enter any of the first 48 components.

inline Eigen::VectorXd embed_builtin(const std::vector<SongNote>& notes,
                                     const EmbedderSpec& spec = {}) {
  if (notes.empty()) raise(Errc::EmptySong, "cannot embed a song with zero notes");
  const std::size_t n = notes.size();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(spec.dim());

  for (const SongNote& note : notes) v[note.pitch % 12] += 1.0;
  v.segment(0, 12) /= static_cast<double>(n);

  if (n >= 2) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      int interval = notes[i + 1].pitch - notes[i].pitch;
      interval = std::clamp(interval, -12, 12);
      v[12 + interval + 12] += 1.0;
    }
    v.segment(12, 25) /= static_cast<double>(n - 1);
  }

  for (const SongNote& note : notes) {
    double d = note.duration_q;
    int bin = d < 0.125 ? 0
              : d < 0.25 ? 1
              : d < 0.5  ? 2
              : d < 1.0  ? 3
              : d < 2.0  ? 4
              : d < 4.0  ? 5
                         : 6;
    v[37 + bin] += 1.0;
  }
  v.segment(37, 7) /= static_cast<double>(n);

  double pitch_mean = 0.0, pitch_sq = 0.0;
  double first_onset = notes.front().onset_q, last_end = 0.0, sounding = 0.0;
  for (const SongNote& note : notes) {
    pitch_mean += note.pitch;
    pitch_sq += static_cast<double>(note.pitch) * note.pitch;
    first_onset = std::min(first_onset, note.onset_q);
    last_end = std::max(last_end, note.onset_q + note.duration_q);
    sounding += note.duration_q;
  }
  pitch_mean /= static_cast<double>(n);
  double pitch_var = std::max(0.0, pitch_sq / static_cast<double>(n) - pitch_mean * pitch_mean);
  v[44] = pitch_mean / 127.0;
  v[45] = std::sqrt(pitch_var) / 127.0;

  // span of at least one quarter so single-note songs stay defined
  double span = std::max(1.0, last_end - first_onset);
  v[46] = std::clamp(static_cast<double>(n) / span / 16.0, 0.0, 1.0);
  v[47] = std::clamp(sounding / span / 8.0, 0.0, 1.0);

  if (spec.include_velocity) {
    double vel_mean = 0.0, vel_sq = 0.0;
    for (const SongNote& note : notes) {
      vel_mean += note.velocity;
      vel_sq += static_cast<double>(note.velocity) * note.velocity;
    }
    vel_mean /= static_cast<double>(n);
    double vel_var = std::max(0.0, vel_sq / static_cast<double>(n) - vel_mean * vel_mean);
    v[48] = vel_mean / 127.0;
    v[49] = std::sqrt(vel_var) / 127.0;
  }
  return v;
}

inline Eigen::VectorXd embed_builtin(const MidiDocument& doc, const EmbedderSpec& spec = {}) {
  return embed_builtin(notes_from_midi(doc), spec);
}

inline Eigen::VectorXd embed_builtin(const AbcTune& tune, const EmbedderSpec& spec = {}) {
  return embed_builtin(abc_to_notes(clean_abc(tune)), spec);
}

// ---------------------------------------------------------------------------
// FMDEMB v1 interchange format.
//
//   FMDEMB 1 <dim>
//   <song_id>\t<v1> <v2> ... <vdim>
//
// Values use shortest round-trip decimal form; read(write(m)) == m exactly.

inline std::string write_embeddings_text(const EmbeddingMatrix& m) {
  m.validate();
  std::string out = "FMDEMB 1 " + std::to_string(m.dim()) + "\n";
  char buf[64];
  for (std::int64_t r = 0; r < m.size(); ++r) {
    const std::string& id = m.song_ids[r];
    if (id.empty() || id.find_first_of("\t\n\r") != std::string::npos)
      raise(Errc::InvalidArgument, "song id empty or contains tab/newline: '" + id + "'");
    out += id;
    out += '\t';
    for (int c = 0; c < m.dim(); ++c) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, m.values(r, c));
      if (ec != std::errc{}) raise(Errc::NumericalFailure, "float serialization failed");
      if (c > 0) out += ' ';
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

inline EmbeddingMatrix read_embeddings_text(std::string_view text) {
  std::size_t eol = text.find('\n');
  std::string_view header = text.substr(0, eol == std::string_view::npos ? text.size() : eol);
  if (!header.starts_with("FMDEMB "))
    raise(Errc::BadMagic, "missing FMDEMB magic in header line");
  header.remove_prefix(7);
  std::size_t sp = header.find(' ');
  if (sp == std::string_view::npos) raise(Errc::BadMagic, "malformed FMDEMB header");
  if (header.substr(0, sp) != "1")
    raise(Errc::UnsupportedVersion, "unsupported FMDEMB version");
  int dim = 0;
  {
    std::string_view ds = header.substr(sp + 1);
    auto [ptr, ec] = std::from_chars(ds.data(), ds.data() + ds.size(), dim);
    if (ec != std::errc{} || ptr != ds.data() + ds.size() || dim <= 0)
      raise(Errc::BadMagic, "bad dimension in FMDEMB header");
  }

  std::vector<std::string> ids;
  std::vector<double> data;
  int line_no = 1;
  std::size_t pos = (eol == std::string_view::npos) ? text.size() : eol + 1;
  while (pos < text.size()) {
    ++line_no;
    std::size_t end = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, (end == std::string_view::npos) ? std::string_view::npos : end - pos);
    pos = (end == std::string_view::npos) ? text.size() : end + 1;
    if (line.empty()) continue;

    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      raise(Errc::MalformedLine, "missing tab separator at line " + std::to_string(line_no));
    ids.emplace_back(line.substr(0, tab));

    std::string_view rest = line.substr(tab + 1);
    int count = 0;
    while (!rest.empty()) {
      std::size_t gap = rest.find(' ');
      std::string_view tok = rest.substr(0, gap);
      rest = (gap == std::string_view::npos) ? std::string_view{} : rest.substr(gap + 1);
      if (tok.empty()) continue;
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (ec != std::errc{} || ptr != tok.data() + tok.size())
        raise(Errc::MalformedLine, "invalid float at line " + std::to_string(line_no));
      if (!std::isfinite(value))
        raise(Errc::NonFiniteValue, "non-finite value at line " + std::to_string(line_no));
      if (++count > dim)
        raise(Errc::DimMismatch, "too many values at line " + std::to_string(line_no));
      data.push_back(value);
    }
    if (count != dim)
      raise(Errc::DimMismatch, "expected " + std::to_string(dim) + " values, got " +
                                   std::to_string(count) + " at line " + std::to_string(line_no));
  }

  EmbeddingMatrix m;
  m.song_ids = std::move(ids);
  m.values.resize(static_cast<Eigen::Index>(m.song_ids.size()), dim);
  for (std::size_t r = 0; r < m.song_ids.size(); ++r)
    for (int c = 0; c < dim; ++c) m.values(static_cast<Eigen::Index>(r), c) = data[r * dim + c];
  m.validate();
  return m;
}

inline void write_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path) {
  write_file_text(path, write_embeddings_text(m));
}

inline EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  return read_embeddings_text(read_file_text(path));
}

// ---------------------------------------------------------------------------
// Corpus embedding

enum class CorpusFormat { Midi, Abc };

struct EmbedResult {
  EmbeddingMatrix matrix;
  std::vector<SkippedFile> skipped;
};

// Embeds every song under `root` (a directory, a single song file, or one
// FMDEMB file). One row per successfully embedded song, rows sorted by
// song_id so the result is independent of enumeration order and thread
// count. Unparseable songs are skipped with a reason, not fatal.
inline EmbedResult embed_corpus(const std::filesystem::path& root, const EmbedderSpec& spec,
                                CorpusFormat format = CorpusFormat::Midi, int threads = 0) {
  namespace fs = std::filesystem;
  EmbedResult result;

  if (fs::is_regular_file(fs::symlink_status(root))) {
    std::string ext = root.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".fmdemb") {
      result.matrix = read_embeddings(root);
      // canonical row order, same as the embedding path
      std::vector<std::size_t> order(result.matrix.song_ids.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return result.matrix.song_ids[a] < result.matrix.song_ids[b];
      });
      EmbeddingMatrix sorted;
      sorted.values.resize(result.matrix.values.rows(), result.matrix.values.cols());
      sorted.song_ids.reserve(order.size());
      for (std::size_t i = 0; i < order.size(); ++i) {
        sorted.song_ids.push_back(result.matrix.song_ids[order[i]]);
        sorted.values.row(static_cast<Eigen::Index>(i)) =
            result.matrix.values.row(static_cast<Eigen::Index>(order[i]));
      }
      result.matrix = std::move(sorted);
      return result;
    }
  }

  struct Item {
    std::string song_id;
    std::vector<SongNote> notes;
  };
  std::vector<Item> items;

  std::vector<SkippedFile> skipped;
  std::mutex skipped_mutex;

  if (format == CorpusFormat::Midi) {
    auto files = list_corpus_files(root, {".mid", ".midi"});
    items.resize(files.size());
    parallel_for(files.size(), threads, [&](std::size_t i) {
      try {
        MidiDocument doc = parse_smf(read_file_bytes(files[i].second));
        std::vector<SongNote> notes = notes_from_midi(doc);
        if (notes.empty()) raise(Errc::EmptySong, "no notes");
        items[i] = Item{files[i].first, std::move(notes)};
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(skipped_mutex);
        skipped.push_back(SkippedFile{files[i].first, e.what()});
      }
    });
    std::erase_if(items, [&](const Item& it) { return it.song_id.empty(); });
  } else {
    auto files = list_corpus_files(root, {".abc"});
    std::vector<std::vector<Item>> per_file(files.size());
    parallel_for(files.size(), threads, [&](std::size_t i) {
      try {
        TunebookSplit split = split_tunebook(read_file_text(files[i].second), files[i].first);
        if (split.skipped_count > 0) {
          std::lock_guard<std::mutex> lock(skipped_mutex);
          skipped.push_back(SkippedFile{
              files[i].first, std::to_string(split.skipped_count) + " malformed tune segment(s)"});
        }
        for (const AbcTune& tune : split.tunes) {
          std::vector<SongNote> notes = abc_to_notes(clean_abc(tune));
          if (notes.empty()) {
            std::lock_guard<std::mutex> lock(skipped_mutex);
            skipped.push_back(SkippedFile{tune.source_id, "EmptySong: no interpretable notes"});
            continue;
          }
          per_file[i].push_back(Item{tune.source_id, std::move(notes)});
        }
      } catch (const Error& e) {
        std::lock_guard<std::mutex> lock(skipped_mutex);
        skipped.push_back(SkippedFile{files[i].first, e.what()});
      }
    });
    for (auto& group : per_file)
      for (Item& it : group) items.push_back(std::move(it));
  }

  if (items.empty()) raise(Errc::NoEmbeddableSongs, "no song could be embedded under " +
                                                        root.string());

  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return a.song_id < b.song_id; });

  EmbeddingMatrix m;
  m.song_ids.reserve(items.size());
  for (const Item& it : items) m.song_ids.push_back(it.song_id);
  m.values.resize(static_cast<Eigen::Index>(items.size()), spec.dim());
  parallel_for(items.size(), threads, [&](std::size_t i) {
    m.values.row(static_cast<Eigen::Index>(i)) = embed_builtin(items[i].notes, spec);
  });

  std::sort(skipped.begin(), skipped.end(),
            [](const SkippedFile& a, const SkippedFile& b) { return a.song_id < b.song_id; });
  m.validate();
  result.matrix = std::move(m);
  result.skipped = std::move(skipped);
  return result;
}

}  // namespace fmd
