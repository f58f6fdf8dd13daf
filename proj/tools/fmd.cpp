// fmd: Frechet Music Distance toolkit CLI.
//
// Subcommands: embed, score, persong, extrapolate, convert, clean-abc,
// augment. Machine-readable reports (--json) go to stdout as exactly one
// JSON document; logs and human-readable summaries go to stderr/stdout as
// noted per command. Exit codes: 0 success, 1 I/O error, 2 invalid input or
// configuration, 3 numerical failure.

#include <CLI11.hpp>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "fmd/fmd.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

int exit_code_for(const fmd::Error& e) {
  switch (e.code()) {
    case fmd::Errc::IoError:
      return kExitIo;
    case fmd::Errc::NumericalFailure:
    case fmd::Errc::EigenFailure:
      return kExitNumerical;
    default:
      return kExitInvalid;
  }
}

// Shortest round-trip decimal form, matching the FMDEMB serialization.
std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct CommonOptions {
  std::uint64_t seed = 0;
  int threads = 0;
  bool json_output = false;
  std::string out_path;  // "-" or empty = stdout
};

struct EstimatorOptions {
  std::string estimator = "mle";
  double shrinkage_alpha = 0.1;
  int bootstrap_b = 200;

  fmd::EstimatorConfig config(std::uint64_t seed) const {
    auto kind = fmd::estimator_from_name(estimator);
    if (!kind) fmd::raise(fmd::Errc::InvalidArgument, "unknown estimator: " + estimator);
    return fmd::EstimatorConfig{*kind, shrinkage_alpha, bootstrap_b, seed};
  }

  json echo() const {
    return json{{"estimator", estimator},
                {"shrinkage_alpha", shrinkage_alpha},
                {"bootstrap_b", bootstrap_b}};
  }
};

struct EmbedderOptions {
  std::string embedder = "builtin";
  bool include_velocity = false;
  std::string format = "midi";

  fmd::EmbedderSpec spec() const {
    fmd::EmbedderSpec s;
    if (embedder == "builtin") {
      s.kind = fmd::EmbedderKind::BuiltinFeatures;
      s.version = "1";
    } else if (embedder == "external") {
      s.kind = fmd::EmbedderKind::ExternalFile;
      s.version = "1";
    } else {
      fmd::raise(fmd::Errc::InvalidArgument, "unknown embedder: " + embedder);
    }
    s.include_velocity = include_velocity;
    return s;
  }

  fmd::CorpusFormat corpus_format() const {
    if (format == "midi") return fmd::CorpusFormat::Midi;
    if (format == "abc") return fmd::CorpusFormat::Abc;
    fmd::raise(fmd::Errc::InvalidArgument, "unknown format: " + format);
  }

  json echo() const {
    return json{{"embedder", embedder},
                {"include_velocity", include_velocity},
                {"format", format}};
  }
};

json embedder_spec_json(const std::optional<fmd::EmbedderSpec>& spec) {
  if (!spec) return nullptr;
  return json{{"kind", spec->kind == fmd::EmbedderKind::BuiltinFeatures ? "builtin_features"
                                                                        : "external_file"},
              {"version", spec->version},
              {"include_velocity", spec->include_velocity},
              {"dim", spec->dim()}};
}

json report_base(const std::string& command, const CommonOptions& common, json config_echo) {
  config_echo["threads"] = common.threads;
  return json{{"schema", "fmd-report/1"},
              {"tool_version", fmd::kVersion},
              {"command", command},
              {"config", std::move(config_echo)},
              {"seed", common.seed}};
}

void emit(const json& doc, const CommonOptions& common, const std::string& human) {
  if (common.json_output) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << human;
  }
}

void log_skipped(const std::vector<fmd::SkippedFile>& skipped) {
  for (const fmd::SkippedFile& s : skipped)
    std::cerr << "skipped " << s.song_id << ": " << s.reason << "\n";
}

// Corpus argument: directory of song files, a single song file, or one
// precomputed FMDEMB file.
fmd::EmbeddingMatrix load_corpus(const std::string& path, const EmbedderOptions& opts,
                                 int threads) {
  fmd::EmbedResult result =
      fmd::embed_corpus(path, opts.spec(), opts.corpus_format(), threads);
  log_skipped(result.skipped);
  return std::move(result.matrix);
}

int cmd_embed(const std::vector<std::string>& paths, const std::string& out,
              const EmbedderOptions& embedder, const CommonOptions& common) {
  fmd::EmbeddingMatrix merged;
  std::vector<fmd::SkippedFile> skipped;
  std::vector<fmd::EmbeddingMatrix> parts;
  for (const std::string& path : paths) {
    fmd::EmbedResult result =
        fmd::embed_corpus(path, embedder.spec(), embedder.corpus_format(), common.threads);
    skipped.insert(skipped.end(), result.skipped.begin(), result.skipped.end());
    parts.push_back(std::move(result.matrix));
  }
  merged = std::move(parts.front());
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].dim() != merged.dim())
      fmd::raise(fmd::Errc::DimMismatch, "corpus parts have different embedding dims");
    Eigen::MatrixXd values(merged.size() + parts[i].size(), merged.dim());
    values << merged.values, parts[i].values;
    merged.values = std::move(values);
    merged.song_ids.insert(merged.song_ids.end(), parts[i].song_ids.begin(),
                           parts[i].song_ids.end());
  }
  // canonical row order over the union
  std::vector<std::size_t> order(merged.song_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return merged.song_ids[a] < merged.song_ids[b];
  });
  fmd::EmbeddingMatrix sorted;
  sorted.values.resize(merged.values.rows(), merged.values.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted.song_ids.push_back(merged.song_ids[order[i]]);
    sorted.values.row(static_cast<Eigen::Index>(i)) =
        merged.values.row(static_cast<Eigen::Index>(order[i]));
  }
  sorted.validate();

  fmd::write_embeddings(sorted, out);
  log_skipped(skipped);

  json doc = report_base("embed", common, embedder.echo());
  doc["config"]["paths"] = paths;
  doc["config"]["out"] = out;
  doc["estimator"] = nullptr;
  doc["embedder"] = embedder_spec_json(embedder.spec());
  doc["n"] = sorted.size();
  doc["dim"] = sorted.dim();
  doc["skipped"] = skipped.size();
  emit(doc, common,
       "embedded " + std::to_string(sorted.size()) + " songs, dim " +
           std::to_string(sorted.dim()) + ", skipped " + std::to_string(skipped.size()) + "\n");
  return kExitOk;
}

int cmd_score(const std::string& ref, const std::string& test, const std::string& ref_emb,
              const std::string& test_emb, const EstimatorOptions& estimator,
              const EmbedderOptions& embedder, const CommonOptions& common) {
  const bool from_files = !ref_emb.empty();
  fmd::EmbeddingMatrix ref_matrix =
      from_files ? fmd::read_embeddings(ref_emb) : load_corpus(ref, embedder, common.threads);
  fmd::EmbeddingMatrix test_matrix =
      from_files ? fmd::read_embeddings(test_emb) : load_corpus(test, embedder, common.threads);

  fmd::EstimatorConfig config = estimator.config(common.seed);
  fmd::GaussianEstimate g_ref = fmd::estimate(ref_matrix, config);
  fmd::GaussianEstimate g_test = fmd::estimate(test_matrix, config);
  fmd::FmdReport report = fmd::frechet_distance(g_ref, g_test);
  if (!from_files) report.embedder = embedder.spec();

  json config_echo = estimator.echo();
  json embedder_echo = embedder.echo();
  for (auto& [k, v] : embedder_echo.items()) config_echo[k] = v;
  config_echo["ref"] = from_files ? ref_emb : ref;
  config_echo["test"] = from_files ? test_emb : test;
  config_echo["from_embedding_files"] = from_files;

  json doc = report_base("score", common, std::move(config_echo));
  doc["estimator"] = fmd::estimator_name(report.estimator);
  doc["embedder"] = embedder_spec_json(report.embedder);
  doc["n_ref"] = report.n_ref;
  doc["n_test"] = report.n_test;
  doc["value"] = report.value;
  doc["mean_term"] = report.mean_term;
  doc["trace_term"] = report.trace_term;
  if (g_ref.shrinkage_used) doc["shrinkage_used_ref"] = *g_ref.shrinkage_used;
  if (g_test.shrinkage_used) doc["shrinkage_used_test"] = *g_test.shrinkage_used;
  doc["diagnostics"] = {{"jitter_added", report.diagnostics.jitter_added},
                        {"clamped_eigenvalue_mass", report.diagnostics.clamped_eigenvalue_mass}};
  emit(doc, common,
       "FMD (" + std::string(fmd::estimator_name(report.estimator)) +
           "): " + format_double(report.value) + "\n  mean term:  " +
           format_double(report.mean_term) + "\n  trace term: " +
           format_double(report.trace_term) + "\n  n_ref: " + std::to_string(report.n_ref) +
           "  n_test: " + std::to_string(report.n_test) + "\n");
  return kExitOk;
}

int cmd_persong(const std::string& ref, const std::string& test, double percentile,
                const std::string& copy_to, const std::string& ref_emb,
                const std::string& test_emb, const EstimatorOptions& estimator,
                const EmbedderOptions& embedder, const CommonOptions& common) {
  fmd::EmbeddingMatrix ref_matrix =
      !ref_emb.empty() ? fmd::read_embeddings(ref_emb) : load_corpus(ref, embedder, common.threads);
  fmd::EmbeddingMatrix test_matrix = !test_emb.empty()
                                         ? fmd::read_embeddings(test_emb)
                                         : load_corpus(test, embedder, common.threads);
  if (!copy_to.empty() && test.empty())
    fmd::raise(fmd::Errc::InvalidArgument, "--copy-to needs a file corpus as --test");

  fmd::GaussianEstimate g_ref = fmd::estimate(ref_matrix, estimator.config(common.seed));

  std::vector<std::pair<std::string, double>> scores;
  scores.reserve(test_matrix.song_ids.size());
  for (std::int64_t i = 0; i < test_matrix.size(); ++i)
    scores.emplace_back(test_matrix.song_ids[i],
                        fmd::per_song_fmd(g_ref, test_matrix.values.row(i).transpose()));
  std::vector<std::string> selected = fmd::percentile_filter(scores, percentile);

  std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
    return a.second < b.second || (a.second == b.second && a.first < b.first);
  });

  if (!copy_to.empty()) {
    fs::create_directories(copy_to);
    for (const std::string& id : selected) {
      fs::path src = fs::path(test) / id;
      if (!fs::exists(src)) continue;  // embedded ids from tunebooks have no 1:1 file
      fs::path dst = fs::path(copy_to) / id;
      if (dst.has_parent_path()) fs::create_directories(dst.parent_path());
      fs::copy_file(src, dst, fs::copy_options::overwrite_existing);
    }
  }

  json config_echo = estimator.echo();
  json embedder_echo = embedder.echo();
  for (auto& [k, v] : embedder_echo.items()) config_echo[k] = v;
  config_echo["ref"] = !ref_emb.empty() ? ref_emb : ref;
  config_echo["test"] = !test_emb.empty() ? test_emb : test;
  config_echo["percentile"] = percentile;
  config_echo["copy_to"] = copy_to;

  json doc = report_base("persong", common, std::move(config_echo));
  doc["estimator"] = estimator.estimator;
  doc["embedder"] = embedder_spec_json(embedder.spec());
  doc["n_ref"] = ref_matrix.size();
  doc["n_test"] = test_matrix.size();
  doc["diagnostics"] = {{"jitter_added", 0.0}, {"clamped_eigenvalue_mass", 0.0}};
  json score_rows = json::array();
  for (const auto& [id, score] : scores) score_rows.push_back({{"song_id", id}, {"score", score}});
  doc["scores"] = std::move(score_rows);
  doc["selected"] = selected;

  std::string human;
  for (const auto& [id, score] : scores) human += id + "\t" + format_double(score) + "\n";
  human += "selected " + std::to_string(selected.size()) + " of " +
           std::to_string(test_matrix.size()) + " songs (bottom " + format_double(percentile) +
           "%)\n";
  emit(doc, common, human);
  return kExitOk;
}

int cmd_extrapolate(const std::string& ref, const std::string& test, const std::string& ref_emb,
                    const std::string& test_emb, int points, std::int64_t n_min,
                    const EstimatorOptions& estimator, const EmbedderOptions& embedder,
                    const CommonOptions& common) {
  fmd::EmbeddingMatrix ref_matrix =
      !ref_emb.empty() ? fmd::read_embeddings(ref_emb) : load_corpus(ref, embedder, common.threads);
  fmd::EmbeddingMatrix test_matrix = !test_emb.empty()
                                         ? fmd::read_embeddings(test_emb)
                                         : load_corpus(test, embedder, common.threads);

  fmd::ExtrapolationReport report =
      fmd::fmd_inf(ref_matrix, test_matrix, estimator.config(common.seed), points, n_min,
                   common.seed, common.threads);

  json config_echo = estimator.echo();
  json embedder_echo = embedder.echo();
  for (auto& [k, v] : embedder_echo.items()) config_echo[k] = v;
  config_echo["ref"] = !ref_emb.empty() ? ref_emb : ref;
  config_echo["test"] = !test_emb.empty() ? test_emb : test;
  config_echo["points"] = points;
  config_echo["n_min"] = n_min;

  json doc = report_base("extrapolate", common, std::move(config_echo));
  doc["estimator"] = estimator.estimator;
  doc["embedder"] = embedder_spec_json(embedder.spec());
  doc["n_ref"] = ref_matrix.size();
  doc["n_test"] = test_matrix.size();
  doc["diagnostics"] = {{"jitter_added", 0.0}, {"clamped_eigenvalue_mass", 0.0}};
  json point_rows = json::array();
  for (const auto& [n, value] : report.points)
    point_rows.push_back({{"n", n}, {"fmd", value}});
  doc["points"] = std::move(point_rows);
  doc["intercept"] = report.intercept;
  doc["slope"] = report.slope;
  doc["r_squared"] = report.r_squared;

  std::string human = "FMD-inf intercept: " + format_double(report.intercept) +
                      "  slope: " + format_double(report.slope) +
                      "  r^2: " + format_double(report.r_squared) + "\n";
  for (const auto& [n, value] : report.points)
    human += "  n=" + std::to_string(n) + "  fmd=" + format_double(value) + "\n";
  emit(doc, common, human);
  return kExitOk;
}

int cmd_convert(const std::string& to, const std::string& in, const std::string& out) {
  if (to == "mtf") {
    fmd::MidiDocument doc = fmd::parse_smf(fmd::read_file_bytes(in));
    fmd::write_file_text(out, fmd::encode_mtf(doc));
  } else if (to == "midi") {
    fmd::MidiDocument doc = fmd::decode_mtf(fmd::read_file_text(in));
    fmd::write_file_bytes(out, fmd::encode_smf(doc));
  } else {
    fmd::raise(fmd::Errc::InvalidArgument, "--to must be mtf or midi");
  }
  return kExitOk;
}

int cmd_clean_abc(const std::string& in, const std::string& out, const CommonOptions& common) {
  fmd::TunebookSplit split = fmd::split_tunebook(fmd::read_file_text(in), in);
  std::vector<fmd::AbcTune> cleaned;
  cleaned.reserve(split.tunes.size());
  for (const fmd::AbcTune& tune : split.tunes) cleaned.push_back(fmd::clean_abc(tune));
  fmd::write_file_text(out, fmd::join_tunebook(cleaned));

  json doc = report_base("clean-abc", common, json{{"in", in}, {"out", out}});
  doc["tunes"] = cleaned.size();
  doc["skipped"] = split.skipped_count;
  emit(doc, common,
       "cleaned " + std::to_string(cleaned.size()) + " tunes, skipped " +
           std::to_string(split.skipped_count) + "\n");
  return kExitOk;
}

int cmd_augment(const std::string& target, double p, double mu, double sigma,
                const std::string& in_dir, const std::string& out_dir,
                const CommonOptions& common) {
  fmd::AugmentSpec spec;
  if (target == "pitch")
    spec.target = fmd::AugmentTarget::NotePitch;
  else if (target == "velocity")
    spec.target = fmd::AugmentTarget::NoteVelocity;
  else
    fmd::raise(fmd::Errc::InvalidArgument, "--target must be pitch or velocity");
  spec.p = p;
  spec.mu = mu;
  spec.sigma = sigma;
  spec.seed = common.seed;

  fmd::AugmentSummary summary = fmd::augment_corpus(in_dir, out_dir, spec, common.threads);
  log_skipped(summary.skipped);

  json doc = report_base("augment", common,
                         json{{"target", target},
                              {"p", p},
                              {"mu", mu},
                              {"sigma", sigma},
                              {"in", in_dir},
                              {"out", out_dir}});
  doc["files"] = summary.files;
  doc["notes_total"] = summary.notes_total;
  doc["notes_modified"] = summary.notes_modified;
  doc["skipped"] = summary.skipped.size();
  emit(doc, common,
       "augmented " + std::to_string(summary.files) + " files, " +
           std::to_string(summary.notes_modified) + "/" + std::to_string(summary.notes_total) +
           " notes modified, skipped " + std::to_string(summary.skipped.size()) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frechet Music Distance toolkit"};
  app.set_version_flag("--version", std::string("fmd ") + fmd::kVersion);
  app.require_subcommand(1);

  CommonOptions common;
  EstimatorOptions estimator;
  EmbedderOptions embedder;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", common.seed, "RNG seed");
    cmd->add_option("--threads", common.threads,
                    "worker threads (0 = FMD_THREADS env or hardware)");
    cmd->add_flag("--json", common.json_output, "exactly one JSON document on stdout");
  };
  auto add_estimator = [&](CLI::App* cmd) {
    cmd->add_option("--estimator", estimator.estimator,
                    "mle|bootstrap|shrinkage|ledoit-wolf|oas");
    cmd->add_option("--shrinkage-alpha", estimator.shrinkage_alpha,
                    "basic shrinkage intensity in [0,1]");
    cmd->add_option("--bootstrap-B", estimator.bootstrap_b, "bootstrap resample count");
  };
  auto add_embedder = [&](CLI::App* cmd) {
    cmd->add_option("--embedder", embedder.embedder, "builtin|external");
    cmd->add_flag("--include-velocity", embedder.include_velocity,
                  "append velocity mean/std to the builtin embedding");
    cmd->add_option("--format", embedder.format, "midi|abc");
  };

  // embed
  std::vector<std::string> embed_paths;
  std::string embed_out;
  CLI::App* embed = app.add_subcommand("embed", "embed corpora into a FMDEMB file");
  embed->add_option("paths", embed_paths, "song files or directories")->required();
  embed->add_option("--out", embed_out, "output .fmdemb path")->required();
  add_embedder(embed);
  add_common(embed);

  // score
  std::string score_ref, score_test, score_ref_emb, score_test_emb;
  CLI::App* score = app.add_subcommand("score", "FMD between a reference and a test corpus");
  score->add_option("--ref", score_ref, "reference corpus directory or file");
  score->add_option("--test", score_test, "test corpus directory or file");
  score->add_option("--ref-emb", score_ref_emb, "precomputed reference FMDEMB");
  score->add_option("--test-emb", score_test_emb, "precomputed test FMDEMB");
  add_estimator(score);
  add_embedder(score);
  add_common(score);

  // persong
  std::string ps_ref, ps_test, ps_ref_emb, ps_test_emb, ps_copy_to;
  double ps_percentile = 5.0;
  CLI::App* persong = app.add_subcommand("persong", "per-song FMD and bottom-percentile filter");
  persong->add_option("--ref", ps_ref, "reference corpus");
  persong->add_option("--test", ps_test, "test corpus");
  persong->add_option("--ref-emb", ps_ref_emb, "precomputed reference FMDEMB");
  persong->add_option("--test-emb", ps_test_emb, "precomputed test FMDEMB");
  persong->add_option("--percentile", ps_percentile, "bottom percentile to select (default 5)");
  persong->add_option("--copy-to", ps_copy_to, "copy selected songs into this directory");
  add_estimator(persong);
  add_embedder(persong);
  add_common(persong);

  // extrapolate
  std::string ex_ref, ex_test, ex_ref_emb, ex_test_emb;
  int ex_points = 10;
  std::int64_t ex_n_min = 0;
  CLI::App* extrapolate = app.add_subcommand("extrapolate", "FMD-inf extrapolation");
  extrapolate->add_option("--ref", ex_ref, "reference corpus");
  extrapolate->add_option("--test", ex_test, "test corpus");
  extrapolate->add_option("--ref-emb", ex_ref_emb, "precomputed reference FMDEMB");
  extrapolate->add_option("--test-emb", ex_test_emb, "precomputed test FMDEMB");
  extrapolate->add_option("--points", ex_points, "number of subset sizes (default 10)");
  extrapolate->add_option("--n-min", ex_n_min,
                          "smallest subset size (default max(50, dim+2))");
  add_estimator(extrapolate);
  add_embedder(extrapolate);
  add_common(extrapolate);

  // convert
  std::string cv_to, cv_in, cv_out;
  CLI::App* convert = app.add_subcommand("convert", "convert between SMF and MTF");
  convert->add_option("--to", cv_to, "target format: mtf|midi")->required();
  convert->add_option("in", cv_in, "input file")->required();
  convert->add_option("out", cv_out, "output file")->required();
  add_common(convert);

  // clean-abc
  std::string ca_in, ca_out;
  CLI::App* clean = app.add_subcommand("clean-abc", "apply the ABC cleanup preprocessing");
  clean->add_option("in", ca_in, "input tunebook")->required();
  clean->add_option("out", ca_out, "output tunebook")->required();
  add_common(clean);

  // augment
  std::string ag_target = "pitch", ag_in, ag_out;
  double ag_p = 1.0, ag_mu = 0.0, ag_sigma = 0.0;
  CLI::App* augment = app.add_subcommand("augment", "write a noise-augmented MIDI corpus");
  augment->add_option("--target", ag_target, "pitch|velocity")->required();
  augment->add_option("--p", ag_p, "probability of modifying a note")->required();
  augment->add_option("--mu", ag_mu, "noise mean");
  augment->add_option("--sigma", ag_sigma, "noise standard deviation")->required();
  augment->add_option("in", ag_in, "input corpus directory")->required();
  augment->add_option("out", ag_out, "output corpus directory")->required();
  add_common(augment);

  CLI11_PARSE(app, argc, argv);

  try {
    if (embed->parsed()) return cmd_embed(embed_paths, embed_out, embedder, common);
    if (score->parsed()) {
      if (score_ref_emb.empty() != score_test_emb.empty())
        fmd::raise(fmd::Errc::InvalidArgument, "--ref-emb and --test-emb go together");
      if (score_ref_emb.empty() && (score_ref.empty() || score_test.empty()))
        fmd::raise(fmd::Errc::InvalidArgument, "need --ref/--test or --ref-emb/--test-emb");
      return cmd_score(score_ref, score_test, score_ref_emb, score_test_emb, estimator,
                       embedder, common);
    }
    if (persong->parsed()) {
      if ((ps_ref.empty() && ps_ref_emb.empty()) || (ps_test.empty() && ps_test_emb.empty()))
        fmd::raise(fmd::Errc::InvalidArgument, "need a reference and a test corpus");
      return cmd_persong(ps_ref, ps_test, ps_percentile, ps_copy_to, ps_ref_emb, ps_test_emb,
                         estimator, embedder, common);
    }
    if (extrapolate->parsed()) {
      if ((ex_ref.empty() && ex_ref_emb.empty()) || (ex_test.empty() && ex_test_emb.empty()))
        fmd::raise(fmd::Errc::InvalidArgument, "need a reference and a test corpus");
      return cmd_extrapolate(ex_ref, ex_test, ex_ref_emb, ex_test_emb, ex_points, ex_n_min,
                             estimator, embedder, common);
    }
    if (convert->parsed()) return cmd_convert(cv_to, cv_in, cv_out);
    if (clean->parsed()) return cmd_clean_abc(ca_in, ca_out, common);
    if (augment->parsed())
      return cmd_augment(ag_target, ag_p, ag_mu, ag_sigma, ag_in, ag_out, common);
  } catch (const fmd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
