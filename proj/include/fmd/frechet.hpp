#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fmd/embedding.hpp"
#include "fmd/errors.hpp"
#include "fmd/gaussian.hpp"
#include "fmd/rng.hpp"

// Frechet distance between Gaussians:
//
//   FD = ||mu_r - mu_t||^2 + Tr(Sigma_r + Sigma_t - 2 sqrt(Sigma_r Sigma_t))
//
// computed through the symmetric form sqrt(A Sigma_t A) with A =
// sqrt(Sigma_r), which keeps every intermediate symmetric PSD. Plus the
// derived quantities built on it: per-song scores, bottom-percentile
// filtering, and infinite-sample extrapolation.

namespace fmd {

struct SqrtmResult {
  Eigen::MatrixXd root;
  double clamped_mass = 0.0;  // total |lambda| zeroed out in [-tau, 0)
};

// Symmetric PSD square root via eigendecomposition. Eigenvalues in [-tau, 0)
// with tau = 1e-10 * max(1, tr|M|/d) are clamped to zero; anything below
// -tau is NotPSD.
inline SqrtmResult sqrtm_psd_detailed(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) raise(Errc::NotSymmetric, "matrix is not square");
  const Eigen::Index d = m.rows();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    raise(Errc::NotSymmetric, "matrix is not symmetric within 1e-8");

  Eigen::MatrixXd sym = (m + m.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    raise(Errc::EigenFailure, "self-adjoint eigendecomposition failed");

  const double tau = 1e-10 * std::max(1.0, sym.diagonal().cwiseAbs().sum() / double(d));
  Eigen::VectorXd lambda = solver.eigenvalues();
  double clamped = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (lambda[i] < -tau)
      raise(Errc::NotPsd, "eigenvalue " + std::to_string(lambda[i]) + " below -" +
                              std::to_string(tau));
    if (lambda[i] < 0.0) {
      clamped += -lambda[i];
      lambda[i] = 0.0;
    }
  }
  Eigen::MatrixXd root = solver.eigenvectors() * lambda.cwiseSqrt().asDiagonal() *
                         solver.eigenvectors().transpose();
  return SqrtmResult{(root + root.transpose()) / 2.0, clamped};
}

inline Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& m) {
  return sqrtm_psd_detailed(m).root;
}

struct FmdDiagnostics {
  double jitter_added = 0.0;
  double clamped_eigenvalue_mass = 0.0;
};

struct FmdReport {
  double value = 0.0;
  double mean_term = 0.0;
  double trace_term = 0.0;
  Estimator estimator = Estimator::Mle;
  std::optional<EmbedderSpec> embedder;  // set on full-pipeline paths
  std::int64_t n_ref = 0;
  std::int64_t n_test = 0;
  FmdDiagnostics diagnostics;
};

namespace detail {

struct TraceTermResult {
  double trace_term = 0.0;
  double clamped_mass = 0.0;
};

inline TraceTermResult frechet_trace_term(const Eigen::MatrixXd& cov_ref,
                                          const Eigen::MatrixXd& cov_test) {
  SqrtmResult a = sqrtm_psd_detailed(cov_ref);
  SqrtmResult inner = sqrtm_psd_detailed(a.root * cov_test * a.root);
  TraceTermResult out;
  out.trace_term = cov_ref.trace() + cov_test.trace() - 2.0 * inner.root.trace();
  out.clamped_mass = a.clamped_mass + inner.clamped_mass;
  return out;
}

}  // namespace detail

inline FmdReport frechet_distance(const GaussianEstimate& ref, const GaussianEstimate& test) {
  if (ref.dim() != test.dim())
    raise(Errc::DimMismatch, "reference dim " + std::to_string(ref.dim()) + " vs test dim " +
                                 std::to_string(test.dim()));
  FmdReport report;
  report.estimator = ref.estimator;
  report.n_ref = ref.n;
  report.n_test = test.n;

  // Identical Gaussians have distance exactly zero; skip the numerics.
  if ((ref.mean.array() == test.mean.array()).all() &&
      (ref.cov.array() == test.cov.array()).all())
    return report;

  report.mean_term = (ref.mean - test.mean).squaredNorm();

  detail::TraceTermResult trace;
  try {
    trace = detail::frechet_trace_term(ref.cov, test.cov);
  } catch (const Error& first) {
    if (first.code() != Errc::NotPsd && first.code() != Errc::EigenFailure) throw;
    // retry once with jitter on both covariances
    const double d = static_cast<double>(ref.dim());
    double eps = 1e-6 * (ref.cov.trace() + test.cov.trace()) / (2.0 * d);
    if (eps <= 0.0) eps = 1e-12;
    Eigen::MatrixXd jr = ref.cov, jt = test.cov;
    jr.diagonal().array() += eps;
    jt.diagonal().array() += eps;
    try {
      trace = detail::frechet_trace_term(jr, jt);
    } catch (const Error& second) {
      raise(Errc::NumericalFailure,
            std::string("frechet trace term failed after jitter retry: ") + second.what());
    }
    report.diagnostics.jitter_added = eps;
  }
  report.trace_term = trace.trace_term;
  report.diagnostics.clamped_eigenvalue_mass = trace.clamped_mass;

  double value = report.mean_term + report.trace_term;
  if (value < 0.0) {
    if (-value > 1e-8 * (1.0 + std::abs(value)))
      raise(Errc::NumericalFailure,
            "frechet distance " + std::to_string(value) + " below tolerance");
    value = 0.0;
  }
  report.value = value;
  return report;
}

// Full pipeline: embed both corpora, fit, and score, with provenance.
inline FmdReport fmd_score(const std::filesystem::path& ref_corpus,
                           const std::filesystem::path& test_corpus, const EmbedderSpec& embedder,
                           const EstimatorConfig& estimator,
                           CorpusFormat format = CorpusFormat::Midi, int threads = 0) {
  EmbedResult ref = embed_corpus(ref_corpus, embedder, format, threads);
  EmbedResult test = embed_corpus(test_corpus, embedder, format, threads);
  GaussianEstimate g_ref = estimate(ref.matrix, estimator);
  GaussianEstimate g_test = estimate(test.matrix, estimator);
  FmdReport report = frechet_distance(g_ref, g_test);
  report.embedder = embedder;
  return report;
}

// FD against a single song treated as a point mass (Sigma_t = 0):
// ||mu_r - x||^2 + tr(Sigma_r). The trace is a per-reference constant, so
// rankings coincide with squared distance from the reference mean.
inline double per_song_fmd(const GaussianEstimate& ref, const Eigen::VectorXd& song) {
  if (ref.dim() != static_cast<int>(song.size()))
    raise(Errc::DimMismatch, "song vector dim does not match reference");
  return (ref.mean - song).squaredNorm() + ref.cov.trace();
}

// Bottom-percentile selection with the nearest-rank rule: the cutoff is the
// ceil(p/100 * N)-th smallest score and every song at or below it is kept,
// ties included. Output is ordered by (score, song_id).
inline std::vector<std::string> percentile_filter(
    const std::vector<std::pair<std::string, double>>& scores, double p) {
  if (scores.empty()) raise(Errc::EmptyInput, "no scores to filter");
  if (!(p > 0.0 && p <= 100.0)) raise(Errc::BadPercent, "percentile must lie in (0,100]");

  std::vector<std::pair<double, std::string>> ordered;
  ordered.reserve(scores.size());
  for (const auto& [id, score] : scores) ordered.emplace_back(score, id);
  std::sort(ordered.begin(), ordered.end());

  const std::size_t n = ordered.size();
  // multiply before dividing so integer percents stay exact; snap within
  // 1e-9 so representation noise cannot bump the rank
  double raw = p * static_cast<double>(n) / 100.0;
  std::size_t rank = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  const double cutoff = ordered[rank - 1].first;

  std::vector<std::string> out;
  for (const auto& [score, id] : ordered) {
    if (score > cutoff) break;
    out.push_back(id);
  }
  return out;
}

struct ExtrapolationReport {
  std::vector<std::pair<std::int64_t, double>> points;  // (subset size, fmd)
  double intercept = 0.0;  // the FMD-inf value
  double slope = 0.0;
  double r_squared = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

// Ordinary least squares of y against x with intercept. A response with zero
// variance is reported as a flat fit with r^2 = 0.
inline void ols_fit(const std::vector<double>& x, const std::vector<double>& y, double& intercept,
                    double& slope, double& r_squared) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy <= 0.0) {
    slope = 0.0;
    intercept = my;
    r_squared = 0.0;
    return;
  }
  slope = sxy / sxx;
  intercept = my - slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double resid = y[i] - (intercept + slope * x[i]);
    ss_res += resid * resid;
  }
  r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
}

}  // namespace detail

// FMD-inf: FMD of seeded test subsamples against the full reference, fitted
// by OLS against 1/n; the intercept estimates the infinite-sample value.
// Subset sizes are evenly spaced over [n_min, n]; subset i samples without
// replacement from a stream derived from (seed, i).
inline ExtrapolationReport fmd_inf(const EmbeddingMatrix& ref, const EmbeddingMatrix& test,
                                   const EstimatorConfig& estimator, int points = 10,
                                   std::int64_t n_min = 0, std::uint64_t seed = 0,
                                   int threads = 1) {
  if (ref.dim() != test.dim()) raise(Errc::DimMismatch, "embedding dims differ");
  if (points < 3) raise(Errc::InvalidArgument, "need at least 3 extrapolation points");
  const std::int64_t n = test.size();
  if (n_min <= 0) n_min = std::max<std::int64_t>(50, test.dim() + 2);
  if (n < n_min + points - 1)
    raise(Errc::TooFewSamples, "test corpus has " + std::to_string(n) + " songs; need at least " +
                                   std::to_string(n_min + points - 1));

  GaussianEstimate g_ref = estimate(ref, estimator);

  std::vector<std::int64_t> sizes(points);
  for (int i = 0; i < points; ++i) {
    double t = (points == 1) ? 0.0 : static_cast<double>(i) / (points - 1);
    sizes[i] = n_min + static_cast<std::int64_t>(std::llround(t * static_cast<double>(n - n_min)));
  }

  std::vector<double> fmd_values(points);
  parallel_for(static_cast<std::size_t>(points), threads, [&](std::size_t i) {
    Rng rng(derive_stream(seed, i));
    std::vector<std::size_t> pick =
        rng.sample_without_replacement(static_cast<std::size_t>(n),
                                       static_cast<std::size_t>(sizes[i]));
    EmbeddingMatrix subset;
    subset.values.resize(static_cast<Eigen::Index>(pick.size()), test.dim());
    subset.song_ids.reserve(pick.size());
    for (std::size_t r = 0; r < pick.size(); ++r) {
      subset.values.row(static_cast<Eigen::Index>(r)) =
          test.values.row(static_cast<Eigen::Index>(pick[r]));
      subset.song_ids.push_back(test.song_ids[pick[r]]);
    }
    GaussianEstimate g_sub = estimate(subset, estimator);
    fmd_values[i] = frechet_distance(g_ref, g_sub).value;
  });

  ExtrapolationReport report;
  report.seed = seed;
  std::vector<double> inv_n(points);
  for (int i = 0; i < points; ++i) {
    inv_n[i] = 1.0 / static_cast<double>(sizes[i]);
    report.points.emplace_back(sizes[i], fmd_values[i]);
  }
  detail::ols_fit(inv_n, fmd_values, report.intercept, report.slope, report.r_squared);
  return report;
}

}  // namespace fmd
