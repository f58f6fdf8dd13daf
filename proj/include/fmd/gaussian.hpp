#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "fmd/embedding.hpp"
#include "fmd/errors.hpp"
#include "fmd/rng.hpp"

// Mean/covariance estimation for embedding matrices. Two divisor conventions
// coexist deliberately: the MLE uses the unbiased (n-1) divisor, the
// shrinkage family works from the biased (n) sample covariance. Both are
// exercised by tests; mixing them up changes small-sample behavior.

namespace fmd {

enum class Estimator { Mle, Bootstrap, BasicShrinkage, LedoitWolf, Oas };

inline const char* estimator_name(Estimator e) {
  switch (e) {
    case Estimator::Mle: return "mle";
    case Estimator::Bootstrap: return "bootstrap";
    case Estimator::BasicShrinkage: return "shrinkage";
    case Estimator::LedoitWolf: return "ledoit-wolf";
    case Estimator::Oas: return "oas";
  }
  return "unknown";
}

inline std::optional<Estimator> estimator_from_name(std::string_view name) {
  if (name == "mle") return Estimator::Mle;
  if (name == "bootstrap") return Estimator::Bootstrap;
  if (name == "shrinkage") return Estimator::BasicShrinkage;
  if (name == "ledoit-wolf") return Estimator::LedoitWolf;
  if (name == "oas") return Estimator::Oas;
  return std::nullopt;
}

struct GaussianEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // symmetric
  std::int64_t n = 0;
  Estimator estimator = Estimator::Mle;
  std::optional<double> shrinkage_used;

  int dim() const { return static_cast<int>(mean.size()); }
};

namespace detail {

inline void require_samples(const EmbeddingMatrix& x) {
  if (x.size() < 2)
    raise(Errc::InsufficientSamples,
          "need at least 2 samples, got " + std::to_string(x.size()));
}

inline Eigen::VectorXd column_mean(const Eigen::MatrixXd& v) {
  return v.colwise().mean().transpose();
}

// Biased sample covariance (divisor n), the shrinkage family's base matrix.
inline Eigen::MatrixXd biased_cov(const Eigen::MatrixXd& v, const Eigen::VectorXd& mean) {
  Eigen::MatrixXd centered = v.rowwise() - mean.transpose();
  Eigen::MatrixXd s = (centered.transpose() * centered) / static_cast<double>(v.rows());
  return ((s + s.transpose()) / 2.0).eval();
}

}  // namespace detail

inline GaussianEstimate estimate_mle(const EmbeddingMatrix& x) {
  detail::require_samples(x);
  GaussianEstimate g;
  g.n = x.size();
  g.estimator = Estimator::Mle;
  g.mean = detail::column_mean(x.values);
  Eigen::MatrixXd centered = x.values.rowwise() - g.mean.transpose();
  Eigen::MatrixXd s = (centered.transpose() * centered) / static_cast<double>(x.size() - 1);
  g.cov = (s + s.transpose()) / 2.0;
  return g;
}

// (1-alpha) S + alpha (tr S / d) I, with S the biased covariance.
inline GaussianEstimate estimate_basic_shrinkage(const EmbeddingMatrix& x, double alpha = 0.1) {
  detail::require_samples(x);
  if (!(alpha >= 0.0 && alpha <= 1.0))
    raise(Errc::AlphaOutOfRange, "shrinkage alpha must lie in [0,1]");
  GaussianEstimate g;
  g.n = x.size();
  g.estimator = Estimator::BasicShrinkage;
  g.shrinkage_used = alpha;
  g.mean = detail::column_mean(x.values);
  Eigen::MatrixXd s = detail::biased_cov(x.values, g.mean);
  const double d = static_cast<double>(x.dim());
  const double mu = s.trace() / d;
  g.cov = (1.0 - alpha) * s;
  g.cov.diagonal().array() += alpha * mu;
  return g;
}

// Ledoit-Wolf well-conditioned estimator, shrinking toward (tr S / d) I.
// With S the biased covariance and centered rows x_k:
//   m   = tr(S)/d
//   d2  = ||S - m I||_F^2 / d
//   b2  = min(d2, (1/(n^2 d)) sum_k ||x_k x_k^T - S||_F^2)
//   rho = b2 / d2,  Sigma = rho m I + (1 - rho) S
// The sum collapses to sum_k ||x_k||^4 - n ||S||_F^2.
inline GaussianEstimate estimate_ledoit_wolf(const EmbeddingMatrix& x) {
  detail::require_samples(x);
  GaussianEstimate g;
  g.n = x.size();
  g.estimator = Estimator::LedoitWolf;
  g.mean = detail::column_mean(x.values);
  Eigen::MatrixXd s = detail::biased_cov(x.values, g.mean);

  const double n = static_cast<double>(x.size());
  const double d = static_cast<double>(x.dim());
  const double m = s.trace() / d;

  Eigen::MatrixXd deviation = s;
  deviation.diagonal().array() -= m;
  const double d2 = deviation.squaredNorm() / d;

  double rho = 0.0;
  if (d2 > 0.0) {
    Eigen::MatrixXd centered = x.values.rowwise() - g.mean.transpose();
    double fourth = 0.0;
    for (Eigen::Index k = 0; k < centered.rows(); ++k) {
      double sq = centered.row(k).squaredNorm();
      fourth += sq * sq;
    }
    double sum_sq = fourth - n * s.squaredNorm();
    double b2 = sum_sq / (n * n * d);
    b2 = std::min(d2, std::max(0.0, b2));
    rho = b2 / d2;
  }
  g.shrinkage_used = rho;
  g.cov = (1.0 - rho) * s;
  g.cov.diagonal().array() += rho * m;
  return g;
}

// Oracle Approximating Shrinkage toward (tr S / d) I:
//   rho = min(1, [(1 - 2/d) tr(S^2) + tr(S)^2] /
//                [(n + 1 - 2/d) (tr(S^2) - tr(S)^2 / d)])
// A zero denominator means S is already proportional to I; rho = 1.
inline GaussianEstimate estimate_oas(const EmbeddingMatrix& x) {
  detail::require_samples(x);
  GaussianEstimate g;
  g.n = x.size();
  g.estimator = Estimator::Oas;
  g.mean = detail::column_mean(x.values);
  Eigen::MatrixXd s = detail::biased_cov(x.values, g.mean);

  const double n = static_cast<double>(x.size());
  const double d = static_cast<double>(x.dim());
  const double tr = s.trace();
  const double tr_sq = s.squaredNorm();  // tr(S^2) for symmetric S

  const double numerator = (1.0 - 2.0 / d) * tr_sq + tr * tr;
  const double denominator = (n + 1.0 - 2.0 / d) * (tr_sq - tr * tr / d);
  double rho = 1.0;
  if (denominator > 0.0) rho = std::min(1.0, numerator / denominator);

  g.shrinkage_used = rho;
  const double m = tr / d;
  g.cov = (1.0 - rho) * s;
  g.cov.diagonal().array() += rho * m;
  return g;
}

// B resamples of size n with replacement; the estimate is the average of the
// resample means and of the resample unbiased covariances. Resample b draws
// its indices from a stream derived from (seed, b), so the result does not
// depend on evaluation order.
inline GaussianEstimate estimate_bootstrap(const EmbeddingMatrix& x, int b = 200,
                                           std::uint64_t seed = 0) {
  detail::require_samples(x);
  if (b < 1) raise(Errc::InvalidArgument, "bootstrap resample count must be >= 1");
  const Eigen::Index n = x.values.rows();
  const Eigen::Index d = x.values.cols();

  Eigen::VectorXd mean_acc = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd cov_acc = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd resample(n, d);
  for (int rep = 0; rep < b; ++rep) {
    Rng rng(derive_stream(seed, static_cast<std::uint64_t>(rep)));
    for (Eigen::Index i = 0; i < n; ++i)
      resample.row(i) = x.values.row(static_cast<Eigen::Index>(rng.next_below(n)));
    Eigen::VectorXd mu = detail::column_mean(resample);
    Eigen::MatrixXd centered = resample.rowwise() - mu.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    mean_acc += mu;
    cov_acc += cov;
  }

  GaussianEstimate g;
  g.n = x.size();
  g.estimator = Estimator::Bootstrap;
  g.mean = mean_acc / static_cast<double>(b);
  Eigen::MatrixXd s = cov_acc / static_cast<double>(b);
  g.cov = (s + s.transpose()) / 2.0;
  return g;
}

struct EstimatorConfig {
  Estimator kind = Estimator::Mle;
  double shrinkage_alpha = 0.1;
  int bootstrap_b = 200;
  std::uint64_t seed = 0;
};

inline GaussianEstimate estimate(const EmbeddingMatrix& x, const EstimatorConfig& config) {
  switch (config.kind) {
    case Estimator::Mle: return estimate_mle(x);
    case Estimator::Bootstrap: return estimate_bootstrap(x, config.bootstrap_b, config.seed);
    case Estimator::BasicShrinkage: return estimate_basic_shrinkage(x, config.shrinkage_alpha);
    case Estimator::LedoitWolf: return estimate_ledoit_wolf(x);
    case Estimator::Oas: return estimate_oas(x);
  }
  raise(Errc::InvalidArgument, "unknown estimator");
}

}  // namespace fmd
