#pragma once

// Mean estimators for heavy-tailed samples and their confidence radii.
//
// Every estimator takes the sample in arrival order and a confidence level
// delta in (0,1). The radius returned by confidence_radius() has the form
//
//     v^{1/(1+eps)} * (c * log(1/delta) / s)^{eps/(1+eps)}
//
// with (c, v) fixed per estimator by EstimatorSpec, except for the plain
// empirical mean whose Chebyshev-type radius is polynomial in 1/delta.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace robucb {

enum class EstimatorKind { Empirical, Truncated, MedianOfMeans, Catoni };

std::string_view to_string(EstimatorKind kind) noexcept;
/// Accepts "empirical", "truncated", "median_of_means" (or "mom") and "catoni".
EstimatorKind estimator_kind_from_string(std::string_view name);

/// Moment order is 1 + epsilon. raw_bound_u bounds E|X|^{1+eps};
/// central_bound_v bounds E|X - mu|^{1+eps}.
struct MomentParams {
  double epsilon = 1.0;
  std::optional<double> raw_bound_u;
  std::optional<double> central_bound_v;

  /// Throws InvalidInput unless epsilon is in (0,1] and present bounds are >= 0.
  void validate() const;

  friend bool operator==(const MomentParams&, const MomentParams&) = default;
};

/// An estimator together with the constants (c, v) under which it satisfies
/// the two-sided confidence bound used by the UCB index.
class EstimatorSpec {
 public:
  /// Empirical mean with the Chebyshev-type radius (3v / (delta n^eps))^{1/(1+eps)}.
  static EstimatorSpec empirical(double epsilon, double central_bound_v);
  /// Truncated empirical mean; c = 4^{(1+eps)/eps}, v = u.
  static EstimatorSpec truncated(double epsilon, double raw_bound_u);
  /// Median of means; c = 16, v = 12 v.
  static EstimatorSpec median_of_means(double epsilon, double central_bound_v);
  /// Catoni's M-estimator (variance only); c = 4, v = v.
  static EstimatorSpec catoni(double variance_bound_v);

  EstimatorKind kind() const noexcept { return kind_; }
  const MomentParams& params() const noexcept { return params_; }
  double epsilon() const noexcept { return params_.epsilon; }
  double c_policy() const noexcept { return c_policy_; }
  double v_policy() const noexcept { return v_policy_; }

  friend bool operator==(const EstimatorSpec&, const EstimatorSpec&) = default;

 private:
  EstimatorSpec(EstimatorKind kind, MomentParams params, double c, double v)
      : kind_(kind), params_(params), c_policy_(c), v_policy_(v) {}

  EstimatorKind kind_;
  MomentParams params_;
  double c_policy_;
  double v_policy_;
};

/// log(1/delta); throws InvalidInput unless delta is in (0,1).
double log_inverse_delta(double delta);

/// x^{1/(1+eps)}-style powers via exp/log; returns 0 for a zero base.
double positive_pow(double base, double exponent);

double empirical_mean(std::span<const double> sample);

/// (3 v / (delta n^eps))^{1/(1+eps)}. Requires central_bound_v.
double empirical_radius(std::size_t n, double delta, const MomentParams& params);

/// Keeps X_t iff |X_t| <= (u t / log(1/delta))^{1/(1+eps)}, t the 1-based
/// arrival index, and divides the kept sum by n. Requires raw_bound_u.
double truncated_mean(std::span<const double> sample, double delta, const MomentParams& params);

/// Number of blocks: max(1, floor(min(8 log(e^{1/8}/delta), n/2))).
std::size_t median_of_means_blocks(std::size_t n, double delta);

/// Median of the block means over k consecutive blocks of floor(n/k)
/// samples; trailing samples are dropped. No moment parameter is needed.
double median_of_means(std::span<const double> sample, double delta);

/// Influence function glued from the two admissible bounding branches:
/// log(1+x+x^2/2) for x >= 0 and -log(1-x+x^2/2) for x < 0.
double catoni_psi(double x) noexcept;

/// alpha_delta = sqrt(2L / (n (v + 2vL/(n - 2L)))), L = log(1/delta).
/// Throws PreconditionError unless n > 2 log(1/delta).
double catoni_alpha(std::size_t n, double delta, double variance_bound_v);

/// A distinct sample value and its multiplicity.
struct ValueCount {
  double value;
  std::uint64_t count;
};

/// Sorted run-length view of a sample. catoni_mean works on this form so that
/// callers maintaining it incrementally get bit-identical results.
std::vector<ValueCount> group_sample(std::span<const double> sample);

/// Root of sum_i psi(alpha (X_i - m)) = 0 for a grouped sample.
double catoni_root(std::span<const ValueCount> grouped, double alpha);

/// Sum_i psi(alpha (X_i - m)) over a grouped sample.
double catoni_objective(std::span<const ValueCount> grouped, double alpha, double m) noexcept;

/// Catoni's estimate. Requires epsilon = 1, central_bound_v and
/// n > 2 log(1/delta).
double catoni_mean(std::span<const double> sample, double delta, const MomentParams& params);
double catoni_mean_grouped(std::span<const ValueCount> grouped, std::size_t n, double delta,
                           double variance_bound_v);

/// Dispatches on spec.kind().
double estimate(const EstimatorSpec& spec, std::span<const double> sample, double delta);

/// v^{1/(1+eps)} (c log(1/delta) / s)^{eps/(1+eps)}, with log(e^{1/8}/delta)
/// in place of log(1/delta) for median of means and empirical_radius() for
/// the empirical mean.
double confidence_radius(const EstimatorSpec& spec, std::size_t s, double delta);

/// Incremental form of truncated_mean for a growing sample. Caches
/// |X|^{1+eps} per observation and the kept sum for the last delta; the value
/// returned is bit-identical to truncated_mean() on the same inputs.
class TruncatedMeanTracker {
 public:
  explicit TruncatedMeanTracker(MomentParams params);

  void push(double x);
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  double estimate(double delta);

 private:
  MomentParams params_;
  std::vector<double> values_;
  std::vector<double> abs_powers_;
  double cached_log_inv_ = -1.0;
  std::size_t cached_n_ = 0;
  double cached_sum_ = 0.0;
};

}  // namespace robucb
