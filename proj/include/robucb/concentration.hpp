#pragma once

#include <cstddef>
#include <cstdint>

#include "robucb/distributions.hpp"
#include "robucb/estimators.hpp"

namespace robucb {

/// Either a confidence level delta (violation means leaving the estimator's
/// confidence radius) or a fixed deviation eta for the empirical mean
/// (violation means |mu_hat - mu| > eta, compared with 3v / (n^eps eta^{1+eps})).
struct Threshold {
  enum class Kind { Delta, Eta };
  Kind kind;
  double value;

  static Threshold delta(double d) { return {Kind::Delta, d}; }
  static Threshold eta(double e) { return {Kind::Eta, e}; }
};

struct ConcentrationReport {
  EstimatorSpec spec;
  Distribution distribution;
  std::size_t n;
  Threshold threshold;
  std::size_t trials;
  std::uint64_t seed;

  double mean;       // true mean of the distribution
  double deviation;  // radius (delta mode) or eta
  double bound;      // delta, or 3v / (n^eps eta^{1+eps})
  std::size_t upper_violations;
  std::size_t lower_violations;
  /// sqrt(delta (1-delta) / trials) in delta mode; in eta mode the same
  /// expression at the measured upper-tail rate.
  double binomial_stderr;

  double upper_rate() const { return static_cast<double>(upper_violations) / static_cast<double>(trials); }
  double lower_rate() const { return static_cast<double>(lower_violations) / static_cast<double>(trials); }
};

/// Draws `trials` independent samples of size n (trial j uses stream
/// (seed, j, 0)), estimates the mean and counts upper- and lower-tail
/// violations.
///
/// Throws ValidationError when the assumed moment bound is below the
/// distribution's actual moment, when eta mode is used with an estimator
/// other than the empirical mean, or when Catoni's n > 2 log(1/delta) fails.
ConcentrationReport run_concentration(const EstimatorSpec& spec, const Distribution& distribution, std::size_t n,
                                      Threshold threshold, std::size_t trials, std::uint64_t seed,
                                      std::size_t workers = 0);

}  // namespace robucb
