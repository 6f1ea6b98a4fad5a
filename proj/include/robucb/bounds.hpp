#pragma once

// Closed-form regret, pull-count and lower-bound values for the robust UCB
// policies. Logarithms are natural; n is real so that log n can be any
// nonnegative value. Sums run over suboptimal arms only (gap > 0).

#include <cstddef>
#include <optional>
#include <vector>

namespace robucb {

struct BoundInput {
  double epsilon = 1.0;
  std::optional<double> u;
  std::optional<double> v;
  std::optional<double> c;
  std::vector<double> gaps;
  double n = 1.0;
  std::size_t arms = 2;

  /// Throws InvalidInput on negative gaps, n < 1, arms < 2 or epsilon outside (0,1].
  void validate() const;
};

/// sum [2c (v/gap)^{1/eps} log n + 5 gap]
double prop1_gap_bound(const BoundInput& in);

/// n^{1/(1+eps)} (4 K c log n)^{eps/(1+eps)} v^{1/(1+eps)}. Valid only when
/// log n >= 5 gap^{(1+eps)/eps} / (2 c v^{1/eps}) for every gap; otherwise
/// throws PreconditionError naming the offending gap.
double prop1_free_bound(const BoundInput& in);

/// sum [8 (4u/gap)^{1/eps} log n + 5 gap]
double thm_truncated_bound(const BoundInput& in);

/// sum [32 (12v/gap)^{1/eps} log n + 5 gap]
double thm_mom_bound(const BoundInput& in);

/// sum [8 v log n / gap + 8 gap log n + 5 gap]; epsilon must be 1.
double thm_catoni_bound(const BoundInput& in);

/// Bound on E T_i(n) for one suboptimal arm: 2c v^{1/eps} / gap^{(1+eps)/eps} log n + 5.
double expected_pulls_bound(double c, double v, double epsilon, double gap, double n);

/// Asymptotic coefficient of log n in the gap-dependent lower bound: 0.4 / gap^{1/eps}.
double lower_gap_coefficient(double gap, double epsilon);

/// 0.01 K^{eps/(1+eps)} n^{1/(1+eps)}
double lower_free_bound(std::size_t arms, double n, double epsilon);

}  // namespace robucb
