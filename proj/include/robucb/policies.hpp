#pragma once

// UCB-style arm selection on top of the robust estimators.
//
// Robust UCB plays an arm maximizing
//     B_{i,s,t} = mu_hat(s, delta = t^-2) + confidence_radius(spec, s, t^-2)
// with B = +inf for unpulled arms. The modified variant for Catoni's
// estimator also returns +inf while s < 8 log t. The baseline is the classic
// sub-Gaussian UCB with index mean + sqrt(4 v log t / s).

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "robucb/estimators.hpp"

namespace robucb {

enum class PolicyVariant { RobustUcb, ModifiedRobustUcb, BaselineUcb };

std::string_view to_string(PolicyVariant variant) noexcept;
PolicyVariant policy_variant_from_string(std::string_view name);

struct PolicyConfig {
  PolicyVariant variant = PolicyVariant::RobustUcb;
  std::optional<EstimatorSpec> estimator;  // required by both robust variants
  double variance_factor = 0.0;            // baseline only

  static PolicyConfig robust_ucb(EstimatorSpec spec);
  static PolicyConfig modified_robust_ucb(EstimatorSpec catoni_spec);
  static PolicyConfig baseline_ucb(double variance_factor);

  /// Throws ValidationError when the variant and estimator do not match
  /// (modified robust UCB needs Catoni, robust UCB rejects it, baseline
  /// needs a positive variance factor).
  void validate() const;

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

/// Largest reward magnitude accepted by update(); keeps |x|^{1+eps} finite.
inline constexpr double kMaxRewardMagnitude = 1e300;

/// Per-episode state: arrival-ordered reward histories, pull counts, the
/// number of completed rounds and a per-arm estimate memo.
///
/// Memo keys: empirical -> T_i; truncated and Catoni -> (T_i, log t^2);
/// median of means -> (T_i, k). Memoized and fresh estimates are
/// bit-identical.
class PolicyState {
 public:
  PolicyState(PolicyConfig config, std::size_t arms);

  const PolicyConfig& config() const noexcept { return config_; }
  std::size_t arms() const noexcept { return histories_.size(); }
  /// Rounds completed so far; the next round is time() + 1.
  std::uint64_t time() const noexcept { return time_; }
  std::uint64_t pulls(std::size_t arm) const { return histories_.at(arm).size(); }
  std::span<const double> history(std::size_t arm) const { return histories_.at(arm); }
  /// Left-to-right sum of the history; equals empirical_mean(history) * T_i before rounding.
  double reward_sum(std::size_t arm) const { return scratch_.at(arm).running_sum; }

  /// Index of `arm` when choosing round t (t > time()); +inf when unpulled
  /// or, for the modified variant, when T_i < 8 log t.
  double index(std::size_t arm, std::uint64_t t) const;

  /// Arm maximizing index(., t); ties go to the lowest arm.
  std::size_t select_arm(std::uint64_t t) const;

  /// Records `reward` for `arm` and advances time by one round.
  void update(std::size_t arm, double reward);

 private:
  struct Memo {
    bool valid = false;
    std::uint64_t pulls = 0;
    double key = 0.0;
    double estimate = 0.0;
  };

  struct ArmScratch {
    std::optional<TruncatedMeanTracker> truncated;
    std::vector<ValueCount> grouped;  // Catoni only, sorted by value
    double running_sum = 0.0;         // empirical and baseline
  };

  double arm_estimate(std::size_t arm, double delta) const;
  void require_arm(std::size_t arm) const;

  PolicyConfig config_;
  std::vector<std::vector<double>> histories_;
  mutable std::vector<ArmScratch> scratch_;
  mutable std::vector<Memo> memo_;
  std::uint64_t time_ = 0;
};

/// delta = t^{-2} as used by every robust index.
double round_delta(std::uint64_t t);

/// sqrt(4 v log t / s) for real t >= 1.
double subgaussian_ucb_radius(double variance_factor, double t, std::uint64_t pulls);

/// Baseline sub-Gaussian UCB index: empirical mean + sqrt(4 v log t / T_i);
/// +inf for an unpulled arm.
double baseline_subgaussian_ucb_index(const PolicyState& state, std::size_t arm, std::uint64_t t,
                                      double variance_factor);

}  // namespace robucb
