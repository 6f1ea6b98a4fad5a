#include "robucb/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "robucb/errors.hpp"

namespace robucb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string_view to_string(PolicyVariant variant) noexcept {
  switch (variant) {
    case PolicyVariant::RobustUcb: return "robust_ucb";
    case PolicyVariant::ModifiedRobustUcb: return "modified_robust_ucb";
    case PolicyVariant::BaselineUcb: return "baseline_ucb";
  }
  return "unknown";
}

PolicyVariant policy_variant_from_string(std::string_view name) {
  if (name == "robust_ucb") return PolicyVariant::RobustUcb;
  if (name == "modified_robust_ucb") return PolicyVariant::ModifiedRobustUcb;
  if (name == "baseline_ucb") return PolicyVariant::BaselineUcb;
  throw ValidationError("policy.variant", "unknown policy variant '" + std::string(name) + "'");
}

PolicyConfig PolicyConfig::robust_ucb(EstimatorSpec spec) {
  PolicyConfig config{PolicyVariant::RobustUcb, spec, 0.0};
  config.validate();
  return config;
}

PolicyConfig PolicyConfig::modified_robust_ucb(EstimatorSpec catoni_spec) {
  PolicyConfig config{PolicyVariant::ModifiedRobustUcb, catoni_spec, 0.0};
  config.validate();
  return config;
}

PolicyConfig PolicyConfig::baseline_ucb(double variance_factor) {
  PolicyConfig config{PolicyVariant::BaselineUcb, std::nullopt, variance_factor};
  config.validate();
  return config;
}

void PolicyConfig::validate() const {
  switch (variant) {
    case PolicyVariant::RobustUcb:
      if (!estimator) throw ValidationError("policy.estimator", "robust_ucb needs an estimator");
      if (estimator->kind() == EstimatorKind::Catoni)
        throw ValidationError("policy.estimator", "Catoni's estimator runs under modified_robust_ucb");
      break;
    case PolicyVariant::ModifiedRobustUcb:
      if (!estimator || estimator->kind() != EstimatorKind::Catoni)
        throw ValidationError("policy.estimator", "modified_robust_ucb needs the catoni estimator");
      break;
    case PolicyVariant::BaselineUcb:
      if (!(variance_factor > 0.0 && std::isfinite(variance_factor)))
        throw ValidationError("policy.variance_factor", "baseline_ucb needs a positive variance factor");
      break;
  }
}

double round_delta(std::uint64_t t) {
  const double td = static_cast<double>(t);
  return 1.0 / (td * td);
}

PolicyState::PolicyState(PolicyConfig config, std::size_t arms)
    : config_(std::move(config)), histories_(arms), scratch_(arms), memo_(arms) {
  config_.validate();
  if (arms == 0) throw InvalidInput("a policy needs at least one arm");
  if (config_.estimator && config_.estimator->kind() == EstimatorKind::Truncated) {
    for (auto& s : scratch_) s.truncated.emplace(config_.estimator->params());
  }
}

void PolicyState::require_arm(std::size_t arm) const {
  if (arm >= histories_.size()) throw InvalidInput("arm index out of range");
}

double PolicyState::arm_estimate(std::size_t arm, double delta) const {
  const EstimatorSpec& spec = *config_.estimator;
  const auto& history = histories_[arm];
  const std::uint64_t pulls = history.size();
  auto& memo = memo_[arm];
  auto& scratch = scratch_[arm];

  double key = 0.0;
  switch (spec.kind()) {
    case EstimatorKind::Empirical: key = 0.0; break;
    case EstimatorKind::Truncated:
    case EstimatorKind::Catoni: key = log_inverse_delta(delta); break;
    case EstimatorKind::MedianOfMeans: key = static_cast<double>(median_of_means_blocks(pulls, delta)); break;
  }
  if (memo.valid && memo.pulls == pulls && memo.key == key) return memo.estimate;

  double value = 0.0;
  switch (spec.kind()) {
    case EstimatorKind::Empirical: value = scratch.running_sum / static_cast<double>(pulls); break;
    case EstimatorKind::Truncated: value = scratch.truncated->estimate(delta); break;
    case EstimatorKind::MedianOfMeans: value = median_of_means(history, delta); break;
    case EstimatorKind::Catoni:
      value = catoni_mean_grouped(scratch.grouped, pulls, delta, *spec.params().central_bound_v);
      break;
  }
  memo = {true, pulls, key, value};
  return value;
}

double PolicyState::index(std::size_t arm, std::uint64_t t) const {
  require_arm(arm);
  if (t <= time_) throw PreconditionError("index must be evaluated for a future round t > time()");
  const std::uint64_t pulls = histories_[arm].size();
  if (pulls == 0) return kInf;

  if (config_.variant == PolicyVariant::BaselineUcb) {
    return baseline_subgaussian_ucb_index(*this, arm, t, config_.variance_factor);
  }
  const double delta = round_delta(t);
  const EstimatorSpec& spec = *config_.estimator;
  if (config_.variant == PolicyVariant::ModifiedRobustUcb &&
      static_cast<double>(pulls) < 8.0 * std::log(static_cast<double>(t))) {
    return kInf;
  }
  return arm_estimate(arm, delta) + confidence_radius(spec, pulls, delta);
}

std::size_t PolicyState::select_arm(std::uint64_t t) const {
  std::size_t best = 0;
  double best_index = index(0, t);
  for (std::size_t arm = 1; arm < histories_.size(); ++arm) {
    if (best_index == kInf) break;
    const double value = index(arm, t);
    if (value > best_index) {
      best = arm;
      best_index = value;
    }
  }
  return best;
}

void PolicyState::update(std::size_t arm, double reward) {
  require_arm(arm);
  if (!std::isfinite(reward) || std::abs(reward) > kMaxRewardMagnitude)
    throw InvalidInput("reward must be finite with magnitude <= 1e300");
  histories_[arm].push_back(reward);
  auto& scratch = scratch_[arm];
  scratch.running_sum += reward;
  if (scratch.truncated) scratch.truncated->push(reward);
  if (config_.estimator && config_.estimator->kind() == EstimatorKind::Catoni) {
    auto& grouped = scratch.grouped;
    auto it = std::lower_bound(grouped.begin(), grouped.end(), reward,
                               [](const ValueCount& g, double x) { return g.value < x; });
    if (it != grouped.end() && it->value == reward) {
      ++it->count;
    } else {
      grouped.insert(it, ValueCount{reward, 1});
    }
  }
  memo_[arm].valid = false;
  ++time_;
}

double baseline_subgaussian_ucb_index(const PolicyState& state, std::size_t arm, std::uint64_t t,
                                      double variance_factor) {
  const std::uint64_t pulls = state.pulls(arm);
  if (pulls == 0) return kInf;
  return state.reward_sum(arm) / static_cast<double>(pulls) +
         subgaussian_ucb_radius(variance_factor, static_cast<double>(t), pulls);
}

double subgaussian_ucb_radius(double variance_factor, double t, std::uint64_t pulls) {
  if (!(variance_factor > 0.0)) throw InvalidInput("variance factor must be positive");
  if (!(t >= 1.0)) throw InvalidInput("t must be >= 1");
  if (pulls == 0) throw InvalidInput("pulls must be >= 1");
  return std::sqrt(4.0 * variance_factor * std::log(t) / static_cast<double>(pulls));
}

}  // namespace robucb
