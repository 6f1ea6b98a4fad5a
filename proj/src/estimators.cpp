#include "robucb/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "robucb/errors.hpp"

namespace robucb {

namespace {

void require_sample(std::span<const double> sample) {
  if (sample.empty()) throw InvalidInput("sample must be non-empty");
  for (double x : sample) {
    if (!std::isfinite(x)) throw InvalidInput("sample contains a non-finite value");
  }
}

double require_u(const MomentParams& params) {
  params.validate();
  if (!params.raw_bound_u) throw InvalidInput("truncated mean needs a raw moment bound u");
  return *params.raw_bound_u;
}

double require_v(const MomentParams& params) {
  params.validate();
  if (!params.central_bound_v) throw InvalidInput("a central moment bound v is required");
  return *params.central_bound_v;
}

// Truncation test |x| <= (u t / L)^{1/(1+eps)}, rearranged as
// |x|^{1+eps} L <= u t so that the power is computed once per observation.
inline bool truncation_keeps(double abs_power, std::size_t index, double u, double log_inv) noexcept {
  return abs_power * log_inv <= u * static_cast<double>(index);
}

}  // namespace

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::Empirical: return "empirical";
    case EstimatorKind::Truncated: return "truncated";
    case EstimatorKind::MedianOfMeans: return "median_of_means";
    case EstimatorKind::Catoni: return "catoni";
  }
  return "unknown";
}

EstimatorKind estimator_kind_from_string(std::string_view name) {
  if (name == "empirical") return EstimatorKind::Empirical;
  if (name == "truncated") return EstimatorKind::Truncated;
  if (name == "median_of_means" || name == "mom") return EstimatorKind::MedianOfMeans;
  if (name == "catoni") return EstimatorKind::Catoni;
  throw InvalidInput("unknown estimator '" + std::string(name) + "'");
}

void MomentParams::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must lie in (0,1]");
  if (raw_bound_u && !(*raw_bound_u >= 0.0 && std::isfinite(*raw_bound_u)))
    throw InvalidInput("raw moment bound u must be finite and >= 0");
  if (central_bound_v && !(*central_bound_v >= 0.0 && std::isfinite(*central_bound_v)))
    throw InvalidInput("central moment bound v must be finite and >= 0");
}

EstimatorSpec EstimatorSpec::empirical(double epsilon, double central_bound_v) {
  MomentParams p{epsilon, std::nullopt, central_bound_v};
  p.validate();
  if (!(central_bound_v > 0.0)) throw InvalidInput("v must be positive");
  return {EstimatorKind::Empirical, p, 3.0, central_bound_v};
}

EstimatorSpec EstimatorSpec::truncated(double epsilon, double raw_bound_u) {
  MomentParams p{epsilon, raw_bound_u, std::nullopt};
  p.validate();
  if (!(raw_bound_u > 0.0)) throw InvalidInput("u must be positive");
  return {EstimatorKind::Truncated, p, std::pow(4.0, (1.0 + epsilon) / epsilon), raw_bound_u};
}

EstimatorSpec EstimatorSpec::median_of_means(double epsilon, double central_bound_v) {
  MomentParams p{epsilon, std::nullopt, central_bound_v};
  p.validate();
  if (!(central_bound_v > 0.0)) throw InvalidInput("v must be positive");
  return {EstimatorKind::MedianOfMeans, p, 16.0, 12.0 * central_bound_v};
}

EstimatorSpec EstimatorSpec::catoni(double variance_bound_v) {
  MomentParams p{1.0, std::nullopt, variance_bound_v};
  p.validate();
  if (!(variance_bound_v > 0.0)) throw InvalidInput("v must be positive");
  return {EstimatorKind::Catoni, p, 4.0, variance_bound_v};
}

double log_inverse_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0,1)");
  return -std::log(delta);
}

double positive_pow(double base, double exponent) {
  if (base == 0.0) return 0.0;
  return std::exp(exponent * std::log(base));
}

double empirical_mean(std::span<const double> sample) {
  require_sample(sample);
  double sum = 0.0;
  for (double x : sample) sum += x;
  return sum / static_cast<double>(sample.size());
}

double empirical_radius(std::size_t n, double delta, const MomentParams& params) {
  const double v = require_v(params);
  if (n == 0) throw InvalidInput("n must be >= 1");
  log_inverse_delta(delta);
  const double eps = params.epsilon;
  const double base = 3.0 * v / (delta * std::pow(static_cast<double>(n), eps));
  return positive_pow(base, 1.0 / (1.0 + eps));
}

double truncated_mean(std::span<const double> sample, double delta, const MomentParams& params) {
  const double u = require_u(params);
  require_sample(sample);
  const double log_inv = log_inverse_delta(delta);
  const double order = 1.0 + params.epsilon;
  double sum = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (truncation_keeps(std::pow(std::abs(sample[i]), order), i + 1, u, log_inv)) sum += sample[i];
  }
  return sum / static_cast<double>(sample.size());
}

std::size_t median_of_means_blocks(std::size_t n, double delta) {
  if (n == 0) throw InvalidInput("n must be >= 1");
  const double log_inv = log_inverse_delta(delta);
  const double k = std::floor(std::min(1.0 + 8.0 * log_inv, static_cast<double>(n) / 2.0));
  return k < 1.0 ? 1 : static_cast<std::size_t>(k);
}

double median_of_means(std::span<const double> sample, double delta) {
  require_sample(sample);
  const std::size_t k = median_of_means_blocks(sample.size(), delta);
  const std::size_t block = sample.size() / k;
  std::vector<double> means(k);
  for (std::size_t b = 0; b < k; ++b) {
    double sum = 0.0;
    for (std::size_t i = b * block; i < (b + 1) * block; ++i) sum += sample[i];
    means[b] = sum / static_cast<double>(block);
  }
  const std::size_t mid = k / 2;
  std::nth_element(means.begin(), means.begin() + mid, means.end());
  if (k % 2 == 1) return means[mid];
  const double upper = means[mid];
  const double lower = *std::max_element(means.begin(), means.begin() + mid);
  return 0.5 * (lower + upper);
}

double catoni_psi(double x) noexcept {
  const double ax = std::abs(x);
  // log(1 + a + a^2/2) = 2 log a - log 2 + O(1/a); avoids overflow of a^2.
  const double magnitude =
      ax > 1e100 ? 2.0 * std::log(ax) - std::log(2.0) : std::log1p(ax + 0.5 * ax * ax);
  return x >= 0.0 ? magnitude : -magnitude;
}

double catoni_alpha(std::size_t n, double delta, double variance_bound_v) {
  if (!(variance_bound_v > 0.0 && std::isfinite(variance_bound_v)))
    throw InvalidInput("Catoni needs a positive variance bound v");
  const double log_inv = log_inverse_delta(delta);
  const double nd = static_cast<double>(n);
  if (!(nd > 2.0 * log_inv))
    throw PreconditionError("Catoni estimator needs n > 2 log(1/delta)");
  const double v = variance_bound_v;
  return std::sqrt(2.0 * log_inv / (nd * (v + 2.0 * v * log_inv / (nd - 2.0 * log_inv))));
}

std::vector<ValueCount> group_sample(std::span<const double> sample) {
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<ValueCount> grouped;
  for (double x : sorted) {
    if (!grouped.empty() && grouped.back().value == x) {
      ++grouped.back().count;
    } else {
      grouped.push_back({x, 1});
    }
  }
  return grouped;
}

double catoni_objective(std::span<const ValueCount> grouped, double alpha, double m) noexcept {
  double sum = 0.0;
  for (const auto& [value, count] : grouped) sum += static_cast<double>(count) * catoni_psi(alpha * (value - m));
  return sum;
}

double catoni_root(std::span<const ValueCount> grouped, double alpha) {
  if (grouped.empty()) throw InvalidInput("sample must be non-empty");
  double lo = grouped.front().value;
  double hi = grouped.back().value;
  if (lo == hi) return lo;

  auto f = [&](double m) { return catoni_objective(grouped, alpha, m); };
  double f_lo = f(lo);
  double f_hi = f(hi);
  // The objective is decreasing in m and psi(0) = 0, so [min, max] already
  // brackets the root; the expansion only guards against rounding.
  const double width = hi - lo;
  for (double step = width; f_lo < 0.0 && std::isfinite(step); step *= 2.0) {
    lo -= step;
    f_lo = f(lo);
  }
  for (double step = width; f_hi > 0.0 && std::isfinite(step); step *= 2.0) {
    hi += step;
    f_hi = f(hi);
  }
  if (!(f_lo >= 0.0 && f_hi <= 0.0)) throw InternalError("Catoni root bracket expansion failed");

  for (int iter = 0; iter < 200; ++iter) {
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  const double root = std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
  const double residual = std::min(std::abs(f_lo), std::abs(f_hi));

  std::uint64_t n = 0;
  for (const auto& g : grouped) n += g.count;
  const double range = grouped.back().value - grouped.front().value;
  const double tolerance = 1e-9 * static_cast<double>(n) * std::max(1.0, alpha * range);
  if (!(residual <= tolerance)) throw InternalError("Catoni root residual above tolerance");
  return root;
}

double catoni_mean_grouped(std::span<const ValueCount> grouped, std::size_t n, double delta,
                           double variance_bound_v) {
  const double alpha = catoni_alpha(n, delta, variance_bound_v);
  return catoni_root(grouped, alpha);
}

double catoni_mean(std::span<const double> sample, double delta, const MomentParams& params) {
  const double v = require_v(params);
  if (params.epsilon != 1.0) throw InvalidInput("Catoni estimator requires epsilon = 1");
  require_sample(sample);
  const auto grouped = group_sample(sample);
  return catoni_mean_grouped(grouped, sample.size(), delta, v);
}

double estimate(const EstimatorSpec& spec, std::span<const double> sample, double delta) {
  switch (spec.kind()) {
    case EstimatorKind::Empirical:
      log_inverse_delta(delta);
      return empirical_mean(sample);
    case EstimatorKind::Truncated: return truncated_mean(sample, delta, spec.params());
    case EstimatorKind::MedianOfMeans: return median_of_means(sample, delta);
    case EstimatorKind::Catoni: return catoni_mean(sample, delta, spec.params());
  }
  throw InternalError("unhandled estimator kind");
}

double confidence_radius(const EstimatorSpec& spec, std::size_t s, double delta) {
  if (s == 0) throw InvalidInput("s must be >= 1");
  if (spec.kind() == EstimatorKind::Empirical) return empirical_radius(s, delta, spec.params());
  double log_term = log_inverse_delta(delta);
  if (spec.kind() == EstimatorKind::MedianOfMeans) log_term += 0.125;
  const double eps = spec.epsilon();
  return positive_pow(spec.v_policy(), 1.0 / (1.0 + eps)) *
         positive_pow(spec.c_policy() * log_term / static_cast<double>(s), eps / (1.0 + eps));
}

TruncatedMeanTracker::TruncatedMeanTracker(MomentParams params) : params_(params) { require_u(params_); }

void TruncatedMeanTracker::push(double x) {
  if (!std::isfinite(x)) throw InvalidInput("sample contains a non-finite value");
  values_.push_back(x);
  abs_powers_.push_back(std::pow(std::abs(x), 1.0 + params_.epsilon));
}

double TruncatedMeanTracker::estimate(double delta) {
  if (values_.empty()) throw InvalidInput("sample must be non-empty");
  const double log_inv = log_inverse_delta(delta);
  const double u = *params_.raw_bound_u;
  if (log_inv != cached_log_inv_) {
    cached_log_inv_ = log_inv;
    cached_n_ = 0;
    cached_sum_ = 0.0;
  }
  // Appending continues the same left-to-right sum truncated_mean() computes.
  for (std::size_t i = cached_n_; i < values_.size(); ++i) {
    if (truncation_keeps(abs_powers_[i], i + 1, u, log_inv)) cached_sum_ += values_[i];
  }
  cached_n_ = values_.size();
  return cached_sum_ / static_cast<double>(values_.size());
}

}  // namespace robucb
