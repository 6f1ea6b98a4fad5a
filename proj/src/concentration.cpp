#include "robucb/concentration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "robucb/errors.hpp"
#include "robucb/experiment.hpp"

namespace robucb {

namespace {

// Moments are partly computed by quadrature; allow for its rounding.
constexpr double kMomentSlack = 1e-9;

void check_moment_assumption(const EstimatorSpec& spec, const Distribution& dist) {
  const Moments m = dist.moments(spec.epsilon());
  const auto& params = spec.params();
  if (spec.kind() == EstimatorKind::Truncated) {
    const double u = *params.raw_bound_u;
    if (!(m.raw <= u * (1.0 + kMomentSlack))) {
      std::ostringstream msg;
      msg << "raw (1+eps)-moment " << m.raw << " of " << dist.describe() << " exceeds u = " << u;
      throw ValidationError("u", msg.str());
    }
  } else {
    const double v = *params.central_bound_v;
    if (!(m.central <= v * (1.0 + kMomentSlack))) {
      std::ostringstream msg;
      msg << "central (1+eps)-moment " << m.central << " of " << dist.describe() << " exceeds v = " << v;
      throw ValidationError("v", msg.str());
    }
  }
}

}  // namespace

ConcentrationReport run_concentration(const EstimatorSpec& spec, const Distribution& distribution, std::size_t n,
                                      Threshold threshold, std::size_t trials, std::uint64_t seed,
                                      std::size_t workers) {
  if (n < 1) throw ValidationError("n", "sample size must be >= 1");
  if (trials < 1) throw ValidationError("trials", "trials must be >= 1");
  if (trials > 0xFFFFFFFFull) throw ValidationError("trials", "too many trials");
  check_moment_assumption(spec, distribution);

  const double mu = distribution.mean();
  const double eps = spec.epsilon();
  double deviation = 0.0;
  double bound = 0.0;
  if (threshold.kind == Threshold::Kind::Delta) {
    const double delta = threshold.value;
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta", "delta must lie in (0,1)");
    if (spec.kind() == EstimatorKind::Catoni && !(static_cast<double>(n) > 2.0 * std::log(1.0 / delta)))
      throw ValidationError("n", "Catoni's estimator needs n > 2 log(1/delta)");
    deviation = confidence_radius(spec, n, delta);
    bound = delta;
  } else {
    if (spec.kind() != EstimatorKind::Empirical)
      throw ValidationError("eta", "a deviation threshold eta applies to the empirical mean only");
    if (!(threshold.value > 0.0 && std::isfinite(threshold.value)))
      throw ValidationError("eta", "eta must be positive");
    deviation = threshold.value;
    const double v = *spec.params().central_bound_v;
    bound = 3.0 * v / (std::pow(static_cast<double>(n), eps) * std::pow(deviation, 1.0 + eps));
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> upper{0};
  std::atomic<std::size_t> lower{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    std::vector<double> sample(n);
    std::size_t local_upper = 0;
    std::size_t local_lower = 0;
    try {
      for (std::size_t j = next++; j < trials; j = next++) {
        RandomStream stream(seed, static_cast<std::uint32_t>(j), 0);
        for (auto& x : sample) x = distribution.sample(stream);
        const double est = threshold.kind == Threshold::Kind::Delta ? estimate(spec, sample, threshold.value)
                                                                    : empirical_mean(sample);
        if (est - mu > deviation) ++local_upper;
        if (mu - est > deviation) ++local_lower;
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = trials;
    }
    upper += local_upper;
    lower += local_lower;
  };
  const std::size_t pool = std::min(resolve_workers(workers), trials);
  if (pool <= 1) {
    work();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < pool; ++w) threads.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  ConcentrationReport report{spec, distribution, n, threshold, trials, seed, mu, deviation, bound,
                             upper.load(), lower.load(), 0.0};
  const double p = threshold.kind == Threshold::Kind::Delta ? threshold.value : report.upper_rate();
  report.binomial_stderr = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return report;
}

}  // namespace robucb
