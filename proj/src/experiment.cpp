#include "robucb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "robucb/errors.hpp"

namespace robucb {

void ExperimentConfig::validate() const {
  policy.validate();
  if (horizon < instance.size())
    throw ValidationError("horizon", "horizon must be at least the number of arms");
  if (repetitions < 1) throw ValidationError("repetitions", "repetitions must be >= 1");
  if (repetitions > 0xFFFFFFFFull) throw ValidationError("repetitions", "too many repetitions");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > horizon)
      throw ValidationError("checkpoints", "checkpoints must lie in [1, horizon]");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw ValidationError("checkpoints", "checkpoints must be strictly increasing");
  }
  if (output && output->path.empty()) throw ValidationError("output.path", "output path must be non-empty");
}

std::vector<std::uint64_t> ExperimentConfig::effective_checkpoints() const {
  return checkpoints.empty() ? default_checkpoints(horizon) : checkpoints;
}

std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon, std::size_t points) {
  if (horizon == 0) throw InvalidInput("horizon must be >= 1");
  std::vector<std::uint64_t> grid;
  if (points < 2) return {horizon};
  const double log_n = std::log(static_cast<double>(horizon));
  for (std::size_t j = 0; j < points; ++j) {
    const double t = std::exp(log_n * static_cast<double>(j) / static_cast<double>(points - 1));
    auto rounded = static_cast<std::uint64_t>(std::llround(t));
    rounded = std::clamp<std::uint64_t>(rounded, 1, horizon);
    if (grid.empty() || rounded > grid.back()) grid.push_back(rounded);
  }
  if (grid.back() != horizon) grid.push_back(horizon);
  return grid;
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ROBUCB_WORKERS")) {
    char* end = nullptr;
    const unsigned long value = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

RepetitionTrace run_repetition(const ExperimentConfig& config, std::uint32_t rep) {
  const auto checkpoints = config.effective_checkpoints();
  const std::size_t arms = config.instance.size();
  const auto gaps = config.instance.gaps();

  std::vector<RandomStream> streams;
  streams.reserve(arms);
  for (std::size_t i = 0; i < arms; ++i) {
    streams.emplace_back(config.master_seed, rep, static_cast<std::uint32_t>(i));
  }

  PolicyState state(config.policy, arms);
  RepetitionTrace trace;
  trace.regret.reserve(checkpoints.size());
  trace.pulls.reserve(checkpoints.size());
  if (config.record_choices) trace.choices.reserve(config.horizon);

  double regret = 0.0;
  std::size_t next_checkpoint = 0;
  for (std::uint64_t t = 1; t <= config.horizon; ++t) {
    const std::size_t arm = state.select_arm(t);
    state.update(arm, config.instance.arm(arm).sample(streams[arm]));
    regret += gaps[arm];
    if (config.record_choices) trace.choices.push_back(static_cast<std::uint32_t>(arm));
    if (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == t) {
      trace.regret.push_back(regret);
      std::vector<std::uint64_t> pulls(arms);
      for (std::size_t i = 0; i < arms; ++i) pulls[i] = state.pulls(i);
      trace.pulls.push_back(std::move(pulls));
      ++next_checkpoint;
    }
  }
  trace.final_pulls.resize(arms);
  for (std::size_t i = 0; i < arms; ++i) trace.final_pulls[i] = state.pulls(i);
  return trace;
}

namespace {

struct MeanAndError {
  double mean;
  double stderr_;
};

template <class Get>
MeanAndError mean_and_stderr(const std::vector<RepetitionTrace>& reps, Get get) {
  const double r = static_cast<double>(reps.size());
  double sum = 0.0;
  for (const auto& rep : reps) sum += get(rep);
  const double mean = sum / r;
  if (reps.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const auto& rep : reps) {
    const double d = get(rep) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / (r - 1.0) / r)};
}

}  // namespace

RegretTrace run_experiment(const ExperimentConfig& config, std::size_t workers) {
  config.validate();
  const std::size_t reps = config.repetitions;
  RegretTrace trace;
  trace.checkpoints = config.effective_checkpoints();
  trace.arms = config.instance.size();
  trace.horizon = config.horizon;
  trace.repetitions.resize(reps);

  const std::size_t pool = std::min(resolve_workers(workers), reps);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        trace.repetitions[r] = run_repetition(config, static_cast<std::uint32_t>(r));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = reps;
      }
    }
  };
  if (pool <= 1) {
    work();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(pool);
    for (std::size_t w = 0; w < pool; ++w) threads.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  const std::size_t points = trace.checkpoints.size();
  trace.regret_mean.resize(points);
  trace.regret_stderr.resize(points);
  trace.pulls_mean.assign(points, std::vector<double>(trace.arms));
  for (std::size_t c = 0; c < points; ++c) {
    const auto regret = mean_and_stderr(trace.repetitions, [c](const RepetitionTrace& r) { return r.regret[c]; });
    trace.regret_mean[c] = regret.mean;
    trace.regret_stderr[c] = regret.stderr_;
    for (std::size_t i = 0; i < trace.arms; ++i) {
      trace.pulls_mean[c][i] = mean_and_stderr(trace.repetitions, [c, i](const RepetitionTrace& r) {
                                 return static_cast<double>(r.pulls[c][i]);
                               }).mean;
    }
  }
  trace.final_pulls_mean.resize(trace.arms);
  trace.final_pulls_stderr.resize(trace.arms);
  for (std::size_t i = 0; i < trace.arms; ++i) {
    const auto pulls = mean_and_stderr(trace.repetitions, [i](const RepetitionTrace& r) {
      return static_cast<double>(r.final_pulls[i]);
    });
    trace.final_pulls_mean[i] = pulls.mean;
    trace.final_pulls_stderr[i] = pulls.stderr_;
  }
  return trace;
}

}  // namespace robucb
