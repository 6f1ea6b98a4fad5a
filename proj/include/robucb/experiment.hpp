#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robucb/distributions.hpp"
#include "robucb/policies.hpp"

namespace robucb {

enum class OutputFormat { Csv, Json };

struct OutputSpec {
  std::string path;
  OutputFormat format = OutputFormat::Csv;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ExperimentConfig {
  BanditInstance instance;
  PolicyConfig policy;
  std::uint64_t horizon = 0;
  std::uint64_t repetitions = 1;
  std::uint64_t master_seed = 0;
  std::optional<OutputSpec> output;
  /// Rounds at which cumulative regret and pull counts are recorded; empty
  /// selects default_checkpoints(horizon).
  std::vector<std::uint64_t> checkpoints;
  /// Keep the full arm sequence I_1..I_n of every repetition.
  bool record_choices = false;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  std::vector<std::uint64_t> effective_checkpoints() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Geometric grid of (at most) `points` rounds from 1 to horizon, deduplicated,
/// always ending at horizon.
std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon, std::size_t points = 50);

struct RepetitionTrace {
  std::vector<double> regret;                      // per checkpoint
  std::vector<std::vector<std::uint64_t>> pulls;   // [checkpoint][arm]
  std::vector<std::uint64_t> final_pulls;          // T_i(n)
  std::vector<std::uint32_t> choices;              // empty unless recorded
};

struct RegretTrace {
  std::vector<std::uint64_t> checkpoints;
  std::size_t arms = 0;
  std::uint64_t horizon = 0;
  std::vector<RepetitionTrace> repetitions;

  std::vector<double> regret_mean;
  std::vector<double> regret_stderr;
  std::vector<std::vector<double>> pulls_mean;  // [checkpoint][arm]
  std::vector<double> final_pulls_mean;
  std::vector<double> final_pulls_stderr;
};

/// Worker count: explicit request if nonzero, else ROBUCB_WORKERS, else the
/// hardware concurrency.
std::size_t resolve_workers(std::size_t requested = 0);

/// Plays one episode of `config` for repetition `rep`; arm i draws from the
/// stream (master_seed, rep, i).
RepetitionTrace run_repetition(const ExperimentConfig& config, std::uint32_t rep);

/// Runs every repetition (on a worker pool) and aggregates in repetition
/// order; the result does not depend on the number of workers.
RegretTrace run_experiment(const ExperimentConfig& config, std::size_t workers = 0);

}  // namespace robucb
