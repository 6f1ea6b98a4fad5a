#pragma once

// JSON configuration and result files.
//
// Experiment config (unknown fields are rejected everywhere):
//
//   {
//     "instance":   {"arms": [<distribution>, ...]}
//                 | {"lower_bound_pair": {"gap": g, "epsilon": e}}
//                 | {"lower_bound_instance": {"arms": K, "horizon": n, "epsilon": e}},
//     "policy":     {"variant": "robust_ucb" | "modified_robust_ucb",
//                    "estimator": <estimator>}
//                 | {"variant": "baseline_ucb", "variance_factor": v},
//     "horizon": n, "repetitions": r, "master_seed": s,
//     "checkpoints": [t1, t2, ...],                       (optional)
//     "record_choices": false,                            (optional)
//     "output": {"path": "out.csv", "format": "csv" | "json"}  (optional)
//   }
//
//   <distribution> = {"law": "bernoulli",  "params": {"p": ..}}
//                  | {"law": "two_point",  "params": {"p_hi": .., "hi": ..}}
//                  | {"law": "pareto",     "params": {"shape": .., "scale": ..}}
//                  | {"law": "student_t",  "params": {"dof": ..}}
//                  | {"law": "gaussian",   "params": {"mean": .., "variance": ..}}
//                  | {"law": "shifted",    "params": {"inner": <distribution>, "offset": ..}}
//
//   <estimator> = {"kind": "empirical" | "median_of_means", "epsilon": e, "v": v}
//               | {"kind": "truncated", "epsilon": e, "u": u}
//               | {"kind": "catoni", "v": v}

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "robucb/concentration.hpp"
#include "robucb/experiment.hpp"

namespace robucb {

using Json = nlohmann::json;

Json distribution_to_json(const Distribution& dist);
Distribution distribution_from_json(const Json& j, const std::string& field = "distribution");

Json estimator_to_json(const EstimatorSpec& spec);
EstimatorSpec estimator_from_json(const Json& j, const std::string& field = "estimator");

Json policy_to_json(const PolicyConfig& policy);
PolicyConfig policy_from_json(const Json& j, const std::string& field = "policy");

ExperimentConfig config_from_json(const Json& j);
Json config_to_json(const ExperimentConfig& config);

/// Parses a UTF-8 JSON file; schema violations throw ValidationError naming the field.
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

Json trace_to_json(const RegretTrace& trace);
/// Columns: checkpoint_t, regret_mean, regret_stderr, pulls_arm_1_mean .. pulls_arm_K_mean.
std::string trace_to_csv(const RegretTrace& trace);
void write_trace(const RegretTrace& trace, const std::filesystem::path& path, OutputFormat format);

Json report_to_json(const ConcentrationReport& report);

/// Evaluates one bound by name: prop1_gap, prop1_free, truncated, mom,
/// catoni, expected_pulls, lower_gap, lower_free.
Json evaluate_bound(std::string_view which, const Json& params);

/// Writes to a sibling temporary file and renames it over `path`, so a
/// partially written file is never left at `path`.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace robucb
