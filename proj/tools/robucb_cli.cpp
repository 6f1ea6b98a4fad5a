// robucb: run bandit experiments, concentration benches and bound evaluations.
//
//   robucb simulate --config run.json [--workers N] [--output path] [--format csv|json]
//   robucb concentration --estimator mom --epsilon 1 --v 7.64 \
//       --dist '{"law":"pareto","params":{"shape":2.2}}' --n 500 --delta 0.01 --trials 10000 --seed 1
//   robucb bounds --which truncated --params '{"epsilon":1,"u":1,"gaps":[0.2],"n":20000}'
//
// Exit status: 0 on success, 2 on invalid input, 1 on any other failure.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "robucb/config.hpp"
#include "robucb/errors.hpp"

namespace {

constexpr int kValidationExit = 2;

robucb::Json parse_json_argument(const std::string& text, const std::string& field) {
  try {
    return robucb::Json::parse(text);
  } catch (const robucb::Json::parse_error& e) {
    throw robucb::ValidationError(field, std::string("malformed JSON: ") + e.what());
  }
}

robucb::EstimatorSpec build_estimator(const std::string& kind, std::optional<double> epsilon, std::optional<double> u,
                                      std::optional<double> v) {
  robucb::Json j{{"kind", kind}};
  if (epsilon) j["epsilon"] = *epsilon;
  if (u) j["u"] = *u;
  if (v) j["v"] = *v;
  return robucb::estimator_from_json(j, "estimator");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust UCB bandits and mean estimators for heavy-tailed rewards"};
  app.require_subcommand(1);

  std::size_t workers = 0;
  app.add_option("--workers", workers, "Worker threads (0: ROBUCB_WORKERS or hardware concurrency)");

  auto* simulate = app.add_subcommand("simulate", "Run a bandit experiment from a JSON config");
  std::string config_path;
  std::optional<std::string> output_path;
  std::optional<std::string> output_format;
  simulate->add_option("--config", config_path, "Experiment config (JSON)")->required();
  simulate->add_option("--output", output_path, "Override the config's output path");
  simulate->add_option("--format", output_format, "Override the output format")->check(CLI::IsMember({"csv", "json"}));

  auto* concentration = app.add_subcommand("concentration", "Monte Carlo tail check of one estimator");
  std::string estimator_kind;
  std::optional<double> epsilon;
  std::optional<double> u;
  std::optional<double> v;
  std::string dist_text;
  std::size_t n = 0;
  std::optional<double> delta;
  std::optional<double> eta;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  concentration->add_option("--estimator", estimator_kind, "empirical | truncated | median_of_means | catoni")
      ->required();
  concentration->add_option("--epsilon", epsilon, "Moment order minus one, in (0,1]");
  concentration->add_option("--u", u, "Raw moment bound (truncated)");
  concentration->add_option("--v", v, "Central moment bound (empirical, median_of_means, catoni)");
  concentration->add_option("--dist", dist_text, "Distribution as JSON, e.g. {\"law\":\"gaussian\",...}")->required();
  concentration->add_option("--n", n, "Sample size")->required();
  auto* delta_opt = concentration->add_option("--delta", delta, "Confidence level");
  auto* eta_opt = concentration->add_option("--eta", eta, "Fixed deviation (empirical mean only)");
  delta_opt->excludes(eta_opt);
  concentration->add_option("--trials", trials, "Number of independent samples")->required();
  concentration->add_option("--seed", seed, "Seed")->required();

  auto* bounds = app.add_subcommand("bounds", "Evaluate a closed-form bound");
  std::string which;
  std::string params_text;
  bounds->add_option("--which", which,
                     "prop1_gap | prop1_free | truncated | mom | catoni | expected_pulls | lower_gap | lower_free")
      ->required();
  bounds->add_option("--params", params_text, "Parameters as JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationExit;
  }

  try {
    if (*simulate) {
      auto config = robucb::load_config(config_path);
      if (output_path || output_format) {
        robucb::OutputSpec out = config.output.value_or(robucb::OutputSpec{});
        if (output_path) out.path = *output_path;
        if (output_format) out.format = *output_format == "json" ? robucb::OutputFormat::Json : robucb::OutputFormat::Csv;
        config.output = out;
        config.validate();
      }
      const auto trace = robucb::run_experiment(config, workers);
      if (config.output) {
        robucb::write_trace(trace, config.output->path, config.output->format);
        std::cerr << "wrote " << config.output->path << "\n";
      } else {
        std::cout << robucb::trace_to_csv(trace);
      }
    } else if (*concentration) {
      if (!delta && !eta) throw robucb::ValidationError("delta", "one of --delta or --eta is required");
      const auto spec = build_estimator(estimator_kind, epsilon, u, v);
      const auto dist = robucb::distribution_from_json(parse_json_argument(dist_text, "dist"), "dist");
      const auto threshold = delta ? robucb::Threshold::delta(*delta) : robucb::Threshold::eta(*eta);
      const auto report = robucb::run_concentration(spec, dist, n, threshold, trials, seed, workers);
      std::cout << robucb::report_to_json(report).dump(2) << "\n";
    } else if (*bounds) {
      std::cout << robucb::evaluate_bound(which, parse_json_argument(params_text, "params")).dump(2) << "\n";
    }
  } catch (const robucb::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationExit;
  } catch (const robucb::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationExit;
  } catch (const robucb::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
