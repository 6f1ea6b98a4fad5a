#include "robucb/config.hpp"

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <system_error>

#include "robucb/bounds.hpp"
#include "robucb/errors.hpp"

namespace robucb {

namespace {

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void require_object(const Json& j, const std::string& field) {
  if (!j.is_object()) throw ValidationError(field, "expected a JSON object");
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& field) {
  require_object(j, field);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ValidationError(join(field, key), "unknown field");
  }
}

const Json& member(const Json& j, const char* key, const std::string& field) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(join(field, key), "missing required field");
  return *it;
}

double number(const Json& j, const char* key, const std::string& field) {
  const Json& value = member(j, key, field);
  if (!value.is_number()) throw ValidationError(join(field, key), "expected a number");
  return value.get<double>();
}

std::uint64_t count(const Json& j, const char* key, const std::string& field) {
  const Json& value = member(j, key, field);
  if (!value.is_number_unsigned()) throw ValidationError(join(field, key), "expected a nonnegative integer");
  return value.get<std::uint64_t>();
}

std::string text(const Json& j, const char* key, const std::string& field) {
  const Json& value = member(j, key, field);
  if (!value.is_string()) throw ValidationError(join(field, key), "expected a string");
  return value.get<std::string>();
}

// Domain errors raised while building a value are reported against `field`.
template <class F>
auto building(const std::string& field, F make) -> decltype(make()) {
  try {
    return make();
  } catch (const InvalidInput& e) {
    throw ValidationError(field, e.what());
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Json distribution_to_json(const Distribution& dist) {
  return std::visit(
      overloaded{
          [](const Bernoulli& b) { return Json{{"law", "bernoulli"}, {"params", {{"p", b.p}}}}; },
          [](const TwoPoint& t) { return Json{{"law", "two_point"}, {"params", {{"p_hi", t.p_hi}, {"hi", t.hi}}}}; },
          [](const Pareto& p) {
            return Json{{"law", "pareto"}, {"params", {{"shape", p.shape}, {"scale", p.scale}}}};
          },
          [](const StudentT& s) { return Json{{"law", "student_t"}, {"params", {{"dof", s.dof}}}}; },
          [](const Gaussian& g) {
            return Json{{"law", "gaussian"}, {"params", {{"mean", g.mean}, {"variance", g.variance}}}};
          },
          [](const Shifted& s) {
            return Json{{"law", "shifted"},
                        {"params", {{"inner", distribution_to_json(*s.inner)}, {"offset", s.offset}}}};
          },
      },
      dist.law());
}

Distribution distribution_from_json(const Json& j, const std::string& field) {
  check_keys(j, {"law", "params"}, field);
  const std::string law = text(j, "law", field);
  const std::string pf = join(field, "params");
  const Json& p = member(j, "params", field);
  return building(field, [&] {
    if (law == "bernoulli") {
      check_keys(p, {"p"}, pf);
      return Distribution::bernoulli(number(p, "p", pf));
    }
    if (law == "two_point") {
      check_keys(p, {"p_hi", "hi"}, pf);
      return Distribution::two_point(number(p, "p_hi", pf), number(p, "hi", pf));
    }
    if (law == "pareto") {
      check_keys(p, {"shape", "scale"}, pf);
      const double scale = p.contains("scale") ? number(p, "scale", pf) : 1.0;
      return Distribution::pareto(number(p, "shape", pf), scale);
    }
    if (law == "student_t") {
      check_keys(p, {"dof"}, pf);
      return Distribution::student_t(number(p, "dof", pf));
    }
    if (law == "gaussian") {
      check_keys(p, {"mean", "variance"}, pf);
      return Distribution::gaussian(number(p, "mean", pf), number(p, "variance", pf));
    }
    if (law == "shifted") {
      check_keys(p, {"inner", "offset"}, pf);
      return Distribution::shifted(distribution_from_json(member(p, "inner", pf), join(pf, "inner")),
                                   number(p, "offset", pf));
    }
    throw ValidationError(join(field, "law"), "unknown law '" + law + "'");
  });
}

Json estimator_to_json(const EstimatorSpec& spec) {
  Json j{{"kind", std::string(to_string(spec.kind()))}};
  const auto& p = spec.params();
  if (spec.kind() != EstimatorKind::Catoni) j["epsilon"] = p.epsilon;
  if (p.raw_bound_u) j["u"] = *p.raw_bound_u;
  if (p.central_bound_v) j["v"] = *p.central_bound_v;
  return j;
}

EstimatorSpec estimator_from_json(const Json& j, const std::string& field) {
  require_object(j, field);
  const std::string kind_name = text(j, "kind", field);
  const EstimatorKind kind = building(join(field, "kind"), [&] { return estimator_kind_from_string(kind_name); });
  switch (kind) {
    case EstimatorKind::Empirical:
      check_keys(j, {"kind", "epsilon", "v"}, field);
      return building(field, [&] { return EstimatorSpec::empirical(number(j, "epsilon", field), number(j, "v", field)); });
    case EstimatorKind::Truncated:
      check_keys(j, {"kind", "epsilon", "u"}, field);
      return building(field, [&] { return EstimatorSpec::truncated(number(j, "epsilon", field), number(j, "u", field)); });
    case EstimatorKind::MedianOfMeans:
      check_keys(j, {"kind", "epsilon", "v"}, field);
      return building(field, [&] {
        return EstimatorSpec::median_of_means(number(j, "epsilon", field), number(j, "v", field));
      });
    case EstimatorKind::Catoni:
      check_keys(j, {"kind", "epsilon", "v"}, field);
      if (j.contains("epsilon") && number(j, "epsilon", field) != 1.0)
        throw ValidationError(join(field, "epsilon"), "Catoni's estimator requires epsilon = 1");
      return building(field, [&] { return EstimatorSpec::catoni(number(j, "v", field)); });
  }
  throw InternalError("unhandled estimator kind");
}

Json policy_to_json(const PolicyConfig& policy) {
  Json j{{"variant", std::string(to_string(policy.variant))}};
  if (policy.estimator) j["estimator"] = estimator_to_json(*policy.estimator);
  if (policy.variant == PolicyVariant::BaselineUcb) j["variance_factor"] = policy.variance_factor;
  return j;
}

PolicyConfig policy_from_json(const Json& j, const std::string& field) {
  check_keys(j, {"variant", "estimator", "variance_factor"}, field);
  PolicyConfig policy;
  policy.variant = policy_variant_from_string(text(j, "variant", field));
  if (policy.variant == PolicyVariant::BaselineUcb) {
    if (j.contains("estimator")) throw ValidationError(join(field, "estimator"), "baseline_ucb takes no estimator");
    policy.variance_factor = number(j, "variance_factor", field);
  } else {
    if (j.contains("variance_factor"))
      throw ValidationError(join(field, "variance_factor"), "only baseline_ucb takes a variance factor");
    policy.estimator = estimator_from_json(member(j, "estimator", field), join(field, "estimator"));
  }
  policy.validate();
  return policy;
}

namespace {

BanditInstance instance_from_json(const Json& j, const std::string& field) {
  require_object(j, field);
  if (j.size() != 1) throw ValidationError(field, "expected exactly one of arms, lower_bound_pair, lower_bound_instance");
  if (j.contains("arms")) {
    const Json& arms = j["arms"];
    const std::string af = join(field, "arms");
    if (!arms.is_array()) throw ValidationError(af, "expected an array");
    std::vector<Distribution> laws;
    for (std::size_t i = 0; i < arms.size(); ++i) {
      laws.push_back(distribution_from_json(arms[i], af + "[" + std::to_string(i) + "]"));
    }
    return building(af, [&] { return BanditInstance(std::move(laws)); });
  }
  if (j.contains("lower_bound_pair")) {
    const std::string pf = join(field, "lower_bound_pair");
    const Json& p = j["lower_bound_pair"];
    check_keys(p, {"gap", "epsilon"}, pf);
    return building(pf, [&] {
      auto [best, other] = lower_bound_pair(number(p, "gap", pf), number(p, "epsilon", pf));
      return BanditInstance({best, other});
    });
  }
  if (j.contains("lower_bound_instance")) {
    const std::string pf = join(field, "lower_bound_instance");
    const Json& p = j["lower_bound_instance"];
    check_keys(p, {"arms", "horizon", "epsilon"}, pf);
    return building(pf, [&] {
      return lower_bound_instance(count(p, "arms", pf), count(p, "horizon", pf), number(p, "epsilon", pf));
    });
  }
  throw ValidationError(join(field, j.begin().key()), "unknown field");
}

OutputFormat format_from_string(const std::string& name, const std::string& field) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ValidationError(field, "format must be csv or json");
}

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  check_keys(j,
             {"instance", "policy", "horizon", "repetitions", "master_seed", "output", "checkpoints",
              "record_choices"},
             "");
  ExperimentConfig config{
      instance_from_json(member(j, "instance", ""), "instance"),
      policy_from_json(member(j, "policy", ""), "policy"),
      count(j, "horizon", ""),
      count(j, "repetitions", ""),
      count(j, "master_seed", ""),
      std::nullopt,
      {},
      false,
  };
  if (j.contains("output")) {
    const Json& o = j["output"];
    check_keys(o, {"path", "format"}, "output");
    OutputSpec out{text(o, "path", "output"), OutputFormat::Csv};
    if (o.contains("format")) out.format = format_from_string(text(o, "format", "output"), "output.format");
    config.output = out;
  }
  if (j.contains("checkpoints")) {
    const Json& c = j["checkpoints"];
    if (!c.is_array()) throw ValidationError("checkpoints", "expected an array");
    for (const auto& t : c) {
      if (!t.is_number_unsigned()) throw ValidationError("checkpoints", "expected nonnegative integers");
      config.checkpoints.push_back(t.get<std::uint64_t>());
    }
  }
  if (j.contains("record_choices")) {
    if (!j["record_choices"].is_boolean()) throw ValidationError("record_choices", "expected a boolean");
    config.record_choices = j["record_choices"].get<bool>();
  }
  config.validate();
  return config;
}

Json config_to_json(const ExperimentConfig& config) {
  Json arms = Json::array();
  for (const auto& arm : config.instance.arms()) arms.push_back(distribution_to_json(arm));
  Json j{
      {"instance", {{"arms", arms}}},
      {"policy", policy_to_json(config.policy)},
      {"horizon", config.horizon},
      {"repetitions", config.repetitions},
      {"master_seed", config.master_seed},
  };
  if (!config.checkpoints.empty()) j["checkpoints"] = config.checkpoints;
  if (config.record_choices) j["record_choices"] = true;
  if (config.output) {
    j["output"] = {{"path", config.output->path},
                   {"format", config.output->format == OutputFormat::Csv ? "csv" : "json"}};
  }
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("", "cannot open config file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("", std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
  write_file_atomically(path, config_to_json(config).dump(2) + "\n");
}

Json trace_to_json(const RegretTrace& trace) {
  Json reps = Json::array();
  for (const auto& rep : trace.repetitions) {
    Json r{{"regret", rep.regret}, {"pulls", rep.pulls}, {"final_pulls", rep.final_pulls}};
    if (!rep.choices.empty()) r["choices"] = rep.choices;
    reps.push_back(std::move(r));
  }
  return Json{
      {"horizon", trace.horizon},
      {"arms", trace.arms},
      {"checkpoints", trace.checkpoints},
      {"aggregate",
       {{"regret_mean", trace.regret_mean},
        {"regret_stderr", trace.regret_stderr},
        {"pulls_mean", trace.pulls_mean},
        {"final_pulls_mean", trace.final_pulls_mean},
        {"final_pulls_stderr", trace.final_pulls_stderr}}},
      {"repetitions", reps},
  };
}

std::string trace_to_csv(const RegretTrace& trace) {
  std::string out = "checkpoint_t,regret_mean,regret_stderr";
  for (std::size_t i = 0; i < trace.arms; ++i) out += ",pulls_arm_" + std::to_string(i + 1) + "_mean";
  out += "\n";
  for (std::size_t c = 0; c < trace.checkpoints.size(); ++c) {
    out += std::to_string(trace.checkpoints[c]);
    out += "," + format_double(trace.regret_mean[c]);
    out += "," + format_double(trace.regret_stderr[c]);
    for (double p : trace.pulls_mean[c]) out += "," + format_double(p);
    out += "\n";
  }
  return out;
}

void write_trace(const RegretTrace& trace, const std::filesystem::path& path, OutputFormat format) {
  write_file_atomically(path, format == OutputFormat::Csv ? trace_to_csv(trace) : trace_to_json(trace).dump(2) + "\n");
}

Json report_to_json(const ConcentrationReport& r) {
  const bool delta_mode = r.threshold.kind == Threshold::Kind::Delta;
  Json j{
      {"estimator", estimator_to_json(r.spec)},
      {"distribution", distribution_to_json(r.distribution)},
      {"n", r.n},
      {"trials", r.trials},
      {"seed", r.seed},
      {"mean", r.mean},
      {"deviation", r.deviation},
      {"bound", r.bound},
      {"upper_violations", r.upper_violations},
      {"lower_violations", r.lower_violations},
      {"upper_rate", r.upper_rate()},
      {"lower_rate", r.lower_rate()},
      {"binomial_stderr", r.binomial_stderr},
  };
  j[delta_mode ? "delta" : "eta"] = r.threshold.value;
  return j;
}

Json evaluate_bound(std::string_view which, const Json& params) {
  const std::string field = "params";
  require_object(params, field);
  auto optional_number = [&](const char* key) -> std::optional<double> {
    if (!params.contains(key)) return std::nullopt;
    return number(params, key, field);
  };
  BoundInput in;
  if (auto e = optional_number("epsilon")) in.epsilon = *e;
  in.u = optional_number("u");
  in.v = optional_number("v");
  in.c = optional_number("c");
  if (auto n = optional_number("n")) in.n = *n;
  if (params.contains("K")) in.arms = count(params, "K", field);
  if (params.contains("gaps")) {
    if (!params["gaps"].is_array()) throw ValidationError("params.gaps", "expected an array");
    for (const auto& g : params["gaps"]) {
      if (!g.is_number()) throw ValidationError("params.gaps", "expected numbers");
      in.gaps.push_back(g.get<double>());
    }
  }
  check_keys(params, {"epsilon", "u", "v", "c", "n", "K", "gaps", "gap"}, field);

  double value = 0.0;
  try {
    if (which == "prop1_gap") {
      value = prop1_gap_bound(in);
    } else if (which == "prop1_free") {
      value = prop1_free_bound(in);
    } else if (which == "truncated") {
      value = thm_truncated_bound(in);
    } else if (which == "mom") {
      value = thm_mom_bound(in);
    } else if (which == "catoni") {
      value = thm_catoni_bound(in);
    } else if (which == "expected_pulls") {
      if (!in.c || !in.v) throw InvalidInput("expected_pulls needs c and v");
      value = expected_pulls_bound(*in.c, *in.v, in.epsilon, number(params, "gap", field), in.n);
    } else if (which == "lower_gap") {
      value = lower_gap_coefficient(number(params, "gap", field), in.epsilon);
    } else if (which == "lower_free") {
      value = lower_free_bound(params.contains("K") ? in.arms : 2, in.n, in.epsilon);
    } else {
      throw ValidationError("which", "unknown bound '" + std::string(which) + "'");
    }
  } catch (const InvalidInput& e) {
    throw ValidationError(field, e.what());
  } catch (const PreconditionError& e) {
    throw ValidationError(field, e.what());
  }
  return Json{{"bound", std::string(which)}, {"value", value}, {"params", params}};
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::random_device entropy;
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(entropy()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

}  // namespace robucb
