// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only
// when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "robucb/bounds.hpp"
#include "robucb/concentration.hpp"
#include "robucb/config.hpp"
#include "robucb/distributions.hpp"
#include "robucb/errors.hpp"
#include "robucb/estimators.hpp"
#include "robucb/experiment.hpp"
#include "robucb/policies.hpp"
#include "support/generators.hpp"
#include "support/reference.hpp"

using namespace robucb;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------------------
// 1. Concentration of the robust estimators.

struct ConcentrationCase {
  std::string label;
  EstimatorSpec spec;
  Distribution dist;
};

std::vector<ConcentrationCase> concentration_cases() {
  std::vector<ConcentrationCase> cases;
  for (double eps : {1.0, 0.5}) {
    auto [first, second] = lower_bound_pair(0.2, eps);
    cases.push_back({fmt("truncated eps=%g x two-point first law", eps), EstimatorSpec::truncated(eps, 1.0), first});
    cases.push_back({fmt("truncated eps=%g x two-point second law", eps), EstimatorSpec::truncated(eps, 1.0), second});
  }
  const auto pareto = Distribution::pareto(2.2);
  cases.push_back({"truncated x pareto(2.2)", EstimatorSpec::truncated(1.0, pareto.moments(1.0).raw), pareto});
  cases.push_back({"mom x pareto(2.2)", EstimatorSpec::median_of_means(1.0, pareto.moments(1.0).central), pareto});
  const auto moved = Distribution::shifted(pareto, -5.0);
  cases.push_back({"mom x pareto(2.2) - 5", EstimatorSpec::median_of_means(1.0, moved.moments(1.0).central), moved});
  const auto gauss = Distribution::gaussian(0.0, 1.0);
  cases.push_back({"mom x gaussian(0,1)", EstimatorSpec::median_of_means(1.0, 1.0), gauss});
  cases.push_back({"catoni x gaussian(0,1)", EstimatorSpec::catoni(1.0), gauss});
  const auto heavy = Distribution::pareto(2.5);
  const auto centered = Distribution::shifted(heavy, -heavy.mean());
  cases.push_back({"catoni x centered pareto(2.5)", EstimatorSpec::catoni(centered.moments(1.0).central), centered});
  return cases;
}

Outcome criterion_concentration() {
  Outcome out;
  const std::size_t trials = 10000;
  std::uint64_t seed = 1000;
  double worst = -kInf;
  std::string worst_label;
  for (const auto& c : concentration_cases()) {
    for (std::size_t n : {50u, 500u, 5000u}) {
      for (double delta : {0.1, 0.01}) {
        const auto r = run_concentration(c.spec, c.dist, n, Threshold::delta(delta), trials, seed++);
        const double limit = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
        const double rate = std::max(r.upper_rate(), r.lower_rate());
        const std::string label = fmt("%s n=%zu delta=%g", c.label.c_str(), n, delta);
        std::printf("  [1] %-58s upper %.4f lower %.4f limit %.4f\n", label.c_str(), r.upper_rate(), r.lower_rate(),
                    limit);
        if (rate - limit > worst) {
          worst = rate - limit;
          worst_label = label;
        }
        if (rate > limit) out.fail(fmt("%s: violation rate %.4f > %.4f", label.c_str(), rate, limit));
      }
    }
  }
  if (out.pass) out.detail = fmt("closest case %s (rate - limit = %.4f)", worst_label.c_str(), worst);
  return out;
}

// ---------------------------------------------------------------------------
// 2. Polynomial tail of the empirical mean on the two-point tightness law.

Outcome criterion_empirical_tail() {
  Outcome out;
  const std::size_t n = 100;
  const double eta = 0.2;
  const auto law = lemma1_tightness_instance(n, eta, 1.0);
  const auto spec = EstimatorSpec::empirical(1.0, law.moments(1.0).central);
  const std::size_t trials = 100000;
  const auto r = run_concentration(spec, law, n, Threshold::eta(eta), trials, 2024);
  const double p = r.upper_rate();
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  const double nd = static_cast<double>(n);
  const double lower = 1.0 / (nd * (2.0 * eta) * (2.0 * eta));
  const double upper = 3.0 / (nd * eta * eta);
  out.detail = fmt("P(mean - mu > %.2f) = %.5f, se %.5f, interval [%.5f, %.4f]", eta, p, se, lower - 3.0 * se, upper);
  if (p < lower - 3.0 * se || p > upper) out.pass = false;
  return out;
}

// ---------------------------------------------------------------------------
// 3, 4, 8. Regret runs from the sample configs.

struct RegretRun {
  std::string name;
  ExperimentConfig config;
  RegretTrace trace;
};

// Moment bounds assumed by the policy must hold for every arm.
void check_moments(const ExperimentConfig& config, Outcome& out, const std::string& name) {
  const auto& spec = *config.policy.estimator;
  for (std::size_t i = 0; i < config.instance.size(); ++i) {
    const auto m = config.instance.arm(i).moments(spec.epsilon());
    const bool ok = spec.kind() == EstimatorKind::Truncated ? m.raw <= *spec.params().raw_bound_u * (1.0 + 1e-12)
                                                            : m.central <= *spec.params().central_bound_v * (1.0 + 1e-12);
    if (!ok) out.fail(fmt("%s: arm %zu violates the assumed moment bound", name.c_str(), i + 1));
  }
}

double regret_bound(const ExperimentConfig& config, double n) {
  const auto& spec = *config.policy.estimator;
  BoundInput in;
  in.epsilon = spec.epsilon();
  in.gaps.assign(config.instance.gaps().begin(), config.instance.gaps().end());
  in.arms = config.instance.size();
  in.n = n;
  switch (spec.kind()) {
    case EstimatorKind::Truncated:
      in.u = spec.params().raw_bound_u;
      return thm_truncated_bound(in);
    case EstimatorKind::MedianOfMeans:
      in.v = spec.params().central_bound_v;
      return thm_mom_bound(in);
    case EstimatorKind::Catoni:
      in.v = spec.params().central_bound_v;
      return thm_catoni_bound(in);
    default: throw InvalidInput("no regret bound for this estimator");
  }
}

Outcome criterion_regret(const std::vector<RegretRun>& runs) {
  Outcome out;
  std::ostringstream summary;
  for (const auto& run : runs) {
    check_moments(run.config, out, run.name);
    const auto& tr = run.trace;
    double worst_ratio = 0.0;
    for (std::size_t j = 0; j < tr.checkpoints.size(); ++j) {
      const double bound = regret_bound(run.config, static_cast<double>(tr.checkpoints[j]));
      worst_ratio = std::max(worst_ratio, tr.regret_mean[j] / bound);
      if (tr.regret_mean[j] > bound)
        out.fail(fmt("%s: regret %.3f > bound %.3f at t=%llu", run.name.c_str(), tr.regret_mean[j], bound,
                     static_cast<unsigned long long>(tr.checkpoints[j])));
    }
    const auto& spec = *run.config.policy.estimator;
    const double n = static_cast<double>(run.config.horizon);
    const auto gaps = run.config.instance.gaps();
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      if (gaps[i] <= 0.0) continue;
      const double cap = expected_pulls_bound(spec.c_policy(), spec.v_policy(), spec.epsilon(), gaps[i], n);
      const double pulls = tr.final_pulls_mean[i];
      const double limit = cap + 3.0 * tr.final_pulls_stderr[i];
      std::printf("  [3] %-10s final regret %9.2f (bound %9.2f), T_%zu(n) %8.1f (limit %9.1f), max regret/bound %.3f\n",
                  run.name.c_str(), tr.regret_mean.back(), regret_bound(run.config, n), i + 1, pulls, limit,
                  worst_ratio);
      if (pulls > limit) out.fail(fmt("%s: T_%zu(n) %.1f > %.1f", run.name.c_str(), i + 1, pulls, limit));
    }
    summary << run.name << " max regret/bound " << fmt("%.3f", worst_ratio) << "; ";
  }
  if (out.pass) out.detail = summary.str();
  return out;
}

Outcome criterion_log_growth(const std::vector<RegretRun>& runs) {
  Outcome out;
  std::ostringstream summary;
  for (const auto& run : runs) {
    const auto& tr = run.trace;
    const double n = static_cast<double>(run.config.horizon);
    std::vector<double> ratios;
    for (std::size_t j = 0; j < tr.checkpoints.size(); ++j) {
      const double t = static_cast<double>(tr.checkpoints[j]);
      if (t >= n / 10.0) ratios.push_back(tr.regret_mean[j] / std::log(t));
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    const double spread = (*hi - *lo) / mean;
    std::printf("  [4] %-10s regret/log t over %zu checkpoints in [n/10, n]: min %.2f max %.2f spread %.3f\n",
                run.name.c_str(), ratios.size(), *lo, *hi, spread);
    summary << run.name << fmt(" spread %.3f; ", spread);
    if (!(spread < 0.25)) out.fail(fmt("%s: relative spread %.3f >= 0.25", run.name.c_str(), spread));
  }
  const std::string text = summary.str();
  out.detail = out.pass ? text : out.detail + " (" + text + ")";
  return out;
}

Outcome criterion_determinism(const std::vector<RegretRun>& runs) {
  Outcome out;
  for (const auto& run : runs) {
    const auto parallel = run_experiment(run.config, 8);
    if (trace_to_csv(parallel) != trace_to_csv(run.trace))
      out.fail(run.name + ": CSV differs between 1 and 8 workers");
  }
  if (out.pass) out.detail = fmt("%zu runs bitwise identical", runs.size());
  return out;
}

// ---------------------------------------------------------------------------
// 5. Distribution-free bound on the K-arm lower-bound instance.

Outcome criterion_distribution_free() {
  Outcome out;
  const std::size_t arms = 5;
  const std::size_t n = 10000;
  const auto instance = lower_bound_instance(arms, n, 1.0);
  double v = 0.0;
  for (const auto& d : instance.arms()) v = std::max(v, d.moments(1.0).central);
  const auto spec = EstimatorSpec::median_of_means(1.0, v);
  ExperimentConfig config{instance, PolicyConfig::robust_ucb(spec), n, 100, 55, std::nullopt, {}, false};
  config.validate();
  const auto trace = run_experiment(config);

  BoundInput in;
  in.epsilon = 1.0;
  in.gaps.assign(instance.gaps().begin(), instance.gaps().end());
  in.arms = arms;
  in.n = static_cast<double>(n);
  in.c = spec.c_policy();
  in.v = spec.v_policy();
  const double bound = prop1_free_bound(in);
  const double regret = trace.regret_mean.back();
  out.detail = fmt("mean regret %.2f (se %.2f), bound %.2f, lower-bound value %.2f", regret,
                   trace.regret_stderr.back(), bound, lower_free_bound(arms, static_cast<double>(n), 1.0));
  if (regret > bound) out.pass = false;
  return out;
}

// ---------------------------------------------------------------------------
// 6. Shift coupling.

std::vector<std::uint32_t> choices(BanditInstance instance, const PolicyConfig& policy, std::uint64_t horizon,
                                   std::uint64_t seed) {
  ExperimentConfig config{std::move(instance), policy, horizon, 1, seed, std::nullopt, {horizon}, true};
  return run_repetition(config, 0).choices;
}

Outcome criterion_shift_coupling() {
  Outcome out;
  gen::Gen g(606);
  const double offset = 1e6;
  std::size_t truncated_witnesses = 0;
  for (int pair = 0; pair < 100; ++pair) {
    std::vector<Distribution> arms;
    for (std::size_t k = g.size(2, 4); k > 0; --k) arms.push_back(g.distribution());
    const BanditInstance instance(std::move(arms));
    const BanditInstance moved = instance.shifted(offset);
    const std::uint64_t horizon = g.size(50, 400);
    const std::uint64_t seed = g.seed();

    const auto mom = PolicyConfig::robust_ucb(EstimatorSpec::median_of_means(g.epsilon(), g.uniform(0.1, 4.0)));
    const auto catoni = PolicyConfig::modified_robust_ucb(EstimatorSpec::catoni(g.uniform(0.1, 4.0)));
    const auto truncated = PolicyConfig::robust_ucb(EstimatorSpec::truncated(g.epsilon(), g.uniform(0.1, 4.0)));
    if (choices(instance, mom, horizon, seed) != choices(moved, mom, horizon, seed))
      out.fail(fmt("median of means sequence changed under the shift (pair %d)", pair));
    if (choices(instance, catoni, horizon, seed) != choices(moved, catoni, horizon, seed))
      out.fail(fmt("catoni sequence changed under the shift (pair %d)", pair));
    if (choices(instance, truncated, horizon, seed) != choices(moved, truncated, horizon, seed)) ++truncated_witnesses;
  }
  if (truncated_witnesses == 0) out.fail("no pair separates the truncated-mean policy");
  if (out.pass) out.detail = fmt("100 pairs coupled; truncated mean differs on %zu of them", truncated_witnesses);
  return out;
}

// ---------------------------------------------------------------------------
// 7. Cached policy and estimators against the brute-force references.

PolicyConfig random_policy(gen::Gen& g) {
  const double eps = g.epsilon();
  switch (g.size(0, 4)) {
    case 0: return PolicyConfig::robust_ucb(EstimatorSpec::empirical(eps, g.uniform(0.1, 4.0)));
    case 1: return PolicyConfig::robust_ucb(EstimatorSpec::truncated(eps, g.uniform(0.1, 4.0)));
    case 2: return PolicyConfig::robust_ucb(EstimatorSpec::median_of_means(eps, g.uniform(0.1, 4.0)));
    case 3: return PolicyConfig::modified_robust_ucb(EstimatorSpec::catoni(g.uniform(0.1, 4.0)));
    default: return PolicyConfig::baseline_ucb(g.uniform(0.05, 2.0));
  }
}

Outcome criterion_oracle() {
  Outcome out;
  gen::Gen g(707);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto config = random_policy(g);
    const std::size_t k = g.size(2, 4);
    PolicyState state(config, k);
    std::vector<std::vector<double>> histories(k);
    std::vector<std::size_t> target(k);
    for (auto& t : target) t = g.size(0, 30);
    std::vector<std::size_t> order;
    for (std::size_t a = 0; a < k; ++a) order.insert(order.end(), target[a], a);
    std::shuffle(order.begin(), order.end(), g.engine());
    for (std::size_t a : order) {
      const double x = g.value();
      state.update(a, x);
      histories[a].push_back(x);
    }
    const std::uint64_t t = state.time() + g.size(1, 30);
    const std::size_t mine = state.select_arm(t);
    const std::size_t oracle = ref::select_arm_no_cache(config, histories, t);
    if (mine != oracle) out.fail(fmt("state %d: cached arm %zu, reference arm %zu", trial, mine, oracle));
  }

  std::size_t samples = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::vector<double> x = g.sample(1, 12);
    const double delta = g.delta();
    const double eps = g.epsilon();
    const double u = g.uniform(0.01, 10.0);
    if (!close(empirical_mean(x), ref::mean(x), 1e-12)) out.fail(fmt("empirical mean, sample %d", trial));
    if (!close(truncated_mean(x, delta, MomentParams{eps, u, std::nullopt}), ref::truncated_mean(x, delta, u, eps),
               1e-12))
      out.fail(fmt("truncated mean, sample %d", trial));
    if (!close(median_of_means(x, delta), ref::median_of_means(x, delta), 1e-12))
      out.fail(fmt("median of means, sample %d", trial));
    if (static_cast<double>(x.size()) > 2.0 * std::log(1.0 / delta)) {
      const double mine = catoni_mean(x, delta, MomentParams{1.0, std::nullopt, u});
      const double alpha = ref::catoni_alpha(x.size(), delta, u);
      if (std::abs(ref::catoni_objective(x, alpha, mine)) > 1e-9 || !close(mine, ref::catoni_mean(x, delta, u), 1e-9))
        out.fail(fmt("catoni, sample %d", trial));
    }
    ++samples;
  }
  if (out.pass) out.detail = fmt("1000 states and %zu samples agree", samples);
  return out;
}

// ---------------------------------------------------------------------------
// 9. Bound identities.

Outcome criterion_bound_identities() {
  Outcome out;
  const std::vector<std::vector<double>> gap_sets{
      {0.0, 0.05}, {0.0, 0.2}, {0.0, 0.1, 0.3}, {0.0, 0.01, 0.5, 1.0, 2.0}, {0.0, 0.0, 0.7}};
  double worst = 0.0;
  std::size_t points = 0;
  for (double eps : {0.1, 0.3, 0.5, 0.8, 1.0}) {
    for (double n : {10.0, 1e3, 1e6, 1e9}) {
      for (const auto& gaps : gap_sets) {
        const double moment = 0.05 + 0.37 * static_cast<double>(points % 11);
        BoundInput base;
        base.epsilon = eps;
        base.gaps = gaps;
        base.arms = gaps.size();
        base.n = n;

        BoundInput t = base;
        t.u = moment;
        BoundInput tp = base;
        tp.c = std::pow(4.0, (1.0 + eps) / eps);
        tp.v = moment;
        const double a = thm_truncated_bound(t);
        const double b = prop1_gap_bound(tp);

        BoundInput m = base;
        m.v = moment;
        BoundInput mp = base;
        mp.c = 16.0;
        mp.v = 12.0 * moment;
        const double c = thm_mom_bound(m);
        const double d = prop1_gap_bound(mp);

        const double rel = std::max(std::abs(a - b) / std::max(b, 1e-300), std::abs(c - d) / std::max(d, 1e-300));
        worst = std::max(worst, rel);
        if (rel > 1e-12) out.fail(fmt("eps=%g n=%g: relative difference %.3g", eps, n, rel));
        ++points;
      }
    }
  }
  if (out.pass) out.detail = fmt("%zu grid points, worst relative difference %.3g", points, worst);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::filesystem::path configs = "configs";
  std::vector<int> only;
  app.add_option("--configs", configs, "Directory holding the regret-run configs")->check(CLI::ExistingDirectory);
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::set<int> selected = only.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9}
                                              : std::set<int>(only.begin(), only.end());
  const char* names[] = {"",
                         "concentration of robust estimators",
                         "empirical-mean polynomial tail",
                         "regret upper bounds",
                         "logarithmic regret growth",
                         "distribution-free bound",
                         "shift coupling",
                         "oracle equivalence",
                         "determinism across worker counts",
                         "bound identities"};

  bool all = true;
  auto run = [&](int id, const std::function<Outcome()>& body) {
    if (!selected.contains(id)) return;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = body();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && out.pass;
    std::printf("criterion %d (%s): %s  %s [%.1fs]\n", id, names[id], out.pass ? "PASS" : "FAIL", out.detail.c_str(),
                secs);
    std::fflush(stdout);
  };

  run(1, criterion_concentration);
  run(2, criterion_empirical_tail);

  std::vector<RegretRun> runs;
  std::string load_error;
  if (selected.contains(3) || selected.contains(4) || selected.contains(8)) {
    try {
      for (const char* name : {"truncated", "mom", "catoni"}) {
        RegretRun r{name, load_config(configs / (std::string("regret_") + name + ".json")), {}};
        r.trace = run_experiment(r.config, 1);
        runs.push_back(std::move(r));
      }
    } catch (const std::exception& e) {
      load_error = e.what();
    }
  }
  auto with_runs = [&](Outcome (*body)(const std::vector<RegretRun>&)) {
    return [&, body] {
      if (!load_error.empty()) throw std::runtime_error("regret runs unavailable: " + load_error);
      return body(runs);
    };
  };
  run(3, with_runs(criterion_regret));
  run(4, with_runs(criterion_log_growth));
  run(5, criterion_distribution_free);
  run(6, criterion_shift_coupling);
  run(7, criterion_oracle);
  run(8, with_runs(criterion_determinism));
  run(9, criterion_bound_identities);
  return all ? 0 : 1;
}
