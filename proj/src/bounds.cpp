#include "robucb/bounds.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "robucb/errors.hpp"

namespace robucb {

namespace {

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must lie in (0,1]");
}

double require(const std::optional<double>& value, const char* name) {
  if (!value) throw InvalidInput(std::string("bound needs parameter ") + name);
  if (!(*value >= 0.0 && std::isfinite(*value))) throw InvalidInput(std::string(name) + " must be finite and >= 0");
  return *value;
}

template <class Term>
double sum_over_suboptimal(const BoundInput& in, Term term) {
  in.validate();
  double total = 0.0;
  for (double gap : in.gaps) {
    if (gap > 0.0) total += term(gap);
  }
  return total;
}

}  // namespace

void BoundInput::validate() const {
  require_epsilon(epsilon);
  if (!(n >= 1.0 && std::isfinite(n))) throw InvalidInput("n must be >= 1");
  if (arms < 2) throw InvalidInput("K must be >= 2");
  for (double gap : gaps) {
    if (!(gap >= 0.0 && std::isfinite(gap))) throw InvalidInput("gaps must be finite and >= 0");
  }
}

double prop1_gap_bound(const BoundInput& in) {
  const double c = require(in.c, "c");
  const double v = require(in.v, "v");
  const double log_n = std::log(in.n);
  return sum_over_suboptimal(in, [&](double gap) {
    return 2.0 * c * std::pow(v / gap, 1.0 / in.epsilon) * log_n + 5.0 * gap;
  });
}

double prop1_free_bound(const BoundInput& in) {
  in.validate();
  const double c = require(in.c, "c");
  const double v = require(in.v, "v");
  const double eps = in.epsilon;
  const double log_n = std::log(in.n);
  for (std::size_t i = 0; i < in.gaps.size(); ++i) {
    const double gap = in.gaps[i];
    const double needed = 5.0 * std::pow(gap, (1.0 + eps) / eps) / (2.0 * c * std::pow(v, 1.0 / eps));
    if (!(log_n >= needed)) {
      std::ostringstream msg;
      msg << "distribution-free bound needs log n >= " << needed << " for gap[" << i << "] = " << gap;
      throw PreconditionError(msg.str());
    }
  }
  const double k = static_cast<double>(in.arms);
  return std::pow(in.n, 1.0 / (1.0 + eps)) * std::pow(4.0 * k * c * log_n, eps / (1.0 + eps)) *
         std::pow(v, 1.0 / (1.0 + eps));
}

double thm_truncated_bound(const BoundInput& in) {
  const double u = require(in.u, "u");
  const double log_n = std::log(in.n);
  return sum_over_suboptimal(in, [&](double gap) {
    return 8.0 * std::pow(4.0 * u / gap, 1.0 / in.epsilon) * log_n + 5.0 * gap;
  });
}

double thm_mom_bound(const BoundInput& in) {
  const double v = require(in.v, "v");
  const double log_n = std::log(in.n);
  return sum_over_suboptimal(in, [&](double gap) {
    return 32.0 * std::pow(12.0 * v / gap, 1.0 / in.epsilon) * log_n + 5.0 * gap;
  });
}

double thm_catoni_bound(const BoundInput& in) {
  const double v = require(in.v, "v");
  if (in.epsilon != 1.0) throw InvalidInput("the Catoni bound needs epsilon = 1");
  const double log_n = std::log(in.n);
  return sum_over_suboptimal(in, [&](double gap) {
    return 8.0 * v * log_n / gap + 8.0 * gap * log_n + 5.0 * gap;
  });
}

double expected_pulls_bound(double c, double v, double epsilon, double gap, double n) {
  require_epsilon(epsilon);
  if (!(gap > 0.0 && std::isfinite(gap))) throw InvalidInput("gap must be positive");
  if (!(c > 0.0 && v >= 0.0)) throw InvalidInput("c must be positive and v >= 0");
  if (!(n >= 1.0)) throw InvalidInput("n must be >= 1");
  return 2.0 * c * std::pow(v, 1.0 / epsilon) / std::pow(gap, (1.0 + epsilon) / epsilon) * std::log(n) + 5.0;
}

double lower_gap_coefficient(double gap, double epsilon) {
  require_epsilon(epsilon);
  if (!(gap > 0.0 && gap < 0.25)) throw InvalidInput("gap must lie in (0, 1/4)");
  return 0.4 / std::pow(gap, 1.0 / epsilon);
}

double lower_free_bound(std::size_t arms, double n, double epsilon) {
  require_epsilon(epsilon);
  if (arms < 1) throw InvalidInput("K must be >= 1");
  if (!(n >= 1.0)) throw InvalidInput("n must be >= 1");
  return 0.01 * std::pow(static_cast<double>(arms), epsilon / (1.0 + epsilon)) * std::pow(n, 1.0 / (1.0 + epsilon));
}

}  // namespace robucb
