#include "robucb/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "robucb/errors.hpp"

namespace robucb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadratureTolerance = 1e-10;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

template <class F>
double integrate_half_line(F f) {
  // integrate() is not const in older Boost releases.
  thread_local boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, kQuadratureTolerance);
}

template <class F>
double integrate_interval(F f, double a, double b) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  if (!(b > a)) return 0.0;
  return integrator.integrate(f, a, b, kQuadratureTolerance);
}

// E|X - c|^q for a density on the whole line with its mode at `mode`: the
// kink at c and the mode are both placed on integration breakpoints.
template <class Pdf>
double line_abs_moment(Pdf pdf, double mode, double center, double order) {
  const auto term = [&](double x) {
    const double d = std::abs(x - center);
    return d == 0.0 ? 0.0 : std::pow(d, order) * pdf(x);
  };
  const double lo = std::min(mode, center);
  const double hi = std::max(mode, center);
  const double right = integrate_half_line([&](double y) { return term(hi + y); });
  const double left = integrate_half_line([&](double y) { return term(lo - y); });
  return left + integrate_interval(term, lo, hi) + right;
}

double discrete_abs_moment(double p_hi, double hi, double center, double order) {
  return p_hi * std::pow(std::abs(hi - center), order) + (1.0 - p_hi) * std::pow(std::abs(center), order);
}

double gaussian_abs_moment(const Gaussian& g, double center, double order) {
  const double sigma = std::sqrt(g.variance);
  if (sigma == 0.0) return std::pow(std::abs(g.mean - center), order);
  if (center == g.mean) {
    // E|Z|^q = 2^{q/2} Gamma((q+1)/2) / sqrt(pi)
    return std::pow(sigma, order) * std::pow(2.0, order / 2.0) * std::tgamma((order + 1.0) / 2.0) /
           std::sqrt(std::numbers::pi);
  }
  // Integrate over z in [-40, 40]; the normal density vanishes beyond in double precision.
  const auto term = [&](double z) {
    const double d = std::abs(g.mean + sigma * z - center);
    return d == 0.0 ? 0.0 : std::pow(d, order) * std::exp(-0.5 * z * z);
  };
  const double kink = std::clamp((center - g.mean) / sigma, -40.0, 40.0);
  return (integrate_interval(term, -40.0, kink) + integrate_interval(term, kink, 40.0)) /
         std::sqrt(2.0 * std::numbers::pi);
}

double student_abs_moment(const StudentT& s, double center, double order) {
  if (s.dof <= order) return kInf;
  const boost::math::students_t_distribution<double> law(s.dof);
  const auto pdf = [&](double x) { return boost::math::pdf(law, x); };
  return line_abs_moment(pdf, 0.0, center, order);
}

double pareto_abs_moment(const Pareto& p, double center, double order) {
  if (p.shape <= order) return kInf;
  if (center == 0.0) return p.shape * std::pow(p.scale, order) / (p.shape - order);
  const double mean = p.shape * p.scale / (p.shape - 1.0);
  if (order == 2.0 && center == mean) {
    return p.scale * p.scale * p.shape / ((p.shape - 1.0) * (p.shape - 1.0) * (p.shape - 2.0));
  }
  const auto pdf = [&](double x) { return p.shape * std::pow(p.scale, p.shape) / std::pow(x, p.shape + 1.0); };
  const double start = std::max(center, p.scale);
  const auto right = [&](double y) {
    const double x = start + y;
    const double d = x - center;
    return d == 0.0 ? 0.0 : std::pow(d, order) * pdf(x);
  };
  const auto left = [&](double x) { return std::pow(center - x, order) * pdf(x); };
  return integrate_half_line(right) + integrate_interval(left, p.scale, center);
}

void require(bool ok, const char* message) {
  if (!ok) throw InvalidInput(message);
}

bool laws_equal(const Law& a, const Law& b);

}  // namespace

Distribution Distribution::bernoulli(double p) {
  require(p >= 0.0 && p <= 1.0, "Bernoulli parameter must lie in [0,1]");
  return Distribution(Bernoulli{p});
}

Distribution Distribution::two_point(double p_hi, double hi) {
  require(p_hi >= 0.0 && p_hi <= 1.0, "two-point mass must lie in [0,1]");
  require(std::isfinite(hi), "two-point location must be finite");
  return Distribution(TwoPoint{p_hi, hi});
}

Distribution Distribution::pareto(double shape, double scale) {
  require(shape > 1.0 && std::isfinite(shape), "Pareto shape must exceed 1");
  require(scale > 0.0 && std::isfinite(scale), "Pareto scale must be positive");
  return Distribution(Pareto{shape, scale});
}

Distribution Distribution::student_t(double dof) {
  require(dof > 1.0 && std::isfinite(dof), "Student t degrees of freedom must exceed 1");
  return Distribution(StudentT{dof});
}

Distribution Distribution::gaussian(double mean, double variance) {
  require(std::isfinite(mean), "Gaussian mean must be finite");
  require(variance >= 0.0 && std::isfinite(variance), "Gaussian variance must be finite and >= 0");
  return Distribution(Gaussian{mean, variance});
}

Distribution Distribution::shifted(Distribution inner, double offset) {
  require(std::isfinite(offset), "shift offset must be finite");
  return Distribution(Shifted{std::make_shared<const Distribution>(std::move(inner)), offset});
}

double Distribution::mean() const {
  return std::visit(overloaded{
                        [](const Bernoulli& b) { return b.p; },
                        [](const TwoPoint& t) { return t.p_hi * t.hi; },
                        [](const Pareto& p) { return p.shape * p.scale / (p.shape - 1.0); },
                        [](const StudentT&) { return 0.0; },
                        [](const Gaussian& g) { return g.mean; },
                        [](const Shifted& s) { return s.inner->mean() + s.offset; },
                    },
                    law_);
}

double Distribution::sample(RandomStream& stream) const {
  return std::visit(overloaded{
                        [&](const Bernoulli& b) { return stream.uniform_open() < b.p ? 1.0 : 0.0; },
                        [&](const TwoPoint& t) { return stream.uniform_open() < t.p_hi ? t.hi : 0.0; },
                        [&](const Pareto& p) { return p.scale * std::pow(stream.uniform_open(), -1.0 / p.shape); },
                        [&](const StudentT& s) {
                          double u, v, w;
                          do {
                            u = 2.0 * stream.uniform_open() - 1.0;
                            v = 2.0 * stream.uniform_open() - 1.0;
                            w = u * u + v * v;
                          } while (w >= 1.0 || w == 0.0);
                          return u * std::sqrt(s.dof * (std::pow(w, -2.0 / s.dof) - 1.0) / w);
                        },
                        [&](const Gaussian& g) {
                          const double r = std::sqrt(-2.0 * std::log(stream.uniform_open()));
                          const double z = r * std::cos(2.0 * std::numbers::pi * stream.uniform_open());
                          return g.mean + std::sqrt(g.variance) * z;
                        },
                        [&](const Shifted& s) { return s.inner->sample(stream) + s.offset; },
                    },
                    law_);
}

double Distribution::abs_moment(double center, double order) const {
  return std::visit(overloaded{
                        [&](const Bernoulli& b) { return discrete_abs_moment(b.p, 1.0, center, order); },
                        [&](const TwoPoint& t) { return discrete_abs_moment(t.p_hi, t.hi, center, order); },
                        [&](const Pareto& p) { return pareto_abs_moment(p, center, order); },
                        [&](const StudentT& s) { return student_abs_moment(s, center, order); },
                        [&](const Gaussian& g) { return gaussian_abs_moment(g, center, order); },
                        [&](const Shifted& s) { return s.inner->abs_moment(center - s.offset, order); },
                    },
                    law_);
}

Moments Distribution::moments(double epsilon) const {
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0,1]");
  const double order = 1.0 + epsilon;
  const double mu = mean();
  // A shift leaves central moments unchanged; evaluate them on the inner law.
  if (const auto* s = std::get_if<Shifted>(&law_)) {
    const Moments inner = s->inner->moments(epsilon);
    return {mu, abs_moment(0.0, order), inner.central};
  }
  return {mu, abs_moment(0.0, order), abs_moment(mu, order)};
}

std::string Distribution::describe() const {
  std::ostringstream out;
  out.precision(17);
  std::visit(overloaded{
                 [&](const Bernoulli& b) { out << "bernoulli(p=" << b.p << ")"; },
                 [&](const TwoPoint& t) { out << "two_point(p_hi=" << t.p_hi << ", hi=" << t.hi << ")"; },
                 [&](const Pareto& p) { out << "pareto(shape=" << p.shape << ", scale=" << p.scale << ")"; },
                 [&](const StudentT& s) { out << "student_t(dof=" << s.dof << ")"; },
                 [&](const Gaussian& g) { out << "gaussian(mean=" << g.mean << ", variance=" << g.variance << ")"; },
                 [&](const Shifted& s) { out << "shifted(" << s.inner->describe() << ", offset=" << s.offset << ")"; },
             },
             law_);
  return out.str();
}

namespace {

bool laws_equal(const Law& a, const Law& b) {
  if (a.index() != b.index()) return false;
  return std::visit(overloaded{
                        [&](const Bernoulli& x) { return x.p == std::get<Bernoulli>(b).p; },
                        [&](const TwoPoint& x) {
                          const auto& y = std::get<TwoPoint>(b);
                          return x.p_hi == y.p_hi && x.hi == y.hi;
                        },
                        [&](const Pareto& x) {
                          const auto& y = std::get<Pareto>(b);
                          return x.shape == y.shape && x.scale == y.scale;
                        },
                        [&](const StudentT& x) { return x.dof == std::get<StudentT>(b).dof; },
                        [&](const Gaussian& x) {
                          const auto& y = std::get<Gaussian>(b);
                          return x.mean == y.mean && x.variance == y.variance;
                        },
                        [&](const Shifted& x) {
                          const auto& y = std::get<Shifted>(b);
                          return x.offset == y.offset && *x.inner == *y.inner;
                        },
                    },
                    a);
}

}  // namespace

bool operator==(const Distribution& a, const Distribution& b) { return laws_equal(a.law_, b.law_); }

BanditInstance::BanditInstance(std::vector<Distribution> arms) : arms_(std::move(arms)) {
  if (arms_.size() < 2) throw InvalidInput("a bandit instance needs at least two arms");
  means_.reserve(arms_.size());
  for (const auto& arm : arms_) {
    const double mu = arm.mean();
    if (!std::isfinite(mu)) throw InvalidInput("arm mean must be finite");
    means_.push_back(mu);
  }
  mu_star_ = *std::max_element(means_.begin(), means_.end());
  gaps_.reserve(means_.size());
  for (double mu : means_) gaps_.push_back(mu_star_ - mu);
}

BanditInstance BanditInstance::shifted(double offset) const {
  std::vector<Distribution> arms;
  arms.reserve(arms_.size());
  for (const auto& arm : arms_) arms.push_back(Distribution::shifted(arm, offset));
  return BanditInstance(std::move(arms));
}

std::pair<Distribution, Distribution> lower_bound_pair(double gap, double epsilon) {
  require(gap > 0.0 && gap < 0.25, "gap must lie in (0, 1/4)");
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0,1]");
  const double gamma = std::pow(2.0 * gap, 1.0 / epsilon);
  const double p_best = std::pow(gamma, 1.0 + epsilon);
  return {Distribution::two_point(p_best, 1.0 / gamma), Distribution::two_point(p_best - gap * gamma, 1.0 / gamma)};
}

BanditInstance lower_bound_instance(std::size_t arms, std::size_t horizon, double epsilon) {
  require(arms >= 2, "need at least two arms");
  require(horizon >= 1, "horizon must be >= 1");
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0,1]");
  const double gap =
      std::pow(static_cast<double>(arms) / static_cast<double>(horizon), epsilon / (1.0 + epsilon));
  auto [best, other] = lower_bound_pair(gap, epsilon);
  std::vector<Distribution> laws{best};
  for (std::size_t i = 1; i < arms; ++i) laws.push_back(other);
  return BanditInstance(std::move(laws));
}

Distribution lemma1_tightness_instance(std::size_t n, double eta, double epsilon) {
  require(n >= 1, "n must be >= 1");
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0,1]");
  const double nd = static_cast<double>(n);
  require(std::isfinite(eta) && eta > std::pow(nd, -epsilon / (1.0 + epsilon)),
          "eta must exceed n^{-eps/(1+eps)}");
  const double gamma = 1.0 / (2.0 * nd * eta);
  return Distribution::two_point(std::pow(gamma, 1.0 + epsilon), 1.0 / gamma);
}

}  // namespace robucb
